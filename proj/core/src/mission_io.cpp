// Copyright 2026 The Foveascan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "foveascan/envi.hpp"
#include "foveascan/errors.hpp"
#include "foveascan/mission.hpp"

namespace foveascan {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_mission_outputs(const MissionLog& log, const Scenario& scenario,
                           const std::string& dir) {
    try {
        std::filesystem::create_directories(dir);
    } catch (const std::filesystem::filesystem_error& e) {
        throw IoError("cannot create output directory " + dir + ": " + e.what());
    }

    {
        auto out = open_out(dir + "/trajectory.csv");
        out << "t_s,x_m,y_m,heading_rad,speed_mps,phase\n";
        for (const auto& s : log.trajectory)
            out << g(s.t_s) << "," << g(s.x) << "," << g(s.y) << "," << g(s.heading_rad)
                << "," << g(s.speed_mps) << "," << phase_name(s.phase) << "\n";
    }

    {
        auto out = open_out(dir + "/sensors.csv");
        out << "sensor_id,detected,verified,gate_passed,cube_acquired,resonance_accepted,"
               "est_distance_mm,est_angle_deg,peak_nm,peak_snr,offset_nm\n";
        for (const auto& r : log.sensors) {
            const PeakInfo* best = r.report.best_peak();
            out << r.sensor_id << "," << r.detected << "," << r.verified << ","
                << r.gate_passed << "," << r.cube_acquired << "," << r.resonance_accepted
                << "," << g(r.est_distance_mm) << "," << g(r.est_angle_deg) << ","
                << (best ? g(best->wavelength_nm) : "") << ","
                << (best ? g(best->snr) : "") << ","
                << (r.report.reference_match ? g(r.report.reference_match->offset_nm) : "")
                << "\n";
        }
    }

    {
        auto out = open_out(dir + "/mission.log");
        out << "foveascan mission log\n";
        out << "run_seed = " << log.run_seed << "\n";
        out << "mission_time_s = " << g(log.mission_time_s) << "\n";
        out << "timed_out = " << (log.timed_out ? 1 : 0) << "\n";
        out << "sensors = " << log.sensors.size() << "\n";
        for (const auto& r : log.sensors) {
            out << "\n[sensor " << r.sensor_id << "]\n";
            out << "detected = " << r.detected << "\n";
            out << "verified = " << r.verified << "\n";
            out << "gate_passed = " << r.gate_passed << "\n";
            out << "cube_acquired = " << r.cube_acquired << "\n";
            out << "resonance_accepted = " << r.resonance_accepted << "\n";
            out << "est_distance_mm = " << g(r.est_distance_mm) << "\n";
            out << "est_angle_deg = " << g(r.est_angle_deg) << "\n";
            out << format_resonance_report(r.report);
        }
        out << "\n[actions]\n";
        for (const auto& e : log.actions) {
            const char* k = e.action.kind == ActionKind::set_speed      ? "set_speed"
                            : e.action.kind == ActionKind::set_halogen  ? "set_halogen"
                            : e.action.kind == ActionKind::execute_scan ? "execute_scan"
                                                                        : "emit_record";
            out << g(e.t_s) << " " << k << " " << g(e.action.value) << "\n";
        }
    }

    int i = 0;
    for (const auto& acq : log.acquisitions) {
        const std::string stem =
            dir + "/" + (acq.sensor_id.empty() ? "target" + std::to_string(i) : acq.sensor_id);
        if (acq.cube.lines() > 1 || acq.cube.samples() > 1) write_cube(acq.cube, stem);
        auto out = open_out(stem + "_spectrum.csv");
        out << "wavelength_nm,reflectance\n";
        for (int b = 0; b < acq.corrected.grid.bands; ++b)
            out << g(acq.corrected.grid.wavelength(b)) << "," << g(acq.corrected.values[b])
                << "\n";
        auto rep = open_out(stem + "_report.txt");
        rep << format_resonance_report(acq.report);
        ++i;
    }

    // white/dark references used by the extraction, for replay through
    // the extract subcommand
    if (!log.acquisitions.empty()) {
        Scene acq_scene = scenario.scene;
        if (acq_scene.illuminant.kind != IlluminantKind::solar)
            acq_scene.illuminant.halogen_on = scenario.use_halogen;
        SpectralCube white(1, 1, scenario.grid), dark(1, 1, scenario.grid);
        for (int b = 0; b < scenario.grid.bands; ++b) {
            white.set(0, 0, b,
                      static_cast<float>(illuminant_spectrum(acq_scene.illuminant,
                                                             scenario.grid.wavelength(b))));
            dark.set(0, 0, b, 0.0f);
        }
        write_cube(white, dir + "/white");
        write_cube(dark, dir + "/dark");
    }
}

void write_metrics_csv(const Metrics& m, const std::string& path) {
    auto out = open_out(path);
    out << "sensor_records,detection_rate,capture_rate,resonance_rate\n";
    out << m.sensor_records << "," << g(m.detection_rate) << "," << g(m.capture_rate) << ","
        << g(m.resonance_rate) << "\n";
}

}  // namespace foveascan
