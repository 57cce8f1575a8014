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
//
// foveascan: scenario-driven simulator for the mirror-foveated
// pushbroom crop-sensing pipeline.
//
//   foveascan calibrate    estimate the RGB-pixel -> mirror-tilt map
//   foveascan mission      run the full detect/verify/acquire pipeline
//   foveascan extract      pull a resonance report out of a cube
//   foveascan render-scene brute-force reference scan of a scenario

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "foveascan/calibration.hpp"
#include "foveascan/envi.hpp"
#include "foveascan/errors.hpp"
#include "foveascan/mission.hpp"
#include "foveascan/rng.hpp"
#include "foveascan/scenario.hpp"

namespace {

using namespace foveascan;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

Frame start_mount(const Scenario& sc) {
    const auto& wps = sc.waypoints;
    RobotPose pose;
    pose.x = wps[0][0];
    pose.y = wps[0][1];
    pose.heading_rad = std::atan2(wps[1][1] - wps[0][1], wps[1][0] - wps[0][0]);
    const double c = std::cos(pose.heading_rad), s = std::sin(pose.heading_rad);
    Frame f;
    f.origin = {pose.x, pose.y, sc.tuning.module_height_m};
    f.ex = {s, -c, 0};
    f.ey = {c, s, 0};
    f.ez = {0, 0, 1};
    return f;
}

int cmd_calibrate(const std::string& scenario_path, const std::string& out_path) {
    const Scenario sc = load_scenario(scenario_path);
    CalibrationData cal;
    cal.rgb = sc.rgb;
    cal.correspondences =
        build_calibration_mosaic(sc.scene, sc.rgb, start_mount(sc), sc.camera.theta_max_deg);
    cal.H = estimate_homography(cal.correspondences);
    save_calibration(cal, out_path);
    std::printf("calibration: %zu correspondences, residual_rms = %.6g deg\n",
                cal.correspondences.size(), cal.H.residual_rms_deg());
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
}

int cmd_mission(const std::string& scenario_path, const std::string& calibration_path,
                std::uint64_t seed, int n_runs, const std::string& out_dir) {
    Scenario sc = load_scenario(scenario_path);
    if (seed != 0) sc.seed = seed;
    const Homography H = calibration_path.empty()
                             ? estimate_homography(build_calibration_mosaic(
                                   sc.scene, sc.rgb, start_mount(sc),
                                   sc.camera.theta_max_deg))
                             : load_calibration(calibration_path).H;

    try {
        std::filesystem::create_directories(out_dir);
    } catch (const std::filesystem::filesystem_error& e) {
        throw ConfigError("cannot create output directory " + out_dir + ": " + e.what());
    }
    std::vector<MissionLog> logs;
    logs.reserve(n_runs);
    for (int run = 0; run < n_runs; ++run) {
        const std::uint64_t run_seed = mix_seed(sc.seed, static_cast<std::uint64_t>(run));
        MissionLog log = run_mission(sc, H, run_seed);
        char name[32];
        std::snprintf(name, sizeof name, "run_%03d", run);
        write_mission_outputs(log, sc, out_dir + "/" + name);
        logs.push_back(std::move(log));
    }
    const Metrics m = aggregate_metrics(logs);
    write_metrics_csv(m, out_dir + "/metrics.csv");
    std::printf("%d run(s), %d sensor record(s)\n", n_runs, m.sensor_records);
    std::printf("detection_rate = %.4f\n", m.detection_rate);
    std::printf("capture_rate = %.4f\n", m.capture_rate);
    std::printf("resonance_rate = %.4f\n", m.resonance_rate);
    return kExitOk;
}

int cmd_extract(const std::string& cube_path, const std::string& white_path,
                const std::string& dark_path, const std::vector<int>& roi,
                const std::vector<double>& reference_nm, const std::string& out_path,
                const std::string& spectrum_csv) {
    const SpectralCube cube = read_cube(cube_path);
    const SpectralCube white = read_cube(white_path);
    const SpectralCube dark = read_cube(dark_path);
    if (!(white.grid() == cube.grid()) || !(dark.grid() == cube.grid()))
        throw GridMismatchError("cube, white and dark grids differ");

    RoiWindow window{0, cube.lines(), 0, cube.samples()};
    if (!roi.empty()) {
        if (roi.size() != 4)
            throw ConfigError("--roi wants line0,line1,sample0,sample1");
        window = RoiWindow{roi[0], roi[1], roi[2], roi[3]};
    }
    const Spectrum raw = roi_mean_spectrum(cube, window);
    const Spectrum white_spec =
        roi_mean_spectrum(white, {0, white.lines(), 0, white.samples()});
    const Spectrum dark_spec = roi_mean_spectrum(dark, {0, dark.lines(), 0, dark.samples()});

    const CorrectedSpectrum corrected = reflectance_correct(raw, white_spec, dark_spec);
    ResonanceReport report = detect_resonance(corrected.spectrum, PeakFindParams{},
                                              corrected.valid);
    if (report.accepted && !reference_nm.empty())
        report.reference_match = match_resonance(report, reference_nm);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << format_resonance_report(report);
    if (!spectrum_csv.empty()) {
        std::ofstream csv(spectrum_csv);
        if (!csv) throw IoError("cannot write " + spectrum_csv);
        csv << "wavelength_nm,reflectance\n";
        char buf[80];
        for (int b = 0; b < corrected.spectrum.grid.bands; ++b) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n",
                          corrected.spectrum.grid.wavelength(b),
                          corrected.spectrum.values[b]);
            csv << buf;
        }
    }
    std::printf("accepted = %d, peaks = %zu\n", report.accepted ? 1 : 0,
                report.peaks.size());
    if (const PeakInfo* best = report.best_peak())
        std::printf("best peak %.2f nm, snr %.2f\n", best->wavelength_nm, best->snr);
    if (report.reference_match)
        std::printf("matched = %d, offset_nm = %.3f\n",
                    report.reference_match->matched ? 1 : 0,
                    report.reference_match->offset_nm);
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
}

int cmd_render_scene(const std::string& scenario_path, const std::string& out_base,
                     double tilt_x_min, double tilt_x_max, double step,
                     std::vector<double> tilt_y, std::uint64_t seed) {
    const Scenario sc = load_scenario(scenario_path);
    PushbroomCamera cam = sc.camera;
    cam.mount = start_mount(sc);
    if (tilt_y.empty()) tilt_y.push_back(0.0);
    const Mosaic mosaic =
        render_scene(sc.scene, cam, sc.grid, tilt_x_min, tilt_x_max, step, tilt_y,
                     seed == 0 ? sc.seed : seed);
    write_cube(mosaic.cube, out_base);
    std::printf("rendered %d x %d x %d -> %s.{hdr,bil}\n", mosaic.cube.lines(),
                mosaic.cube.samples(), mosaic.cube.grid().bands, out_base.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"foveated pushbroom hyperspectral crop-sensing simulator"};
    app.require_subcommand(1);

    std::string scenario, calibration, out, cube, white, dark, spectrum_csv;
    std::uint64_t seed = 0;
    int n_runs = 1;
    std::vector<int> roi;
    std::vector<double> reference_nm;
    double tx_min = -25.0, tx_max = 25.0, step = 0.1;
    std::vector<double> tilt_y;

    auto* cal = app.add_subcommand("calibrate", "estimate the pixel-to-tilt homography");
    cal->add_option("--scenario", scenario, "scenario file")->required();
    cal->add_option("--out", out, "calibration file to write")->required();

    auto* mis = app.add_subcommand("mission", "run the autonomous sensing pipeline");
    mis->add_option("--scenario", scenario, "scenario file")->required();
    mis->add_option("--calibration", calibration, "calibration file (default: self-calibrate)");
    mis->add_option("--seed", seed, "manifest seed (overrides the scenario seed)");
    mis->add_option("--n-runs", n_runs, "number of runs")->check(CLI::PositiveNumber);
    mis->add_option("--out", out, "output directory")->required();

    auto* ext = app.add_subcommand("extract", "extract a resonance report from a cube");
    ext->add_option("--cube", cube, "acquired cube (.hdr/.bil base)")->required();
    ext->add_option("--white", white, "white reference cube")->required();
    ext->add_option("--dark", dark, "dark reference cube")->required();
    ext->add_option("--roi", roi, "line0,line1,sample0,sample1")->delimiter(',');
    ext->add_option("--reference-nm", reference_nm, "lab reference peaks, nm")
        ->delimiter(',');
    ext->add_option("--out", out, "report file to write")->required();
    ext->add_option("--spectrum-csv", spectrum_csv, "also write the corrected spectrum");

    auto* ren = app.add_subcommand("render-scene",
                                   "brute-force scan (noise off), the foveation oracle");
    ren->add_option("--scenario", scenario, "scenario file")->required();
    ren->add_option("--out", out, "output cube base path")->required();
    ren->add_option("--tilt-x-min", tx_min, "sweep start, deg");
    ren->add_option("--tilt-x-max", tx_max, "sweep end, deg");
    ren->add_option("--step", step, "tilt_x step, deg")->check(CLI::PositiveNumber);
    ren->add_option("--ty", tilt_y, "tilt_y column centres, deg")->delimiter(',');
    ren->add_option("--seed", seed, "seed recorded with the render");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cal->parsed()) return cmd_calibrate(scenario, out);
        if (mis->parsed()) return cmd_mission(scenario, calibration, seed, n_runs, out);
        if (ext->parsed())
            return cmd_extract(cube, white, dark, roi, reference_nm, out, spectrum_csv);
        if (ren->parsed())
            return cmd_render_scene(scenario, out, tx_min, tx_max, step, tilt_y, seed);
    } catch (const IllegalTransitionError& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitConfig;
}
