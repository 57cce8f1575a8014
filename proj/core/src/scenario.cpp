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

#include "foveascan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "foveascan/errors.hpp"

namespace foveascan {

namespace {

struct Section {
    std::string name;
    std::map<std::string, std::string> kv;
    int line_no = 0;
};

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<Section> parse_sections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    std::vector<Section> sections;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": malformed section header " + line);
            sections.push_back({trim(line.substr(1, line.size() - 2)), {}, line_no});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value, got " + line);
        if (sections.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": key outside any [section]");
        sections.back().kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

class Reader {
public:
    Reader(const Section& s, const std::string& path) : s_(s), path_(path) {}

    bool has(const std::string& key) const { return s_.kv.count(key) != 0; }

    double num(const std::string& key, double fallback) const {
        return has(key) ? num(key) : fallback;
    }
    double num(const std::string& key) const {
        const auto it = s_.kv.find(key);
        if (it == s_.kv.end()) fail("missing key '" + key + "'");
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            fail("unparseable number for '" + key + "': " + it->second);
        }
        return 0;
    }
    int integer(const std::string& key, int fallback) const {
        return has(key) ? static_cast<int>(num(key)) : fallback;
    }
    std::string str(const std::string& key, const std::string& fallback = {}) const {
        const auto it = s_.kv.find(key);
        return it == s_.kv.end() ? fallback : it->second;
    }
    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string v = s_.kv.at(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail("expected boolean for '" + key + "', got " + v);
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(path_ + ": [" + s_.name + "] (line " +
                          std::to_string(s_.line_no) + "): " + msg);
    }

private:
    const Section& s_;
    const std::string& path_;
};

std::vector<std::array<double, 2>> parse_waypoints(const std::string& text,
                                                   const Reader& r) {
    std::vector<std::array<double, 2>> wps;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::istringstream pair(item);
        double x, y;
        char comma;
        if (!(pair >> x >> comma >> y) || comma != ',')
            r.fail("malformed waypoint '" + item + "' (want x,y; x,y; ...)");
        wps.push_back({x, y});
    }
    return wps;
}

Vec3 facing_normal(const std::string& facing, const Reader& r) {
    if (facing == "-x") return {-1, 0, 0};
    if (facing == "+x") return {1, 0, 0};
    if (facing == "-y") return {0, -1, 0};
    if (facing == "+y") return {0, 1, 0};
    r.fail("unknown facing '" + facing + "' (want +x, -x, +y or -y)");
    return {};
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    Scenario sc;
    sc.scene.illuminant.kind = IlluminantKind::combined;
    sc.scene.illuminant.halogen_on = false;

    int sensor_count = 0;
    int fiducial_count = 0;

    for (const auto& section : parse_sections(path)) {
        const Reader r(section, path);
        if (section.name == "scene") {
            sc.seed = static_cast<std::uint64_t>(r.num("seed", 0));
            sc.scene.rng_seed = sc.seed;
            const std::string ill = r.str("illuminant", "combined");
            if (ill == "solar")
                sc.scene.illuminant.kind = IlluminantKind::solar;
            else if (ill == "halogen")
                sc.scene.illuminant.kind = IlluminantKind::halogen;
            else if (ill == "combined")
                sc.scene.illuminant.kind = IlluminantKind::combined;
            else
                r.fail("unknown illuminant '" + ill + "'");
            sc.scene.illuminant.solar_scale = r.num("solar_scale", 1.0);
            sc.scene.illuminant.halogen_scale = r.num("halogen_scale", 1.0);
            sc.scene.sky_scale = r.num("sky_scale", 0.01);
        } else if (section.name == "grid") {
            sc.grid = make_grid(r.num("min_nm", 400.0), r.num("max_nm", 1000.0),
                                r.integer("bands", 270));
        } else if (section.name == "acquisition") {
            sc.camera.samples = r.integer("samples", 640);
            sc.camera.slit_fov_deg = r.num("slit_fov_deg", 5.0);
            sc.camera.exposure_ms = r.num("exposure_ms", 10.0);
            sc.camera.noise_floor = r.num("noise_floor", 0.0);
            sc.camera.band_noise_frac = r.num("band_noise_frac", 0.0);
            sc.camera.spectral_fwhm_nm = r.num("spectral_fwhm_nm", 3.0);
            sc.camera.focal_distance_m = r.num("focal_distance_m", 0.914);
            sc.camera.settle_tau_ms = r.num("settle_tau_ms", 0.0);
            sc.step_deg = r.num("step_deg", 0.02);
            sc.margin_frac = r.num("margin_frac", 0.25);
            sc.roi_shrink_frac = r.num("roi_shrink_frac", 0.2);
        } else if (section.name == "rgb") {
            sc.rgb.focal_px = r.num("focal_px", 2000.0);
            sc.rgb.width = r.integer("width", 1280);
            sc.rgb.height = r.integer("height", 1024);
            sc.gate.rgb_focal_px = sc.rgb.focal_px;
            sc.gate.rgb_cu = sc.rgb.cu();
            sc.gate.rgb_cv = sc.rgb.cv();
        } else if (section.name == "gate") {
            sc.gate.distance_nominal_mm = r.num("distance_nominal_mm", 914.0);
            sc.gate.distance_tol_mm = r.num("distance_tol_mm", 25.0);
            sc.gate.zone_width_mm = r.num("zone_width_mm", 76.0);
            sc.gate.zone_height_mm = r.num("zone_height_mm", 25.0);
            sc.gate.max_angle_deg = r.num("max_angle_deg", 4.0);
            sc.gate.sensor_size_mm = r.num("sensor_size_mm", 25.4);
        } else if (section.name == "row") {
            PlantRow row;
            row.id = r.str("id", "r" + std::to_string(sc.scene.rows.size()));
            const double x = r.num("x");
            const double y0 = r.num("y_start", 1.0);
            const double spacing = r.num("spacing", 1.5);
            const int plants = r.integer("plants", 2);
            const double width = r.num("plant_width", 0.45);
            const double height = r.num("plant_height", 0.8);
            const Vec3 normal = facing_normal(r.str("facing", "-x"), r);
            for (int i = 0; i < plants; ++i) {
                Plant p;
                p.id = row.id + "p" + std::to_string(i);
                p.quad = make_facing_quad({x, y0 + i * spacing, height / 2.0}, normal,
                                          width, height);
                row.plants.push_back(p);
            }
            sc.scene.rows.push_back(std::move(row));
        } else if (section.name == "sensor") {
            LeafSensorModel m;
            m.id = r.str("id", "s" + std::to_string(sensor_count++));
            m.plant_id = r.str("plant");
            const Plant* plant = sc.scene.find_plant(m.plant_id);
            if (!plant) r.fail("sensor references unknown plant '" + m.plant_id + "'");
            const double h = r.num("height", 0.45);
            const double yaw = deg2rad(r.num("yaw_deg", 0.0));
            const double pitch = deg2rad(r.num("pitch_deg", 0.0));
            Vec3 n = plant->quad.normal;
            n = rotate(n, Vec3{0, 0, 1}, yaw);
            const Vec3 pitch_axis = normalized(cross(Vec3{0, 0, 1}, n));
            n = rotate(n, pitch_axis, pitch);
            m.normal = normalized(n);
            // mounted slightly proud of the foliage face
            m.position = Vec3{plant->quad.center.x, plant->quad.center.y, h} +
                         0.008 * plant->quad.normal;
            m.width_m = r.num("width_m", 0.0254);
            m.height_m = r.num("height_m", 0.0254);
            m.resonance_peaks_nm.clear();
            std::istringstream peaks(r.str("peaks_nm", "650"));
            double pk;
            while (peaks >> pk) m.resonance_peaks_nm.push_back(pk);
            m.peak_fwhm_nm = r.num("fwhm_nm", 12.0);
            m.peak_amplitude = r.num("amplitude", 0.6);
            m.angle_shift_nm_per_deg = r.num("shift_nm_per_deg", 2.0);
            m.collection_halfangle_deg = r.num("halfangle_deg", 4.0);
            m.baseline_reflectance = r.num("baseline", 0.08);
            sc.scene.sensors.push_back(std::move(m));
        } else if (section.name == "fiducial") {
            Fiducial f;
            f.id = r.str("id", "f" + std::to_string(fiducial_count++));
            const Vec3 pos{r.num("x"), r.num("y"), r.num("z")};
            const Vec3 normal = facing_normal(r.str("facing", "-x"), r);
            f.quad = make_facing_quad(pos, normal, r.num("size_m", 0.05),
                                      r.num("size_m", 0.05));
            f.reflectance = r.num("reflectance", 0.9);
            sc.scene.fiducials.push_back(std::move(f));
        } else if (section.name == "mission") {
            sc.waypoints = parse_waypoints(r.str("waypoints", "0,0; 0,5"), r);
            sc.tuning.cruise_speed_mps = r.num("cruise_speed", 0.5);
            sc.tuning.slow_speed_mps = r.num("slow_speed", 0.012);
            sc.tuning.track_trigger_halfwidth_px =
                r.num("track_trigger_halfwidth_px", 220.0);
            sc.tuning.stop_centering_mm = r.num("stop_centering_mm", 5.0);
            sc.tuning.control_rate_hz = r.num("control_rate_hz", 10.0);
            sc.tuning.turn_rate_max_rps = r.num("turn_rate_max", 1.5);
            sc.tuning.verify_k = r.integer("verify_k", 3);
            sc.tuning.verify_var_thresh_px2 = r.num("verify_var_thresh_px2", 9.0);
            sc.tuning.track_loss_frames = r.integer("track_loss_frames", 5);
            sc.tuning.assoc_radius_px = r.num("assoc_radius_px", 60.0);
            sc.tuning.module_height_m = r.num("module_height", 0.45);
            sc.tuning.max_mission_s = r.num("max_mission_s", 1200.0);
            sc.use_halogen = r.flag("halogen", true);
        } else if (section.name == "detector") {
            sc.detector.miss_rate = r.num("miss_rate", 0.0);
            sc.detector.false_positive_rate = r.num("false_positive_rate", 0.0);
            sc.detector.centroid_jitter_px = r.num("centroid_jitter_px", 0.0);
            sc.detector.size_jitter_frac = r.num("size_jitter_frac", 0.0);
            sc.detector.max_range_m = r.num("max_range_m", 4.0);
            sc.detector.min_bbox_px = r.num("min_bbox_px", 6.0);
            sc.detection_log = r.str("log", "");
        } else if (section.name == "pose_noise") {
            sc.pose_noise.lateral_sigma_m = r.num("lateral_sigma_m", 0.0);
            sc.pose_noise.along_sigma_m = r.num("along_sigma_m", 0.0);
            sc.pose_noise.heading_sigma_deg = r.num("heading_sigma_deg", 0.0);
            sc.pose_noise.angle_estimate_sigma_deg = r.num("angle_estimate_sigma_deg", 0.0);
        } else if (section.name == "extract") {
            sc.extraction.smooth_window_bands = r.integer("smooth_window_bands", 5);
            sc.extraction.baseline_window_bands = r.integer("baseline_window_bands", 31);
            sc.extraction.snr_threshold = r.num("snr_threshold", 3.0);
            sc.extraction.search_min_nm = r.num("search_min_nm", 600.0);
            sc.extraction.search_max_nm = r.num("search_max_nm", 720.0);
            sc.extraction.fit_fwhm_nm = r.num("fit_fwhm_nm", 12.0);
            sc.reference_nm.clear();
            std::istringstream refs(r.str("reference_nm", "650"));
            double nm;
            while (refs >> nm) sc.reference_nm.push_back(nm);
        } else {
            throw ConfigError(path + ": unknown section [" + section.name + "] at line " +
                              std::to_string(section.line_no));
        }
    }

    if (sc.waypoints.size() < 2)
        throw ConfigError(path + ": mission needs at least 2 waypoints");
    if (sc.tuning.slow_speed_mps >= sc.tuning.cruise_speed_mps)
        throw ConfigError(path + ": slow_speed must be below cruise_speed");
    return sc;
}

}  // namespace foveascan
