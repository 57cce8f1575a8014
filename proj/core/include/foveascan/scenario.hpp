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

#ifndef FOVEASCAN_SCENARIO_HPP
#define FOVEASCAN_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "foveascan/optics.hpp"
#include "foveascan/perception.hpp"
#include "foveascan/rgb_camera.hpp"
#include "foveascan/scene.hpp"

namespace foveascan {

/// Waypoint-following and pipeline tuning knobs. The robot cruises
/// until a detection enters the trigger zone around the image centre,
/// then crawls at slow_speed so the 3-frame centroid-variance check can
/// hold while the capture gate is evaluated.
struct MissionTuning {
    double cruise_speed_mps = 0.5;
    double slow_speed_mps = 0.012;
    double control_rate_hz = 10.0;
    double turn_rate_max_rps = 1.5;
    double waypoint_capture_m = 0.05;
    double pursuit_lookahead_m = 0.5;
    int verify_k = 3;
    double verify_var_thresh_px2 = 9.0;
    int track_loss_frames = 5;
    double assoc_radius_px = 60.0;
    double track_trigger_halfwidth_px = 220.0;
    // the robot aims for the centre of the capture zone: it keeps
    // crawling until the target sits within this lateral offset
    double stop_centering_mm = 5.0;
    double module_height_m = 0.45;
    double max_mission_s = 1200.0;
};

/// Per-run odometry error: the whole believed path is displaced and
/// rotated by a seeded draw, so geometric gate failures arise the way
/// they do on the real platform.
struct PoseNoise {
    double lateral_sigma_m = 0.0;
    double along_sigma_m = 0.0;
    double heading_sigma_deg = 0.0;
    double angle_estimate_sigma_deg = 0.0;  // noise on the approach-angle estimate
};

/// Everything a run needs: the world, the instruments, the tuning and
/// the noise presets. Loaded from a scenario file.
struct Scenario {
    Scene scene;
    WavelengthGrid grid = default_instrument_grid();
    PushbroomCamera camera;
    RgbCameraModel rgb;
    CaptureGate gate;
    DetectorNoiseModel detector;
    PoseNoise pose_noise;
    MissionTuning tuning;
    std::vector<std::array<double, 2>> waypoints;
    bool use_halogen = true;
    double step_deg = 0.02;
    double margin_frac = 0.25;
    double roi_shrink_frac = 0.2;
    PeakFindParams extraction;
    std::vector<double> reference_nm{650.0};
    std::uint64_t seed = 0;
    std::string detection_log;  // replay detections from CSV when set
};

/// Parses the declarative scenario format (key = value sections; see
/// the scenarios/ directory for examples).
Scenario load_scenario(const std::string& path);

}  // namespace foveascan

#endif  // FOVEASCAN_SCENARIO_HPP
