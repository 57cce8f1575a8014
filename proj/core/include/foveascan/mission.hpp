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

#ifndef FOVEASCAN_MISSION_HPP
#define FOVEASCAN_MISSION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foveascan/calibration.hpp"
#include "foveascan/scenario.hpp"

namespace foveascan {

struct RobotPose {
    double x = 0.0;
    double y = 0.0;
    double heading_rad = 0.0;
    double speed_mps = 0.0;
};

/// Unicycle waypoint follower: bounded turn rate toward the active
/// waypoint, advance speed * dt. Returns the updated pose and bumps
/// `waypoint_index` when within the capture radius.
RobotPose follow_waypoints(const RobotPose& pose,
                           std::span<const std::array<double, 2>> waypoints,
                           int& waypoint_index, const MissionTuning& tuning, double dt_s);

enum class Phase {
    NAVIGATE,
    TRACKING,
    GATED_STOP,
    ILLUMINATE,
    ACQUIRE,
    EXTRACT,
    RESUME,
    DONE,
};

const char* phase_name(Phase p);

struct PipelineState {
    Phase phase = Phase::NAVIGATE;
    std::optional<VerifiedTarget> active_target;
    std::vector<std::string> visited_sensors;

    bool visited(const std::string& id) const;
};

/// Tick inputs for the pipeline step. Fields must be consistent with
/// the phase (an acquisition outcome only exists in ACQUIRE, etc.);
/// inconsistent inputs raise IllegalTransitionError.
struct PipelineInputs {
    bool final_waypoint_reached = false;
    bool candidate_detection = false;  // unvisited detection this frame
    bool track_lost = false;
    TrackStatus track_status = TrackStatus::not_yet;
    std::optional<VerifiedTarget> verified_target;
    std::optional<bool> gate_pass;
    std::optional<bool> acquisition_done;
    std::optional<bool> extraction_done;
};

enum class ActionKind { set_speed, set_halogen, execute_scan, emit_record };

struct Action {
    ActionKind kind;
    double value = 0.0;  // speed m/s or 0/1 flag
};

/// One state-machine transition. Pure; run_mission drives it.
std::pair<PipelineState, std::vector<Action>> step_pipeline(const PipelineState& state,
                                                            const PipelineInputs& inputs,
                                                            const MissionTuning& tuning);

/// Per-sensor outcome flags. The implication chain
/// resonance_accepted => cube_acquired => gate_passed => verified =>
/// detected holds for every record.
struct SensorRecord {
    std::string sensor_id;
    bool detected = false;
    bool verified = false;
    bool gate_passed = false;
    bool cube_acquired = false;
    bool resonance_accepted = false;
    double est_distance_mm = 0.0;
    double est_angle_deg = 0.0;
    ResonanceReport report;
};

struct TrajectorySample {
    double t_s = 0.0;
    double x = 0.0, y = 0.0;
    double heading_rad = 0.0;
    double speed_mps = 0.0;
    Phase phase = Phase::NAVIGATE;
};

struct ActionEvent {
    double t_s = 0.0;
    Action action;
};

struct Acquisition {
    std::string sensor_id;  // empty for false-positive targets
    SpectralCube cube;
    Spectrum corrected;          // reflectance over the extraction roi
    RoiWindow roi;
    ResonanceReport report;
};

struct MissionLog {
    std::vector<SensorRecord> sensors;
    std::vector<TrajectorySample> trajectory;
    std::vector<ActionEvent> actions;
    std::vector<Acquisition> acquisitions;
    double mission_time_s = 0.0;
    std::uint64_t run_seed = 0;
    bool timed_out = false;
};

/// Simulates one run at the control rate until DONE. Deterministic for
/// a fixed (scenario, calibration, seed). With keep_cubes = false the
/// acquisition payloads are dropped after extraction (metrics-only
/// batches stay small).
MissionLog run_mission(const Scenario& scenario, const Homography& calibration,
                       std::uint64_t run_seed, bool keep_cubes = true);

struct Metrics {
    double detection_rate = 0.0;
    double capture_rate = 0.0;
    double resonance_rate = 0.0;
    int sensor_records = 0;
};

/// Pooled per-sensor success rates over a set of runs.
Metrics aggregate_metrics(std::span<const MissionLog> logs);

// ---- report emission (mission External Interface) ----

/// Writes mission.log, trajectory.csv, sensors.csv, acquired cubes and
/// spectrum CSVs under `dir` (created if needed).
void write_mission_outputs(const MissionLog& log, const Scenario& scenario,
                           const std::string& dir);

void write_metrics_csv(const Metrics& m, const std::string& path);

}  // namespace foveascan

#endif  // FOVEASCAN_MISSION_HPP
