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

#include "foveascan/mission.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "foveascan/errors.hpp"
#include "foveascan/rng.hpp"

namespace foveascan {

RobotPose follow_waypoints(const RobotPose& pose,
                           std::span<const std::array<double, 2>> waypoints,
                           int& waypoint_index, const MissionTuning& tuning, double dt_s) {
    if (dt_s <= 0.0) throw InvalidRangeError("control step must be positive");
    RobotPose p = pose;
    if (waypoint_index >= static_cast<int>(waypoints.size())) return p;

    const auto& wp = waypoints[waypoint_index];
    const double dx = wp[0] - p.x;
    const double dy = wp[1] - p.y;
    if (std::hypot(dx, dy) <= tuning.waypoint_capture_m) {
        ++waypoint_index;
        return follow_waypoints(p, waypoints, waypoint_index, tuning, dt_s);
    }

    // pursue a lookahead point on the active segment so the robot
    // converges back onto the lane after corners instead of drifting
    // toward the endpoint on a chord
    double tx = wp[0], ty = wp[1];
    if (waypoint_index > 0) {
        const auto& prev = waypoints[waypoint_index - 1];
        const double sx = wp[0] - prev[0], sy = wp[1] - prev[1];
        const double len2 = sx * sx + sy * sy;
        if (len2 > 1e-12) {
            const double len = std::sqrt(len2);
            double along = ((p.x - prev[0]) * sx + (p.y - prev[1]) * sy) / len;
            along = std::clamp(along + tuning.pursuit_lookahead_m, 0.0, len);
            tx = prev[0] + along * sx / len;
            ty = prev[1] + along * sy / len;
        }
    }

    const double desired = std::atan2(ty - p.y, tx - p.x);
    double err = desired - p.heading_rad;
    while (err > kPi) err -= 2 * kPi;
    while (err < -kPi) err += 2 * kPi;
    const double max_turn = tuning.turn_rate_max_rps * dt_s;
    p.heading_rad += std::clamp(err, -max_turn, max_turn);

    p.x += p.speed_mps * dt_s * std::cos(p.heading_rad);
    p.y += p.speed_mps * dt_s * std::sin(p.heading_rad);
    return p;
}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::NAVIGATE: return "NAVIGATE";
        case Phase::TRACKING: return "TRACKING";
        case Phase::GATED_STOP: return "GATED_STOP";
        case Phase::ILLUMINATE: return "ILLUMINATE";
        case Phase::ACQUIRE: return "ACQUIRE";
        case Phase::EXTRACT: return "EXTRACT";
        case Phase::RESUME: return "RESUME";
        case Phase::DONE: return "DONE";
    }
    return "?";
}

bool PipelineState::visited(const std::string& id) const {
    return std::find(visited_sensors.begin(), visited_sensors.end(), id) !=
           visited_sensors.end();
}

std::pair<PipelineState, std::vector<Action>> step_pipeline(const PipelineState& state,
                                                            const PipelineInputs& in,
                                                            const MissionTuning& tuning) {
    // phase/input consistency checks: feeding an outcome that cannot
    // exist in the current phase is a programming fault
    if (in.gate_pass.has_value() && state.phase != Phase::TRACKING)
        throw IllegalTransitionError("gate result supplied outside TRACKING");
    if (in.acquisition_done.has_value() && state.phase != Phase::ACQUIRE)
        throw IllegalTransitionError("acquisition outcome supplied outside ACQUIRE");
    if (in.extraction_done.has_value() && state.phase != Phase::EXTRACT)
        throw IllegalTransitionError("extraction outcome supplied outside EXTRACT");
    if (in.final_waypoint_reached && state.phase != Phase::NAVIGATE &&
        state.phase != Phase::TRACKING && state.phase != Phase::DONE)
        throw IllegalTransitionError("cannot reach the final waypoint while stationary");

    PipelineState next = state;
    std::vector<Action> actions;

    switch (state.phase) {
        case Phase::NAVIGATE:
            if (in.final_waypoint_reached) {
                next.phase = Phase::DONE;
                actions.push_back({ActionKind::set_speed, 0.0});
            } else if (in.candidate_detection) {
                next.phase = Phase::TRACKING;
                actions.push_back({ActionKind::set_speed, tuning.slow_speed_mps});
            }
            break;
        case Phase::TRACKING:
            if (in.final_waypoint_reached) {
                next.phase = Phase::DONE;
                actions.push_back({ActionKind::set_speed, 0.0});
            } else if (in.track_lost || in.track_status == TrackStatus::rejected) {
                next.phase = Phase::NAVIGATE;
                next.active_target.reset();
                // stay slow while another candidate is still in the
                // engage zone, else resume cruise
                actions.push_back({ActionKind::set_speed,
                                   in.candidate_detection ? tuning.slow_speed_mps
                                                          : tuning.cruise_speed_mps});
            } else if (in.track_status == TrackStatus::verified && in.gate_pass &&
                       *in.gate_pass) {
                next.phase = Phase::GATED_STOP;
                next.active_target = in.verified_target;
                actions.push_back({ActionKind::set_speed, 0.0});
            }
            break;
        case Phase::GATED_STOP:
            next.phase = Phase::ILLUMINATE;
            actions.push_back({ActionKind::set_halogen, 1.0});
            break;
        case Phase::ILLUMINATE:
            next.phase = Phase::ACQUIRE;
            actions.push_back({ActionKind::execute_scan, 1.0});
            break;
        case Phase::ACQUIRE:
            if (in.acquisition_done && *in.acquisition_done) next.phase = Phase::EXTRACT;
            break;
        case Phase::EXTRACT:
            if (in.extraction_done && *in.extraction_done) {
                next.phase = Phase::RESUME;
                actions.push_back({ActionKind::emit_record, 1.0});
            }
            break;
        case Phase::RESUME:
            next.phase = Phase::NAVIGATE;
            next.active_target.reset();
            actions.push_back({ActionKind::set_halogen, 0.0});
            actions.push_back({ActionKind::set_speed, tuning.cruise_speed_mps});
            break;
        case Phase::DONE:
            break;
    }
    return {next, actions};
}

namespace {

// Association-by-proximity track of the current candidate target.
struct Track {
    std::vector<Detection> history;
    int missing_frames = 0;
    bool active = false;

    void reset() {
        history.clear();
        missing_frames = 0;
        active = false;
    }

    /// Dominant ground-truth link in the history (empty for FP tracks).
    std::string truth() const {
        std::map<std::string, int> votes;
        for (const auto& d : history)
            if (!d.truth_link.empty()) ++votes[d.truth_link];
        std::string best;
        int best_n = 0;
        for (const auto& [id, n] : votes)
            if (n > best_n) {
                best = id;
                best_n = n;
            }
        return best;
    }
};

// Constant odometry bias for one run: cross-track and along-track
// offsets plus a heading bias. Waypoint following regulates the
// cross-track error, so the residual is a bias, not an integrating
// drift.
struct OdoError {
    double dx = 0.0, dy = 0.0, dth = 0.0;

    RobotPose apply(const RobotPose& odo) const {
        RobotPose p = odo;
        p.x = odo.x + dx;
        p.y = odo.y + dy;
        p.heading_rad = odo.heading_rad + dth;
        return p;
    }
};

Frame module_frame(const RobotPose& pose, double height_m) {
    const double c = std::cos(pose.heading_rad), s = std::sin(pose.heading_rad);
    Frame f;
    f.origin = {pose.x, pose.y, height_m};
    f.ex = {s, -c, 0};  // module looks to the robot's right
    f.ey = {c, s, 0};   // along-track
    f.ez = {0, 0, 1};
    return f;
}

}  // namespace

MissionLog run_mission(const Scenario& scenario, const Homography& calibration,
                       std::uint64_t run_seed, bool keep_cubes) {
    const Rng base(run_seed);
    Rng pose_rng = base.stream("pose");
    Rng det_rng = base.stream("detector");
    Rng angle_rng = base.stream("angle-estimate");
    const Rng acquire_rng = base.stream("acquire");

    MissionLog log;
    log.run_seed = run_seed;
    for (const auto& s : scenario.scene.sensors) log.sensors.push_back({.sensor_id = s.id});

    std::vector<Detection> replay;
    if (!scenario.detection_log.empty()) replay = load_detection_log(scenario.detection_log);

    const auto& wps = scenario.waypoints;
    OdoError err;
    err.dx = scenario.pose_noise.lateral_sigma_m * pose_rng.gaussian();
    err.dy = scenario.pose_noise.along_sigma_m * pose_rng.gaussian();
    err.dth = deg2rad(scenario.pose_noise.heading_sigma_deg * pose_rng.gaussian());

    RobotPose odo;
    odo.x = wps[0][0];
    odo.y = wps[0][1];
    odo.heading_rad = std::atan2(wps[1][1] - wps[0][1], wps[1][0] - wps[0][0]);
    odo.speed_mps = scenario.tuning.cruise_speed_mps;
    int waypoint_index = 1;

    PipelineState state;
    Track track;
    auto record_of = [&](const std::string& id) -> SensorRecord* {
        for (auto& r : log.sensors)
            if (r.sensor_id == id) return &r;
        return nullptr;
    };

    const double dt = 1.0 / scenario.tuning.control_rate_hz;
    double t = 0.0;
    int frame = 0;
    int acquisition_count = 0;

    // pending work carried between ticks
    bool pending_acquired = false;
    bool pending_extracted = false;
    std::string pending_sensor_id;
    GateResult last_gate{};

    while (state.phase != Phase::DONE) {
        if (t > scenario.tuning.max_mission_s) {
            log.timed_out = true;
            break;
        }
        const RobotPose true_pose = err.apply(odo);
        const Frame mount = module_frame(true_pose, scenario.tuning.module_height_m);

        PipelineInputs in;
        in.final_waypoint_reached = waypoint_index >= static_cast<int>(wps.size());

        const bool sensing = state.phase == Phase::NAVIGATE || state.phase == Phase::TRACKING;
        if (sensing) {
            std::vector<Detection> dets;
            if (!replay.empty()) {
                for (const auto& d : replay)
                    if (d.frame_id == frame) dets.push_back(d);
            } else {
                dets = simulate_detections(scenario.scene, mount, scenario.rgb,
                                           scenario.detector, frame, det_rng);
            }
            for (const auto& d : dets)
                if (!d.truth_link.empty())
                    if (auto* r = record_of(d.truth_link)) r->detected = true;

            // drop detections of already-visited sensors
            std::erase_if(dets, [&](const Detection& d) {
                return !d.truth_link.empty() && state.visited(d.truth_link);
            });

            if (!track.active) {
                // tracking engages only once a detection enters the
                // trigger zone around the image centre, where the gate
                // can eventually pass and the crawl keeps the centroid
                // variance small
                const Detection* best = nullptr;
                for (const auto& d : dets) {
                    if (std::fabs(d.bbox.u - scenario.rgb.cu()) >
                        scenario.tuning.track_trigger_halfwidth_px)
                        continue;
                    if (!best || d.confidence > best->confidence) best = &d;
                }
                if (best) {
                    track.active = true;
                    track.history.push_back(*best);
                }
            } else {
                const auto& lastd = track.history.back();
                const Detection* nearest = nullptr;
                double best_d2 = scenario.tuning.assoc_radius_px *
                                 scenario.tuning.assoc_radius_px;
                for (const auto& d : dets) {
                    const double du = d.bbox.u - lastd.bbox.u;
                    const double dv = d.bbox.v - lastd.bbox.v;
                    const double d2 = du * du + dv * dv;
                    if (d2 <= best_d2) {
                        best_d2 = d2;
                        nearest = &d;
                    }
                }
                if (nearest) {
                    track.history.push_back(*nearest);
                    track.missing_frames = 0;
                    if (track.history.size() > 64)
                        track.history.erase(track.history.begin());
                } else {
                    ++track.missing_frames;
                }
            }

            bool in_zone = false;
            for (const auto& d : dets)
                if (std::fabs(d.bbox.u - scenario.rgb.cu()) <=
                    scenario.tuning.track_trigger_halfwidth_px)
                    in_zone = true;
            in.candidate_detection =
                state.phase == Phase::NAVIGATE ? track.active : in_zone;
            in.track_lost = track.missing_frames > scenario.tuning.track_loss_frames;

            if (state.phase == Phase::TRACKING) {
                const TrackResult tr =
                    verify_track(track.history, scenario.tuning.verify_k,
                                 scenario.tuning.verify_var_thresh_px2);
                in.track_status = tr.status;
                in.verified_target = tr.target;
                const std::string truth = track.truth();
                if (tr.status == TrackStatus::verified) {
                    if (auto* r = record_of(truth)) r->verified = true;

                    // approach-angle estimate: the a-priori map says
                    // sensors face the lane perpendicular, so the
                    // estimate is the angle between the true module
                    // axis and the believed perpendicular -- i.e. the
                    // odometry heading bias. Mounting misalignment is
                    // unobservable and shows up later as a failed
                    // resonance.
                    const double c0 = std::cos(odo.heading_rad);
                    const double s0 = std::sin(odo.heading_rad);
                    double est_angle = angle_deg(mount.ex, Vec3{s0, -c0, 0.0});
                    est_angle += scenario.pose_noise.angle_estimate_sigma_deg *
                                 angle_rng.gaussian();
                    last_gate = capture_gate(scenario.gate, *tr.target, est_angle);
                    // stop once the gate holds and the target is nearly
                    // centred; the zone bound alone would stop at its edge
                    in.gate_pass = last_gate.pass &&
                                   std::fabs(last_gate.lateral_along_mm) <=
                                       scenario.tuning.stop_centering_mm;
                    if (auto* r = record_of(truth)) {
                        r->est_distance_mm = last_gate.est_distance_mm;
                        r->est_angle_deg = last_gate.est_angle_deg;
                        if (last_gate.pass) r->gate_passed = true;
                    }
                }
            }
        }

        if (state.phase == Phase::ACQUIRE) in.acquisition_done = pending_acquired;
        if (state.phase == Phase::EXTRACT) in.extraction_done = pending_extracted;

        auto [next_state, actions] = step_pipeline(state, in, scenario.tuning);
        for (const auto& a : actions) {
            log.actions.push_back({t, a});
            if (a.kind == ActionKind::set_speed) odo.speed_mps = a.value;
        }
        const bool entered_acquire =
            state.phase == Phase::ILLUMINATE && next_state.phase == Phase::ACQUIRE;
        const bool left_resume = state.phase == Phase::RESUME;
        const bool dropped_track =
            state.phase == Phase::TRACKING && next_state.phase == Phase::NAVIGATE;
        state = next_state;

        if (dropped_track) track.reset();  // lost or rejected: start clean

        if (left_resume) {
            // returning to navigation: the handled sensor never
            // retriggers tracking
            if (!pending_sensor_id.empty() && !state.visited(pending_sensor_id))
                state.visited_sensors.push_back(pending_sensor_id);
            pending_sensor_id.clear();
            track.reset();
            pending_acquired = pending_extracted = false;
        }

        if (entered_acquire) {
            if (!state.active_target)
                throw IllegalTransitionError("ACQUIRE entered without a verified target");
            // run the sweep now; the pipeline sees it complete next tick
            const std::string truth = track.truth();
            Acquisition acq;
            acq.sensor_id = truth;
            pending_sensor_id = truth;
            bool planned = true;
            ScanPlan plan;
            try {
                plan = plan_sweep(calibration, state.active_target->mean_bbox,
                                  scenario.margin_frac, scenario.step_deg,
                                  scenario.camera.theta_max_deg);
                plan.exposure_ms = scenario.camera.exposure_ms;
            } catch (const Error&) {
                planned = false;  // bbox maps outside the sweepable range
            }
            if (planned) {
                Scene acq_scene = scenario.scene;
                if (acq_scene.illuminant.kind != IlluminantKind::solar)
                    acq_scene.illuminant.halogen_on = scenario.use_halogen;
                PushbroomCamera cam = scenario.camera;
                cam.mount = mount;
                const std::uint64_t seed =
                    mix_seed(acquire_rng.seed(), static_cast<std::uint64_t>(acquisition_count++));
                acq.cube = acquire_patch(acq_scene, cam, plan, scenario.grid, seed);
                t += scan_timing(plan.exposure_ms, plan.lines).t_img_ms / 1000.0;

                // truth coverage: did the sweep actually contain the sensor?
                bool covered = false;
                if (const LeafSensorModel* sensor = scenario.scene.find_sensor(truth)) {
                    try {
                        const Vec3 dir = mount.dir_to_local(
                            normalized(sensor->position - mount.origin));
                        const auto [txs, tys] =
                            mirror_tilt_for_target(dir, scenario.camera.theta_max_deg);
                        const double az_grid = 2.0 * (tys - plan.tilt_y_start);
                        covered = txs >= plan.tilt_x_start - 1e-9 &&
                                  txs <= plan.tilt_x_end + 1e-9 &&
                                  std::fabs(az_grid) <= scenario.camera.slit_fov_deg / 2.0;
                    } catch (const UnreachableTargetError&) {
                        covered = false;
                    }
                }
                if (covered)
                    if (auto* r = record_of(truth)) r->cube_acquired = true;

                // extraction happens immediately; the state machine sees
                // the outcome on the EXTRACT tick
                Spectrum white(scenario.grid), dark(scenario.grid);
                for (int b = 0; b < scenario.grid.bands; ++b)
                    white.values[b] = illuminant_spectrum(acq_scene.illuminant,
                                                          scenario.grid.wavelength(b));
                acq.roi = [&] {
                    // bbox (no margin) mapped to patch coordinates, shrunk
                    const auto& bb = state.active_target->mean_bbox;
                    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
                    const double us[4] = {bb.u - bb.w / 2, bb.u + bb.w / 2,
                                          bb.u + bb.w / 2, bb.u - bb.w / 2};
                    const double vs[4] = {bb.v - bb.h / 2, bb.v - bb.h / 2,
                                          bb.v + bb.h / 2, bb.v + bb.h / 2};
                    for (int i = 0; i < 4; ++i) {
                        const auto tp = calibration.apply(us[i], vs[i]);
                        if (i == 0) {
                            x0 = x1 = tp.first;
                            y0 = y1 = tp.second;
                        } else {
                            x0 = std::fmin(x0, tp.first);
                            x1 = std::fmax(x1, tp.first);
                            y0 = std::fmin(y0, tp.second);
                            y1 = std::fmax(y1, tp.second);
                        }
                    }
                    const double sx = scenario.roi_shrink_frac * (x1 - x0) / 2;
                    const double sy = scenario.roi_shrink_frac * (y1 - y0) / 2;
                    x0 += sx;
                    x1 -= sx;
                    y0 += sy;
                    y1 -= sy;
                    RoiWindow roi;
                    roi.line0 = acq.cube.lines();
                    roi.line1 = 0;
                    for (int l = 0; l < acq.cube.lines(); ++l) {
                        const double tx = acq.cube.meta().tilt_x_deg[l];
                        if (tx >= x0 && tx <= x1) {
                            roi.line0 = std::min(roi.line0, l);
                            roi.line1 = std::max(roi.line1, l + 1);
                        }
                    }
                    roi.sample0 = acq.cube.samples();
                    roi.sample1 = 0;
                    for (int s = 0; s < acq.cube.samples(); ++s) {
                        const double az = cam.slit_offset_deg(s);
                        const double az0 = 2.0 * (y0 - plan.tilt_y_start);
                        const double az1 = 2.0 * (y1 - plan.tilt_y_start);
                        if (az >= az0 && az <= az1) {
                            roi.sample0 = std::min(roi.sample0, s);
                            roi.sample1 = std::max(roi.sample1, s + 1);
                        }
                    }
                    if (roi.line0 >= roi.line1 || roi.sample0 >= roi.sample1) {
                        // degenerate mapping: fall back to the patch centre
                        roi.line0 = acq.cube.lines() * 3 / 8;
                        roi.line1 = std::max(roi.line0 + 1, acq.cube.lines() * 5 / 8);
                        roi.sample0 = acq.cube.samples() * 3 / 8;
                        roi.sample1 = std::max(roi.sample0 + 1, acq.cube.samples() * 5 / 8);
                    }
                    return roi;
                }();

                const Spectrum raw = roi_mean_spectrum(acq.cube, acq.roi);
                const CorrectedSpectrum corrected = reflectance_correct(raw, white, dark);
                acq.corrected = corrected.spectrum;
                acq.report = detect_resonance(corrected.spectrum, scenario.extraction,
                                              corrected.valid);
                bool matched = false;
                if (acq.report.accepted) {
                    const ReferenceMatch m =
                        match_resonance(acq.report, scenario.reference_nm);
                    acq.report.reference_match = m;
                    matched = m.matched;
                }
                if (acq.report.accepted && matched)
                    if (auto* r = record_of(truth)) {
                        if (r->cube_acquired) r->resonance_accepted = true;
                    }
                if (auto* r = record_of(truth)) r->report = acq.report;
                if (!keep_cubes) acq.cube = SpectralCube();
                log.acquisitions.push_back(std::move(acq));
            }
            pending_acquired = true;
            pending_extracted = true;  // extraction ran inline above
        }

        log.trajectory.push_back(
            {t, true_pose.x, true_pose.y, true_pose.heading_rad, odo.speed_mps, state.phase});

        if (state.phase == Phase::NAVIGATE || state.phase == Phase::TRACKING) {
            if (odo.speed_mps > 0.0)
                odo = follow_waypoints(odo, wps, waypoint_index, scenario.tuning, dt);
        }
        t += dt;
        ++frame;
    }

    log.mission_time_s = t;
    return log;
}

Metrics aggregate_metrics(std::span<const MissionLog> logs) {
    if (logs.empty()) throw EmptyInputError("no mission logs to aggregate");
    Metrics m;
    int detected = 0, captured = 0, resonated = 0;
    for (const auto& log : logs)
        for (const auto& r : log.sensors) {
            ++m.sensor_records;
            detected += r.detected;
            captured += r.cube_acquired;
            resonated += r.resonance_accepted;
        }
    if (m.sensor_records > 0) {
        m.detection_rate = static_cast<double>(detected) / m.sensor_records;
        m.capture_rate = static_cast<double>(captured) / m.sensor_records;
        m.resonance_rate = static_cast<double>(resonated) / m.sensor_records;
    }
    return m;
}

}  // namespace foveascan
