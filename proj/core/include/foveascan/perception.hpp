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

#ifndef FOVEASCAN_PERCEPTION_HPP
#define FOVEASCAN_PERCEPTION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foveascan/calibration.hpp"
#include "foveascan/rgb_camera.hpp"
#include "foveascan/rng.hpp"
#include "foveascan/scene.hpp"
#include "foveascan/spectral.hpp"

namespace foveascan {

struct Detection {
    int frame_id = 0;
    BBox bbox;
    double confidence = 0.0;
    // ground-truth sensor id; empty for false positives. Simulation
    // bookkeeping only, never used by the gating math.
    std::string truth_link;
};

/// Stand-in for the trained object detector: misses, centroid and size
/// jitter, and uniform false positives.
struct DetectorNoiseModel {
    double miss_rate = 0.0;
    double false_positive_rate = 0.0;
    double centroid_jitter_px = 0.0;
    double size_jitter_frac = 0.0;
    double max_range_m = 4.0;   // beyond this the detector cannot see the sensor
    double min_bbox_px = 6.0;   // too small to detect
};

/// Projects every visible sensor through the RGB camera and applies the
/// noise model. `mount` is the module frame in the world. Detections
/// are deterministic for a given rng state.
std::vector<Detection> simulate_detections(const Scene& scene, const Frame& mount,
                                           const RgbCameraModel& rgb,
                                           const DetectorNoiseModel& noise, int frame_id,
                                           Rng& rng);

/// Detection log CSV: frame_id,u,v,w,h,confidence (one header line
/// allowed). Lets recorded detector output replay through the pipeline.
std::vector<Detection> load_detection_log(const std::string& path);
void save_detection_log(std::span<const Detection> dets, const std::string& path);

enum class TrackStatus { not_yet, verified, rejected };

struct VerifiedTarget {
    BBox mean_bbox;
    int last_frame = 0;
};

struct TrackResult {
    TrackStatus status = TrackStatus::not_yet;
    std::optional<VerifiedTarget> target;
    double centroid_variance_px2 = 0.0;
};

/// Multi-frame verification: the most recent k entries must be from
/// consecutive frames and their pooled centroid variance (mean of the
/// per-axis sample variances) must not exceed the threshold. A frame
/// gap resets the streak (not_yet); a streak with excessive variance is
/// rejected.
TrackResult verify_track(std::span<const Detection> history, int k = 3,
                         double centroid_var_thresh_px2 = 9.0);

/// Geometric precondition for a useful resonance acquisition.
struct CaptureGate {
    double distance_nominal_mm = 914.0;
    double distance_tol_mm = 25.0;
    double zone_width_mm = 76.0;   // along-track
    double zone_height_mm = 25.0;  // vertical
    double max_angle_deg = 4.0;
    double sensor_size_mm = 25.4;
    double rgb_focal_px = 2000.0;
    double rgb_cu = 640.0;
    double rgb_cv = 512.0;
};

struct GateResult {
    bool pass = false;
    double est_distance_mm = 0.0;
    double est_angle_deg = 0.0;
    double lateral_along_mm = 0.0;
    double lateral_vert_mm = 0.0;
    bool distance_ok = false;
    bool lateral_ok = false;
    bool angle_ok = false;

    /// Enumerated failure reasons, e.g. "distance,angle"; "ok" on pass.
    std::string reason() const;
};

/// Range from the pinhole size relation est = f * s / h, lateral offset
/// of the bbox centre converted through that range, and the estimated
/// approach angle against the gate thresholds.
GateResult capture_gate(const CaptureGate& gate, const VerifiedTarget& target,
                        double est_angle_deg);

/// Flat-field correction (raw - dark) / (white - dark) per band. Bands
/// where white - dark <= 1e-6 are zeroed and flagged invalid.
struct CorrectedSpectrum {
    Spectrum spectrum;
    std::vector<char> valid;
};

CorrectedSpectrum reflectance_correct(const Spectrum& raw, const Spectrum& white_ref,
                                      const Spectrum& dark_ref);

struct PeakFindParams {
    int smooth_window_bands = 5;
    int baseline_window_bands = 31;
    double snr_threshold = 3.0;
    double search_min_nm = 600.0;
    double search_max_nm = 720.0;
    double fit_fwhm_nm = 12.0;  // template width for the height fit
};

struct PeakInfo {
    double wavelength_nm = 0.0;
    double height = 0.0;
    double snr = 0.0;
};

struct ReferenceMatch {
    bool matched = false;
    double offset_nm = 0.0;
};

struct ResonanceReport {
    std::vector<PeakInfo> peaks;  // sorted by wavelength
    bool accepted = false;
    double noise_scale = 0.0;
    double snr_threshold = 3.0;
    std::optional<ReferenceMatch> reference_match;

    /// Highest-SNR peak, if any.
    const PeakInfo* best_peak() const;
};

/// Moving-average smoothing, running-median baseline removal, local
/// maxima in the search range scored by a Gaussian-template height fit
/// against a robust (MAD) noise scale estimated outside the range.
ResonanceReport detect_resonance(const Spectrum& spec, const PeakFindParams& params = {},
                                 std::span<const char> valid = {});

/// Matched iff every reference peak has an accepted peak within tol_nm;
/// offset is the signed mean displacement. Throws UnacceptedReportError
/// on an unaccepted report.
ReferenceMatch match_resonance(const ResonanceReport& report,
                               std::span<const double> reference_peaks_nm,
                               double tol_nm = 20.0);

/// Structured text record for a report (consumed by the CLI emitter).
std::string format_resonance_report(const ResonanceReport& report);

}  // namespace foveascan

#endif  // FOVEASCAN_PERCEPTION_HPP
