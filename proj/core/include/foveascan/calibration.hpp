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

#ifndef FOVEASCAN_CALIBRATION_HPP
#define FOVEASCAN_CALIBRATION_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "foveascan/optics.hpp"
#include "foveascan/rgb_camera.hpp"
#include "foveascan/scene.hpp"

namespace foveascan {

/// One fiducial observation: RGB pixel centroid paired with the mirror
/// tilts that centre the fiducial in the hyperspectral patch.
struct Correspondence {
    double u = 0.0, v = 0.0;            // RGB pixel
    double tilt_x_deg = 0.0, tilt_y_deg = 0.0;
};

/// 3x3 projective map from RGB pixel coordinates to mirror tilt-angle
/// coordinates, scale-normalized so h22 = 1 when nonzero.
class Homography {
public:
    Homography();  // identity
    explicit Homography(const std::array<double, 9>& h, double residual_rms_deg = 0.0);

    static Homography identity() { return Homography(); }

    double at(int row, int col) const { return h_[row * 3 + col]; }
    const std::array<double, 9>& coefficients() const { return h_; }
    double residual_rms_deg() const { return residual_rms_; }
    double determinant() const;

    /// Projective application (u, v) -> (tilt_x, tilt_y). Throws
    /// PointAtInfinityError when the homogeneous scale vanishes.
    std::pair<double, double> apply(double u, double v) const;

    Homography inverse() const;

private:
    std::array<double, 9> h_;
    double residual_rms_ = 0.0;
};

/// Normalized DLT estimate (Hartley normalization of both point sets,
/// SVD of the stacked linear system). Exact on noiseless projective
/// data; residual_rms reports the RMS tilt-space reprojection error.
Homography estimate_homography(std::span<const Correspondence> corrs);

struct TiltPoint {
    double tilt_x_deg = 0.0;
    double tilt_y_deg = 0.0;
    bool in_mirror_range = true;
};

/// Maps a pixel through the calibration; flags results beyond the
/// mechanical tilt range.
TiltPoint pixel_to_tilt(const Homography& H, double u, double v, double theta_max_deg = 25.0);

PixelPoint tilt_to_pixel(const Homography& H, double tilt_x_deg, double tilt_y_deg);

/// Builds fiducial correspondences for a scene: each fiducial's RGB
/// pixel centroid paired with the tilt that lands it at the centre of a
/// mirror patch. `mount` is the module frame in the world; the RGB
/// camera shares it. Needs at least 4 fiducials visible to both.
std::vector<Correspondence> build_calibration_mosaic(const Scene& scene,
                                                     const RgbCameraModel& rgb,
                                                     const Frame& mount,
                                                     double theta_max_deg = 25.0);

/// Detection bounding box: centre (u, v) plus width x height, pixels.
struct BBox {
    double u = 0.0, v = 0.0;
    double w = 0.0, h = 0.0;
};

/// Tilt-space sweep covering the mapped bbox corners, expanded by
/// margin_frac per side, clamped to the mirror range, line count
/// extent/step rounded up and capped by the controller memory.
ScanPlan plan_sweep(const Homography& H, const BBox& bbox, double margin_frac = 0.25,
                    double step_deg = 0.02, double theta_max_deg = 25.0,
                    int mirror_memory = 1500);

/// Calibration file: H, residual, correspondences and the RGB geometry
/// snapshot. Plain text, written by `calibrate`, read by `mission`.
struct CalibrationData {
    Homography H;
    std::vector<Correspondence> correspondences;
    RgbCameraModel rgb;
};

void save_calibration(const CalibrationData& cal, const std::string& path);
CalibrationData load_calibration(const std::string& path);

}  // namespace foveascan

#endif  // FOVEASCAN_CALIBRATION_HPP
