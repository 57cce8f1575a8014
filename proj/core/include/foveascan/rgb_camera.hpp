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

#ifndef FOVEASCAN_RGB_CAMERA_HPP
#define FOVEASCAN_RGB_CAMERA_HPP

#include <cmath>
#include <optional>

#include "foveascan/geometry.hpp"

namespace foveascan {

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
};

/// Simulated RGB detector camera. It shares the mirror module's optical
/// centre and rest orientation and maps direction angles linearly to
/// pixels (u tracks azimuth, v tracks elevation, v grows downward):
///
///   u = cu + focal_px * azimuth,  v = cv - focal_px * elevation
///
/// With the shared optical centre this makes the noiseless pixel-to-
/// mirror-tilt map exactly affine, which is what the homography
/// calibration estimates.
struct RgbCameraModel {
    double focal_px = 2000.0;  // pixels per radian of field angle
    int width = 1280;
    int height = 1024;

    double cu() const { return width / 2.0; }
    double cv() const { return height / 2.0; }

    /// Projects a direction given in the module frame (+x out, +y
    /// along-track, +z up). Returns nullopt behind the camera or
    /// outside the frame.
    std::optional<PixelPoint> project(const Vec3& dir_module) const {
        if (dir_module.x <= 0.0) return std::nullopt;
        const Vec3 d = normalized(dir_module);
        const double azimuth = std::atan2(d.y, d.x);
        const double elevation = std::asin(d.z);
        const PixelPoint p{cu() + focal_px * azimuth, cv() - focal_px * elevation};
        if (p.u < 0.0 || p.u > width || p.v < 0.0 || p.v > height) return std::nullopt;
        return p;
    }

    /// Direction (module frame) of a pixel; inverse of project.
    Vec3 unproject(const PixelPoint& p) const {
        const double azimuth = (p.u - cu()) / focal_px;
        const double elevation = (cv() - p.v) / focal_px;
        return {std::cos(elevation) * std::cos(azimuth),
                std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
    }
};

}  // namespace foveascan

#endif  // FOVEASCAN_RGB_CAMERA_HPP
