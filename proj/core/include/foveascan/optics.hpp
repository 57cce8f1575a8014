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

#ifndef FOVEASCAN_OPTICS_HPP
#define FOVEASCAN_OPTICS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "foveascan/geometry.hpp"
#include "foveascan/scene.hpp"
#include "foveascan/spectral.hpp"

namespace foveascan {

// Module frame convention. The camera stares up its boresight +z into
// the mirror; at rest the mirror folds the view 90 degrees onto +x.
// The slit spans azimuth (the module y direction); stepping tilt_x
// sweeps the slit image in elevation.
//
//   tilt_x: mirror rotation about the slit axis (y). The outgoing view
//           gains elevation 2 * tilt_x (reflection doubles it).
//   tilt_y: half the mirror rotation about the boresight axis (z); the
//           outgoing view gains azimuth 2 * tilt_y, so both tilt
//           parameters carry the same 2x optical gain.

/// Two-axis mirror pose. Commands are the controller's normalized
/// values, related to mechanical tilt by the tangent law
/// command = tan(tilt) / tan(theta_max).
struct MirrorState {
    double tilt_x_deg = 0.0;
    double tilt_y_deg = 0.0;
    double theta_max_deg = 25.0;
};

MirrorState mirror_state_from_tilt(double tilt_x_deg, double tilt_y_deg,
                                   double theta_max_deg = 25.0);

double command_from_tilt(double tilt_deg, double theta_max_deg = 25.0);
double tilt_from_command(double command, double theta_max_deg = 25.0);

/// Unit mirror normal for the given tilts (module frame).
Vec3 mirror_normal(double tilt_x_deg, double tilt_y_deg);

/// Outgoing view direction: the camera boresight reflected off the
/// tilted mirror (module frame, unit length).
Vec3 view_direction(const MirrorState& state);

/// Outgoing direction of the slit sample at the given across-slit
/// angular offset (degrees of camera-side field angle).
Vec3 view_direction(const MirrorState& state, double slit_offset_deg);

/// Inverse of view_direction: tilts (deg) that centre the view on `o`.
/// Throws UnreachableTargetError (with clamped best effort) when the
/// tilts would exceed theta_max.
std::pair<double, double> mirror_tilt_for_target(const Vec3& o, double theta_max_deg = 25.0);

/// The folded pushbroom imager: slit geometry, focus model, detector
/// noise and the module's mounting frame in the world.
struct PushbroomCamera {
    int samples = 640;
    double slit_fov_deg = 5.0;
    double focal_distance_m = 0.914;
    double focus_tolerance_m = 0.025;   // in-focus band around focal_distance
    double focus_falloff_m = 0.075;     // contrast reaches 50% this far past tolerance
    double exposure_ms = 10.0;
    double spectral_fwhm_nm = 3.0;
    double noise_floor = 0.0;           // per-pixel radiance noise sigma
    // Per-acquisition spectral ripple: band-wise illumination deviation
    // from the white reference, sigma as a fraction of the illuminant.
    // Shared by every pixel of an acquisition, so it does not average
    // out over the extraction window.
    double band_noise_frac = 0.0;
    double settle_tau_ms = 0.0;         // first-order mirror lag; 0 = ideal
    double theta_max_deg = 25.0;
    Frame mount;                        // module axes in world coordinates

    /// Across-slit angular offset of sample s, spanning slit_fov_deg.
    double slit_offset_deg(int sample) const {
        if (samples <= 1) return 0.0;
        return slit_fov_deg * (static_cast<double>(sample) / (samples - 1) - 0.5);
    }

    /// Defocus contrast for a surface at the given range: 1 inside the
    /// focus band, linear loss to 0.5 at focus_falloff past it, floored.
    double focus_contrast(double distance_m) const;
};

/// Per-line tilt schedule: linear interpolation between the start and
/// end tilt pairs over `lines` steps.
struct ScanPlan {
    double tilt_x_start = 0.0, tilt_y_start = 0.0;
    double tilt_x_end = 0.0, tilt_y_end = 0.0;
    int lines = 1;
    double exposure_ms = 10.0;

    double tilt_x_at(int line) const { return lerp(tilt_x_start, tilt_x_end, line); }
    double tilt_y_at(int line) const { return lerp(tilt_y_start, tilt_y_end, line); }

    /// Range and line-count validation; throws OutOfRangeError /
    /// InvalidRangeError.
    void validate(double theta_max_deg = 25.0) const;

private:
    double lerp(double a, double b, int line) const {
        if (lines <= 1) return a;
        const double t = static_cast<double>(line) / (lines - 1);
        return a * (1.0 - t) + b * t;
    }
};

/// One line scan through the mirror: `cam.samples` spectra, spectrally
/// blurred to the instrument FWHM, with seeded detector noise.
std::vector<Spectrum> scan_line(const Scene& scene, const PushbroomCamera& cam,
                                const MirrorState& state, const WavelengthGrid& grid,
                                std::uint64_t seed);

/// Executes a scan plan into a cube. Lines are independent and may be
/// evaluated in parallel; each line's noise stream is derived from
/// (seed, line), so the result is identical for any thread count.
SpectralCube acquire_patch(const Scene& scene, const PushbroomCamera& cam,
                           const ScanPlan& plan, const WavelengthGrid& grid,
                           std::uint64_t seed);

/// Mosaic of adjacent patches with the per-pixel map from mosaic pixel
/// to the mirror tilt that would centre the view there.
struct Mosaic {
    SpectralCube cube;
    std::vector<double> tilt_x;  // lines x samples, row-major
    std::vector<double> tilt_y;

    double tilt_x_at(int line, int sample) const { return tilt_x[idx(line, sample)]; }
    double tilt_y_at(int line, int sample) const { return tilt_y[idx(line, sample)]; }

private:
    std::size_t idx(int line, int sample) const {
        return static_cast<std::size_t>(line) * cube.samples() + sample;
    }
};

/// Merges patches that tile a rectangle in tilt space: equal tilt_x
/// schedules per column, one patch column per distinct tilt_y. Patches
/// must share grid, exposure and sample count.
Mosaic merge_patches(const std::vector<SpectralCube>& patches, double slit_fov_deg = 5.0);

/// Brute-force scan of the scene: one full tilt_x sweep per tilt_y
/// centre, merged into a mosaic. Noise is forced off; this is the
/// reference against which foveated patches are checked.
Mosaic render_scene(const Scene& scene, PushbroomCamera cam, const WavelengthGrid& grid,
                    double tilt_x_min, double tilt_x_max, double step_deg,
                    const std::vector<double>& tilt_y_centres, std::uint64_t seed = 0);

/// Imaging time and mirror sampling mode for a line schedule. Schedules
/// longer than the controller memory fall back to stepped mode.
struct ScanTiming {
    double t_img_ms;
    double sample_rate_per_ms;
    bool stepped;
};

ScanTiming scan_timing(double exposure_ms, int lines, int mirror_memory = 1500);

}  // namespace foveascan

#endif  // FOVEASCAN_OPTICS_HPP
