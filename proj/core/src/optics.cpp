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

#include "foveascan/optics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "foveascan/errors.hpp"
#include "foveascan/parallel.hpp"
#include "foveascan/rng.hpp"

namespace foveascan {

namespace {

const Vec3 kBoresight{0.0, 0.0, 1.0};
// Rest mirror normal: bisects the boresight and the rest view (+x),
// 45 degrees to each.
const Vec3 kRestNormal{-0.7071067811865476, 0.0, 0.7071067811865476};

}  // namespace

MirrorState mirror_state_from_tilt(double tx, double ty, double theta_max) {
    if (std::fabs(tx) > theta_max + 1e-12 || std::fabs(ty) > theta_max + 1e-12) {
        std::ostringstream os;
        os << "tilt (" << tx << ", " << ty << ") deg exceeds mechanical range +/-"
           << theta_max;
        throw OutOfRangeError(os.str());
    }
    return MirrorState{tx, ty, theta_max};
}

double command_from_tilt(double tilt_deg, double theta_max_deg) {
    if (std::fabs(tilt_deg) > theta_max_deg + 1e-12) {
        std::ostringstream os;
        os << "tilt " << tilt_deg << " deg exceeds mechanical range +/-" << theta_max_deg;
        throw OutOfRangeError(os.str());
    }
    return std::tan(deg2rad(tilt_deg)) / std::tan(deg2rad(theta_max_deg));
}

double tilt_from_command(double command, double theta_max_deg) {
    if (std::fabs(command) > 1.0 + 1e-12)
        throw OutOfRangeError("mirror command outside [-1, 1]");
    return rad2deg(std::atan(command * std::tan(deg2rad(theta_max_deg))));
}

Vec3 mirror_normal(double tilt_x_deg, double tilt_y_deg) {
    // tilt_x: rotation about the slit axis y (negative sense so that
    // positive tilt_x raises the view); tilt_y: rotation about the
    // boresight z at twice the tilt parameter.
    const Vec3 n1 = rotate(kRestNormal, Vec3{0, 1, 0}, -deg2rad(tilt_x_deg));
    return rotate(n1, Vec3{0, 0, 1}, deg2rad(2.0 * tilt_y_deg));
}

Vec3 view_direction(const MirrorState& state) {
    return reflect(kBoresight, mirror_normal(state.tilt_x_deg, state.tilt_y_deg));
}

Vec3 view_direction(const MirrorState& state, double slit_offset_deg) {
    // sample ray on the camera side of the fold: boresight fanned
    // across the slit
    const double d = deg2rad(slit_offset_deg);
    const Vec3 i{0.0, std::sin(d), std::cos(d)};
    return reflect(i, mirror_normal(state.tilt_x_deg, state.tilt_y_deg));
}

std::pair<double, double> mirror_tilt_for_target(const Vec3& o, double theta_max_deg) {
    const Vec3 d = normalized(o);
    const double elevation = std::asin(std::fmax(-1.0, std::fmin(1.0, d.z)));
    const double azimuth = std::atan2(d.y, d.x);
    const double tx = rad2deg(elevation) / 2.0;
    const double ty = rad2deg(azimuth) / 2.0;
    if (std::fabs(tx) > theta_max_deg + 1e-12 || std::fabs(ty) > theta_max_deg + 1e-12) {
        const double cx = std::clamp(tx, -theta_max_deg, theta_max_deg);
        const double cy = std::clamp(ty, -theta_max_deg, theta_max_deg);
        std::ostringstream os;
        os << "view direction needs tilt (" << tx << ", " << ty
           << ") deg, outside +/-" << theta_max_deg;
        throw UnreachableTargetError(os.str(), cx, cy);
    }
    return {tx, ty};
}

double PushbroomCamera::focus_contrast(double distance_m) const {
    const double excess = std::fabs(distance_m - focal_distance_m) - focus_tolerance_m;
    if (excess <= 0.0) return 1.0;
    return std::fmax(0.05, 1.0 - 0.5 * excess / focus_falloff_m);
}

void ScanPlan::validate(double theta_max_deg) const {
    if (lines < 1) throw InvalidRangeError("scan plan needs at least one line");
    if (exposure_ms <= 0.0) throw InvalidRangeError("scan plan exposure must be positive");
    for (double t : {tilt_x_start, tilt_x_end, tilt_y_start, tilt_y_end}) {
        if (std::fabs(t) > theta_max_deg + 1e-12) {
            std::ostringstream os;
            os << "scan plan tilt " << t << " deg exceeds mechanical range +/-"
               << theta_max_deg;
            throw OutOfRangeError(os.str());
        }
    }
}

namespace {

// Per-acquisition lookup tables: the illuminant and the broadband
// surface reflectances are the same for every ray, so evaluate them
// once. Sensor rays still evaluate the angle-dependent resonance model
// per ray. Produces the same values as scene.radiance().
struct RadianceTables {
    std::vector<double> wavelength;
    std::vector<double> illum;
    std::vector<double> sky;
    std::vector<double> foliage;
    std::vector<double> soil;

    RadianceTables(const Scene& scene, const WavelengthGrid& grid)
        : wavelength(grid.wavelengths()),
          illum(grid.bands),
          sky(grid.bands),
          foliage(grid.bands),
          soil(grid.bands) {
        Illuminant sky_ill = scene.illuminant;
        sky_ill.kind = IlluminantKind::solar;
        for (int b = 0; b < grid.bands; ++b) {
            illum[b] = illuminant_spectrum(scene.illuminant, wavelength[b]);
            sky[b] = scene.sky_scale * illuminant_spectrum(sky_ill, wavelength[b]);
            foliage[b] = foliage_reflectance(scene.foliage, wavelength[b]);
            soil[b] = soil_reflectance(scene.soil, wavelength[b]);
        }
    }
};

// Band-wise acquisition ripple, one draw per acquisition.
std::vector<double> band_ripple(const PushbroomCamera& cam, const RadianceTables& tab,
                                std::uint64_t acquisition_seed) {
    std::vector<double> ripple(tab.illum.size(), 0.0);
    if (cam.band_noise_frac > 0.0) {
        Rng rng(mix_seed(acquisition_seed, hash_name("band-ripple")));
        for (std::size_t b = 0; b < ripple.size(); ++b)
            ripple[b] = cam.band_noise_frac * tab.illum[b] * rng.gaussian();
    }
    return ripple;
}

void scan_line_into(const Scene& scene, const PushbroomCamera& cam, const MirrorState& state,
                    const WavelengthGrid& grid, const RadianceTables& tab,
                    const std::vector<double>& ripple, std::uint64_t seed,
                    SpectralCube* cube, int line) {
    Rng rng(seed);
    Spectrum spec(grid);
    for (int s = 0; s < cam.samples; ++s) {
        const Vec3 dir_local = view_direction(state, cam.slit_offset_deg(s));
        const Vec3 dir = cam.mount.dir_to_world(dir_local);
        const Vec3 origin = cam.mount.origin;

        const auto hit = trace_ray(scene, origin, dir);
        if (!hit) {
            spec.values.assign(tab.sky.begin(), tab.sky.end());
        } else {
            switch (hit->surface) {
                case SurfaceKind::sensor: {
                    const auto& m = scene.sensors[hit->index];
                    const double contrast = cam.focus_contrast(hit->distance_m);
                    for (int b = 0; b < grid.bands; ++b) {
                        double refl = sensor_reflectance(m, tab.wavelength[b],
                                                         hit->incidence_deg);
                        if (contrast < 1.0)
                            refl = contrast * refl + (1.0 - contrast) * tab.foliage[b];
                        spec.values[b] = tab.illum[b] * refl;
                    }
                    break;
                }
                case SurfaceKind::foliage:
                    for (int b = 0; b < grid.bands; ++b)
                        spec.values[b] = tab.illum[b] * tab.foliage[b];
                    break;
                case SurfaceKind::fiducial: {
                    const double refl = scene.fiducials[hit->index].reflectance;
                    for (int b = 0; b < grid.bands; ++b)
                        spec.values[b] = tab.illum[b] * refl;
                    break;
                }
                case SurfaceKind::ground:
                default:
                    for (int b = 0; b < grid.bands; ++b)
                        spec.values[b] = tab.illum[b] * tab.soil[b];
                    break;
            }
        }

        Spectrum blurred = gaussian_blur(spec, cam.spectral_fwhm_nm);
        for (int b = 0; b < grid.bands; ++b) {
            double v = blurred.values[b] + ripple[b];
            if (cam.noise_floor > 0.0) v += cam.noise_floor * rng.gaussian();
            cube->set(line, s, b, static_cast<float>(v));
        }
    }
}

}  // namespace

std::vector<Spectrum> scan_line(const Scene& scene, const PushbroomCamera& cam,
                                const MirrorState& state, const WavelengthGrid& grid,
                                std::uint64_t seed) {
    const RadianceTables tab(scene, grid);
    SpectralCube one(1, cam.samples, grid);
    scan_line_into(scene, cam, state, grid, tab, band_ripple(cam, tab, seed), seed, &one, 0);
    std::vector<Spectrum> out;
    out.reserve(cam.samples);
    for (int s = 0; s < cam.samples; ++s) out.push_back(one.pixel_spectrum(0, s));
    return out;
}

SpectralCube acquire_patch(const Scene& scene, const PushbroomCamera& cam,
                           const ScanPlan& plan, const WavelengthGrid& grid,
                           std::uint64_t seed) {
    plan.validate(cam.theta_max_deg);

    // per-line commanded tilts, with optional first-order settle lag
    std::vector<double> tx(plan.lines), ty(plan.lines);
    for (int l = 0; l < plan.lines; ++l) {
        tx[l] = plan.tilt_x_at(l);
        ty[l] = plan.tilt_y_at(l);
    }
    if (cam.settle_tau_ms > 0.0) {
        const double a = std::exp(-plan.exposure_ms / cam.settle_tau_ms);
        double ex = tx[0], ey = ty[0];
        for (int l = 0; l < plan.lines; ++l) {
            ex = tx[l] + (ex - tx[l]) * a;
            ey = ty[l] + (ey - ty[l]) * a;
            tx[l] = ex;
            ty[l] = ey;
        }
    }
    // controller command quantum (1e-9 deg): schedules that agree
    // analytically land on identical commands regardless of how the
    // interpolation was computed
    for (int l = 0; l < plan.lines; ++l) {
        tx[l] = std::round(tx[l] * 1e9) / 1e9;
        ty[l] = std::round(ty[l] * 1e9) / 1e9;
    }

    SpectralCube cube(plan.lines, cam.samples, grid);
    cube.meta().tilt_x_deg = tx;
    cube.meta().tilt_y_deg = ty;
    cube.meta().exposure_ms = plan.exposure_ms;
    cube.meta().halogen_on = scene.illuminant.halogen_on;

    const RadianceTables tab(scene, grid);
    const std::vector<double> ripple = band_ripple(cam, tab, seed);
    parallel_for(plan.lines, [&](int l) {
        const MirrorState state{tx[l], ty[l], cam.theta_max_deg};
        scan_line_into(scene, cam, state, grid, tab, ripple,
                       mix_seed(seed, static_cast<std::uint64_t>(l)), &cube, l);
    });
    return cube;
}

Mosaic merge_patches(const std::vector<SpectralCube>& patches, double slit_fov_deg) {
    if (patches.empty()) throw EmptyInputError("no patches to merge");
    const auto& first = patches.front();
    for (const auto& p : patches) {
        if (!(p.grid() == first.grid()))
            throw IncompatiblePatchError("patches have mismatched wavelength grids");
        if (p.samples() != first.samples())
            throw IncompatiblePatchError("patches have mismatched sample counts");
        if (p.meta().exposure_ms != first.meta().exposure_ms)
            throw IncompatiblePatchError("patches have mismatched exposures");
        if (p.meta().halogen_on != first.meta().halogen_on)
            throw IncompatiblePatchError("patches have mismatched illuminant state");
        if (p.meta().tilt_x_deg.empty() || p.meta().tilt_y_deg.empty())
            throw IncompatiblePatchError("patch lacks a tilt schedule");
        for (double t : p.meta().tilt_y_deg)
            if (std::fabs(t - p.meta().tilt_y_deg.front()) > 1e-9)
                throw IncompatiblePatchError("patch tilt_y varies within a patch");
    }

    // group patches into columns by tilt_y
    std::map<double, std::vector<const SpectralCube*>> columns;
    for (const auto& p : patches) columns[p.meta().tilt_y_deg.front()].push_back(&p);

    // order each column by tilt_x and build the shared line schedule
    std::vector<double> line_tx;
    bool first_column = true;
    for (auto& [ty, col] : columns) {
        std::sort(col.begin(), col.end(), [](const SpectralCube* a, const SpectralCube* b) {
            return a->meta().tilt_x_deg.front() < b->meta().tilt_x_deg.front();
        });
        std::vector<double> tx;
        for (const auto* p : col) {
            const auto& sched = p->meta().tilt_x_deg;
            for (std::size_t i = 1; i < sched.size(); ++i)
                if (sched[i] <= sched[i - 1])
                    throw IncompatiblePatchError("patch tilt_x schedule is not increasing");
            if (!tx.empty() && sched.front() <= tx.back())
                throw IncompatiblePatchError("patch tilt_x ranges overlap within a column");
            tx.insert(tx.end(), sched.begin(), sched.end());
        }
        if (first_column) {
            line_tx = std::move(tx);
            first_column = false;
        } else if (tx.size() != line_tx.size() ||
                   !std::equal(tx.begin(), tx.end(), line_tx.begin(),
                               [](double a, double b) { return std::fabs(a - b) < 1e-9; })) {
            throw IncompatiblePatchError("columns do not share a tilt_x schedule");
        }
    }

    const int samples_per_col = first.samples();
    const int n_cols = static_cast<int>(columns.size());
    const int lines = static_cast<int>(line_tx.size());

    Mosaic mosaic{SpectralCube(lines, samples_per_col * n_cols, first.grid()), {}, {}};
    mosaic.cube.meta().exposure_ms = first.meta().exposure_ms;
    mosaic.cube.meta().halogen_on = first.meta().halogen_on;
    mosaic.cube.meta().tilt_x_deg = line_tx;
    mosaic.cube.meta().tilt_y_deg.assign(lines, 0.0);
    mosaic.cube.meta().column_samples = samples_per_col;
    mosaic.tilt_x.resize(static_cast<std::size_t>(lines) * samples_per_col * n_cols);
    mosaic.tilt_y.resize(mosaic.tilt_x.size());

    int c = 0;
    for (auto& [ty, col] : columns) {
        mosaic.cube.meta().column_tilt_y_deg.push_back(ty);
        int line0 = 0;
        for (const auto* p : col) {
            for (int l = 0; l < p->lines(); ++l) {
                const int ml = line0 + l;
                for (int s = 0; s < samples_per_col; ++s) {
                    const int ms = c * samples_per_col + s;
                    for (int b = 0; b < first.grid().bands; ++b)
                        mosaic.cube.set(ml, ms, b, p->at(l, s, b));
                    const std::size_t mi =
                        static_cast<std::size_t>(ml) * mosaic.cube.samples() + ms;
                    mosaic.tilt_x[mi] = p->meta().tilt_x_deg[l];
                    // tilt that centres this sample's azimuth
                    const double offset =
                        samples_per_col > 1
                            ? slit_fov_deg *
                                  (static_cast<double>(s) / (samples_per_col - 1) - 0.5)
                            : 0.0;
                    mosaic.tilt_y[mi] = ty + offset / 2.0;
                }
            }
            line0 += p->lines();
        }
        ++c;
    }
    return mosaic;
}

Mosaic render_scene(const Scene& scene, PushbroomCamera cam, const WavelengthGrid& grid,
                    double tilt_x_min, double tilt_x_max, double step_deg,
                    const std::vector<double>& tilt_y_centres, std::uint64_t seed) {
    if (!(tilt_x_min < tilt_x_max) || step_deg <= 0.0)
        throw InvalidRangeError("render window must be non-empty with a positive step");
    if (tilt_y_centres.empty())
        throw InvalidRangeError("render needs at least one tilt_y centre");
    cam.noise_floor = 0.0;

    const int lines =
        static_cast<int>(std::llround((tilt_x_max - tilt_x_min) / step_deg)) + 1;
    std::vector<SpectralCube> patches;
    patches.reserve(tilt_y_centres.size());
    for (double ty : tilt_y_centres) {
        ScanPlan plan;
        plan.tilt_x_start = tilt_x_min;
        plan.tilt_x_end = tilt_x_max;
        plan.tilt_y_start = plan.tilt_y_end = ty;
        plan.lines = lines;
        plan.exposure_ms = cam.exposure_ms;
        patches.push_back(acquire_patch(scene, cam, plan, grid, seed));
    }
    return merge_patches(patches, cam.slit_fov_deg);
}

ScanTiming scan_timing(double exposure_ms, int lines, int mirror_memory) {
    if (exposure_ms <= 0.0) throw InvalidRangeError("exposure must be positive");
    if (lines < 1) throw InvalidRangeError("line count must be at least 1");
    ScanTiming t{};
    t.t_img_ms = exposure_ms * lines;
    t.stepped = lines > mirror_memory;
    t.sample_rate_per_ms = t.stepped ? 1.0 / exposure_ms : mirror_memory / t.t_img_ms;
    return t;
}

}  // namespace foveascan
