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

#include "foveascan/scene.hpp"

#include <cmath>

namespace foveascan {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double gaussian_line(double nm, double centre, double fwhm) {
    const double d = nm - centre;
    return std::exp(-4.0 * kLn2 * d * d / (fwhm * fwhm));
}

// Normalised Planck curve shape; wavelength in nm, reference at ref_nm.
double planck_shape(double nm, double temp_k, double ref_nm) {
    constexpr double c2 = 1.4387768775039337e7;  // nm K
    const auto b = [&](double w) {
        return 1.0 / (std::pow(w / 1000.0, 5.0) * std::expm1(c2 / (w * temp_k)));
    };
    return b(nm) / b(ref_nm);
}

double solar_curve(double nm, const Illuminant& ill) {
    double v = planck_shape(nm, 5778.0, 550.0);
    const double s2 = 2.0 * ill.dip_sigma_nm * ill.dip_sigma_nm;
    v *= 1.0 - ill.dip_depth * std::exp(-(nm - 760.0) * (nm - 760.0) / s2);
    v *= 1.0 - ill.dip_depth * std::exp(-(nm - 820.0) * (nm - 820.0) / s2);
    return v;
}

double halogen_curve(double nm) { return planck_shape(nm, 3200.0, 650.0); }

}  // namespace

double foliage_reflectance(const FoliageModel& m, double nm) {
    const double green_centre = 0.5 * (m.green_lo_nm + m.green_hi_nm);
    const double green_sigma = (m.green_hi_nm - m.green_lo_nm) / 4.0;
    const double bump = (m.green_peak - m.base) *
                        std::exp(-0.5 * (nm - green_centre) * (nm - green_centre) /
                                 (green_sigma * green_sigma));
    const double edge_centre = 0.5 * (m.red_edge_lo_nm + m.red_edge_hi_nm);
    const double edge_tau = (m.red_edge_hi_nm - m.red_edge_lo_nm) / 8.0;
    const double step = (m.nir_plateau - m.base) / (1.0 + std::exp(-(nm - edge_centre) / edge_tau));
    return m.base + bump + step;
}

double soil_reflectance(const SoilModel& m, double nm) {
    return m.base + m.nir_gain * (nm - 400.0) / 600.0;
}

double illuminant_spectrum(const Illuminant& ill, double nm) {
    switch (ill.kind) {
        case IlluminantKind::solar:
            return ill.solar_scale * solar_curve(nm, ill);
        case IlluminantKind::halogen:
            return ill.halogen_on ? ill.halogen_scale * halogen_curve(nm) : 0.0;
        case IlluminantKind::combined: {
            double v = ill.solar_scale * solar_curve(nm, ill);
            if (ill.halogen_on) v += ill.halogen_scale * halogen_curve(nm);
            return v;
        }
    }
    return 0.0;
}

double sensor_reflectance(const LeafSensorModel& m, double nm, double collection_angle_deg) {
    const double theta = std::fabs(collection_angle_deg);
    // Super-Gaussian angular window: exactly 0.5 at the collection
    // half-angle, below 0.03 past 1.5x it, smooth at zero.
    const double t = theta / m.collection_halfangle_deg;
    const double window = std::exp(-kLn2 * t * t * t * t);
    const double shift = m.angle_shift_nm_per_deg * theta;
    double r = m.baseline_reflectance;
    for (double centre : m.resonance_peaks_nm)
        r += m.peak_amplitude * gaussian_line(nm, centre + shift, m.peak_fwhm_nm) * window;
    return r;
}

const Plant* Scene::find_plant(const std::string& id) const {
    for (const auto& row : rows)
        for (const auto& p : row.plants)
            if (p.id == id) return &p;
    return nullptr;
}

const LeafSensorModel* Scene::find_sensor(const std::string& id) const {
    for (const auto& s : sensors)
        if (s.id == id) return &s;
    return nullptr;
}

std::optional<Hit> trace_ray(const Scene& scene, const Vec3& origin, const Vec3& dir) {
    std::optional<Hit> best;
    const auto consider = [&](SurfaceKind kind, int index, const Quad& q) {
        const auto h = intersect_quad(origin, dir, q);
        if (!h) return;
        if (best && h->t >= best->distance_m) return;
        best = Hit{kind, index, h->t, angle_deg(-dir, q.normal), origin + h->t * dir};
    };

    for (std::size_t i = 0; i < scene.sensors.size(); ++i)
        consider(SurfaceKind::sensor, static_cast<int>(i), scene.sensors[i].quad());
    int plant_index = 0;
    for (const auto& row : scene.rows)
        for (const auto& p : row.plants)
            consider(SurfaceKind::foliage, plant_index++, p.quad);
    for (std::size_t i = 0; i < scene.fiducials.size(); ++i)
        consider(SurfaceKind::fiducial, static_cast<int>(i), scene.fiducials[i].quad);

    // ground plane z = 0
    if (std::fabs(dir.z) > 1e-12) {
        const double t = -origin.z / dir.z;
        if (t > 1e-9 && (!best || t < best->distance_m)) {
            best = Hit{SurfaceKind::ground, 0, t, angle_deg(-dir, Vec3{0, 0, 1}),
                       origin + t * dir};
        }
    }
    return best;
}

Spectrum radiance(const Scene& scene, const Vec3& origin, const Vec3& dir,
                  const WavelengthGrid& grid, double sensor_contrast) {
    const auto hit = trace_ray(scene, origin, dir);
    Spectrum s(grid);
    for (int b = 0; b < grid.bands; ++b) {
        const double nm = grid.wavelength(b);
        const double illum = illuminant_spectrum(scene.illuminant, nm);
        double refl;
        if (!hit) {
            // open sky: faint solar-shaped background
            Illuminant sky = scene.illuminant;
            sky.kind = IlluminantKind::solar;
            s.values[b] = scene.sky_scale * illuminant_spectrum(sky, nm);
            continue;
        }
        switch (hit->surface) {
            case SurfaceKind::sensor: {
                const auto& m = scene.sensors[hit->index];
                refl = sensor_reflectance(m, nm, hit->incidence_deg);
                if (sensor_contrast < 1.0) {
                    const double fol = foliage_reflectance(scene.foliage, nm);
                    refl = sensor_contrast * refl + (1.0 - sensor_contrast) * fol;
                }
                break;
            }
            case SurfaceKind::foliage:
                refl = foliage_reflectance(scene.foliage, nm);
                break;
            case SurfaceKind::fiducial:
                refl = scene.fiducials[hit->index].reflectance;
                break;
            case SurfaceKind::ground:
            default:
                refl = soil_reflectance(scene.soil, nm);
                break;
        }
        s.values[b] = illum * refl;
    }
    return s;
}

}  // namespace foveascan
