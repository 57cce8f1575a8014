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

#ifndef FOVEASCAN_SCENE_HPP
#define FOVEASCAN_SCENE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "foveascan/geometry.hpp"
#include "foveascan/spectral.hpp"

namespace foveascan {

/// Passive colorimetric leaf sensor: a small quad whose reflectance
/// carries narrow resonance peaks near 650 nm. Peak position shifts
/// linearly with collection angle and peak amplitude rolls off past the
/// collection half-angle.
struct LeafSensorModel {
    std::string id;
    std::string plant_id;
    Vec3 position{};
    Vec3 normal{-1, 0, 0};  // unit
    double width_m = 0.0254;
    double height_m = 0.0254;
    std::vector<double> resonance_peaks_nm{650.0};
    double peak_fwhm_nm = 12.0;
    double peak_amplitude = 0.6;
    double angle_shift_nm_per_deg = 2.0;
    double collection_halfangle_deg = 4.0;
    double baseline_reflectance = 0.08;

    Quad quad() const { return make_facing_quad(position, normal, width_m, height_m); }
};

/// Broadband foliage reflectance: green bump, sigmoid red edge into a
/// flat NIR plateau, low base elsewhere.
struct FoliageModel {
    double green_lo_nm = 500.0;
    double green_hi_nm = 570.0;
    double green_peak = 0.25;
    double nir_plateau = 0.5;
    double red_edge_lo_nm = 700.0;
    double red_edge_hi_nm = 740.0;
    double base = 0.05;
};

double foliage_reflectance(const FoliageModel& m, double nm);

/// Bare soil background; slightly brighter toward the NIR.
struct SoilModel {
    double base = 0.12;
    double nir_gain = 0.08;
};

double soil_reflectance(const SoilModel& m, double nm);

enum class IlluminantKind { solar, halogen, combined };

/// Scene lighting. The solar curve carries atmospheric absorption dips
/// at 760 and 820 nm; the halogen lamp is a smooth 3200 K curve the
/// robot switches on during acquisition.
struct Illuminant {
    IlluminantKind kind = IlluminantKind::combined;
    bool halogen_on = false;
    double solar_scale = 1.0;
    double halogen_scale = 1.0;
    double dip_depth = 0.3;
    double dip_sigma_nm = 10.0;
};

double illuminant_spectrum(const Illuminant& ill, double nm);

struct Plant {
    std::string id;
    Quad quad;  // foliage face
};

struct PlantRow {
    std::string id;
    std::vector<Plant> plants;
};

/// Calibration marker: a small bright quad at a known world position.
struct Fiducial {
    std::string id;
    Quad quad;
    double reflectance = 0.9;
};

struct Scene {
    std::vector<PlantRow> rows;
    std::vector<LeafSensorModel> sensors;
    std::vector<Fiducial> fiducials;
    FoliageModel foliage;
    SoilModel soil;
    Illuminant illuminant;
    double sky_scale = 0.01;
    std::uint64_t rng_seed = 0;

    const Plant* find_plant(const std::string& id) const;
    const LeafSensorModel* find_sensor(const std::string& id) const;
};

/// Narrow-band reflectance of the leaf sensor at the given wavelength
/// and collection angle (degrees off the surface normal).
double sensor_reflectance(const LeafSensorModel& m, double nm, double collection_angle_deg);

enum class SurfaceKind { sensor, foliage, ground, fiducial };

struct Hit {
    SurfaceKind surface;
    int index;  // into scene.sensors / flattened plants / fiducials
    double distance_m;
    double incidence_deg;  // angle between -dir and surface normal
    Vec3 point;
};

/// Nearest intersection among sensor quads, foliage quads, fiducials
/// and the ground plane z = 0. Miss is a value, not an error.
std::optional<Hit> trace_ray(const Scene& scene, const Vec3& origin, const Vec3& dir);

/// Per-band radiance of the surface seen along the ray: illuminant
/// times surface reflectance. Surfaces are Lambertian except the leaf
/// sensor, which uses the collection-angle model. `sensor_contrast`
/// blends sensor reflectance toward the underlying foliage to model
/// defocus; 1 = in focus.
Spectrum radiance(const Scene& scene, const Vec3& origin, const Vec3& dir,
                  const WavelengthGrid& grid, double sensor_contrast = 1.0);

}  // namespace foveascan

#endif  // FOVEASCAN_SCENE_HPP
