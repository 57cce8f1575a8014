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

#ifndef FOVEASCAN_TEST_SCENES_HPP
#define FOVEASCAN_TEST_SCENES_HPP

#include "foveascan/scene.hpp"

namespace foveascan::testing {

/// Single leaf sensor dead ahead at the focal distance, mounted on a
/// plant quad, viewed from the module frame at the origin. The sensor
/// normal is yawed by `yaw_deg` about +z (collection angle for a ray
/// along +x equals |yaw_deg|).
inline Scene sensor_scene(double yaw_deg = 0.0, double distance_m = 0.914) {
    Scene scene;
    PlantRow row;
    row.id = "r0";
    Plant plant;
    plant.id = "r0p0";
    plant.quad = make_facing_quad({distance_m + 0.008, 0.0, 0.2}, {-1, 0, 0}, 0.45, 0.8);
    row.plants.push_back(plant);
    scene.rows.push_back(row);

    LeafSensorModel m;
    m.id = "s0";
    m.plant_id = "r0p0";
    m.position = {distance_m, 0.0, 0.0};
    m.normal = rotate(Vec3{-1, 0, 0}, Vec3{0, 0, 1}, deg2rad(yaw_deg));
    scene.sensors.push_back(m);

    scene.illuminant.kind = IlluminantKind::combined;
    scene.illuminant.halogen_on = true;
    return scene;
}

/// Large uniform Lambertian wall filling the view.
inline Scene wall_scene(double reflectance = 0.3) {
    Scene scene;
    PlantRow row;
    row.id = "wall";
    Plant plant;
    plant.id = "w0";
    plant.quad = make_facing_quad({2.0, 0.0, 0.0}, {-1, 0, 0}, 40.0, 40.0);
    row.plants.push_back(plant);
    scene.rows.push_back(row);
    scene.foliage.base = reflectance;
    scene.foliage.green_peak = reflectance;  // flat: no bump
    scene.foliage.nir_plateau = reflectance;
    scene.illuminant.kind = IlluminantKind::combined;
    scene.illuminant.halogen_on = true;
    return scene;
}

/// Four (or more) fiducials on the focal plane spanning a rectangle.
inline Scene fiducial_scene(int count = 4) {
    Scene scene;
    const double ys[] = {-0.2, 0.2, -0.2, 0.2, 0.0};
    const double zs[] = {-0.15, -0.15, 0.15, 0.15, 0.0};
    for (int i = 0; i < count && i < 5; ++i) {
        Fiducial f;
        f.id = "f" + std::to_string(i);
        f.quad = make_facing_quad({0.914, ys[i], zs[i]}, {-1, 0, 0}, 0.05, 0.05);
        scene.fiducials.push_back(f);
    }
    return scene;
}

}  // namespace foveascan::testing

#endif  // FOVEASCAN_TEST_SCENES_HPP
