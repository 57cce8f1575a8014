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

#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>

#include "foveascan/calibration.hpp"
#include "foveascan/envi.hpp"
#include "foveascan/optics.hpp"
#include "foveascan/perception.hpp"
#include "foveascan/rng.hpp"

using namespace foveascan;

namespace {

Scene bench_scene() {
    Scene scene;
    PlantRow row;
    Plant plant;
    plant.id = "p0";
    plant.quad = make_facing_quad({0.922, 0.0, 0.4}, {-1, 0, 0}, 0.45, 0.8);
    row.plants.push_back(plant);
    scene.rows.push_back(row);
    LeafSensorModel m;
    m.id = "s0";
    m.plant_id = "p0";
    m.position = {0.914, 0.0, 0.45};
    scene.sensors.push_back(m);
    scene.illuminant.halogen_on = true;
    return scene;
}

void BM_ScanLine(benchmark::State& state) {
    const Scene scene = bench_scene();
    PushbroomCamera cam;
    cam.mount.origin = {0, 0, 0.45};
    cam.noise_floor = 0.35;
    const auto grid = default_instrument_grid();
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto line = scan_line(scene, cam, MirrorState{}, grid, seed++);
        benchmark::DoNotOptimize(line);
    }
    state.SetItemsProcessed(state.iterations() * cam.samples * grid.bands);
}
BENCHMARK(BM_ScanLine)->Unit(benchmark::kMillisecond);

void BM_AcquirePatch(benchmark::State& state) {
    const Scene scene = bench_scene();
    PushbroomCamera cam;
    cam.mount.origin = {0, 0, 0.45};
    const auto grid = default_instrument_grid();
    ScanPlan plan;
    plan.tilt_x_start = -0.5;
    plan.tilt_x_end = 0.5;
    plan.lines = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto cube = acquire_patch(scene, cam, plan, grid, 7);
        benchmark::DoNotOptimize(cube);
    }
}
BENCHMARK(BM_AcquirePatch)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_EstimateHomography(benchmark::State& state) {
    Rng rng(3);
    std::vector<Correspondence> corrs;
    const Homography truth({1.01, 0.02, -3.0, -0.015, 0.99, 2.0, 1e-5, -2e-5, 1.0});
    for (int i = 0; i < 20; ++i) {
        const double u = rng.uniform(0, 1280), v = rng.uniform(0, 1024);
        const auto [x, y] = truth.apply(u, v);
        corrs.push_back({u + 0.3 * rng.gaussian(), v + 0.3 * rng.gaussian(), x, y});
    }
    for (auto _ : state) {
        auto h = estimate_homography(corrs);
        benchmark::DoNotOptimize(h);
    }
}
BENCHMARK(BM_EstimateHomography);

void BM_DetectResonance(benchmark::State& state) {
    const auto grid = default_instrument_grid();
    Spectrum s(grid);
    Rng rng(5);
    for (int b = 0; b < grid.bands; ++b) {
        const double d = grid.wavelength(b) - 652.0;
        s.values[b] = 0.08 + 0.6 * std::exp(-4.0 * std::log(2.0) * d * d / 144.0) +
                      0.02 * rng.gaussian();
    }
    for (auto _ : state) {
        auto report = detect_resonance(s);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_DetectResonance);

void BM_CubeRoundTrip(benchmark::State& state) {
    SpectralCube cube(16, 640, default_instrument_grid());
    Rng rng(9);
    for (auto& v : cube.data()) v = static_cast<float>(rng.uniform());
    const auto base =
        (std::filesystem::temp_directory_path() / "foveascan_bench_cube").string();
    for (auto _ : state) {
        write_cube(cube, base);
        auto back = read_cube(base);
        benchmark::DoNotOptimize(back);
    }
    state.SetBytesProcessed(state.iterations() * cube.data().size() * sizeof(float) * 2);
}
BENCHMARK(BM_CubeRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
