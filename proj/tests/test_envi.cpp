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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "foveascan/envi.hpp"
#include "foveascan/errors.hpp"
#include "foveascan/rng.hpp"

using namespace foveascan;
namespace fs = std::filesystem;

namespace {

std::string temp_base(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "foveascan_envi_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("envi: zero cube round trips") {
    SpectralCube cube(2, 2, make_grid(400, 1000, 3));
    const auto base = temp_base("zeros");
    write_cube(cube, base);
    const auto back = read_cube(base);
    CHECK(cubes_identical(cube, back));
}

TEST_CASE("envi: random cubes round trip bit-exactly") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int lines = rng.uniform_int(1, 16);
        const int samples = rng.uniform_int(1, 16);
        const int bands = rng.uniform_int(2, 16);
        SpectralCube cube(lines, samples,
                          make_grid(rng.uniform(300, 500), rng.uniform(900, 1100), bands));
        for (auto& v : cube.data())
            v = static_cast<float>(rng.gaussian(0.0, rng.uniform(1e-6, 1e4)));
        cube.meta().exposure_ms = rng.uniform(0.1, 50);
        cube.meta().halogen_on = rng.uniform() < 0.5;
        for (int l = 0; l < lines; ++l) {
            cube.meta().tilt_x_deg.push_back(rng.uniform(-25, 25));
            cube.meta().tilt_y_deg.push_back(rng.uniform(-25, 25));
        }
        const auto base = temp_base("rand" + std::to_string(trial));
        write_cube(cube, base);
        CHECK(cubes_identical(cube, read_cube(base)));
    }
}

TEST_CASE("envi: default cube header declares the platform shape") {
    SpectralCube cube(3, 640, default_instrument_grid());
    const auto base = temp_base("platform");
    write_cube(cube, base);
    const std::string hdr = slurp(base + ".hdr");
    CHECK(hdr.find("samples = 640") != std::string::npos);
    CHECK(hdr.find("bands = 270") != std::string::npos);
    CHECK(hdr.find("data type = 4") != std::string::npos);
    CHECK(hdr.find("interleave = bil") != std::string::npos);
    CHECK(hdr.find("byte order = 0") != std::string::npos);
    CHECK(hdr.find("wavelength = { 400") != std::string::npos);
    CHECK(hdr.find(" 1000 }") != std::string::npos);
}

TEST_CASE("envi: missing wavelength key names the key") {
    SpectralCube cube(1, 2, make_grid(400, 1000, 3));
    const auto base = temp_base("nokey");
    write_cube(cube, base);
    // strip the wavelength line from the header
    std::istringstream in(slurp(base + ".hdr"));
    std::ofstream out(base + ".hdr");
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("wavelength =", 0) != 0) out << line << "\n";
    out.close();
    try {
        read_cube(base);
        FAIL("expected MalformedHeaderError");
    } catch (const MalformedHeaderError& e) {
        CHECK(e.key == "wavelength");
    }
}

TEST_CASE("envi: wrong data type is rejected with the key") {
    SpectralCube cube(1, 2, make_grid(400, 1000, 3));
    const auto base = temp_base("dtype");
    write_cube(cube, base);
    std::istringstream in(slurp(base + ".hdr"));
    std::ofstream out(base + ".hdr");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("data type", 0) == 0)
            out << "data type = 12\n";
        else
            out << line << "\n";
    }
    out.close();
    try {
        read_cube(base);
        FAIL("expected MalformedHeaderError");
    } catch (const MalformedHeaderError& e) {
        CHECK(e.key == "data type");
    }
}

TEST_CASE("envi: truncated payload raises IoError") {
    SpectralCube cube(2, 3, make_grid(400, 1000, 4));
    const auto base = temp_base("trunc");
    write_cube(cube, base);
    fs::resize_file(base + ".bil", 10);
    CHECK_THROWS_AS(read_cube(base), IoError);
}

TEST_CASE("envi: tilt schedule must match the line count") {
    SpectralCube cube(2, 2, make_grid(400, 1000, 3));
    cube.meta().tilt_x_deg = {1.0};  // wrong length
    CHECK_THROWS_AS(write_cube(cube, temp_base("badtilt")), InvalidRangeError);
}

TEST_CASE("envi: missing files raise IoError") {
    CHECK_THROWS_AS(read_cube(temp_base("does_not_exist")), IoError);
}
