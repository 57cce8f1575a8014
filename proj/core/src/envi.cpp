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

#include "foveascan/envi.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "foveascan/errors.hpp"

namespace foveascan {

namespace {

std::string strip_extension(const std::string& path) {
    if (path.size() > 4) {
        const std::string tail = path.substr(path.size() - 4);
        if (tail == ".hdr" || tail == ".bil") return path.substr(0, path.size() - 4);
    }
    return path;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_list(std::ostream& os, const char* key, const std::vector<double>& vals) {
    os << key << " = { ";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) os << ", ";
        os << fmt_double(vals[i]);
    }
    os << " }\n";
}

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

struct HeaderFields {
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<double>> lists;
};

HeaderFields parse_header(const std::string& hdr_path) {
    std::ifstream in(hdr_path);
    if (!in) throw IoError("cannot open header " + hdr_path);
    HeaderFields f;
    std::string line;
    if (!std::getline(in, line) || trim(line) != "ENVI")
        throw MalformedHeaderError("ENVI", "header does not start with ENVI magic: " + hdr_path);
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MalformedHeaderError(line, "header line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '{') {
            // brace list, possibly spanning lines
            while (value.find('}') == std::string::npos) {
                std::string more;
                if (!std::getline(in, more))
                    throw MalformedHeaderError(key, "unterminated list for key " + key);
                value += " " + trim(more);
            }
            std::string body = value.substr(1, value.find('}') - 1);
            for (auto& c : body)
                if (c == ',') c = ' ';
            std::istringstream is(body);
            std::vector<double> vals;
            double v;
            while (is >> v) vals.push_back(v);
            f.lists[key] = std::move(vals);
        } else {
            f.scalars[key] = value;
        }
    }
    return f;
}

long require_int(const HeaderFields& f, const std::string& key) {
    const auto it = f.scalars.find(key);
    if (it == f.scalars.end())
        throw MalformedHeaderError(key, "missing required header key: " + key);
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw MalformedHeaderError(key, "unparseable value for header key " + key + ": " + it->second);
    }
}

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

void write_cube(const SpectralCube& cube, const std::string& path) {
    const std::string base = strip_extension(path);
    const CubeMeta& meta = cube.meta();
    if (!meta.tilt_x_deg.empty() &&
        static_cast<int>(meta.tilt_x_deg.size()) != cube.lines())
        throw InvalidRangeError("tilt schedule length does not match cube lines");

    std::ofstream hdr(base + ".hdr");
    if (!hdr) throw IoError("cannot write header " + base + ".hdr");
    hdr << "ENVI\n";
    hdr << "description = { foveascan spectral cube }\n";
    hdr << "samples = " << cube.samples() << "\n";
    hdr << "lines = " << cube.lines() << "\n";
    hdr << "bands = " << cube.grid().bands << "\n";
    hdr << "header offset = 0\n";
    hdr << "file type = ENVI Standard\n";
    hdr << "data type = 4\n";
    hdr << "interleave = bil\n";
    hdr << "byte order = 0\n";
    hdr << "wavelength units = Nanometers\n";
    write_list(hdr, "wavelength", cube.grid().wavelengths());
    if (!meta.tilt_x_deg.empty()) write_list(hdr, "mirror tilt x", meta.tilt_x_deg);
    if (!meta.tilt_y_deg.empty()) write_list(hdr, "mirror tilt y", meta.tilt_y_deg);
    if (!meta.column_tilt_y_deg.empty()) {
        write_list(hdr, "mosaic column tilt y", meta.column_tilt_y_deg);
        hdr << "mosaic column samples = " << meta.column_samples << "\n";
    }
    hdr << "exposure ms = " << fmt_double(meta.exposure_ms) << "\n";
    hdr << "halogen on = " << (meta.halogen_on ? 1 : 0) << "\n";
    if (!hdr) throw IoError("failed writing header " + base + ".hdr");

    std::ofstream bil(base + ".bil", std::ios::binary);
    if (!bil) throw IoError("cannot write payload " + base + ".bil");
    std::vector<std::uint32_t> buf(cube.data().size());
    std::memcpy(buf.data(), cube.data().data(), cube.data().size() * sizeof(float));
    for (auto& w : buf) w = to_le(w);
    bil.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(std::uint32_t)));
    if (!bil) throw IoError("failed writing payload " + base + ".bil");
}

SpectralCube read_cube(const std::string& path) {
    const std::string base = strip_extension(path);
    const HeaderFields f = parse_header(base + ".hdr");

    const long samples = require_int(f, "samples");
    const long lines = require_int(f, "lines");
    const long bands = require_int(f, "bands");
    const long dtype = require_int(f, "data type");
    if (dtype != 4)
        throw MalformedHeaderError("data type",
                                   "unsupported data type " + std::to_string(dtype) +
                                       " (only 4 = float32)");
    const auto interleave = f.scalars.find("interleave");
    if (interleave == f.scalars.end())
        throw MalformedHeaderError("interleave", "missing required header key: interleave");
    if (interleave->second != "bil")
        throw MalformedHeaderError("interleave",
                                   "unsupported interleave '" + interleave->second + "' (only bil)");
    if (const auto bo = f.scalars.find("byte order");
        bo != f.scalars.end() && trim(bo->second) != "0")
        throw MalformedHeaderError("byte order", "only little-endian (byte order = 0) supported");

    const auto wl = f.lists.find("wavelength");
    if (wl == f.lists.end())
        throw MalformedHeaderError("wavelength", "missing required header key: wavelength");
    if (static_cast<long>(wl->second.size()) != bands)
        throw MalformedHeaderError("wavelength", "wavelength list length does not match bands");

    const WavelengthGrid grid = make_grid(wl->second.front(), wl->second.back(),
                                          static_cast<int>(bands));
    const double tol = grid.spacing_nm() * 1e-6;
    for (int k = 0; k < grid.bands; ++k)
        if (std::fabs(wl->second[k] - grid.wavelength(k)) > tol)
            throw MalformedHeaderError("wavelength", "wavelength list is not uniformly spaced");

    SpectralCube cube(static_cast<int>(lines), static_cast<int>(samples), grid);
    CubeMeta& meta = cube.meta();
    if (const auto tx = f.lists.find("mirror tilt x"); tx != f.lists.end()) {
        if (static_cast<long>(tx->second.size()) != lines)
            throw MalformedHeaderError("mirror tilt x", "tilt list length does not match lines");
        meta.tilt_x_deg = tx->second;
    }
    if (const auto ty = f.lists.find("mirror tilt y"); ty != f.lists.end()) {
        if (static_cast<long>(ty->second.size()) != lines)
            throw MalformedHeaderError("mirror tilt y", "tilt list length does not match lines");
        meta.tilt_y_deg = ty->second;
    }
    if (const auto cy = f.lists.find("mosaic column tilt y"); cy != f.lists.end()) {
        meta.column_tilt_y_deg = cy->second;
        meta.column_samples = static_cast<int>(require_int(f, "mosaic column samples"));
    }
    if (f.scalars.count("exposure ms")) {
        try {
            meta.exposure_ms = std::stod(f.scalars.at("exposure ms"));
        } catch (const std::exception&) {
            throw MalformedHeaderError("exposure ms", "unparseable exposure");
        }
    }
    if (f.scalars.count("halogen on")) meta.halogen_on = require_int(f, "halogen on") != 0;

    std::ifstream bil(base + ".bil", std::ios::binary);
    if (!bil) throw IoError("cannot open payload " + base + ".bil");
    const std::size_t count = cube.data().size();
    std::vector<std::uint32_t> buf(count);
    bil.read(reinterpret_cast<char*>(buf.data()),
             static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
    if (static_cast<std::size_t>(bil.gcount()) != count * sizeof(std::uint32_t))
        throw IoError("payload truncated: " + base + ".bil");
    for (auto& w : buf) w = to_le(w);
    std::memcpy(cube.data().data(), buf.data(), count * sizeof(float));
    return cube;
}

}  // namespace foveascan
