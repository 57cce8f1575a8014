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

#include "foveascan/spectral.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "foveascan/errors.hpp"

namespace foveascan {

std::vector<double> WavelengthGrid::wavelengths() const {
    std::vector<double> w(bands);
    for (int k = 0; k < bands; ++k) w[k] = wavelength(k);
    return w;
}

WavelengthGrid make_grid(double min_nm, double max_nm, int bands) {
    if (!(min_nm < max_nm) || bands < 2) {
        std::ostringstream os;
        os << "invalid wavelength grid: [" << min_nm << ", " << max_nm << "] nm, "
           << bands << " bands (need min < max and at least 2 bands)";
        throw InvalidRangeError(os.str());
    }
    return WavelengthGrid{min_nm, max_nm, bands};
}

WavelengthGrid default_instrument_grid() { return make_grid(400.0, 1000.0, 270); }

int nearest_band(const WavelengthGrid& grid, double nm) {
    const double half = grid.spacing_nm() / 2.0;
    if (nm < grid.min_nm - half || nm > grid.max_nm + half) {
        std::ostringstream os;
        os << nm << " nm outside grid [" << grid.min_nm << ", " << grid.max_nm << "]";
        throw OutOfRangeError(os.str());
    }
    // floor(x + 0.5) rounds halfway cases up, i.e. ties toward the
    // lower wavelength's index would need floor(x + 0.5) with x exactly
    // k + 0.5 mapping to k; nudge down to break ties toward lower index.
    const double x = (nm - grid.min_nm) / grid.spacing_nm();
    int k = static_cast<int>(std::floor(x + 0.5));
    if (k > 0 && x + 0.5 == std::floor(x + 0.5)) --k;  // exact midpoint
    if (k < 0) k = 0;
    if (k >= grid.bands) k = grid.bands - 1;
    return k;
}

Spectrum::Spectrum(WavelengthGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.bands)
        throw InvalidRangeError("spectrum length does not match grid band count");
}

Spectrum gaussian_blur(const Spectrum& s, double fwhm_nm) {
    if (fwhm_nm <= 0.0) return s;
    const double sigma = fwhm_nm / 2.3548200450309493;  // FWHM -> sigma
    const double step = s.grid.spacing_nm();
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma / step)));
    std::vector<double> kernel(radius + 1);
    for (int j = 0; j <= radius; ++j)
        kernel[j] = std::exp(-0.5 * (j * step) * (j * step) / (sigma * sigma));

    Spectrum out(s.grid);
    const int n = s.grid.bands;
    for (int i = 0; i < n; ++i) {
        double acc = kernel[0] * s.values[i];
        double wsum = kernel[0];
        for (int j = 1; j <= radius; ++j) {
            if (i - j >= 0) {
                acc += kernel[j] * s.values[i - j];
                wsum += kernel[j];
            }
            if (i + j < n) {
                acc += kernel[j] * s.values[i + j];
                wsum += kernel[j];
            }
        }
        out.values[i] = acc / wsum;
    }
    return out;
}

SpectralCube::SpectralCube(int lines, int samples, WavelengthGrid grid)
    : lines_(lines), samples_(samples), grid_(grid) {
    if (lines < 1 || samples < 1)
        throw InvalidRangeError("cube dimensions must be positive");
    data_.assign(static_cast<std::size_t>(lines) * samples * grid.bands, 0.0f);
}

Spectrum SpectralCube::pixel_spectrum(int line, int sample) const {
    if (line < 0 || line >= lines_ || sample < 0 || sample >= samples_)
        throw BoundsError("pixel outside cube");
    Spectrum s(grid_);
    for (int b = 0; b < grid_.bands; ++b) s.values[b] = at(line, sample, b);
    return s;
}

bool cubes_identical(const SpectralCube& a, const SpectralCube& b) {
    if (a.lines() != b.lines() || a.samples() != b.samples() || !(a.grid() == b.grid()))
        return false;
    if (!(a.meta() == b.meta())) return false;
    return std::memcmp(a.data().data(), b.data().data(),
                       a.data().size() * sizeof(float)) == 0;
}

Spectrum roi_mean_spectrum(const SpectralCube& cube, const RoiWindow& w) {
    if (w.line0 >= w.line1 || w.sample0 >= w.sample1)
        throw EmptyWindowError("roi window is empty");
    if (w.line0 < 0 || w.line1 > cube.lines() || w.sample0 < 0 || w.sample1 > cube.samples())
        throw BoundsError("roi window outside cube bounds");

    Spectrum s(cube.grid());
    const double inv = 1.0 / w.pixel_count();
    for (int b = 0; b < cube.grid().bands; ++b) {
        double acc = 0.0;
        for (int l = w.line0; l < w.line1; ++l)
            for (int p = w.sample0; p < w.sample1; ++p) acc += cube.at(l, p, b);
        s.values[b] = acc * inv;
    }
    return s;
}

}  // namespace foveascan
