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

#ifndef FOVEASCAN_SPECTRAL_HPP
#define FOVEASCAN_SPECTRAL_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace foveascan {

/// Uniform wavelength sampling grid. Band k is centred at
/// min_nm + k * spacing with spacing = (max_nm - min_nm) / (bands - 1).
struct WavelengthGrid {
    double min_nm = 400.0;
    double max_nm = 1000.0;
    int bands = 270;

    double spacing_nm() const { return (max_nm - min_nm) / (bands - 1); }
    double wavelength(int band) const {
        // lerp form: band 0 and band bands-1 land exactly on the
        // endpoints, which keeps header round trips bit-exact
        const double t = static_cast<double>(band) / (bands - 1);
        return min_nm * (1.0 - t) + max_nm * t;
    }
    std::vector<double> wavelengths() const;

    bool operator==(const WavelengthGrid&) const = default;
};

/// Validated grid constructor.
WavelengthGrid make_grid(double min_nm, double max_nm, int bands);

/// The instrument grid: 400-1000 nm VNIR over 270 bands (~2.23 nm pitch).
WavelengthGrid default_instrument_grid();

/// Index of the band centre closest to nm; ties break toward the lower
/// index. nm must fall within the grid extended by half a band spacing.
int nearest_band(const WavelengthGrid& grid, double nm);

/// Radiance or reflectance sampled on a grid.
struct Spectrum {
    WavelengthGrid grid;
    std::vector<double> values;

    Spectrum() = default;
    Spectrum(WavelengthGrid g, std::vector<double> v);
    explicit Spectrum(WavelengthGrid g) : grid(g), values(g.bands, 0.0) {}
};

/// Gaussian smoothing along wavelength with the given FWHM. The kernel
/// is truncated at 3 sigma and renormalised, so constants stay constant
/// at the spectrum edges.
Spectrum gaussian_blur(const Spectrum& s, double fwhm_nm);

/// Per-line acquisition record attached to a cube.
struct CubeMeta {
    std::vector<double> tilt_x_deg;  // one entry per line when present
    std::vector<double> tilt_y_deg;
    double exposure_ms = 10.0;
    bool halogen_on = false;
    // Mosaic cubes: tilt_y centre per column block of `column_samples`
    // samples. Empty for single-patch cubes.
    std::vector<double> column_tilt_y_deg;
    int column_samples = 0;

    bool operator==(const CubeMeta&) const = default;
};

/// Hyperspectral image: lines x samples x bands, stored band-interleaved
/// by line as 32-bit floats (the on-disk layout).
class SpectralCube {
public:
    SpectralCube() : SpectralCube(1, 1, WavelengthGrid{}) {}
    SpectralCube(int lines, int samples, WavelengthGrid grid);

    int lines() const { return lines_; }
    int samples() const { return samples_; }
    const WavelengthGrid& grid() const { return grid_; }

    float at(int line, int sample, int band) const { return data_[index(line, sample, band)]; }
    void set(int line, int sample, int band, float v) { data_[index(line, sample, band)] = v; }

    const std::vector<float>& data() const { return data_; }
    std::vector<float>& data() { return data_; }

    CubeMeta& meta() { return meta_; }
    const CubeMeta& meta() const { return meta_; }

    /// Spectrum of one pixel.
    Spectrum pixel_spectrum(int line, int sample) const;

private:
    std::size_t index(int line, int sample, int band) const {
        return (static_cast<std::size_t>(line) * grid_.bands + band) * samples_ + sample;
    }

    int lines_;
    int samples_;
    WavelengthGrid grid_;
    std::vector<float> data_;
    CubeMeta meta_;
};

/// Bitwise equality of dimensions, grid, payload and meta.
bool cubes_identical(const SpectralCube& a, const SpectralCube& b);

/// Half-open pixel window in (line, sample).
struct RoiWindow {
    int line0 = 0, line1 = 0;
    int sample0 = 0, sample1 = 0;

    int pixel_count() const { return (line1 - line0) * (sample1 - sample0); }
};

/// Per-band arithmetic mean over the window.
Spectrum roi_mean_spectrum(const SpectralCube& cube, const RoiWindow& window);

}  // namespace foveascan

#endif  // FOVEASCAN_SPECTRAL_HPP
