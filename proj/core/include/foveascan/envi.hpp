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

#ifndef FOVEASCAN_ENVI_HPP
#define FOVEASCAN_ENVI_HPP

#include <string>

#include "foveascan/spectral.hpp"

namespace foveascan {

/// Writes `<base>.hdr` (plain-text ENVI header) and `<base>.bil`
/// (band-interleaved-by-line, little-endian float32). A trailing .hdr
/// or .bil extension on `path` is stripped. Round trips bit-exactly
/// through read_cube.
void write_cube(const SpectralCube& cube, const std::string& path);

SpectralCube read_cube(const std::string& path);

}  // namespace foveascan

#endif  // FOVEASCAN_ENVI_HPP
