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

#ifndef FOVEASCAN_PARALLEL_HPP
#define FOVEASCAN_PARALLEL_HPP

#include <functional>

namespace foveascan {

/// Maximum worker count, from the FOVEASCAN_THREADS environment
/// variable when set, else the hardware concurrency.
int thread_cap();

/// Runs body(i) for i in [0, n). Iterations must be independent; the
/// result may not depend on the number of workers.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace foveascan

#endif  // FOVEASCAN_PARALLEL_HPP
