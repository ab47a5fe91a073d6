// Copyright 2026 The bifurcation-lab Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bifurcation {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Randomized identity checks over the model: R purity, Tr R = w, amplitude
// products, normalized final states, channel and diagram-sum unitarity, the
// truncated series bound, log-space finiteness at Xi up to 1e3, and the
// Xi = 0 null simulation.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, std::size_t trials);

}  // namespace bifurcation
