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

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace bifurcation {

/// Compensated (Neumaier) running sum.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    using std::abs;
    const Scalar t = sum_ + x;
    if (abs(sum_) >= abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_ = 0;
  Scalar comp_ = 0;
};

/// log(e^a + e^b) without overflow. Either argument may be -inf.
template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
  using std::exp;
  using std::log1p;
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<Scalar>::infinity()) return a;
  return a + log1p(exp(b - a));
}

/// log(sum_i e^{x_i}); -inf for an empty range.
template <typename Scalar>
Scalar log_sum_exp(std::span<const Scalar> xs) {
  using std::exp;
  using std::log;
  if (xs.empty()) return -std::numeric_limits<Scalar>::infinity();
  const Scalar m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  Scalar sum = 0;
  for (Scalar x : xs) sum += exp(x - m);
  return m + log(sum);
}

/// log(1 + e^x), accurate for both tails.
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  if (x > Scalar(0)) return x + log1p(exp(-x));
  return log1p(exp(x));
}

/// 1 / (1 + e^{-x}).
template <typename Scalar>
Scalar logistic(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

/// log of a nonnegative real, with log(0) = -inf.
template <typename Scalar>
Scalar safe_log(Scalar x) {
  using std::log;
  if (x <= Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
  return log(x);
}

}  // namespace bifurcation
