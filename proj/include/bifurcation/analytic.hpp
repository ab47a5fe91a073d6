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

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bifurcation/transition.hpp"

namespace bifurcation {

namespace detail {

template <typename Scalar>
void require_positive_xi(Scalar xi) {
  if (!(xi > Scalar(0))) throw std::invalid_argument("xi must be > 0");
}

template <typename Scalar>
Scalar gaussian_density(Scalar y, Scalar center, Scalar xi) {
  using std::exp;
  using std::sqrt;
  require_positive_xi(xi);
  const Scalar d = y - center;
  return sqrt(xi / (Scalar(2) * std::numbers::pi_v<Scalar>)) * exp(-Scalar(0.5) * xi * d * d);
}

}  // namespace detail

/// Initial-ensemble density of Y: normal with mean 0 and variance 1/Xi.
template <typename Scalar>
Scalar q_density(Scalar y, Scalar xi) {
  return detail::gaussian_density(y, Scalar(0), xi);
}

/// Q_+ (sign > 0) or Q_- (sign < 0): normal centred at +-1, variance 1/Xi.
template <typename Scalar>
Scalar Qpm_density(Scalar y, Scalar xi, int sign) {
  return detail::gaussian_density(y, sign > 0 ? Scalar(1) : Scalar(-1), xi);
}

/// Final-state density |psi_+|^2 Q_+ + |psi_-|^2 Q_-.
template <typename Scalar>
Scalar Q_density(Scalar y, Scalar xi, const QubitState<Scalar>& qubit) {
  return qubit.weight_plus() * Qpm_density(y, xi, +1) +
         qubit.weight_minus() * Qpm_density(y, xi, -1);
}

template <typename Scalar>
Scalar normal_cdf(Scalar z) {
  using std::erfc;
  return Scalar(0.5) * erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

/// CDF of the final-state mixture Q.
template <typename Scalar>
Scalar Q_cdf(Scalar y, Scalar xi, const QubitState<Scalar>& qubit) {
  using std::sqrt;
  detail::require_positive_xi(xi);
  const Scalar s = sqrt(xi);
  return qubit.weight_plus() * normal_cdf(s * (y - Scalar(1))) +
         qubit.weight_minus() * normal_cdf(s * (y + Scalar(1)));
}

struct DensityProfile {
  std::vector<double> grid;
  std::vector<double> q;
  std::vector<double> Q;
  std::vector<double> Q_plus;
  std::vector<double> Q_minus;
};

struct GridSpec {
  double y_min = 0.0;
  double y_max = 0.0;
  double step = 0.0;
};

/// Step 0.05/sqrt(Xi) over [-h, h], h = 1 + 8/sqrt(Xi) rounded up to a whole
/// number of steps.
GridSpec default_grid(double xi);

/// Uniform grid y_min + k step for k = 0, 1, ... while <= y_max (plus
/// rounding slack). Throws std::invalid_argument for an empty grid.
std::vector<double> uniform_grid(double y_min, double y_max, double step);

DensityProfile grid_profile(double xi, const QubitState<double>& qubit, double y_min,
                            double y_max, double step);
inline DensityProfile grid_profile(double xi, const QubitState<double>& qubit,
                                   const GridSpec& g) {
  return grid_profile(xi, qubit, g.y_min, g.y_max, g.step);
}

/// Composite trapezoid rule on a (not necessarily uniform) grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& f);

/// Number of strict interior local maxima of `values`.
int count_local_maxima(const std::vector<double>& values);

/// Strict interior local maxima of the profile's Q column.
int mode_count(const DensityProfile& profile);

/// CSV with header `y,q,Q,Q_plus,Q_minus`, 17 significant digits.
void write_profile_csv(std::ostream& os, const DensityProfile& profile);

}  // namespace bifurcation
