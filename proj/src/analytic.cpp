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

#include "bifurcation/analytic.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bifurcation {

GridSpec default_grid(double xi) {
  detail::require_positive_xi(xi);
  const double s = std::sqrt(xi);
  const double step = 0.05 / s;
  // whole steps either side, so y = 0 is a grid point
  const double k = std::ceil((1.0 + 8.0 / s) / step - 1e-9);
  return {-k * step, k * step, step};
}

std::vector<double> uniform_grid(double y_min, double y_max, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be > 0");
  if (!(y_min < y_max)) throw std::invalid_argument("empty grid: y_min must be < y_max");
  const double span = (y_max - y_min) / step;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  if (n < 2) throw std::invalid_argument("empty grid: fewer than two points");
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = y_min + step * static_cast<double>(k);
  return g;
}

DensityProfile grid_profile(double xi, const QubitState<double>& qubit, double y_min,
                            double y_max, double step) {
  detail::require_positive_xi(xi);
  DensityProfile p;
  p.grid = uniform_grid(y_min, y_max, step);
  const std::size_t n = p.grid.size();
  p.q.resize(n);
  p.Q.resize(n);
  p.Q_plus.resize(n);
  p.Q_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = p.grid[i];
    p.q[i] = q_density(y, xi);
    p.Q_plus[i] = Qpm_density(y, xi, +1);
    p.Q_minus[i] = Qpm_density(y, xi, -1);
    p.Q[i] = qubit.weight_plus() * p.Q_plus[i] + qubit.weight_minus() * p.Q_minus[i];
  }
  return p;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  if (x.size() != f.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return s;
}

int count_local_maxima(const std::vector<double>& values) {
  int count = 0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) ++count;
  return count;
}

int mode_count(const DensityProfile& profile) { return count_local_maxima(profile.Q); }

void write_profile_csv(std::ostream& os, const DensityProfile& profile) {
  os << "y,q,Q,Q_plus,Q_minus\n";
  char buf[160];
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", profile.grid[i],
                  profile.q[i], profile.Q[i], profile.Q_plus[i], profile.Q_minus[i]);
    os << buf;
  }
}

}  // namespace bifurcation
