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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "bifurcation/analytic.hpp"

using namespace bifurcation;

TEST_CASE("densities at frozen points") {
  CHECK(q_density(1.0, 1.0) == doctest::Approx(0.24197072451914335).epsilon(1e-14));
  CHECK(q_density(0.0, 5.0) == doctest::Approx(0.89206205807638556).epsilon(1e-14));
  CHECK(Qpm_density(1.0, 5.0, +1) == doctest::Approx(0.89206205807638556).epsilon(1e-14));
  CHECK(Qpm_density(-1.0, 5.0, -1) == doctest::Approx(0.89206205807638556).epsilon(1e-14));
  const auto s = QubitState<double>::from_weight(0.7);
  CHECK(Q_density(1.0, 5.0, s) == doctest::Approx(0.62445559051990402).epsilon(1e-14));
  CHECK_THROWS_AS(q_density(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Q_cdf(0.0, -1.0, s), std::invalid_argument);
}

TEST_CASE("Q equals q times w") {
  const auto s = QubitState<double>::from_weight(0.3, 1.1);
  for (double xi : {0.5, 5.0, 60.0})
    for (double y : {-1.3, -0.2, 0.0, 0.6, 1.4}) {
      const double w = rate_w(s, amplitudes_closed(y, xi));
      CHECK(Q_density(y, xi, s) == doctest::Approx(q_density(y, xi) * w).epsilon(1e-12));
    }
}

TEST_CASE("Q_cdf limits and symmetry") {
  const auto s = QubitState<double>::from_weight(0.5);
  CHECK(Q_cdf(0.0, 3.0, s) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(Q_cdf(-50.0, 3.0, s) < 1e-300);
  CHECK(Q_cdf(50.0, 3.0, s) == 1.0);
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-37.0) > 0.0);
}

TEST_CASE("default_grid and uniform_grid") {
  const auto g = default_grid(4.0);
  CHECK(g.y_min == doctest::Approx(-5.0));
  CHECK(g.y_max == doctest::Approx(5.0));
  CHECK(g.step == 0.025);
  const double two_pi = 2.0 * std::numbers::pi;
  const auto t = default_grid(two_pi);
  CHECK(-t.y_min <= 1.0 + 8.0 / std::sqrt(two_pi) + t.step);
  const auto p = grid_profile(two_pi, QubitState<double>::from_weight(0.5), t);
  const auto mid = p.grid.size() / 2;
  CHECK(p.grid.size() % 2 == 1);
  CHECK(p.grid[mid] == 0.0);
  CHECK(p.q[mid] == doctest::Approx(1.0).epsilon(1e-15));
  const auto u = uniform_grid(-1.0, 1.0, 0.5);
  REQUIRE(u.size() == 5);
  CHECK(u.back() == 1.0);
  CHECK(uniform_grid(0.0, 1.0, 0.1).size() == 11);
  CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("profiles integrate to one") {
  const auto s = QubitState<double>::from_weight(0.7);
  for (double xi : {1.0, 5.0, 60.0}) {
    const auto p = grid_profile(xi, s, default_grid(xi));
    CHECK(trapezoid(p.grid, p.q) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(trapezoid(p.grid, p.Q) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(trapezoid(p.grid, p.Q_plus) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mode counts") {
  CHECK(count_local_maxima({0, 1, 0, 1, 0}) == 2);
  CHECK(count_local_maxima({0, 1, 1, 0}) == 0);
  CHECK(count_local_maxima({1}) == 0);
  const auto s = QubitState<double>::from_weight(0.5);
  CHECK(mode_count(grid_profile(0.5, s, default_grid(0.5))) == 1);
  CHECK(mode_count(grid_profile(1.0, s, default_grid(1.0))) <= 1);
  CHECK(mode_count(grid_profile(5.0, s, default_grid(5.0))) == 2);
  CHECK(mode_count(grid_profile(60.0, s, default_grid(60.0))) == 2);
}

TEST_CASE("write_profile_csv") {
  const auto p = grid_profile(1.0, QubitState<double>::from_weight(0.5), -1.0, 1.0, 1.0);
  std::ostringstream os;
  write_profile_csv(os, p);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "y,q,Q,Q_plus,Q_minus");
  std::getline(is, line);
  CHECK(line.rfind("-1,0.24197072451914", 0) == 0);
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}
