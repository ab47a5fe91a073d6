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
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "bifurcation/transition.hpp"

using namespace bifurcation;
using Q = QubitState<double>;
using C = std::complex<double>;

TEST_CASE("QubitState validates the norm") {
  CHECK_THROWS_AS(Q(C(1.0), C(0.1)), std::invalid_argument);
  CHECK_NOTHROW(Q(C(0.6), C(0.0, 0.8)));
  CHECK_THROWS_AS(Q::from_weight(1.2), std::invalid_argument);
  const auto s = Q::from_weight(0.7, 0.4);
  CHECK(s.weight_plus() == 0.7);
  CHECK(std::norm(s.psi_plus()) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(std::arg(s.psi_plus()) == doctest::Approx(0.4));
}

TEST_CASE("unnormalized_R") {
  const auto amps = amplitudes_closed(0.3, 4.0);
  const auto r = unnormalized_R(Q::from_weight(1.0), amps);
  CHECK(r(0, 0).real() == doctest::Approx(std::exp(amps.log_b_plus_sq)));
  CHECK(std::abs(r(0, 1)) == 0.0);
  CHECK(std::abs(r(1, 1)) == 0.0);

  const auto flat = unnormalized_R(Q::from_weight(0.5), amplitudes_closed(0.7, 0.0));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) CHECK(std::abs(flat(j, k) - 0.5) < 1e-15);

  // Xi = 2, Y = 0: |b|^2 = 1/e on both channels.
  const auto r2 = unnormalized_R(Q::from_weight(0.7), amplitudes_closed(0.0, 2.0));
  CHECK(r2(0, 0).real() == doctest::Approx(0.7 * 0.36787944117144233).epsilon(1e-14));
  CHECK(r2(1, 1).real() == doctest::Approx(0.3 * 0.36787944117144233).epsilon(1e-14));
  CHECK(std::abs(r2(0, 1)) == doctest::Approx(0.16858353857861884).epsilon(1e-14));
  CHECK((r2 - r2.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rate_w") {
  CHECK(rate_w(Q::from_weight(0.3), amplitudes_closed(1.2, 0.0)) == doctest::Approx(1.0));
  CHECK(rate_w(Q::from_weight(0.5), amplitudes_closed(0.0, 2.0)) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-15));
  for (double y : {-1.0, 0.2, 1.5})
    CHECK(rate_w(Q::from_weight(1.0), amplitudes_closed(y, 7.0)) ==
          doctest::Approx(std::exp(7.0 * (y - 0.5))).epsilon(1e-14));
}

TEST_CASE("normalized_final_state") {
  DensityMatrix2<double> half;
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK((normalized_final_state(half) - half).cwiseAbs().maxCoeff() == 0.0);
  DensityMatrix2<double> two;
  two << 2.0, 0.0, 0.0, 0.0;
  CHECK(normalized_final_state(two)(0, 0).real() == 1.0);
  CHECK_THROWS_WITH_AS(normalized_final_state(DensityMatrix2<double>::Zero().eval()),
                       "vanishing rate", std::domain_error);

  // Xi = 60, Y = 1: rho_{++} must agree with p_+.
  const auto q = Q::from_weight(0.7);
  const auto amps = amplitudes_closed(1.0, 60.0);
  const auto rho = normalized_final_state(unnormalized_R_scaled(q, amps));
  const auto p = channel_probabilities(q, amps);
  CHECK(rho(0, 0).real() == doctest::Approx(p.p_plus).epsilon(1e-14));
  CHECK(rho(1, 1).real() == doctest::Approx(p.p_minus).epsilon(1e-12));
}

TEST_CASE("channel_probabilities") {
  const auto even = channel_probabilities(Q::from_weight(0.5), amplitudes_closed(0.0, 9.0));
  CHECK(even.p_plus == doctest::Approx(0.5));
  CHECK(even.p_minus == doctest::Approx(0.5));
  const auto pure = channel_probabilities(Q::from_weight(1.0), amplitudes_closed(-3.0, 9.0));
  CHECK(pure.p_plus == 1.0);
  CHECK(pure.p_minus == 0.0);
  const auto p = channel_probabilities(Q::from_weight(0.7), amplitudes_closed(1.0, 1.0));
  CHECK(p.p_plus == doctest::Approx(0.94517883756117407).epsilon(1e-14));
  const auto extreme = channel_probabilities(Q::from_weight(0.7), amplitudes_closed(0.8, 1e4));
  CHECK(std::abs(extreme.p_plus + extreme.p_minus - 1.0) <= 1e-12);
  CHECK(std::isfinite(extreme.log_p_minus));
}

TEST_CASE("purity_defect") {
  DensityMatrix2<double> mixed = DensityMatrix2<double>::Zero();
  mixed(0, 0) = 0.5;
  mixed(1, 1) = 0.5;
  CHECK(purity_defect(mixed) == doctest::Approx(0.25));
  CHECK(purity_defect(DensityMatrix2<double>::Zero().eval()) == 0.0);
}

TEST_CASE("offdiagonal_suppression") {
  CHECK(offdiagonal_suppression(Q::from_weight(0.5), amplitudes_closed(0.4, 0.0)).value ==
        doctest::Approx(0.5));
  const auto s = offdiagonal_suppression(Q::from_weight(0.5), amplitudes_closed(0.9, 60.0));
  CHECK(s.log_value == doctest::Approx(-30.693147180559945).epsilon(1e-14));
  CHECK(s.value == doctest::Approx(4.6788114844200873e-14).epsilon(1e-12));
  CHECK(offdiagonal_suppression(Q::from_weight(1.0), amplitudes_closed(0.9, 60.0)).value == 0.0);
}

TEST_CASE("density-matrix identities over random inputs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double xi = std::pow(10.0, -3.0 + 6.0 * u(rng));
    const double y = -2.0 + 4.0 * u(rng);
    const auto q = Q::from_weight(u(rng), 6.28 * u(rng));
    const auto amps = amplitudes_closed(y, xi);
    const auto r = unnormalized_R_scaled(q, amps);
    const double tr = r.matrix.trace().real();
    CHECK(std::abs(std::expm1(std::log(tr) + r.log_scale - log_rate_w(q, amps))) <= 1e-12);
    CHECK(purity_defect(r.matrix) <= 1e-12 * tr * tr);
    const auto p = channel_probabilities(q, amps);
    CHECK(std::abs(p.p_plus + p.p_minus - 1.0) <= 1e-12);

    const auto rho = normalized_final_state(r);
    Eigen::SelfAdjointEigenSolver<DensityMatrix2<double>> eig(rho, Eigen::EigenvaluesOnly);
    CHECK(std::abs(eig.eigenvalues()(0)) <= 1e-10);
    CHECK(std::abs(eig.eigenvalues()(1) - 1.0) <= 1e-10);
  }
}

TEST_CASE("a common amplitude factor changes nothing observable") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const auto q = Q::from_weight(u(rng));
    auto a = amplitudes_closed(-1.0 + 2.0 * u(rng), 10.0 * u(rng));
    auto b = a;
    const double shift = -20.0 + 40.0 * u(rng);
    b.log_b_plus_sq += shift;
    b.log_b_minus_sq += shift;
    const auto pa = channel_probabilities(q, a);
    const auto pb = channel_probabilities(q, b);
    CHECK(std::abs(pa.p_plus - pb.p_plus) <= 1e-12);
    const auto ra = normalized_final_state(unnormalized_R(q, a));
    const auto rb = normalized_final_state(unnormalized_R(q, b));
    CHECK((ra - rb).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("long double instantiation") {
  using QL = QubitState<long double>;
  const auto q = QL::from_weight(0.25L);
  const auto a = amplitudes_closed<long double>(0.5L, 3.0L);
  CHECK(static_cast<double>(rate_w(q, a)) == doctest::Approx(0.25 + 0.75 * std::exp(-3.0)));
}
