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
#include <cstdint>
#include <span>
#include <stdexcept>

#include "bifurcation/ensemble.hpp"
#include "bifurcation/log_math.hpp"

namespace bifurcation {

enum class AmplitudeForm { ExactProduct, ClosedForm };

// Squared channel amplitudes |b_+|^2, |b_-|^2 held as logarithms.
template <typename Scalar>
struct AmplitudePair {
  Scalar log_b_plus_sq = 0;
  Scalar log_b_minus_sq = 0;
  AmplitudeForm origin = AmplitudeForm::ClosedForm;
  DetectorMode mode = DetectorMode::Symmetric;

  Scalar log_b_sq(int sign) const { return sign > 0 ? log_b_plus_sq : log_b_minus_sq; }
};

/// Product form: log|b_+|^2 = sum log(1 + kappa_n), log|b_-|^2 = sum log(1 - kappa_n).
/// The asymmetric detector routes the - channel around the apparatus, so b_- = 1.
template <typename Scalar>
AmplitudePair<Scalar> amplitudes_exact(std::span<const Scalar> kappas,
                                       DetectorMode mode = DetectorMode::Symmetric) {
  using std::abs;
  using std::log1p;
  AmplitudePair<Scalar> a;
  a.origin = AmplitudeForm::ExactProduct;
  a.mode = mode;
  CompensatedSum<Scalar> up;
  CompensatedSum<Scalar> down;
  for (Scalar k : kappas) {
    if (!(abs(k) < Scalar(1))) throw std::domain_error("amplitude factor nonpositive");
    up.add(log1p(k));
    if (mode == DetectorMode::Symmetric) down.add(log1p(-k));
  }
  a.log_b_plus_sq = up.value();
  a.log_b_minus_sq = down.value();
  return a;
}

inline AmplitudePair<double> amplitudes_exact(const Microstate& m, const ModelParams& params) {
  return amplitudes_exact<double>(std::span<const double>(m.kappas), params.mode());
}

/// Product form for a Rademacher microstate with `n_plus` factors of (1 + kappa)
/// out of `n_steps`; depends on the microstate only through that count.
template <typename Scalar>
AmplitudePair<Scalar> amplitudes_exact_rademacher(std::int64_t n_plus, std::int64_t n_steps,
                                                  Scalar kappa,
                                                  DetectorMode mode = DetectorMode::Symmetric) {
  using std::log1p;
  if (!(kappa < Scalar(1))) throw std::domain_error("amplitude factor nonpositive");
  const Scalar up = log1p(kappa);
  const Scalar down = log1p(-kappa);
  const auto n_minus = static_cast<Scalar>(n_steps - n_plus);
  const auto np = static_cast<Scalar>(n_plus);
  AmplitudePair<Scalar> a;
  a.origin = AmplitudeForm::ExactProduct;
  a.mode = mode;
  a.log_b_plus_sq = np * up + n_minus * down;
  a.log_b_minus_sq = mode == DetectorMode::Symmetric ? np * down + n_minus * up : Scalar(0);
  return a;
}

/// Second-order form: log|b_+-|^2 = Xi (+-Y - 1/2).
template <typename Scalar>
AmplitudePair<Scalar> amplitudes_closed(Scalar y, Scalar xi,
                                        DetectorMode mode = DetectorMode::Symmetric) {
  if (xi < Scalar(0)) throw std::invalid_argument("xi must be >= 0");
  AmplitudePair<Scalar> a;
  a.origin = AmplitudeForm::ClosedForm;
  a.mode = mode;
  if (xi == Scalar(0)) return a;
  a.log_b_plus_sq = xi * (y - Scalar(0.5));
  a.log_b_minus_sq = mode == DetectorMode::Symmetric ? xi * (-y - Scalar(0.5)) : Scalar(0);
  return a;
}

/// max over channels of |log|b|^2 (product) - log|b|^2 (closed)|. Symmetric mode only.
inline double closed_vs_exact_gap(const Microstate& m, const ModelParams& params) {
  if (params.mode() != DetectorMode::Symmetric)
    throw std::invalid_argument("closed_vs_exact_gap requires symmetric mode");
  const auto exact = amplitudes_exact(m, params);
  const auto closed = amplitudes_closed(aggregate_y(m, params), params.xi());
  return std::max(std::abs(exact.log_b_plus_sq - closed.log_b_plus_sq),
                  std::abs(exact.log_b_minus_sq - closed.log_b_minus_sq));
}

/// Taylor-remainder bound N kappa^3 / (3 (1 - kappa)) on the gap. It holds for
/// every Rademacher microstate, where kappa_n^2 == kappa^2 exactly.
inline double rademacher_gap_bound(const ModelParams& params) {
  const double k = params.kappa();
  return static_cast<double>(params.n_steps()) * k * k * k / (3.0 * (1.0 - k));
}

/// Bound valid for any microstate: the second-order term no longer cancels when
/// kappa_n^2 != kappa^2, so it is added explicitly.
inline double gap_bound(const Microstate& m, const ModelParams& params) {
  const double k2 = params.kappa() * params.kappa();
  double quadratic = 0.0;
  double cubic = 0.0;
  for (double k : m.kappas) {
    quadratic += k2 - k * k;
    const double a = std::abs(k);
    cubic += a * a * a / (3.0 * (1.0 - a));
  }
  return 0.5 * std::abs(quadratic) + cubic;
}

}  // namespace bifurcation
