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
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "bifurcation/log_math.hpp"
#include "bifurcation/transition.hpp"

namespace bifurcation {

// Source strength |J|^2 and common sink strength |F|^2.
template <typename Scalar>
class Couplings {
 public:
  Couplings(Scalar j_sq, Scalar f_sq) : j_sq_(j_sq), f_sq_(f_sq), g_(j_sq * f_sq) {
    if (!(j_sq >= Scalar(0) && f_sq >= Scalar(0)))
      throw std::invalid_argument("couplings must be nonnegative");
  }
  /// Couplings with |J|^2 = g and |F|^2 = 1.
  static Couplings from_product(Scalar g) { return Couplings(g, Scalar(1)); }

  Scalar j_sq() const { return j_sq_; }
  Scalar f_sq() const { return f_sq_; }
  Scalar g() const { return g_; }

 private:
  Scalar j_sq_;
  Scalar f_sq_;
  Scalar g_;
};

template <typename Scalar>
struct ProcessSplit {
  Scalar p_no_change = 1;
  Scalar p_plus = 0;
  Scalar p_minus = 0;
  Scalar log_p_no_change = 0;
  Scalar log_p_plus = -std::numeric_limits<Scalar>::infinity();
  Scalar log_p_minus = -std::numeric_limits<Scalar>::infinity();
};

/// log W with W = |psi_+|^2 e^{Xi(y - 1/2)} + |psi_-|^2 e^{Xi(-y - 1/2)}.
template <typename Scalar>
Scalar log_channel_sum(const QubitState<Scalar>& qubit, Scalar xi, Scalar y) {
  return log_rate_w(qubit, amplitudes_closed(y, xi));
}

/// All-orders resummation: p_no_change = 1/(1 + gW), p_+- = g |psi_+-|^2
/// e^{Xi(+-y - 1/2)} / (1 + gW). The three outputs share one log W.
template <typename Scalar>
ProcessSplit<Scalar> full_split(const QubitState<Scalar>& qubit, Scalar xi, Scalar y,
                                const Couplings<Scalar>& couplings) {
  using std::exp;
  if (!std::isfinite(xi) || !std::isfinite(y)) throw std::invalid_argument("non-finite input");
  ProcessSplit<Scalar> s;
  const Scalar log_g = safe_log(couplings.g());
  if (log_g == -std::numeric_limits<Scalar>::infinity()) return s;

  const auto amps = amplitudes_closed(y, xi);
  const Scalar log_gw = log_g + log_rate_w(qubit, amps);
  const auto shares = channel_probabilities(qubit, amps);

  s.log_p_no_change = -softplus(log_gw);
  const Scalar log_scatter = -softplus(-log_gw);
  s.p_no_change = logistic(-log_gw);
  const Scalar scatter = logistic(log_gw);
  s.p_plus = scatter * shares.p_plus;
  s.p_minus = scatter * shares.p_minus;
  s.log_p_plus = log_scatter + shares.log_p_plus;
  s.log_p_minus = log_scatter + shares.log_p_minus;
  return s;
}

template <typename Scalar>
struct SeriesResult {
  Scalar partial_sum = 1;
  bool converged = true;
  Scalar ratio = 0;  // gW
};

/// sum_{k=0}^{k_max} (-gW)^k, the no-change series truncated after k_max
/// returns to the initial state. Converges iff gW < 1.
template <typename Scalar>
SeriesResult<Scalar> truncated_no_change(const QubitState<Scalar>& qubit, Scalar xi, Scalar y,
                                         const Couplings<Scalar>& couplings, std::int64_t k_max) {
  using std::exp;
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  const Scalar x = couplings.g() * exp(log_channel_sum(qubit, xi, y));
  SeriesResult<Scalar> r;
  r.ratio = x;
  r.converged = x < Scalar(1);
  Scalar term = 1;
  Scalar sum = 1;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    term *= -x;
    sum += term;
    if (!std::isfinite(sum)) break;
  }
  r.partial_sum = sum;
  return r;
}

/// Truncation error bound (gW)^{k_max+1} / (1 - gW); +inf when not convergent.
template <typename Scalar>
Scalar truncation_bound(Scalar ratio, std::int64_t k_max) {
  using std::pow;
  if (!(ratio < Scalar(1))) return std::numeric_limits<Scalar>::infinity();
  return pow(ratio, static_cast<Scalar>(k_max + 1)) / (Scalar(1) - ratio);
}

/// Large-Xi channel split p_+- = |psi_+-|^2 e^{+-Xi y} / (|psi_+|^2 e^{Xi y} + |psi_-|^2 e^{-Xi y}).
template <typename Scalar>
ChannelProbabilities<Scalar> limiting_channel_probs(const QubitState<Scalar>& qubit, Scalar xi,
                                                    Scalar y) {
  return detail::split(qubit.log_weight(+1) + xi * y, qubit.log_weight(-1) - xi * y);
}

}  // namespace bifurcation
