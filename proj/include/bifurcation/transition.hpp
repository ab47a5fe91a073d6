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
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/log_math.hpp"

namespace bifurcation {

template <typename Scalar>
using DensityMatrix2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

// Superposition psi_+ |+> + psi_- |-> of the measured two-level system.
template <typename Scalar>
class QubitState {
 public:
  using Complex = std::complex<Scalar>;

  /// Throws std::invalid_argument unless |psi_+|^2 + |psi_-|^2 = 1 within 1e-12.
  QubitState(Complex psi_plus, Complex psi_minus) : plus_(psi_plus), minus_(psi_minus) {
    using std::abs;
    const Scalar norm = std::norm(plus_) + std::norm(minus_);
    if (!(abs(norm - Scalar(1)) <= Scalar(1e-12)))
      throw std::invalid_argument("qubit state must have unit norm");
    weight_plus_ = std::norm(plus_);
    weight_minus_ = std::norm(minus_);
  }

  /// psi_+ = sqrt(p) e^{i phase}, psi_- = sqrt(1 - p). The channel weights are
  /// kept as p and 1 - p exactly.
  static QubitState from_weight(Scalar plus_sq, Scalar phase = 0) {
    using std::sqrt;
    if (!(plus_sq >= Scalar(0) && plus_sq <= Scalar(1)))
      throw std::invalid_argument("|psi_+|^2 must lie in [0, 1]");
    QubitState s(std::polar(sqrt(plus_sq), phase), Complex(sqrt(Scalar(1) - plus_sq)));
    s.weight_plus_ = plus_sq;
    s.weight_minus_ = Scalar(1) - plus_sq;
    return s;
  }

  Complex psi_plus() const { return plus_; }
  Complex psi_minus() const { return minus_; }
  Complex psi(int sign) const { return sign > 0 ? plus_ : minus_; }
  Scalar weight_plus() const { return weight_plus_; }
  Scalar weight_minus() const { return weight_minus_; }
  Scalar weight(int sign) const { return sign > 0 ? weight_plus_ : weight_minus_; }
  Scalar log_weight(int sign) const { return safe_log(weight(sign)); }

  /// Exchanges the roles of |+> and |->.
  QubitState swapped() const {
    QubitState s = *this;
    std::swap(s.plus_, s.minus_);
    std::swap(s.weight_plus_, s.weight_minus_);
    return s;
  }

 private:
  Complex plus_;
  Complex minus_;
  Scalar weight_plus_ = 1;
  Scalar weight_minus_ = 0;
};

// R = exp(log_scale) * matrix; keeps R representable when |b|^2 overflows.
template <typename Scalar>
struct ScaledDensityMatrix {
  DensityMatrix2<Scalar> matrix;
  Scalar log_scale = 0;
};

namespace detail {

template <typename Scalar>
DensityMatrix2<Scalar> r_matrix(const QubitState<Scalar>& qubit, Scalar b_plus, Scalar b_minus) {
  using C = std::complex<Scalar>;
  const Eigen::Matrix<C, 2, 1> v(C(b_plus) * qubit.psi_plus(), C(b_minus) * qubit.psi_minus());
  return v * v.adjoint();
}

}  // namespace detail

/// R_jk = b_j b_k psi_j psi_k^*, with b_j = +sqrt(|b_j|^2). Hermitian and
/// rank one by construction.
template <typename Scalar>
DensityMatrix2<Scalar> unnormalized_R(const QubitState<Scalar>& qubit,
                                      const AmplitudePair<Scalar>& amps) {
  using std::exp;
  return detail::r_matrix(qubit, exp(Scalar(0.5) * amps.log_b_plus_sq),
                          exp(Scalar(0.5) * amps.log_b_minus_sq));
}

/// Same R, factored so the larger |b_j|^2 is pulled into log_scale.
template <typename Scalar>
ScaledDensityMatrix<Scalar> unnormalized_R_scaled(const QubitState<Scalar>& qubit,
                                                  const AmplitudePair<Scalar>& amps) {
  using std::exp;
  const Scalar m = std::max(amps.log_b_plus_sq, amps.log_b_minus_sq);
  return {detail::r_matrix(qubit, exp(Scalar(0.5) * (amps.log_b_plus_sq - m)),
                           exp(Scalar(0.5) * (amps.log_b_minus_sq - m))),
          m};
}

/// log w = log(|psi_+|^2 |b_+|^2 + |psi_-|^2 |b_-|^2).
template <typename Scalar>
Scalar log_rate_w(const QubitState<Scalar>& qubit, const AmplitudePair<Scalar>& amps) {
  return log_add_exp(qubit.log_weight(+1) + amps.log_b_plus_sq,
                     qubit.log_weight(-1) + amps.log_b_minus_sq);
}

template <typename Scalar>
Scalar rate_w(const QubitState<Scalar>& qubit, const AmplitudePair<Scalar>& amps) {
  using std::exp;
  return exp(log_rate_w(qubit, amps));
}

/// rho_f = R / Tr R. Throws std::domain_error("vanishing rate") if Tr R is not
/// positive; use the scaled overload when R itself would underflow.
template <typename Scalar>
DensityMatrix2<Scalar> normalized_final_state(const DensityMatrix2<Scalar>& r) {
  const Scalar tr = r.trace().real();
  if (!(tr > Scalar(0))) throw std::domain_error("vanishing rate");
  return r / tr;
}

template <typename Scalar>
DensityMatrix2<Scalar> normalized_final_state(const ScaledDensityMatrix<Scalar>& r) {
  return normalized_final_state(r.matrix);
}

template <typename Scalar>
struct ChannelProbabilities {
  Scalar p_plus = 0;
  Scalar p_minus = 0;
  Scalar log_p_plus = 0;
  Scalar log_p_minus = 0;
};

namespace detail {

// Two-way split e^{a} : e^{b}, evaluated through their difference only.
template <typename Scalar>
ChannelProbabilities<Scalar> split(Scalar log_a, Scalar log_b) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  ChannelProbabilities<Scalar> p;
  if (log_a == -inf && log_b == -inf) throw std::domain_error("vanishing rate");
  if (log_b == -inf) return {Scalar(1), Scalar(0), Scalar(0), -inf};
  if (log_a == -inf) return {Scalar(0), Scalar(1), -inf, Scalar(0)};
  const Scalar d = log_b - log_a;
  p.p_plus = logistic(-d);
  p.p_minus = logistic(d);
  p.log_p_plus = -softplus(d);
  p.log_p_minus = -softplus(-d);
  return p;
}

}  // namespace detail

/// p_+- = |psi_+-|^2 |b_+-|^2 / w.
template <typename Scalar>
ChannelProbabilities<Scalar> channel_probabilities(const QubitState<Scalar>& qubit,
                                                   const AmplitudePair<Scalar>& amps) {
  return detail::split(qubit.log_weight(+1) + amps.log_b_plus_sq,
                       qubit.log_weight(-1) + amps.log_b_minus_sq);
}

/// max-norm of R R - (Tr R) R; zero exactly for a pure (rank-one) R.
template <typename Scalar>
Scalar purity_defect(const DensityMatrix2<Scalar>& r) {
  const DensityMatrix2<Scalar> d = r * r - r.trace() * r;
  return d.cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct LogMagnitude {
  Scalar value = 0;
  Scalar log_value = 0;
};

/// |R_{+-}| = |b_+ b_-| |psi_+ psi_-|; e^{-Xi/2} |psi_+ psi_-| for the closed form.
template <typename Scalar>
LogMagnitude<Scalar> offdiagonal_suppression(const QubitState<Scalar>& qubit,
                                             const AmplitudePair<Scalar>& amps) {
  using std::exp;
  const Scalar log_v = Scalar(0.5) * (amps.log_b_plus_sq + amps.log_b_minus_sq +
                                      qubit.log_weight(+1) + qubit.log_weight(-1));
  return {exp(log_v), log_v};
}

}  // namespace bifurcation
