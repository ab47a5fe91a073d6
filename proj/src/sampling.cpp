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

#include "sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "bifurcation/analytic.hpp"
#include "bifurcation/log_math.hpp"

namespace bifurcation::detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_normal_mass(double lo, double hi) {
  return std::log(normal_cdf(hi) - normal_cdf(lo));
}

}  // namespace

double log_truncated_exp_mean(double sd) {
  // E[e^x 1{|x|<1}] = e^{sd^2/2} P(|x - sd^2| < 1) for the untruncated normal.
  const double s2 = sd * sd;
  return 0.5 * s2 + log_normal_mass((-1.0 - s2) / sd, (1.0 - s2) / sd) -
         log_normal_mass(-1.0 / sd, 1.0 / sd);
}

CandidateSampler::CandidateSampler(const SimConfig& config)
    : form_(config.amplitude_form),
      mode_(ensemble_mode(config.ensemble)),
      null_(config.null_interaction),
      tilted_(config.proposal == Proposal::RateTilted && !config.null_interaction) {
  xi_ = ensemble_xi(config.ensemble);
  if (const auto* p = std::get_if<ModelParams>(&config.ensemble)) {
    n_steps_ = p->n_steps();
    kappa_ = p->kappa();
    kind_ = p->kappa_dist() == KappaDistribution::Rademacher ? Kind::RademacherCount
                                                             : Kind::GaussianVector;
    if (form_ == AmplitudeForm::ClosedForm) {
      log_norm_ = kind_ == Kind::RademacherCount ? std::log(std::cosh(kappa_))
                                                 : log_truncated_exp_mean(kappa_);
    }
  } else {
    kind_ = Kind::GaussianAggregate;
    if (form_ != AmplitudeForm::ClosedForm)
      throw std::invalid_argument("the Gaussian-limit ensemble has closed-form amplitudes only");
  }
}

double CandidateSampler::log_amplitude_constant(int sign) const {
  if (null_ || form_ == AmplitudeForm::ExactProduct) return 0.0;
  if (sign < 0 && mode_ == DetectorMode::AsymmetricDetector) return 0.0;
  if (kind_ == Kind::GaussianAggregate) return 0.0;
  return static_cast<double>(n_steps_) * log_norm_ - 0.5 * xi_;
}

double CandidateSampler::mixture_log_ratio(double log_t_plus, double log_t_minus) const {
  if (!tilted_) return 0.0;
  if (mode_ == DetectorMode::AsymmetricDetector) log_t_minus = 0.0;
  return log_add_exp(log_t_plus, log_t_minus) - std::numbers::ln2;
}

AmplitudePair<double> CandidateSampler::amplitudes_for(double y) const {
  return amplitudes_closed(y, null_ ? 0.0 : xi_, mode_);
}

Candidate CandidateSampler::draw(Engine& rng) const {
  if (!tilted_) return draw_component(rng, Component::Base);
  std::bernoulli_distribution coin(0.5);
  if (coin(rng)) return draw_component(rng, Component::TiltPlus);
  return draw_component(rng, mode_ == DetectorMode::AsymmetricDetector ? Component::Base
                                                                       : Component::TiltMinus);
}

Candidate CandidateSampler::draw_component(Engine& rng, Component c) const {
  switch (kind_) {
    case Kind::RademacherCount:
      return rademacher(rng, c);
    case Kind::GaussianVector:
      return gaussian_vector(rng, c);
    case Kind::GaussianAggregate:
      return gaussian_aggregate(rng, c);
  }
  return {};
}

Candidate CandidateSampler::rademacher(Engine& rng, Component c) const {
  // Y and both product amplitudes depend only on the number of +kappa steps.
  const bool exact = form_ == AmplitudeForm::ExactProduct;
  double p_up = 0.5;
  if (c != Component::Base) {
    p_up = exact ? 0.5 * (1.0 + kappa_) : logistic(2.0 * kappa_);
    if (c == Component::TiltMinus) p_up = 1.0 - p_up;
  }
  std::binomial_distribution<std::int64_t> binomial(n_steps_, p_up);
  const std::int64_t k = binomial(rng);
  const double sum = kappa_ * static_cast<double>(2 * k - n_steps_);

  Candidate out;
  out.y = sum / xi_;
  const auto product = amplitudes_exact_rademacher(k, n_steps_, kappa_, DetectorMode::Symmetric);
  if (null_) {
    out.amps = amplitudes_closed(out.y, 0.0, mode_);
  } else if (exact) {
    out.amps = amplitudes_exact_rademacher(k, n_steps_, kappa_, mode_);
  } else {
    out.amps = amplitudes_for(out.y);
  }
  if (tilted_) {
    const double lt_plus = exact ? product.log_b_plus_sq
                                 : sum - static_cast<double>(n_steps_) * log_norm_;
    const double lt_minus = exact ? product.log_b_minus_sq
                                  : -sum - static_cast<double>(n_steps_) * log_norm_;
    out.log_proposal_ratio = mixture_log_ratio(lt_plus, lt_minus);
  }
  return out;
}

Candidate CandidateSampler::gaussian_vector(Engine& rng, Component c) const {
  const bool exact = form_ == AmplitudeForm::ExactProduct;
  const double sign = c == Component::TiltMinus ? -1.0 : 1.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> z;
  double sum = 0.0;
  CompensatedSum<double> up;
  CompensatedSum<double> down;
  for (std::int64_t n = 0; n < n_steps_; ++n) {
    double x = 0.0;
    if (c == Component::Base) {
      x = draw_truncated_kappa(rng, z, 0.0, kappa_);
    } else if (exact) {
      // density proportional to (1 + x) phi(x) on |x| < 1; envelope 2 phi(x)
      int attempts = 0;
      for (;;) {
        x = draw_truncated_kappa(rng, z, 0.0, kappa_);
        if (unit(rng) * 2.0 < 1.0 + x) break;
        if (++attempts >= 1000) throw std::runtime_error("degenerate kappa distribution");
      }
      x *= sign;
    } else {
      x = draw_truncated_kappa(rng, z, sign * kappa_ * kappa_, kappa_);
    }
    sum += x;
    if (exact) {
      up.add(std::log1p(x));
      down.add(std::log1p(-x));
    }
  }

  const double log_up = up.value();
  const double log_down = down.value();
  Candidate out;
  out.y = sum / xi_;
  if (null_) {
    out.amps = amplitudes_closed(out.y, 0.0, mode_);
  } else if (exact) {
    out.amps.origin = AmplitudeForm::ExactProduct;
    out.amps.mode = mode_;
    out.amps.log_b_plus_sq = log_up;
    out.amps.log_b_minus_sq = mode_ == DetectorMode::Symmetric ? log_down : 0.0;
  } else {
    out.amps = amplitudes_for(out.y);
  }
  if (tilted_) {
    const double norm = static_cast<double>(n_steps_) * log_norm_;
    const double lt_plus = exact ? log_up : sum - norm;
    const double lt_minus = exact ? log_down : -sum - norm;
    out.log_proposal_ratio = mixture_log_ratio(lt_plus, lt_minus);
  }
  return out;
}

Candidate CandidateSampler::gaussian_aggregate(Engine& rng, Component c) const {
  const double center = c == Component::TiltPlus ? 1.0 : c == Component::TiltMinus ? -1.0 : 0.0;
  std::normal_distribution<double> normal(center, 1.0 / std::sqrt(xi_));
  Candidate out;
  out.y = normal(rng);
  out.amps = amplitudes_for(out.y);
  if (tilted_) {
    const double lt_plus = xi_ * (out.y - 0.5);
    const double lt_minus = xi_ * (-out.y - 0.5);
    out.log_proposal_ratio = mixture_log_ratio(lt_plus, lt_minus);
  }
  return out;
}

}  // namespace bifurcation::detail
