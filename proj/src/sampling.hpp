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

#include "bifurcation/mc.hpp"

namespace bifurcation::detail {

enum class Component { Base, TiltPlus, TiltMinus };

struct Candidate {
  double y = 0.0;
  AmplitudePair<double> amps;
  // log of (proposal density / initial-ensemble density) at this microstate.
  double log_proposal_ratio = 0.0;
};

// Draws candidate microstates for one SimConfig. Tilted components reweight
// the initial ensemble by t_+- (a normalized likelihood ratio), chosen so that
// |b_+-|^2 = c_+- t_+- for a constant c_+-.
class CandidateSampler {
 public:
  explicit CandidateSampler(const SimConfig& config);

  Candidate draw(Engine& rng) const;
  Candidate draw_component(Engine& rng, Component c) const;

  /// log c_+ and log c_-.
  double log_amplitude_constant(int sign) const;
  bool tilted() const { return tilted_; }

 private:
  enum class Kind { RademacherCount, GaussianVector, GaussianAggregate };

  Candidate rademacher(Engine& rng, Component c) const;
  Candidate gaussian_vector(Engine& rng, Component c) const;
  Candidate gaussian_aggregate(Engine& rng, Component c) const;
  AmplitudePair<double> amplitudes_for(double y) const;
  double mixture_log_ratio(double log_t_plus, double log_t_minus) const;

  Kind kind_;
  AmplitudeForm form_;
  DetectorMode mode_;
  bool null_;
  bool tilted_;
  std::int64_t n_steps_ = 0;
  double kappa_ = 0.0;
  double xi_ = 0.0;
  double log_norm_ = 0.0;  // per-step log normalizer of the closed-form tilt
};

/// log E[e^x] for x ~ N(0, sd^2) truncated to |x| < 1.
double log_truncated_exp_mean(double sd);

}  // namespace bifurcation::detail
