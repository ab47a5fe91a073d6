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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/ensemble.hpp"
#include "bifurcation/stats.hpp"
#include "bifurcation/transition.hpp"

namespace bifurcation {

// Continuum limit of the ensemble at fixed Xi (N -> inf, kappa -> 0): Y is
// drawn directly from its normal law with variance 1/Xi. Only the closed-form
// amplitudes are defined here.
struct GaussianLimit {
  double xi = 1.0;
  DetectorMode mode = DetectorMode::Symmetric;
  bool operator==(const GaussianLimit&) const = default;
};

using EnsembleSpec = std::variant<ModelParams, GaussianLimit>;

double ensemble_xi(const EnsembleSpec& e);
DetectorMode ensemble_mode(const EnsembleSpec& e);
/// False only for Rademacher microstates, whose Y lives on a lattice.
bool ensemble_continuous(const EnsembleSpec& e);

enum class Selection { ImportanceWeighting, RejectionSampling };

// Where candidate microstates come from before rate selection. Ensemble draws
// from the initial ensemble itself; RateTilted draws from an equal mixture of
// the ensemble reweighted by each channel's squared amplitude, and carries the
// exact likelihood ratio in the record weight.
enum class Proposal { RateTilted, Ensemble };

enum class Outcome { Plus, Minus };

std::string_view to_string(Selection s);
std::string_view to_string(Proposal p);
std::string_view to_string(AmplitudeForm f);
Selection parse_selection(std::string_view s);
Proposal parse_proposal(std::string_view s);
AmplitudeForm parse_amplitude_form(std::string_view s);

struct SimConfig {
  EnsembleSpec ensemble = GaussianLimit{};
  QubitState<double> qubit = QubitState<double>::from_weight(0.5);
  std::size_t n_samples = 1000;
  Selection selection = Selection::ImportanceWeighting;
  Proposal proposal = Proposal::RateTilted;
  AmplitudeForm amplitude_form = AmplitudeForm::ClosedForm;
  // Sets b_+ = b_- = 1 (Xi = 0 in the amplitudes) while keeping the ensemble.
  bool null_interaction = false;
  RngSeed seed{};
  std::size_t histogram_bins = 40;
  // Empty means the default analytic grid range for the ensemble's Xi.
  std::optional<std::pair<double, double>> y_range;
  unsigned threads = 1;
};

/// Throws std::invalid_argument for inconsistent configurations.
void validate(const SimConfig& config);
std::pair<double, double> histogram_range(const SimConfig& config);

struct TransitionRecord {
  double y = 0.0;
  Outcome outcome = Outcome::Plus;
  double weight = 1.0;       // importance weight, 1 after rejection
  double p_plus = 0.0;
  double log_w = 0.0;        // log transition rate
  double log_weight = 0.0;   // log of `weight`, kept for extreme weights
};

struct BornEstimate {
  double freq_plus = 0.0;
  double ci_halfwidth = 0.0;  // 3 sigma
  double ess = 0.0;
};

struct SimResult {
  std::vector<TransitionRecord> records;
  std::size_t n_proposed = 0;
  std::size_t accepted_count = 0;
  std::size_t clamped_count = 0;
  double born_plus = 0.0;
  double born_ci_halfwidth = 0.0;
  double ess = 0.0;
  double mean_w = 0.0;
  double mean_w_se = 0.0;
  double log_selection_bound = 0.0;  // rejection mode only
  std::optional<double> ks_stat;
  std::optional<ChiSquare> chi2;
  Histogram histogram;
};

/// Draws config.n_samples candidate microstates, selects them by transition
/// rate and samples an outcome for each selected record. Deterministic in
/// config.seed for any thread count. Throws std::runtime_error("no
/// transitions at given parameters") when nothing is accepted.
SimResult run_simulation(const SimConfig& config);

/// Weighted frequency of Plus with a 3-sigma half-width from the effective
/// sample size. Throws std::invalid_argument for an empty record list.
BornEstimate born_estimate(std::span<const TransitionRecord> records);
inline BornEstimate born_estimate(const SimResult& r) { return born_estimate(r.records); }

/// Record weights rescaled by their maximum so extreme log weights stay finite.
std::vector<WeightedPoint> weighted_points(std::span<const TransitionRecord> records);

Histogram accepted_y_histogram(std::span<const TransitionRecord> records, std::size_t bins,
                               double lo, double hi);
inline Histogram accepted_y_histogram(const SimResult& r, std::size_t bins, double lo, double hi) {
  return accepted_y_histogram(r.records, bins, lo, hi);
}

/// CDF the accepted Y should follow: Q for interacting runs, q for the null run.
double reference_cdf(const SimConfig& config, double y);

/// Weighted KS distance of accepted Y from the reference CDF. Requires a
/// continuous ensemble, closed-form amplitudes and >= 100 records.
double ks_statistic(const SimResult& result, const SimConfig& config);

/// Pearson statistic of a histogram against bin-integrated Q at `xi`.
ChiSquare chi_square(const Histogram& h, const QubitState<double>& qubit, double xi);

/// Log of the analytic bound on importance weights under the rate-tilted
/// proposal: log 2 + max_j (log|psi_j|^2 + log c_j), where |b_j|^2 = c_j t_j.
double log_tilted_weight_bound(const SimConfig& config);

}  // namespace bifurcation
