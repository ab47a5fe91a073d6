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

#include "bifurcation/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "bifurcation/analytic.hpp"
#include "bifurcation/log_math.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace bifurcation {

namespace {

constexpr std::size_t kPilotDraws = 1000;
constexpr std::uint64_t kPilotStream = std::numeric_limits<std::uint64_t>::max();
constexpr double kMaxClampFraction = 1e-4;
// Relative slack before a weight counts as exceeding the rejection bound.
constexpr double kBoundSlack = 1e-9;

struct ChunkOutput {
  std::vector<TransitionRecord> records;
  std::size_t clamped = 0;
  // Importance mode: running log-sum of weights and of squared weights.
  double log_sum_weight = -std::numeric_limits<double>::infinity();
  double log_sum_weight_sq = -std::numeric_limits<double>::infinity();
};

// Pilot bound for rejection from the initial ensemble itself:
// Y_cap = 1.5 max(1, max |Y| over the pilot draws).
double ensemble_rejection_bound(const SimConfig& config, const detail::CandidateSampler& s) {
  if (config.null_interaction) return 0.0;
  Engine rng = make_engine({config.seed.seed, kPilotStream});
  double y_max = 1.0;
  for (std::size_t i = 0; i < kPilotDraws; ++i)
    y_max = std::max(y_max, std::abs(s.draw_component(rng, detail::Component::Base).y));
  const double y_cap = 1.5 * y_max;
  const double xi = ensemble_xi(config.ensemble);
  // log(1 + x) <= x bounds the product form by e^{Xi Y}.
  double bound = config.amplitude_form == AmplitudeForm::ClosedForm ? xi * (y_cap - 0.5)
                                                                    : xi * y_cap;
  if (ensemble_mode(config.ensemble) == DetectorMode::AsymmetricDetector)
    bound = std::max(bound, 0.0);
  return bound;
}

}  // namespace

double ensemble_xi(const EnsembleSpec& e) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ModelParams>) return v.xi();
        else return v.xi;
      },
      e);
}

DetectorMode ensemble_mode(const EnsembleSpec& e) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ModelParams>) return v.mode();
        else return v.mode;
      },
      e);
}

bool ensemble_continuous(const EnsembleSpec& e) {
  const auto* p = std::get_if<ModelParams>(&e);
  return p == nullptr || p->kappa_dist() == KappaDistribution::TruncatedGaussian;
}

std::string_view to_string(Selection s) {
  return s == Selection::ImportanceWeighting ? "importance" : "rejection";
}
std::string_view to_string(Proposal p) {
  return p == Proposal::RateTilted ? "tilted" : "ensemble";
}
std::string_view to_string(AmplitudeForm f) {
  return f == AmplitudeForm::ExactProduct ? "exact" : "closed";
}

Selection parse_selection(std::string_view s) {
  if (s == "importance") return Selection::ImportanceWeighting;
  if (s == "rejection") return Selection::RejectionSampling;
  throw std::invalid_argument("unknown selection: " + std::string(s));
}
Proposal parse_proposal(std::string_view s) {
  if (s == "tilted") return Proposal::RateTilted;
  if (s == "ensemble") return Proposal::Ensemble;
  throw std::invalid_argument("unknown proposal: " + std::string(s));
}
AmplitudeForm parse_amplitude_form(std::string_view s) {
  if (s == "exact") return AmplitudeForm::ExactProduct;
  if (s == "closed") return AmplitudeForm::ClosedForm;
  throw std::invalid_argument("unknown amplitude form: " + std::string(s));
}

void validate(const SimConfig& config) {
  if (config.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (config.histogram_bins < 1) throw std::invalid_argument("histogram_bins must be >= 1");
  const double xi = ensemble_xi(config.ensemble);
  if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("xi must be > 0");
  if (std::holds_alternative<GaussianLimit>(config.ensemble) &&
      config.amplitude_form != AmplitudeForm::ClosedForm)
    throw std::invalid_argument("exact amplitudes need an explicit n_steps/kappa ensemble");
  if (config.y_range && !(config.y_range->first < config.y_range->second))
    throw std::invalid_argument("y_range must be well ordered");
}

std::pair<double, double> histogram_range(const SimConfig& config) {
  if (config.y_range) return *config.y_range;
  const auto g = default_grid(ensemble_xi(config.ensemble));
  return {g.y_min, g.y_max};
}

double log_tilted_weight_bound(const SimConfig& config) {
  const detail::CandidateSampler sampler(config);
  const auto& q = config.qubit;
  if (!sampler.tilted()) throw std::invalid_argument("no analytic bound without tilting");
  return std::numbers::ln2 + std::max(q.log_weight(+1) + sampler.log_amplitude_constant(+1),
                                      q.log_weight(-1) + sampler.log_amplitude_constant(-1));
}

SimResult run_simulation(const SimConfig& config) {
  validate(config);
  const detail::CandidateSampler sampler(config);
  const bool rejection = config.selection == Selection::RejectionSampling;

  double log_bound = 0.0;
  if (rejection) {
    log_bound = sampler.tilted() ? log_tilted_weight_bound(config)
                                 : ensemble_rejection_bound(config, sampler);
  }

  const std::size_t n = config.n_samples;
  const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkOutput> chunks(n_chunks);
  detail::parallel_for_chunks(n_chunks, resolve_threads(config.threads), [&](std::size_t c) {
    Engine rng = make_engine({config.seed.seed, config.seed.stream_index + c});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ChunkOutput& out = chunks[c];
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    out.records.reserve(end - c * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      const auto cand = sampler.draw(rng);
      const double log_w = log_rate_w(config.qubit, cand.amps);
      const double log_weight = log_w - cand.log_proposal_ratio;

      TransitionRecord rec;
      rec.y = cand.y;
      rec.log_w = log_w;
      if (rejection) {
        const double log_accept = log_weight - log_bound;
        if (log_accept > kBoundSlack) ++out.clamped;
        if (std::log(unit(rng)) >= log_accept) continue;
        rec.weight = 1.0;
        rec.log_weight = 0.0;
      } else {
        rec.log_weight = log_weight;
        rec.weight = std::exp(log_weight);
        out.log_sum_weight = log_add_exp(out.log_sum_weight, log_weight);
        out.log_sum_weight_sq = log_add_exp(out.log_sum_weight_sq, 2.0 * log_weight);
      }
      rec.p_plus = channel_probabilities(config.qubit, cand.amps).p_plus;
      rec.outcome = unit(rng) < rec.p_plus ? Outcome::Plus : Outcome::Minus;
      out.records.push_back(rec);
    }
  });

  SimResult result;
  result.n_proposed = n;
  double log_sum = -std::numeric_limits<double>::infinity();
  double log_sum_sq = -std::numeric_limits<double>::infinity();
  std::size_t total = 0;
  for (const auto& c : chunks) total += c.records.size();
  result.records.reserve(total);
  for (auto& c : chunks) {
    result.records.insert(result.records.end(), c.records.begin(), c.records.end());
    result.clamped_count += c.clamped;
    log_sum = log_add_exp(log_sum, c.log_sum_weight);
    log_sum_sq = log_add_exp(log_sum_sq, c.log_sum_weight_sq);
  }
  result.accepted_count = result.records.size();
  if (result.accepted_count == 0) throw std::runtime_error("no transitions at given parameters");
  if (static_cast<double>(result.clamped_count) > kMaxClampFraction * static_cast<double>(n))
    throw std::runtime_error("rejection bound exceeded for " +
                             std::to_string(result.clamped_count) + " candidates");

  // Estimates of <<w>> over the initial ensemble.
  const double dn = static_cast<double>(n);
  if (rejection) {
    result.log_selection_bound = log_bound;
    const double a = static_cast<double>(result.accepted_count) / dn;
    result.mean_w = a * std::exp(log_bound);
    result.mean_w_se = std::exp(log_bound) * std::sqrt(a * (1.0 - a) / dn);
  } else {
    result.mean_w = std::exp(log_sum - std::log(dn));
    const double m2 = std::exp(log_sum_sq - std::log(dn));
    const double var = std::max(m2 - result.mean_w * result.mean_w, 0.0);
    result.mean_w_se = n > 1 ? std::sqrt(var / (dn - 1.0)) : 0.0;
  }

  const auto born = born_estimate(result.records);
  result.born_plus = born.freq_plus;
  result.born_ci_halfwidth = born.ci_halfwidth;
  result.ess = born.ess;

  const auto [lo, hi] = histogram_range(config);
  result.histogram = accepted_y_histogram(result.records, config.histogram_bins, lo, hi);

  const auto cdf = [&config](double y) { return reference_cdf(config, y); };
  if (!ensemble_continuous(config.ensemble)) {
    result.chi2 = bifurcation::chi_square(result.histogram, cdf);
  } else if (result.records.size() >= 100 &&
             (config.amplitude_form == AmplitudeForm::ClosedForm || config.null_interaction)) {
    const auto points = weighted_points(result.records);
    result.ks_stat = weighted_ks_distance(points, cdf);
  }
  return result;
}

std::vector<WeightedPoint> weighted_points(std::span<const TransitionRecord> records) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) m = std::max(m, r.log_weight);
  std::vector<WeightedPoint> pts;
  pts.reserve(records.size());
  for (const auto& r : records) pts.push_back({r.y, std::exp(r.log_weight - m)});
  return pts;
}

BornEstimate born_estimate(std::span<const TransitionRecord> records) {
  if (records.empty()) throw std::invalid_argument("born_estimate of an empty result");
  const auto pts = weighted_points(records);
  double s = 0.0;
  double s2 = 0.0;
  double plus = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double w = pts[i].weight;
    s += w;
    s2 += w * w;
    if (records[i].outcome == Outcome::Plus) plus += w;
  }
  BornEstimate b;
  b.freq_plus = plus / s;
  b.ess = s * s / s2;
  b.ci_halfwidth = 3.0 * std::sqrt(b.freq_plus * (1.0 - b.freq_plus) / b.ess);
  return b;
}

Histogram accepted_y_histogram(std::span<const TransitionRecord> records, std::size_t bins,
                               double lo, double hi) {
  if (records.empty()) throw std::invalid_argument("histogram of an empty result");
  const auto pts = weighted_points(records);
  return make_histogram(pts, bins, lo, hi);
}

double reference_cdf(const SimConfig& config, double y) {
  const double xi = ensemble_xi(config.ensemble);
  if (config.null_interaction) return normal_cdf(std::sqrt(xi) * y);
  if (ensemble_mode(config.ensemble) == DetectorMode::AsymmetricDetector) {
    // Q = |psi_+|^2 Q_+ + |psi_-|^2 q when b_- = 1.
    const double s = std::sqrt(xi);
    return config.qubit.weight_plus() * normal_cdf(s * (y - 1.0)) +
           config.qubit.weight_minus() * normal_cdf(s * y);
  }
  return Q_cdf(y, xi, config.qubit);
}

double ks_statistic(const SimResult& result, const SimConfig& config) {
  if (!ensemble_continuous(config.ensemble))
    throw std::invalid_argument("KS undefined on lattice Y; use chi_square");
  if (config.amplitude_form != AmplitudeForm::ClosedForm)
    throw std::invalid_argument("KS reference requires closed-form amplitudes");
  if (result.records.size() < 100) throw std::invalid_argument("KS needs at least 100 records");
  return weighted_ks_distance(weighted_points(result.records),
                              [&config](double y) { return reference_cdf(config, y); });
}

ChiSquare chi_square(const Histogram& h, const QubitState<double>& qubit, double xi) {
  return bifurcation::chi_square(h, [&](double y) { return Q_cdf(y, xi, qubit); });
}

}  // namespace bifurcation
