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

#include "bifurcation/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bifurcation/amplitudes.hpp"
#include "bifurcation/diagramsum.hpp"
#include "bifurcation/ensemble.hpp"
#include "bifurcation/mc.hpp"
#include "bifurcation/transition.hpp"

namespace bifurcation {

namespace {

struct Tally {
  std::string name;
  bool pass = true;
  double worst = 0.0;
  double limit = 0.0;

  void record(double value) {
    if (!(value <= limit)) pass = false;
    if (!(value <= worst)) worst = value;
  }
  CheckResult result() const {
    std::ostringstream os;
    os << "worst " << worst << " (limit " << limit << ")";
    return {name, pass, os.str()};
  }
};

struct RandomCase {
  QubitState<double> qubit;
  double xi;
  double y;
  double g;
};

RandomCase draw_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Xi spans [1e-3, 1e3] log-uniformly; a quarter of the cases sit at 1e3.
  const double xi = unit(rng) < 0.25 ? 1e3 : std::pow(10.0, -3.0 + 6.0 * unit(rng));
  const double y = -2.0 + 4.0 * unit(rng);
  const double p = unit(rng);
  const double phase = 2.0 * M_PI * unit(rng);
  const double g = std::pow(10.0, -6.0 + 12.0 * unit(rng));
  return {QubitState<double>::from_weight(p, phase), xi, y, g};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, std::size_t trials) {
  trials = std::max<std::size_t>(trials, 1);
  std::mt19937_64 rng(seed);

  Tally trace{"trace_R_equals_w", true, 0.0, 1e-12};
  Tally purity{"purity_defect", true, 0.0, 1e-12};
  Tally normalized{"normalized_final_state_spectrum", true, 0.0, 1e-10};
  Tally channels{"channel_probabilities_sum", true, 0.0, 1e-12};
  Tally closed_product{"closed_form_amplitude_product", true, 0.0, 1e-12};
  Tally unitarity{"diagram_sum_unitarity", true, 0.0, 1e-12};
  Tally series{"truncated_series_bound", true, 0.0, 0.0};
  Tally finite{"log_space_finiteness", true, 0.0, 0.0};

  for (std::size_t t = 0; t < trials; ++t) {
    const auto c = draw_case(rng);
    const auto amps = amplitudes_closed(c.y, c.xi);

    const auto r = unnormalized_R_scaled(c.qubit, amps);
    const double tr = r.matrix.trace().real();
    const double log_w = log_rate_w(c.qubit, amps);
    trace.record(std::abs(std::expm1(std::log(tr) + r.log_scale - log_w)));
    purity.record(purity_defect(r.matrix) / (tr * tr));

    const auto rho = normalized_final_state(r);
    Eigen::SelfAdjointEigenSolver<DensityMatrix2<double>> eig(rho, Eigen::EigenvaluesOnly);
    const auto ev = eig.eigenvalues();
    normalized.record(std::max({std::abs(rho.trace().real() - 1.0), std::abs(ev(0)),
                                std::abs(ev(1) - 1.0)}));

    const auto p = channel_probabilities(c.qubit, amps);
    channels.record(std::abs(p.p_plus + p.p_minus - 1.0));
    closed_product.record(std::abs(amps.log_b_plus_sq + amps.log_b_minus_sq + c.xi));

    const auto split = full_split(c.qubit, c.xi, c.y, Couplings<double>::from_product(c.g));
    unitarity.record(std::abs(split.p_no_change + split.p_plus + split.p_minus - 1.0));

    const bool all_finite = std::isfinite(log_w) && std::isfinite(split.log_p_no_change) &&
                            std::isfinite(tr) && std::isfinite(p.log_p_plus) &&
                            std::isfinite(p.log_p_minus);
    finite.record(all_finite ? 0.0 : 1.0);

    // Rescale so roughly half of the cases land in the convergent regime.
    const double g_conv = std::exp(-log_channel_sum(c.qubit, c.xi, c.y)) * c.g / (1.0 + c.g);
    const auto s = truncated_no_change(c.qubit, c.xi, c.y, Couplings<double>::from_product(g_conv),
                                       10);
    if (s.converged) {
      const double err = std::abs(s.partial_sum - 1.0 / (1.0 + s.ratio));
      // Floating-point summation adds a few ulps on top of the analytic bound.
      series.record(std::max(0.0, err - truncation_bound(s.ratio, 10) - 8e-16));
    }
  }

  std::vector<CheckResult> out;
  for (const auto* tally : {&trace, &purity, &normalized, &channels, &closed_product, &unitarity,
                            &series, &finite})
    out.push_back(tally->result());

  // Rademacher product identity |b_+|^2 |b_-|^2 = (1 - kappa^2)^N.
  {
    Tally product{"exact_product_identity", true, 0.0, 1e-12};
    const auto params = ModelParams::make(400, 0.05);
    Engine engine = make_engine({seed, 1});
    const std::size_t n = std::min<std::size_t>(trials, 200);
    const double expected = 400.0 * std::log1p(-0.0025);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = amplitudes_exact(draw_microstate(params, engine), params);
      product.record(std::abs(std::expm1(a.log_b_plus_sq + a.log_b_minus_sq - expected)));
    }
    out.push_back(product.result());
  }

  // Xi = 0 null run: selection leaves the ensemble moments unchanged.
  {
    SimConfig cfg;
    cfg.ensemble = GaussianLimit{1.0, DetectorMode::Symmetric};
    cfg.qubit = QubitState<double>::from_weight(0.7);
    cfg.null_interaction = true;
    cfg.n_samples = std::clamp<std::size_t>(trials, 2000, 20000);
    cfg.seed = {seed, 0};
    const auto sim = run_simulation(cfg);
    std::vector<double> accepted;
    for (const auto& rec : sim.records) accepted.push_back(rec.y);
    const auto raw = ensemble_moments(draw_ensemble(ModelParams::make(100, 0.1,
                                                    KappaDistribution::TruncatedGaussian),
                                                    {seed, 1u << 20}, cfg.n_samples));
    const auto sel = sample_moments(accepted);
    const double n = static_cast<double>(cfg.n_samples);
    const double se_mean = std::sqrt(raw.variance / n + sel.variance / n);
    const double se_var = std::sqrt(2.0 * (raw.variance * raw.variance + sel.variance * sel.variance) / n);
    const double z = std::max(std::abs(sel.mean - raw.mean) / se_mean,
                              std::abs(sel.variance - raw.variance) / se_var);
    bool all_unit = true;
    for (const auto& rec : sim.records) all_unit = all_unit && rec.weight == 1.0;
    std::ostringstream os;
    os << "max z " << z << " (limit 5), unit weights " << (all_unit ? "yes" : "no");
    out.push_back({"null_interaction_no_selection", z <= 5.0 && all_unit, os.str()});
  }
  return out;
}

}  // namespace bifurcation
