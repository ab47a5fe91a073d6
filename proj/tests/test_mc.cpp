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
#include <limits>
#include <stdexcept>

#include "bifurcation/mc.hpp"

using namespace bifurcation;

namespace {

SimConfig limit_config(double xi, double plus_sq, std::size_t n, std::uint64_t seed) {
  SimConfig c;
  c.ensemble = GaussianLimit{xi};
  c.qubit = QubitState<double>::from_weight(plus_sq);
  c.n_samples = n;
  c.seed = {seed, 0};
  return c;
}

bool same_records(const SimResult& a, const SimResult& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.y != y.y || x.outcome != y.outcome || x.weight != y.weight || x.log_w != y.log_w)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("enum names round-trip") {
  for (auto s : {Selection::ImportanceWeighting, Selection::RejectionSampling})
    CHECK(parse_selection(to_string(s)) == s);
  for (auto p : {Proposal::RateTilted, Proposal::Ensemble}) CHECK(parse_proposal(to_string(p)) == p);
  for (auto f : {AmplitudeForm::ExactProduct, AmplitudeForm::ClosedForm})
    CHECK(parse_amplitude_form(to_string(f)) == f);
  CHECK_THROWS_AS(parse_selection("weighted"), std::invalid_argument);
}

TEST_CASE("validate") {
  auto c = limit_config(60.0, 0.5, 10, 1);
  CHECK_NOTHROW(validate(c));
  c.amplitude_form = AmplitudeForm::ExactProduct;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = limit_config(0.0, 0.5, 10, 1);
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = limit_config(1.0, 0.5, 0, 1);
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = limit_config(1.0, 0.5, 10, 1);
  c.y_range = std::pair{1.0, -1.0};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.y_range = std::pair{-1.0, 1.0};
  CHECK(histogram_range(c).second == 1.0);
}

TEST_CASE("pure initial state gives Born frequency one") {
  for (auto sel : {Selection::ImportanceWeighting, Selection::RejectionSampling}) {
    auto c = limit_config(60.0, 1.0, 5000, 3);
    c.selection = sel;
    const auto r = run_simulation(c);
    CHECK(r.born_plus == 1.0);
    CHECK(r.born_ci_halfwidth == 0.0);
  }
}

TEST_CASE("Born frequency at Xi = 60") {
  for (double p : {0.1, 0.7}) {
    const auto r = run_simulation(limit_config(60.0, p, 100000, 11));
    CHECK(std::abs(r.born_plus - p) <= r.born_ci_halfwidth);
    REQUIRE(r.ks_stat.has_value());
    CHECK(*r.ks_stat < 0.02);
    CHECK(std::abs(r.mean_w - 1.0) < 5.0 * r.mean_w_se);
    CHECK(r.ess > 0.3 * r.n_proposed);
  }
}

TEST_CASE("Born coverage over seeded repeats") {
  int misses = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = run_simulation(limit_config(60.0, 0.5, 20000, seed));
    if (std::abs(r.born_plus - 0.5) > r.born_ci_halfwidth) ++misses;
  }
  CHECK(misses <= 2);
}

TEST_CASE("bifurcation is sharp at Xi = 60") {
  const auto r = run_simulation(limit_config(60.0, 0.5, 50000, 5));
  std::size_t mixed = 0;
  for (const auto& rec : r.records)
    if (rec.p_plus > 1e-3 && rec.p_plus < 1.0 - 1e-3) ++mixed;
  CHECK(static_cast<double>(mixed) < 1e-3 * r.records.size());
}

TEST_CASE("null interaction leaves the ensemble unselected") {
  auto c = limit_config(1.0, 0.7, 50000, 8);
  c.null_interaction = true;
  const auto r = run_simulation(c);
  for (const auto& rec : r.records) CHECK(rec.weight == 1.0);
  CHECK(r.accepted_count == r.n_proposed);
  CHECK(std::abs(r.born_plus - 0.7) <= r.born_ci_halfwidth);
  REQUIRE(r.ks_stat.has_value());
  CHECK(*r.ks_stat < 1.63 / std::sqrt(50000.0));
  c.selection = Selection::RejectionSampling;
  CHECK(run_simulation(c).accepted_count == c.n_samples);
}

TEST_CASE("importance and rejection agree") {
  auto c = limit_config(60.0, 0.3, 100000, 21);
  const auto imp = run_simulation(c);
  c.selection = Selection::RejectionSampling;
  c.seed = {22, 0};
  const auto rej = run_simulation(c);
  CHECK(rej.clamped_count == 0);
  CHECK(rej.log_selection_bound == doctest::Approx(std::log(2.0 * 0.7)));
  const double born_sd = std::hypot(imp.born_ci_halfwidth, rej.born_ci_halfwidth) / 3.0;
  CHECK(std::abs(imp.born_plus - rej.born_plus) < 5.0 * born_sd);
  CHECK(std::abs(rej.mean_w - 1.0) < 5.0 * rej.mean_w_se);
  for (double z : density_z_scores(imp.histogram, rej.histogram)) CHECK(z <= 5.0);
}

TEST_CASE("results do not depend on the thread count") {
  auto c = limit_config(60.0, 0.5, 3 * kChunkSize + 17, 4);
  c.threads = 1;
  const auto one = run_simulation(c);
  c.threads = 3;
  CHECK(same_records(one, run_simulation(c)));
  c.selection = Selection::RejectionSampling;
  c.threads = 1;
  const auto rej = run_simulation(c);
  c.threads = 8;
  CHECK(same_records(rej, run_simulation(c)));
  c.seed.stream_index = 1;
  CHECK_FALSE(same_records(rej, run_simulation(c)));
}

TEST_CASE("asymmetric detector") {
  auto c = limit_config(20.0, 0.6, 100000, 31);
  c.ensemble = GaussianLimit{20.0, DetectorMode::AsymmetricDetector};
  for (auto sel : {Selection::ImportanceWeighting, Selection::RejectionSampling}) {
    c.selection = sel;
    const auto r = run_simulation(c);
    CHECK(std::abs(r.born_plus - 0.6) <= r.born_ci_halfwidth);
    REQUIRE(r.ks_stat.has_value());
    CHECK(*r.ks_stat < 0.02);
  }
}

TEST_CASE("Rademacher microstates at Xi = 5") {
  SimConfig c;
  c.ensemble = ModelParams::make(50000, 0.01);
  c.qubit = QubitState<double>::from_weight(0.4);
  c.n_samples = 50000;
  c.seed = {41, 0};
  for (auto form : {AmplitudeForm::ClosedForm, AmplitudeForm::ExactProduct}) {
    c.amplitude_form = form;
    const auto r = run_simulation(c);
    CHECK(std::abs(r.born_plus - 0.4) <= r.born_ci_halfwidth);
    CHECK(std::abs(r.mean_w - 1.0) < 5.0 * r.mean_w_se);
    CHECK_FALSE(r.ks_stat.has_value());
    REQUIRE(r.chi2.has_value());
    CHECK(r.chi2->dof > 10);
    // 99.9% point of chi-square with about 40 dof is below 75.
    CHECK(r.chi2->stat < 75.0);
    CHECK_THROWS_AS(ks_statistic(r, c), std::invalid_argument);
  }
}

TEST_CASE("truncated Gaussian microstates") {
  SimConfig c;
  c.ensemble = ModelParams::make(400, 0.1, KappaDistribution::TruncatedGaussian);
  c.qubit = QubitState<double>::from_weight(0.7, 0.3);
  c.n_samples = 40000;
  c.seed = {51, 0};
  for (auto form : {AmplitudeForm::ClosedForm, AmplitudeForm::ExactProduct}) {
    c.amplitude_form = form;
    for (auto sel : {Selection::ImportanceWeighting, Selection::RejectionSampling}) {
      c.selection = sel;
      const auto r = run_simulation(c);
      CHECK(std::abs(r.born_plus - 0.7) <= r.born_ci_halfwidth);
      CHECK(std::abs(r.mean_w - 1.0) < 5.0 * r.mean_w_se);
      CHECK(r.clamped_count == 0);
    }
  }
  c.amplitude_form = AmplitudeForm::ClosedForm;
  c.selection = Selection::ImportanceWeighting;
  CHECK(ks_statistic(run_simulation(c), c) < 0.02);
}

TEST_CASE("ensemble proposal agrees with the tilted proposal at moderate Xi") {
  auto c = limit_config(2.0, 0.7, 100000, 61);
  const auto tilted = run_simulation(c);
  c.proposal = Proposal::Ensemble;
  for (auto sel : {Selection::ImportanceWeighting, Selection::RejectionSampling}) {
    c.selection = sel;
    const auto r = run_simulation(c);
    const double sd = std::hypot(tilted.born_ci_halfwidth, r.born_ci_halfwidth) / 3.0;
    CHECK(std::abs(r.born_plus - tilted.born_plus) < 5.0 * sd);
    CHECK(std::abs(r.mean_w - 1.0) < 5.0 * r.mean_w_se);
    REQUIRE(r.ks_stat.has_value());
    CHECK(*r.ks_stat < 1.63 / std::sqrt(r.ess));
  }
}

TEST_CASE("born_estimate and weighted_points") {
  std::vector<TransitionRecord> recs(3);
  recs[0].outcome = Outcome::Plus;
  recs[0].log_weight = 1000.0;
  recs[1].outcome = Outcome::Minus;
  recs[1].log_weight = 1000.0 + std::log(3.0);
  recs[2].outcome = Outcome::Minus;
  recs[2].log_weight = -std::numeric_limits<double>::infinity();
  const auto pts = weighted_points(recs);
  CHECK(pts[1].weight == 1.0);
  CHECK(pts[0].weight == doctest::Approx(1.0 / 3.0));
  CHECK(pts[2].weight == 0.0);
  const auto b = born_estimate(recs);
  CHECK(b.freq_plus == doctest::Approx(0.25));
  CHECK(b.ess == doctest::Approx(1.6));
  CHECK_THROWS_AS(born_estimate(std::span<const TransitionRecord>{}), std::invalid_argument);
}

TEST_CASE("reference_cdf") {
  auto c = limit_config(4.0, 0.7, 10, 1);
  CHECK(reference_cdf(c, 1.0) == doctest::Approx(0.7 * 0.5 + 0.3 * 0.9999683287581669));
  c.null_interaction = true;
  CHECK(reference_cdf(c, 0.0) == 0.5);
  c.null_interaction = false;
  c.ensemble = GaussianLimit{4.0, DetectorMode::AsymmetricDetector};
  CHECK(reference_cdf(c, 0.0) == doctest::Approx(0.7 * 0.022750131948179195 + 0.3 * 0.5));
}
