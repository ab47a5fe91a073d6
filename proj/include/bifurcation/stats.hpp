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
#include <functional>
#include <span>
#include <vector>

namespace bifurcation {

struct WeightedPoint {
  double y = 0.0;
  double weight = 1.0;
};

/// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// sup_y |F_n(y) - F(y)| for the weight-normalized empirical CDF F_n.
/// Tied values are treated as one jump. Throws on empty input or zero weight.
double weighted_ks_distance(std::span<const WeightedPoint> points,
                            const std::function<double(double)>& cdf);

/// sum (O - E)^2 / E over bins with E > 0.
double pearson_statistic(std::span<const double> observed, std::span<const double> expected);

struct BinnedCounts {
  std::vector<double> observed;
  std::vector<double> expected;
};

/// Merges adjacent bins left to right until each group expects at least
/// `min_expected`; a short final group is folded into its predecessor.
BinnedCounts merge_sparse_bins(std::span<const double> observed,
                               std::span<const double> expected, double min_expected = 5.0);

// Weighted histogram on [lo, hi) with separate underflow/overflow tallies.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> weight;     // sum of weights per bin
  std::vector<double> weight_sq;  // sum of squared weights per bin
  std::vector<double> density;    // weight / (total_weight * width)
  std::vector<double> density_se;
  double underflow = 0.0;
  double underflow_sq = 0.0;
  double overflow = 0.0;
  double overflow_sq = 0.0;
  double total_weight = 0.0;
  double total_weight_sq = 0.0;
  std::size_t count = 0;

  std::size_t bins() const { return weight.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  /// Weighted mass fraction inside [a, b], summing whole bins whose centres fall inside.
  double mass_between(double a, double b) const;
};

/// Throws std::invalid_argument for empty input, bins == 0 or lo >= hi.
Histogram make_histogram(std::span<const WeightedPoint> points, std::size_t bins, double lo,
                         double hi);

/// Per-bin two-sample z scores |d_a - d_b| / sd for histograms on the same
/// edges. Each side's variance is the larger of its delta-method value and the
/// pooled-proportion value p(1 - p)/ESS, so an empty bin keeps a nonzero spread.
std::vector<double> density_z_scores(const Histogram& a, const Histogram& b);

struct ChiSquare {
  double stat = 0.0;
  int dof = 0;
};

/// Pearson test of a weighted histogram against a continuous CDF, tails
/// included as two extra cells. Each cell is rescaled by its mean weight so
/// that unit weights reduce to the ordinary Pearson statistic. Throws
/// std::invalid_argument for an all-empty histogram.
ChiSquare chi_square(const Histogram& h, const std::function<double(double)>& cdf);

}  // namespace bifurcation
