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

#include "bifurcation/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bifurcation {

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double weighted_ks_distance(std::span<const WeightedPoint> points,
                            const std::function<double(double)>& cdf) {
  if (points.empty()) throw std::invalid_argument("KS distance of an empty sample");
  std::vector<WeightedPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) { return a.y < b.y; });
  double total = 0.0;
  for (const auto& p : sorted) total += p.weight;
  if (!(total > 0.0)) throw std::invalid_argument("KS distance with zero total weight");

  double d = 0.0;
  double below = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double y = sorted[i].y;
    double jump = 0.0;
    while (i < sorted.size() && sorted[i].y == y) jump += sorted[i++].weight;
    const double f = cdf(y);
    const double before = below / total;
    below += jump;
    const double after = below / total;
    d = std::max({d, std::abs(f - before), std::abs(after - f)});
  }
  return d;
}

double pearson_statistic(std::span<const double> observed, std::span<const double> expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("observed/expected size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return stat;
}

BinnedCounts merge_sparse_bins(std::span<const double> observed,
                               std::span<const double> expected, double min_expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("observed/expected size mismatch");
  BinnedCounts out;
  double o = 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected[i];
    if (e >= min_expected) {
      out.observed.push_back(o);
      out.expected.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (out.expected.empty()) {
      out.observed.push_back(o);
      out.expected.push_back(e);
    } else {
      out.observed.back() += o;
      out.expected.back() += e;
    }
  }
  return out;
}

double Histogram::mass_between(double a, double b) const {
  if (!(total_weight > 0.0)) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < bins(); ++i) {
    const double c = 0.5 * (edges[i] + edges[i + 1]);
    if (c >= a && c <= b) m += weight[i];
  }
  return m / total_weight;
}

Histogram make_histogram(std::span<const WeightedPoint> points, std::size_t bins, double lo,
                         double hi) {
  if (points.empty()) throw std::invalid_argument("histogram of an empty sample");
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (!(lo < hi)) throw std::invalid_argument("histogram range must be well ordered");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  h.weight.assign(bins, 0.0);
  h.weight_sq.assign(bins, 0.0);
  h.count = points.size();

  for (const auto& p : points) {
    h.total_weight += p.weight;
    h.total_weight_sq += p.weight * p.weight;
    if (p.y < lo) {
      h.underflow += p.weight;
      h.underflow_sq += p.weight * p.weight;
    } else if (p.y >= hi) {
      h.overflow += p.weight;
      h.overflow_sq += p.weight * p.weight;
    } else {
      auto i = static_cast<std::size_t>((p.y - lo) / width);
      i = std::min(i, bins - 1);
      while (i > 0 && p.y < h.edges[i]) --i;
      while (i + 1 < bins && p.y >= h.edges[i + 1]) ++i;
      h.weight[i] += p.weight;
      h.weight_sq[i] += p.weight * p.weight;
    }
  }

  h.density.assign(bins, 0.0);
  h.density_se.assign(bins, 0.0);
  if (h.total_weight > 0.0) {
    const double t = h.total_weight;
    for (std::size_t i = 0; i < bins; ++i) {
      const double frac = h.weight[i] / t;
      // Delta-method variance of the self-normalized bin fraction.
      const double var = (h.weight_sq[i] * (1.0 - frac) * (1.0 - frac) +
                          (h.total_weight_sq - h.weight_sq[i]) * frac * frac) /
                         (t * t);
      h.density[i] = frac / h.width(i);
      h.density_se[i] = std::sqrt(std::max(var, 0.0)) / h.width(i);
    }
  }
  return h;
}

std::vector<double> density_z_scores(const Histogram& a, const Histogram& b) {
  if (a.edges != b.edges) throw std::invalid_argument("histograms must share their edges");
  if (!(a.total_weight > 0.0) || !(b.total_weight > 0.0))
    throw std::invalid_argument("all-empty histogram");
  const double ess_a = a.total_weight * a.total_weight / a.total_weight_sq;
  const double ess_b = b.total_weight * b.total_weight / b.total_weight_sq;
  std::vector<double> z(a.bins());
  for (std::size_t i = 0; i < a.bins(); ++i) {
    const double fa = a.weight[i] / a.total_weight;
    const double fb = b.weight[i] / b.total_weight;
    const double pooled = (ess_a * fa + ess_b * fb) / (ess_a + ess_b);
    const double w = a.width(i);
    const double va = std::max(a.density_se[i] * a.density_se[i],
                               pooled * (1.0 - pooled) / ess_a / (w * w));
    const double vb = std::max(b.density_se[i] * b.density_se[i],
                               pooled * (1.0 - pooled) / ess_b / (w * w));
    const double d = std::abs(a.density[i] - b.density[i]);
    z[i] = d == 0.0 ? 0.0 : d / std::sqrt(va + vb);
  }
  return z;
}

ChiSquare chi_square(const Histogram& h, const std::function<double(double)>& cdf) {
  if (!(h.total_weight > 0.0)) throw std::invalid_argument("all-empty histogram");
  const std::size_t nb = h.bins();
  std::vector<double> w(nb + 2);
  std::vector<double> w2(nb + 2);
  std::vector<double> prob(nb + 2);
  w.front() = h.underflow;
  w2.front() = h.underflow_sq;
  prob.front() = cdf(h.edges.front());
  for (std::size_t i = 0; i < nb; ++i) {
    w[i + 1] = h.weight[i];
    w2[i + 1] = h.weight_sq[i];
    prob[i + 1] = cdf(h.edges[i + 1]) - cdf(h.edges[i]);
  }
  w.back() = h.overflow;
  w2.back() = h.overflow_sq;
  prob.back() = 1.0 - cdf(h.edges.back());

  const double n = static_cast<double>(h.count);
  const double mean_w = h.total_weight / n;
  // Cells without records borrow the sample-wide second-moment ratio.
  const double global_ratio = (h.total_weight_sq / h.total_weight) / mean_w;
  std::vector<double> observed(nb + 2);
  std::vector<double> expected(nb + 2);
  for (std::size_t i = 0; i < nb + 2; ++i) {
    const double ratio = w[i] > 0.0 ? (w2[i] / w[i]) / mean_w : global_ratio;
    observed[i] = n * (w[i] / h.total_weight) / ratio;
    expected[i] = n * std::max(prob[i], 0.0) / ratio;
  }
  const auto merged = merge_sparse_bins(observed, expected);
  return {pearson_statistic(merged.observed, merged.expected),
          static_cast<int>(merged.expected.size()) - 1};
}

}  // namespace bifurcation
