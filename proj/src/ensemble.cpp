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

#include "bifurcation/ensemble.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace bifurcation {

std::string_view to_string(KappaDistribution d) {
  return d == KappaDistribution::Rademacher ? "rademacher" : "gaussian";
}

std::string_view to_string(DetectorMode m) {
  return m == DetectorMode::Symmetric ? "symmetric" : "asymmetric";
}

KappaDistribution parse_kappa_distribution(std::string_view s) {
  if (s == "rademacher") return KappaDistribution::Rademacher;
  if (s == "gaussian") return KappaDistribution::TruncatedGaussian;
  throw std::invalid_argument("unknown kappa distribution: " + std::string(s));
}

DetectorMode parse_detector_mode(std::string_view s) {
  if (s == "symmetric") return DetectorMode::Symmetric;
  if (s == "asymmetric") return DetectorMode::AsymmetricDetector;
  throw std::invalid_argument("unknown detector mode: " + std::string(s));
}

ModelParams ModelParams::make(std::int64_t n_steps, double kappa,
                              KappaDistribution dist, DetectorMode mode) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(kappa > 0.0 && kappa <= 0.5))
    throw std::invalid_argument("kappa must lie in (0, 0.5]");
  ModelParams p;
  p.n_steps_ = n_steps;
  p.kappa_ = kappa;
  p.xi_ = static_cast<double>(n_steps) * kappa * kappa;
  p.dist_ = dist;
  p.mode_ = mode;
  return p;
}

Engine make_engine(RngSeed s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed),
                    static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(s.stream_index),
                    static_cast<std::uint32_t>(s.stream_index >> 32)};
  return Engine(seq);
}

double aggregate_y(std::span<const double> kappas, const ModelParams& params) {
  if (kappas.size() != static_cast<std::size_t>(params.n_steps()))
    throw std::invalid_argument("microstate length does not match n_steps");
  double sum = 0.0;
  for (double k : kappas) sum += k;
  return sum / params.xi();
}

double aggregate_y(const Microstate& m, const ModelParams& params) {
  return aggregate_y(std::span<const double>(m.kappas), params);
}

double draw_truncated_kappa(Engine& rng, std::normal_distribution<double>& unit_normal,
                            double mean, double sd) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = mean + sd * unit_normal(rng);
    if (std::abs(x) < 1.0) return x;
  }
  throw std::runtime_error("degenerate kappa distribution");
}

double draw_truncated_kappa(Engine& rng, double mean, double sd) {
  std::normal_distribution<double> unit_normal;
  return draw_truncated_kappa(rng, unit_normal, mean, sd);
}

Microstate draw_microstate(const ModelParams& params, Engine& rng) {
  Microstate m;
  const auto n = static_cast<std::size_t>(params.n_steps());
  m.kappas.resize(n);
  const double kappa = params.kappa();
  if (params.kappa_dist() == KappaDistribution::Rademacher) {
    std::bernoulli_distribution coin(0.5);
    for (auto& k : m.kappas) k = coin(rng) ? kappa : -kappa;
  } else {
    std::normal_distribution<double> unit_normal;
    for (auto& k : m.kappas) k = draw_truncated_kappa(rng, unit_normal, 0.0, kappa);
  }
  m.y = aggregate_y(m, params);
  return m;
}

std::vector<Microstate> draw_ensemble(const ModelParams& params, RngSeed seed,
                                      std::size_t count, unsigned threads) {
  std::vector<Microstate> out(count);
  const std::size_t n_chunks = (count + kChunkSize - 1) / kChunkSize;
  detail::parallel_for_chunks(n_chunks, threads, [&](std::size_t c) {
    Engine rng = make_engine({seed.seed, seed.stream_index + c});
    const std::size_t end = std::min(count, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i)
      out[i] = draw_microstate(params, rng);
  });
  return out;
}

Moments sample_moments(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("need at least two samples for moments");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, ss / (n - 1.0)};
}

Moments ensemble_moments(std::span<const Microstate> samples) {
  std::vector<double> ys;
  ys.reserve(samples.size());
  for (const auto& m : samples) ys.push_back(m.y);
  return sample_moments(ys);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BIFURCATION_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace bifurcation
