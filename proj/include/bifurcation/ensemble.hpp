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

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace bifurcation {

enum class KappaDistribution { Rademacher, TruncatedGaussian };
enum class DetectorMode { Symmetric, AsymmetricDetector };

std::string_view to_string(KappaDistribution d);
std::string_view to_string(DetectorMode m);
KappaDistribution parse_kappa_distribution(std::string_view s);
DetectorMode parse_detector_mode(std::string_view s);

// Shape of the apparatus ensemble: N steps, each contributing a factor
// 1 +- kappa_n with <kappa_n> = 0 and <kappa_n^2> = kappa^2.
class ModelParams {
 public:
  /// Throws std::invalid_argument unless n_steps >= 1 and kappa in (0, 0.5].
  static ModelParams make(std::int64_t n_steps, double kappa,
                          KappaDistribution dist = KappaDistribution::Rademacher,
                          DetectorMode mode = DetectorMode::Symmetric);

  std::int64_t n_steps() const { return n_steps_; }
  double kappa() const { return kappa_; }
  /// Xi = N kappa^2, computed once from the stored fields.
  double xi() const { return xi_; }
  KappaDistribution kappa_dist() const { return dist_; }
  DetectorMode mode() const { return mode_; }

  bool operator==(const ModelParams&) const = default;

 private:
  ModelParams() = default;
  std::int64_t n_steps_ = 1;
  double kappa_ = 0.1;
  double xi_ = 0.01;
  KappaDistribution dist_ = KappaDistribution::Rademacher;
  DetectorMode mode_ = DetectorMode::Symmetric;
};

struct Microstate {
  std::vector<double> kappas;
  double y = 0.0;
};

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
};

using Engine = std::mt19937_64;

/// Independent generator for one (seed, stream) pair.
Engine make_engine(RngSeed s);

/// Microstates drawn per substream when an ensemble is generated in chunks.
inline constexpr std::size_t kChunkSize = 4096;

/// Y = (1/Xi) sum kappa_n. Throws on length mismatch.
double aggregate_y(std::span<const double> kappas, const ModelParams& params);
double aggregate_y(const Microstate& m, const ModelParams& params);

/// One truncated-normal draw N(mean, sd^2) restricted to |x| < 1.
/// Throws std::runtime_error("degenerate kappa distribution") after 1000
/// rejected attempts.
double draw_truncated_kappa(Engine& rng, double mean, double sd);
/// Same, reusing a caller-owned standard normal so cached variates are not lost.
double draw_truncated_kappa(Engine& rng, std::normal_distribution<double>& unit_normal,
                            double mean, double sd);

Microstate draw_microstate(const ModelParams& params, Engine& rng);

/// `count` microstates; chunk c uses stream seed.stream_index + c, so the
/// result does not depend on `threads`.
std::vector<Microstate> draw_ensemble(const ModelParams& params, RngSeed seed,
                                      std::size_t count, unsigned threads = 1);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

/// Throws std::invalid_argument for fewer than two samples.
Moments sample_moments(std::span<const double> values);
Moments ensemble_moments(std::span<const Microstate> samples);

/// Worker count from an explicit request, falling back to the
/// BIFURCATION_LAB_THREADS environment variable, then 1.
unsigned resolve_threads(unsigned requested);

}  // namespace bifurcation
