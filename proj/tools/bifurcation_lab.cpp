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

// bifurcation_lab: command-line driver for the measurement-bifurcation model.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bifurcation/analytic.hpp"
#include "bifurcation/diagramsum.hpp"
#include "bifurcation/io.hpp"
#include "bifurcation/mc.hpp"
#include "bifurcation/verify.hpp"

namespace {

using namespace bifurcation;
using nlohmann::json;

constexpr int kUsageError = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SimulateFlags {
  double psi_plus_sq = 0.5;
  double psi_plus_arg = 0.0;
  std::optional<double> xi;
  std::optional<std::int64_t> n_steps;
  std::optional<double> kappa;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::string selection = "importance";
  std::string proposal = "tilted";
  std::optional<std::string> amp_form;
  std::optional<std::string> kappa_dist;
  std::string mode = "symmetric";
  bool null_interaction = false;
  std::size_t bins = 40;
  std::optional<double> y_min;
  std::optional<double> y_max;
  std::string out;
  std::string format = "both";
  unsigned threads = 0;
  std::string config_path;
};

SimConfig config_from_flags(const SimulateFlags& f) {
  SimConfig c;
  const auto mode = parse_detector_mode(f.mode);
  const bool microstates = f.n_steps.has_value() || f.kappa.has_value();
  if (f.xi && microstates) throw UsageError("--xi cannot be combined with --n-steps/--kappa");
  if (!f.xi && !microstates) throw UsageError("give either --xi or --n-steps with --kappa");
  if (microstates) {
    if (!f.n_steps || !f.kappa) throw UsageError("--n-steps and --kappa must be given together");
    c.ensemble = ModelParams::make(
        *f.n_steps, *f.kappa, parse_kappa_distribution(f.kappa_dist.value_or("rademacher")), mode);
    c.amplitude_form = parse_amplitude_form(f.amp_form.value_or("exact"));
  } else {
    if (f.kappa_dist && *f.kappa_dist != "gaussian")
      throw UsageError("--xi draws Y from its Gaussian limit; use --n-steps/--kappa for " +
                       *f.kappa_dist);
    if (f.amp_form && *f.amp_form != "closed")
      throw UsageError("--xi implies closed-form amplitudes; use --n-steps/--kappa for exact");
    c.ensemble = GaussianLimit{*f.xi, mode};
    c.amplitude_form = AmplitudeForm::ClosedForm;
  }
  c.qubit = QubitState<double>::from_weight(f.psi_plus_sq, f.psi_plus_arg);
  c.n_samples = f.samples;
  c.selection = parse_selection(f.selection);
  c.proposal = parse_proposal(f.proposal);
  c.null_interaction = f.null_interaction;
  c.seed = {f.seed, 0};
  c.histogram_bins = f.bins;
  if (f.y_min || f.y_max) {
    if (!f.y_min || !f.y_max) throw UsageError("--y-min and --y-max must be given together");
    c.y_range = std::pair{*f.y_min, *f.y_max};
  }
  validate(c);
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw UsageError("invalid JSON in " + path + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_simulate(const SimulateFlags& f) {
  SimConfig config;
  if (!f.config_path.empty()) {
    const json j = read_json_file(f.config_path);
    config = config_from_json(j.contains("config_echo") ? j.at("config_echo") : j);
  } else {
    config = config_from_flags(f);
  }
  config.threads = resolve_threads(f.threads);

  const auto result = run_simulation(config);
  const json summary = summary_json(result, config);

  RunManifest manifest{"simulate", config_to_json(config), tool_version(), utc_timestamp(), {}};
  if (f.format == "csv" || f.format == "both") {
    std::ostringstream os;
    write_records_csv(os, result.records);
    const std::string path = f.out + ".records.csv";
    atomic_write_file(path, os.str());
    manifest.output_paths.push_back(path);
  }
  if (f.format == "json" || f.format == "both") {
    const std::string path = f.out + ".summary.json";
    atomic_write_file(path, dump(summary));
    manifest.output_paths.push_back(path);
  }
  atomic_write_file(f.out + ".manifest.json", dump(to_json(manifest)));

  json brief = summary;
  brief.erase("config_echo");
  std::cout << brief.dump() << "\n";
  return 0;
}

struct AnalyticFlags {
  std::vector<double> xis;
  double psi_plus_sq = 0.5;
  std::optional<double> y_min;
  std::optional<double> y_max;
  std::optional<double> step;
  std::string out;
};

int cmd_analytic(const AnalyticFlags& f) {
  const auto qubit = QubitState<double>::from_weight(f.psi_plus_sq);
  struct Job {
    double xi;
    GridSpec grid;
    std::string path;
  };
  std::vector<Job> jobs;
  for (double xi : f.xis) {
    if (!(xi > 0.0)) throw UsageError("--xi must be > 0");
    GridSpec g = default_grid(xi);
    if (f.y_min) g.y_min = *f.y_min;
    if (f.y_max) g.y_max = *f.y_max;
    if (f.step) g.step = *f.step;
    uniform_grid(g.y_min, g.y_max, g.step);  // validates before any file is written
    char name[64];
    std::snprintf(name, sizeof name, "_xi%g.csv", xi);
    jobs.push_back({xi, g, f.out + name});
  }

  RunManifest manifest{"analytic", json::object(), tool_version(), utc_timestamp(), {}};
  manifest.config_echo["psi_plus_sq"] = f.psi_plus_sq;
  manifest.config_echo["profiles"] = json::array();
  for (const auto& job : jobs) {
    const auto profile = grid_profile(job.xi, qubit, job.grid);
    std::ostringstream os;
    write_profile_csv(os, profile);
    atomic_write_file(job.path, os.str());
    manifest.output_paths.push_back(job.path);
    manifest.config_echo["profiles"].push_back(
        {{"xi", job.xi}, {"y_min", job.grid.y_min}, {"y_max", job.grid.y_max},
         {"step", job.grid.step}});
    std::cout << json{{"xi", job.xi}, {"path", job.path}, {"mode_count", mode_count(profile)},
                      {"integral_Q", trapezoid(profile.grid, profile.Q)}}
                     .dump()
              << "\n";
  }
  atomic_write_file(f.out + ".manifest.json", dump(to_json(manifest)));
  return 0;
}

struct DiagramFlags {
  double xi = 0.0;
  double y = 0.0;
  double psi_plus_sq = 0.5;
  double g = 1.0;
  std::optional<std::int64_t> kmax;
};

int cmd_diagram(const DiagramFlags& f) {
  if (!(f.g >= 0.0) || !std::isfinite(f.g)) throw UsageError("--g must be a finite real >= 0");
  if (!(f.xi >= 0.0) || !std::isfinite(f.xi)) throw UsageError("--xi must be a finite real >= 0");
  if (!std::isfinite(f.y)) throw UsageError("--y must be finite");
  if (f.kmax && *f.kmax < 0) throw UsageError("--kmax must be >= 0");
  const auto qubit = QubitState<double>::from_weight(f.psi_plus_sq);
  const auto couplings = Couplings<double>::from_product(f.g);
  const auto s = full_split(qubit, f.xi, f.y, couplings);
  json j = {{"p_no_change", s.p_no_change},
            {"p_plus", s.p_plus},
            {"p_minus", s.p_minus},
            {"log_p_no_change", s.log_p_no_change},
            {"log_p_plus", s.log_p_plus},
            {"log_p_minus", s.log_p_minus},
            {"config_echo", {{"xi", f.xi}, {"y", f.y}, {"psi_plus_sq", f.psi_plus_sq}, {"g", f.g}}}};
  if (f.kmax) {
    const auto t = truncated_no_change(qubit, f.xi, f.y, couplings, *f.kmax);
    j["kmax"] = *f.kmax;
    j["partial_sum"] = t.partial_sum;
    j["converged"] = t.converged;
    j["gW"] = t.ratio;
    if (t.converged) j["truncation_bound"] = truncation_bound(t.ratio, *f.kmax);
  }
  // JSON has no -inf; absent channels are reported as null.
  for (const char* key : {"log_p_no_change", "log_p_plus", "log_p_minus"})
    if (!std::isfinite(j[key].get<double>())) j[key] = nullptr;
  std::cout << dump(j);
  return 0;
}

int cmd_verify(std::uint64_t seed, std::size_t trials) {
  bool all = true;
  for (const auto& r : run_invariant_suite(seed, trials)) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering-model simulator for measurement bifurcation"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble with rate selection");
  simulate->add_option("--psi-plus-sq", sim.psi_plus_sq, "|psi_+|^2")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--psi-plus-arg", sim.psi_plus_arg, "phase of psi_+ in radians");
  simulate->add_option("--xi", sim.xi, "Xi for the Gaussian-limit ensemble");
  simulate->add_option("--n-steps", sim.n_steps, "number of steps N");
  simulate->add_option("--kappa", sim.kappa, "per-step scale kappa");
  simulate->add_option("--samples", sim.samples, "candidate microstates")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--selection", sim.selection)
      ->check(CLI::IsMember({"importance", "rejection"}));
  simulate->add_option("--proposal", sim.proposal)->check(CLI::IsMember({"tilted", "ensemble"}));
  simulate->add_option("--amp-form", sim.amp_form)->check(CLI::IsMember({"exact", "closed"}));
  simulate->add_option("--kappa-dist", sim.kappa_dist)
      ->check(CLI::IsMember({"rademacher", "gaussian"}));
  simulate->add_option("--mode", sim.mode)->check(CLI::IsMember({"symmetric", "asymmetric"}));
  simulate->add_flag("--null-interaction", sim.null_interaction, "fix b_+ = b_- = 1");
  simulate->add_option("--bins", sim.bins, "histogram bins")->check(CLI::PositiveNumber);
  simulate->add_option("--y-min", sim.y_min);
  simulate->add_option("--y-max", sim.y_max);
  simulate->add_option("--out", sim.out, "output path prefix")->required();
  simulate->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json", "both"}));
  simulate->add_option("--threads", sim.threads, "worker threads (0: $BIFURCATION_LAB_THREADS)");
  simulate->add_option("--config", sim.config_path, "re-run from a manifest or summary JSON");

  AnalyticFlags ana;
  auto* analytic = app.add_subcommand("analytic", "tabulate q, Q, Q_+ and Q_- on a grid");
  analytic->add_option("--xi", ana.xis, "Xi (repeatable)")->required();
  analytic->add_option("--psi-plus-sq", ana.psi_plus_sq)->check(CLI::Range(0.0, 1.0));
  analytic->add_option("--y-min", ana.y_min);
  analytic->add_option("--y-max", ana.y_max);
  analytic->add_option("--step", ana.step);
  analytic->add_option("--out", ana.out, "output path prefix")->required();

  DiagramFlags dia;
  auto* diagram = app.add_subcommand("diagram", "all-orders no-change / channel split");
  diagram->add_option("--xi", dia.xi)->required();
  diagram->add_option("--y", dia.y)->required();
  diagram->add_option("--psi-plus-sq", dia.psi_plus_sq)->check(CLI::Range(0.0, 1.0));
  diagram->add_option("--g", dia.g, "|J|^2 |F|^2")->required();
  diagram->add_option("--kmax", dia.kmax, "also evaluate the series truncated at kmax");

  std::uint64_t verify_seed = 1;
  std::size_t verify_trials = 10000;
  auto* verify = app.add_subcommand("verify", "run the randomized invariant suite");
  verify->add_option("--seed", verify_seed);
  verify->add_option("--trials", verify_trials)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*analytic) return cmd_analytic(ana);
    if (*diagram) return cmd_diagram(dia);
    if (*verify) return cmd_verify(verify_seed, verify_trials);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
