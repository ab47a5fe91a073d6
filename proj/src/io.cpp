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

#include "bifurcation/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace bifurcation {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_records_csv(std::ostream& os, std::span<const TransitionRecord> records) {
  os << "y,outcome,weight,p_plus,log_w\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g\n", r.y,
                  r.outcome == Outcome::Plus ? 1 : -1, r.weight, r.p_plus, r.log_w);
    os << buf;
  }
}

json config_to_json(const SimConfig& c) {
  json e;
  if (const auto* p = std::get_if<ModelParams>(&c.ensemble)) {
    e = {{"kind", "microstates"},
         {"n_steps", p->n_steps()},
         {"kappa", p->kappa()},
         {"xi", p->xi()},
         {"kappa_dist", to_string(p->kappa_dist())},
         {"mode", to_string(p->mode())}};
  } else {
    const auto& g = std::get<GaussianLimit>(c.ensemble);
    e = {{"kind", "gaussian_limit"}, {"xi", g.xi}, {"mode", to_string(g.mode)}};
  }
  json j = {{"ensemble", e},
            {"psi_plus_sq", c.qubit.weight_plus()},
            {"psi_plus_arg", std::arg(c.qubit.psi_plus())},
            {"n_samples", c.n_samples},
            {"selection", to_string(c.selection)},
            {"proposal", to_string(c.proposal)},
            {"amplitude_form", to_string(c.amplitude_form)},
            {"null_interaction", c.null_interaction},
            {"seed", c.seed.seed},
            {"stream_index", c.seed.stream_index},
            {"histogram_bins", c.histogram_bins}};
  j["y_range"] = c.y_range ? json::array({c.y_range->first, c.y_range->second}) : json(nullptr);
  return j;
}

SimConfig config_from_json(const json& j) {
  try {
    SimConfig c;
    const auto& e = j.at("ensemble");
    const auto mode = parse_detector_mode(e.at("mode").get<std::string>());
    const auto kind = e.at("kind").get<std::string>();
    if (kind == "microstates") {
      c.ensemble = ModelParams::make(e.at("n_steps").get<std::int64_t>(),
                                     e.at("kappa").get<double>(),
                                     parse_kappa_distribution(e.at("kappa_dist").get<std::string>()),
                                     mode);
    } else if (kind == "gaussian_limit") {
      c.ensemble = GaussianLimit{e.at("xi").get<double>(), mode};
    } else {
      throw std::invalid_argument("unknown ensemble kind: " + kind);
    }
    c.qubit = QubitState<double>::from_weight(j.at("psi_plus_sq").get<double>(),
                                              j.value("psi_plus_arg", 0.0));
    c.n_samples = j.at("n_samples").get<std::size_t>();
    c.selection = parse_selection(j.at("selection").get<std::string>());
    c.proposal = parse_proposal(j.value("proposal", std::string("tilted")));
    c.amplitude_form = parse_amplitude_form(j.at("amplitude_form").get<std::string>());
    c.null_interaction = j.value("null_interaction", false);
    c.seed.seed = j.at("seed").get<std::uint64_t>();
    c.seed.stream_index = j.value("stream_index", std::uint64_t{0});
    c.histogram_bins = j.value("histogram_bins", std::size_t{40});
    if (j.contains("y_range") && !j["y_range"].is_null())
      c.y_range = std::pair{j["y_range"].at(0).get<double>(), j["y_range"].at(1).get<double>()};
    validate(c);
    return c;
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("malformed config: ") + ex.what());
  }
}

json summary_json(const SimResult& r, const SimConfig& c) {
  json j = {{"born_plus", r.born_plus},
            {"born_ci", r.born_ci_halfwidth},
            {"ess", r.ess},
            {"mean_w", r.mean_w},
            {"mean_w_se", r.mean_w_se},
            {"accepted_count", r.accepted_count},
            {"n_proposed", r.n_proposed},
            {"clamped_count", r.clamped_count},
            {"config_echo", config_to_json(c)}};
  if (r.ks_stat) j["ks_stat"] = *r.ks_stat;
  if (r.chi2) {
    j["chi2_stat"] = r.chi2->stat;
    j["chi2_dof"] = r.chi2->dof;
  }
  return j;
}

json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config_echo", m.config_echo},
          {"tool_version", m.tool_version},
          {"timestamp", m.timestamp},
          {"output_paths", m.output_paths}};
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_echo = j.at("config_echo");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    m.output_paths = j.at("output_paths").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("malformed manifest: ") + ex.what());
  }
}

std::string tool_version() { return BIFURCATION_LAB_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << contents;
    os.flush();
    if (!os) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bifurcation
