// Copyright 2026 The Authors.
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

// stoq: run query-strategy experiments, certify exchange maps, and check
// instance axioms from JSON configs.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "stoq/experiment.h"

namespace {

using nlohmann::json;

json LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " +
                                e.what());
  }
}

// Writes to --out when given, stdout otherwise.
void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

struct CommonFlags {
  std::string config;
  std::optional<int> trials;
  std::optional<uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<int> threads;
};

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file")->required();
  cmd->add_option("--trials", f.trials, "Number of trials (or pairs)");
  cmd->add_option("--seed", f.seed, "64-bit seed");
  cmd->add_option("--out", f.out, "Output path (default stdout)");
  cmd->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", f.threads, "Worker threads");
}

int RunCommand(const CommonFlags& f) {
  json j = LoadConfig(f.config);
  if (f.trials) j["trials"] = *f.trials;
  if (f.seed) j["seed"] = *f.seed;
  if (!f.out.empty()) j["out"] = f.out;
  if (!f.format.empty()) j["format"] = f.format;
  if (f.threads) j["threads"] = *f.threads;
  const stoq::ExperimentConfig cfg = stoq::ExperimentConfig::FromJson(j);
  const stoq::ExperimentResult result = stoq::RunExperiment(cfg);
  std::ostringstream rows;
  stoq::WriteRows(result.rows, cfg.format, rows);
  Emit(cfg.out, rows.str());
  // Rows own stdout unless they went to a file.
  (cfg.out.empty() ? std::cerr : std::cout)
      << result.summary.ToJson().dump() << "\n";
  return 0;
}

int CertifyCommand(const CommonFlags& f) {
  json j = LoadConfig(f.config);
  if (f.trials) j["pairs"] = *f.trials;
  if (f.seed) j["seed"] = *f.seed;
  const std::string format = f.format.empty() ? j.value("format", "json") : f.format;
  j.erase("format");
  const auto rows = stoq::CertifyMapsCommand(j);
  std::ostringstream out;
  if (format == "csv") {
    out << "pair,kind,method,alpha_hat,beta_hat,target_alpha,target_beta,"
           "samples,radius,vacuous,gain_slack\n";
    for (const auto& r : rows) {
      const json row = r.ToJson();
      out << r.pair << "," << row["kind"].get<std::string>() << ","
          << row["method"].get<std::string>() << "," << row["alpha_hat"].dump()
          << "," << row["beta_hat"].dump() << "," << row["target_alpha"].dump()
          << "," << row["target_beta"].dump() << "," << row["samples"].dump()
          << "," << row["radius"].dump() << ","
          << (r.report.vacuous ? "true" : "false") << ","
          << (r.gain_slack ? row["gain_slack"].dump() : "") << "\n";
    }
  } else {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(r.ToJson());
    out << arr.dump(2) << "\n";
  }
  Emit(f.out, out.str());
  return 0;
}

int CheckCommandMain(const CommonFlags& f) {
  json j = LoadConfig(f.config);
  if (f.trials) j["pairs"] = *f.trials;
  if (f.seed) j["seed"] = *f.seed;
  const stoq::CheckResult r = stoq::CheckCommand(j);
  Emit(f.out, r.report.dump(2) + "\n");
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query strategies for stochastic submodular maximization"};
  app.require_subcommand(1);
  CommonFlags run_flags, certify_flags, check_flags;
  CLI::App* run = app.add_subcommand("run", "Run strategy experiments");
  CLI::App* certify = app.add_subcommand("certify", "Certify exchange maps");
  CLI::App* check = app.add_subcommand("check", "Check instance axioms");
  AddCommon(run, run_flags);
  AddCommon(certify, certify_flags);
  AddCommon(check, check_flags);
  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return RunCommand(run_flags);
    if (certify->parsed()) return CertifyCommand(certify_flags);
    return CheckCommandMain(check_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
