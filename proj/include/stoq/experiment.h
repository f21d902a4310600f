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

// Experiment plumbing behind the command-line tool: instance generators,
// JSON configuration, seeded trial orchestration, aggregation and output.

#ifndef STOQ_EXPERIMENT_H_
#define STOQ_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stoq/core.h"
#include "stoq/domains.h"
#include "stoq/exchange.h"
#include "stoq/objectives.h"
#include "stoq/solvers.h"
#include "stoq/strategy.h"

namespace stoq {

// Instances enumerate feasible sets by brute force, so they stay small.
inline constexpr int kMaxInstanceElements = 22;

struct Instance {
  Domain domain;
  Objective objective;
};

// Generators (key "generator"):
//   random-graph-matching   n_vertices, edge_prob, weight_range
//   random-partition-matroid n, blocks, capacity_range, weight_range
//   random-knapsack         n, size_range, weight_range
//   random-coverage         n, items, density, rank (cardinality domain)
//   random-k-set-packing    n, items, set_size, weight_range
//   random-intersection     n, matroids, blocks, capacity_range, weight_range
//   explicit                domain, objective (library JSON forms)
// An optional "objective" object replaces the default linear objective:
//   {"generator": "random-coverage", "items", "density"},
//   {"generator": "random-linear", "weight_range"}, or a library objective.
Instance GenerateInstance(const nlohmann::json& spec, RandomSource& rng);

enum class StrategyKind { kAlgorithm1, kAdaptiveLocalSearch, kKnapsackCombined };

std::string StrategyKindName(StrategyKind kind);

enum class OutputFormat { kCsv, kJson };

struct ExperimentConfig {
  nlohmann::json instance;
  bool fixed_instance = false;  // one instance for every trial
  std::optional<double> p;
  std::vector<double> probs;    // per element; needs fixed_instance
  double epsilon = 0.25;
  double delta = 0.25;
  StrategyKind strategy = StrategyKind::kAlgorithm1;
  Solver solver = Solver::BruteForce();
  std::optional<GuaranteeKind> objective_kind;  // from the objective if unset
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> eta;
  std::optional<int> n_override;
  int k = 2;                   // local-search exchange size
  double epsilon_ls = 0.1;
  std::optional<double> threshold;
  int trials = 1;
  uint64_t seed = 0;
  int threads = 1;
  std::string out;             // empty: stdout
  OutputFormat format = OutputFormat::kCsv;

  // Throws std::invalid_argument with a readable message.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  void Validate() const;
};

struct TrialRow {
  int trial = 0;
  uint64_t seed = 0;
  std::string domain;
  std::string objective;
  double p = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  int n_rounds = 0;  // N
  int rounds_used = 0;
  int queries_total = 0;
  double realized = 0.0;
  double omniscient = 0.0;
  double ratio = 0.0;
};

inline constexpr char kCsvHeader[] =
    "trial,seed,domain,objective,p,epsilon,delta,N,rounds_used,queries_total,"
    "realized,omniscient,ratio";

std::string ToCsvLine(const TrialRow& row);
nlohmann::json ToJson(const TrialRow& row);

struct AggregateSummary {
  int trials = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double threshold = 0.0;
  double success_probability = 0.0;  // fraction with ratio >= threshold
  double mean_queries = 0.0;
  double mean_rounds = 0.0;
  double wall_time_s = 0.0;          // excluded from determinism

  nlohmann::json ToJson() const;
};

AggregateSummary Summarize(const std::vector<TrialRow>& rows, double threshold);

// (alpha, beta) the analysis supplies for a domain at activation p.
std::pair<double, double> DefaultUniformity(const Domain& d, double p);

// Factor the strategy is expected to reach with probability 1 - delta.
double DefaultThreshold(const ExperimentConfig& cfg, const Instance& inst,
                        double p);

// Runs a single seeded trial; the same (cfg, trial) always yields the same row.
TrialRow RunTrial(const ExperimentConfig& cfg, int trial);

struct ExperimentResult {
  std::vector<TrialRow> rows;  // in trial order
  AggregateSummary summary;
};

ExperimentResult RunExperiment(const ExperimentConfig& cfg);

void WriteRows(const std::vector<TrialRow>& rows, OutputFormat format,
               std::ostream& out);

// Map certification over sampled feasible pairs. Config keys: map
// (trivial-k-exchange | path-k-exchange | matroid-rota | composition |
// knapsack-light | knapsack-heavy), instance, pairs, p, h, samples, seed.
struct CertifyRow {
  int pair = 0;
  Subset x;
  Subset y;
  UniformityReport report;
  double target_alpha = 0.0;
  double target_beta = 0.0;
  std::optional<double> gain_slack;  // enumerable maps only

  nlohmann::json ToJson() const;
};

std::vector<CertifyRow> CertifyMapsCommand(const nlohmann::json& cfg);

// Axiom and structure checks on an instance: objective axioms, matroid
// axioms, certificate and path-multiset checks on sampled pairs.
struct CheckResult {
  nlohmann::json report;
  bool ok = true;
};

CheckResult CheckCommand(const nlohmann::json& cfg);

}  // namespace stoq

#endif  // STOQ_EXPERIMENT_H_
