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

// The query strategy: alternate optimistic solves with queries of the new
// elements of each solution, then solve the pessimistic problem. Also the
// one-query-per-round local-search baseline and the light/heavy knapsack
// combination.

#ifndef STOQ_STRATEGY_H_
#define STOQ_STRATEGY_H_

#include <optional>
#include <vector>

#include "json.hpp"
#include "stoq/core.h"
#include "stoq/domains.h"
#include "stoq/objectives.h"
#include "stoq/solvers.h"

namespace stoq {

enum class GuaranteeKind { kLinear, kSubmodular };

struct StrategyConfig {
  double epsilon = 0.25;
  double delta = 0.25;
  GuaranteeKind objective_kind = GuaranteeKind::kLinear;
  double alpha = 0.5;
  double beta = 0.5;
  // Solver factor used in N; the solver's declared factor when unset.
  std::optional<double> eta;
  std::optional<int> n_override;

  void Validate() const;
};

// Linear: ceil(16 ln(1/min(delta, eps)) / (alpha min(2, max(alpha, beta)) eta eps)).
// Submodular: same with min(2, alpha + beta).
int ComputeRoundCount(const StrategyConfig& cfg, double eta);
int ComputeRoundCount(const StrategyConfig& cfg);  // requires cfg.eta

// f restricted to known_active u unknown.
RestrictedObjective OptimisticObjective(const SetFunction& f,
                                        const KnowledgeState& ks);
// f restricted to known_active.
RestrictedObjective PessimisticObjective(const SetFunction& f,
                                         const KnowledgeState& ks);

struct RoundTrace {
  Subset solution;           // Y_t
  double optimistic_value;   // optimistic objective at Y_t
  Subset queried;            // elements newly queried this round
  Subset known_active;       // after the round
  Subset known_inactive;     // after the round
};

struct StrategyReport {
  int rounds_used = 0;
  int round_budget = 0;  // N
  int queries_total = 0;
  std::vector<int> queries_per_round;
  double pessimistic_value = 0.0;  // pessimistic objective at the output
  double realized_value = 0.0;     // f(X_N n A n Q)
  double omniscient_value = 0.0;   // max over feasible Z of f(Z n A)
  double ratio = 1.0;              // 1 when the omniscient value is 0
  Subset final_solution;
  QueryTranscript transcript{0};
  std::vector<RoundTrace> trace;

  nlohmann::json ToJson() const;
};

// Omniscient optimum max_Z f(Z n A) over feasible Z inside `allowed`, by
// brute force.
double OmniscientValue(const SetFunction& f, const Domain& d,
                       const ActivationScenario& scenario,
                       const Subset& allowed);

// Rounds solve the optimistic problem over `allowed`, preferring solutions
// without known-inactive elements among ties, and stop early once a round
// has nothing new to query. The output solves the pessimistic problem.
StrategyReport RunAlgorithm1(const SetFunction& f, const Domain& d,
                             const Solver& solver,
                             const ActivationScenario& scenario,
                             const StrategyConfig& cfg);
StrategyReport RunAlgorithm1(const SetFunction& f, const Domain& d,
                             const Solver& solver,
                             const ActivationScenario& scenario,
                             const StrategyConfig& cfg, const Subset& allowed);

// Local search from the empty set that queries each element it is about to
// add, one query per round, and skips elements found inactive. Stops after
// `iterations` (default ceil(n ln(1/epsilon_ls))) successful exchanges or
// when no improving move is left. Needs a downward-closed domain.
StrategyReport RunAdaptiveLocalSearch(const SetFunction& f, const Domain& d,
                                      const ActivationScenario& scenario,
                                      int k, double epsilon_ls,
                                      std::optional<int> iterations = {});

struct KnapsackCombinedReport {
  StrategyReport combined;
  StrategyReport light;
  StrategyReport heavy;
  bool light_won = true;
};

inline constexpr double kHeavyThreshold = 1.0 / 3.0;

// RunAlgorithm1 on the light items (size <= 1/3, uniformity (p, p)) with
// `light_solver`, and on the heavy items (uniformity (p, 1 - (1-p)^2)) with
// brute force; p is the smallest activation probability. Reports the better
// realized value, the union of queries, and as many rounds as the longer
// run, since both proceed side by side.
KnapsackCombinedReport RunKnapsackCombined(const SetFunction& f,
                                           const Domain& d,
                                           const Solver& light_solver,
                                           const ActivationScenario& scenario,
                                           const StrategyConfig& cfg);

}  // namespace stoq

#endif  // STOQ_STRATEGY_H_
