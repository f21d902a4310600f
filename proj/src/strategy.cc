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

#include "stoq/strategy.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stoq {
namespace {

void CheckScenario(const Domain& d, const ActivationScenario& scenario) {
  if (scenario.size() != d.size() ||
      scenario.active.universe_size() != d.size()) {
    throw std::invalid_argument("scenario and domain sizes differ");
  }
}

double Ratio(double realized, double omniscient) {
  if (omniscient < kTolerance) return 1.0;
  return realized / omniscient;
}

}  // namespace

void StrategyConfig::Validate() const {
  auto open_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
    }
  };
  open_unit(epsilon, "epsilon");
  open_unit(delta, "delta");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (eta && !(*eta > 0.0 && *eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1]");
  }
  if (n_override && *n_override < 1) {
    throw std::invalid_argument("round override must be >= 1");
  }
}

int ComputeRoundCount(const StrategyConfig& cfg, double eta) {
  cfg.Validate();
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1]");
  }
  const double spread = cfg.objective_kind == GuaranteeKind::kLinear
                            ? std::max(cfg.alpha, cfg.beta)
                            : cfg.alpha + cfg.beta;
  const double denom = cfg.alpha * std::min(2.0, spread) * eta * cfg.epsilon;
  const double n = 16.0 * std::log(1.0 / std::min(cfg.delta, cfg.epsilon)) / denom;
  // Guard against ceil(88.0000000001) style artifacts of the logarithm.
  const double rounded = std::round(n);
  const double c = std::abs(n - rounded) < 1e-9 ? rounded : std::ceil(n);
  if (c > 1e9) throw std::invalid_argument("round count overflows");
  return std::max(1, static_cast<int>(c));
}

int ComputeRoundCount(const StrategyConfig& cfg) {
  if (!cfg.eta) throw std::invalid_argument("round count needs eta");
  return ComputeRoundCount(cfg, *cfg.eta);
}

RestrictedObjective OptimisticObjective(const SetFunction& f,
                                        const KnowledgeState& ks) {
  return RestrictedObjective(f, ks.known_active | ks.unknown);
}

RestrictedObjective PessimisticObjective(const SetFunction& f,
                                         const KnowledgeState& ks) {
  return RestrictedObjective(f, ks.known_active);
}

nlohmann::json StrategyReport::ToJson() const {
  return {{"rounds_used", rounds_used},
          {"N", round_budget},
          {"queries_total", queries_total},
          {"queries_per_round", queries_per_round},
          {"realized", realized_value},
          {"omniscient", omniscient_value},
          {"ratio", ratio},
          {"final_solution", stoq::ToJson(final_solution)}};
}

double OmniscientValue(const SetFunction& f, const Domain& d,
                       const ActivationScenario& scenario,
                       const Subset& allowed) {
  CheckScenario(d, scenario);
  const RestrictedObjective fa(f, scenario.active);
  // Inactive elements contribute nothing, so searching only active ones
  // loses nothing on downward-closed domains and keeps enumeration small.
  const Subset search = d.downward_closed() ? allowed & scenario.active : allowed;
  const Subset best = BruteForceSolve(fa, d, search, Subset(d.size()));
  return fa.Evaluate(best);
}

StrategyReport RunAlgorithm1(const SetFunction& f, const Domain& d,
                             const Solver& solver,
                             const ActivationScenario& scenario,
                             const StrategyConfig& cfg) {
  return RunAlgorithm1(f, d, solver, scenario, cfg, Subset::Full(d.size()));
}

StrategyReport RunAlgorithm1(const SetFunction& f, const Domain& d,
                             const Solver& solver,
                             const ActivationScenario& scenario,
                             const StrategyConfig& cfg, const Subset& allowed) {
  CheckScenario(d, scenario);
  if (f.size() != d.size() || allowed.universe_size() != d.size()) {
    throw std::invalid_argument("objective, domain and allowed set differ");
  }
  cfg.Validate();
  const double eta = cfg.eta ? *cfg.eta : DeclaredEta(solver, d);
  StrategyReport rep;
  rep.round_budget = cfg.n_override ? *cfg.n_override : ComputeRoundCount(cfg, eta);
  QueryTranscript transcript(d.size());

  for (int t = 0; t < rep.round_budget; ++t) {
    const KnowledgeState ks = GetKnowledgeState(transcript);
    const RestrictedObjective opt = OptimisticObjective(f, ks);
    const Subset y = Solve(solver, opt, d, allowed, ks.known_inactive);
    const Subset fresh = y - transcript.queried();
    if (fresh.empty()) break;  // optimistic and pessimistic now agree
    transcript.ApplyRound(fresh, scenario);
    const KnowledgeState after = GetKnowledgeState(transcript);
    rep.trace.push_back({y, opt.Evaluate(y), fresh, after.known_active,
                         after.known_inactive});
    rep.queries_per_round.push_back(fresh.size());
  }

  const KnowledgeState ks = GetKnowledgeState(transcript);
  const RestrictedObjective pess = PessimisticObjective(f, ks);
  rep.final_solution = Solve(solver, pess, d, allowed, ks.known_active.complement());
  rep.pessimistic_value = pess.Evaluate(rep.final_solution);
  rep.realized_value = f.Evaluate(rep.final_solution & scenario.active &
                                  transcript.queried());
  rep.omniscient_value = OmniscientValue(f, d, scenario, allowed);
  rep.ratio = Ratio(rep.realized_value, rep.omniscient_value);
  rep.rounds_used = transcript.adaptivity();
  rep.queries_total = transcript.queries_total();
  rep.transcript = std::move(transcript);
  return rep;
}

StrategyReport RunAdaptiveLocalSearch(const SetFunction& f, const Domain& d,
                                      const ActivationScenario& scenario, int k,
                                      double epsilon_ls,
                                      std::optional<int> iterations) {
  CheckScenario(d, scenario);
  if (f.size() != d.size()) {
    throw std::invalid_argument("objective and domain sizes differ");
  }
  if (!d.downward_closed()) {
    throw IncompatibleSolverError("adaptive local search needs a downward-closed domain");
  }
  if (k < 1) throw std::invalid_argument("exchange size k must be >= 1");
  if (!(epsilon_ls > 0.0 && epsilon_ls < 1.0)) {
    throw std::invalid_argument("epsilon_ls must lie in (0, 1)");
  }
  StrategyReport rep;
  const int budget = iterations ? *iterations : LocalSearchIterations(d.size(), epsilon_ls);
  rep.round_budget = budget;
  QueryTranscript transcript(d.size());
  Subset x(d.size());
  int successes = 0;
  while (successes < budget) {
    const KnowledgeState ks = GetKnowledgeState(transcript);
    const Subset allowed = ks.known_inactive.complement();
    const Subset next = LocalSearchStep(f, d, x, k, allowed);
    if (next == x) break;
    const Subset added = next - x;
    const Subset fresh = added - transcript.queried();
    if (!fresh.empty()) {
      transcript.ApplyRound(fresh, scenario);
      rep.queries_per_round.push_back(fresh.size());
      if (!fresh.IsSubsetOf(transcript.revealed_active())) continue;
    }
    x = next;
    ++successes;
  }
  rep.final_solution = x;
  rep.realized_value = f.Evaluate(x & scenario.active & transcript.queried());
  rep.pessimistic_value = rep.realized_value;
  rep.omniscient_value = OmniscientValue(f, d, scenario, Subset::Full(d.size()));
  rep.ratio = Ratio(rep.realized_value, rep.omniscient_value);
  rep.rounds_used = transcript.adaptivity();
  rep.queries_total = transcript.queries_total();
  rep.transcript = std::move(transcript);
  return rep;
}

KnapsackCombinedReport RunKnapsackCombined(const SetFunction& f,
                                           const Domain& d,
                                           const Solver& light_solver,
                                           const ActivationScenario& scenario,
                                           const StrategyConfig& cfg) {
  if (d.kind() != DomainKind::kKnapsack) {
    throw std::invalid_argument("combined strategy needs a knapsack domain");
  }
  CheckScenario(d, scenario);
  const double p = scenario.p_min();
  Subset light(d.size());
  for (Element e = 0; e < d.size(); ++e) {
    if (d.sizes()[e] <= kHeavyThreshold + kTolerance) light.insert(e);
  }
  const Subset heavy = light.complement();

  KnapsackCombinedReport out;
  out.light.transcript = QueryTranscript(d.size());
  out.heavy.transcript = QueryTranscript(d.size());
  out.light.final_solution = Subset(d.size());
  out.heavy.final_solution = Subset(d.size());
  if (!light.empty()) {
    StrategyConfig c = cfg;
    c.alpha = p;
    c.beta = p;
    out.light = RunAlgorithm1(f, d, light_solver, scenario, c, light);
  }
  if (!heavy.empty()) {
    StrategyConfig c = cfg;
    c.alpha = p;
    c.beta = 1.0 - (1.0 - p) * (1.0 - p);
    c.eta = 1.0;
    out.heavy = RunAlgorithm1(f, d, Solver::BruteForce(), scenario, c, heavy);
  }
  out.light_won = heavy.empty() ||
                  (!light.empty() &&
                   out.light.realized_value >= out.heavy.realized_value);

  StrategyReport& rep = out.combined;
  const StrategyReport& best = out.light_won ? out.light : out.heavy;
  rep.final_solution = best.final_solution;
  rep.pessimistic_value = best.pessimistic_value;
  rep.realized_value = best.realized_value;
  rep.round_budget = std::max(out.light.round_budget, out.heavy.round_budget);

  // Both runs advance one round at a time side by side.
  QueryTranscript merged(d.size());
  const auto& lr = out.light.transcript.rounds();
  const auto& hr = out.heavy.transcript.rounds();
  for (size_t i = 0; i < std::max(lr.size(), hr.size()); ++i) {
    Subset round(d.size());
    if (i < lr.size()) round = round | lr[i];
    if (i < hr.size()) round = round | hr[i];
    merged.ApplyRound(round, scenario);
    rep.queries_per_round.push_back(round.size());
  }
  rep.rounds_used = merged.adaptivity();
  rep.queries_total = merged.queries_total();
  rep.transcript = std::move(merged);
  rep.omniscient_value = OmniscientValue(f, d, scenario, Subset::Full(d.size()));
  rep.ratio = Ratio(rep.realized_value, rep.omniscient_value);
  return out;
}

}  // namespace stoq
