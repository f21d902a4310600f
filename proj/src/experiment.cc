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

#include "stoq/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "stoq/path_multiset.h"

namespace stoq {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& msg) { throw std::invalid_argument(msg); }

template <typename T>
T Field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    Bad(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T Required(const json& j, const char* key) {
  if (!j.contains(key)) Bad(std::string("missing field '") + key + "'");
  return Field<T>(j, key, T{});
}

std::pair<double, double> Range(const json& j, const char* key,
                                std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
    Bad(std::string("field '") + key + "' must be [lo, hi]");
  }
  const double lo = r[0].get<double>();
  const double hi = r[1].get<double>();
  if (!(lo <= hi)) Bad(std::string("field '") + key + "' needs lo <= hi");
  return {lo, hi};
}

void CheckCount(int n, const char* what) {
  if (n < 0) Bad(std::string(what) + " must be nonnegative");
  if (n > kMaxInstanceElements) {
    throw TooLargeError(std::string(what) + " = " + std::to_string(n) +
                        " exceeds the cap of " +
                        std::to_string(kMaxInstanceElements) + " elements");
  }
}

double Probability(const json& j, const char* key, double fallback) {
  const double v = Field<double>(j, key, fallback);
  if (!(v >= 0.0 && v <= 1.0)) Bad(std::string(key) + " must lie in [0, 1]");
  return v;
}

std::vector<double> RandomWeights(int n, std::pair<double, double> range,
                                  RandomSource& rng) {
  if (range.first < 0.0) Bad("weights must be nonnegative");
  std::vector<double> w(n);
  for (double& x : w) x = rng.Uniform(range.first, range.second);
  return w;
}

std::vector<std::vector<int>> RandomCovers(int n, int items, double density,
                                           RandomSource& rng) {
  if (items < 1 || items > 64) Bad("coverage needs 1..64 items");
  std::vector<std::vector<int>> covers(n);
  for (auto& c : covers) {
    for (int i = 0; i < items; ++i) {
      if (rng.Bernoulli(density)) c.push_back(i);
    }
  }
  return covers;
}

// Default linear objective unless an "objective" object is given.
Objective MakeObjective(const json& spec, int n, RandomSource& rng) {
  if (!spec.contains("objective")) {
    return Objective::Linear(
        RandomWeights(n, Range(spec, "weight_range", {1.0, 10.0}), rng));
  }
  const json& o = spec.at("objective");
  if (!o.is_object()) Bad("'objective' must be an object");
  const std::string g = Field<std::string>(o, "generator", "");
  if (g == "random-coverage") {
    const int items = Field<int>(o, "items", 2 * std::max(n, 1));
    return Objective::Coverage(
        RandomCovers(n, items, Probability(o, "density", 0.3), rng), items);
  }
  if (g == "random-linear") {
    return Objective::Linear(
        RandomWeights(n, Range(o, "weight_range", {1.0, 10.0}), rng));
  }
  if (!g.empty()) Bad("unknown objective generator '" + g + "'");
  Objective f = Objective::FromJson(o);
  if (f.size() != n) Bad("objective size does not match the domain");
  return f;
}

std::vector<MatroidOracle> RandomPartitions(int n, int count, int blocks,
                                            std::pair<double, double> cap,
                                            RandomSource& rng) {
  if (blocks < 1) Bad("blocks must be >= 1");
  if (cap.first < 0) Bad("capacity_range must be nonnegative");
  std::vector<MatroidOracle> ms;
  for (int m = 0; m < count; ++m) {
    std::vector<int> block_of(n);
    for (int& b : block_of) b = static_cast<int>(rng.UniformInt(blocks));
    std::vector<int> caps(blocks);
    for (int& c : caps) {
      c = static_cast<int>(rng.UniformInt(static_cast<int64_t>(cap.first),
                                          static_cast<int64_t>(cap.second)));
    }
    ms.push_back(MatroidOracle::Partition(block_of, caps));
  }
  return ms;
}

std::string Format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

GuaranteeKind KindFor(const ExperimentConfig& cfg, const Instance& inst) {
  if (cfg.objective_kind) return *cfg.objective_kind;
  return inst.objective.kind() == ObjectiveKind::kLinear
             ? GuaranteeKind::kLinear
             : GuaranteeKind::kSubmodular;
}

std::vector<double> TrialProbs(const ExperimentConfig& cfg, int n) {
  if (!cfg.probs.empty()) {
    if (static_cast<int>(cfg.probs.size()) != n) {
      Bad("probs has " + std::to_string(cfg.probs.size()) +
          " entries for an instance of " + std::to_string(n) + " elements");
    }
    return cfg.probs;
  }
  return std::vector<double>(n, *cfg.p);
}

StrategyConfig MakeStrategyConfig(const ExperimentConfig& cfg,
                                  const Instance& inst, double p) {
  StrategyConfig sc;
  sc.epsilon = cfg.epsilon;
  sc.delta = cfg.delta;
  sc.objective_kind = KindFor(cfg, inst);
  const auto [a, b] = DefaultUniformity(inst.domain, p);
  sc.alpha = cfg.alpha.value_or(a);
  sc.beta = cfg.beta.value_or(b);
  sc.eta = cfg.eta;
  sc.n_override = cfg.n_override;
  return sc;
}

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "instance", "fixed_instance", "p", "probs", "epsilon", "delta",
      "strategy", "solver", "objective_kind", "alpha", "beta", "eta", "N",
      "k", "epsilon_ls", "threshold", "trials", "seed", "threads", "out",
      "format"};
  return keys;
}

}  // namespace

Instance GenerateInstance(const json& spec, RandomSource& rng) {
  if (!spec.is_object()) Bad("instance spec must be an object");
  const std::string g = Required<std::string>(spec, "generator");
  if (g == "random-graph-matching") {
    const int nv = Required<int>(spec, "n_vertices");
    if (nv < 0 || nv > 64) Bad("n_vertices must lie in [0, 64]");
    const double prob = Probability(spec, "edge_prob", 0.5);
    std::vector<Edge> edges;
    for (int u = 0; u < nv; ++u) {
      for (int v = u + 1; v < nv; ++v) {
        if (rng.Bernoulli(prob)) edges.emplace_back(u, v);
      }
    }
    CheckCount(static_cast<int>(edges.size()), "edge count");
    const int n = static_cast<int>(edges.size());
    Domain d = Domain::Matching(nv, std::move(edges));
    return {std::move(d), MakeObjective(spec, n, rng)};
  }
  if (g == "random-partition-matroid") {
    const int n = Required<int>(spec, "n");
    CheckCount(n, "n");
    auto ms = RandomPartitions(n, 1, Field<int>(spec, "blocks", 3),
                               Range(spec, "capacity_range", {1, 2}), rng);
    Domain d = Field<bool>(spec, "bases", false)
                   ? Domain::MatroidBase(ms.front())
                   : Domain::MatroidIndependent(ms.front());
    return {std::move(d), MakeObjective(spec, n, rng)};
  }
  if (g == "random-intersection") {
    const int n = Required<int>(spec, "n");
    CheckCount(n, "n");
    const int m = Field<int>(spec, "matroids", 2);
    if (m < 1) Bad("matroids must be >= 1");
    auto ms = RandomPartitions(n, m, Field<int>(spec, "blocks", 3),
                               Range(spec, "capacity_range", {1, 2}), rng);
    Domain d = Domain::Intersection(std::move(ms));
    return {std::move(d), MakeObjective(spec, n, rng)};
  }
  if (g == "random-knapsack") {
    const int n = Required<int>(spec, "n");
    CheckCount(n, "n");
    const auto range = Range(spec, "size_range", {0.05, 0.6});
    if (!(range.first > 0.0 && range.second <= 1.0)) {
      Bad("size_range must lie in (0, 1]");
    }
    std::vector<double> sizes(n);
    for (double& s : sizes) s = rng.Uniform(range.first, range.second);
    Domain d = Domain::Knapsack(std::move(sizes));
    return {std::move(d), MakeObjective(spec, n, rng)};
  }
  if (g == "random-coverage") {
    const int n = Required<int>(spec, "n");
    CheckCount(n, "n");
    const int items = Field<int>(spec, "items", 2 * std::max(n, 1));
    const int rank = Field<int>(spec, "rank", std::max(1, n / 2));
    auto covers = RandomCovers(n, items, Probability(spec, "density", 0.3), rng);
    return {Domain::Cardinality(n, rank),
            Objective::Coverage(std::move(covers), items)};
  }
  if (g == "random-k-set-packing") {
    const int n = Required<int>(spec, "n");
    CheckCount(n, "n");
    const int items = Field<int>(spec, "items", 2 * std::max(n, 1));
    const int size = Field<int>(spec, "set_size", 3);
    if (items < 1 || items > 64) Bad("items must lie in [1, 64]");
    if (size < 1 || size > items) Bad("set_size must lie in [1, items]");
    std::vector<std::vector<int>> sets(n);
    std::vector<int> pool(items);
    for (auto& s : sets) {
      for (int i = 0; i < items; ++i) pool[i] = i;
      for (int i = 0; i < size; ++i) {
        const int j = i + static_cast<int>(rng.UniformInt(items - i));
        std::swap(pool[i], pool[j]);
        s.push_back(pool[i]);
      }
      std::sort(s.begin(), s.end());
    }
    Domain d = Domain::KSetPacking(std::move(sets));
    return {std::move(d), MakeObjective(spec, n, rng)};
  }
  if (g == "explicit") {
    Domain d = Domain::FromJson(Required<json>(spec, "domain"));
    CheckCount(d.size(), "domain size");
    const int n = d.size();
    return {std::move(d), MakeObjective(spec, n, rng)};
  }
  Bad("unknown instance generator '" + g + "'");
}

std::string StrategyKindName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kAlgorithm1: return "algorithm1";
    case StrategyKind::kAdaptiveLocalSearch: return "adaptive-local-search";
    case StrategyKind::kKnapsackCombined: return "knapsack-combined";
  }
  return "unknown";
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) Bad("config must be a JSON object");
  for (const auto& [key, unused] : j.items()) {
    if (!KnownKeys().count(key)) Bad("unknown config field '" + key + "'");
  }
  ExperimentConfig c;
  c.instance = Required<json>(j, "instance");
  c.fixed_instance = Field<bool>(j, "fixed_instance", false);
  if (j.contains("p")) c.p = Field<double>(j, "p", 0.5);
  c.probs = Field<std::vector<double>>(j, "probs", {});
  c.epsilon = Field<double>(j, "epsilon", c.epsilon);
  c.delta = Field<double>(j, "delta", c.delta);
  const std::string strategy = Field<std::string>(j, "strategy", "algorithm1");
  if (strategy == "algorithm1") {
    c.strategy = StrategyKind::kAlgorithm1;
  } else if (strategy == "adaptive-local-search") {
    c.strategy = StrategyKind::kAdaptiveLocalSearch;
  } else if (strategy == "knapsack-combined") {
    c.strategy = StrategyKind::kKnapsackCombined;
  } else {
    Bad("unknown strategy '" + strategy + "'");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    c.solver = Solver::FromJson(s.is_string() ? json{{"solver", s}} : s);
  }
  if (j.contains("objective_kind")) {
    const std::string k = Field<std::string>(j, "objective_kind", "");
    if (k == "linear") {
      c.objective_kind = GuaranteeKind::kLinear;
    } else if (k == "submodular") {
      c.objective_kind = GuaranteeKind::kSubmodular;
    } else {
      Bad("objective_kind must be linear or submodular");
    }
  }
  if (j.contains("alpha")) c.alpha = Field<double>(j, "alpha", 0.0);
  if (j.contains("beta")) c.beta = Field<double>(j, "beta", 0.0);
  if (j.contains("eta")) c.eta = Field<double>(j, "eta", 0.0);
  if (j.contains("N")) c.n_override = Field<int>(j, "N", 0);
  c.k = Field<int>(j, "k", c.k);
  c.epsilon_ls = Field<double>(j, "epsilon_ls", c.epsilon_ls);
  if (j.contains("threshold")) c.threshold = Field<double>(j, "threshold", 0.0);
  c.trials = Field<int>(j, "trials", c.trials);
  c.seed = Field<uint64_t>(j, "seed", c.seed);
  c.threads = Field<int>(j, "threads", c.threads);
  c.out = Field<std::string>(j, "out", "");
  const std::string fmt = Field<std::string>(j, "format", "csv");
  if (fmt == "csv") {
    c.format = OutputFormat::kCsv;
  } else if (fmt == "json") {
    c.format = OutputFormat::kJson;
  } else {
    Bad("format must be csv or json");
  }
  c.Validate();
  return c;
}

void ExperimentConfig::Validate() const {
  if (!instance.is_object()) Bad("instance spec must be an object");
  if (trials < 1) Bad("trials must be >= 1");
  if (threads < 1) Bad("threads must be >= 1");
  if (!p && probs.empty()) Bad("one of p or probs is required");
  if (p && !probs.empty()) Bad("give p or probs, not both");
  if (p && !(*p > 0.0 && *p <= 1.0)) Bad("p must lie in (0, 1]");
  if (!probs.empty()) {
    if (!fixed_instance) Bad("per-element probs need fixed_instance");
    ValidateProbabilities(probs);
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) Bad("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) Bad("delta must lie in (0, 1)");
  if (alpha && !(*alpha > 0.0)) Bad("alpha must be positive");
  if (beta && !(*beta > 0.0)) Bad("beta must be positive");
  if (eta && !(*eta > 0.0 && *eta <= 1.0)) Bad("eta must lie in (0, 1]");
  if (n_override && *n_override < 1) Bad("N must be >= 1");
  if (k < 1) Bad("k must be >= 1");
  if (!(epsilon_ls > 0.0 && epsilon_ls < 1.0)) Bad("epsilon_ls must lie in (0, 1)");
}

std::string ToCsvLine(const TrialRow& r) {
  return std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
         r.domain + "," + r.objective + "," + Format(r.p) + "," +
         Format(r.epsilon) + "," + Format(r.delta) + "," +
         std::to_string(r.n_rounds) + "," + std::to_string(r.rounds_used) +
         "," + std::to_string(r.queries_total) + "," + Format(r.realized) +
         "," + Format(r.omniscient) + "," + Format(r.ratio);
}

json ToJson(const TrialRow& r) {
  return {{"trial", r.trial},          {"seed", r.seed},
          {"domain", r.domain},        {"objective", r.objective},
          {"p", r.p},                  {"epsilon", r.epsilon},
          {"delta", r.delta},          {"N", r.n_rounds},
          {"rounds_used", r.rounds_used}, {"queries_total", r.queries_total},
          {"realized", r.realized},    {"omniscient", r.omniscient},
          {"ratio", r.ratio}};
}

json AggregateSummary::ToJson() const {
  return {{"trials", trials},
          {"mean_ratio", mean_ratio},
          {"min_ratio", min_ratio},
          {"threshold", threshold},
          {"success_probability", success_probability},
          {"mean_queries", mean_queries},
          {"mean_rounds", mean_rounds},
          {"wall_time_s", wall_time_s}};
}

AggregateSummary Summarize(const std::vector<TrialRow>& rows, double threshold) {
  AggregateSummary s;
  s.trials = static_cast<int>(rows.size());
  s.threshold = threshold;
  if (rows.empty()) return s;
  s.min_ratio = std::numeric_limits<double>::infinity();
  int successes = 0;
  for (const auto& r : rows) {
    s.mean_ratio += r.ratio;
    s.min_ratio = std::min(s.min_ratio, r.ratio);
    s.mean_queries += r.queries_total;
    s.mean_rounds += r.rounds_used;
    if (r.ratio >= threshold - kTolerance) ++successes;
  }
  const double n = static_cast<double>(rows.size());
  s.mean_ratio /= n;
  s.mean_queries /= n;
  s.mean_rounds /= n;
  s.success_probability = successes / n;
  return s;
}

std::pair<double, double> DefaultUniformity(const Domain& d, double p) {
  switch (d.kind()) {
    case DomainKind::kMatching:
    case DomainKind::kKSetPacking:
      return {p, p * std::max(d.exchange_k(), 1)};
    case DomainKind::kIntersection:
      return {p, p * static_cast<double>(d.matroids().size())};
    case DomainKind::kMatroidIndependent:
    case DomainKind::kMatroidBase:
    case DomainKind::kCardinality:
    case DomainKind::kKnapsack:
      return {p, p};
  }
  return {p, p};
}

double DefaultThreshold(const ExperimentConfig& cfg, const Instance& inst,
                        double p) {
  if (cfg.threshold) return *cfg.threshold;
  const GuaranteeKind kind = KindFor(cfg, inst);
  switch (cfg.strategy) {
    case StrategyKind::kAdaptiveLocalSearch:
      return (1.0 - cfg.epsilon_ls) / (cfg.k + 1);
    case StrategyKind::kKnapsackCombined: {
      if (kind == GuaranteeKind::kLinear) return (1.0 - cfg.epsilon) / 5.0;
      const double eta = cfg.eta.value_or(DeclaredEta(cfg.solver, inst.domain));
      return (1.0 - cfg.epsilon) * eta / (4.0 + 2.0 * eta);
    }
    case StrategyKind::kAlgorithm1: {
      const StrategyConfig sc = MakeStrategyConfig(cfg, inst, p);
      const double eta = cfg.eta.value_or(DeclaredEta(cfg.solver, inst.domain));
      const double spread = kind == GuaranteeKind::kLinear
                                ? std::max(sc.alpha, sc.beta)
                                : sc.alpha + sc.beta;
      return (1.0 - cfg.epsilon) * sc.alpha * eta / spread;
    }
  }
  return 0.0;
}

namespace {

struct TrialOutcome {
  TrialRow row;
  double threshold = 0.0;
};

TrialOutcome RunTrialImpl(const ExperimentConfig& cfg, int trial) {
  const RandomSource root(cfg.seed);
  const RandomSource trial_rng = root.Child(static_cast<uint64_t>(trial));
  RandomSource instance_rng = cfg.fixed_instance ? root.Child("instance")
                                                 : trial_rng.Child("instance");
  const Instance inst = GenerateInstance(cfg.instance, instance_rng);
  const std::vector<double> probs = TrialProbs(cfg, inst.domain.size());
  RandomSource activation_rng = trial_rng.Child("activation");
  const ActivationScenario scenario = SampleActivation(probs, activation_rng);
  const double p = cfg.p ? *cfg.p : scenario.p_min();

  StrategyReport rep;
  switch (cfg.strategy) {
    case StrategyKind::kAlgorithm1:
      rep = RunAlgorithm1(inst.objective, inst.domain, cfg.solver, scenario,
                          MakeStrategyConfig(cfg, inst, scenario.p_min()));
      break;
    case StrategyKind::kAdaptiveLocalSearch:
      rep = RunAdaptiveLocalSearch(inst.objective, inst.domain, scenario,
                                   cfg.k, cfg.epsilon_ls);
      break;
    case StrategyKind::kKnapsackCombined:
      rep = RunKnapsackCombined(inst.objective, inst.domain, cfg.solver,
                                scenario,
                                MakeStrategyConfig(cfg, inst, scenario.p_min()))
                .combined;
      break;
  }

  TrialOutcome out;
  TrialRow& r = out.row;
  r.trial = trial;
  r.seed = trial_rng.seed();
  r.domain = DomainKindName(inst.domain.kind());
  r.objective = ObjectiveKindName(inst.objective.kind());
  r.p = p;
  r.epsilon = cfg.epsilon;
  r.delta = cfg.delta;
  r.n_rounds = rep.round_budget;
  r.rounds_used = rep.rounds_used;
  r.queries_total = rep.queries_total;
  r.realized = rep.realized_value;
  r.omniscient = rep.omniscient_value;
  r.ratio = rep.ratio;
  out.threshold = DefaultThreshold(cfg, inst, scenario.p_min());
  return out;
}

}  // namespace

TrialRow RunTrial(const ExperimentConfig& cfg, int trial) {
  return RunTrialImpl(cfg, trial).row;
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (int t = next++; t < cfg.trials; t = next++) {
      try {
        outcomes[t] = RunTrialImpl(cfg, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = cfg.trials;
      }
    }
  };
  const int threads = std::min(cfg.threads, cfg.trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (auto& o : outcomes) result.rows.push_back(o.row);
  // Thresholds can differ per trial (k-set packing k varies); success is
  // judged per trial and the first trial's threshold is recorded.
  int successes = 0;
  for (const auto& o : outcomes) {
    if (o.row.ratio >= o.threshold - kTolerance) ++successes;
  }
  result.summary = Summarize(result.rows, outcomes.front().threshold);
  result.summary.success_probability =
      static_cast<double>(successes) / static_cast<double>(outcomes.size());
  result.summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

void WriteRows(const std::vector<TrialRow>& rows, OutputFormat format,
               std::ostream& out) {
  if (format == OutputFormat::kCsv) {
    out << kCsvHeader << "\n";
    for (const auto& r : rows) out << ToCsvLine(r) << "\n";
    return;
  }
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(ToJson(r));
  out << arr.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

json CertifyRow::ToJson() const {
  json j = report.ToJson();
  j["pair"] = pair;
  j["x"] = stoq::ToJson(x);
  j["y"] = stoq::ToJson(y);
  j["target_alpha"] = target_alpha;
  j["target_beta"] = target_beta;
  j["gain_slack"] = gain_slack ? json(*gain_slack) : json(nullptr);
  return j;
}

namespace {

ExchangeMapPtr BuildMapForPair(const std::string& kind, const Domain& d,
                               const Subset& x, const Subset& y, double p,
                               int h, int heavy_k) {
  if (kind == "trivial-k-exchange") {
    return BuildTrivialKExchangeMap(d, BuildKExchangeCertificate(d, x, y));
  }
  if (kind == "path-k-exchange") {
    const PathMultiset pm = BuildPathMultiset(BuildKExchangeCertificate(d, x, y), h);
    return BuildPathExchangeMap(d, pm, p);
  }
  if (kind == "matroid-rota") {
    if (d.kind() == DomainKind::kMatroidBase) {
      return BuildMatroidRotaMap(d.matroids().front(), RotaMode::kBase, x, y);
    }
    if (d.kind() == DomainKind::kMatroidIndependent) {
      return BuildMatroidRotaMap(d.matroids().front(), RotaMode::kIndependent, x, y);
    }
    Bad("matroid-rota needs a matroid domain");
  }
  if (kind == "composition") return BuildIntersectionMap(d, x, y);
  if (kind == "knapsack-light") {
    if (d.kind() != DomainKind::kKnapsack) Bad("knapsack-light needs a knapsack");
    return BuildKnapsackLightMap(d.sizes(), x, y);
  }
  if (kind == "knapsack-heavy") return BuildKnapsackHeavyMap(d, x, y, heavy_k);
  Bad("unknown map kind '" + kind + "'");
}

}  // namespace

std::vector<CertifyRow> CertifyMapsCommand(const json& cfg) {
  if (!cfg.is_object()) Bad("certify config must be a JSON object");
  const std::string kind = Required<std::string>(cfg, "map");
  const int pairs = Field<int>(cfg, "pairs", 20);
  const double p = Field<double>(cfg, "p", 0.5);
  const int h = Field<int>(cfg, "h", 1);
  const int64_t samples = Field<int64_t>(cfg, "samples", 100000);
  const uint64_t seed = Field<uint64_t>(cfg, "seed", 0);
  if (pairs < 1) Bad("pairs must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) Bad("p must lie in (0, 1]");

  const RandomSource root(seed);
  RandomSource instance_rng = root.Child("instance");
  const Instance inst = GenerateInstance(Required<json>(cfg, "instance"), instance_rng);
  const Domain& d = inst.domain;
  Subset pool = Subset::Full(d.size());
  if (kind == "knapsack-light") {
    pool = Subset(d.size());
    for (Element e = 0; e < d.size(); ++e) {
      if (d.sizes()[e] <= kHeavyThreshold + kTolerance) pool.insert(e);
    }
  }
  const std::vector<Subset> feasible = d.EnumerateFeasible(pool);
  int heavy_k = 0;
  for (const auto& s : feasible) heavy_k = std::max(heavy_k, s.size());
  heavy_k = std::max(heavy_k, 1);
  const GainBoundKind gain_kind = inst.objective.kind() == ObjectiveKind::kLinear
                                      ? GainBoundKind::kLinear
                                      : GainBoundKind::kSubmodular;

  std::vector<CertifyRow> rows;
  RandomSource pick = root.Child("pairs");
  for (int i = 0; i < pairs; ++i) {
    CertifyRow row;
    row.pair = i;
    row.x = feasible[pick.UniformInt(feasible.size())];
    row.y = feasible[pick.UniformInt(feasible.size())];
    const ExchangeMapPtr map = BuildMapForPair(kind, d, row.x, row.y, p, h, heavy_k);
    std::tie(row.target_alpha, row.target_beta) = map->TargetUniformity(p);
    const std::vector<double> probs(d.size(), p);
    if (map->enumerable() &&
        map->added_pool().size() <= kMaxExactCertifyElements) {
      row.report = CertifyUniformity(*map, probs);
      row.gain_slack = VerifyGainBound(*map, inst.objective, gain_kind, probs).slack;
    } else {
      RandomSource mc = root.Child("monte-carlo").Child(static_cast<uint64_t>(i));
      row.report = CertifyUniformityMonteCarlo(*map, probs, samples, mc);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CheckResult CheckCommand(const json& cfg) {
  if (!cfg.is_object()) Bad("check config must be a JSON object");
  const uint64_t seed = Field<uint64_t>(cfg, "seed", 0);
  const int pairs = Field<int>(cfg, "pairs", 10);
  const int h = Field<int>(cfg, "h", 1);
  const RandomSource root(seed);
  RandomSource instance_rng = root.Child("instance");
  const Instance inst = GenerateInstance(Required<json>(cfg, "instance"), instance_rng);
  const Domain& d = inst.domain;

  CheckResult out;
  json& rep = out.report;
  rep["domain"] = DomainKindName(d.kind());
  rep["objective"] = ObjectiveKindName(inst.objective.kind());
  rep["elements"] = d.size();
  if (d.size() <= kMaxAxiomCheckElements) {
    const AxiomReport a = CheckAxioms(inst.objective);
    rep["objective_axioms"] = {{"normalized", a.normalized},
                               {"monotone", a.monotone},
                               {"submodular", a.submodular}};
    out.ok = out.ok && a.all();
  }
  if (d.size() <= kMaxMatroidAxiomElements) {
    json ms = json::array();
    for (const auto& m : d.matroids()) {
      const bool ok = VerifyMatroidAxioms(m);
      ms.push_back(ok);
      out.ok = out.ok && ok;
    }
    if (!ms.empty()) rep["matroid_axioms"] = ms;
  }
  if (d.kind() == DomainKind::kMatching || d.kind() == DomainKind::kKSetPacking) {
    const std::vector<Subset> feasible = d.EnumerateFeasible(Subset::Full(d.size()));
    RandomSource pick = root.Child("pairs");
    int certificates_ok = 0;
    int multisets_ok = 0;
    json failures = json::array();
    for (int i = 0; i < pairs; ++i) {
      const Subset& x = feasible[pick.UniformInt(feasible.size())];
      const Subset& y = feasible[pick.UniformInt(feasible.size())];
      const KExchangeCertificate cert = BuildKExchangeCertificate(d, x, y);
      if ((y - x).size() <= kMaxCertificateCheckElements &&
          VerifyCertificate(d, cert).ok()) {
        ++certificates_ok;
      } else {
        failures.push_back({{"pair", i}, {"check", "certificate"}});
      }
      try {
        if (VerifyPathMultiset(BuildPathMultiset(cert, h)).ok()) ++multisets_ok;
      } catch (const ConstructionError& e) {
        failures.push_back(
            {{"pair", i}, {"check", "path-multiset"}, {"error", e.what()}});
      }
    }
    rep["pairs"] = pairs;
    rep["certificates_ok"] = certificates_ok;
    rep["path_multisets_ok"] = multisets_ok;
    rep["failures"] = failures;
    out.ok = out.ok && failures.empty();
  }
  rep["ok"] = out.ok;
  return out;
}

}  // namespace stoq
