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

#include "stoq/solvers.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <vector>

namespace stoq {
namespace {

constexpr int kMaxKnapsackDenominator = 10000;

void CheckUniverse(const SetFunction& f, const Domain& d, const Subset& allowed) {
  if (f.size() != d.size() || allowed.universe_size() != d.size()) {
    throw std::invalid_argument("objective, domain and allowed set must share "
                                "one universe");
  }
}

// Independence test for growing a solution; for bases the growth happens in
// the underlying matroid.
bool CanGrowTo(const Domain& d, uint64_t mask) {
  if (d.kind() == DomainKind::kMatroidBase) {
    return d.matroids().front().IsIndependent(mask);
  }
  return d.IsFeasible(mask);
}

// Greedy by marginal gain, smallest id on ties. For bases the result is then
// completed to a maximal independent subset of allowed.
Subset GreedySolve(const SetFunction& f, const Domain& d, const Subset& allowed) {
  uint64_t cur = 0;
  double value = f.EvaluateMask(0);
  while (true) {
    int best = -1;
    double best_value = value + kTolerance;
    for (uint64_t m = allowed.mask() & ~cur; m; m &= m - 1) {
      const int e = std::countr_zero(m);
      const uint64_t grown = cur | (uint64_t{1} << e);
      if (!CanGrowTo(d, grown)) continue;
      const double v = f.EvaluateMask(grown);
      if (v > best_value) {
        best_value = v;
        best = e;
      }
    }
    if (best < 0) break;
    cur |= uint64_t{1} << best;
    value = best_value;
  }
  if (d.kind() == DomainKind::kMatroidBase) {
    for (uint64_t m = allowed.mask() & ~cur; m; m &= m - 1) {
      const uint64_t bit = m & (~m + 1);
      if (CanGrowTo(d, cur | bit)) cur |= bit;
    }
  }
  return Subset::FromMask(d.size(), cur);
}

Subset LocalSearchSolve(const Solver& solver, const SetFunction& f,
                        const Domain& d, const Subset& allowed) {
  const int budget = solver.iterations
                         ? *solver.iterations
                         : LocalSearchIterations(allowed.size(), solver.epsilon_ls);
  Subset x(d.size());
  for (int it = 0; it < budget; ++it) {
    Subset next = LocalSearchStep(f, d, x, solver.k, allowed);
    if (next == x) break;
    x = next;
  }
  return x;
}

// Calls visit(T) for every T subset of `pool` with |T| <= k, by size and then
// lexicographically. Stops early if visit returns false.
template <typename Visit>
void ForEachSmallSubset(const std::vector<int>& pool, int k, Visit&& visit) {
  const int m = static_cast<int>(pool.size());
  std::vector<int> idx;
  for (int size = 0; size <= std::min(k, m); ++size) {
    idx.resize(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      uint64_t t = 0;
      for (int i : idx) t |= uint64_t{1} << pool[i];
      visit(t);
      int pos = size - 1;
      while (pos >= 0 && idx[pos] == m - size + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
}

double Load(std::span<const double> sizes, uint64_t mask) {
  double load = 0.0;
  for (uint64_t m = mask; m; m &= m - 1) load += sizes[std::countr_zero(m)];
  return load;
}

// Smallest D <= 10^4 with every size * D integral, or 0.
int CommonDenominator(std::span<const double> sizes, uint64_t items) {
  for (int den = 1; den <= kMaxKnapsackDenominator; ++den) {
    bool ok = true;
    for (uint64_t m = items; m && ok; m &= m - 1) {
      const double scaled = sizes[std::countr_zero(m)] * den;
      ok = std::abs(scaled - std::round(scaled)) <= 1e-7;
    }
    if (ok) return den;
  }
  return 0;
}

}  // namespace

std::string SolverKindName(SolverKind kind) {
  switch (kind) {
    case SolverKind::kBruteForce:
      return "brute-force";
    case SolverKind::kGreedy:
      return "greedy";
    case SolverKind::kLocalSearch:
      return "local-search-k-exchange";
    case SolverKind::kKnapsackDp:
      return "knapsack-dp";
    case SolverKind::kKnapsackEnumGreedy:
      return "knapsack-enum-greedy";
  }
  return "unknown";
}

nlohmann::json Solver::ToJson() const {
  nlohmann::json j{{"solver", SolverKindName(kind)}};
  if (kind == SolverKind::kLocalSearch) {
    j["k"] = k;
    j["epsilon_ls"] = epsilon_ls;
    if (iterations) j["iterations"] = *iterations;
  }
  return j;
}

Solver Solver::FromJson(const nlohmann::json& j) {
  const std::string name = j.at("solver").get<std::string>();
  Solver s;
  if (name == "brute-force") {
    s.kind = SolverKind::kBruteForce;
  } else if (name == "greedy") {
    s.kind = SolverKind::kGreedy;
  } else if (name == "local-search-k-exchange" || name == "local-search") {
    s.kind = SolverKind::kLocalSearch;
    s.k = j.value("k", 2);
    s.epsilon_ls = j.value("epsilon_ls", 0.1);
    if (j.contains("iterations")) s.iterations = j.at("iterations").get<int>();
    if (s.k < 1) throw std::invalid_argument("local search k must be >= 1");
    if (!(s.epsilon_ls > 0.0 && s.epsilon_ls < 1.0)) {
      throw std::invalid_argument("epsilon_ls must lie in (0, 1)");
    }
  } else if (name == "knapsack-dp") {
    s.kind = SolverKind::kKnapsackDp;
  } else if (name == "knapsack-enum-greedy") {
    s.kind = SolverKind::kKnapsackEnumGreedy;
  } else {
    throw std::invalid_argument("unknown solver '" + name + "'");
  }
  return s;
}

double DeclaredEta(const Solver& solver, const Domain& domain) {
  const DomainKind dk = domain.kind();
  auto incompatible = [&]() -> double {
    throw IncompatibleSolverError("solver " + SolverKindName(solver.kind) +
                                  " does not support domain " +
                                  DomainKindName(dk));
  };
  switch (solver.kind) {
    case SolverKind::kBruteForce:
      return 1.0;
    case SolverKind::kGreedy:
      switch (dk) {
        case DomainKind::kMatroidIndependent:
        case DomainKind::kMatroidBase:
        case DomainKind::kCardinality:
          return 0.5;
        case DomainKind::kIntersection:
          return 1.0 / (static_cast<double>(domain.matroids().size()) + 1.0);
        case DomainKind::kMatching:
        case DomainKind::kKSetPacking:
          return 1.0 / (domain.exchange_k() + 1.0);
        default:
          return incompatible();
      }
    case SolverKind::kLocalSearch:
      if ((dk == DomainKind::kMatching || dk == DomainKind::kKSetPacking) &&
          solver.k >= domain.exchange_k()) {
        return (1.0 - solver.epsilon_ls) / (domain.exchange_k() + 1.0);
      }
      return incompatible();
    case SolverKind::kKnapsackDp:
      if (dk == DomainKind::kKnapsack) return 1.0;
      return incompatible();
    case SolverKind::kKnapsackEnumGreedy:
      if (dk == DomainKind::kKnapsack) return 1.0 - std::exp(-1.0);
      return incompatible();
  }
  return incompatible();
}

int LocalSearchIterations(int n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("local search epsilon must lie in (0, 1)");
  }
  return static_cast<int>(std::ceil(n * std::log(1.0 / epsilon) - 1e-12));
}

Subset Solve(const Solver& solver, const SetFunction& f, const Domain& d,
             const Subset& allowed) {
  return Solve(solver, f, d, allowed, Subset(d.size()));
}

Subset Solve(const Solver& solver, const SetFunction& f, const Domain& d,
             const Subset& allowed, const Subset& avoid) {
  CheckUniverse(f, d, allowed);
  DeclaredEta(solver, d);
  switch (solver.kind) {
    case SolverKind::kBruteForce:
      return BruteForceSolve(f, d, allowed, avoid);
    case SolverKind::kGreedy:
      return GreedySolve(f, d, allowed);
    case SolverKind::kLocalSearch:
      return LocalSearchSolve(solver, f, d, allowed);
    case SolverKind::kKnapsackDp:
      return KnapsackSolveLinear(f, d.sizes(), allowed);
    case SolverKind::kKnapsackEnumGreedy:
      return KnapsackEnumGreedy(f, d.sizes(), allowed);
  }
  throw IncompatibleSolverError("unknown solver kind");
}

Subset BruteForceSolve(const SetFunction& f, const Domain& d,
                       const Subset& allowed, const Subset& avoid) {
  CheckUniverse(f, d, allowed);
  double best = -std::numeric_limits<double>::infinity();
  d.ForEachFeasible(allowed.mask(), [&](uint64_t s) {
    best = std::max(best, f.EvaluateMask(s));
  });
  if (best == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("no feasible subset of the allowed elements");
  }
  // Second pass: enumeration runs in lexicographic order, so the first set
  // seen with the fewest avoided members wins.
  uint64_t chosen = 0;
  int chosen_avoided = std::numeric_limits<int>::max();
  d.ForEachFeasible(allowed.mask(), [&](uint64_t s) {
    if (f.EvaluateMask(s) < best - kTolerance) return;
    const int avoided = std::popcount(s & avoid.mask());
    if (avoided < chosen_avoided) {
      chosen_avoided = avoided;
      chosen = s;
    }
  });
  return Subset::FromMask(d.size(), chosen);
}

Subset LocalSearchStep(const SetFunction& f, const Domain& d, const Subset& x,
                       int k, const Subset& allowed) {
  CheckUniverse(f, d, allowed);
  const std::vector<int> pool = x.members();
  double best_value = f.Evaluate(x) + kTolerance;
  uint64_t best = x.mask();
  for (uint64_t m = allowed.mask() & ~x.mask(); m; m &= m - 1) {
    const uint64_t added = x.mask() | (m & (~m + 1));
    ForEachSmallSubset(pool, k, [&](uint64_t t) {
      const uint64_t candidate = added & ~t;
      if (!d.IsFeasible(candidate)) return;
      const double v = f.EvaluateMask(candidate);
      if (v > best_value) {
        best_value = v;
        best = candidate;
      }
    });
  }
  return Subset::FromMask(d.size(), best);
}

Subset KnapsackSolveLinear(const SetFunction& f, std::span<const double> sizes,
                           const Subset& allowed) {
  const auto weights = f.ModularWeights();
  if (!weights) {
    throw IncompatibleSolverError("knapsack-dp needs a linear objective");
  }
  const int n = f.size();
  if (static_cast<int>(sizes.size()) != n || allowed.universe_size() != n) {
    throw std::invalid_argument("knapsack sizes do not match the objective");
  }
  // Items that cannot fit on their own never matter.
  uint64_t items = 0;
  for (uint64_t m = allowed.mask(); m; m &= m - 1) {
    const int e = std::countr_zero(m);
    if (sizes[e] <= 1.0 + kTolerance) items |= uint64_t{1} << e;
  }
  const int den = CommonDenominator(sizes, items);
  if (den == 0) {
    if (std::popcount(items) > kMaxEnumerationElements) {
      throw TooLargeError("knapsack sizes lack a small common denominator and "
                          "more than 22 items remain");
    }
    const Domain d = Domain::Knapsack(std::vector<double>(sizes.begin(), sizes.end()));
    return BruteForceSolve(f, d, Subset::FromMask(n, items), Subset(n));
  }
  std::vector<int> order;
  for (uint64_t m = items; m; m &= m - 1) order.push_back(std::countr_zero(m));
  const int count = static_cast<int>(order.size());
  // best[i][c]: max value from the first i items within capacity c.
  std::vector<std::vector<double>> best(count + 1,
                                        std::vector<double>(den + 1, 0.0));
  std::vector<std::vector<char>> take(count + 1, std::vector<char>(den + 1, 0));
  for (int i = 1; i <= count; ++i) {
    const int e = order[i - 1];
    const int w = static_cast<int>(std::lround(sizes[e] * den));
    for (int c = 0; c <= den; ++c) {
      best[i][c] = best[i - 1][c];
      if (w <= c && best[i - 1][c - w] + (*weights)[e] > best[i][c] + kTolerance) {
        best[i][c] = best[i - 1][c - w] + (*weights)[e];
        take[i][c] = 1;
      }
    }
  }
  Subset out(n);
  for (int i = count, c = den; i > 0; --i) {
    if (take[i][c]) {
      const int e = order[i - 1];
      out.insert(e);
      c -= static_cast<int>(std::lround(sizes[e] * den));
    }
  }
  return out;
}

Subset KnapsackEnumGreedy(const SetFunction& f, std::span<const double> sizes,
                          const Subset& allowed) {
  const int n = f.size();
  if (static_cast<int>(sizes.size()) != n || allowed.universe_size() != n) {
    throw std::invalid_argument("knapsack sizes do not match the objective");
  }
  std::vector<int> pool;
  for (Element e : allowed.members()) {
    if (sizes[e] <= 1.0 + kTolerance) pool.push_back(e);
  }
  uint64_t best = 0;
  double best_value = f.EvaluateMask(0);
  ForEachSmallSubset(pool, 3, [&](uint64_t seed) {
    double load = Load(sizes, seed);
    if (load > 1.0 + kTolerance) return;
    uint64_t cur = seed;
    double value = f.EvaluateMask(cur);
    while (true) {
      int pick = -1;
      double pick_density = 0.0, pick_value = 0.0;
      for (int e : pool) {
        const uint64_t bit = uint64_t{1} << e;
        if ((cur & bit) || load + sizes[e] > 1.0 + kTolerance) continue;
        const double v = f.EvaluateMask(cur | bit);
        const double density = (v - value) / sizes[e];
        if (v - value > kTolerance && density > pick_density) {
          pick = e;
          pick_density = density;
          pick_value = v;
        }
      }
      if (pick < 0) break;
      cur |= uint64_t{1} << pick;
      load += sizes[pick];
      value = pick_value;
    }
    if (value > best_value + kTolerance) {
      best_value = value;
      best = cur;
    }
  });
  return Subset::FromMask(n, best);
}

}  // namespace stoq
