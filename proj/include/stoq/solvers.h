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

// Deterministic maximizers used inside the query strategy and as omniscient
// oracles. Every solver returns a feasible subset of `allowed`.

#ifndef STOQ_SOLVERS_H_
#define STOQ_SOLVERS_H_

#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "stoq/core.h"
#include "stoq/domains.h"
#include "stoq/objectives.h"

namespace stoq {

enum class SolverKind {
  kBruteForce,
  kGreedy,
  kLocalSearch,
  kKnapsackDp,
  kKnapsackEnumGreedy,
};

std::string SolverKindName(SolverKind kind);

// Raised when a solver kind cannot run on a domain kind (or objective).
class IncompatibleSolverError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Solver {
  SolverKind kind = SolverKind::kBruteForce;
  // Local search: largest removal set per move, and the iteration budget
  // ceil(n ln(1 / epsilon_ls)) unless `iterations` is given.
  int k = 2;
  double epsilon_ls = 0.1;
  std::optional<int> iterations;

  static Solver Of(SolverKind kind) {
    Solver s;
    s.kind = kind;
    return s;
  }
  static Solver BruteForce() { return Of(SolverKind::kBruteForce); }
  static Solver Greedy() { return Of(SolverKind::kGreedy); }
  static Solver LocalSearch(int k, double epsilon_ls) {
    Solver s = Of(SolverKind::kLocalSearch);
    s.k = k;
    s.epsilon_ls = epsilon_ls;
    return s;
  }
  static Solver KnapsackDp() { return Of(SolverKind::kKnapsackDp); }
  static Solver KnapsackEnumGreedy() { return Of(SolverKind::kKnapsackEnumGreedy); }

  nlohmann::json ToJson() const;
  static Solver FromJson(const nlohmann::json& j);
};

// Guaranteed approximation factor of `solver` on `domain` for monotone
// submodular objectives. Throws IncompatibleSolverError if the pairing is
// unsupported.
double DeclaredEta(const Solver& solver, const Domain& domain);

// ceil(n ln(1 / epsilon)).
int LocalSearchIterations(int n, double epsilon);

// Maximizes f over feasible subsets of `allowed`. Among solutions within
// kTolerance of the best value, brute force prefers the fewest members of
// `avoid`, then the lexicographically smallest member list.
Subset Solve(const Solver& solver, const SetFunction& f, const Domain& d,
             const Subset& allowed);
Subset Solve(const Solver& solver, const SetFunction& f, const Domain& d,
             const Subset& allowed, const Subset& avoid);

Subset BruteForceSolve(const SetFunction& f, const Domain& d,
                       const Subset& allowed, const Subset& avoid);

// Best move X + e - T with e in allowed \ X, T subset of X, |T| <= k, that is
// feasible and strictly improves f. Returns x itself when no move improves.
// Ties go to the smallest e, then the smallest T (by size, then
// lexicographically).
Subset LocalSearchStep(const SetFunction& f, const Domain& d, const Subset& x,
                       int k, const Subset& allowed);

// Exact knapsack (capacity 1) for a modular f. Uses a dynamic program over
// sizes scaled to integers when every size has a denominator up to 10^4, and
// exhaustive search over at most 22 allowed items otherwise.
Subset KnapsackSolveLinear(const SetFunction& f, std::span<const double> sizes,
                           const Subset& allowed);

// Partial enumeration over seeds of at most three items, each completed by
// density greedy. (1 - 1/e)-approximate for monotone submodular f.
Subset KnapsackEnumGreedy(const SetFunction& f, std::span<const double> sizes,
                          const Subset& allowed);

}  // namespace stoq

#endif  // STOQ_SOLVERS_H_
