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

// Monotone submodular objectives and exhaustive checks of their axioms and of
// the two covering inequalities for product distributions.

#ifndef STOQ_OBJECTIVES_H_
#define STOQ_OBJECTIVES_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stoq/core.h"

namespace stoq {

// Anything that maps subsets of {0..n-1} to reals.
class SetFunction {
 public:
  virtual ~SetFunction() = default;

  virtual int size() const = 0;
  virtual double EvaluateMask(uint64_t mask) const = 0;

  // Per-element weights when the function is modular, std::nullopt otherwise.
  virtual std::optional<std::vector<double>> ModularWeights() const {
    return std::nullopt;
  }

  double Evaluate(const Subset& x) const;
};

enum class ObjectiveKind { kLinear, kCoverage, kTable };

std::string ObjectiveKindName(ObjectiveKind kind);

class Objective final : public SetFunction {
 public:
  // f(X) = sum of w_e over X. Weights must be nonnegative.
  static Objective Linear(std::vector<double> weights);

  // Element e covers the items listed in covers[e]; f(X) is the total weight
  // of items covered by some member of X. At most 64 items.
  static Objective Coverage(std::vector<std::vector<int>> covers,
                            std::vector<double> item_weights);

  // Unit item weights.
  static Objective Coverage(std::vector<std::vector<int>> covers,
                            int num_items);

  // Explicit value table indexed by subset mask, size 2^n with n <= 20. The
  // axioms are not enforced here; CheckAxioms reports them.
  static Objective Table(int n, std::vector<double> values);

  ObjectiveKind kind() const { return kind_; }
  int size() const override { return n_; }
  double EvaluateMask(uint64_t mask) const override;
  std::optional<std::vector<double>> ModularWeights() const override;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<uint64_t>& cover_masks() const { return cover_masks_; }
  const std::vector<double>& item_weights() const { return item_weights_; }
  int num_items() const { return static_cast<int>(item_weights_.size()); }

  nlohmann::json ToJson() const;
  static Objective FromJson(const nlohmann::json& j);

 private:
  Objective(ObjectiveKind kind, int n) : kind_(kind), n_(n) {}

  ObjectiveKind kind_;
  int n_;
  std::vector<double> weights_;       // linear
  std::vector<uint64_t> cover_masks_;  // coverage: items covered per element
  std::vector<double> item_weights_;   // coverage
  std::vector<double> table_;          // explicit
};

// X -> base(X & mask). The base must outlive the view.
class RestrictedObjective final : public SetFunction {
 public:
  RestrictedObjective(const SetFunction& base, Subset mask);

  int size() const override { return base_->size(); }
  double EvaluateMask(uint64_t mask) const override {
    return base_->EvaluateMask(mask & mask_.mask());
  }
  std::optional<std::vector<double>> ModularWeights() const override;

  const SetFunction& base() const { return *base_; }
  const Subset& mask() const { return mask_; }

 private:
  const SetFunction* base_;
  Subset mask_;
};

// f(X + e) - f(X). Throws if e is already in X.
double MarginalGain(const SetFunction& f, const Subset& x, Element e);

struct AxiomReport {
  bool normalized = false;
  bool monotone = false;
  bool submodular = false;

  bool all() const { return normalized && monotone && submodular; }
};

inline constexpr int kMaxAxiomCheckElements = 20;
inline constexpr int kMaxExpectationElements = 15;

// Exhaustive check. Monotonicity and submodularity are verified in marginal
// form: f(X+e) >= f(X), and f(X+e) - f(X) >= f(X+e+e') - f(X+e') for all X
// and distinct e, e' outside X (equivalent to the gain of e shrinking along
// every chain X subset Y). Throws TooLargeError beyond 20 elements.
AxiomReport CheckAxioms(const SetFunction& f);

// E[f(S)] where S includes each e independently with probability q_e.
double ProductExpectation(const SetFunction& f, std::span<const double> q);

// E[f(S)] - alpha * f(E) for S drawn with marginals q_e >= alpha. Throws if a
// marginal is below alpha or the universe exceeds 15 elements.
double VerifyCoveringLemma(const SetFunction& f, std::span<const double> q,
                           double alpha);
double VerifyCoveringLemma(const SetFunction& f, double alpha);

// beta * f(E) - E[f(E) - f(E \ T)] for T drawn with marginals q_e <= beta.
double VerifyCoveringComplementLemma(const SetFunction& f,
                                     std::span<const double> q, double beta);
double VerifyCoveringComplementLemma(const SetFunction& f, double beta);

}  // namespace stoq

#endif  // STOQ_OBJECTIVES_H_
