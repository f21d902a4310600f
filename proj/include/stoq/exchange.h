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

// Exchange maps between two feasible sets X and Y, and their certification.
//
// A map sends each activated R subset of Y \ X to an exchange (S(R), T(R))
// with S(R) subset of R, T(R) subset of X \ Y, and X + S(R) - T(R) in the
// gamma-fold union of the domain. Uniformity is measured under independent
// activation of Y \ X. The query strategy never calls these maps; they exist
// so the uniformity and gain bounds behind it can be checked on instances.

#ifndef STOQ_EXCHANGE_H_
#define STOQ_EXCHANGE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stoq/core.h"
#include "stoq/domains.h"
#include "stoq/objectives.h"
#include "stoq/path_multiset.h"

namespace stoq {

enum class ExchangeMapKind {
  kTrivialKExchange,
  kPathKExchange,
  kMatroidRota,
  kComposition,
  kKnapsackLight,
  kKnapsackHeavy,
};

std::string ExchangeMapKindName(ExchangeMapKind kind);

struct Exchange {
  Subset added;    // S(R)
  Subset removed;  // T(R)
};

struct WeightedExchange {
  double weight;
  Exchange exchange;
};

class ExchangeMap {
 public:
  ExchangeMap(Subset x, Subset y, int gamma);
  virtual ~ExchangeMap() = default;

  virtual ExchangeMapKind kind() const = 0;

  const Subset& x() const { return x_; }
  const Subset& y() const { return y_; }
  Subset added_pool() const { return y_ - x_; }
  Subset dropped_pool() const { return x_ - y_; }
  int gamma() const { return gamma_; }
  int universe_size() const { return x_.universe_size(); }

  // True when S(R) = R for every R and every internal draw.
  virtual bool selects_all() const { return true; }
  // False when the internal randomness is continuous.
  virtual bool enumerable() const { return true; }

  // Exact distribution of (S(R), T(R)) over the internal randomness. Weights
  // sum to 1. Throws std::logic_error when !enumerable().
  virtual std::vector<WeightedExchange> Outcomes(const Subset& r) const = 0;

  // One draw of the internal randomness.
  virtual Exchange Draw(const Subset& r, RandomSource& rng) const = 0;

  // Membership of an exchanged set in gamma * D.
  virtual bool IsMember(const Subset& exchanged) const = 0;

  // (alpha, beta) the construction is designed to achieve when every
  // element of Y \ X is active with probability p.
  virtual std::pair<double, double> TargetUniformity(double p) const = 0;

  Subset Apply(const Exchange& ex) const { return (x_ | ex.added) - ex.removed; }

 private:
  Subset x_;
  Subset y_;
  int gamma_;
};

using ExchangeMapPtr = std::shared_ptr<const ExchangeMap>;

// S(R) = R, T(R) = union of T_y over y in R. Targets (p, pk).
ExchangeMapPtr BuildTrivialKExchangeMap(const Domain& d,
                                        const KExchangeCertificate& cert);

// Draws a color class uniformly among 2h^2 n(k,2h), then keeps each path
// footprint S_i of that class with S_i inside R with probability
// p^{h - |S_i|}. Targets (p^h/h, (p^h/h)(k - 1 + 1/h)).
ExchangeMapPtr BuildPathExchangeMap(const Domain& d, const PathMultiset& pm,
                                    double p);

enum class RotaMode { kIndependent, kBase };

// Deterministic family {B_R} over every R subset of Y \ X with X + R - B_R
// independent (or a base), found by backtracking. Within each layer |R| = j
// every x in X \ Y is covered at most (bases: exactly) C(m-1, j-1) times,
// m = |Y \ X|, so P(x in T(R)) <= p for every p. Throws ConstructionError if
// the search gives up. |Y \ X| <= 10.
ExchangeMapPtr BuildMatroidRotaMap(const MatroidOracle& m, RotaMode mode,
                                   const Subset& x, const Subset& y);

// Independent-set Rota map per matroid of an intersection domain, composed.
// Targets (p, mp) for m matroids.
ExchangeMapPtr BuildIntersectionMap(const Domain& d, const Subset& x,
                                    const Subset& y);

// T(R) = union of the component removals. Components must share (X, Y) and
// all select S(R) = R. Targets (alpha, sum of betas).
ExchangeMapPtr ComposeMaps(const std::vector<ExchangeMapPtr>& maps);

// Light items (size <= 1/3) only; 2-relaxed. X \ Y is packed as arcs on a
// circle of circumference 1 - c(X n Y); an arc of length c(R) is placed
// uniformly and each x is dropped with probability |overlap| / c_x.
ExchangeMapPtr BuildKnapsackLightMap(std::span<const double> sizes,
                                     const Subset& x, const Subset& y);

// T(R) = empty if R is empty, X \ Y otherwise, so the exchanged set is
// (X n Y) + R, a subset of Y. |X|, |Y| <= k.
ExchangeMapPtr BuildKnapsackHeavyMap(const Domain& d, const Subset& x,
                                     const Subset& y, int k);

// Next-fit split of z into two capacity-1 knapsacks (the 5/3-interval
// argument). std::nullopt if next-fit needs a third bin.
std::optional<std::pair<Subset, Subset>> SplitIntoTwoKnapsacks(
    std::span<const double> sizes, const Subset& z);

enum class CertifyMethod { kExact, kMonteCarlo };

std::string CertifyMethodName(CertifyMethod m);

struct UniformityReport {
  ExchangeMapKind kind = ExchangeMapKind::kTrivialKExchange;
  CertifyMethod method = CertifyMethod::kExact;
  double alpha_hat = 1.0;  // min over y of P(y in S(R)); 1 if Y \ X empty
  double beta_hat = 0.0;   // max over x of P(x in T(R)); 0 if X \ Y empty
  int64_t samples = 0;     // R values (exact) or draws (Monte-Carlo)
  double radius = 0.0;     // 3-sigma half-width; 0 for exact
  bool vacuous = false;    // Y \ X empty
  std::vector<double> inclusion;  // per element of Y \ X, ascending
  std::vector<double> removal;    // per element of X \ Y, ascending

  nlohmann::json ToJson() const;
};

inline constexpr int kMaxExactCertifyElements = 12;

// probs is indexed by element over the whole universe.
UniformityReport CertifyUniformity(const ExchangeMap& map,
                                   std::span<const double> probs);
UniformityReport CertifyUniformity(const ExchangeMap& map, double p);
UniformityReport CertifyUniformityMonteCarlo(const ExchangeMap& map,
                                             std::span<const double> probs,
                                             int64_t samples, RandomSource& rng);

struct WellFormednessReport {
  int64_t checked = 0;
  int64_t subset_violations = 0;      // S(R) not inside R
  int64_t membership_violations = 0;  // exchanged set outside gamma * D

  bool ok() const { return subset_violations == 0 && membership_violations == 0; }
};

// Every R and every internal outcome.
WellFormednessReport CheckWellFormedExact(const ExchangeMap& map);
WellFormednessReport CheckWellFormedSampled(const ExchangeMap& map,
                                            std::span<const double> probs,
                                            int64_t samples, RandomSource& rng);

enum class GainBoundKind { kLinear, kSubmodular };

struct GainBoundReport {
  double expected_gain = 0.0;  // E[f(X + S - T) - f(X)]
  double bound = 0.0;
  double slack = 0.0;          // expected_gain - bound
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
};

// Exact expectation against the certified (alpha_hat, beta_hat). Linear:
// alpha f(Y) - max(alpha, beta) f(X), requires a modular f. Submodular:
// alpha f(X u Y) - (alpha + beta) f(X).
GainBoundReport VerifyGainBound(const ExchangeMap& map, const SetFunction& f,
                                GainBoundKind kind, std::span<const double> probs);
GainBoundReport VerifyGainBound(const ExchangeMap& map, const SetFunction& f,
                                GainBoundKind kind, double p);

}  // namespace stoq

#endif  // STOQ_EXCHANGE_H_
