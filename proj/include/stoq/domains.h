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

#ifndef STOQ_DOMAINS_H_
#define STOQ_DOMAINS_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stoq/core.h"

namespace stoq {

using Edge = std::pair<int, int>;

enum class MatroidKind { kUniform, kPartition, kGraphic, kExplicit };

// Independence oracle for a matroid on {0..n-1}. Nothing here checks the
// matroid axioms; VerifyMatroidAxioms does that exhaustively.
class MatroidOracle {
 public:
  static MatroidOracle Uniform(int n, int rank);
  // Element e lies in block block_of[e]; at most capacities[b] per block.
  static MatroidOracle Partition(std::vector<int> block_of,
                                 std::vector<int> capacities);
  // Forests of a multigraph; element e is edges[e].
  static MatroidOracle Graphic(int num_vertices, std::vector<Edge> edges);
  // Independent sets listed explicitly.
  static MatroidOracle Explicit(int n, const std::vector<Subset>& independent);

  MatroidKind kind() const { return kind_; }
  int size() const { return n_; }

  bool IsIndependent(uint64_t mask) const;
  bool IsIndependent(const Subset& x) const { return IsIndependent(x.mask()); }

  // Size of a greedily grown maximal independent subset of mask.
  int Rank(uint64_t mask) const;

  nlohmann::json ToJson() const;
  static MatroidOracle FromJson(const nlohmann::json& j);

 private:
  MatroidOracle(MatroidKind kind, int n) : kind_(kind), n_(n) {}

  MatroidKind kind_;
  int n_;
  int rank_ = 0;                      // uniform
  std::vector<int> block_of_;         // partition
  std::vector<int> capacities_;       // partition
  int num_vertices_ = 0;              // graphic
  std::vector<Edge> edges_;           // graphic
  std::vector<uint64_t> independent_;  // explicit, sorted
};

inline constexpr int kMaxMatroidAxiomElements = 15;

// Exhaustive check of the three independence axioms. The augmentation axiom
// is checked for |Y| = |X| + 1, which implies the general form through
// hereditary closure. Throws TooLargeError beyond 15 elements.
bool VerifyMatroidAxioms(const MatroidOracle& m);

enum class DomainKind {
  kMatching,
  kKSetPacking,
  kMatroidIndependent,
  kMatroidBase,
  kIntersection,
  kKnapsack,
  kCardinality,
};

std::string DomainKindName(DomainKind kind);

inline constexpr int kMaxEnumerationElements = 22;

class Domain {
 public:
  // Element e is the edge edges[e]; feasible sets are matchings.
  static Domain Matching(int num_vertices, std::vector<Edge> edges);
  // Element e is the set sets[e] of item ids (< 64); feasible sets are
  // pairwise disjoint. k is the largest set size.
  static Domain KSetPacking(std::vector<std::vector<int>> sets);
  static Domain MatroidIndependent(MatroidOracle m);
  static Domain MatroidBase(MatroidOracle m);
  static Domain Intersection(std::vector<MatroidOracle> ms);
  // Capacity 1; every size must be positive.
  static Domain Knapsack(std::vector<double> sizes);
  static Domain Cardinality(int n, int rank);

  DomainKind kind() const { return kind_; }
  int size() const { return n_; }
  bool downward_closed() const { return kind_ != DomainKind::kMatroidBase; }

  bool IsFeasible(uint64_t mask) const;
  bool IsFeasible(const Subset& x) const;

  // Every feasible subset of allowed, in lexicographic order of member lists.
  // For matroid bases these are the maximal independent subsets of allowed
  // (the bases of the restriction). Throws TooLargeError beyond 22 elements.
  std::vector<Subset> EnumerateFeasible(const Subset& allowed) const;
  void ForEachFeasible(uint64_t allowed,
                       const std::function<void(uint64_t)>& visit) const;

  // Exchange parameter for matching (2) and k-set packing (max set size);
  // 0 for kinds that carry no k-exchange structure.
  int exchange_k() const;

  const std::vector<Edge>& edges() const { return edges_; }
  int num_vertices() const { return num_vertices_; }
  // Vertex mask per edge (matching) or item mask per set (k-set packing).
  const std::vector<uint64_t>& footprints() const { return footprints_; }
  const std::vector<std::vector<int>>& sets() const { return sets_; }
  const std::vector<MatroidOracle>& matroids() const { return matroids_; }
  const std::vector<double>& sizes() const { return sizes_; }
  int rank() const { return rank_; }

  nlohmann::json ToJson() const;
  static Domain FromJson(const nlohmann::json& j);

 private:
  Domain(DomainKind kind, int n) : kind_(kind), n_(n) {}

  bool IsIndependentAll(uint64_t mask) const;

  DomainKind kind_;
  int n_;
  int num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> sets_;
  std::vector<uint64_t> footprints_;
  std::vector<MatroidOracle> matroids_;
  std::vector<double> sizes_;
  int rank_ = 0;
};

// Removal sets {T_y} witnessing the k-exchange property between X and Y.
struct KExchangeCertificate {
  Subset x;
  Subset y;
  int k = 0;
  // One entry per y in Y \ X, ascending by y.
  std::vector<std::pair<Element, Subset>> removal;

  const Subset& RemovalFor(Element y) const;
  Subset added() const { return y - x; }
  Subset dropped() const { return x - y; }
};

// Matching: T_y is the edges of X \ Y sharing a vertex with y. k-set packing:
// T_y is the sets of X \ Y intersecting y. Other kinds throw.
KExchangeCertificate BuildKExchangeCertificate(const Domain& d,
                                               const Subset& x,
                                               const Subset& y);

struct CertificateCheck {
  bool removal_sizes = false;   // |T_y| <= k
  bool multiplicity = false;    // each x in at most k of the T_y
  bool exchange = false;        // X + S - union T_y feasible for all S

  bool ok() const { return removal_sizes && multiplicity && exchange; }
};

inline constexpr int kMaxCertificateCheckElements = 12;

// Exhaustive over every S subset of Y \ X; throws beyond 12 elements there.
CertificateCheck VerifyCertificate(const Domain& d,
                                   const KExchangeCertificate& cert);

}  // namespace stoq

#endif  // STOQ_DOMAINS_H_
