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

#include "stoq/domains.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace stoq {
namespace {

void CheckSize(int n, const char* what) {
  if (n < 0 || n > kMaxElements) {
    throw std::invalid_argument(std::string(what) +
                                " must have between 0 and 64 elements");
  }
}

// Disjoint-set forest over a small vertex range.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int Find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  bool Unite(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

MatroidOracle MatroidOracle::Uniform(int n, int rank) {
  CheckSize(n, "uniform matroid");
  if (rank < 0) throw std::invalid_argument("uniform matroid rank < 0");
  MatroidOracle m(MatroidKind::kUniform, n);
  m.rank_ = rank;
  return m;
}

MatroidOracle MatroidOracle::Partition(std::vector<int> block_of,
                                       std::vector<int> capacities) {
  CheckSize(static_cast<int>(block_of.size()), "partition matroid");
  for (int b : block_of) {
    if (b < 0 || b >= static_cast<int>(capacities.size())) {
      throw std::invalid_argument("partition block id out of range");
    }
  }
  for (int c : capacities) {
    if (c < 0) throw std::invalid_argument("negative partition capacity");
  }
  MatroidOracle m(MatroidKind::kPartition, static_cast<int>(block_of.size()));
  m.block_of_ = std::move(block_of);
  m.capacities_ = std::move(capacities);
  return m;
}

MatroidOracle MatroidOracle::Graphic(int num_vertices, std::vector<Edge> edges) {
  CheckSize(static_cast<int>(edges.size()), "graphic matroid");
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) {
      throw std::invalid_argument("graphic matroid edge endpoint out of range");
    }
  }
  MatroidOracle m(MatroidKind::kGraphic, static_cast<int>(edges.size()));
  m.num_vertices_ = num_vertices;
  m.edges_ = std::move(edges);
  return m;
}

MatroidOracle MatroidOracle::Explicit(int n,
                                      const std::vector<Subset>& independent) {
  CheckSize(n, "explicit matroid");
  MatroidOracle m(MatroidKind::kExplicit, n);
  for (const Subset& s : independent) {
    if (s.universe_size() != n) {
      throw std::invalid_argument("independent set over wrong universe");
    }
    m.independent_.push_back(s.mask());
  }
  std::sort(m.independent_.begin(), m.independent_.end());
  m.independent_.erase(
      std::unique(m.independent_.begin(), m.independent_.end()),
      m.independent_.end());
  return m;
}

bool MatroidOracle::IsIndependent(uint64_t mask) const {
  switch (kind_) {
    case MatroidKind::kUniform:
      return std::popcount(mask) <= rank_;
    case MatroidKind::kPartition: {
      std::vector<int> used(capacities_.size(), 0);
      for (uint64_t m = mask; m; m &= m - 1) {
        const int b = block_of_[std::countr_zero(m)];
        if (++used[b] > capacities_[b]) return false;
      }
      return true;
    }
    case MatroidKind::kGraphic: {
      UnionFind uf(num_vertices_);
      for (uint64_t m = mask; m; m &= m - 1) {
        const auto& [u, v] = edges_[std::countr_zero(m)];
        if (!uf.Unite(u, v)) return false;
      }
      return true;
    }
    case MatroidKind::kExplicit:
      return std::binary_search(independent_.begin(), independent_.end(), mask);
  }
  return false;
}

int MatroidOracle::Rank(uint64_t mask) const {
  uint64_t grown = 0;
  for (uint64_t m = mask; m; m &= m - 1) {
    const uint64_t bit = m & (~m + 1);
    if (IsIndependent(grown | bit)) grown |= bit;
  }
  return std::popcount(grown);
}

nlohmann::json MatroidOracle::ToJson() const {
  switch (kind_) {
    case MatroidKind::kUniform:
      return {{"kind", "uniform"}, {"n", n_}, {"rank", rank_}};
    case MatroidKind::kPartition:
      return {{"kind", "partition"},
              {"blocks", block_of_},
              {"capacities", capacities_}};
    case MatroidKind::kGraphic: {
      nlohmann::json edges = nlohmann::json::array();
      for (const auto& [u, v] : edges_) edges.push_back({u, v});
      return {{"kind", "graphic"}, {"vertices", num_vertices_}, {"edges", edges}};
    }
    case MatroidKind::kExplicit: {
      nlohmann::json sets = nlohmann::json::array();
      for (uint64_t m : independent_) {
        sets.push_back(Subset::FromMask(n_, m).members());
      }
      return {{"kind", "explicit"}, {"n", n_}, {"independent", sets}};
    }
  }
  return {};
}

namespace {

std::vector<Edge> EdgesFromJson(const nlohmann::json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) {
      throw std::invalid_argument("edges must be [u, v] pairs");
    }
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return edges;
}

int VertexCount(const nlohmann::json& j, const std::vector<Edge>& edges) {
  if (j.contains("vertices")) return j.at("vertices").get<int>();
  int n = 0;
  for (const auto& [u, v] : edges) n = std::max({n, u + 1, v + 1});
  return n;
}

}  // namespace

MatroidOracle MatroidOracle::FromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    return Uniform(j.at("n").get<int>(), j.at("rank").get<int>());
  }
  if (kind == "partition") {
    return Partition(j.at("blocks").get<std::vector<int>>(),
                     j.at("capacities").get<std::vector<int>>());
  }
  if (kind == "graphic") {
    auto edges = EdgesFromJson(j.at("edges"));
    const int nv = VertexCount(j, edges);
    return Graphic(nv, std::move(edges));
  }
  if (kind == "explicit") {
    const int n = j.at("n").get<int>();
    std::vector<Subset> sets;
    for (const auto& s : j.at("independent")) sets.push_back(SubsetFromJson(n, s));
    return Explicit(n, sets);
  }
  throw std::invalid_argument("unknown matroid kind '" + kind + "'");
}

bool VerifyMatroidAxioms(const MatroidOracle& m) {
  const int n = m.size();
  if (n > kMaxMatroidAxiomElements) {
    throw TooLargeError("matroid axiom check limited to 15 elements");
  }
  const uint64_t count = uint64_t{1} << n;
  std::vector<char> indep(count);
  for (uint64_t s = 0; s < count; ++s) indep[s] = m.IsIndependent(s);
  if (!indep[0]) return false;
  // Hereditary: removing any single element keeps independence.
  for (uint64_t s = 1; s < count; ++s) {
    if (!indep[s]) continue;
    for (uint64_t r = s; r; r &= r - 1) {
      if (!indep[s & ~(r & (~r + 1))]) return false;
    }
  }
  // Augmentation for |Y| = |X| + 1.
  std::vector<std::vector<uint64_t>> by_size(n + 1);
  std::vector<uint64_t> extendable(count, 0);
  for (uint64_t s = 0; s < count; ++s) {
    if (!indep[s]) continue;
    by_size[std::popcount(s)].push_back(s);
    for (int e = 0; e < n; ++e) {
      const uint64_t bit = uint64_t{1} << e;
      if (!(s & bit) && indep[s | bit]) extendable[s] |= bit;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (uint64_t x : by_size[k]) {
      for (uint64_t y : by_size[k + 1]) {
        if (((y & ~x) & extendable[x]) == 0) return false;
      }
    }
  }
  return true;
}

std::string DomainKindName(DomainKind kind) {
  switch (kind) {
    case DomainKind::kMatching:
      return "matching";
    case DomainKind::kKSetPacking:
      return "k-set-packing";
    case DomainKind::kMatroidIndependent:
      return "matroid-independent";
    case DomainKind::kMatroidBase:
      return "matroid-base";
    case DomainKind::kIntersection:
      return "intersection";
    case DomainKind::kKnapsack:
      return "knapsack";
    case DomainKind::kCardinality:
      return "cardinality";
  }
  return "unknown";
}

Domain Domain::Matching(int num_vertices, std::vector<Edge> edges) {
  CheckSize(static_cast<int>(edges.size()), "matching domain");
  if (num_vertices < 0 || num_vertices > 64) {
    throw std::invalid_argument("matching domain supports at most 64 vertices");
  }
  Domain d(DomainKind::kMatching, static_cast<int>(edges.size()));
  d.num_vertices_ = num_vertices;
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices || u == v) {
      throw std::invalid_argument("invalid matching edge");
    }
    d.footprints_.push_back((uint64_t{1} << u) | (uint64_t{1} << v));
  }
  d.edges_ = std::move(edges);
  return d;
}

Domain Domain::KSetPacking(std::vector<std::vector<int>> sets) {
  CheckSize(static_cast<int>(sets.size()), "k-set-packing domain");
  Domain d(DomainKind::kKSetPacking, static_cast<int>(sets.size()));
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw std::invalid_argument("k-set-packing set repeats an item");
    }
    uint64_t m = 0;
    for (int item : s) {
      if (item < 0 || item >= 64) {
        throw std::invalid_argument("k-set-packing item id outside [0, 64)");
      }
      m |= uint64_t{1} << item;
    }
    d.footprints_.push_back(m);
    d.rank_ = std::max(d.rank_, static_cast<int>(s.size()));
  }
  d.sets_ = std::move(sets);
  return d;
}

Domain Domain::MatroidIndependent(MatroidOracle m) {
  Domain d(DomainKind::kMatroidIndependent, m.size());
  d.matroids_.push_back(std::move(m));
  return d;
}

Domain Domain::MatroidBase(MatroidOracle m) {
  Domain d(DomainKind::kMatroidBase, m.size());
  d.rank_ = m.Rank(FullMask(m.size()));
  d.matroids_.push_back(std::move(m));
  return d;
}

Domain Domain::Intersection(std::vector<MatroidOracle> ms) {
  if (ms.empty()) throw std::invalid_argument("intersection of zero matroids");
  const int n = ms.front().size();
  for (const auto& m : ms) {
    if (m.size() != n) {
      throw std::invalid_argument("intersected matroids differ in size");
    }
  }
  Domain d(DomainKind::kIntersection, n);
  d.matroids_ = std::move(ms);
  return d;
}

Domain Domain::Knapsack(std::vector<double> sizes) {
  CheckSize(static_cast<int>(sizes.size()), "knapsack domain");
  for (double c : sizes) {
    if (!(c > 0.0)) throw std::invalid_argument("knapsack sizes must be > 0");
  }
  Domain d(DomainKind::kKnapsack, static_cast<int>(sizes.size()));
  d.sizes_ = std::move(sizes);
  return d;
}

Domain Domain::Cardinality(int n, int rank) {
  CheckSize(n, "cardinality domain");
  if (rank < 0) throw std::invalid_argument("cardinality bound < 0");
  Domain d(DomainKind::kCardinality, n);
  d.rank_ = rank;
  return d;
}

bool Domain::IsIndependentAll(uint64_t mask) const {
  for (const auto& m : matroids_) {
    if (!m.IsIndependent(mask)) return false;
  }
  return true;
}

bool Domain::IsFeasible(uint64_t mask) const {
  if (mask & ~FullMask(n_)) return false;
  switch (kind_) {
    case DomainKind::kMatching:
    case DomainKind::kKSetPacking: {
      uint64_t used = 0;
      for (uint64_t m = mask; m; m &= m - 1) {
        const uint64_t fp = footprints_[std::countr_zero(m)];
        if (used & fp) return false;
        used |= fp;
      }
      return true;
    }
    case DomainKind::kMatroidIndependent:
    case DomainKind::kIntersection:
      return IsIndependentAll(mask);
    case DomainKind::kMatroidBase:
      return std::popcount(mask) == rank_ && IsIndependentAll(mask);
    case DomainKind::kKnapsack: {
      double load = 0.0;
      for (uint64_t m = mask; m; m &= m - 1) load += sizes_[std::countr_zero(m)];
      return load <= 1.0 + kTolerance;
    }
    case DomainKind::kCardinality:
      return std::popcount(mask) <= rank_;
  }
  return false;
}

bool Domain::IsFeasible(const Subset& x) const {
  if (x.universe_size() != n_) {
    throw std::invalid_argument("subset universe does not match domain");
  }
  return IsFeasible(x.mask());
}

void Domain::ForEachFeasible(uint64_t allowed,
                             const std::function<void(uint64_t)>& visit) const {
  allowed &= FullMask(n_);
  if (std::popcount(allowed) > kMaxEnumerationElements) {
    throw TooLargeError("enumeration limited to 22 allowed elements");
  }
  std::vector<int> elems;
  for (uint64_t m = allowed; m; m &= m - 1) elems.push_back(std::countr_zero(m));
  const int count = static_cast<int>(elems.size());

  // Preorder DFS over increasing element lists visits sets in lexicographic
  // order. Pruning on infeasibility is valid because independence (for bases:
  // of the underlying matroids) is hereditary.
  const bool bases = kind_ == DomainKind::kMatroidBase;
  auto admissible = [&](uint64_t s) {
    return bases ? IsIndependentAll(s) : IsFeasible(s);
  };
  auto maximal = [&](uint64_t s) {
    for (int e : elems) {
      const uint64_t bit = uint64_t{1} << e;
      if (!(s & bit) && IsIndependentAll(s | bit)) return false;
    }
    return true;
  };
  std::function<void(uint64_t, int)> dfs = [&](uint64_t cur, int next) {
    if (!bases || maximal(cur)) visit(cur);
    for (int i = next; i < count; ++i) {
      const uint64_t grown = cur | (uint64_t{1} << elems[i]);
      if (admissible(grown)) dfs(grown, i + 1);
    }
  };
  if (admissible(0)) dfs(0, 0);
}

std::vector<Subset> Domain::EnumerateFeasible(const Subset& allowed) const {
  if (allowed.universe_size() != n_) {
    throw std::invalid_argument("allowed set universe does not match domain");
  }
  std::vector<Subset> out;
  ForEachFeasible(allowed.mask(),
                  [&](uint64_t s) { out.push_back(Subset::FromMask(n_, s)); });
  return out;
}

int Domain::exchange_k() const {
  switch (kind_) {
    case DomainKind::kMatching:
      return 2;
    case DomainKind::kKSetPacking:
      return rank_;
    default:
      return 0;
  }
}

nlohmann::json Domain::ToJson() const {
  switch (kind_) {
    case DomainKind::kMatching: {
      nlohmann::json edges = nlohmann::json::array();
      for (const auto& [u, v] : edges_) edges.push_back({u, v});
      return {{"kind", "matching"}, {"vertices", num_vertices_}, {"edges", edges}};
    }
    case DomainKind::kKSetPacking:
      return {{"kind", "k-set-packing"}, {"sets", sets_}};
    case DomainKind::kMatroidIndependent:
      return {{"kind", "matroid-independent"},
              {"matroid", matroids_.front().ToJson()}};
    case DomainKind::kMatroidBase:
      return {{"kind", "matroid-base"}, {"matroid", matroids_.front().ToJson()}};
    case DomainKind::kIntersection: {
      nlohmann::json ms = nlohmann::json::array();
      for (const auto& m : matroids_) ms.push_back(m.ToJson());
      return {{"kind", "intersection"}, {"matroids", ms}};
    }
    case DomainKind::kKnapsack:
      return {{"kind", "knapsack"}, {"sizes", sizes_}};
    case DomainKind::kCardinality:
      return {{"kind", "cardinality"}, {"n", n_}, {"rank", rank_}};
  }
  return {};
}

Domain Domain::FromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "matching") {
    auto edges = EdgesFromJson(j.at("edges"));
    const int nv = VertexCount(j, edges);
    return Matching(nv, std::move(edges));
  }
  if (kind == "k-set-packing") {
    return KSetPacking(j.at("sets").get<std::vector<std::vector<int>>>());
  }
  if (kind == "matroid-independent") {
    return MatroidIndependent(MatroidOracle::FromJson(j.at("matroid")));
  }
  if (kind == "matroid-base") {
    return MatroidBase(MatroidOracle::FromJson(j.at("matroid")));
  }
  if (kind == "intersection") {
    std::vector<MatroidOracle> ms;
    for (const auto& m : j.at("matroids")) ms.push_back(MatroidOracle::FromJson(m));
    return Intersection(std::move(ms));
  }
  if (kind == "knapsack") {
    return Knapsack(j.at("sizes").get<std::vector<double>>());
  }
  if (kind == "cardinality") {
    return Cardinality(j.at("n").get<int>(), j.at("rank").get<int>());
  }
  throw std::invalid_argument("unknown domain kind '" + kind + "'");
}

const Subset& KExchangeCertificate::RemovalFor(Element y) const {
  for (const auto& [e, t] : removal) {
    if (e == y) return t;
  }
  throw std::out_of_range("no removal set for element " + std::to_string(y));
}

KExchangeCertificate BuildKExchangeCertificate(const Domain& d,
                                               const Subset& x,
                                               const Subset& y) {
  if (d.kind() != DomainKind::kMatching && d.kind() != DomainKind::kKSetPacking) {
    throw std::invalid_argument("k-exchange certificates need a matching or "
                                "k-set-packing domain, got " +
                                DomainKindName(d.kind()));
  }
  if (!d.IsFeasible(x) || !d.IsFeasible(y)) {
    throw std::invalid_argument("certificate endpoints must be feasible");
  }
  KExchangeCertificate cert{x, y, d.exchange_k(), {}};
  const Subset dropped = x - y;
  for (Element ey : (y - x).members()) {
    Subset t(d.size());
    for (Element ex : dropped.members()) {
      if (d.footprints()[ex] & d.footprints()[ey]) t.insert(ex);
    }
    cert.removal.emplace_back(ey, t);
  }
  return cert;
}

CertificateCheck VerifyCertificate(const Domain& d,
                                   const KExchangeCertificate& cert) {
  const std::vector<Element> added = cert.added().members();
  if (static_cast<int>(added.size()) > kMaxCertificateCheckElements) {
    throw TooLargeError("certificate check limited to |Y \\ X| <= 12");
  }
  CertificateCheck check;
  check.removal_sizes = true;
  std::vector<int> uses(d.size(), 0);
  for (const auto& [ey, t] : cert.removal) {
    if (t.size() > cert.k) check.removal_sizes = false;
    if (!t.IsSubsetOf(cert.dropped())) check.removal_sizes = false;
    for (Element ex : t.members()) ++uses[ex];
  }
  check.multiplicity =
      std::all_of(uses.begin(), uses.end(), [&](int u) { return u <= cert.k; });
  check.exchange = true;
  for (uint64_t s = 0; s < (uint64_t{1} << added.size()); ++s) {
    uint64_t in = 0, out = 0;
    for (size_t i = 0; i < added.size(); ++i) {
      if ((s >> i) & 1u) {
        in |= uint64_t{1} << added[i];
        out |= cert.RemovalFor(added[i]).mask();
      }
    }
    if (!d.IsFeasible((cert.x.mask() | in) & ~out)) {
      check.exchange = false;
      break;
    }
  }
  return check;
}

}  // namespace stoq
