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

#include "stoq/exchange.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stoq {
namespace {

// Maps local bit i of a compressed R to the i-th element of the pool.
uint64_t Expand(uint64_t local, const std::vector<Element>& pool) {
  uint64_t m = 0;
  for (size_t i = 0; i < pool.size(); ++i) {
    if ((local >> i) & 1u) m |= uint64_t{1} << pool[i];
  }
  return m;
}

uint64_t Compress(uint64_t mask, const std::vector<Element>& pool) {
  uint64_t local = 0;
  for (size_t i = 0; i < pool.size(); ++i) {
    if ((mask >> pool[i]) & 1u) local |= uint64_t{1} << i;
  }
  return local;
}

void CheckR(const ExchangeMap& map, const Subset& r) {
  if (r.universe_size() != map.universe_size() ||
      !r.IsSubsetOf(map.added_pool())) {
    throw std::invalid_argument("R must be a subset of Y \\ X");
  }
}

void CheckPair(const Subset& x, const Subset& y) {
  if (x.universe_size() != y.universe_size()) {
    throw std::invalid_argument("X and Y live on different ground sets");
  }
}

int64_t Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------

class TrivialKExchangeMap final : public ExchangeMap {
 public:
  TrivialKExchangeMap(const Domain& d, KExchangeCertificate cert)
      : ExchangeMap(cert.x, cert.y, 1), domain_(d), cert_(std::move(cert)) {}

  ExchangeMapKind kind() const override {
    return ExchangeMapKind::kTrivialKExchange;
  }

  std::vector<WeightedExchange> Outcomes(const Subset& r) const override {
    return {{1.0, Map(r)}};
  }
  Exchange Draw(const Subset& r, RandomSource&) const override { return Map(r); }

  bool IsMember(const Subset& z) const override { return domain_.IsFeasible(z); }

  std::pair<double, double> TargetUniformity(double p) const override {
    return {p, p * cert_.k};
  }

 private:
  Exchange Map(const Subset& r) const {
    CheckR(*this, r);
    Subset t(universe_size());
    for (Element e : r.members()) t = t | cert_.RemovalFor(e);
    return {r, t};
  }

  Domain domain_;
  KExchangeCertificate cert_;
};

// ---------------------------------------------------------------------------

class PathExchangeMap final : public ExchangeMap {
 public:
  PathExchangeMap(const Domain& d, const PathMultiset& pm, double p)
      : ExchangeMap(pm.cert.x, pm.cert.y, 1),
        domain_(d),
        cert_(pm.cert),
        k_(pm.k),
        h_(pm.h),
        p_(p),
        classes_(pm.num_colors) {
    for (int64_t i = 0; i < pm.copies(); ++i) {
      const uint64_t s = pm.YFootprint(pm.paths[pm.copy_path[i]]);
      if (s != 0) classes_[pm.copy_color[i]].push_back(s);
    }
    for (auto& c : classes_) std::sort(c.begin(), c.end());
  }

  ExchangeMapKind kind() const override {
    return ExchangeMapKind::kPathKExchange;
  }
  bool selects_all() const override { return false; }

  std::vector<WeightedExchange> Outcomes(const Subset& r) const override {
    CheckR(*this, r);
    std::vector<WeightedExchange> out;
    const double class_weight = 1.0 / static_cast<double>(classes_.size());
    for (const auto& cls : classes_) {
      std::vector<uint64_t> live;
      std::vector<double> keep;
      for (uint64_t s : cls) {
        if ((s & ~r.mask()) == 0) {
          live.push_back(s);
          keep.push_back(KeepProbability(s));
        }
      }
      const uint64_t outcomes = uint64_t{1} << live.size();
      for (uint64_t pick = 0; pick < outcomes; ++pick) {
        double w = class_weight;
        uint64_t s = 0;
        for (size_t i = 0; i < live.size(); ++i) {
          if ((pick >> i) & 1u) {
            w *= keep[i];
            s |= live[i];
          } else {
            w *= 1.0 - keep[i];
          }
        }
        if (w <= 0.0) continue;
        out.push_back({w, MakeExchange(Subset::FromMask(universe_size(), s))});
      }
    }
    return out;
  }

  Exchange Draw(const Subset& r, RandomSource& rng) const override {
    CheckR(*this, r);
    const auto& cls = classes_[rng.UniformInt(classes_.size())];
    uint64_t s = 0;
    for (uint64_t si : cls) {
      if ((si & ~r.mask()) == 0 && rng.Bernoulli(KeepProbability(si))) s |= si;
    }
    return MakeExchange(Subset::FromMask(universe_size(), s));
  }

  bool IsMember(const Subset& z) const override { return domain_.IsFeasible(z); }

  std::pair<double, double> TargetUniformity(double p) const override {
    const double a = std::pow(p, h_) / h_;
    return {a, a * (k_ - 1 + 1.0 / h_)};
  }

 private:
  double KeepProbability(uint64_t s) const {
    return std::pow(p_, h_ - std::popcount(s));
  }

  Exchange MakeExchange(const Subset& s) const {
    Subset t(universe_size());
    for (Element e : s.members()) t = t | cert_.RemovalFor(e);
    return {s, t};
  }

  Domain domain_;
  KExchangeCertificate cert_;
  int k_;
  int h_;
  double p_;
  std::vector<std::vector<uint64_t>> classes_;  // nonempty footprints
};

// ---------------------------------------------------------------------------

class RotaMap final : public ExchangeMap {
 public:
  RotaMap(Subset x, Subset y, MatroidOracle m, std::vector<Element> ys,
          std::vector<Element> xs, std::vector<uint64_t> family)
      : ExchangeMap(std::move(x), std::move(y), 1),
        matroid_(std::move(m)),
        ys_(std::move(ys)),
        xs_(std::move(xs)),
        family_(std::move(family)) {}

  ExchangeMapKind kind() const override { return ExchangeMapKind::kMatroidRota; }

  std::vector<WeightedExchange> Outcomes(const Subset& r) const override {
    return {{1.0, Map(r)}};
  }
  Exchange Draw(const Subset& r, RandomSource&) const override { return Map(r); }

  bool IsMember(const Subset& z) const override {
    return matroid_.IsIndependent(z.mask());
  }

  std::pair<double, double> TargetUniformity(double p) const override {
    return {p, p};
  }

 private:
  Exchange Map(const Subset& r) const {
    CheckR(*this, r);
    const uint64_t b = family_[Compress(r.mask(), ys_)];
    return {r, Subset::FromMask(universe_size(), Expand(b, xs_))};
  }

  MatroidOracle matroid_;
  std::vector<Element> ys_;
  std::vector<Element> xs_;
  std::vector<uint64_t> family_;  // local B_R indexed by local R
};

// Finds, for every R in `rs`, one candidate with per-x load at most `cap`.
class RotaLayerSearch {
 public:
  RotaLayerSearch(std::vector<uint64_t> rs,
                  std::vector<std::vector<uint64_t>> candidates, int nx,
                  int64_t cap)
      : rs_(std::move(rs)),
        candidates_(std::move(candidates)),
        nx_(nx),
        cap_(cap),
        load_(nx, 0),
        choice_(rs_.size(), 0) {
    order_.resize(rs_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](size_t a, size_t b) {
      return candidates_[a].size() < candidates_[b].size();
    });
  }

  bool Run() { return Visit(0); }
  uint64_t ChoiceFor(size_t i) const { return choice_[i]; }

 private:
  static constexpr int64_t kNodeLimit = 2'000'000;

  bool Visit(size_t depth) {
    if (depth == order_.size()) return true;
    if (++nodes_ > kNodeLimit) {
      throw ConstructionError("Rota-exchange search exceeded its node limit");
    }
    const size_t i = order_[depth];
    std::vector<std::pair<int64_t, uint64_t>> ranked;
    for (uint64_t b : candidates_[i]) {
      int64_t worst = 0;
      bool fits = true;
      for (int j = 0; j < nx_; ++j) {
        if (!((b >> j) & 1u)) continue;
        if (load_[j] + 1 > cap_) fits = false;
        worst = std::max(worst, load_[j] + 1);
      }
      if (fits) ranked.emplace_back(worst, b);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [unused, b] : ranked) {
      Apply(b, +1);
      choice_[i] = b;
      if (Visit(depth + 1)) return true;
      Apply(b, -1);
    }
    return false;
  }

  void Apply(uint64_t b, int delta) {
    for (int j = 0; j < nx_; ++j) {
      if ((b >> j) & 1u) load_[j] += delta;
    }
  }

  std::vector<uint64_t> rs_;
  std::vector<std::vector<uint64_t>> candidates_;
  int nx_;
  int64_t cap_;
  std::vector<int64_t> load_;
  std::vector<uint64_t> choice_;
  std::vector<size_t> order_;
  int64_t nodes_ = 0;
};

// ---------------------------------------------------------------------------

class CompositeMap final : public ExchangeMap {
 public:
  explicit CompositeMap(std::vector<ExchangeMapPtr> maps)
      : ExchangeMap(maps.front()->x(), maps.front()->y(), 1),
        maps_(std::move(maps)) {}

  ExchangeMapKind kind() const override { return ExchangeMapKind::kComposition; }
  bool enumerable() const override {
    return std::all_of(maps_.begin(), maps_.end(),
                       [](const auto& m) { return m->enumerable(); });
  }

  std::vector<WeightedExchange> Outcomes(const Subset& r) const override {
    CheckR(*this, r);
    std::vector<WeightedExchange> acc = {{1.0, {r, Subset(universe_size())}}};
    for (const auto& m : maps_) {
      std::vector<WeightedExchange> next;
      for (const auto& o : m->Outcomes(r)) {
        for (const auto& a : acc) {
          next.push_back({a.weight * o.weight,
                          {r, a.exchange.removed | o.exchange.removed}});
        }
      }
      acc = std::move(next);
    }
    return acc;
  }

  Exchange Draw(const Subset& r, RandomSource& rng) const override {
    CheckR(*this, r);
    Subset t(universe_size());
    for (const auto& m : maps_) t = t | m->Draw(r, rng).removed;
    return {r, t};
  }

  bool IsMember(const Subset& z) const override {
    return std::all_of(maps_.begin(), maps_.end(),
                       [&](const auto& m) { return m->IsMember(z); });
  }

  std::pair<double, double> TargetUniformity(double p) const override {
    double alpha = 1.0;
    double beta = 0.0;
    for (const auto& m : maps_) {
      const auto [a, b] = m->TargetUniformity(p);
      alpha = std::min(alpha, a);
      beta += b;
    }
    return {alpha, beta};
  }

 private:
  std::vector<ExchangeMapPtr> maps_;
};

// ---------------------------------------------------------------------------

class KnapsackLightMap final : public ExchangeMap {
 public:
  KnapsackLightMap(Subset x, Subset y, std::vector<double> sizes)
      : ExchangeMap(std::move(x), std::move(y), 2), sizes_(std::move(sizes)) {
    double shared = 0.0;
    for (Element e : (this->x() & this->y()).members()) shared += sizes_[e];
    circumference_ = std::max(1.0 - shared, 0.0);
    double at = 0.0;
    for (Element e : dropped_pool().members()) {
      arcs_.push_back({e, at});
      at += sizes_[e];
    }
  }

  ExchangeMapKind kind() const override {
    return ExchangeMapKind::kKnapsackLight;
  }
  bool enumerable() const override { return false; }

  std::vector<WeightedExchange> Outcomes(const Subset&) const override {
    throw std::logic_error(
        "knapsack-light map has continuous randomness; use Monte-Carlo");
  }

  Exchange Draw(const Subset& r, RandomSource& rng) const override {
    CheckR(*this, r);
    Subset t(universe_size());
    if (r.empty() || circumference_ <= 0.0) return {r, t};
    double length = 0.0;
    for (Element e : r.members()) length += sizes_[e];
    length = std::min(length, circumference_);
    const double start = rng.Uniform(0.0, circumference_);
    for (const auto& [e, a] : arcs_) {
      const double overlap = CircularOverlap(start, length, a, sizes_[e]);
      if (rng.Bernoulli(std::clamp(overlap / sizes_[e], 0.0, 1.0))) t.insert(e);
    }
    return {r, t};
  }

  bool IsMember(const Subset& z) const override {
    return SplitIntoTwoKnapsacks(sizes_, z).has_value();
  }

  std::pair<double, double> TargetUniformity(double p) const override {
    return {p, p};
  }

 private:
  // Overlap of the circular arc [s, s + len) with the arc [a, a + c), both
  // taken modulo the circumference; [a, a + c) does not wrap.
  double CircularOverlap(double s, double len, double a, double c) const {
    auto linear = [](double l1, double r1, double l2, double r2) {
      return std::max(0.0, std::min(r1, r2) - std::max(l1, l2));
    };
    const double e = s + len;
    double total = linear(s, std::min(e, circumference_), a, a + c);
    if (e > circumference_) total += linear(0.0, e - circumference_, a, a + c);
    return total;
  }

  std::vector<double> sizes_;
  double circumference_ = 1.0;
  std::vector<std::pair<Element, double>> arcs_;  // (x, arc start)
};

// ---------------------------------------------------------------------------

class KnapsackHeavyMap final : public ExchangeMap {
 public:
  KnapsackHeavyMap(const Domain& d, Subset x, Subset y, int k)
      : ExchangeMap(std::move(x), std::move(y), 1), domain_(d), k_(k) {}

  ExchangeMapKind kind() const override {
    return ExchangeMapKind::kKnapsackHeavy;
  }

  std::vector<WeightedExchange> Outcomes(const Subset& r) const override {
    return {{1.0, Map(r)}};
  }
  Exchange Draw(const Subset& r, RandomSource&) const override { return Map(r); }

  bool IsMember(const Subset& z) const override { return domain_.IsFeasible(z); }

  std::pair<double, double> TargetUniformity(double p) const override {
    return {p, 1.0 - std::pow(1.0 - p, k_)};
  }

 private:
  Exchange Map(const Subset& r) const {
    CheckR(*this, r);
    return {r, r.empty() ? Subset(universe_size()) : dropped_pool()};
  }

  Domain domain_;
  int k_;
};

}  // namespace

std::string ExchangeMapKindName(ExchangeMapKind kind) {
  switch (kind) {
    case ExchangeMapKind::kTrivialKExchange: return "trivial-k-exchange";
    case ExchangeMapKind::kPathKExchange: return "path-k-exchange";
    case ExchangeMapKind::kMatroidRota: return "matroid-rota";
    case ExchangeMapKind::kComposition: return "composition";
    case ExchangeMapKind::kKnapsackLight: return "knapsack-light";
    case ExchangeMapKind::kKnapsackHeavy: return "knapsack-heavy";
  }
  return "unknown";
}

ExchangeMap::ExchangeMap(Subset x, Subset y, int gamma)
    : x_(std::move(x)), y_(std::move(y)), gamma_(gamma) {
  CheckPair(x_, y_);
}

ExchangeMapPtr BuildTrivialKExchangeMap(const Domain& d,
                                        const KExchangeCertificate& cert) {
  CheckPair(cert.x, cert.y);
  if (cert.x.universe_size() != d.size()) {
    throw std::invalid_argument("certificate and domain sizes differ");
  }
  for (Element e : cert.added().members()) cert.RemovalFor(e);
  return std::make_shared<TrivialKExchangeMap>(d, cert);
}

ExchangeMapPtr BuildPathExchangeMap(const Domain& d, const PathMultiset& pm,
                                    double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("path map needs p in (0, 1]");
  }
  if (pm.num_colors <= 0) {
    throw std::invalid_argument("path multiset has no color classes");
  }
  return std::make_shared<PathExchangeMap>(d, pm, p);
}

ExchangeMapPtr BuildMatroidRotaMap(const MatroidOracle& m, RotaMode mode,
                                   const Subset& x, const Subset& y) {
  CheckPair(x, y);
  if (x.universe_size() != m.size()) {
    throw std::invalid_argument("matroid and sets have different ground sets");
  }
  if (!m.IsIndependent(x) || !m.IsIndependent(y)) {
    throw std::invalid_argument("Rota map needs independent X and Y");
  }
  const int full_rank = m.Rank(FullMask(m.size()));
  if (mode == RotaMode::kBase &&
      (x.size() != full_rank || y.size() != full_rank)) {
    throw std::invalid_argument("Rota map in base mode needs bases X and Y");
  }
  const std::vector<Element> ys = (y - x).members();
  const std::vector<Element> xs = (x - y).members();
  const int my = static_cast<int>(ys.size());
  const int nx = static_cast<int>(xs.size());
  if (my > 10) throw TooLargeError("Rota map supports |Y \\ X| <= 10");
  if (nx > 16) throw TooLargeError("Rota map supports |X \\ Y| <= 16");

  std::vector<uint64_t> family(uint64_t{1} << my, 0);
  for (int j = 1; j <= my; ++j) {
    std::vector<uint64_t> rs;
    std::vector<std::vector<uint64_t>> candidates;
    for (uint64_t r = 0; r < family.size(); ++r) {
      if (std::popcount(r) != j) continue;
      const uint64_t grown = x.mask() | Expand(r, ys);
      std::vector<uint64_t> ok;
      for (uint64_t b = 0; b < (uint64_t{1} << nx); ++b) {
        if (mode == RotaMode::kBase && std::popcount(b) != j) continue;
        if (!m.IsIndependent(grown & ~Expand(b, xs))) continue;
        ok.push_back(b);
      }
      if (mode == RotaMode::kIndependent) {
        // Keep inclusion-minimal repairs only.
        std::vector<uint64_t> minimal;
        for (uint64_t b : ok) {
          bool has_smaller = false;
          for (uint64_t c : ok) {
            if (c != b && (c & ~b) == 0) {
              has_smaller = true;
              break;
            }
          }
          if (!has_smaller) minimal.push_back(b);
        }
        ok = std::move(minimal);
      }
      if (ok.empty()) {
        throw ConstructionError("no feasible removal set for some R");
      }
      std::stable_sort(ok.begin(), ok.end(), [](uint64_t a, uint64_t b) {
        return std::popcount(a) < std::popcount(b);
      });
      rs.push_back(r);
      candidates.push_back(std::move(ok));
    }
    RotaLayerSearch search(rs, std::move(candidates), nx, Binomial(my - 1, j - 1));
    if (!search.Run()) {
      throw ConstructionError("no Rota-exchange family meets the coverage counts");
    }
    for (size_t i = 0; i < rs.size(); ++i) family[rs[i]] = search.ChoiceFor(i);
  }
  return std::make_shared<RotaMap>(x, y, m, ys, xs, std::move(family));
}

ExchangeMapPtr BuildIntersectionMap(const Domain& d, const Subset& x,
                                    const Subset& y) {
  if (d.kind() != DomainKind::kIntersection &&
      d.kind() != DomainKind::kMatroidIndependent) {
    throw std::invalid_argument("intersection map needs a matroid domain");
  }
  std::vector<ExchangeMapPtr> parts;
  for (const auto& m : d.matroids()) {
    parts.push_back(BuildMatroidRotaMap(m, RotaMode::kIndependent, x, y));
  }
  return ComposeMaps(parts);
}

ExchangeMapPtr ComposeMaps(const std::vector<ExchangeMapPtr>& maps) {
  if (maps.empty()) throw std::invalid_argument("nothing to compose");
  for (const auto& m : maps) {
    if (!m) throw std::invalid_argument("null component map");
    if (m->x() != maps.front()->x() || m->y() != maps.front()->y()) {
      throw std::invalid_argument("component maps disagree on (X, Y)");
    }
    if (!m->selects_all() || m->gamma() != 1) {
      throw std::invalid_argument("components must all use S(R) = R");
    }
  }
  if (maps.size() == 1) return maps.front();
  return std::make_shared<CompositeMap>(maps);
}

ExchangeMapPtr BuildKnapsackLightMap(std::span<const double> sizes,
                                     const Subset& x, const Subset& y) {
  CheckPair(x, y);
  if (static_cast<int>(sizes.size()) != x.universe_size()) {
    throw std::invalid_argument("one size per element required");
  }
  const Domain d = Domain::Knapsack({sizes.begin(), sizes.end()});
  if (!d.IsFeasible(x) || !d.IsFeasible(y)) {
    throw std::invalid_argument("X and Y must fit the knapsack");
  }
  for (Element e : (x | y).members()) {
    if (sizes[e] > 1.0 / 3.0 + kTolerance) {
      throw std::invalid_argument("heavy item " + std::to_string(e) +
                                  " in the light-item map");
    }
  }
  return std::make_shared<KnapsackLightMap>(
      x, y, std::vector<double>(sizes.begin(), sizes.end()));
}

ExchangeMapPtr BuildKnapsackHeavyMap(const Domain& d, const Subset& x,
                                     const Subset& y, int k) {
  CheckPair(x, y);
  if (k < 1) throw std::invalid_argument("cardinality bound must be >= 1");
  if (x.size() > k || y.size() > k) {
    throw std::invalid_argument("X or Y exceeds the cardinality bound");
  }
  if (!d.IsFeasible(x) || !d.IsFeasible(y)) {
    throw std::invalid_argument("X and Y must be feasible");
  }
  return std::make_shared<KnapsackHeavyMap>(d, x, y, k);
}

std::optional<std::pair<Subset, Subset>> SplitIntoTwoKnapsacks(
    std::span<const double> sizes, const Subset& z) {
  if (static_cast<int>(sizes.size()) != z.universe_size()) {
    throw std::invalid_argument("one size per element required");
  }
  Subset first(z.universe_size());
  Subset second(z.universe_size());
  double load = 0.0;
  bool in_second = false;
  for (Element e : z.members()) {
    if (!in_second && load + sizes[e] > 1.0 + kTolerance) {
      in_second = true;
      load = 0.0;
    }
    if (in_second && load + sizes[e] > 1.0 + kTolerance) return std::nullopt;
    load += sizes[e];
    (in_second ? second : first).insert(e);
  }
  return std::make_pair(first, second);
}

}  // namespace stoq
