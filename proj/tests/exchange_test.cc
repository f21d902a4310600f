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

#include <cmath>
#include <unordered_map>

#include "gtest/gtest.h"
#include "oracles.h"

namespace stoq {
namespace {

constexpr double kEps = 1e-9;

double MaxOf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// ---------------------------------------------------------------- trivial

TEST(TrivialMapTest, SharedRemoval) {
  // Sets x1 = {1, 2}, y1 = {1}, y2 = {2}: both y's displace x1.
  const Domain d = Domain::KSetPacking({{1, 2}, {1}, {2}});
  const auto cert = BuildKExchangeCertificate(d, Subset(3, {0}), Subset(3, {1, 2}));
  const auto map = BuildTrivialKExchangeMap(d, cert);
  EXPECT_EQ(map->kind(), ExchangeMapKind::kTrivialKExchange);
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_EQ(u.method, CertifyMethod::kExact);
  EXPECT_EQ(u.samples, 4);
  EXPECT_NEAR(u.beta_hat, 0.75, kEps);
  EXPECT_NEAR(u.alpha_hat, 0.5, kEps);
  EXPECT_LE(u.beta_hat, map->TargetUniformity(0.5).second + kEps);
  EXPECT_NEAR(map->TargetUniformity(0.5).second, 1.0, kEps);
}

TEST(TrivialMapTest, EmptyAddedPool) {
  const Domain d = Domain::Matching(3, {{0, 1}, {1, 2}});
  const auto cert = BuildKExchangeCertificate(d, Subset(2, {0}), Subset(2, {0}));
  const auto map = BuildTrivialKExchangeMap(d, cert);
  const auto outs = map->Outcomes(Subset(2));
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_TRUE(outs[0].exchange.added.empty());
  EXPECT_TRUE(outs[0].exchange.removed.empty());
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_TRUE(u.vacuous);
  EXPECT_DOUBLE_EQ(u.beta_hat, 0.0);
}

TEST(TrivialMapTest, DisjointSingletons) {
  const Domain d = Domain::KSetPacking({{1}, {2}, {1}, {2}});
  const auto cert =
      BuildKExchangeCertificate(d, Subset(4, {0, 1}), Subset(4, {2, 3}));
  const auto map = BuildTrivialKExchangeMap(d, cert);
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_NEAR(u.alpha_hat, 0.5, kEps);
  EXPECT_NEAR(u.beta_hat, 0.5, kEps);
  ASSERT_EQ(u.removal.size(), 2u);
  EXPECT_NEAR(u.removal[0], 0.5, kEps);
  EXPECT_NEAR(u.removal[1], 0.5, kEps);
  // Linear gain with disjoint removals is never below the bound.
  const Objective f = Objective::Linear({1, 2, 3, 4});
  EXPECT_GE(VerifyGainBound(*map, f, GainBoundKind::kLinear, 0.5).slack, -kEps);
  const Objective zero = Objective::Linear({0, 0, 0, 0});
  const GainBoundReport z = VerifyGainBound(*map, zero, GainBoundKind::kLinear, 0.5);
  EXPECT_NEAR(z.slack, 0.0, kEps);
  EXPECT_NEAR(z.expected_gain, 0.0, kEps);
}

TEST(TrivialMapTest, VanishingProbability) {
  const Domain d = Domain::KSetPacking({{1}, {2}, {1}, {2}});
  const auto map = BuildTrivialKExchangeMap(
      d, BuildKExchangeCertificate(d, Subset(4, {0, 1}), Subset(4, {2, 3})));
  const UniformityReport u = CertifyUniformity(*map, 1e-9);
  EXPECT_LT(u.alpha_hat, 1e-8);
  EXPECT_LT(u.beta_hat, 1e-8);
  EXPECT_THROW(CertifyUniformity(*map, 0.0), std::invalid_argument);
  EXPECT_THROW(CertifyUniformity(*map, std::vector<double>{0.5}),
               std::invalid_argument);
}

struct MatchingPair {
  std::vector<std::pair<int, int>> edges;
  Domain d;
  Subset x;
  Subset y;
};

MatchingPair RandomMatchingPair(oracle::Gen& g, int max_sym_diff) {
  while (true) {
    auto edges = g.Graph(g.Int(3, 8), 0.5);
    if (edges.empty()) continue;
    Domain d = Domain::Matching(8, {edges.begin(), edges.end()});
    auto feas = [&](uint64_t m) { return oracle::MatchingFeasible(edges, m); };
    const uint64_t x = g.Feasible(d.size(), feas, 0.8);
    const uint64_t y = g.Feasible(d.size(), feas, 0.8);
    if (oracle::Pop(x ^ y) > max_sym_diff || d.size() > 20) continue;
    return {edges, d, Subset::FromMask(d.size(), x), Subset::FromMask(d.size(), y)};
  }
}

// Removal probabilities of the trivial map straight from the edge list:
// x is removed unless every y sharing a vertex with it stays inactive.
TEST(TrivialMapTest, RandomMatchingsMatchOracleProperty) {
  oracle::Gen g(81);
  for (int trial = 0; trial < 120; ++trial) {
    const MatchingPair mp = RandomMatchingPair(g, 12);
    const double p = g.Real(0.1, 1.0);
    const auto map = BuildTrivialKExchangeMap(
        mp.d, BuildKExchangeCertificate(mp.d, mp.x, mp.y));
    const UniformityReport u = CertifyUniformity(*map, p);
    EXPECT_TRUE(CheckWellFormedExact(*map).ok());
    const auto xs = (mp.x - mp.y).members();
    const auto ys = (mp.y - mp.x).members();
    for (size_t i = 0; i < xs.size(); ++i) {
      double stay = 1.0;
      for (Element y : ys) {
        const auto& a = mp.edges[xs[i]];
        const auto& b = mp.edges[y];
        if (a.first == b.first || a.first == b.second || a.second == b.first ||
            a.second == b.second) {
          stay *= 1.0 - p;
        }
      }
      EXPECT_NEAR(u.removal[i], 1.0 - stay, kEps);
    }
    if (!ys.empty()) EXPECT_NEAR(u.alpha_hat, p, kEps);
    EXPECT_LE(u.beta_hat, 2 * p + kEps);

    // Gain bound, with the expectation recomputed by the oracle.
    const std::vector<double> w = g.Weights(mp.d.size(), 0, 10);
    const Objective f = Objective::Linear(w);
    const GainBoundReport gb = VerifyGainBound(*map, f, GainBoundKind::kLinear, p);
    EXPECT_GE(gb.slack, -kEps);
    double gain = 0.0;
    for (size_t i = 0; i < ys.size(); ++i) gain += p * w[ys[i]];
    for (size_t i = 0; i < xs.size(); ++i) gain -= u.removal[i] * w[xs[i]];
    EXPECT_NEAR(gb.expected_gain, gain, 1e-7);
  }
}

// ------------------------------------------------------------------- path

PathMultiset PathFor(const MatchingPair& mp, int h) {
  return BuildPathMultiset(BuildKExchangeCertificate(mp.d, mp.x, mp.y), h);
}

TEST(PathMapTest, HOneIsExact) {
  // Path a-b-c-d: X = {ab, cd}, Y = {bc}.
  const Domain d = Domain::Matching(4, {{0, 1}, {1, 2}, {2, 3}});
  const MatchingPair mp{{{0, 1}, {1, 2}, {2, 3}}, d, Subset(3, {0, 2}), Subset(3, {1})};
  for (double p : {0.3, 0.5, 1.0}) {
    const auto map = BuildPathExchangeMap(d, PathFor(mp, 1), p);
    EXPECT_FALSE(map->selects_all());
    const UniformityReport u = CertifyUniformity(*map, p);
    EXPECT_NEAR(u.alpha_hat, p, kEps);
    const auto [a, b] = map->TargetUniformity(p);
    EXPECT_NEAR(a, p, kEps);
    EXPECT_LE(u.beta_hat, b + kEps);
    EXPECT_TRUE(CheckWellFormedExact(*map).ok());
  }
}

TEST(PathMapTest, MatchingHTwo) {
  // Path on 6 vertices, alternating X and Y edges: x y x y x.
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
  const Domain d = Domain::Matching(6, {edges.begin(), edges.end()});
  const MatchingPair mp{edges, d, Subset(5, {0, 2, 4}), Subset(5, {1, 3})};
  const auto map = BuildPathExchangeMap(d, PathFor(mp, 2), 0.5);
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_EQ(u.method, CertifyMethod::kExact);
  EXPECT_GE(u.alpha_hat, 0.125 - kEps);
  EXPECT_LE(u.beta_hat, 0.1875 + kEps);
}

TEST(PathMapTest, RandomMatchingsProperty) {
  oracle::Gen g(82);
  for (int trial = 0; trial < 100; ++trial) {
    const MatchingPair mp = RandomMatchingPair(g, 10);
    const int h = 1 + trial % 2;
    const double p = g.Real(0.2, 1.0);
    const auto map = BuildPathExchangeMap(mp.d, PathFor(mp, h), p);
    const UniformityReport u = CertifyUniformity(*map, p);
    const double a = std::pow(p, h) / h;
    if (!u.vacuous) EXPECT_GE(u.alpha_hat, a - kEps);
    EXPECT_LE(u.beta_hat, a * (2 - 1 + 1.0 / h) + kEps);
    EXPECT_TRUE(CheckWellFormedExact(*map).ok());
    const Objective f = Objective::Linear(g.Weights(mp.d.size(), 0, 10));
    EXPECT_GE(VerifyGainBound(*map, f, GainBoundKind::kLinear, p).slack, -kEps);
    const Objective c = Objective::Coverage(g.Covers(mp.d.size(), 10, 0.3), 10);
    EXPECT_GE(VerifyGainBound(*map, c, GainBoundKind::kSubmodular, p).slack, -kEps);
  }
}

// ------------------------------------------------------------------- rota

TEST(RotaMapTest, UniformBases) {
  const MatroidOracle m = MatroidOracle::Uniform(8, 4);
  const auto map = BuildMatroidRotaMap(m, RotaMode::kBase, Subset(8, {0, 1, 2, 3}),
                                       Subset(8, {4, 5, 6, 7}));
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_NEAR(u.alpha_hat, 0.5, kEps);
  for (double r : u.removal) EXPECT_NEAR(r, 0.5, kEps);
  // Every exchanged set is again a base.
  for (uint64_t r = 0; r < 16; ++r) {
    const Subset rs = Subset::FromMask(8, r << 4);
    for (const auto& o : map->Outcomes(rs)) {
      EXPECT_EQ(map->Apply(o.exchange).size(), 4);
    }
  }
}

TEST(RotaMapTest, IdenticalSets) {
  const MatroidOracle m = MatroidOracle::Uniform(4, 2);
  const auto map =
      BuildMatroidRotaMap(m, RotaMode::kBase, Subset(4, {0, 1}), Subset(4, {0, 1}));
  EXPECT_DOUBLE_EQ(CertifyUniformity(*map, 0.5).beta_hat, 0.0);
}

TEST(RotaMapTest, PartitionPartners) {
  const MatroidOracle m = MatroidOracle::Partition({0, 0, 1, 1, 2, 2}, {1, 1, 1});
  const Subset x(6, {0, 2, 4});
  const Subset y(6, {1, 3, 5});
  const auto map = BuildMatroidRotaMap(m, RotaMode::kBase, x, y);
  for (uint64_t r = 0; r < 8; ++r) {
    Subset rs(6);
    Subset partners(6);
    for (int b = 0; b < 3; ++b) {
      if ((r >> b) & 1) {
        rs.insert(2 * b + 1);
        partners.insert(2 * b);
      }
    }
    const auto outs = map->Outcomes(rs);
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_EQ(outs[0].exchange.removed, partners);
  }
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_NEAR(u.alpha_hat, 0.5, kEps);
  EXPECT_NEAR(u.beta_hat, 0.5, kEps);
}

TEST(RotaMapTest, Errors) {
  const MatroidOracle m = MatroidOracle::Uniform(4, 2);
  EXPECT_THROW(BuildMatroidRotaMap(m, RotaMode::kIndependent, Subset(4, {0, 1, 2}),
                                   Subset(4, {3})),
               std::invalid_argument);
  EXPECT_THROW(BuildMatroidRotaMap(m, RotaMode::kBase, Subset(4, {0}), Subset(4, {1, 2})),
               std::invalid_argument);
}

struct MatroidPair {
  MatroidOracle m;
  std::vector<int> block;
  std::vector<int> caps;
  Subset x;
  Subset y;
};

MatroidPair RandomPartitionPair(oracle::Gen& g, bool bases) {
  const int n = g.Int(2, 12);
  std::vector<int> block(n);
  for (int& b : block) b = g.Int(0, 3);
  std::vector<int> caps = {g.Int(1, 3), g.Int(1, 3), g.Int(1, 3), g.Int(1, 3)};
  auto feas = [&](uint64_t mask) {
    int used[4] = {0, 0, 0, 0};
    for (int e = 0; e < n; ++e) used[block[e]] += oracle::Has(mask, e);
    for (int b = 0; b < 4; ++b) {
      if (used[b] > caps[b]) return false;
    }
    return true;
  };
  const double keep = bases ? 1.0 : 0.7;
  return {MatroidOracle::Partition(block, caps), block, caps,
          Subset::FromMask(n, g.Feasible(n, feas, keep)),
          Subset::FromMask(n, g.Feasible(n, feas, keep))};
}

TEST(RotaMapTest, RandomPartitionMatroidsProperty) {
  oracle::Gen g(83);
  for (int trial = 0; trial < 150; ++trial) {
    const bool bases = trial % 2 == 0;
    const MatroidPair mp = RandomPartitionPair(g, bases);
    if ((mp.y - mp.x).size() > 10) continue;
    const double p = g.Real(0.1, 1.0);
    const auto map = BuildMatroidRotaMap(
        mp.m, bases ? RotaMode::kBase : RotaMode::kIndependent, mp.x, mp.y);
    const UniformityReport u = CertifyUniformity(*map, p);
    if (!u.vacuous) EXPECT_NEAR(u.alpha_hat, p, kEps);
    EXPECT_LE(u.beta_hat, p + kEps);
    if (bases) {
      for (double r : u.removal) EXPECT_NEAR(r, p, kEps);
    }
    // Exchanged sets respect every block capacity (checked from the blocks).
    for (uint64_t r = 0; r < (uint64_t{1} << (mp.y - mp.x).size()); ++r) {
      Subset rs(mp.x.universe_size());
      const auto ys = (mp.y - mp.x).members();
      for (size_t i = 0; i < ys.size(); ++i) {
        if ((r >> i) & 1) rs.insert(ys[i]);
      }
      for (const auto& o : map->Outcomes(rs)) {
        const Subset z = map->Apply(o.exchange);
        std::vector<int> used(4, 0);
        for (Element e : z.members()) ++used[mp.block[e]];
        for (int b = 0; b < 4; ++b) EXPECT_LE(used[b], mp.caps[b]);
        if (bases) EXPECT_EQ(z.size(), mp.x.size());
      }
    }
    const int n = mp.x.universe_size();
    const Objective f = Objective::Linear(g.Weights(n, 0, 10));
    EXPECT_GE(VerifyGainBound(*map, f, GainBoundKind::kLinear, p).slack, -kEps);
    const Objective c = Objective::Coverage(g.Covers(n, 10, 0.3), 10);
    EXPECT_GE(VerifyGainBound(*map, c, GainBoundKind::kSubmodular, p).slack, -kEps);
  }
}

// ------------------------------------------------------------ composition

TEST(CompositionTest, SingleMapIsIdentity) {
  const auto m = BuildMatroidRotaMap(MatroidOracle::Uniform(4, 2), RotaMode::kBase,
                                     Subset(4, {0, 1}), Subset(4, {2, 3}));
  EXPECT_EQ(ComposeMaps({m}).get(), m.get());
}

TEST(CompositionTest, TwoMatroids) {
  // Bipartite matching as the intersection of two partition matroids: edge
  // e = (left[e], right[e]).
  const std::vector<int> left = {0, 0, 1, 1, 2};
  const std::vector<int> right = {0, 1, 1, 2, 2};
  const MatroidOracle ml = MatroidOracle::Partition(left, {1, 1, 1});
  const MatroidOracle mr = MatroidOracle::Partition(right, {1, 1, 1});
  const Subset x(5, {0, 2, 4});
  const Subset y(5, {1, 3});
  const auto a = BuildMatroidRotaMap(ml, RotaMode::kIndependent, x, y);
  const auto b = BuildMatroidRotaMap(mr, RotaMode::kIndependent, x, y);
  const auto comp = ComposeMaps({a, b});
  EXPECT_EQ(comp->kind(), ExchangeMapKind::kComposition);
  const double p = 0.5;
  const UniformityReport ua = CertifyUniformity(*a, p);
  const UniformityReport ub = CertifyUniformity(*b, p);
  const UniformityReport uc = CertifyUniformity(*comp, p);
  EXPECT_NEAR(ua.beta_hat, p, kEps);
  EXPECT_LE(uc.beta_hat, ua.beta_hat + ub.beta_hat + kEps);
  EXPECT_LE(uc.beta_hat, 2 * p + kEps);
  EXPECT_NEAR(uc.alpha_hat, p, kEps);
  const Domain d = Domain::Intersection({ml, mr});
  const auto via_domain = BuildIntersectionMap(d, x, y);
  EXPECT_TRUE(CheckWellFormedExact(*via_domain).ok());
  // Coverage objective on the matching.
  const Objective cov = Objective::Coverage({{0, 1}, {1}, {2}, {2, 3}, {4}}, 5);
  EXPECT_GE(VerifyGainBound(*comp, cov, GainBoundKind::kSubmodular, p).slack, -kEps);
}

TEST(CompositionTest, Errors) {
  const MatroidOracle m = MatroidOracle::Uniform(4, 2);
  const auto a = BuildMatroidRotaMap(m, RotaMode::kBase, Subset(4, {0, 1}), Subset(4, {2, 3}));
  const auto b = BuildMatroidRotaMap(m, RotaMode::kBase, Subset(4, {0, 2}), Subset(4, {1, 3}));
  EXPECT_THROW(ComposeMaps({a, b}), std::invalid_argument);
  EXPECT_THROW(ComposeMaps({}), std::invalid_argument);
  const Domain d = Domain::Matching(3, {{0, 1}, {1, 2}});
  const auto cert = BuildKExchangeCertificate(d, Subset(2, {0}), Subset(2, {1}));
  const auto path = BuildPathExchangeMap(d, BuildPathMultiset(cert, 1), 0.5);
  const auto triv = BuildTrivialKExchangeMap(d, cert);
  EXPECT_THROW(ComposeMaps({triv, path}), std::invalid_argument);
}

TEST(CompositionTest, ThreeUniformMatroidsProperty) {
  oracle::Gen g(84);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.Int(2, 8);
    const std::vector<int> ranks = {g.Int(1, n), g.Int(1, n), g.Int(1, n)};
    const int r = std::min({ranks[0], ranks[1], ranks[2]});
    auto feas = [&](uint64_t m) { return oracle::Pop(m) <= r; };
    const Subset x = Subset::FromMask(n, g.Feasible(n, feas, 0.7));
    const Subset y = Subset::FromMask(n, g.Feasible(n, feas, 0.7));
    const Domain d = Domain::Intersection({MatroidOracle::Uniform(n, ranks[0]),
                                           MatroidOracle::Uniform(n, ranks[1]),
                                           MatroidOracle::Uniform(n, ranks[2])});
    const double p = g.Real(0.1, 1.0);
    const auto map = BuildIntersectionMap(d, x, y);
    const UniformityReport u = CertifyUniformity(*map, p);
    EXPECT_LE(u.beta_hat, 3 * p + kEps);
    if (!u.vacuous) EXPECT_NEAR(u.alpha_hat, p, kEps);
    const WellFormednessReport wf = CheckWellFormedExact(*map);
    EXPECT_TRUE(wf.ok());
    const Objective f = Objective::Linear(g.Weights(n, 0, 10));
    EXPECT_GE(VerifyGainBound(*map, f, GainBoundKind::kLinear, p).slack, -kEps);
    const Objective c = Objective::Coverage(g.Covers(n, 10, 0.3), 10);
    EXPECT_GE(VerifyGainBound(*map, c, GainBoundKind::kSubmodular, p).slack, -kEps);
  }
}

// --------------------------------------------------------------- knapsack

TEST(KnapsackLightTest, EmptyRemovesNothing) {
  const std::vector<double> sizes(7, 0.2);
  const auto map = BuildKnapsackLightMap(sizes, Subset(7, {0, 1, 2, 3}), Subset(7, {4, 5, 6}));
  EXPECT_EQ(map->gamma(), 2);
  EXPECT_FALSE(map->enumerable());
  RandomSource rng(5);
  for (int i = 0; i < 100; ++i) {
    const Exchange ex = map->Draw(Subset(7), rng);
    EXPECT_TRUE(ex.added.empty());
    EXPECT_TRUE(ex.removed.empty());
  }
  EXPECT_THROW(CertifyUniformity(*map, 0.5), std::invalid_argument);
}

TEST(KnapsackLightTest, MonteCarloRemovalAndMembership) {
  const std::vector<double> sizes(7, 0.2);
  const auto map = BuildKnapsackLightMap(sizes, Subset(7, {0, 1, 2, 3}), Subset(7, {4, 5, 6}));
  const std::vector<double> probs(7, 0.5);
  RandomSource rng(11);
  const UniformityReport u = CertifyUniformityMonteCarlo(*map, probs, 100000, rng);
  EXPECT_EQ(u.method, CertifyMethod::kMonteCarlo);
  EXPECT_GT(u.radius, 0.0);
  EXPECT_LE(u.beta_hat, 0.3 + u.radius);
  EXPECT_NEAR(u.alpha_hat, 0.5, u.radius);

  // Membership in 2D via the two-bin oracle, memoized by exchanged mask.
  std::unordered_map<uint64_t, bool> seen;
  RandomSource draws(12);
  int violations = 0;
  for (int i = 0; i < 100000; ++i) {
    Subset r(7);
    for (Element e : {4, 5, 6}) {
      if (draws.Bernoulli(0.5)) r.insert(e);
    }
    const Exchange ex = map->Draw(r, draws);
    if (!ex.added.IsSubsetOf(r)) ++violations;
    const uint64_t z = map->Apply(ex).mask();
    auto it = seen.find(z);
    if (it == seen.end()) it = seen.emplace(z, oracle::TwoBinPartition(sizes, z)).first;
    if (!it->second) ++violations;
  }
  EXPECT_EQ(violations, 0);
  RandomSource wf_rng(13);
  EXPECT_TRUE(CheckWellFormedSampled(*map, probs, 100000, wf_rng).ok());
}

TEST(KnapsackLightTest, Errors) {
  const std::vector<double> sizes = {0.5, 0.2};
  EXPECT_THROW(BuildKnapsackLightMap(sizes, Subset(2, {0}), Subset(2, {1})),
               std::invalid_argument);
  const std::vector<double> full = {0.3, 0.3, 0.3, 0.3};
  EXPECT_THROW(BuildKnapsackLightMap(full, Subset(4, {0, 1, 2, 3}), Subset(4)),
               std::invalid_argument);
}

TEST(KnapsackLightTest, SplitIntoTwo) {
  const std::vector<double> sizes = {0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  const auto split = SplitIntoTwoKnapsacks(sizes, Subset::Full(6));
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->first | split->second, Subset::Full(6));
  const std::vector<double> big = {0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
  EXPECT_FALSE(SplitIntoTwoKnapsacks(big, Subset::Full(7)).has_value());
}

// Random light instances: no sampled exchange leaves 2D, removal stays
// within p of the drawn length, and a Monte-Carlo gain estimate clears the
// bound minus its 3-sigma radius.
TEST(KnapsackLightTest, RandomInstancesProperty) {
  oracle::Gen g(85);
  RandomSource rng(86);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.Int(2, 12);
    std::vector<double> sizes(n);
    for (double& s : sizes) s = g.Real(0.02, 1.0 / 3.0);
    auto feas = [&](uint64_t m) { return oracle::Load(sizes, m) <= 1.0; };
    const Subset x = Subset::FromMask(n, g.Feasible(n, feas));
    const Subset y = Subset::FromMask(n, g.Feasible(n, feas));
    const double p = g.Real(0.1, 1.0);
    const std::vector<double> probs(n, p);
    const auto map = BuildKnapsackLightMap(sizes, x, y);
    std::unordered_map<uint64_t, bool> seen;
    const std::vector<double> w = g.Weights(n, 0, 10);
    const Objective f = Objective::Linear(w);
    const int samples = 4000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < samples; ++i) {
      Subset r(n);
      for (Element e : (y - x).members()) {
        if (rng.Bernoulli(p)) r.insert(e);
      }
      const Exchange ex = map->Draw(r, rng);
      ASSERT_TRUE(ex.added.IsSubsetOf(r));
      ASSERT_TRUE(ex.removed.IsSubsetOf(x - y));
      const uint64_t z = map->Apply(ex).mask();
      auto it = seen.find(z);
      if (it == seen.end()) it = seen.emplace(z, oracle::TwoBinPartition(sizes, z)).first;
      ASSERT_TRUE(it->second);
      const double gain = f.Evaluate(map->Apply(ex)) - f.Evaluate(x);
      sum += gain;
      sq += gain * gain;
    }
    const double mean = sum / samples;
    const double sd = std::sqrt(std::max(0.0, sq / samples - mean * mean));
    const double bound = p * f.Evaluate(y) - p * f.Evaluate(x);
    EXPECT_GE(mean, bound - 3 * sd / std::sqrt(samples) - 1e-9);
  }
}

TEST(KnapsackHeavyTest, Examples) {
  const Domain d = Domain::Knapsack({0.5, 0.5, 0.4, 0.6});
  const auto map = BuildKnapsackHeavyMap(d, Subset(4, {0, 1}), Subset(4, {2, 3}), 2);
  const UniformityReport u = CertifyUniformity(*map, 0.5);
  EXPECT_NEAR(u.beta_hat, 0.75, kEps);
  EXPECT_NEAR(u.alpha_hat, 0.5, kEps);
  const UniformityReport one = CertifyUniformity(*map, 1.0);
  EXPECT_NEAR(one.beta_hat, 1.0, kEps);
  EXPECT_NEAR(one.alpha_hat, 1.0, kEps);
  const auto same = BuildKnapsackHeavyMap(d, Subset(4, {0, 1}), Subset(4, {0, 1}), 2);
  EXPECT_DOUBLE_EQ(CertifyUniformity(*same, 0.5).beta_hat, 0.0);
  EXPECT_THROW(BuildKnapsackHeavyMap(d, Subset(4, {0, 1}), Subset(4, {2, 3}), 1),
               std::invalid_argument);
  EXPECT_TRUE(CheckWellFormedExact(*map).ok());
}

TEST(KnapsackHeavyTest, RandomInstancesProperty) {
  oracle::Gen g(87);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = g.Int(2, 10);
    std::vector<double> sizes(n);
    for (double& s : sizes) s = g.Real(0.34, 1.0);
    const Domain d = Domain::Knapsack(sizes);
    auto feas = [&](uint64_t m) { return oracle::Load(sizes, m) <= 1.0; };
    const Subset x = Subset::FromMask(n, g.Feasible(n, feas));
    const Subset y = Subset::FromMask(n, g.Feasible(n, feas));
    const double p = g.Real(0.1, 1.0);
    const auto map = BuildKnapsackHeavyMap(d, x, y, 2);
    const UniformityReport u = CertifyUniformity(*map, p);
    const int m = (y - x).size();
    EXPECT_NEAR(u.beta_hat, (x - y).empty() ? 0.0 : 1.0 - std::pow(1 - p, m), kEps);
    EXPECT_LE(u.beta_hat, 1.0 - std::pow(1 - p, 2) + kEps);
    if (m > 0) EXPECT_NEAR(u.alpha_hat, p, kEps);
    EXPECT_TRUE(CheckWellFormedExact(*map).ok());
    const Objective f = Objective::Linear(g.Weights(n, 0, 10));
    EXPECT_GE(VerifyGainBound(*map, f, GainBoundKind::kLinear, p).slack, -kEps);
    const Objective c = Objective::Coverage(g.Covers(n, 10, 0.3), 10);
    EXPECT_GE(VerifyGainBound(*map, c, GainBoundKind::kSubmodular, p).slack, -kEps);
  }
}

// ------------------------------------------------------------ certificates

TEST(CertifyTest, ReportJson) {
  const Domain d = Domain::KSetPacking({{1}, {2}, {1}, {2}});
  const auto map = BuildTrivialKExchangeMap(
      d, BuildKExchangeCertificate(d, Subset(4, {0, 1}), Subset(4, {2, 3})));
  const nlohmann::json j = CertifyUniformity(*map, 0.5).ToJson();
  EXPECT_EQ(j["kind"], "trivial-k-exchange");
  EXPECT_EQ(j["method"], "exact");
  EXPECT_DOUBLE_EQ(j["alpha_hat"].get<double>(), 0.5);
  EXPECT_EQ(j["vacuous"], false);
}

TEST(CertifyTest, MonteCarloAgreesWithExact) {
  const Domain d = Domain::KSetPacking({{1, 2}, {1}, {2}});
  const auto map = BuildTrivialKExchangeMap(
      d, BuildKExchangeCertificate(d, Subset(3, {0}), Subset(3, {1, 2})));
  const std::vector<double> probs(3, 0.5);
  RandomSource rng(9);
  const UniformityReport mc = CertifyUniformityMonteCarlo(*map, probs, 20000, rng);
  EXPECT_NEAR(mc.beta_hat, 0.75, mc.radius);
  EXPECT_NEAR(mc.alpha_hat, 0.5, mc.radius);
}

TEST(CertifyTest, LinearBoundNeedsModular) {
  const Domain d = Domain::KSetPacking({{1}, {2}, {1}, {2}});
  const auto map = BuildTrivialKExchangeMap(
      d, BuildKExchangeCertificate(d, Subset(4, {0, 1}), Subset(4, {2, 3})));
  const Objective cov = Objective::Coverage({{0}, {1}, {0}, {1}}, 2);
  EXPECT_THROW(VerifyGainBound(*map, cov, GainBoundKind::kLinear, 0.5),
               std::invalid_argument);
}

}  // namespace
}  // namespace stoq
