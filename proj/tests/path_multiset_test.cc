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

#include "stoq/path_multiset.h"

#include <map>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"

namespace stoq {
namespace {

// Checks the three path properties and the coloring from the certificate
// alone, counting in element ids instead of the graph's local indices.
void OracleCheck(const PathMultiset& pm) {
  const KExchangeCertificate& c = pm.cert;
  const int length = 2 * pm.h;
  auto adjacent = [&](Element a, Element b) {
    if (c.y.contains(a) && !c.y.contains(b)) std::swap(a, b);
    return !c.y.contains(a) && c.y.contains(b) && c.RemovalFor(b).contains(a);
  };
  auto degree = [&](Element v) {
    int d = 0;
    for (Element u : ((c.x - c.y) | (c.y - c.x)).members()) d += adjacent(u, v);
    return d;
  };
  const int64_t n_kh = static_cast<int64_t>(
      std::llround(pm.k * std::pow(pm.k - 1, length - 2)));
  ASSERT_EQ(pm.per_label, n_kh);

  std::map<std::pair<Element, int>, int64_t> counts;
  int64_t total = 0;
  for (const LabeledPath& p : pm.paths) {
    std::vector<Element> els;
    for (int v : p.vertices) els.push_back(pm.graph.vertices[v]);
    // Property 1: simple, consecutive, labels inside [1, 2h].
    ASSERT_GE(p.first_label, 1);
    ASSERT_LE(p.first_label + static_cast<int>(els.size()) - 1, length);
    ASSERT_EQ(std::set<Element>(els.begin(), els.end()).size(), els.size());
    for (size_t i = 0; i + 1 < els.size(); ++i) {
      ASSERT_TRUE(adjacent(els[i], els[i + 1]));
    }
    // Property 2.
    for (size_t i = 0; i < els.size(); ++i) {
      const int label = p.first_label + static_cast<int>(i);
      if (degree(els[i]) != pm.k || label == 1 || label == length) continue;
      int on_path = 0;
      for (Element u : els) on_path += adjacent(els[i], u);
      EXPECT_GE(on_path, 2);
    }
    for (size_t i = 0; i < els.size(); ++i) {
      counts[{els[i], p.first_label + static_cast<int>(i)}] += p.multiplicity;
    }
    total += p.multiplicity;
  }
  // Property 3.
  for (Element v : ((c.x - c.y) | (c.y - c.x)).members()) {
    for (int label = 1; label <= length; ++label) {
      EXPECT_EQ((counts[{v, label}]), n_kh) << "vertex " << v << " label " << label;
    }
  }
  // Coloring: one copy per unit of multiplicity, disjoint footprints inside
  // a class, at most 2 h^2 n(k, 2h) classes.
  ASSERT_EQ(pm.copies(), total);
  EXPECT_EQ(pm.num_colors, 2 * pm.h * pm.h * n_kh);
  std::map<int, uint64_t> used;
  for (int64_t i = 0; i < pm.copies(); ++i) {
    const int color = pm.copy_color[i];
    ASSERT_GE(color, 0);
    ASSERT_LT(color, pm.num_colors);
    uint64_t foot = 0;
    for (int v : pm.paths[pm.copy_path[i]].vertices) {
      const Element e = pm.graph.vertices[v];
      if (c.y.contains(e)) foot |= uint64_t{1} << e;
    }
    EXPECT_EQ(foot, pm.YFootprint(pm.paths[pm.copy_path[i]]));
    EXPECT_EQ(used[color] & foot, 0u);
    used[color] |= foot;
  }
}

TEST(PathMultisetTest, PathsPerLabel) {
  EXPECT_EQ(PathsPerLabel(2, 2), 2);
  EXPECT_EQ(PathsPerLabel(2, 4), 2);
  EXPECT_EQ(PathsPerLabel(3, 2), 3);
  EXPECT_EQ(PathsPerLabel(3, 4), 12);
}

TEST(PathMultisetTest, SingleEdge) {
  // Path a-b-c: X = {ab}, Y = {bc}; the exchange graph is one edge.
  const Domain d = Domain::Matching(3, {{0, 1}, {1, 2}});
  const auto cert = BuildKExchangeCertificate(d, Subset(2, {0}), Subset(2, {1}));
  const PathMultiset pm = BuildPathMultiset(cert, 1);
  EXPECT_EQ(pm.per_label, 2);
  EXPECT_TRUE(VerifyPathMultiset(pm).ok());
  OracleCheck(pm);
  // Each of the 2 vertices sits at each of the 2 labels twice: 8 incidences.
  int64_t incidences = 0;
  for (const auto& p : pm.paths) incidences += p.multiplicity * p.vertices.size();
  EXPECT_EQ(incidences, 8);
}

TEST(PathMultisetTest, EmptyGraph) {
  const Domain d = Domain::Matching(3, {{0, 1}, {1, 2}});
  const auto cert = BuildKExchangeCertificate(d, Subset(2, {0}), Subset(2, {0}));
  const PathMultiset pm = BuildPathMultiset(cert, 1);
  EXPECT_TRUE(pm.paths.empty());
  EXPECT_EQ(pm.copies(), 0);
  EXPECT_TRUE(VerifyPathMultiset(pm).ok());
}

TEST(PathMultisetTest, ThreeVertexPath) {
  // Path a-b-c-d: X = {ab, cd}, Y = {bc}; the exchange graph is x - y - x'.
  const Domain d = Domain::Matching(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto cert =
      BuildKExchangeCertificate(d, Subset(3, {0, 2}), Subset(3, {1}));
  for (int h : {1, 2}) {
    const PathMultiset pm = BuildPathMultiset(cert, h);
    EXPECT_TRUE(VerifyPathMultiset(pm).ok());
    OracleCheck(pm);
  }
}

TEST(PathMultisetTest, DegreeAboveK) {
  // Star: one y meeting three x's only fits a 3-exchange certificate.
  KExchangeCertificate cert{Subset(4, {0, 1, 2}), Subset(4, {3}), 2,
                            {{3, Subset(4, {0, 1, 2})}}};
  EXPECT_THROW(BuildPathMultiset(cert, 1), std::invalid_argument);
  cert.k = 3;
  const PathMultiset pm = BuildPathMultiset(cert, 1);
  OracleCheck(pm);
  EXPECT_THROW(BuildPathMultiset(cert, 0), std::invalid_argument);
}

TEST(PathMultisetTest, DetectsBrokenColoring) {
  const Domain d = Domain::Matching(4, {{0, 1}, {1, 2}, {2, 3}});
  PathMultiset pm =
      BuildPathMultiset(BuildKExchangeCertificate(d, Subset(3, {0, 2}), Subset(3, {1})), 1);
  for (int& c : pm.copy_color) c = 0;
  EXPECT_FALSE(VerifyPathMultiset(pm).proper_coloring);
}

// Random matchings (k = 2) and 3-set packings (k = 3), h in {1, 2}, with at
// most 12 exchange-graph vertices.
TEST(PathMultisetTest, RandomGraphsProperty) {
  oracle::Gen g(71);
  int built = 0;
  for (int trial = 0; trial < 60; ++trial) {
    KExchangeCertificate cert;
    if (trial % 2 == 0) {
      const auto edges = g.Graph(g.Int(4, 8), 0.5);
      const Domain d = Domain::Matching(8, {edges.begin(), edges.end()});
      auto feas = [&](uint64_t m) { return oracle::MatchingFeasible(edges, m); };
      const uint64_t x = g.Feasible(d.size(), feas, 0.8);
      const uint64_t y = g.Feasible(d.size(), feas, 0.8);
      cert = BuildKExchangeCertificate(d, Subset::FromMask(d.size(), x),
                                       Subset::FromMask(d.size(), y));
    } else {
      std::vector<std::vector<int>> sets(g.Int(3, 12));
      for (auto& s : sets) {
        while (s.size() < 3) {
          const int it = g.Int(0, 9);
          if (std::find(s.begin(), s.end(), it) == s.end()) s.push_back(it);
        }
      }
      const Domain d = Domain::KSetPacking(sets);
      auto feas = [&](uint64_t m) { return oracle::SetsDisjoint(sets, m); };
      const uint64_t x = g.Feasible(d.size(), feas);
      const uint64_t y = g.Feasible(d.size(), feas);
      cert = BuildKExchangeCertificate(d, Subset::FromMask(d.size(), x),
                                       Subset::FromMask(d.size(), y));
    }
    if ((cert.x - cert.y).size() + (cert.y - cert.x).size() > 12) continue;
    for (int h : {1, 2}) {
      const PathMultiset pm = BuildPathMultiset(cert, h);
      EXPECT_TRUE(VerifyPathMultiset(pm).ok());
      OracleCheck(pm);
      ++built;
    }
  }
  EXPECT_GE(built, 40);
}

}  // namespace
}  // namespace stoq
