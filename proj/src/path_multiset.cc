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

#include <algorithm>
#include <map>
#include <string>

namespace stoq {
namespace {

constexpr int64_t kMaxCopies = 2'000'000;

int64_t IntPow(int64_t base, int exp) {
  int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Number of padded non-backtracking walks of `length` vertices whose real
// part is a segment of `len` vertices placed at labels [a, a + len - 1].
int64_t SegmentMultiplicity(int k, int length, int len, int a, int deg_first,
                            int deg_last) {
  const int b = a + len - 1;
  const int64_t left =
      a == 1 ? 1 : (k - deg_first) * IntPow(k - 1, a - 2);
  int64_t right;
  if (b == length) {
    right = 1;
  } else if (len == 1 && a > 1) {
    // Entered and left through two distinct stubs of the same vertex.
    right = (k - deg_last - 1) * IntPow(k - 1, length - b - 1);
  } else {
    right = (k - deg_last) * IntPow(k - 1, length - b - 1);
  }
  return std::max<int64_t>(left, 0) * std::max<int64_t>(right, 0);
}

}  // namespace

int ExchangeGraph::max_degree() const {
  int d = 0;
  for (const auto& a : adjacency) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

bool ExchangeGraph::adjacent(int u, int v) const {
  return std::binary_search(adjacency[u].begin(), adjacency[u].end(), v);
}

ExchangeGraph BuildExchangeGraph(const KExchangeCertificate& cert) {
  ExchangeGraph g;
  std::map<Element, int> local;
  for (Element e : cert.dropped().members()) {
    local[e] = g.size();
    g.vertices.push_back(e);
    g.y_side.push_back(0);
  }
  for (Element e : cert.added().members()) {
    local[e] = g.size();
    g.vertices.push_back(e);
    g.y_side.push_back(1);
  }
  g.adjacency.assign(g.size(), {});
  for (const auto& [ey, t] : cert.removal) {
    const int yv = local.at(ey);
    for (Element ex : t.members()) {
      const auto it = local.find(ex);
      if (it == local.end()) {
        throw std::invalid_argument("removal set leaves X \\ Y");
      }
      g.adjacency[yv].push_back(it->second);
      g.adjacency[it->second].push_back(yv);
    }
  }
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  return g;
}

int64_t PathsPerLabel(int k, int length) {
  if (k < 2 || length < 2) {
    throw std::invalid_argument("path counts need k >= 2 and length >= 2");
  }
  return k * IntPow(k - 1, length - 2);
}

int LabeledPath::LabelOf(int v) const {
  const auto it = std::find(vertices.begin(), vertices.end(), v);
  if (it == vertices.end()) return 0;
  return first_label + static_cast<int>(it - vertices.begin());
}

uint64_t PathMultiset::YFootprint(const LabeledPath& p) const {
  uint64_t m = 0;
  for (int v : p.vertices) {
    if (graph.y_side[v]) m |= uint64_t{1} << graph.vertices[v];
  }
  return m;
}

PathMultisetCheck VerifyPathMultiset(const PathMultiset& pm) {
  const ExchangeGraph& g = pm.graph;
  const int length = pm.length();
  PathMultisetCheck check;

  check.consecutive_labels = true;
  check.degree_condition = true;
  std::vector<std::vector<int64_t>> counts(g.size(),
                                           std::vector<int64_t>(length + 1, 0));
  for (const LabeledPath& p : pm.paths) {
    const int len = static_cast<int>(p.vertices.size());
    if (len == 0 || p.first_label < 1 || p.last_label() > length ||
        p.multiplicity <= 0) {
      check.consecutive_labels = false;
      continue;
    }
    std::vector<int> sorted = p.vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      check.consecutive_labels = false;
    }
    for (int i = 0; i + 1 < len; ++i) {
      if (!g.adjacent(p.vertices[i], p.vertices[i + 1])) {
        check.consecutive_labels = false;
      }
    }
    for (int i = 0; i < len; ++i) {
      const int v = p.vertices[i];
      const int label = p.first_label + i;
      counts[v][label] += p.multiplicity;
      if (g.degree(v) == pm.k && label != 1 && label != length) {
        int seen = 0;
        for (int u : p.vertices) seen += g.adjacent(v, u) ? 1 : 0;
        if (seen < 2) check.degree_condition = false;
      }
    }
  }

  check.exact_counts = true;
  for (int v = 0; v < g.size(); ++v) {
    for (int label = 1; label <= length; ++label) {
      if (counts[v][label] != pm.per_label) check.exact_counts = false;
    }
  }

  check.proper_coloring = pm.copy_color.size() == pm.copy_path.size();
  int used = 0;
  std::vector<std::vector<char>> taken(g.size());
  for (size_t i = 0; i < pm.copy_path.size() && check.proper_coloring; ++i) {
    const int c = pm.copy_color[i];
    if (c < 0) {
      check.proper_coloring = false;
      break;
    }
    used = std::max(used, c + 1);
    for (int v : pm.paths[pm.copy_path[i]].vertices) {
      if (!g.y_side[v]) continue;
      auto& t = taken[v];
      if (static_cast<int>(t.size()) <= c) t.resize(c + 1, 0);
      if (t[c]) check.proper_coloring = false;
      t[c] = 1;
    }
  }
  check.color_budget = used <= pm.num_colors &&
                       pm.num_colors == 2 * pm.h * pm.h * pm.per_label;
  return check;
}

PathMultiset BuildPathMultiset(const KExchangeCertificate& cert, int h) {
  if (h < 1) throw std::invalid_argument("path multiset needs h >= 1");
  PathMultiset pm;
  pm.cert = cert;
  pm.graph = BuildExchangeGraph(cert);
  pm.k = std::max(cert.k, 2);
  pm.h = h;
  const int length = pm.length();
  pm.per_label = PathsPerLabel(pm.k, length);
  const ExchangeGraph& g = pm.graph;
  if (g.max_degree() > pm.k) {
    throw std::invalid_argument("exchange graph degree " +
                                std::to_string(g.max_degree()) + " exceeds k = " +
                                std::to_string(pm.k));
  }

  // Enumerate real non-backtracking walks of up to `length` vertices.
  std::vector<int> walk;
  auto emit = [&]() {
    const int len = static_cast<int>(walk.size());
    for (int a = 1; a + len - 1 <= length; ++a) {
      const int64_t mult = SegmentMultiplicity(
          pm.k, length, len, a, g.degree(walk.front()), g.degree(walk.back()));
      if (mult > 0) pm.paths.push_back(LabeledPath{walk, a, mult});
    }
  };
  auto extend = [&](auto&& self) -> void {
    emit();
    if (static_cast<int>(walk.size()) == length) return;
    const int last = walk.back();
    const int prev = walk.size() >= 2 ? walk[walk.size() - 2] : -1;
    for (int u : g.adjacency[last]) {
      if (u == prev) continue;
      if (std::find(walk.begin(), walk.end(), u) != walk.end()) {
        throw ConstructionError(
            "exchange graph has a cycle shorter than the path length " +
            std::to_string(length) + "; walks are not simple");
      }
      walk.push_back(u);
      self(self);
      walk.pop_back();
    }
  };
  for (int v = 0; v < g.size(); ++v) {
    walk.assign(1, v);
    extend(extend);
  }

  // Expand copies and color greedily on the intersection graph of their
  // Y-side footprints; every y lies in 2h n(k,2h) copies, so greedy needs at
  // most h (2h n - 1) + 1 colors, within the 2 h^2 n budget.
  pm.num_colors = static_cast<int>(2 * h * h * pm.per_label);
  int64_t total = 0;
  for (const auto& p : pm.paths) total += p.multiplicity;
  if (total > kMaxCopies) {
    throw ConstructionError("path multiset too large to expand");
  }
  std::vector<std::vector<char>> used(g.size(),
                                      std::vector<char>(pm.num_colors, 0));
  for (int pi = 0; pi < static_cast<int>(pm.paths.size()); ++pi) {
    const auto& p = pm.paths[pi];
    for (int64_t c = 0; c < p.multiplicity; ++c) {
      int color = 0;
      while (color < pm.num_colors) {
        bool clash = false;
        for (int v : p.vertices) {
          if (g.y_side[v] && used[v][color]) {
            clash = true;
            break;
          }
        }
        if (!clash) break;
        ++color;
      }
      if (color == pm.num_colors) {
        throw ConstructionError("greedy coloring exceeded the color budget");
      }
      for (int v : p.vertices) {
        if (g.y_side[v]) used[v][color] = 1;
      }
      pm.copy_path.push_back(pi);
      pm.copy_color.push_back(color);
    }
  }

  const PathMultisetCheck check = VerifyPathMultiset(pm);
  if (!check.ok()) {
    throw ConstructionError("path multiset failed verification");
  }
  return pm;
}

}  // namespace stoq
