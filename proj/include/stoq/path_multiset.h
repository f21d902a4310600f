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

// Labeled path multisets over the bipartite exchange graph of a k-exchange
// certificate, and the proper coloring of their Y-side footprints.
//
// Construction: pad every vertex of degree d < k with k - d dangling stubs,
// each leading into an infinite (k-1)-ary tree, so the padded graph is
// k-regular. In a k-regular graph every vertex sits at every position of
// exactly k (k-1)^{L-2} non-backtracking walks of L vertices. A walk leaves
// the real graph at most once in each direction, so its real part is one
// contiguous segment; the multiset holds these segments with their positions
// as labels. Multiplicities are counted in closed form instead of walking
// the trees. Segments that revisit a real vertex are not simple paths and
// make construction fail; in bipartite graphs this cannot happen for L <= 4.

#ifndef STOQ_PATH_MULTISET_H_
#define STOQ_PATH_MULTISET_H_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stoq/core.h"
#include "stoq/domains.h"

namespace stoq {

// Raised when a verified-by-construction object fails its own verification.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bipartite graph on (X \ Y) u (Y \ X) with x ~ y iff x is in T_y.
struct ExchangeGraph {
  std::vector<Element> vertices;  // X \ Y ascending, then Y \ X ascending
  std::vector<char> y_side;
  std::vector<std::vector<int>> adjacency;  // sorted local indices

  int size() const { return static_cast<int>(vertices.size()); }
  int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
  int max_degree() const;
  bool adjacent(int u, int v) const;
};

ExchangeGraph BuildExchangeGraph(const KExchangeCertificate& cert);

// n(k, L) = k (k-1)^{L-2}: paths per (vertex, label) pair.
int64_t PathsPerLabel(int k, int length);

struct LabeledPath {
  std::vector<int> vertices;  // local indices, in increasing label order
  int first_label = 1;
  int64_t multiplicity = 1;

  int last_label() const {
    return first_label + static_cast<int>(vertices.size()) - 1;
  }
  // 0 when v is not on the path.
  int LabelOf(int v) const;
};

struct PathMultiset {
  KExchangeCertificate cert;
  ExchangeGraph graph;
  int k = 2;
  int h = 1;  // labels run over 1..2h
  int64_t per_label = 0;  // n(k, 2h)
  std::vector<LabeledPath> paths;  // distinct labeled paths

  // Expanded copies: copy i is paths[copy_path[i]] and has color
  // copy_color[i] in [0, num_colors).
  std::vector<int> copy_path;
  std::vector<int> copy_color;
  int num_colors = 0;  // 2 h^2 n(k, 2h)

  int length() const { return 2 * h; }
  int64_t copies() const { return static_cast<int64_t>(copy_path.size()); }
  // Element mask of Y-side vertices on a path.
  uint64_t YFootprint(const LabeledPath& p) const;
};

struct PathMultisetCheck {
  bool consecutive_labels = false;  // simple, adjacent, labels in [1, 2h]
  bool degree_condition = false;    // saturated interior vertices see 2 nbrs
  bool exact_counts = false;        // n(k, 2h) per (vertex, label)
  bool proper_coloring = false;
  bool color_budget = false;        // colors used <= 2 h^2 n(k, 2h)

  bool ok() const {
    return consecutive_labels && degree_condition && exact_counts &&
           proper_coloring && color_budget;
  }
};

PathMultisetCheck VerifyPathMultiset(const PathMultiset& pm);

// Builds and verifies. Throws ConstructionError if verification fails and
// std::invalid_argument when the exchange graph exceeds degree k (k is
// max(cert.k, 2)).
PathMultiset BuildPathMultiset(const KExchangeCertificate& cert, int h);

}  // namespace stoq

#endif  // STOQ_PATH_MULTISET_H_
