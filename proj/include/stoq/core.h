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

// Ground sets, subsets, activation scenarios, query transcripts and seeded
// randomness. Everything else in the library is expressed in these terms.

#ifndef STOQ_CORE_H_
#define STOQ_CORE_H_

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace stoq {

using Element = int;

// Subsets are stored as 64-bit masks, so a ground set holds at most 64
// elements. Exhaustive routines impose their own, smaller caps.
inline constexpr int kMaxElements = 64;

// Absolute tolerance used for every floating-point comparison of objective
// values, probabilities and knapsack loads.
inline constexpr double kTolerance = 1e-9;

// Raised when an exhaustive routine is asked to enumerate more than it can.
class TooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct GroundSet {
  int n = 0;
  std::vector<std::string> labels;  // Empty, or exactly n display names.

  explicit GroundSet(int size = 0, std::vector<std::string> names = {});
  std::string Label(Element e) const;
};

// A subset of {0, ..., n-1}. Binary operations require equal universes.
class Subset {
 public:
  Subset() = default;
  explicit Subset(int universe_size);
  Subset(int universe_size, std::initializer_list<Element> members);

  static Subset FromMask(int universe_size, uint64_t mask);
  static Subset FromElements(int universe_size, std::span<const Element> xs);
  static Subset Full(int universe_size);

  int universe_size() const { return n_; }
  uint64_t mask() const { return bits_; }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }

  bool contains(Element e) const {
    return e >= 0 && e < n_ && ((bits_ >> e) & 1u);
  }
  Subset& insert(Element e);
  Subset& erase(Element e);

  // Sorted member list.
  std::vector<Element> members() const;

  Subset complement() const;
  bool IsSubsetOf(const Subset& other) const;

  Subset operator|(const Subset& o) const;
  Subset operator&(const Subset& o) const;
  Subset operator-(const Subset& o) const;

  friend bool operator==(const Subset& a, const Subset& b) = default;

  std::string ToString() const;

 private:
  void CheckSameUniverse(const Subset& o) const;

  int n_ = 0;
  uint64_t bits_ = 0;
};

// Lexicographic order on sorted member lists ({0} < {0,1} < {1}).
bool LexLess(uint64_t a, uint64_t b);
inline bool LexLess(const Subset& a, const Subset& b) {
  return LexLess(a.mask(), b.mask());
}

inline uint64_t FullMask(int n) {
  return n >= 64 ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
}

// Seeded 64-bit stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the derived distributions below are written out
// by hand so draws are bit-identical across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  uint64_t seed() const { return seed_; }
  uint64_t position() const { return position_; }

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform01();
  double Uniform(double lo, double hi);
  bool Bernoulli(double p);
  // Uniform on [0, bound). bound must be positive.
  uint64_t UniformInt(uint64_t bound);
  // Uniform on [lo, hi], inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi);

  // Independent, reproducible streams keyed by a label or index. Children
  // depend only on (seed, key), never on how far this stream has advanced.
  RandomSource Child(std::string_view label) const;
  RandomSource Child(uint64_t index) const;

 private:
  uint64_t seed_;
  uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

uint64_t MixSeed(uint64_t seed, uint64_t key);

struct ActivationScenario {
  std::vector<double> probs;
  Subset active;

  int size() const { return static_cast<int>(probs.size()); }
  double p_min() const;
};

// Validates every probability lies in (0, 1].
void ValidateProbabilities(std::span<const double> probs);

ActivationScenario SampleActivation(std::span<const double> probs,
                                    RandomSource& rng);

// Scenario with a prescribed active set (tests and degenerate cases).
ActivationScenario MakeScenario(std::vector<double> probs, Subset active);

// Rounds issued so far and what they revealed. Re-querying an element is a
// no-op on the revealed state; a round with nonempty targets still counts
// toward adaptivity, an empty one does not.
class QueryTranscript {
 public:
  explicit QueryTranscript(int universe_size);

  int universe_size() const { return n_; }
  const std::vector<Subset>& rounds() const { return rounds_; }
  const Subset& queried() const { return queried_; }
  const Subset& revealed_active() const { return revealed_active_; }

  // -1 when e has not been queried, otherwise 1 (active) or 0 (inactive).
  int Revealed(Element e) const;

  int adaptivity() const;
  int queries_total() const { return queried_.size(); }

  void ApplyRound(const Subset& targets, const ActivationScenario& scenario);

 private:
  int n_;
  std::vector<Subset> rounds_;
  Subset queried_;
  Subset revealed_active_;
};

// Functional form of QueryTranscript::ApplyRound.
QueryTranscript ApplyRound(QueryTranscript transcript, const Subset& targets,
                           const ActivationScenario& scenario);

struct KnowledgeState {
  Subset known_active;
  Subset known_inactive;
  Subset unknown;
};

KnowledgeState GetKnowledgeState(const QueryTranscript& transcript);

// JSON: subsets are sorted id lists, scenarios {probs, active}.
nlohmann::json ToJson(const Subset& s);
nlohmann::json ToJson(const ActivationScenario& s);
Subset SubsetFromJson(int universe_size, const nlohmann::json& j);

}  // namespace stoq

#endif  // STOQ_CORE_H_
