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

#include "stoq/core.h"

#include <algorithm>
#include <sstream>

namespace stoq {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

void CheckUniverseSize(int n) {
  if (n < 0 || n > kMaxElements) {
    throw std::invalid_argument("universe size " + std::to_string(n) +
                                " outside [0, 64]");
  }
}

}  // namespace

GroundSet::GroundSet(int size, std::vector<std::string> names)
    : n(size), labels(std::move(names)) {
  CheckUniverseSize(n);
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("label count does not match ground set size");
  }
}

std::string GroundSet::Label(Element e) const {
  if (e < 0 || e >= n) throw std::out_of_range("element outside ground set");
  return labels.empty() ? std::to_string(e) : labels[e];
}

Subset::Subset(int universe_size) : n_(universe_size) {
  CheckUniverseSize(universe_size);
}

Subset::Subset(int universe_size, std::initializer_list<Element> members)
    : Subset(universe_size) {
  for (Element e : members) insert(e);
}

Subset Subset::FromMask(int universe_size, uint64_t mask) {
  Subset s(universe_size);
  if (mask & ~FullMask(universe_size)) {
    throw std::invalid_argument("mask has bits outside the universe");
  }
  s.bits_ = mask;
  return s;
}

Subset Subset::FromElements(int universe_size, std::span<const Element> xs) {
  Subset s(universe_size);
  for (Element e : xs) s.insert(e);
  return s;
}

Subset Subset::Full(int universe_size) {
  return FromMask(universe_size, FullMask(universe_size));
}

Subset& Subset::insert(Element e) {
  if (e < 0 || e >= n_) {
    throw std::out_of_range("element " + std::to_string(e) +
                            " outside universe of size " + std::to_string(n_));
  }
  bits_ |= uint64_t{1} << e;
  return *this;
}

Subset& Subset::erase(Element e) {
  if (e < 0 || e >= n_) {
    throw std::out_of_range("element " + std::to_string(e) +
                            " outside universe of size " + std::to_string(n_));
  }
  bits_ &= ~(uint64_t{1} << e);
  return *this;
}

std::vector<Element> Subset::members() const {
  std::vector<Element> out;
  out.reserve(size());
  for (uint64_t m = bits_; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

Subset Subset::complement() const {
  return FromMask(n_, ~bits_ & FullMask(n_));
}

bool Subset::IsSubsetOf(const Subset& other) const {
  CheckSameUniverse(other);
  return (bits_ & ~other.bits_) == 0;
}

Subset Subset::operator|(const Subset& o) const {
  CheckSameUniverse(o);
  return FromMask(n_, bits_ | o.bits_);
}

Subset Subset::operator&(const Subset& o) const {
  CheckSameUniverse(o);
  return FromMask(n_, bits_ & o.bits_);
}

Subset Subset::operator-(const Subset& o) const {
  CheckSameUniverse(o);
  return FromMask(n_, bits_ & ~o.bits_);
}

std::string Subset::ToString() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (Element e : members()) {
    if (!first) os << ',';
    os << e;
    first = false;
  }
  os << '}';
  return os.str();
}

void Subset::CheckSameUniverse(const Subset& o) const {
  if (n_ != o.n_) {
    throw std::invalid_argument("subsets over different universes");
  }
}

bool LexLess(uint64_t a, uint64_t b) {
  const uint64_t diff = a ^ b;
  if (diff == 0) return false;
  const int d = std::countr_zero(diff);
  // Both lists agree below d. The list holding d continues with d; the other
  // continues with its next element above d, or ends (and is then a prefix).
  const uint64_t above = d == 63 ? 0 : ~uint64_t{0} << (d + 1);
  if ((a >> d) & 1u) return (b & above) != 0;
  return (a & above) == 0;
}

RandomSource::RandomSource(uint64_t seed) : seed_(seed), engine_(seed) {}

uint64_t RandomSource::NextU64() {
  ++position_;
  return engine_();
}

double RandomSource::Uniform01() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RandomSource::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform01();
}

bool RandomSource::Bernoulli(double p) {
  if (p >= 1.0) {
    NextU64();
    return true;
  }
  return Uniform01() < p;
}

uint64_t RandomSource::UniformInt(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("UniformInt bound must be > 0");
  // Reject the 2^64 mod bound smallest draws so the rest split evenly.
  const uint64_t threshold = (uint64_t{0} - bound) % bound;
  uint64_t x;
  do {
    x = NextU64();
  } while (x < threshold);
  return x % bound;
}

int64_t RandomSource::UniformInt(int64_t lo, int64_t hi) {
  if (hi < lo) throw std::invalid_argument("UniformInt: empty range");
  const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(NextU64());
  return lo + static_cast<int64_t>(UniformInt(span));
}

RandomSource RandomSource::Child(std::string_view label) const {
  return RandomSource(MixSeed(seed_, Fnv1a(label)));
}

RandomSource RandomSource::Child(uint64_t index) const {
  return RandomSource(MixSeed(seed_, SplitMix64(index ^ 0xA5A5A5A5ull)));
}

uint64_t MixSeed(uint64_t seed, uint64_t key) {
  return SplitMix64(SplitMix64(seed) ^ key);
}

double ActivationScenario::p_min() const {
  if (probs.empty()) return 1.0;
  return *std::min_element(probs.begin(), probs.end());
}

void ValidateProbabilities(std::span<const double> probs) {
  if (static_cast<int>(probs.size()) > kMaxElements) {
    throw std::invalid_argument("more than 64 activation probabilities");
  }
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] <= 1.0)) {
      throw std::invalid_argument("activation probability of element " +
                                  std::to_string(i) + " outside (0, 1]");
    }
  }
}

ActivationScenario SampleActivation(std::span<const double> probs,
                                    RandomSource& rng) {
  ValidateProbabilities(probs);
  const int n = static_cast<int>(probs.size());
  ActivationScenario s{std::vector<double>(probs.begin(), probs.end()),
                       Subset(n)};
  for (int e = 0; e < n; ++e) {
    if (rng.Bernoulli(probs[e])) s.active.insert(e);
  }
  return s;
}

ActivationScenario MakeScenario(std::vector<double> probs, Subset active) {
  ValidateProbabilities(probs);
  if (active.universe_size() != static_cast<int>(probs.size())) {
    throw std::invalid_argument("active set universe does not match probs");
  }
  return ActivationScenario{std::move(probs), active};
}

QueryTranscript::QueryTranscript(int universe_size)
    : n_(universe_size),
      queried_(universe_size),
      revealed_active_(universe_size) {}

int QueryTranscript::Revealed(Element e) const {
  if (!queried_.contains(e)) return -1;
  return revealed_active_.contains(e) ? 1 : 0;
}

int QueryTranscript::adaptivity() const {
  return static_cast<int>(std::count_if(
      rounds_.begin(), rounds_.end(), [](const Subset& r) { return !r.empty(); }));
}

void QueryTranscript::ApplyRound(const Subset& targets,
                                 const ActivationScenario& scenario) {
  if (targets.universe_size() != n_ || scenario.size() != n_) {
    throw std::invalid_argument("round targets or scenario over wrong universe");
  }
  rounds_.push_back(targets);
  const Subset fresh = targets - queried_;
  queried_ = queried_ | fresh;
  revealed_active_ = revealed_active_ | (fresh & scenario.active);
}

QueryTranscript ApplyRound(QueryTranscript transcript, const Subset& targets,
                           const ActivationScenario& scenario) {
  transcript.ApplyRound(targets, scenario);
  return transcript;
}

KnowledgeState GetKnowledgeState(const QueryTranscript& transcript) {
  const Subset& q = transcript.queried();
  const Subset& a = transcript.revealed_active();
  return KnowledgeState{a, q - a, q.complement()};
}

nlohmann::json ToJson(const Subset& s) { return s.members(); }

nlohmann::json ToJson(const ActivationScenario& s) {
  return nlohmann::json{{"probs", s.probs}, {"active", ToJson(s.active)}};
}

Subset SubsetFromJson(int universe_size, const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("subset must be a JSON array");
  Subset s(universe_size);
  for (const auto& v : j) s.insert(v.get<Element>());
  return s;
}

}  // namespace stoq
