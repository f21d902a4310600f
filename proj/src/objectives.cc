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

#include "stoq/objectives.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace stoq {
namespace {

void CheckNonnegative(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) +
                                  " must be finite and nonnegative");
    }
  }
}

std::vector<double> TabulateAll(const SetFunction& f) {
  const int n = f.size();
  std::vector<double> values(size_t{1} << n);
  for (uint64_t m = 0; m < values.size(); ++m) values[m] = f.EvaluateMask(m);
  return values;
}

}  // namespace

double SetFunction::Evaluate(const Subset& x) const {
  if (x.universe_size() != size()) {
    throw std::invalid_argument("subset universe " +
                                std::to_string(x.universe_size()) +
                                " does not match objective size " +
                                std::to_string(size()));
  }
  return EvaluateMask(x.mask());
}

std::string ObjectiveKindName(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kLinear:
      return "linear";
    case ObjectiveKind::kCoverage:
      return "coverage";
    case ObjectiveKind::kTable:
      return "table";
  }
  return "unknown";
}

Objective Objective::Linear(std::vector<double> weights) {
  if (static_cast<int>(weights.size()) > kMaxElements) {
    throw std::invalid_argument("linear objective over more than 64 elements");
  }
  CheckNonnegative(weights, "linear weights");
  Objective f(ObjectiveKind::kLinear, static_cast<int>(weights.size()));
  f.weights_ = std::move(weights);
  return f;
}

Objective Objective::Coverage(std::vector<std::vector<int>> covers,
                              std::vector<double> item_weights) {
  if (static_cast<int>(covers.size()) > kMaxElements) {
    throw std::invalid_argument("coverage objective over more than 64 elements");
  }
  if (item_weights.size() > 64) {
    throw std::invalid_argument("coverage objective with more than 64 items");
  }
  CheckNonnegative(item_weights, "item weights");
  Objective f(ObjectiveKind::kCoverage, static_cast<int>(covers.size()));
  const int items = static_cast<int>(item_weights.size());
  for (const auto& c : covers) {
    uint64_t m = 0;
    for (int item : c) {
      if (item < 0 || item >= items) {
        throw std::invalid_argument("coverage item id out of range");
      }
      m |= uint64_t{1} << item;
    }
    f.cover_masks_.push_back(m);
  }
  f.item_weights_ = std::move(item_weights);
  return f;
}

Objective Objective::Coverage(std::vector<std::vector<int>> covers,
                              int num_items) {
  return Coverage(std::move(covers), std::vector<double>(num_items, 1.0));
}

Objective Objective::Table(int n, std::vector<double> values) {
  if (n < 0 || n > kMaxAxiomCheckElements) {
    throw std::invalid_argument("table objectives support at most 20 elements");
  }
  if (values.size() != (size_t{1} << n)) {
    throw std::invalid_argument("table objective needs 2^n values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite table value");
  }
  Objective f(ObjectiveKind::kTable, n);
  f.table_ = std::move(values);
  return f;
}

double Objective::EvaluateMask(uint64_t mask) const {
  switch (kind_) {
    case ObjectiveKind::kLinear: {
      double v = 0.0;
      for (uint64_t m = mask; m; m &= m - 1) v += weights_[std::countr_zero(m)];
      return v;
    }
    case ObjectiveKind::kCoverage: {
      uint64_t covered = 0;
      for (uint64_t m = mask; m; m &= m - 1) {
        covered |= cover_masks_[std::countr_zero(m)];
      }
      double v = 0.0;
      for (; covered; covered &= covered - 1) {
        v += item_weights_[std::countr_zero(covered)];
      }
      return v;
    }
    case ObjectiveKind::kTable:
      return table_[mask];
  }
  return 0.0;
}

std::optional<std::vector<double>> Objective::ModularWeights() const {
  if (kind_ == ObjectiveKind::kLinear) return weights_;
  return std::nullopt;
}

nlohmann::json Objective::ToJson() const {
  nlohmann::json j{{"kind", ObjectiveKindName(kind_)}};
  switch (kind_) {
    case ObjectiveKind::kLinear:
      j["weights"] = weights_;
      break;
    case ObjectiveKind::kCoverage: {
      nlohmann::json covers = nlohmann::json::array();
      for (uint64_t m : cover_masks_) {
        covers.push_back(Subset::FromMask(64, m).members());
      }
      j["covers"] = covers;
      j["item_weights"] = item_weights_;
      break;
    }
    case ObjectiveKind::kTable:
      j["n"] = n_;
      j["values"] = table_;
      break;
  }
  return j;
}

Objective Objective::FromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    return Linear(j.at("weights").get<std::vector<double>>());
  }
  if (kind == "coverage") {
    auto covers = j.at("covers").get<std::vector<std::vector<int>>>();
    if (j.contains("item_weights")) {
      return Coverage(std::move(covers),
                      j.at("item_weights").get<std::vector<double>>());
    }
    return Coverage(std::move(covers), j.at("num_items").get<int>());
  }
  if (kind == "table") {
    return Table(j.at("n").get<int>(), j.at("values").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown objective kind '" + kind + "'");
}

RestrictedObjective::RestrictedObjective(const SetFunction& base, Subset mask)
    : base_(&base), mask_(mask) {
  if (mask.universe_size() != base.size()) {
    throw std::invalid_argument("restriction mask over wrong universe");
  }
}

std::optional<std::vector<double>> RestrictedObjective::ModularWeights() const {
  auto w = base_->ModularWeights();
  if (!w) return std::nullopt;
  for (int e = 0; e < size(); ++e) {
    if (!mask_.contains(e)) (*w)[e] = 0.0;
  }
  return w;
}

double MarginalGain(const SetFunction& f, const Subset& x, Element e) {
  if (x.contains(e)) {
    throw std::invalid_argument("marginal gain of element already in the set");
  }
  Subset with = x;
  with.insert(e);
  return f.Evaluate(with) - f.Evaluate(x);
}

AxiomReport CheckAxioms(const SetFunction& f) {
  const int n = f.size();
  if (n > kMaxAxiomCheckElements) {
    throw TooLargeError("axiom check limited to 20 elements");
  }
  const std::vector<double> v = TabulateAll(f);
  AxiomReport report;
  report.normalized = std::abs(v[0]) <= kTolerance;
  report.monotone = true;
  report.submodular = true;
  for (uint64_t x = 0; x < v.size(); ++x) {
    for (int e = 0; e < n; ++e) {
      const uint64_t be = uint64_t{1} << e;
      if (x & be) continue;
      const double gain = v[x | be] - v[x];
      if (gain < -kTolerance) report.monotone = false;
      for (int e2 = e + 1; e2 < n; ++e2) {
        const uint64_t b2 = uint64_t{1} << e2;
        if (x & b2) continue;
        if (v[x | be | b2] - v[x | b2] > gain + kTolerance) {
          report.submodular = false;
        }
      }
    }
    if (!report.monotone && !report.submodular) break;
  }
  return report;
}

double ProductExpectation(const SetFunction& f, std::span<const double> q) {
  const int n = f.size();
  if (n > kMaxExpectationElements) {
    throw TooLargeError("exact expectation limited to 15 elements");
  }
  if (static_cast<int>(q.size()) != n) {
    throw std::invalid_argument("marginal vector has wrong length");
  }
  for (double x : q) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("marginal outside [0, 1]");
    }
  }
  double total = 0.0;
  for (uint64_t m = 0; m < (uint64_t{1} << n); ++m) {
    double w = 1.0;
    for (int e = 0; e < n && w != 0.0; ++e) {
      w *= ((m >> e) & 1u) ? q[e] : 1.0 - q[e];
    }
    if (w != 0.0) total += w * f.EvaluateMask(m);
  }
  return total;
}

double VerifyCoveringLemma(const SetFunction& f, std::span<const double> q,
                           double alpha) {
  for (double x : q) {
    if (x < alpha - kTolerance) {
      throw std::invalid_argument("a marginal lies below alpha");
    }
  }
  const double full = f.EvaluateMask(FullMask(f.size()));
  return ProductExpectation(f, q) - alpha * full;
}

double VerifyCoveringLemma(const SetFunction& f, double alpha) {
  const std::vector<double> q(f.size(), alpha);
  return VerifyCoveringLemma(f, q, alpha);
}

namespace {

// g(T) = f(E) - f(E \ T).
class ComplementLoss final : public SetFunction {
 public:
  explicit ComplementLoss(const SetFunction& f)
      : f_(f), full_mask_(FullMask(f.size())), full_(f.EvaluateMask(full_mask_)) {}
  int size() const override { return f_.size(); }
  double EvaluateMask(uint64_t mask) const override {
    return full_ - f_.EvaluateMask(full_mask_ & ~mask);
  }

 private:
  const SetFunction& f_;
  uint64_t full_mask_;
  double full_;
};

}  // namespace

double VerifyCoveringComplementLemma(const SetFunction& f,
                                     std::span<const double> q, double beta) {
  for (double x : q) {
    if (x > beta + kTolerance) {
      throw std::invalid_argument("a marginal exceeds beta");
    }
  }
  const double full = f.EvaluateMask(FullMask(f.size()));
  return beta * full - ProductExpectation(ComplementLoss(f), q);
}

double VerifyCoveringComplementLemma(const SetFunction& f, double beta) {
  const std::vector<double> q(f.size(), beta);
  return VerifyCoveringComplementLemma(f, q, beta);
}

}  // namespace stoq
