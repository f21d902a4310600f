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

// Exact and Monte-Carlo certification of exchange maps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stoq/exchange.h"

namespace stoq {
namespace {

void CheckProbs(const ExchangeMap& map, std::span<const double> probs) {
  if (static_cast<int>(probs.size()) != map.universe_size()) {
    throw std::invalid_argument("one activation probability per element");
  }
  std::vector<double> pool;
  for (Element e : map.added_pool().members()) pool.push_back(probs[e]);
  ValidateProbabilities(pool);
}

void CheckExact(const ExchangeMap& map) {
  if (!map.enumerable()) {
    throw std::invalid_argument(ExchangeMapKindName(map.kind()) +
                                " map is not exactly enumerable");
  }
  if (map.added_pool().size() > kMaxExactCertifyElements) {
    throw TooLargeError("exact certification supports |Y \\ X| <= " +
                        std::to_string(kMaxExactCertifyElements));
  }
}

// Visits every R subset of Y \ X with its product-distribution weight.
void ForEachR(const ExchangeMap& map, std::span<const double> probs,
              const std::function<void(const Subset&, double)>& visit) {
  const std::vector<Element> pool = map.added_pool().members();
  const uint64_t count = uint64_t{1} << pool.size();
  for (uint64_t local = 0; local < count; ++local) {
    Subset r(map.universe_size());
    double w = 1.0;
    for (size_t i = 0; i < pool.size(); ++i) {
      if ((local >> i) & 1u) {
        r.insert(pool[i]);
        w *= probs[pool[i]];
      } else {
        w *= 1.0 - probs[pool[i]];
      }
    }
    visit(r, w);
  }
}

Subset DrawR(const ExchangeMap& map, std::span<const double> probs,
             RandomSource& rng) {
  Subset r(map.universe_size());
  for (Element e : map.added_pool().members()) {
    if (rng.Bernoulli(probs[e])) r.insert(e);
  }
  return r;
}

void Summarize(const ExchangeMap& map, UniformityReport& rep) {
  rep.kind = map.kind();
  rep.vacuous = map.added_pool().empty();
  rep.alpha_hat = rep.inclusion.empty()
                      ? 1.0
                      : *std::min_element(rep.inclusion.begin(),
                                          rep.inclusion.end());
  rep.beta_hat = rep.removal.empty()
                     ? 0.0
                     : *std::max_element(rep.removal.begin(), rep.removal.end());
}

std::vector<double> Uniform(const ExchangeMap& map, double p) {
  return std::vector<double>(map.universe_size(), p);
}

}  // namespace

std::string CertifyMethodName(CertifyMethod m) {
  return m == CertifyMethod::kExact ? "exact" : "monte-carlo";
}

nlohmann::json UniformityReport::ToJson() const {
  return {{"kind", ExchangeMapKindName(kind)},
          {"alpha_hat", alpha_hat},
          {"beta_hat", beta_hat},
          {"method", CertifyMethodName(method)},
          {"samples", samples},
          {"radius", radius},
          {"vacuous", vacuous}};
}

UniformityReport CertifyUniformity(const ExchangeMap& map,
                                   std::span<const double> probs) {
  CheckProbs(map, probs);
  CheckExact(map);
  const std::vector<Element> ys = map.added_pool().members();
  const std::vector<Element> xs = map.dropped_pool().members();
  UniformityReport rep;
  rep.method = CertifyMethod::kExact;
  rep.inclusion.assign(ys.size(), 0.0);
  rep.removal.assign(xs.size(), 0.0);
  ForEachR(map, probs, [&](const Subset& r, double w) {
    ++rep.samples;
    for (const auto& o : map.Outcomes(r)) {
      const double wo = w * o.weight;
      for (size_t i = 0; i < ys.size(); ++i) {
        if (o.exchange.added.contains(ys[i])) rep.inclusion[i] += wo;
      }
      for (size_t i = 0; i < xs.size(); ++i) {
        if (o.exchange.removed.contains(xs[i])) rep.removal[i] += wo;
      }
    }
  });
  Summarize(map, rep);
  return rep;
}

UniformityReport CertifyUniformity(const ExchangeMap& map, double p) {
  return CertifyUniformity(map, Uniform(map, p));
}

UniformityReport CertifyUniformityMonteCarlo(const ExchangeMap& map,
                                             std::span<const double> probs,
                                             int64_t samples,
                                             RandomSource& rng) {
  CheckProbs(map, probs);
  if (samples <= 0) throw std::invalid_argument("samples must be positive");
  const std::vector<Element> ys = map.added_pool().members();
  const std::vector<Element> xs = map.dropped_pool().members();
  std::vector<int64_t> in(ys.size(), 0);
  std::vector<int64_t> out(xs.size(), 0);
  for (int64_t s = 0; s < samples; ++s) {
    const Exchange ex = map.Draw(DrawR(map, probs, rng), rng);
    for (size_t i = 0; i < ys.size(); ++i) in[i] += ex.added.contains(ys[i]);
    for (size_t i = 0; i < xs.size(); ++i) out[i] += ex.removed.contains(xs[i]);
  }
  UniformityReport rep;
  rep.method = CertifyMethod::kMonteCarlo;
  rep.samples = samples;
  const double n = static_cast<double>(samples);
  double var = 0.0;
  auto fold = [&](const std::vector<int64_t>& counts, std::vector<double>& dst) {
    for (int64_t c : counts) {
      const double q = static_cast<double>(c) / n;
      dst.push_back(q);
      var = std::max(var, q * (1.0 - q));
    }
  };
  fold(in, rep.inclusion);
  fold(out, rep.removal);
  // Floor the variance so an estimate of exactly 0 or 1 still gets a radius.
  rep.radius = 3.0 * std::sqrt(std::max(var, 1.0 / n) / n);
  Summarize(map, rep);
  return rep;
}

WellFormednessReport CheckWellFormedExact(const ExchangeMap& map) {
  CheckExact(map);
  WellFormednessReport rep;
  const std::vector<double> half = Uniform(map, 0.5);
  ForEachR(map, half, [&](const Subset& r, double) {
    for (const auto& o : map.Outcomes(r)) {
      ++rep.checked;
      if (!o.exchange.added.IsSubsetOf(r)) ++rep.subset_violations;
      if (!map.IsMember(map.Apply(o.exchange))) ++rep.membership_violations;
    }
  });
  return rep;
}

WellFormednessReport CheckWellFormedSampled(const ExchangeMap& map,
                                            std::span<const double> probs,
                                            int64_t samples, RandomSource& rng) {
  CheckProbs(map, probs);
  WellFormednessReport rep;
  for (int64_t s = 0; s < samples; ++s) {
    const Subset r = DrawR(map, probs, rng);
    const Exchange ex = map.Draw(r, rng);
    ++rep.checked;
    if (!ex.added.IsSubsetOf(r)) ++rep.subset_violations;
    if (!map.IsMember(map.Apply(ex))) ++rep.membership_violations;
  }
  return rep;
}

GainBoundReport VerifyGainBound(const ExchangeMap& map, const SetFunction& f,
                                GainBoundKind kind,
                                std::span<const double> probs) {
  if (f.size() != map.universe_size()) {
    throw std::invalid_argument("objective and map sizes differ");
  }
  if (kind == GainBoundKind::kLinear && !f.ModularWeights()) {
    throw std::invalid_argument("linear gain bound needs a modular objective");
  }
  const UniformityReport u = CertifyUniformity(map, probs);
  const double fx = f.Evaluate(map.x());
  double gain = 0.0;
  ForEachR(map, probs, [&](const Subset& r, double w) {
    for (const auto& o : map.Outcomes(r)) {
      gain += w * o.weight * (f.Evaluate(map.Apply(o.exchange)) - fx);
    }
  });
  GainBoundReport rep;
  rep.expected_gain = gain;
  rep.alpha_hat = u.alpha_hat;
  rep.beta_hat = u.beta_hat;
  if (kind == GainBoundKind::kLinear) {
    rep.bound = u.alpha_hat * f.Evaluate(map.y()) -
                std::max(u.alpha_hat, u.beta_hat) * fx;
  } else {
    rep.bound = u.alpha_hat * f.Evaluate(map.x() | map.y()) -
                (u.alpha_hat + u.beta_hat) * fx;
  }
  rep.slack = rep.expected_gain - rep.bound;
  return rep;
}

GainBoundReport VerifyGainBound(const ExchangeMap& map, const SetFunction& f,
                                GainBoundKind kind, double p) {
  return VerifyGainBound(map, f, kind, Uniform(map, p));
}

}  // namespace stoq
