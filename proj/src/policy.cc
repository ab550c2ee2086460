// Copyright 2026 The Repgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repgame/policy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "repgame/errors.h"

namespace repgame {
namespace {

std::uint64_t PointHash(std::uint64_t seed, const DecisionPoint& point) {
  return DeriveSeed({seed, Fnv1a(TrajectoryKey(point.state.trajectory)),
                     static_cast<std::uint64_t>(point.context.size())});
}

}  // namespace

DecisionPoint PointFor(const GameSpec& spec, const Context& context,
                       const EpisodeState& state, int episode) {
  return DecisionPoint{spec, context, state,
                       WhoseTurn(state.h, spec.starter), episode};
}

Action SampleAction(const ActionDistribution& dist, Rng& rng) {
  if (dist.empty()) throw InvalidArgument("cannot sample an empty distribution");
  std::vector<double> w;
  w.reserve(dist.size());
  for (const auto& wa : dist) w.push_back(wa.prob);
  return dist[SampleIndex(w, rng)].action;
}

Action DistributionPolicy::Act(const DecisionPoint& point, Rng& rng) {
  return SampleAction(Compute(point), rng);
}

ActionDistribution Canonicalize(ActionDistribution dist) {
  ActionDistribution out;
  for (const auto& wa : dist) {
    if (!(wa.prob > 0.0)) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const WeightedAction& o) {
      return o.action == wa.action;
    });
    if (it == out.end()) {
      out.push_back(wa);
    } else {
      it->prob += wa.prob;
    }
  }
  double total = 0.0;
  for (const auto& wa : out) total += wa.prob;
  if (total > 0.0) {
    for (auto& wa : out) wa.prob /= total;
  }
  return out;
}

void CheckDistribution(const ActionDistribution& dist,
                       const DecisionPoint& point, double tolerance) {
  double total = 0.0;
  for (const auto& wa : dist) {
    if (wa.prob < 0.0) throw InvalidArgument("negative action probability");
    if (!ValidateAction(point.state, point.spec, wa.action)) {
      throw InvalidArgument("distribution puts mass on illegal action " +
                            DescribeAction(wa.action, point.spec));
    }
    total += wa.prob;
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw InvalidArgument("action probabilities sum to " +
                          std::to_string(total));
  }
}

ActionDistribution UniformLegalPolicy::Compute(const DecisionPoint& point) const {
  auto legal = LegalActions(point.state, point.spec);
  ActionDistribution out;
  out.reserve(legal.size());
  const double p = 1.0 / static_cast<double>(legal.size());
  for (const auto& a : legal) out.push_back({a, p});
  return out;
}

void TablePolicy::Set(const std::vector<Turn>& prefix, const Action& a) {
  std::string key = TrajectoryKey(prefix);
  auto it = std::lower_bound(
      table_.begin(), table_.end(), key,
      [](const auto& entry, const std::string& k) { return entry.first < k; });
  if (it != table_.end() && it->first == key) {
    it->second = a;
  } else {
    table_.insert(it, {std::move(key), a});
  }
}

std::optional<Action> TablePolicy::Lookup(const std::vector<Turn>& prefix) const {
  const std::string key = TrajectoryKey(prefix);
  auto it = std::lower_bound(
      table_.begin(), table_.end(), key,
      [](const auto& entry, const std::string& k) { return entry.first < k; });
  if (it != table_.end() && it->first == key) return it->second;
  return std::nullopt;
}

ActionDistribution TablePolicy::Compute(const DecisionPoint& point) const {
  if (auto a = Lookup(point.state.trajectory)) return {{*a, 1.0}};
  auto legal = LegalActions(point.state, point.spec);
  return {{legal.front(), 1.0}};
}

RandomTabularPolicy::RandomTabularPolicy(std::uint64_t seed, int support,
                                         std::string name)
    : seed_(seed), support_(support), name_(std::move(name)) {}

ActionDistribution RandomTabularPolicy::Compute(const DecisionPoint& point) const {
  auto legal = LegalActions(point.state, point.spec);
  Rng rng(PointHash(seed_, point));
  std::vector<std::size_t> order(legal.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t k = legal.size();
  if (support_ > 0 && static_cast<std::size_t>(support_) < k) {
    // Partial Fisher-Yates with our own draws keeps this library-independent.
    for (std::size_t i = 0; i < static_cast<std::size_t>(support_); ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
      std::swap(order[i], order[j]);
    }
    k = static_cast<std::size_t>(support_);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  ActionDistribution out;
  out.reserve(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 0.05 + Uniform01(rng);
    out.push_back({legal[order[i]], w});
    total += w;
  }
  for (auto& wa : out) wa.prob /= total;
  return out;
}

PerturbedPolicy::PerturbedPolicy(std::shared_ptr<const PolicyProvider> base,
                                 std::shared_ptr<const PolicyProvider> noise,
                                 double max_lambda, std::uint64_t seed)
    : base_(std::move(base)),
      noise_(std::move(noise)),
      max_lambda_(max_lambda),
      seed_(seed) {}

ActionDistribution PerturbedPolicy::Compute(const DecisionPoint& point) const {
  auto base = base_->Distribution(point);
  auto noise = noise_->Distribution(point);
  if (!base || !noise) {
    throw InvalidArgument("perturbed policy needs exact component distributions");
  }
  Rng rng(PointHash(seed_, point));
  const double lambda = max_lambda_ * Uniform01(rng);
  ActionDistribution mix;
  for (const auto& wa : *base) mix.push_back({wa.action, (1.0 - lambda) * wa.prob});
  for (const auto& wa : *noise) mix.push_back({wa.action, lambda * wa.prob});
  return Canonicalize(std::move(mix));
}

ActionDistribution ConstantPolicy::Compute(const DecisionPoint& point) const {
  if (ValidateAction(point.state, point.spec, action_)) return {{action_, 1.0}};
  return {{Action::Wait(kEmptyMessage), 1.0}};
}

}  // namespace repgame
