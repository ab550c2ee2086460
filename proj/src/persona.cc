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

#include "repgame/persona.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repgame/errors.h"

namespace repgame {
namespace {

// Counter-offers below this share read as a lowball to the emotional family.
constexpr double kLowballShare = 0.15;
constexpr int kJitterRadius = 2;

int Message(const GameSpec& spec, std::string_view label, int fallback) {
  int idx = MessageIndex(spec, label);
  if (idx != kEmptyMessage) return idx;
  return fallback % spec.alphabet_size();
}

std::vector<Payload> BuildLadder(const GameSpec& spec, Agent side) {
  struct Entry {
    Payload payload;
    double own;
    double other;
  };
  std::vector<Entry> all;
  for (const Payload& p : OfferPayloads(spec)) {
    auto [r1, r2] = DealRewards(spec, p);
    const double own = side == Agent::kOne ? r1 : r2;
    const double other = side == Agent::kOne ? r2 : r1;
    all.push_back({p, own, other});
  }
  std::vector<Entry> zopa;
  for (const Entry& e : all) {
    if (e.own >= 0.0 && e.other >= 0.0) zopa.push_back(e);
  }
  std::vector<Entry>& pool = zopa.empty() ? all : zopa;
  std::stable_sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
    if (a.own != b.own) return a.own > b.own;
    return a.other > b.other;
  });
  // Pareto sweep: keep a point only if it gives the other side strictly more
  // than every point that is better for us.
  std::vector<Payload> ladder;
  double best_other = -std::numeric_limits<double>::infinity();
  double last_own = std::numeric_limits<double>::infinity();
  for (const Entry& e : pool) {
    if (e.own == last_own) continue;  // dominated by the first of its own level
    if (e.other > best_other) {
      ladder.push_back(e.payload);
      best_other = e.other;
      last_own = e.own;
    }
  }
  return ladder;
}

struct LadderCacheEntry {
  GameSpec spec;
  Agent side;
  std::shared_ptr<const std::vector<Payload>> ladder;
};

double OwnReward(const GameSpec& spec, Agent side, const Payload& p) {
  return DealReward(spec, side, p);
}

Action OfferAt(const std::vector<Payload>& ladder, int idx, int message) {
  idx = std::clamp(idx, 0, static_cast<int>(ladder.size()) - 1);
  return Action{ProposalKind::kOffer, ladder[idx], message};
}

bool Answerable(const DecisionPoint& point) {
  return point.state.standing_offer &&
         point.state.standing_offer->proposer != point.agent;
}

int LastOpponentMessage(const DecisionPoint& point) {
  for (auto it = point.state.trajectory.rbegin();
       it != point.state.trajectory.rend(); ++it) {
    if (it->agent != point.agent) return it->action.message;
  }
  return kEmptyMessage;
}

struct Plan {
  std::shared_ptr<const std::vector<Payload>> ladder;
  int reservation = 0;
  int next = 0;
  int opening = 0;
};

Plan MakePlan(const PersonaParams& params, const DecisionPoint& point,
              double concession) {
  const GameSpec& spec = point.spec;
  Plan plan;
  plan.ladder = OfferLadder(spec, point.agent);
  const auto& ladder = *plan.ladder;
  const int n = static_cast<int>(ladder.size());
  plan.reservation = 0;
  for (int i = 0; i < n; ++i) {
    if (SurplusShare(spec, point.agent, ladder[i]) >= params.accept_share - 1e-12) {
      plan.reservation = i;
    }
  }
  plan.opening = static_cast<int>(
      std::lround((1.0 - params.anchor) * plan.reservation));

  std::vector<int> mine, theirs;
  for (const Turn& t : point.state.trajectory) {
    if (t.action.kind != ProposalKind::kOffer) continue;
    int pos = LadderPosition(ladder, spec, point.agent, t.action.payload);
    (t.agent == point.agent ? mine : theirs).push_back(pos);
  }
  if (mine.empty()) {
    plan.next = plan.opening;
    return plan;
  }
  const int last = mine.back();
  int step = 0;
  if (params.family == PersonaFamily::kTitForTat && theirs.size() >= 2) {
    step = std::max(0, theirs[theirs.size() - 2] - theirs.back());
  } else if (plan.reservation > last) {
    step = static_cast<int>(std::ceil(concession * (plan.reservation - last)));
  }
  plan.next = std::clamp(last + step, 0, std::max(plan.reservation, last));
  return plan;
}

// Spreads mass over rungs around `center` (never past the reservation rung).
void AddJitteredOffer(ActionDistribution& out, const Plan& plan, int center,
                      int message, double temperature, double mass) {
  const int hi = std::max(plan.reservation, center);
  if (temperature <= 0.0) {
    out.push_back({OfferAt(*plan.ladder, std::clamp(center, 0, hi), message), mass});
    return;
  }
  std::vector<double> w;
  double total = 0.0;
  for (int j = -kJitterRadius; j <= kJitterRadius; ++j) {
    w.push_back(std::exp(-std::abs(j) / temperature));
    total += w.back();
  }
  for (int j = -kJitterRadius; j <= kJitterRadius; ++j) {
    const int idx = std::clamp(center + j, 0, hi);
    out.push_back({OfferAt(*plan.ladder, idx, message),
                   mass * w[j + kJitterRadius] / total});
  }
}

ActionDistribution BaseBehaviour(const PersonaParams& params,
                                 const DecisionPoint& point) {
  const GameSpec& spec = point.spec;
  const int last_msg = LastOpponentMessage(point);
  const std::string incoming = MessageLabel(spec, last_msg);

  double concession = params.concession;
  double accept_share = params.accept_share;
  bool angry = false;
  if (params.family == PersonaFamily::kEmotional) {
    const bool warm = incoming == "praise" || incoming == "plead" ||
                      incoming == "appeal_fairness";
    angry = incoming == "insult";
    if (Answerable(point) &&
        SurplusShare(spec, point.agent, point.state.standing_offer->payload) <
            kLowballShare) {
      angry = true;
    }
    if (warm && !angry) {
      concession = std::min(1.0, concession + 0.2);
      accept_share = std::max(0.0, accept_share - 0.1);
    }
  }

  Plan plan = MakePlan(params, point, concession);
  ActionDistribution out;

  int message = 0;
  switch (params.family) {
    case PersonaFamily::kRational: message = Message(spec, "neutral", 0); break;
    case PersonaFamily::kCunning: message = Message(spec, "insult", 3); break;
    case PersonaFamily::kDesperate: message = Message(spec, "plead", 4); break;
    case PersonaFamily::kTitForTat: message = Message(spec, "mirror", 7); break;
    case PersonaFamily::kFairness:
      message = Message(spec, "appeal_fairness", 2);
      break;
    case PersonaFamily::kEmotional:
      message = angry ? Message(spec, "insult", 3) : Message(spec, "praise", 5);
      break;
    case PersonaFamily::kBrainstormMix: message = Message(spec, "neutral", 0); break;
  }

  if (Answerable(point)) {
    const Payload& offer = point.state.standing_offer->payload;
    const double share = SurplusShare(spec, point.agent, offer);
    const double own = OwnReward(spec, point.agent, offer);
    if (params.family == PersonaFamily::kFairness &&
        share < params.fairness_share) {
      if (share < params.fairness_share / 2) {
        out.push_back({Action::Reject(message), 1.0});
      } else {
        AddJitteredOffer(out, plan, plan.next, message, params.temperature, 1.0);
      }
      return out;
    }
    if (angry) {
      if (params.retaliation > 0.0) {
        out.push_back({Action::Reject(message), params.retaliation});
      }
      if (params.retaliation < 1.0) {
        AddJitteredOffer(out, plan, plan.opening, message, params.temperature,
                         1.0 - params.retaliation);
      }
      return out;
    }
    if (own >= 0.0 && share >= accept_share - 1e-12) {
      out.push_back({Action::Accept(message), 1.0});
      return out;
    }
  }
  AddJitteredOffer(out, plan, angry ? plan.opening : plan.next, message,
                   params.temperature, 1.0);
  return out;
}

}  // namespace

std::string_view PersonaFamilyName(PersonaFamily f) {
  switch (f) {
    case PersonaFamily::kRational: return "rational";
    case PersonaFamily::kCunning: return "cunning";
    case PersonaFamily::kDesperate: return "desperate";
    case PersonaFamily::kTitForTat: return "tit_for_tat";
    case PersonaFamily::kFairness: return "fairness";
    case PersonaFamily::kEmotional: return "emotional";
    case PersonaFamily::kBrainstormMix: return "brainstorm_mix";
  }
  return "rational";
}

PersonaFamily ParsePersonaFamily(std::string_view name) {
  for (PersonaFamily f : AllPersonaFamilies()) {
    if (PersonaFamilyName(f) == name) return f;
  }
  throw InvalidArgument("unknown persona family: " + std::string(name));
}

std::vector<PersonaFamily> AllPersonaFamilies() {
  return {PersonaFamily::kRational,  PersonaFamily::kCunning,
          PersonaFamily::kDesperate, PersonaFamily::kTitForTat,
          PersonaFamily::kFairness,  PersonaFamily::kEmotional,
          PersonaFamily::kBrainstormMix};
}

PersonaParams PersonaParams::Defaults(PersonaFamily family) {
  PersonaParams p;
  p.family = family;
  switch (family) {
    case PersonaFamily::kRational:
      p.anchor = 0.8; p.concession = 0.35; p.accept_share = 0.3;
      break;
    case PersonaFamily::kCunning:
      p.anchor = 1.0; p.concession = 0.15; p.accept_share = 0.6;
      break;
    case PersonaFamily::kDesperate:
      p.anchor = 0.5; p.concession = 0.5; p.accept_share = 0.1;
      break;
    case PersonaFamily::kTitForTat:
      p.anchor = 0.8; p.concession = 0.25; p.accept_share = 0.4;
      break;
    case PersonaFamily::kFairness:
      p.anchor = 0.6; p.concession = 0.3; p.accept_share = 0.45;
      p.fairness_share = 0.4;
      break;
    case PersonaFamily::kEmotional:
      p.anchor = 0.7; p.concession = 0.3; p.accept_share = 0.35;
      p.retaliation = 0.5;
      break;
    case PersonaFamily::kBrainstormMix:
      p.anchor = 0.7; p.concession = 0.3; p.accept_share = 0.3;
      p.temperature = 0.5;
      break;
  }
  return p;
}

void PersonaParams::Validate() const {
  for (double v : {anchor, concession, accept_share, fairness_share, retaliation}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("persona fractions and thresholds must lie in [0, 1]");
    }
  }
  if (temperature < 0.0) throw InvalidArgument("temperature must be >= 0");
}

Persona::Persona(PersonaParams params, std::string name)
    : params_(params),
      name_(name.empty() ? std::string(PersonaFamilyName(params.family))
                         : std::move(name)) {
  params_.Validate();
}

ActionDistribution Persona::Compute(const DecisionPoint& point) const {
  if (point.state.terminal() ||
      WhoseTurn(point.state.h, point.spec.starter) != point.agent) {
    throw ProtocolError("persona '" + name_ + "' asked to act out of turn");
  }
  if (params_.family != PersonaFamily::kBrainstormMix) {
    return Canonicalize(BaseBehaviour(params_, point));
  }
  // One strategy family per turn, uniformly, applied to a sampled base move.
  ActionDistribution base = BaseBehaviour(params_, point);
  ActionDistribution mix;
  const double w = 1.0 / kStrategyFamilyCount;
  for (StrategyFamily f : AllStrategyFamilies()) {
    for (const auto& wa : base) {
      mix.push_back({ApplyStrategy(f, wa.action, point, 0.5), w * wa.prob});
    }
  }
  return Canonicalize(std::move(mix));
}

Action PersonaAct(const PersonaParams& params, const DecisionPoint& point,
                  Rng& rng) {
  Persona persona(params);
  return persona.Act(point, rng);
}

std::shared_ptr<const std::vector<Payload>> OfferLadder(const GameSpec& spec,
                                                        Agent side) {
  thread_local std::vector<LadderCacheEntry> cache;
  for (const auto& e : cache) {
    if (e.side == side && e.spec == spec) return e.ladder;
  }
  auto ladder = std::make_shared<const std::vector<Payload>>(BuildLadder(spec, side));
  if (cache.size() >= 16) cache.erase(cache.begin());
  cache.push_back({spec, side, ladder});
  return ladder;
}

double SurplusShare(const GameSpec& spec, Agent side, const Payload& payload) {
  auto [r1, r2] = DealRewards(spec, payload);
  const double total = r1 + r2;
  if (total <= 0.0) return 0.0;
  return (side == Agent::kOne ? r1 : r2) / total;
}

int LadderPosition(const std::vector<Payload>& ladder, const GameSpec& spec,
                   Agent side, const Payload& payload) {
  const double target = OwnReward(spec, side, payload);
  int best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(ladder.size()); ++i) {
    const double gap = std::abs(OwnReward(spec, side, ladder[i]) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

std::string_view StrategyFamilyName(StrategyFamily f) {
  switch (f) {
    case StrategyFamily::kAggressiveAnchor: return "aggressive_anchor";
    case StrategyFamily::kFairSplit: return "fair_split";
    case StrategyFamily::kFastConcession: return "fast_concession";
    case StrategyFamily::kMirror: return "mirror";
    case StrategyFamily::kDeadlinePressure: return "deadline_pressure";
  }
  return "aggressive_anchor";
}

std::array<StrategyFamily, kStrategyFamilyCount> AllStrategyFamilies() {
  return {StrategyFamily::kAggressiveAnchor, StrategyFamily::kFairSplit,
          StrategyFamily::kFastConcession, StrategyFamily::kMirror,
          StrategyFamily::kDeadlinePressure};
}

Action ApplyStrategy(StrategyFamily family, const Action& base,
                     const DecisionPoint& point, double intensity) {
  const GameSpec& spec = point.spec;
  auto ladder_ptr = OfferLadder(spec, point.agent);
  const auto& ladder = *ladder_ptr;
  const int n = static_cast<int>(ladder.size());
  intensity = std::clamp(intensity, 0.0, 1.0);

  int ref = 0;
  if (base.kind == ProposalKind::kOffer) {
    ref = LadderPosition(ladder, spec, point.agent, base.payload);
  } else if (Answerable(point)) {
    ref = LadderPosition(ladder, spec, point.agent,
                         point.state.standing_offer->payload);
  } else {
    for (const Turn& t : point.state.trajectory) {
      if (t.agent == point.agent && t.action.kind == ProposalKind::kOffer) {
        ref = LadderPosition(ladder, spec, point.agent, t.action.payload);
      }
    }
  }

  switch (family) {
    case StrategyFamily::kAggressiveAnchor:
      return OfferAt(ladder, static_cast<int>(std::lround(ref * (1.0 - intensity))),
                     Message(spec, "anchor_high", 1));
    case StrategyFamily::kFairSplit: {
      int best = 0;
      double gap = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        const double g = std::abs(SurplusShare(spec, point.agent, ladder[i]) - 0.5);
        if (g < gap) {
          gap = g;
          best = i;
        }
      }
      return OfferAt(ladder, best, Message(spec, "appeal_fairness", 2));
    }
    case StrategyFamily::kFastConcession:
      return OfferAt(ladder,
                     ref + static_cast<int>(std::ceil(intensity * (n - 1 - ref) / 2.0)),
                     Message(spec, "plead", 4));
    case StrategyFamily::kMirror: {
      int idx = ref;
      if (Answerable(point)) {
        const int theirs = LadderPosition(ladder, spec, point.agent,
                                          point.state.standing_offer->payload);
        idx = (ref + theirs) / 2;
      }
      return OfferAt(ladder, idx, Message(spec, "mirror", 7));
    }
    case StrategyFamily::kDeadlinePressure: {
      const int msg = Message(spec, "deadline", 6);
      const bool closing = point.state.h >= spec.horizon - 1;
      if (closing && Answerable(point) &&
          OwnReward(spec, point.agent, point.state.standing_offer->payload) > 0.0) {
        return Action::Accept(msg);
      }
      if (base.kind == ProposalKind::kOffer) return Action{base.kind, base.payload, msg};
      if (base.kind == ProposalKind::kAccept || base.kind == ProposalKind::kReject) {
        return Action{base.kind, {}, msg};
      }
      return OfferAt(ladder, ref, msg);
    }
  }
  return base;
}

}  // namespace repgame
