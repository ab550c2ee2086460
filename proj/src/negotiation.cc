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

#include "repgame/negotiation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "repgame/errors.h"
#include "repgame/oracle.h"

namespace repgame {

Agent AgentFromInt(int id) {
  if (id != 1 && id != 2) {
    throw InvalidArgument("agent id must be 1 or 2, got " + std::to_string(id));
  }
  return static_cast<Agent>(id);
}

std::string_view VariantName(GameVariant v) {
  return v == GameVariant::kBuyerSeller ? "buyer_seller" : "resource_exchange";
}

GameVariant ParseVariant(std::string_view name) {
  if (name == "buyer_seller") return GameVariant::kBuyerSeller;
  if (name == "resource_exchange") return GameVariant::kResourceExchange;
  throw InvalidArgument("unknown game variant: " + std::string(name));
}

std::vector<std::string> DefaultMessageAlphabet() {
  return {"neutral", "anchor_high", "appeal_fairness", "insult",
          "plead",   "praise",      "deadline",        "mirror"};
}

std::vector<double> IntegerGrid(int lo, int hi) {
  std::vector<double> grid;
  for (int v = lo; v <= hi; ++v) grid.push_back(v);
  return grid;
}

GameSpec GameSpec::BuyerSeller() {
  GameSpec spec;
  spec.variant = GameVariant::kBuyerSeller;
  spec.price_grid = IntegerGrid(0, 100);
  spec.message_alphabet = DefaultMessageAlphabet();
  return spec;
}

GameSpec GameSpec::ResourceExchange() {
  GameSpec spec = BuyerSeller();
  spec.variant = GameVariant::kResourceExchange;
  return spec;
}

void GameSpec::Validate() const {
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  if (message_alphabet.empty()) {
    throw InvalidArgument("message alphabet must be nonempty");
  }
  if (variant == GameVariant::kBuyerSeller) {
    if (budget < 0) throw InvalidArgument("budget must be >= 0");
    if (production_cost < 0) {
      throw InvalidArgument("production cost must be >= 0");
    }
    if (price_grid.empty()) throw InvalidArgument("price grid must be nonempty");
    for (std::size_t i = 1; i < price_grid.size(); ++i) {
      if (!(price_grid[i - 1] < price_grid[i])) {
        throw InvalidArgument("price grid must be strictly increasing");
      }
    }
  } else {
    for (const auto& inv : inventory) {
      if (inv.x < 0 || inv.y < 0) {
        throw InvalidArgument("inventories must be nonnegative");
      }
    }
    for (const auto& v : value) {
      if (v.x < 0 || v.y < 0) {
        throw InvalidArgument("valuations must be nonnegative");
      }
    }
  }
}

std::string_view ProposalKindName(ProposalKind k) {
  switch (k) {
    case ProposalKind::kOffer: return "offer";
    case ProposalKind::kAccept: return "accept";
    case ProposalKind::kReject: return "reject";
    case ProposalKind::kWait: return "wait";
  }
  return "wait";
}

ProposalKind ParseProposalKind(std::string_view name) {
  if (name == "offer") return ProposalKind::kOffer;
  if (name == "accept") return ProposalKind::kAccept;
  if (name == "reject") return ProposalKind::kReject;
  if (name == "wait") return ProposalKind::kWait;
  throw InvalidArgument("unknown proposal kind: " + std::string(name));
}

Action Action::Offer(double price, int message) {
  return {ProposalKind::kOffer, Payload{price, 0, 0}, message};
}
Action Action::Transfer(int dx, int dy, int message) {
  return {ProposalKind::kOffer, Payload{0.0, dx, dy}, message};
}
Action Action::Accept(int message) { return {ProposalKind::kAccept, {}, message}; }
Action Action::Reject(int message) { return {ProposalKind::kReject, {}, message}; }
Action Action::Wait(int message) { return {ProposalKind::kWait, {}, message}; }

std::string MessageLabel(const GameSpec& spec, int message) {
  if (message < 0 || message >= spec.alphabet_size()) return "";
  return spec.message_alphabet[message];
}

int MessageIndex(const GameSpec& spec, std::string_view label) {
  for (int i = 0; i < spec.alphabet_size(); ++i) {
    if (spec.message_alphabet[i] == label) return i;
  }
  return kEmptyMessage;
}

std::string DescribeAction(const Action& a, const GameSpec& spec) {
  std::ostringstream os;
  os << ProposalKindName(a.kind);
  if (a.kind == ProposalKind::kOffer) {
    if (spec.variant == GameVariant::kBuyerSeller) {
      os << "(" << a.payload.price << ")";
    } else {
      os << "(dx=" << a.payload.dx << ",dy=" << a.payload.dy << ")";
    }
  }
  os << "[" << MessageLabel(spec, a.message) << "]";
  return os.str();
}

std::string_view CauseName(TerminalCause c) {
  switch (c) {
    case TerminalCause::kOngoing: return "ongoing";
    case TerminalCause::kAccepted: return "accepted";
    case TerminalCause::kRejected: return "rejected";
    case TerminalCause::kHorizonExceeded: return "horizon_exceeded";
  }
  return "ongoing";
}

TerminalCause ParseCause(std::string_view name) {
  if (name == "ongoing") return TerminalCause::kOngoing;
  if (name == "accepted") return TerminalCause::kAccepted;
  if (name == "rejected") return TerminalCause::kRejected;
  if (name == "horizon_exceeded") return TerminalCause::kHorizonExceeded;
  throw InvalidArgument("unknown terminal cause: " + std::string(name));
}

Agent WhoseTurn(int h, Agent starter) {
  if (h < 1) throw InvalidArgument("turn index must be >= 1");
  return starter == Agent::kOne ? static_cast<Agent>(2 - (h % 2))
                                : static_cast<Agent>(1 + (h % 2));
}

namespace {

Verdict Illegal(std::string reason) { return Verdict{false, std::move(reason)}; }

bool OnGrid(const GameSpec& spec, double price) {
  return std::binary_search(spec.price_grid.begin(), spec.price_grid.end(),
                            price);
}

}  // namespace

Verdict ValidateAction(const EpisodeState& state, const GameSpec& spec,
                       const Action& action) {
  if (state.terminal()) {
    throw ProtocolError("episode already terminal (" +
                        std::string(CauseName(state.cause)) + ")");
  }
  const Agent mover = WhoseTurn(state.h, spec.starter);
  if (action.message == kEmptyMessage) {
    if (action.kind != ProposalKind::kWait) {
      return Illegal("only wait may carry the empty message");
    }
  } else if (action.message < 0 || action.message >= spec.alphabet_size()) {
    return Illegal("message token outside the alphabet");
  }
  switch (action.kind) {
    case ProposalKind::kAccept:
    case ProposalKind::kReject:
      if (!state.standing_offer || state.standing_offer->proposer == mover) {
        return Illegal("no standing offer from the other agent");
      }
      return {};
    case ProposalKind::kWait:
      return {};
    case ProposalKind::kOffer:
      if (spec.variant == GameVariant::kBuyerSeller) {
        if (!OnGrid(spec, action.payload.price)) {
          return Illegal("price off the grid");
        }
        if (action.payload.dx != 0 || action.payload.dy != 0) {
          return Illegal("transfer fields set in buyer_seller");
        }
      } else {
        const auto& p = action.payload;
        if (p.dx < -spec.inventory[0].x || p.dx > spec.inventory[1].x) {
          return Illegal("X transfer exceeds inventory");
        }
        if (p.dy < -spec.inventory[0].y || p.dy > spec.inventory[1].y) {
          return Illegal("Y transfer exceeds inventory");
        }
        if (p.price != 0.0) return Illegal("price set in resource_exchange");
      }
      return {};
  }
  return Illegal("unknown proposal kind");
}

EpisodeState ApplyAction(const EpisodeState& state, const GameSpec& spec,
                         const Action& action) {
  Verdict verdict = ValidateAction(state, spec, action);
  if (!verdict) {
    throw ProtocolError("illegal action " + DescribeAction(action, spec) +
                        ": " + verdict.reason);
  }
  EpisodeState next = state;
  const Agent mover = WhoseTurn(state.h, spec.starter);
  next.trajectory.push_back(Turn{state.h, mover, action});
  switch (action.kind) {
    case ProposalKind::kAccept:
      next.cause = TerminalCause::kAccepted;
      next.deal = state.standing_offer->payload;
      next.standing_offer.reset();
      return next;
    case ProposalKind::kReject:
      next.cause = TerminalCause::kRejected;
      next.standing_offer.reset();
      return next;
    case ProposalKind::kOffer:
      next.standing_offer = StandingOffer{mover, action.payload};
      break;
    case ProposalKind::kWait:
      break;
  }
  next.h = state.h + 1;
  if (next.h > spec.horizon) next.cause = TerminalCause::kHorizonExceeded;
  return next;
}

std::pair<double, double> DealRewards(const GameSpec& spec,
                                      const Payload& payload) {
  if (spec.variant == GameVariant::kBuyerSeller) {
    const double seller = payload.price - spec.production_cost;
    const double buyer = spec.budget - payload.price;
    return spec.seller == Agent::kOne ? std::pair{seller, buyer}
                                      : std::pair{buyer, seller};
  }
  const auto& v1 = spec.value[0];
  const auto& v2 = spec.value[1];
  const double r1 = v1.x * payload.dx + v1.y * payload.dy;
  const double r2 = -v2.x * payload.dx - v2.y * payload.dy;
  return {r1, r2};
}

double DealReward(const GameSpec& spec, Agent agent, const Payload& payload) {
  auto [r1, r2] = DealRewards(spec, payload);
  return agent == Agent::kOne ? r1 : r2;
}

double NormalizationConstant(const GameSpec& spec) {
  if (spec.variant == GameVariant::kBuyerSeller) {
    const double surplus = spec.budget - spec.production_cost;
    if (surplus == 0.0) {
      throw InvalidArgument("budget equals production cost; cannot normalize");
    }
    return surplus;
  }
  const double c = spec.normalization > 0.0 ? spec.normalization
                                            : ComputeR1Max(spec).value;
  if (c == 0.0) throw InvalidArgument("normalization constant is zero");
  return c;
}

RewardPair NormalizeRewards(RewardPair pair, const GameSpec& spec) {
  const double c = NormalizationConstant(spec);
  pair.normalized1 = pair.r1 / c;
  pair.normalized2 = pair.r2 / c;
  return pair;
}

RewardPair EpisodeRewards(const EpisodeState& state, const GameSpec& spec) {
  if (!state.terminal()) {
    throw ProtocolError("rewards requested for a non-terminal episode");
  }
  RewardPair pair;
  if (state.cause == TerminalCause::kAccepted) {
    std::tie(pair.r1, pair.r2) = DealRewards(spec, *state.deal);
  }
  return NormalizeRewards(pair, spec);
}

std::vector<Payload> OfferPayloads(const GameSpec& spec) {
  std::vector<Payload> out;
  if (spec.variant == GameVariant::kBuyerSeller) {
    out.reserve(spec.price_grid.size());
    for (double p : spec.price_grid) out.push_back(Payload{p, 0, 0});
    return out;
  }
  for (int dx = -spec.inventory[0].x; dx <= spec.inventory[1].x; ++dx) {
    for (int dy = -spec.inventory[0].y; dy <= spec.inventory[1].y; ++dy) {
      out.push_back(Payload{0.0, dx, dy});
    }
  }
  return out;
}

std::vector<Action> LegalActions(const EpisodeState& state,
                                 const GameSpec& spec) {
  if (state.terminal()) return {};
  const Agent mover = WhoseTurn(state.h, spec.starter);
  const int m = spec.alphabet_size();
  std::vector<Action> out;
  for (const Payload& p : OfferPayloads(spec)) {
    for (int msg = 0; msg < m; ++msg) {
      out.push_back(Action{ProposalKind::kOffer, p, msg});
    }
  }
  if (state.standing_offer && state.standing_offer->proposer != mover) {
    for (int msg = 0; msg < m; ++msg) out.push_back(Action::Accept(msg));
    for (int msg = 0; msg < m; ++msg) out.push_back(Action::Reject(msg));
  }
  for (int msg = 0; msg < m; ++msg) out.push_back(Action::Wait(msg));
  out.push_back(Action::Wait(kEmptyMessage));
  return out;
}

std::string TrajectoryKey(const std::vector<Turn>& turns) {
  std::string key;
  key.reserve(turns.size() * 16);
  char buf[64];
  for (const Turn& t : turns) {
    const Action& a = t.action;
    std::snprintf(buf, sizeof(buf), "%d%c%.17g,%d,%d,%d;",
                  static_cast<int>(t.agent),
                  "OARW"[static_cast<int>(a.kind)], a.payload.price,
                  a.payload.dx, a.payload.dy, a.message);
    key += buf;
  }
  return key;
}

void Context::Append(const EpisodeState& final_state,
                     const RewardPair& rewards) {
  if (!final_state.terminal()) {
    throw ProtocolError("only terminal trajectories can enter the context");
  }
  EpisodeRecord rec;
  rec.episode = static_cast<int>(episodes_.size()) + 1;
  rec.turns = final_state.trajectory;
  rec.cause = final_state.cause;
  rec.deal = final_state.deal;
  rec.rewards = rewards;
  episodes_.push_back(std::move(rec));
}

Context AppendContext(Context context, const EpisodeState& final_state,
                      const RewardPair& rewards) {
  context.Append(final_state, rewards);
  return context;
}

EpisodeState ReplayTrajectory(const std::vector<Turn>& turns,
                              const GameSpec& spec) {
  EpisodeState state;
  for (const Turn& t : turns) {
    if (WhoseTurn(state.h, spec.starter) != t.agent || state.h != t.h) {
      throw ProtocolError("stored trajectory breaks turn order");
    }
    state = ApplyAction(state, spec, t.action);
  }
  return state;
}

}  // namespace repgame
