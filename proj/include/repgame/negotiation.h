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

// The repeated two-agent negotiation protocol: game parameters, actions, the
// per-episode state machine, rewards, and the cross-episode context.
//
// Turns are 1-based. An episode ends when a standing offer is accepted, when
// any standing offer is rejected, or when turn H has been played without an
// acceptance. Rewards of every non-deal ending are (0, 0).

#ifndef REPGAME_NEGOTIATION_H_
#define REPGAME_NEGOTIATION_H_

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace repgame {

enum class Agent : int { kOne = 1, kTwo = 2 };

constexpr int Index(Agent a) { return static_cast<int>(a) - 1; }
constexpr Agent Other(Agent a) {
  return a == Agent::kOne ? Agent::kTwo : Agent::kOne;
}
Agent AgentFromInt(int id);

enum class GameVariant { kBuyerSeller, kResourceExchange };

std::string_view VariantName(GameVariant v);
GameVariant ParseVariant(std::string_view name);

struct Inventory {
  int x = 0;
  int y = 0;
  auto operator<=>(const Inventory&) const = default;
};

struct Valuation {
  double x = 0.0;
  double y = 0.0;
  auto operator<=>(const Valuation&) const = default;
};

// Private information of both sides plus the shared protocol parameters.
struct GameSpec {
  GameVariant variant = GameVariant::kBuyerSeller;
  int horizon = 10;
  Agent starter = Agent::kOne;

  // Buyer-seller.
  double production_cost = 43.0;
  double budget = 63.0;
  Agent seller = Agent::kOne;
  std::vector<double> price_grid;

  // Resource exchange; index 0 is agent 1.
  std::array<Inventory, 2> inventory{{{25, 5}, {5, 25}}};
  std::array<Valuation, 2> value{{{0.5, 2.5}, {2.5, 0.5}}};
  // Divisor for normalized rewards in resource exchange; <= 0 selects the
  // r1_max of this spec.
  double normalization = 0.0;

  std::vector<std::string> message_alphabet;

  // Buyer-seller defaults from the reference experiments (cost 43, budget 63,
  // H = 10), integer price grid 0..100, eight message tokens.
  static GameSpec BuyerSeller();
  // Resource-exchange defaults: agent 1 holds 25 X / 5 Y, agent 2 holds
  // 5 X / 25 Y, values (0.5, 2.5) and (2.5, 0.5).
  static GameSpec ResourceExchange();

  Agent buyer() const { return Other(seller); }
  int alphabet_size() const { return static_cast<int>(message_alphabet.size()); }

  // Throws InvalidArgument when an invariant is violated.
  void Validate() const;

  bool operator==(const GameSpec&) const = default;
};

std::vector<std::string> DefaultMessageAlphabet();
std::vector<double> IntegerGrid(int lo, int hi);

enum class ProposalKind { kOffer, kAccept, kReject, kWait };

std::string_view ProposalKindName(ProposalKind k);
ProposalKind ParseProposalKind(std::string_view name);

// Offer content. Buyer-seller uses `price`; resource exchange uses the net
// transfer (dx, dy) of X and Y to agent 1 (negative means agent 1 gives).
struct Payload {
  double price = 0.0;
  int dx = 0;
  int dy = 0;
  auto operator<=>(const Payload&) const = default;
};

// Only Wait may carry it.
inline constexpr int kEmptyMessage = -1;

struct Action {
  ProposalKind kind = ProposalKind::kWait;
  Payload payload;
  int message = kEmptyMessage;

  static Action Offer(double price, int message);
  static Action Transfer(int dx, int dy, int message);
  static Action Accept(int message);
  static Action Reject(int message);
  static Action Wait(int message = kEmptyMessage);

  auto operator<=>(const Action&) const = default;
};

std::string DescribeAction(const Action& a, const GameSpec& spec);

struct Turn {
  int h = 1;
  Agent agent = Agent::kOne;
  Action action;
  bool operator==(const Turn&) const = default;
};

struct StandingOffer {
  Agent proposer = Agent::kOne;
  Payload payload;
  bool operator==(const StandingOffer&) const = default;
};

enum class TerminalCause { kOngoing, kAccepted, kRejected, kHorizonExceeded };

std::string_view CauseName(TerminalCause c);
TerminalCause ParseCause(std::string_view name);

struct EpisodeState {
  int h = 1;
  std::vector<Turn> trajectory;
  std::optional<StandingOffer> standing_offer;
  TerminalCause cause = TerminalCause::kOngoing;
  std::optional<Payload> deal;

  bool terminal() const { return cause != TerminalCause::kOngoing; }
  bool operator==(const EpisodeState&) const = default;
};

struct RewardPair {
  double r1 = 0.0;
  double r2 = 0.0;
  double normalized1 = 0.0;
  double normalized2 = 0.0;
  bool operator==(const RewardPair&) const = default;
};

struct Verdict {
  bool legal = true;
  std::string reason;
  explicit operator bool() const { return legal; }
};

// Agent to move at turn h: starter 1 gives 2 - (h % 2), starter 2 gives
// 1 + (h % 2). Throws InvalidArgument for h < 1.
Agent WhoseTurn(int h, Agent starter);

// Throws ProtocolError on a terminal state.
Verdict ValidateAction(const EpisodeState& state, const GameSpec& spec,
                       const Action& action);

// Throws ProtocolError (carrying the verdict's reason) for illegal actions.
EpisodeState ApplyAction(const EpisodeState& state, const GameSpec& spec,
                         const Action& action);

// Rewards (r1, r2) if `payload` were the agreed deal.
std::pair<double, double> DealRewards(const GameSpec& spec,
                                      const Payload& payload);
double DealReward(const GameSpec& spec, Agent agent, const Payload& payload);

// Throws ProtocolError on a non-terminal state. Normalized fields are filled.
RewardPair EpisodeRewards(const EpisodeState& state, const GameSpec& spec);

// Buyer-seller divides by b - p (InvalidArgument when b == p); resource
// exchange divides by spec.normalization, or by r1_max when that is unset.
RewardPair NormalizeRewards(RewardPair pair, const GameSpec& spec);
double NormalizationConstant(const GameSpec& spec);

// Every legal action for the agent to move, in a fixed order: offers (grid
// order, or dx-major transfers) x messages, then Accept x messages and
// Reject x messages when answerable, then Wait x messages, then Wait with the
// empty message.
std::vector<Action> LegalActions(const EpisodeState& state,
                                 const GameSpec& spec);

// Valid offer payloads in enumeration order (no messages).
std::vector<Payload> OfferPayloads(const GameSpec& spec);

// Stable identity of a trajectory prefix, used as a memo/table key.
std::string TrajectoryKey(const std::vector<Turn>& turns);

struct EpisodeRecord {
  int episode = 0;
  std::vector<Turn> turns;
  TerminalCause cause = TerminalCause::kOngoing;
  std::optional<Payload> deal;
  RewardPair rewards;
  bool operator==(const EpisodeRecord&) const = default;
};

// Append-only history of completed episodes.
class Context {
 public:
  Context() = default;

  const std::vector<EpisodeRecord>& episodes() const { return episodes_; }
  std::size_t size() const { return episodes_.size(); }
  bool empty() const { return episodes_.empty(); }
  const EpisodeRecord& operator[](std::size_t i) const { return episodes_[i]; }

  // Throws ProtocolError when `final_state` is not terminal.
  void Append(const EpisodeState& final_state, const RewardPair& rewards);

  bool operator==(const Context&) const = default;

 private:
  std::vector<EpisodeRecord> episodes_;
};

Context AppendContext(Context context, const EpisodeState& final_state,
                      const RewardPair& rewards);

// Re-applies a stored turn sequence from the initial state.
EpisodeState ReplayTrajectory(const std::vector<Turn>& turns,
                              const GameSpec& spec);

// Index of a message label in the alphabet, or kEmptyMessage if absent.
int MessageIndex(const GameSpec& spec, std::string_view label);
std::string MessageLabel(const GameSpec& spec, int message);

}  // namespace repgame

#endif  // REPGAME_NEGOTIATION_H_
