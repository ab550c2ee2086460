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

// Exact enumeration over small negotiation games. Everything here expands
// the full single-episode trajectory tree, so it is only meant for desk-scale
// instances; the node cap turns accidental blow-ups into errors.

#ifndef REPGAME_ORACLE_H_
#define REPGAME_ORACLE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "repgame/negotiation.h"
#include "repgame/policy.h"

namespace repgame {

inline constexpr std::int64_t kDefaultNodeCap = 2'000'000;

// A game small enough to enumerate, plus the context the providers see.
struct FiniteAbstraction {
  GameSpec spec;
  Context context;
  int episode = 1;
  std::int64_t max_nodes = kDefaultNodeCap;
  // Evaluate normalized agent-1 rewards (required in [0, 1]) instead of raw.
  bool normalized = false;
};

// Expected agent-1 reward from `from` under (p1, p2). Both providers must
// expose exact distributions. Throws AbstractionTooLarge past the node cap.
double ExactValue(const PolicyProvider& p1, const PolicyProvider& p2,
                  const FiniteAbstraction& abstraction,
                  const EpisodeState& from = {});

struct BestResponse {
  std::shared_ptr<TablePolicy> policy;
  double value = 0.0;
};

// Backward induction over every legal agent-1 action. Ties go to the first
// action in LegalActions order.
BestResponse ExactBestResponse(const PolicyProvider& p2,
                               const FiniteAbstraction& abstraction,
                               const EpisodeState& from = {});

// Half the L1 distance. Throws InvalidArgument on a length mismatch.
double TvDistance(std::span<const double> p, std::span<const double> q);
// Same over action-keyed distributions, aligned on the union of supports.
double TvDistance(const ActionDistribution& p, const ActionDistribution& q);

struct Theorem1Row {
  int h = 0;
  int decision_points = 0;
  double lhs = 0.0;  // max |V_model - V_true| over decision points at h
  double rhs = 0.0;  // sum of eps over the opponent turns after h
  double slack = 0.0;
  bool pass = true;
};

struct Theorem1Report {
  std::string instance_id;
  // epsilon[h - 1] for h = 1..H; zero on agent-1 turns.
  std::vector<double> epsilon;
  std::vector<Theorem1Row> rows;
  // Optimality-gap corollary.
  double j_model_br = 0.0;   // J1(BR against the model, true opponent)
  double j_optimum = 0.0;    // max_pi J1(pi, true opponent)
  double gap_bound = 0.0;    // sum of eps over all opponent turns (full tree)
  bool corollary_pass = true;
  bool pass = true;
  std::string note;
};

// Checks |V_model - V_true| <= sum_d eps_{h+2d+1} at every agent-1 decision
// point reachable under p1, where eps_h is the largest TV distance between
// the two opponent distributions over decision points at h reachable under
// p1 and either opponent. The corollary uses eps over the full tree.
Theorem1Report VerifyTheorem1(const FiniteAbstraction& abstraction,
                              const PolicyProvider& p1,
                              const PolicyProvider& true_p2,
                              const PolicyProvider& model_p2,
                              std::string instance_id = "",
                              double tolerance = 1e-9);

struct R1Max {
  double value = 0.0;
  int dx = 0;
  int dy = 0;
};

// Buyer-seller: b - p. Resource exchange: max v1 . delta over integer
// transfers within the inventory bounds subject to v2 . delta <= 0, found by
// enumerating dx in the outer loop. Ties keep the first maximizer.
R1Max ComputeR1Max(const GameSpec& spec);
// Same program enumerated dy-major and scanned from the top; used as an
// independent cross-check. Ties are resolved to the same canonical pair.
R1Max ComputeR1MaxDyMajor(const GameSpec& spec);

// The opponent that punishes agent 1's least likely opening message: on
// agent 1's first proposal it accepts only when the message equals that
// message and the offer gives agent 2 a nonnegative reward, otherwise it
// rejects; any later offer is rejected and with no standing offer it waits
// with the empty message.
class AdversarialOpponent : public DistributionPolicy {
 public:
  AdversarialOpponent(int punished_message, std::string name = "adversarial")
      : message_(punished_message), name_(std::move(name)) {}

  int punished_message() const { return message_; }
  std::string Name() const override { return name_; }

 protected:
  ActionDistribution Compute(const DecisionPoint& point) const override;

 private:
  int message_;
  std::string name_;
};

// Marginal distribution of agent 1's first message (alphabet order).
std::vector<double> FirstMessageMarginal(const PolicyProvider& p1,
                                         const FiniteAbstraction& abstraction);

std::shared_ptr<AdversarialOpponent> MakeAdversarialOpponent(
    const PolicyProvider& p1, const FiniteAbstraction& abstraction);

struct Prop1Report {
  std::string instance_id;
  int punished_message = 0;
  double j_policy = 0.0;       // J1(p1, adversary)
  double bound = 0.0;          // r1_max / |Y^m|
  double best_response = 0.0;  // max_pi J1(pi, adversary)
  double r1_max = 0.0;
  bool inequality_pass = true;
  bool best_response_pass = true;
  bool pass = true;
};

Prop1Report VerifyProp1(const PolicyProvider& p1,
                        const FiniteAbstraction& abstraction,
                        std::string instance_id = "",
                        double tolerance = 1e-9);

// Pairwise (cascade) summation; order-insensitive to within rounding.
double PairwiseSum(std::span<const double> values);

}  // namespace repgame

#endif  // REPGAME_ORACLE_H_
