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

#include "repgame/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "repgame/errors.h"

namespace repgame {
namespace {

constexpr double kRangeSlop = 1e-12;

class Enumerator {
 public:
  explicit Enumerator(const FiniteAbstraction& abstraction)
      : abs_(abstraction) {}

  void Tick() {
    if (++nodes_ > abs_.max_nodes) {
      throw AbstractionTooLarge("enumeration exceeded " +
                                std::to_string(abs_.max_nodes) + " nodes");
    }
  }

  double Leaf(const EpisodeState& state) const {
    RewardPair r = EpisodeRewards(state, abs_.spec);
    if (!abs_.normalized) return r.r1;
    if (r.normalized1 < -kRangeSlop || r.normalized1 > 1.0 + kRangeSlop) {
      throw InvalidArgument("normalized agent-1 reward " +
                            std::to_string(r.normalized1) +
                            " outside [0, 1]");
    }
    return r.normalized1;
  }

  DecisionPoint Point(const EpisodeState& state) const {
    return PointFor(abs_.spec, abs_.context, state, abs_.episode);
  }

  ActionDistribution Dist(const PolicyProvider& p,
                          const DecisionPoint& point) const {
    auto d = p.Distribution(point);
    if (!d) {
      throw InvalidArgument("provider '" + p.Name() +
                            "' exposes no exact distribution");
    }
    CheckDistribution(*d, point);
    return std::move(*d);
  }

  const FiniteAbstraction& abs_;
  std::int64_t nodes_ = 0;
};

double ValueRec(Enumerator& en, const PolicyProvider& p1,
                const PolicyProvider& p2, const EpisodeState& state) {
  en.Tick();
  if (state.terminal()) return en.Leaf(state);
  DecisionPoint point = en.Point(state);
  const PolicyProvider& mover = point.agent == Agent::kOne ? p1 : p2;
  ActionDistribution dist = en.Dist(mover, point);
  std::vector<double> terms;
  terms.reserve(dist.size());
  for (const auto& wa : dist) {
    EpisodeState child = ApplyAction(state, en.abs_.spec, wa.action);
    terms.push_back(wa.prob * ValueRec(en, p1, p2, child));
  }
  return PairwiseSum(terms);
}

double BestRec(Enumerator& en, const PolicyProvider& p2,
               const EpisodeState& state, TablePolicy& table) {
  en.Tick();
  if (state.terminal()) return en.Leaf(state);
  DecisionPoint point = en.Point(state);
  if (point.agent == Agent::kOne) {
    double best = -std::numeric_limits<double>::infinity();
    Action best_action;
    for (const Action& a : LegalActions(state, en.abs_.spec)) {
      double v = BestRec(en, p2, ApplyAction(state, en.abs_.spec, a), table);
      if (v > best) {
        best = v;
        best_action = a;
      }
    }
    table.Set(state.trajectory, best_action);
    return best;
  }
  ActionDistribution dist = en.Dist(p2, point);
  std::vector<double> terms;
  terms.reserve(dist.size());
  for (const auto& wa : dist) {
    terms.push_back(wa.prob *
                    BestRec(en, p2, ApplyAction(state, en.abs_.spec, wa.action),
                            table));
  }
  return PairwiseSum(terms);
}

double ProbOf(const ActionDistribution& d, const Action& a) {
  for (const auto& wa : d) {
    if (wa.action == a) return wa.prob;
  }
  return 0.0;
}

// Actions in the union of two supports, first-appearance order.
std::vector<Action> UnionSupport(const ActionDistribution& a,
                                 const ActionDistribution& b) {
  std::vector<Action> out;
  for (const auto& wa : a) out.push_back(wa.action);
  for (const auto& wb : b) {
    if (std::find(out.begin(), out.end(), wb.action) == out.end()) {
      out.push_back(wb.action);
    }
  }
  return out;
}

struct ValuePair {
  double v_true = 0.0;
  double v_model = 0.0;
};

struct TheoremWalk {
  Enumerator& en;
  const PolicyProvider* p1;  // null: branch over every legal action
  const PolicyProvider& true_p2;
  const PolicyProvider& model_p2;
  std::vector<double>& eps;
  std::vector<Theorem1Row>* rows;

  ValuePair Walk(const EpisodeState& state) {
    en.Tick();
    if (state.terminal()) {
      double r = en.Leaf(state);
      return {r, r};
    }
    DecisionPoint point = en.Point(state);
    const GameSpec& spec = en.abs_.spec;
    if (point.agent == Agent::kOne) {
      std::vector<double> tt, mm;
      if (p1 == nullptr) {
        for (const Action& a : LegalActions(state, spec)) {
          Walk(ApplyAction(state, spec, a));
        }
        return {};
      }
      for (const auto& wa : en.Dist(*p1, point)) {
        ValuePair c = Walk(ApplyAction(state, spec, wa.action));
        tt.push_back(wa.prob * c.v_true);
        mm.push_back(wa.prob * c.v_model);
      }
      ValuePair v{PairwiseSum(tt), PairwiseSum(mm)};
      if (rows != nullptr) {
        Theorem1Row& row = (*rows)[state.h - 1];
        row.h = state.h;
        row.decision_points += 1;
        row.lhs = std::max(row.lhs, std::abs(v.v_model - v.v_true));
      }
      return v;
    }
    ActionDistribution dt = en.Dist(true_p2, point);
    ActionDistribution dm = en.Dist(model_p2, point);
    eps[state.h - 1] = std::max(eps[state.h - 1], TvDistance(dt, dm));
    std::vector<double> tt, mm;
    for (const Action& a : UnionSupport(dt, dm)) {
      ValuePair c = Walk(ApplyAction(state, spec, a));
      tt.push_back(ProbOf(dt, a) * c.v_true);
      mm.push_back(ProbOf(dm, a) * c.v_model);
    }
    return {PairwiseSum(tt), PairwiseSum(mm)};
  }
};

}  // namespace

double PairwiseSum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t mid = values.size() / 2;
  return PairwiseSum(values.subspan(0, mid)) + PairwiseSum(values.subspan(mid));
}

double ExactValue(const PolicyProvider& p1, const PolicyProvider& p2,
                  const FiniteAbstraction& abstraction,
                  const EpisodeState& from) {
  Enumerator en(abstraction);
  return ValueRec(en, p1, p2, from);
}

BestResponse ExactBestResponse(const PolicyProvider& p2,
                               const FiniteAbstraction& abstraction,
                               const EpisodeState& from) {
  Enumerator en(abstraction);
  auto table = std::make_shared<TablePolicy>("best_response(" + p2.Name() + ")");
  double v = BestRec(en, p2, from, *table);
  return {table, v};
}

double TvDistance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidArgument("tv_distance: dimension mismatch");
  }
  std::vector<double> diffs(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) diffs[i] = std::abs(p[i] - q[i]);
  return std::clamp(0.5 * PairwiseSum(diffs), 0.0, 1.0);
}

double TvDistance(const ActionDistribution& p, const ActionDistribution& q) {
  std::vector<double> diffs;
  for (const Action& a : UnionSupport(p, q)) {
    diffs.push_back(std::abs(ProbOf(p, a) - ProbOf(q, a)));
  }
  return std::clamp(0.5 * PairwiseSum(diffs), 0.0, 1.0);
}

Theorem1Report VerifyTheorem1(const FiniteAbstraction& abstraction,
                              const PolicyProvider& p1,
                              const PolicyProvider& true_p2,
                              const PolicyProvider& model_p2,
                              std::string instance_id, double tolerance) {
  FiniteAbstraction abs = abstraction;
  abs.normalized = true;
  const int H = abs.spec.horizon;

  Theorem1Report report;
  report.instance_id = std::move(instance_id);
  report.epsilon.assign(H, 0.0);
  report.rows.assign(H, Theorem1Row{});
  report.note =
      "eps_h is the max TV over decision points reachable under p1 with either "
      "opponent; the corollary uses eps over every decision point";

  {
    Enumerator en(abs);
    TheoremWalk walk{en, &p1, true_p2, model_p2, report.epsilon, &report.rows};
    walk.Walk(EpisodeState{});
  }

  std::vector<Theorem1Row> rows;
  for (int h = 1; h <= H; ++h) {
    Theorem1Row row = report.rows[h - 1];
    if (row.decision_points == 0) continue;
    double rhs = 0.0;
    for (int d = 0; d <= (H - h - 1) / 2 && h + 2 * d + 1 <= H; ++d) {
      rhs += report.epsilon[h + 2 * d];  // eps_{h+2d+1}
    }
    row.rhs = rhs;
    row.slack = rhs - row.lhs;
    row.pass = row.slack >= -tolerance;
    report.pass = report.pass && row.pass;
    rows.push_back(row);
  }
  report.rows = std::move(rows);

  std::vector<double> eps_full(H, 0.0);
  {
    Enumerator en(abs);
    TheoremWalk walk{en, nullptr, true_p2, model_p2, eps_full, nullptr};
    walk.Walk(EpisodeState{});
  }
  for (int h = 1; h <= H; ++h) {
    if (WhoseTurn(h, abs.spec.starter) == Agent::kTwo) {
      report.gap_bound += eps_full[h - 1];
    }
  }
  BestResponse br_model = ExactBestResponse(model_p2, abs);
  BestResponse br_true = ExactBestResponse(true_p2, abs);
  report.j_model_br = ExactValue(*br_model.policy, true_p2, abs);
  report.j_optimum = br_true.value;
  report.corollary_pass =
      report.j_model_br >= report.j_optimum - report.gap_bound - tolerance;
  report.pass = report.pass && report.corollary_pass;
  return report;
}

R1Max ComputeR1Max(const GameSpec& spec) {
  if (spec.variant == GameVariant::kBuyerSeller) {
    return {spec.budget - spec.production_cost, 0, 0};
  }
  const auto& v1 = spec.value[0];
  const auto& v2 = spec.value[1];
  R1Max best{-std::numeric_limits<double>::infinity(), 0, 0};
  for (int dx = -spec.inventory[0].x; dx <= spec.inventory[1].x; ++dx) {
    for (int dy = -spec.inventory[0].y; dy <= spec.inventory[1].y; ++dy) {
      if (v2.x * dx + v2.y * dy > kRangeSlop) continue;
      const double r1 = v1.x * dx + v1.y * dy;
      if (r1 > best.value + kRangeSlop) best = {r1, dx, dy};
    }
  }
  return best;
}

R1Max ComputeR1MaxDyMajor(const GameSpec& spec) {
  if (spec.variant == GameVariant::kBuyerSeller) {
    return {spec.budget - spec.production_cost, 0, 0};
  }
  const auto& v1 = spec.value[0];
  const auto& v2 = spec.value[1];
  R1Max best{-std::numeric_limits<double>::infinity(), 0, 0};
  for (int dy = spec.inventory[1].y; dy >= -spec.inventory[0].y; --dy) {
    for (int dx = spec.inventory[1].x; dx >= -spec.inventory[0].x; --dx) {
      if (v2.x * dx + v2.y * dy > kRangeSlop) continue;
      const double r1 = v1.x * dx + v1.y * dy;
      if (r1 > best.value + kRangeSlop) {
        best = {r1, dx, dy};
      } else if (std::abs(r1 - best.value) <= kRangeSlop &&
                 std::pair{dx, dy} < std::pair{best.dx, best.dy}) {
        best.dx = dx;
        best.dy = dy;
      }
    }
  }
  return best;
}

ActionDistribution AdversarialOpponent::Compute(const DecisionPoint& point) const {
  const EpisodeState& state = point.state;
  const auto& offer = state.standing_offer;
  if (!offer || offer->proposer != Other(point.agent)) {
    return {{Action::Wait(kEmptyMessage), 1.0}};
  }
  const Agent planner = Other(point.agent);
  int planner_turns = 0;
  for (const Turn& t : state.trajectory) {
    if (t.agent == planner) ++planner_turns;
  }
  const Turn& last = state.trajectory.back();
  const bool opening = planner_turns == 1 && last.agent == planner &&
                       last.action.kind == ProposalKind::kOffer;
  if (opening && last.action.message == message_ &&
      DealReward(point.spec, point.agent, offer->payload) >= 0.0) {
    return {{Action::Accept(0), 1.0}};
  }
  return {{Action::Reject(0), 1.0}};
}

std::vector<double> FirstMessageMarginal(const PolicyProvider& p1,
                                         const FiniteAbstraction& abstraction) {
  const GameSpec& spec = abstraction.spec;
  EpisodeState state;
  if (spec.starter == Agent::kTwo) {
    state = ApplyAction(state, spec, Action::Wait(kEmptyMessage));
  }
  DecisionPoint point = PointFor(spec, abstraction.context, state,
                                 abstraction.episode);
  auto dist = p1.Distribution(point);
  if (!dist) {
    throw InvalidArgument("adversarial construction needs p1's distribution");
  }
  std::vector<double> marginal(spec.alphabet_size(), 0.0);
  for (const auto& wa : *dist) {
    if (wa.action.message >= 0) marginal[wa.action.message] += wa.prob;
  }
  return marginal;
}

std::shared_ptr<AdversarialOpponent> MakeAdversarialOpponent(
    const PolicyProvider& p1, const FiniteAbstraction& abstraction) {
  auto marginal = FirstMessageMarginal(p1, abstraction);
  auto it = std::min_element(marginal.begin(), marginal.end());
  return std::make_shared<AdversarialOpponent>(
      static_cast<int>(it - marginal.begin()));
}

Prop1Report VerifyProp1(const PolicyProvider& p1,
                        const FiniteAbstraction& abstraction,
                        std::string instance_id, double tolerance) {
  FiniteAbstraction abs = abstraction;
  abs.normalized = false;
  auto adversary = MakeAdversarialOpponent(p1, abs);
  Prop1Report report;
  report.instance_id = std::move(instance_id);
  report.punished_message = adversary->punished_message();
  report.r1_max = ComputeR1Max(abs.spec).value;
  report.bound = report.r1_max / abs.spec.alphabet_size();
  report.j_policy = ExactValue(p1, *adversary, abs);
  report.best_response = ExactBestResponse(*adversary, abs).value;
  report.inequality_pass = report.j_policy <= report.bound + tolerance;
  report.best_response_pass =
      std::abs(report.best_response - report.r1_max) <= tolerance;
  report.pass = report.inequality_pass && report.best_response_pass;
  return report;
}

}  // namespace repgame
