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

#include "repgame/theory.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "repgame/bon.h"
#include "repgame/errors.h"
#include "repgame/sfp.h"

namespace repgame {
namespace {

constexpr double kTolerance = 1e-9;

int UniformInt(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

Agent RandomAgent(Rng& rng) { return (rng() & 1) ? Agent::kTwo : Agent::kOne; }

std::string InstanceId(std::string_view prefix, int i) {
  return std::string(prefix) + "-" + std::to_string(i);
}

Json LimitsToJson(const AbstractionLimits& l) {
  return {{"max_horizon", l.max_horizon},
          {"max_grid", l.max_grid},
          {"max_alphabet", l.max_alphabet},
          {"max_tree", l.max_tree}};
}

AbstractionLimits LimitsFromJson(const Json& j, AbstractionLimits l) {
  CheckKeys(j, {"max_horizon", "max_grid", "max_alphabet", "max_tree"}, "theory limits");
  l.max_horizon = GetOr(j, "max_horizon", l.max_horizon, "theory");
  l.max_grid = GetOr(j, "max_grid", l.max_grid, "theory");
  l.max_alphabet = GetOr(j, "max_alphabet", l.max_alphabet, "theory");
  l.max_tree = GetOr(j, "max_tree", l.max_tree, "theory");
  return l;
}

void ValidateLimits(const AbstractionLimits& l, std::string_view where) {
  if (l.max_horizon < 1 || l.max_grid < 1 || l.max_alphabet < 1 || l.max_tree < 1) {
    throw ConfigError(std::string(where) + " limits must be >= 1");
  }
  if (l.max_alphabet > static_cast<int>(DefaultMessageAlphabet().size())) {
    throw ConfigError(std::string(where) + ".max_alphabet exceeds the default alphabet");
  }
}

}  // namespace

double EstimateTreeSize(const GameSpec& spec, int opponent_branching) {
  const double a = spec.alphabet_size();
  const double g = static_cast<double>(spec.price_grid.size());
  // Offers, accept and reject of a standing offer, and wait with any token.
  const double planner = g * a + 2.0 * a + a + 1.0;
  double total = 0.0;
  double width = 1.0;
  for (int h = 1; h <= spec.horizon; ++h) {
    total += width;
    width *= WhoseTurn(h, spec.starter) == Agent::kOne ? planner : opponent_branching;
  }
  return total + width;
}

GameSpec RandomSmallSpec(Rng& rng, const AbstractionLimits& limits,
                         int opponent_branching) {
  const auto alphabet = DefaultMessageAlphabet();
  for (;;) {
    GameSpec spec = GameSpec::BuyerSeller();
    spec.horizon = UniformInt(rng, 1, limits.max_horizon);
    spec.starter = RandomAgent(rng);
    spec.seller = RandomAgent(rng);
    const int g = UniformInt(rng, 1, limits.max_grid);
    const int a = UniformInt(rng, 1, limits.max_alphabet);
    const int cost = UniformInt(rng, 0, 20);
    const int budget = cost + std::max(1, g - 1 + UniformInt(rng, 0, 4));
    std::vector<int> prices;
    for (int q = cost; q <= budget; ++q) prices.push_back(q);
    // Partial Fisher-Yates for a g-subset of the admissible prices.
    for (int i = 0; i < g; ++i) {
      const int j = UniformInt(rng, i, static_cast<int>(prices.size()) - 1);
      std::swap(prices[i], prices[j]);
    }
    prices.resize(g);
    std::sort(prices.begin(), prices.end());
    spec.production_cost = cost;
    spec.budget = budget;
    spec.price_grid.assign(prices.begin(), prices.end());
    spec.message_alphabet.assign(alphabet.begin(), alphabet.begin() + a);
    if (EstimateTreeSize(spec, opponent_branching) <= static_cast<double>(limits.max_tree)) {
      spec.Validate();
      return spec;
    }
  }
}

void TheorySettings::Validate() const {
  if (theorem1_instances < 0 || prop1_instances < 0 || pi_instances < 0) {
    throw ConfigError("theory instance counts must be >= 0");
  }
  ValidateLimits(theorem1_limits, "theory.theorem1_limits");
  ValidateLimits(pi_limits, "theory.pi_limits");
  if (pi_max_level < 1) throw ConfigError("theory.pi_max_level must be >= 1");
  if (max_nodes < 1) throw ConfigError("theory.max_nodes must be >= 1");
  if (ftpl_actions < 1) throw ConfigError("theory.ftpl_actions must be >= 1");
  if (ftpl_seeds < 1) throw ConfigError("theory.ftpl_seeds must be >= 1");
  if (ftpl_horizons.empty()) throw ConfigError("theory.ftpl_horizons must be nonempty");
  for (std::size_t i = 0; i < ftpl_horizons.size(); ++i) {
    if (ftpl_horizons[i] < 1 || (i > 0 && ftpl_horizons[i] <= ftpl_horizons[i - 1])) {
      throw ConfigError("theory.ftpl_horizons must be positive and increasing");
    }
  }
  if (!(ftpl_rate_constant > 0.0 && ftpl_rate_constant <= 3.0)) {
    throw ConfigError("theory.ftpl_rate_constant must lie in (0, 3]");
  }
}

Json ToJson(const TheorySettings& s) {
  return {{"seed", s.seed},
          {"theorem1_instances", s.theorem1_instances},
          {"prop1_instances", s.prop1_instances},
          {"pi_instances", s.pi_instances},
          {"theorem1_limits", LimitsToJson(s.theorem1_limits)},
          {"pi_limits", LimitsToJson(s.pi_limits)},
          {"pi_max_level", s.pi_max_level},
          {"max_nodes", s.max_nodes},
          {"ftpl_actions", s.ftpl_actions},
          {"ftpl_seeds", s.ftpl_seeds},
          {"ftpl_horizons", s.ftpl_horizons},
          {"ftpl_rate_constant", s.ftpl_rate_constant}};
}

TheorySettings TheorySettingsFromJson(const Json& j) {
  CheckKeys(j, {"seed", "theorem1_instances", "prop1_instances", "pi_instances",
                "theorem1_limits", "pi_limits", "pi_max_level", "max_nodes",
                "ftpl_actions", "ftpl_seeds", "ftpl_horizons", "ftpl_rate_constant"},
            "theory");
  TheorySettings s;
  s.seed = GetOr(j, "seed", s.seed, "theory");
  s.theorem1_instances = GetOr(j, "theorem1_instances", s.theorem1_instances, "theory");
  s.prop1_instances = GetOr(j, "prop1_instances", s.prop1_instances, "theory");
  s.pi_instances = GetOr(j, "pi_instances", s.pi_instances, "theory");
  if (auto it = j.find("theorem1_limits"); it != j.end()) {
    s.theorem1_limits = LimitsFromJson(*it, s.theorem1_limits);
  }
  if (auto it = j.find("pi_limits"); it != j.end()) {
    s.pi_limits = LimitsFromJson(*it, s.pi_limits);
  }
  s.pi_max_level = GetOr(j, "pi_max_level", s.pi_max_level, "theory");
  s.max_nodes = GetOr(j, "max_nodes", s.max_nodes, "theory");
  s.ftpl_actions = GetOr(j, "ftpl_actions", s.ftpl_actions, "theory");
  s.ftpl_seeds = GetOr(j, "ftpl_seeds", s.ftpl_seeds, "theory");
  s.ftpl_horizons = GetOr(j, "ftpl_horizons", s.ftpl_horizons, "theory");
  s.ftpl_rate_constant = GetOr(j, "ftpl_rate_constant", s.ftpl_rate_constant, "theory");
  s.Validate();
  return s;
}

std::vector<Theorem1Report> SweepTheorem1(const TheorySettings& settings) {
  std::vector<Theorem1Report> out;
  for (int i = 0; i < settings.theorem1_instances; ++i) {
    Rng rng = MakeRng({settings.seed, 1, static_cast<std::uint64_t>(i)});
    const int true_support = UniformInt(rng, 1, 3);
    const int noise_support = UniformInt(rng, 1, 2);
    FiniteAbstraction abs;
    abs.spec = RandomSmallSpec(rng, settings.theorem1_limits, true_support + noise_support);
    abs.max_nodes = settings.max_nodes;
    RandomTabularPolicy p1(rng(), UniformInt(rng, 1, 3), "p1");
    auto truth = std::make_shared<RandomTabularPolicy>(rng(), true_support, "true_p2");
    auto noise = std::make_shared<RandomTabularPolicy>(rng(), noise_support, "noise");
    // Every tenth instance uses the exact model.
    const double lambda = i % 10 == 0 ? 0.0 : Uniform01(rng);
    PerturbedPolicy model(truth, noise, lambda, rng());
    out.push_back(VerifyTheorem1(abs, p1, *truth, model, InstanceId("theorem1", i)));
  }
  return out;
}

std::vector<Prop1Report> SweepProp1(const TheorySettings& settings) {
  std::vector<Prop1Report> out;
  const auto alphabet = DefaultMessageAlphabet();
  for (int i = 0; i < settings.prop1_instances; ++i) {
    Rng rng = MakeRng({settings.seed, 2, static_cast<std::uint64_t>(i)});
    FiniteAbstraction abs;
    if (i % 2 == 0) {
      abs.spec = GameSpec::BuyerSeller();
      abs.spec.price_grid = IntegerGrid(43, 63);
      abs.spec.seller = RandomAgent(rng);
    } else {
      abs.spec = GameSpec::ResourceExchange();
      abs.spec.inventory = {{{3, 1}, {1, 3}}};
    }
    abs.spec.starter = RandomAgent(rng);
    // Agent 1's first proposal needs a reply turn after it.
    abs.spec.horizon = UniformInt(rng, abs.spec.starter == Agent::kOne ? 2 : 3, 4);
    abs.spec.message_alphabet.assign(alphabet.begin(), alphabet.begin() + 4);
    abs.spec.Validate();
    abs.max_nodes = settings.max_nodes;
    RandomTabularPolicy p1(rng(), 0, "p1");
    out.push_back(VerifyProp1(p1, abs, InstanceId("prop1", i)));
  }
  return out;
}

std::vector<PolicyImprovementReport> SweepPolicyImprovement(
    const TheorySettings& settings) {
  std::vector<PolicyImprovementReport> out;
  for (int i = 0; i < settings.pi_instances; ++i) {
    Rng rng = MakeRng({settings.seed, 3, static_cast<std::uint64_t>(i)});
    const int oppo_support = UniformInt(rng, 1, 2);
    FiniteAbstraction abs;
    abs.spec = RandomSmallSpec(rng, settings.pi_limits, oppo_support);
    abs.max_nodes = settings.max_nodes;
    auto base = std::make_shared<RandomTabularPolicy>(rng(), 0, "base");
    auto oppo = std::make_shared<RandomTabularPolicy>(rng(), oppo_support, "oppo");
    const std::uint64_t seed = rng();

    PolicyImprovementReport r;
    r.instance_id = InstanceId("pi", i);
    for (int h = 1; h <= abs.spec.horizon; ++h) {
      r.planner_turns += WhoseTurn(h, abs.spec.starter) == Agent::kOne ? 1 : 0;
    }
    r.base_value = ExactValue(*base, *oppo, abs);
    for (int l = 1; l <= settings.pi_max_level; ++l) {
      BoNConfig config;
      config.generation = GenerationMode::kSupport;
      config.rollout_mode = RolloutMode::kExact;
      config.level = l;
      config.max_simulated_turns = settings.max_nodes * 50;
      SharpenedPolicy sharp(base, oppo, config, seed);
      r.sharpened.push_back(ExactValue(sharp, *oppo, abs));
    }
    r.optimum = ExactBestResponse(*oppo, abs).value;
    r.improvement_pass = r.sharpened[0] >= r.base_value - kTolerance;
    for (std::size_t l = 1; l < r.sharpened.size(); ++l) {
      r.monotone_pass = r.monotone_pass && r.sharpened[l] >= r.sharpened[l - 1] - kTolerance;
    }
    for (std::size_t l = 0; l < r.sharpened.size(); ++l) {
      // Level l is optimal over the last l planner turns.
      if (static_cast<int>(l) + 1 >= r.planner_turns) {
        r.optimum_pass = r.optimum_pass && std::abs(r.sharpened[l] - r.optimum) <= kTolerance;
      }
    }
    if (r.planner_turns > settings.pi_max_level) r.optimum_pass = false;
    r.pass = r.improvement_pass && r.monotone_pass && r.optimum_pass;
    out.push_back(std::move(r));
  }
  return out;
}

RegretRateReport SweepRegretRate(const TheorySettings& settings,
                                 const sfp::FTPLConfig& config) {
  RegretRateReport report;
  report.constant = settings.ftpl_rate_constant;
  const int n = settings.ftpl_actions;
  for (const std::string schedule : {"adversarial", "stationary"}) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::int64_t horizon : settings.ftpl_horizons) {
      RegretCell cell;
      cell.schedule = schedule;
      cell.horizon = horizon;
      for (int s = 0; s < settings.ftpl_seeds; ++s) {
        Rng rng = MakeRng({settings.seed, 4, static_cast<std::uint64_t>(s)});
        const sfp::NormalFormGame game = sfp::NormalFormGame::Random(n, n, rng);
        sfp::OpponentSchedule opponent;
        if (schedule == "adversarial") {
          opponent = sfp::AdversarialToLeader(game);
        } else {
          std::vector<double> w(n);
          double total = 0.0;
          for (double& x : w) total += (x = 0.05 + Uniform01(rng));
          for (double& x : w) x /= total;
          opponent = sfp::Stationary(sfp::MixedStrategy(w));
        }
        const auto trace = sfp::RunSfpEpisodes(
            game, opponent, horizon, config,
            DeriveSeed({settings.seed, 5, static_cast<std::uint64_t>(s)}));
        const double regret = sfp::ExternalRegret(trace, game);
        const double t = static_cast<double>(horizon);
        cell.mean_regret += regret / settings.ftpl_seeds;
        cell.mean_regret_per_t += regret / t / settings.ftpl_seeds;
        cell.mean_rate += regret / std::sqrt(t * std::log(static_cast<double>(n))) /
                          settings.ftpl_seeds;
      }
      report.decreasing_pass = report.decreasing_pass && cell.mean_regret_per_t < previous;
      report.rate_pass = report.rate_pass && cell.mean_rate <= report.constant;
      previous = cell.mean_regret_per_t;
      report.cells.push_back(cell);
    }
  }
  report.pass = report.decreasing_pass && report.rate_pass;
  return report;
}

std::vector<R1MaxCase> CheckR1Max() {
  std::vector<R1MaxCase> out;
  {
    R1MaxCase c;
    c.name = "buyer_seller";
    const GameSpec spec = GameSpec::BuyerSeller();
    c.primary = ComputeR1Max(spec);
    c.cross_check = ComputeR1MaxDyMajor(spec);
    c.expected = 20.0;
    out.push_back(c);
  }
  {
    R1MaxCase c;
    c.name = "resource_exchange";
    GameSpec spec = GameSpec::ResourceExchange();
    spec.inventory = {{{25, 5}, {25, 5}}};  // dx in [-25, 25], dy in [-5, 5]
    c.primary = ComputeR1Max(spec);
    c.cross_check = ComputeR1MaxDyMajor(spec);
    c.expected = 12.0;
    c.expected_dx = -1;
    c.expected_dy = 5;
    c.check_transfer = true;
    out.push_back(c);
  }
  for (R1MaxCase& c : out) {
    auto matches = [&](const R1Max& r) {
      return std::abs(r.value - c.expected) <= kTolerance &&
             (!c.check_transfer || (r.dx == c.expected_dx && r.dy == c.expected_dy));
    };
    c.pass = matches(c.primary) && matches(c.cross_check);
  }
  return out;
}

Json ToJson(const Theorem1Report& r) {
  Json rows = Json::array();
  for (const Theorem1Row& row : r.rows) {
    rows.push_back({{"instance_id", r.instance_id},
                    {"h", row.h},
                    {"decision_points", row.decision_points},
                    {"lhs", row.lhs},
                    {"rhs", row.rhs},
                    {"slack", row.slack},
                    {"pass", row.pass}});
  }
  return {{"instance_id", r.instance_id},
          {"epsilon", r.epsilon},
          {"rows", rows},
          {"corollary",
           {{"j_model_br", r.j_model_br},
            {"j_optimum", r.j_optimum},
            {"gap_bound", r.gap_bound},
            {"pass", r.corollary_pass}}},
          {"note", r.note},
          {"pass", r.pass}};
}

Json ToJson(const Prop1Report& r) {
  return {{"instance_id", r.instance_id},
          {"punished_message", r.punished_message},
          {"j_policy", r.j_policy},
          {"bound", r.bound},
          {"best_response", r.best_response},
          {"r1_max", r.r1_max},
          {"inequality_pass", r.inequality_pass},
          {"best_response_pass", r.best_response_pass},
          {"pass", r.pass}};
}

Json ToJson(const PolicyImprovementReport& r) {
  return {{"instance_id", r.instance_id},
          {"base_value", r.base_value},
          {"sharpened", r.sharpened},
          {"optimum", r.optimum},
          {"planner_turns", r.planner_turns},
          {"improvement_pass", r.improvement_pass},
          {"monotone_pass", r.monotone_pass},
          {"optimum_pass", r.optimum_pass},
          {"pass", r.pass}};
}

Json ToJson(const RegretRateReport& r) {
  Json cells = Json::array();
  for (const RegretCell& c : r.cells) {
    cells.push_back({{"schedule", c.schedule},
                     {"horizon", c.horizon},
                     {"mean_regret", c.mean_regret},
                     {"mean_regret_per_t", c.mean_regret_per_t},
                     {"mean_rate", c.mean_rate}});
  }
  return {{"cells", cells},
          {"constant", r.constant},
          {"decreasing_pass", r.decreasing_pass},
          {"rate_pass", r.rate_pass},
          {"pass", r.pass}};
}

Json ToJson(const R1MaxCase& c) {
  auto value = [](const R1Max& r) {
    return Json{{"value", r.value}, {"dx", r.dx}, {"dy", r.dy}};
  };
  return {{"name", c.name},
          {"primary", value(c.primary)},
          {"cross_check", value(c.cross_check)},
          {"expected", c.expected},
          {"pass", c.pass}};
}

}  // namespace repgame
