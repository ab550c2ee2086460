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

#include "repgame/sfp.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "repgame/errors.h"

namespace repgame::sfp {

using nlohmann::json;

NormalFormGame::NormalFormGame(std::vector<std::vector<double>> reward_1,
                               std::vector<std::vector<double>> reward_2)
    : reward_1_(std::move(reward_1)), reward_2_(std::move(reward_2)) {
  if (reward_1_.empty() || reward_1_[0].empty()) {
    throw InvalidArgument("reward matrices must be nonempty");
  }
  if (reward_1_.size() != reward_2_.size()) {
    throw InvalidArgument("reward matrices differ in row count");
  }
  const std::size_t cols = reward_1_[0].size();
  for (std::size_t i = 0; i < reward_1_.size(); ++i) {
    if (reward_1_[i].size() != cols || reward_2_[i].size() != cols) {
      throw InvalidArgument("reward matrices must be rectangular and equal-sized");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      for (double v : {reward_1_[i][j], reward_2_[i][j]}) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw InvalidArgument("reward entries must lie in [0, 1]");
        }
      }
    }
  }
}

NormalFormGame NormalFormGame::Random(int rows, int cols, Rng& rng) {
  std::vector<std::vector<double>> r1(rows, std::vector<double>(cols));
  std::vector<std::vector<double>> r2(rows, std::vector<double>(cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      r1[i][j] = Uniform01(rng);
      r2[i][j] = Uniform01(rng);
    }
  }
  return NormalFormGame(std::move(r1), std::move(r2));
}

NormalFormGame NormalFormGame::MatchingPennies() {
  NormalFormGame g({{1.0, 0.0}, {0.0, 1.0}}, {{0.0, 1.0}, {1.0, 0.0}});
  g.row_labels = {"heads", "tails"};
  g.col_labels = {"heads", "tails"};
  return g;
}

NormalFormGame GameFromJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("game JSON: ") + e.what());
  }
  if (!doc.contains("reward_1") || !doc.contains("reward_2")) {
    throw InvalidArgument("game JSON needs reward_1 and reward_2");
  }
  NormalFormGame game(doc["reward_1"].get<std::vector<std::vector<double>>>(),
                      doc["reward_2"].get<std::vector<std::vector<double>>>());
  if (doc.contains("row_labels")) {
    game.row_labels = doc["row_labels"].get<std::vector<std::string>>();
  }
  if (doc.contains("col_labels")) {
    game.col_labels = doc["col_labels"].get<std::vector<std::string>>();
  }
  return game;
}

NormalFormGame LoadGame(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open game file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return GameFromJson(ss.str());
}

std::string GameToJson(const NormalFormGame& game) {
  json doc{{"reward_1", game.reward_1()}, {"reward_2", game.reward_2()}};
  if (!game.row_labels.empty()) doc["row_labels"] = game.row_labels;
  if (!game.col_labels.empty()) doc["col_labels"] = game.col_labels;
  return doc.dump();
}

MixedStrategy::MixedStrategy(std::vector<double> probabilities)
    : probs_(std::move(probabilities)) {
  if (probs_.empty()) throw InvalidArgument("mixed strategy over empty set");
  double total = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw InvalidArgument("negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("probabilities sum to " + std::to_string(total));
  }
}

MixedStrategy MixedStrategy::Uniform(int n) {
  if (n < 1) throw InvalidArgument("uniform strategy needs n >= 1");
  return MixedStrategy(std::vector<double>(n, 1.0 / n));
}

std::string_view NoiseKindName(NoiseKind k) {
  switch (k) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kLaplace: return "laplace";
    case NoiseKind::kGumbel: return "gumbel";
  }
  return "gaussian";
}

NoiseKind ParseNoiseKind(std::string_view name) {
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "laplace") return NoiseKind::kLaplace;
  if (name == "gumbel") return NoiseKind::kGumbel;
  throw InvalidArgument("unknown noise kind: " + std::string(name));
}

void FTPLConfig::Validate() const {
  if (!(eta_scale > 0.0)) throw InvalidArgument("eta_scale must be > 0");
  if (monte_carlo_draws < 1) {
    throw InvalidArgument("monte_carlo_draws must be >= 1");
  }
}

double DrawNoise(NoiseKind kind, Rng& rng) {
  // Open interval (0, 1) keeps the logs finite.
  auto open01 = [&rng] {
    double u;
    do {
      u = Uniform01(rng);
    } while (u <= 0.0);
    return u;
  };
  switch (kind) {
    case NoiseKind::kGaussian: {
      // Box-Muller, one value per call.
      const double u1 = open01();
      const double u2 = Uniform01(rng);
      return std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
    }
    case NoiseKind::kLaplace: {
      const double u = open01() - 0.5;
      return u < 0 ? std::log(1.0 + 2.0 * u) : -std::log(1.0 - 2.0 * u);
    }
    case NoiseKind::kGumbel:
      return -std::log(-std::log(open01()));
  }
  return 0.0;
}

std::vector<double> DrawNoiseVector(NoiseKind kind, int n, Rng& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = DrawNoise(kind, rng);
  return out;
}

MixedStrategy FormBelief(std::span<const int> opponent_action_history,
                         int action_count) {
  if (action_count < 1) throw InvalidArgument("action_count must be >= 1");
  if (opponent_action_history.empty()) return MixedStrategy::Uniform(action_count);
  std::vector<double> counts(action_count, 0.0);
  for (int b : opponent_action_history) {
    if (b < 0 || b >= action_count) {
      throw InvalidArgument("invalid history: action index " +
                            std::to_string(b) + " out of range");
    }
    counts[b] += 1.0;
  }
  const double n = static_cast<double>(opponent_action_history.size());
  for (double& c : counts) c /= n;
  return MixedStrategy(std::move(counts));
}

std::vector<double> ExpectedRewards(const NormalFormGame& game,
                                    const MixedStrategy& belief) {
  if (belief.size() != game.cols()) {
    throw InvalidArgument("belief dimension does not match the game");
  }
  std::vector<double> out(game.rows(), 0.0);
  for (int a = 0; a < game.rows(); ++a) {
    for (int b = 0; b < game.cols(); ++b) out[a] += belief[b] * game.r1(a, b);
  }
  return out;
}

int PerturbedArgmax(std::span<const double> expected, double eta,
                    std::span<const double> noise_draw) {
  if (noise_draw.size() != expected.size()) {
    throw InvalidArgument("noise draw length must equal |A|");
  }
  int best = 0;
  double best_score = expected[0] + eta * noise_draw[0];
  for (std::size_t a = 1; a < expected.size(); ++a) {
    const double s = expected[a] + eta * noise_draw[a];
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(a);
    }
  }
  return best;
}

int PerturbedBestResponse(const NormalFormGame& game,
                          const MixedStrategy& belief, double eta,
                          std::span<const double> noise_draw) {
  return PerturbedArgmax(ExpectedRewards(game, belief), eta, noise_draw);
}

double EtaSchedule(std::int64_t t, double scale) {
  if (t < 1) throw InvalidArgument("eta schedule needs t >= 1");
  if (!(scale > 0.0)) throw InvalidArgument("eta scale must be > 0");
  return scale / std::sqrt(static_cast<double>(t));
}

MixedStrategy EstimateInducedDistribution(const NormalFormGame& game,
                                          const MixedStrategy& belief,
                                          double eta, const FTPLConfig& config,
                                          Rng& rng) {
  config.Validate();
  auto expected = ExpectedRewards(game, belief);
  std::vector<double> freq(game.rows(), 0.0);
  for (int i = 0; i < config.monte_carlo_draws; ++i) {
    auto noise = DrawNoiseVector(config.noise_kind, game.rows(), rng);
    freq[PerturbedArgmax(expected, eta, noise)] += 1.0;
  }
  for (double& f : freq) f /= config.monte_carlo_draws;
  return MixedStrategy(std::move(freq));
}

OpponentSchedule FixedSequence(std::vector<int> actions) {
  if (actions.empty()) throw InvalidArgument("fixed sequence must be nonempty");
  return [actions = std::move(actions)](const OpponentView& view, Rng&) {
    return actions[static_cast<std::size_t>((view.t - 1) %
                                            static_cast<std::int64_t>(actions.size()))];
  };
}

OpponentSchedule Stationary(MixedStrategy strategy) {
  return [strategy = std::move(strategy)](const OpponentView&, Rng& rng) {
    return static_cast<int>(SampleIndex(strategy.probabilities(), rng));
  };
}

OpponentSchedule AdversarialToLeader(const NormalFormGame& game) {
  return [game](const OpponentView& view, Rng&) {
    const auto& cum = view.cumulative_reward;
    int leader = 0;
    for (std::size_t a = 1; a < cum.size(); ++a) {
      if (cum[a] > cum[leader]) leader = static_cast<int>(a);
    }
    int worst = 0;
    for (int b = 1; b < game.cols(); ++b) {
      if (game.r1(leader, b) < game.r1(leader, worst)) worst = b;
    }
    return worst;
  };
}

OpponentSchedule RoundRobin(int cols) {
  return [cols](const OpponentView& view, Rng&) {
    return static_cast<int>((view.t - 1) % cols);
  };
}

PlayTrace RunSfpEpisodes(const NormalFormGame& game,
                         const OpponentSchedule& opponent,
                         std::int64_t episodes, const FTPLConfig& config,
                         std::uint64_t seed) {
  if (episodes < 1) throw InvalidArgument("episodes must be >= 1");
  config.Validate();
  Rng agent_rng = MakeRng({seed, 1});
  Rng opponent_rng = MakeRng({seed, 2});
  const int na = game.rows();
  const int nb = game.cols();

  PlayTrace trace;
  trace.cumulative_reward.assign(na, 0.0);
  trace.records.reserve(static_cast<std::size_t>(episodes));
  std::vector<int> agent_history, opponent_history;
  std::vector<double> counts(nb, 0.0);
  std::vector<double> belief(nb), expected(na);

  for (std::int64_t t = 1; t <= episodes; ++t) {
    // Belief k / (t - 1), uniform at t = 1.
    for (int b = 0; b < nb; ++b) {
      belief[b] = t == 1 ? 1.0 / nb : counts[b] / static_cast<double>(t - 1);
    }
    for (int a = 0; a < na; ++a) {
      double s = 0.0;
      for (int b = 0; b < nb; ++b) s += belief[b] * game.r1(a, b);
      expected[a] = s;
    }
    const double eta = EtaSchedule(t, config.eta_scale);
    auto noise = DrawNoiseVector(config.noise_kind, na, agent_rng);
    const int a = PerturbedArgmax(expected, eta, noise);

    OpponentView view{t, agent_history, opponent_history,
                      trace.cumulative_reward};
    const int b = opponent(view, opponent_rng);
    if (b < 0 || b >= nb) throw InvalidArgument("opponent action out of range");

    agent_history.push_back(a);
    opponent_history.push_back(b);
    counts[b] += 1.0;
    for (int i = 0; i < na; ++i) trace.cumulative_reward[i] += game.r1(i, b);
    trace.realized_reward += game.r1(a, b);
    const double best = *std::max_element(trace.cumulative_reward.begin(),
                                          trace.cumulative_reward.end());
    trace.records.push_back({a, b, game.r1(a, b), best - trace.realized_reward});
  }
  return trace;
}

double ExternalRegret(const PlayTrace& trace, const NormalFormGame& game) {
  if (trace.records.empty()) throw InvalidArgument("empty trace");
  std::vector<double> cum(game.rows(), 0.0);
  double realized = 0.0;
  for (const auto& r : trace.records) {
    for (int a = 0; a < game.rows(); ++a) cum[a] += game.r1(a, r.action_2);
    realized += game.r1(r.action_1, r.action_2);
  }
  return *std::max_element(cum.begin(), cum.end()) - realized;
}

void WriteTraceCsv(const PlayTrace& trace, std::ostream& out) {
  out << "episode,action_1,action_2,reward_1,cumulative_regret\n";
  char buf[128];
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.10g,%.10g\n", i + 1,
                  r.action_1, r.action_2, r.reward_1, r.cumulative_regret);
    out << buf;
  }
}

}  // namespace repgame::sfp
