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

#include "repgame/metrics.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "repgame/errors.h"
#include "repgame/io.h"

namespace repgame {

std::string RoleSetting::Label() const {
  return "row_seat" + std::to_string(static_cast<int>(row_seat)) + "_starter" +
         std::to_string(static_cast<int>(starter));
}

std::vector<RoleSetting> AllRoleSettings() {
  return {{Agent::kOne, Agent::kOne},
          {Agent::kOne, Agent::kTwo},
          {Agent::kTwo, Agent::kOne},
          {Agent::kTwo, Agent::kTwo}};
}

std::optional<int> DominantRow(const Matrix& m, double tolerance) {
  const int n = static_cast<int>(m.size());
  for (int i = 0; i < n; ++i) {
    bool dominates = true;
    for (int j = 0; j < n && dominates; ++j) {
      if (j == i) continue;
      for (std::size_t c = 0; c < m[i].size(); ++c) {
        if (m[i][c] < m[j][c] - tolerance) {
          dominates = false;
          break;
        }
      }
    }
    if (dominates && n > 1) return i;
  }
  return std::nullopt;
}

double MeanNormalizedReward(const MatchLog& log, Agent seat, int first, int last) {
  if (first < 1 || last > log.episodes() || first > last) {
    throw InvalidArgument("episode window outside the log");
  }
  double sum = 0.0;
  for (int t = first; t <= last; ++t) {
    const RewardPair& r = log.context[t - 1].rewards;
    sum += seat == Agent::kOne ? r.normalized1 : r.normalized2;
  }
  return sum / (last - first + 1);
}

PairwiseMatrix ComputePairwiseMatrix(const std::vector<ProviderFactory>& providers,
                                     const GameSpec& spec, int episodes,
                                     const std::vector<std::uint64_t>& seeds,
                                     int jobs, std::vector<MatchLog>* logs) {
  const int n = static_cast<int>(providers.size());
  if (n < 2) throw InvalidArgument("a pairwise matrix needs at least two providers");
  if (seeds.empty()) throw InvalidArgument("a pairwise matrix needs at least one seed");
  PairwiseMatrix out;
  for (const auto& p : providers) out.labels.push_back(p.label);
  out.settings = AllRoleSettings();
  const int settings = static_cast<int>(out.settings.size());
  const int seed_count = static_cast<int>(seeds.size());
  const std::size_t cells =
      static_cast<std::size_t>(settings) * n * n * seed_count;

  // Each task writes only its own slot, so the result is independent of the
  // schedule.
  std::vector<double> means(cells, 0.0);
  std::vector<MatchLog> all(logs ? cells : 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells && !failed; idx = next++) {
      try {
        std::size_t rest = idx;
        const int k = static_cast<int>(rest % seed_count);
        rest /= seed_count;
        const int col = static_cast<int>(rest % n);
        rest /= n;
        const int row = static_cast<int>(rest % n);
        const int s = static_cast<int>(rest / n);
        const RoleSetting& setting = out.settings[s];
        GameSpec cell_spec = spec;
        cell_spec.starter = setting.starter;
        auto row_p = providers[row].make();
        auto col_p = providers[col].make();
        const bool row_first = setting.row_seat == Agent::kOne;
        MatchLog log = RunMatch(cell_spec, row_first ? *row_p : *col_p,
                                row_first ? *col_p : *row_p, episodes, seeds[k]);
        means[idx] = MeanNormalizedReward(log, setting.row_seat, 1, episodes);
        if (logs) all[idx] = std::move(log);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(cells, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  out.per_setting.assign(settings, Matrix(n, std::vector<double>(n, 0.0)));
  out.combined.assign(n, std::vector<double>(n, 0.0));
  std::size_t idx = 0;
  for (int s = 0; s < settings; ++s) {
    for (int row = 0; row < n; ++row) {
      for (int col = 0; col < n; ++col) {
        double sum = 0.0;
        for (int k = 0; k < seed_count; ++k) sum += means[idx++];
        out.per_setting[s][row][col] = sum / seed_count;
        out.combined[row][col] += out.per_setting[s][row][col] / settings;
      }
    }
  }
  out.dominant_row = DominantRow(out.combined);
  if (logs) {
    for (MatchLog& l : all) logs->push_back(std::move(l));
  }
  return out;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UndefinedStatistic("correlation of series of unequal length");
  if (x.size() < 2) throw UndefinedStatistic("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw UndefinedStatistic("correlation with zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double WindowCorrelation(const std::vector<MatchLog>& logs, int k, Agent seat) {
  if (logs.size() < 2) throw UndefinedStatistic("window correlation needs at least two logs");
  if (k < 1) throw InvalidArgument("window size must be >= 1");
  std::vector<double> first, last;
  for (const MatchLog& log : logs) {
    const int t = log.episodes();
    if (t < 2 * k) throw InvalidArgument("log shorter than two windows");
    first.push_back(MeanNormalizedReward(log, seat, 1, k));
    last.push_back(MeanNormalizedReward(log, seat, t - k + 1, t));
  }
  return Pearson(first, last);
}

std::vector<AccuracyWindow> SelectionAccuracy(
    const MatchLog& log, const PolicyProvider& base,
    const PolicyProvider& oracle_opponent,
    const std::vector<std::pair<int, int>>& windows, std::int64_t max_nodes) {
  if (log.decisions.empty()) {
    throw InvalidArgument("selection accuracy needs Best-of-N diagnostics");
  }
  std::vector<AccuracyWindow> out;
  for (auto [a, b] : windows) out.push_back({a, b, 0, 0, std::nullopt});

  // Context as seen at the start of each episode.
  std::vector<Context> contexts(1);
  for (const EpisodeRecord& e : log.context.episodes()) {
    Context next = contexts.back();
    next.Append(ReplayTrajectory(e.turns, log.spec), e.rewards);
    contexts.push_back(std::move(next));
  }

  for (const BonDecision& d : log.decisions) {
    if (d.set.chosen < 0 || d.set.chosen >= static_cast<int>(d.set.candidates.size())) {
      throw InvalidArgument("decision without a valid chosen index");
    }
    bool correct = true;
    if (d.set.candidates.size() > 1) {
      const EpisodeState state = ReplayTrajectory(d.prefix, log.spec);
      const Context& ctx = contexts.at(d.episode - 1);
      const DecisionPoint point{log.spec, ctx, state, d.agent, d.episode};
      std::vector<double> values;
      for (const Candidate& c : d.set.candidates) {
        SimulationBudget budget(max_nodes);
        try {
          values.push_back(
              ExactContinuationValue(point, c.action, base, oracle_opponent, &budget));
        } catch (const ResourceLimit& e) {
          throw AbstractionTooLarge(e.what());
        }
      }
      const double best = *std::max_element(values.begin(), values.end());
      correct = values[d.set.chosen] >= best - 1e-9;
    }
    for (AccuracyWindow& w : out) {
      if (d.episode >= w.first_episode && d.episode <= w.last_episode) {
        ++w.decisions;
        w.correct += correct ? 1 : 0;
      }
    }
  }
  for (AccuracyWindow& w : out) {
    if (w.decisions > 0) w.accuracy = static_cast<double>(w.correct) / w.decisions;
  }
  return out;
}

std::optional<double> PopulationStd(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

std::optional<double> ProposalDispersion(const CandidateSet& set, const GameSpec& spec) {
  std::vector<double> values;
  for (const Candidate& c : set.candidates) {
    if (c.action.kind != ProposalKind::kOffer) continue;
    values.push_back(spec.variant == GameVariant::kBuyerSeller
                         ? c.action.payload.price
                         : DealRewards(spec, c.action.payload).first);
  }
  return PopulationStd(values);
}

double SocialWelfare(const RewardPair& rewards) { return rewards.r1 + rewards.r2; }

double SocialWelfare(const EpisodeRecord& episode) {
  return SocialWelfare(episode.rewards);
}

double BootstrapMeanLowerBound(std::span<const double> values, double confidence,
                               int resamples, std::uint64_t seed) {
  if (values.empty()) throw UndefinedStatistic("bootstrap of an empty sample");
  if (resamples < 1) throw InvalidArgument("resamples must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidArgument("confidence must lie in (0, 1)");
  }
  Rng rng = MakeRng({seed});
  const std::size_t n = values.size();
  std::vector<double> means;
  means.reserve(resamples);
  for (int b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += values[static_cast<std::size_t>(Uniform01(rng) * n)];
    }
    means.push_back(sum / static_cast<double>(n));
  }
  std::sort(means.begin(), means.end());
  const auto idx = static_cast<std::size_t>(std::floor((1.0 - confidence) * resamples));
  return means[std::min(idx, means.size() - 1)];
}

void WriteMatrixCsv(const std::vector<std::string>& labels, const Matrix& m,
                    std::ostream& out) {
  out << "row";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << labels[i];
    for (double v : m[i]) out << ',' << FormatDouble(v);
    out << '\n';
  }
}

}  // namespace repgame
