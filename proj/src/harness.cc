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

#include "repgame/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "repgame/bon.h"
#include "repgame/bridge.h"
#include "repgame/io.h"
#include "repgame/match.h"
#include "repgame/metrics.h"
#include "repgame/persona.h"
#include "repgame/sfp.h"
#include "repgame/theory.h"

namespace repgame {

void OutputSet::Add(const std::string& relative, std::string body) {
  files_[relative] = std::move(body);
}

void OutputSet::Commit(const std::filesystem::path& dir) const {
  for (const auto& [rel, body] : files_) AtomicWriteFile(dir / rel, body);
}

void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

std::string ProviderLabel(const AgentConfig& agent) {
  if (!agent.name.empty()) return agent.name;
  const std::string family(PersonaFamilyName(agent.persona.family));
  switch (agent.kind) {
    case ProviderKind::kPersona: return family;
    case ProviderKind::kBon: return "bon_" + family;
    case ProviderKind::kBridge: return "bridge";
    case ProviderKind::kUniform: return "uniform";
  }
  return family;
}

std::unique_ptr<PolicyProvider> MakeProvider(const AgentConfig& agent,
                                             const ExperimentConfig& config) {
  const std::string label = ProviderLabel(agent);
  switch (agent.kind) {
    case ProviderKind::kPersona:
      return std::make_unique<Persona>(agent.persona, label);
    case ProviderKind::kBon:
      return std::make_unique<BoNAgent>(std::make_shared<Persona>(agent.persona), config.bon,
                                        config.opponent_model, nullptr, label);
    case ProviderKind::kUniform:
      return std::make_unique<UniformLegalPolicy>();
    case ProviderKind::kBridge: {
      const BridgeSection& b = config.bridge;
      std::shared_ptr<Transport> transport;
      if (b.transport == BridgeTransportKind::kHttp) {
        transport = std::make_shared<HttpTransport>(b.host, b.port);
      } else {
        transport = std::make_shared<SubprocessTransport>(b.command);
      }
      auto templates = std::make_shared<const TemplateLibrary>(TemplateLibrary::Load(
          b.assets_dir.empty() ? DefaultAssetDir() : std::filesystem::path(b.assets_dir)));
      BridgeOptions options;
      options.prompt = {b.template_id, b.persona_template, config.run.episodes};
      options.timeout = std::chrono::milliseconds(b.timeout_ms);
      options.retries = b.retries;
      options.name = label;
      return std::make_unique<BridgePolicy>(transport, templates, options);
    }
  }
  throw ConfigError("unknown provider kind");
}

namespace {

std::string F(double v) { return FormatDouble(v); }

std::string OptionalCell(const std::optional<double>& v) { return v ? F(*v) : ""; }

std::string TrajectoriesOf(const std::vector<MatchLog>& logs) {
  std::ostringstream os;
  for (const MatchLog& log : logs) WriteTrajectoriesJsonl(log, os);
  return os.str();
}

Json LogsJson(const std::vector<MatchLog>& logs) {
  Json out = Json::array();
  for (const MatchLog& log : logs) out.push_back(ToJson(log));
  return out;
}

void AddLogs(OutputSet& out, const ExperimentConfig& config, const Json& matchlog,
             const std::vector<MatchLog>& logs) {
  if (!config.run.write_trajectories) return;
  out.Add("trajectories.jsonl", TrajectoriesOf(logs));
  out.Add("matchlog.json", Dump(matchlog) + "\n");
}

sfp::OpponentSchedule MakeSchedule(const std::string& name, const sfp::NormalFormGame& game,
                                   Rng& rng) {
  if (name == "adversarial") return sfp::AdversarialToLeader(game);
  if (name == "round_robin") return sfp::RoundRobin(game.cols());
  std::vector<double> w(game.cols());
  double total = 0.0;
  for (double& x : w) total += (x = 0.05 + Uniform01(rng));
  for (double& x : w) x /= total;
  return sfp::Stationary(sfp::MixedStrategy(w));
}

}  // namespace

CommandResult RunFtpl(const ExperimentConfig& config) {
  config.Validate(Command::kRunFtpl);
  const SfpSection& s = config.sfp;
  std::optional<sfp::NormalFormGame> fixed;
  if (!s.game_path.empty()) fixed = sfp::LoadGame(s.game_path);

  struct Cell {
    std::string schedule;
    std::int64_t horizon;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& schedule : s.schedules) {
    for (auto horizon : s.horizons) {
      for (auto seed : config.run.seeds) cells.push_back({schedule, horizon, seed});
    }
  }
  std::vector<double> regrets(cells.size());
  std::vector<std::string> traces(cells.size());
  const std::int64_t longest = *std::max_element(s.horizons.begin(), s.horizons.end());
  ParallelFor(static_cast<int>(cells.size()), config.run.jobs, [&](int i) {
    const Cell& c = cells[i];
    Rng rng = MakeRng({c.seed, 1});
    const sfp::NormalFormGame game =
        fixed ? *fixed : sfp::NormalFormGame::Random(s.actions, s.actions, rng);
    const auto schedule = MakeSchedule(c.schedule, game, rng);
    const auto trace = sfp::RunSfpEpisodes(game, schedule, c.horizon, s.ftpl, DeriveSeed({c.seed, 2}));
    regrets[i] = sfp::ExternalRegret(trace, game);
    if (c.seed == config.run.seeds.front() && c.horizon == longest) {
      std::ostringstream os;
      sfp::WriteTraceCsv(trace, os);
      traces[i] = os.str();
    }
  });

  CommandResult result;
  std::ostringstream per_seed, summary;
  per_seed << "schedule,horizon,seed,regret,regret_per_t,rate\n";
  summary << "schedule,horizon,mean_regret,mean_regret_per_t,mean_rate\n";
  Json cells_json = Json::array();
  std::map<std::string, bool> decreasing;
  std::size_t i = 0;
  for (const auto& schedule : s.schedules) {
    double previous = std::numeric_limits<double>::infinity();
    decreasing[schedule] = true;
    for (auto horizon : s.horizons) {
      const double t = static_cast<double>(horizon);
      const int actions = fixed ? fixed->rows() : s.actions;
      const double scale = std::sqrt(t * std::log(std::max(2, actions)));
      double sum = 0.0;
      for (auto seed : config.run.seeds) {
        per_seed << schedule << ',' << horizon << ',' << seed << ',' << F(regrets[i]) << ','
                 << F(regrets[i] / t) << ',' << F(regrets[i] / scale) << '\n';
        if (!traces[i].empty()) {
          result.outputs.Add("metrics/trace_" + schedule + ".csv", traces[i]);
        }
        sum += regrets[i++];
      }
      const double mean = sum / static_cast<double>(config.run.seeds.size());
      summary << schedule << ',' << horizon << ',' << F(mean) << ',' << F(mean / t) << ','
              << F(mean / scale) << '\n';
      decreasing[schedule] = decreasing[schedule] && mean / t < previous;
      previous = mean / t;
      cells_json.push_back({{"schedule", schedule},
                            {"horizon", horizon},
                            {"mean_regret", mean},
                            {"mean_regret_per_t", mean / t},
                            {"mean_rate", mean / scale}});
    }
  }
  result.outputs.Add("metrics/ftpl_regret.csv", per_seed.str());
  result.outputs.Add("metrics/ftpl_summary.csv", summary.str());
  result.summary = {{"cells", cells_json}, {"regret_per_t_decreasing", decreasing}};
  result.outputs.Add("reports/ftpl.json", Dump(result.summary) + "\n");
  return result;
}

CommandResult RunMatrixCommand(const ExperimentConfig& config) {
  config.Validate(Command::kRunMatrix);
  std::vector<ProviderFactory> factories;
  std::map<std::string, int> seen;
  for (const PersonaParams& p : config.matrix.personas) {
    std::string label(PersonaFamilyName(p.family));
    if (const int n = seen[label]++; n > 0) label += "_" + std::to_string(n + 1);
    factories.push_back({label, [p, label] { return std::make_unique<Persona>(p, label); }});
  }
  std::vector<MatchLog> logs;
  const PairwiseMatrix m = ComputePairwiseMatrix(factories, config.game, config.run.episodes,
                                                 config.run.seeds, config.run.jobs, &logs);
  CommandResult result;
  {
    std::ostringstream os;
    WriteMatrixCsv(m.labels, m.combined, os);
    result.outputs.Add("metrics/matrix_combined.csv", os.str());
  }
  for (std::size_t s = 0; s < m.settings.size(); ++s) {
    std::ostringstream os;
    WriteMatrixCsv(m.labels, m.per_setting[s], os);
    result.outputs.Add("metrics/matrix_" + m.settings[s].Label() + ".csv", os.str());
  }

  // Social welfare of deal episodes and first/last window correlation.
  const std::size_t per_setting = logs.size() / m.settings.size();
  std::ostringstream welfare, corr;
  welfare << "setting,deal_episodes,min_welfare,max_welfare,mean_welfare\n";
  corr << "setting,k,correlation\n";
  const int k = std::min(5, config.run.episodes / 2);
  Json corr_json = Json::object();
  for (std::size_t s = 0; s < m.settings.size(); ++s) {
    const std::vector<MatchLog> slice(logs.begin() + s * per_setting,
                                      logs.begin() + (s + 1) * per_setting);
    int deals = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (const MatchLog& log : slice) {
      for (const EpisodeRecord& e : log.context.episodes()) {
        if (!e.deal) continue;
        const double w = SocialWelfare(e);
        ++deals;
        lo = std::min(lo, w);
        hi = std::max(hi, w);
        sum += w;
      }
    }
    const std::string label = m.settings[s].Label();
    welfare << label << ',' << deals << ',' << (deals ? F(lo) : "") << ','
            << (deals ? F(hi) : "") << ',' << (deals ? F(sum / deals) : "") << '\n';
    std::optional<double> r;
    if (k >= 1) {
      try {
        r = WindowCorrelation(slice, k, m.settings[s].row_seat);
      } catch (const UndefinedStatistic&) {
      }
    }
    corr << label << ',' << k << ',' << OptionalCell(r) << '\n';
    corr_json[label] = r ? Json(*r) : Json(nullptr);
  }
  result.outputs.Add("metrics/welfare.csv", welfare.str());
  result.outputs.Add("metrics/window_correlation.csv", corr.str());

  result.summary = {{"labels", m.labels},
                    {"dominant_row", m.dominant_row ? Json(m.labels[*m.dominant_row]) : Json()},
                    {"window_correlation", corr_json}};
  result.outputs.Add("reports/matrix.json", Dump(result.summary) + "\n");
  AddLogs(result.outputs, config, LogsJson(logs), logs);
  return result;
}

CommandResult RunBon(const ExperimentConfig& config) {
  config.Validate(Command::kRunBon);
  const int T = config.run.episodes;
  const auto& seeds = config.run.seeds;
  std::vector<MatchLog> bon_logs(seeds.size()), base_logs(seeds.size());
  ParallelFor(static_cast<int>(seeds.size()), config.run.jobs, [&](int i) {
    auto bon = MakeProvider(*config.agent1, config);
    auto opponent = MakeProvider(*config.opponent, config);
    bon_logs[i] = RunMatch(config.game, *bon, *opponent, T, seeds[i]);
    AgentConfig base_cfg = *config.agent1;
    base_cfg.kind = ProviderKind::kPersona;
    base_cfg.name.clear();
    auto base = MakeProvider(base_cfg, config);
    auto opponent2 = MakeProvider(*config.opponent, config);
    base_logs[i] = RunMatch(config.game, *base, *opponent2, T, seeds[i]);
  });

  CommandResult result;
  std::ostringstream rewards, episodes, dispersion, welfare, accuracy;
  rewards << "seed,bon,base,difference\n";
  episodes << "seed,episode,bon,base\n";
  dispersion << "seed,episode,h,candidates,dispersion\n";
  welfare << "seed,episode,deal,welfare\n";
  accuracy << "seed,first_episode,last_episode,decisions,correct,accuracy\n";
  std::vector<double> diffs;
  double mean_bon = 0.0, mean_base = 0.0;
  const Persona base_policy(config.agent1->persona);
  std::unique_ptr<PolicyProvider> oracle;
  if (config.opponent->kind == ProviderKind::kPersona ||
      config.opponent->kind == ProviderKind::kUniform) {
    oracle = MakeProvider(*config.opponent, config);
  }
  const std::vector<std::pair<int, int>> windows{{1, std::min(5, T)}, {std::max(1, T - 4), T}};
  std::string accuracy_note;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const double b = MeanNormalizedReward(bon_logs[i], Agent::kOne, 1, T);
    const double p = MeanNormalizedReward(base_logs[i], Agent::kOne, 1, T);
    diffs.push_back(b - p);
    mean_bon += b / seeds.size();
    mean_base += p / seeds.size();
    rewards << seeds[i] << ',' << F(b) << ',' << F(p) << ',' << F(b - p) << '\n';
    for (int e = 0; e < T; ++e) {
      episodes << seeds[i] << ',' << e + 1 << ','
               << F(bon_logs[i].context[e].rewards.normalized1) << ','
               << F(base_logs[i].context[e].rewards.normalized1) << '\n';
      const EpisodeRecord& rec = bon_logs[i].context[e];
      welfare << seeds[i] << ',' << e + 1 << ',' << (rec.deal ? 1 : 0) << ','
              << F(SocialWelfare(rec)) << '\n';
    }
    for (const BonDecision& d : bon_logs[i].decisions) {
      dispersion << seeds[i] << ',' << d.episode << ',' << d.h << ','
                 << d.set.candidates.size() << ','
                 << OptionalCell(ProposalDispersion(d.set, config.game)) << '\n';
    }
    if (oracle && !bon_logs[i].decisions.empty()) {
      try {
        for (const AccuracyWindow& w :
             SelectionAccuracy(bon_logs[i], base_policy, *oracle, windows)) {
          accuracy << seeds[i] << ',' << w.first_episode << ',' << w.last_episode << ','
                   << w.decisions << ',' << w.correct << ',' << OptionalCell(w.accuracy) << '\n';
        }
      } catch (const AbstractionTooLarge& e) {
        accuracy_note = e.what();
      }
    }
  }
  const double lower = BootstrapMeanLowerBound(diffs, 0.95, 2000, DeriveSeed({seeds.front(), 9}));
  result.outputs.Add("metrics/bon_rewards.csv", rewards.str());
  result.outputs.Add("metrics/episode_rewards.csv", episodes.str());
  result.outputs.Add("metrics/proposal_dispersion.csv", dispersion.str());
  result.outputs.Add("metrics/welfare.csv", welfare.str());
  if (oracle) result.outputs.Add("metrics/selection_accuracy.csv", accuracy.str());

  std::size_t incidents = 0;
  for (const MatchLog& log : bon_logs) incidents += log.incidents.size();
  result.summary = {{"agent1", bon_logs.front().agent1},
                    {"opponent", bon_logs.front().agent2},
                    {"mean_bon", mean_bon},
                    {"mean_base", mean_base},
                    {"mean_difference", mean_bon - mean_base},
                    {"difference_lower_95", lower},
                    {"improved", lower > 0.0},
                    {"incidents", incidents}};
  if (!accuracy_note.empty()) result.summary["selection_accuracy_skipped"] = accuracy_note;
  result.outputs.Add("reports/bon.json", Dump(result.summary) + "\n");
  AddLogs(result.outputs, config, Json{{"bon", LogsJson(bon_logs)}, {"base", LogsJson(base_logs)}},
          bon_logs);
  return result;
}

CommandResult VerifyTheory(const ExperimentConfig& config) {
  config.Validate(Command::kVerifyTheory);
  const TheorySettings& t = config.theory;
  CommandResult result;
  Json summary = Json::object();

  auto add_report = [&](const std::string& name, const Json& rows, bool pass) {
    result.outputs.Add("reports/" + name + ".json",
                       Dump(Json{{"pass", pass}, {"instances", rows}}) + "\n");
    summary[name] = pass;
    result.pass = result.pass && pass;
  };

  {
    std::ostringstream csv;
    csv << "instance_id,h,decision_points,lhs,rhs,slack,pass\n";
    Json rows = Json::array();
    bool pass = true;
    for (const Theorem1Report& r : SweepTheorem1(t)) {
      for (const Theorem1Row& row : r.rows) {
        csv << r.instance_id << ',' << row.h << ',' << row.decision_points << ',' << F(row.lhs)
            << ',' << F(row.rhs) << ',' << F(row.slack) << ',' << (row.pass ? 1 : 0) << '\n';
      }
      rows.push_back(ToJson(r));
      pass = pass && r.pass;
    }
    result.outputs.Add("metrics/theorem1.csv", csv.str());
    add_report("theorem1", rows, pass);
  }
  {
    std::ostringstream csv;
    csv << "instance_id,punished_message,j_policy,bound,best_response,r1_max,pass\n";
    Json rows = Json::array();
    bool pass = true;
    for (const Prop1Report& r : SweepProp1(t)) {
      csv << r.instance_id << ',' << r.punished_message << ',' << F(r.j_policy) << ','
          << F(r.bound) << ',' << F(r.best_response) << ',' << F(r.r1_max) << ','
          << (r.pass ? 1 : 0) << '\n';
      rows.push_back(ToJson(r));
      pass = pass && r.pass;
    }
    result.outputs.Add("metrics/prop1.csv", csv.str());
    add_report("prop1", rows, pass);
  }
  {
    std::ostringstream csv;
    csv << "instance_id,base_value";
    for (int l = 1; l <= t.pi_max_level; ++l) csv << ",level" << l;
    csv << ",optimum,planner_turns,pass\n";
    Json rows = Json::array();
    bool pass = true;
    for (const PolicyImprovementReport& r : SweepPolicyImprovement(t)) {
      csv << r.instance_id << ',' << F(r.base_value);
      for (double v : r.sharpened) csv << ',' << F(v);
      csv << ',' << F(r.optimum) << ',' << r.planner_turns << ',' << (r.pass ? 1 : 0) << '\n';
      rows.push_back(ToJson(r));
      pass = pass && r.pass;
    }
    result.outputs.Add("metrics/policy_improvement.csv", csv.str());
    add_report("policy_improvement", rows, pass);
  }
  {
    const RegretRateReport r = SweepRegretRate(t, config.sfp.ftpl);
    std::ostringstream csv;
    csv << "schedule,horizon,mean_regret,mean_regret_per_t,mean_rate\n";
    for (const RegretCell& c : r.cells) {
      csv << c.schedule << ',' << c.horizon << ',' << F(c.mean_regret) << ','
          << F(c.mean_regret_per_t) << ',' << F(c.mean_rate) << '\n';
    }
    result.outputs.Add("metrics/regret_rate.csv", csv.str());
    result.outputs.Add("reports/regret_rate.json", Dump(ToJson(r)) + "\n");
    summary["regret_rate"] = r.pass;
    result.pass = result.pass && r.pass;
  }
  {
    std::ostringstream csv;
    csv << "case,value,dx,dy,cross_check,expected,pass\n";
    Json rows = Json::array();
    bool pass = true;
    for (const R1MaxCase& c : CheckR1Max()) {
      csv << c.name << ',' << F(c.primary.value) << ',' << c.primary.dx << ',' << c.primary.dy
          << ',' << F(c.cross_check.value) << ',' << F(c.expected) << ',' << (c.pass ? 1 : 0)
          << '\n';
      rows.push_back(ToJson(c));
      pass = pass && c.pass;
    }
    result.outputs.Add("metrics/r1max.csv", csv.str());
    add_report("r1max", rows, pass);
  }
  summary["pass"] = result.pass;
  result.summary = summary;
  result.outputs.Add("reports/summary.json", Dump(summary) + "\n");
  return result;
}

CommandResult RunCommand(Command command, const ExperimentConfig& config) {
  CommandResult result;
  switch (command) {
    case Command::kRunFtpl: result = RunFtpl(config); break;
    case Command::kRunMatrix: result = RunMatrixCommand(config); break;
    case Command::kRunBon: result = RunBon(config); break;
    case Command::kVerifyTheory: result = VerifyTheory(config); break;
    case Command::kServeBridge:
      throw InvalidArgument("serve-bridge does not produce a run directory");
  }
  result.outputs.Add("config.json", Dump(ToJson(config)) + "\n");
  result.run_dir = std::filesystem::path(config.run.output_dir) / config.RunId(command);
  result.outputs.Commit(result.run_dir);
  return result;
}

int ServeBridge(const ExperimentConfig& config, std::istream& in, std::ostream& out,
                std::ostream& log) {
  config.Validate(Command::kServeBridge);
  BridgeHandler handler = PersonaHandler(config.game, config.bridge.serve_persona);
  if (config.bridge.serve_mode == "stdio") {
    ServeStdio(in, out, handler);
    return 0;
  }
  HttpBridgeServer server(handler);
  const int port = server.Start(config.bridge.host, config.bridge.port);
  log << "serving on http://" << config.bridge.host << ":" << port << std::endl;
  server.Wait();
  return 0;
}

}  // namespace repgame
