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

#include "repgame/bridge.h"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>
#include <fcntl.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "httplib.h"
#include "repgame/io.h"

namespace repgame {

std::string_view RequestKindName(RequestKind k) {
  switch (k) {
    case RequestKind::kAct: return "act";
    case RequestKind::kSimulateOpponent: return "simulate_opponent";
    case RequestKind::kEvaluateCandidates: return "evaluate_candidates";
  }
  return "act";
}

RequestKind ParseRequestKind(std::string_view name) {
  if (name == "act") return RequestKind::kAct;
  if (name == "simulate_opponent") return RequestKind::kSimulateOpponent;
  if (name == "evaluate_candidates") return RequestKind::kEvaluateCandidates;
  throw ConfigError("unknown request kind \"" + std::string(name) + "\"");
}

std::string_view EndpointFor(RequestKind k) {
  switch (k) {
    case RequestKind::kAct: return "/act";
    case RequestKind::kSimulateOpponent: return "/simulate";
    case RequestKind::kEvaluateCandidates: return "/evaluate";
  }
  return "/act";
}

std::string RoleName(const GameSpec& spec, Agent agent) {
  if (spec.variant == GameVariant::kBuyerSeller) {
    return agent == spec.seller ? "seller" : "buyer";
  }
  return agent == Agent::kOne ? "agent1" : "agent2";
}

Agent ParseRole(const GameSpec& spec, std::string_view role) {
  for (Agent a : {Agent::kOne, Agent::kTwo}) {
    if (RoleName(spec, a) == role) return a;
  }
  throw ConfigError("unknown role \"" + std::string(role) + "\"");
}

Json ToJson(const BridgeRequest& r) {
  return {{"kind", std::string(RequestKindName(r.kind))},
          {"role", r.role},
          {"template_id", r.template_id},
          {"private_info", r.private_info},
          {"context", r.context},
          {"trajectory", r.trajectory},
          {"candidates", r.candidates},
          {"nonce", r.nonce}};
}

BridgeRequest BridgeRequestFromJson(const Json& j) {
  CheckKeys(j, {"kind", "role", "template_id", "private_info", "context", "trajectory",
                "candidates", "nonce"},
            "request");
  auto text = [&](std::string_view key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ConfigError("request." + std::string(key) + " must be a string");
    }
    return it->get<std::string>();
  };
  auto array = [&](std::string_view key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array()) {
      throw ConfigError("request." + std::string(key) + " must be an array");
    }
    return *it;
  };
  BridgeRequest r;
  r.kind = ParseRequestKind(text("kind"));
  r.role = text("role");
  r.template_id = text("template_id");
  r.private_info = text("private_info");
  r.context = array("context");
  r.trajectory = array("trajectory");
  r.candidates = array("candidates");
  r.nonce = text("nonce");
  if (r.kind == RequestKind::kEvaluateCandidates && r.candidates.empty()) {
    throw ConfigError("evaluate request without candidates");
  }
  return r;
}

Json ToJson(const BridgeResponse& r) {
  return {{"proposal", r.proposal ? *r.proposal : Json(nullptr)},
          {"message", r.message},
          {"chosen_index", r.chosen_index ? Json(*r.chosen_index) : Json(nullptr)},
          {"thoughts", r.thoughts}};
}

BridgeResponse ParseResponse(std::string_view text, RequestKind kind) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception&) {
    throw ResponseError("response is not valid JSON");
  }
  if (!j.is_object()) throw ResponseError("response must be a JSON object");
  if (auto it = j.find("error"); it != j.end()) {
    throw ResponseError("backend reported an error: " + it->dump());
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "proposal" && k != "message" && k != "chosen_index" && k != "thoughts") {
      throw ResponseError("unknown response field \"" + k + "\"");
    }
  }
  BridgeResponse r;
  if (auto it = j.find("message"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ResponseError("response.message must be a string");
    r.message = it->get<std::string>();
  }
  if (auto it = j.find("thoughts"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ResponseError("response.thoughts must be a string");
    r.thoughts = it->get<std::string>();
  }
  if (auto it = j.find("chosen_index"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ResponseError("response.chosen_index must be an integer");
    r.chosen_index = it->get<int>();
  }
  if (auto it = j.find("proposal"); it != j.end() && !it->is_null()) {
    if (!it->is_object() || !it->contains("kind") || !(*it)["kind"].is_string()) {
      throw ResponseError("response.proposal must be an object with a string kind");
    }
    r.proposal = *it;
  }
  if (kind == RequestKind::kEvaluateCandidates) {
    if (!r.chosen_index) throw ResponseError("evaluate response without chosen_index");
  } else if (!r.proposal) {
    throw ResponseError("response without proposal");
  }
  return r;
}

Action ResponseToAction(const BridgeResponse& r, const DecisionPoint& point) {
  if (!r.proposal) throw ResponseError("response without proposal");
  Json action = *r.proposal;
  if (action.contains("message")) throw ResponseError("message belongs at the top level");
  action["message"] = r.message.empty() ? Json(nullptr) : Json(r.message);
  Action a;
  try {
    a = ActionFromJson(point.spec, action);
  } catch (const Error& e) {
    throw ResponseError(std::string("unusable proposal: ") + e.what());
  }
  if (Verdict v = ValidateAction(point.state, point.spec, a); !v) {
    throw ResponseError("illegal action " + DescribeAction(a, point.spec) + ": " + v.reason);
  }
  return a;
}

int ResponseToIndex(const BridgeResponse& r, int candidate_count) {
  if (!r.chosen_index) throw ResponseError("response without chosen_index");
  if (*r.chosen_index < 1 || *r.chosen_index > candidate_count) {
    throw ResponseError("chosen_index " + std::to_string(*r.chosen_index) +
                        " outside 1.." + std::to_string(candidate_count));
  }
  return *r.chosen_index - 1;
}

TemplateLibrary TemplateLibrary::Load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("template directory " + dir.string() + " does not exist");
  }
  TemplateLibrary lib;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      lib.Add(entry.path().stem().string(), ReadFile(entry.path()));
    }
  }
  return lib;
}

void TemplateLibrary::Add(std::string id, std::string text) {
  templates_[std::move(id)] = std::move(text);
}

bool TemplateLibrary::Has(std::string_view id) const {
  return templates_.find(id) != templates_.end();
}

const std::string& TemplateLibrary::Get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ConfigError("unknown template \"" + std::string(id) + "\"");
  return it->second;
}

std::vector<std::string> TemplateLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : templates_) out.push_back(k);
  return out;
}

std::string TemplateLibrary::Render(std::string_view id,
                                    const std::map<std::string, std::string>& vars) const {
  return RenderTemplate(Get(id), vars);
}

std::string RenderTemplate(std::string_view text,
                           const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) throw ConfigError("unterminated placeholder in template");
    out.append(text.substr(pos, open - pos));
    const std::string name(text.substr(open + 2, close - open - 2));
    auto it = vars.find(name);
    if (it == vars.end()) throw ConfigError("template placeholder {{" + name + "}} has no value");
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

namespace {

std::string PayloadText(const GameSpec& spec, const Payload& p) {
  if (spec.variant == GameVariant::kBuyerSeller) return FormatDouble(p.price);
  return "(" + std::to_string(p.dx) + ", " + std::to_string(p.dy) + ")";
}

std::string RulesText(const GameSpec& spec, Agent planner) {
  std::ostringstream os;
  const std::string role = RoleName(spec, planner);
  if (spec.variant == GameVariant::kBuyerSeller) {
    os << "A seller and a buyer bargain over the price of one item. Prices are chosen from "
       << spec.price_grid.size() << " levels between " << FormatDouble(spec.price_grid.front())
       << " and " << FormatDouble(spec.price_grid.back()) << ". ";
    os << "The seller earns the deal price minus its production cost; the buyer earns its "
          "budget minus the deal price. ";
    if (planner == spec.seller) {
      os << "You are the seller and your production cost is "
         << FormatDouble(spec.production_cost) << ". ";
    } else {
      os << "You are the buyer and your budget is " << FormatDouble(spec.budget) << ". ";
    }
  } else {
    const int i = Index(planner);
    os << "Two agents trade units of resources X and Y. A proposal (dx, dy) moves dx units "
          "of X and dy units of Y to agent1 (negative values move them to agent2). ";
    os << "Each agent earns the change in the value of its holdings. ";
    os << "You are " << role << ", you hold " << spec.inventory[i].x << " X and "
       << spec.inventory[i].y << " Y, and you value X at " << FormatDouble(spec.value[i].x)
       << " and Y at " << FormatDouble(spec.value[i].y) << " per unit. ";
    os << "dx must lie in [" << -spec.inventory[0].x << ", " << spec.inventory[1].x
       << "] and dy in [" << -spec.inventory[0].y << ", " << spec.inventory[1].y << "]. ";
  }
  os << "On each turn a player may propose, accept or reject the other side's standing "
        "proposal, or wait. Rejection ends the episode. An episode lasts at most "
     << spec.horizon << " turns and without a deal both players earn 0. ";
  os << "Every turn carries one message token from: ";
  for (std::size_t k = 0; k < spec.message_alphabet.size(); ++k) {
    os << (k ? ", " : "") << spec.message_alphabet[k];
  }
  os << ".";
  return os.str();
}

std::string HistoryText(const GameSpec& spec, const std::vector<Turn>& turns) {
  if (turns.empty()) return "(no turns yet)";
  std::ostringstream os;
  for (std::size_t k = 0; k < turns.size(); ++k) {
    const Turn& t = turns[k];
    os << (k ? "\n" : "") << "turn " << t.h << ", " << RoleName(spec, t.agent) << ": "
       << DescribeAction(t.action, spec);
  }
  return os.str();
}

std::string CandidateList(const GameSpec& spec, const std::vector<Action>& candidates) {
  std::ostringstream os;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    os << (k ? "\n" : "") << "[" << k + 1 << "] " << DescribeAction(candidates[k], spec);
  }
  return os.str();
}

}  // namespace

std::map<std::string, std::string> PromptVariables(RequestKind kind,
                                                   const DecisionPoint& point,
                                                   int num_episodes,
                                                   const std::vector<Action>& candidates) {
  const GameSpec& spec = point.spec;
  const Agent planner = kind == RequestKind::kSimulateOpponent ? Other(point.agent) : point.agent;
  std::map<std::string, std::string> v;
  v["rules_of_games"] = RulesText(spec, planner);
  v["game_rule_description"] = v["rules_of_games"];
  v["nego_history"] = HistoryText(spec, point.state.trajectory);
  v["agent_name"] = RoleName(spec, point.agent);
  v["agent_1"] = RoleName(spec, planner);
  v["agent_2"] = RoleName(spec, Other(planner));
  v["current_episode"] = std::to_string(point.episode);
  v["num_episodes"] = std::to_string(num_episodes);
  std::string deals, rewards;
  for (std::size_t k = 0; k < point.context.size(); ++k) {
    const EpisodeRecord& e = point.context[k];
    deals += (k ? ", " : "") + (e.deal ? PayloadText(spec, *e.deal) : std::string("none"));
    rewards += (k ? ", " : "") +
               FormatDouble(planner == Agent::kOne ? e.rewards.r1 : e.rewards.r2);
  }
  v["previous_deals_prices_strings"] = deals;
  v["previous_rewards_strings"] = rewards;
  v["response_list"] = CandidateList(spec, candidates);
  v["concatenated_candidates"] = v["response_list"];
  v["horizon"] = std::to_string(spec.horizon);
  v["current_turn"] = std::to_string(point.state.h);
  v["persona_instructions"] = "";
  v["episode_reminder"] = "";
  return v;
}

BridgeRequest MakeRequest(RequestKind kind, const DecisionPoint& point,
                          const TemplateLibrary& templates, const PromptSelection& prompt,
                          const std::vector<Action>& candidates, std::string nonce) {
  auto vars = PromptVariables(kind, point, prompt.num_episodes, candidates);
  if (templates.Has("episode_reminder")) {
    vars["episode_reminder"] = templates.Render("episode_reminder", vars);
  }
  if (!prompt.persona_template.empty()) {
    vars["persona_instructions"] = templates.Render(prompt.persona_template, vars);
  }
  BridgeRequest r;
  r.kind = kind;
  r.role = RoleName(point.spec, point.agent);
  r.template_id = prompt.template_id;
  r.private_info = templates.Render(prompt.template_id, vars);
  r.context = ToJson(point.spec, point.context);
  r.trajectory = TrajectoryToJson(point.spec, point.state.trajectory);
  for (const Action& a : candidates) r.candidates.push_back(ActionToJson(point.spec, a));
  r.nonce = std::move(nonce);
  return r;
}

// ---------------------------------------------------------------------------
// Transports.

SubprocessTransport::SubprocessTransport(std::vector<std::string> argv)
    : argv_(std::move(argv)) {
  if (argv_.empty()) throw ConfigError("subprocess transport needs a command");
  // A child that dies mid-write must surface as EPIPE, not kill the harness.
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

SubprocessTransport::~SubprocessTransport() { Stop(); }

std::string SubprocessTransport::Describe() const {
  std::string out = "subprocess:";
  for (const auto& a : argv_) out += " " + a;
  return out;
}

void SubprocessTransport::Start() {
  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw BridgeError("pipe failed");
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw BridgeError("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw BridgeError("fork failed");
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  buffer_.clear();
}

void SubprocessTransport::Stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

std::string SubprocessTransport::Exchange(std::string_view /*endpoint*/,
                                          const std::string& body,
                                          std::chrono::milliseconds timeout) {
  if (body.find('\n') != std::string::npos) {
    throw InvalidArgument("line-delimited bodies cannot contain newlines");
  }
  if (pid_ < 0) Start();
  const std::string line = body + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(to_child_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      throw BridgeError("backend closed its input (" + Describe() + ")");
    }
    written += static_cast<std::size_t>(n);
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string reply = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return reply;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      Stop();
      throw TransportTimeout("no reply within " + std::to_string(timeout.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      throw BridgeError("backend exited (" + Describe() + ")");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

HttpTransport::HttpTransport(std::string host, int port)
    : host_(std::move(host)), port_(port) {}

std::string HttpTransport::Describe() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

std::string HttpTransport::Exchange(std::string_view endpoint, const std::string& body,
                                    std::chrono::milliseconds timeout) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(std::string(endpoint), body, "application/json");
  if (!res) {
    const httplib::Error err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw TransportTimeout("no reply within " + std::to_string(timeout.count()) + " ms");
    }
    throw BridgeError("HTTP request to " + Describe() + " failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw ResponseError("HTTP status " + std::to_string(res->status));
  }
  return res->body;
}

// ---------------------------------------------------------------------------
// Provider.

BridgePolicy::BridgePolicy(std::shared_ptr<Transport> transport,
                           std::shared_ptr<const TemplateLibrary> templates,
                           BridgeOptions options)
    : transport_(std::move(transport)),
      templates_(std::move(templates)),
      options_(std::move(options)) {
  if (!transport_ || !templates_) throw InvalidArgument("bridge needs a transport and templates");
  if (options_.retries < 0) throw ConfigError("bridge retries must be >= 0");
  if (options_.timeout.count() <= 0) throw ConfigError("bridge timeout must be positive");
  if (options_.kind == RequestKind::kEvaluateCandidates) {
    throw ConfigError("an acting bridge cannot use the evaluate kind");
  }
}

std::string BridgePolicy::NextNonce() {
  return options_.name + "-" + std::to_string(++counter_);
}

void BridgePolicy::Record(const DecisionPoint& point, std::string detail) {
  incidents_.push_back({point.episode, point.state.h, options_.name, std::move(detail)});
}

std::vector<Incident> BridgePolicy::TakeIncidents() {
  std::vector<Incident> out;
  out.swap(incidents_);
  return out;
}

Action BridgePolicy::Act(const DecisionPoint& point, Rng& /*rng*/) {
  const int attempts = options_.retries + 1;
  for (int k = 1; k <= attempts; ++k) {
    last_body_ = Dump(ToJson(
        MakeRequest(options_.kind, point, *templates_, options_.prompt, {}, NextNonce())));
    try {
      const std::string reply =
          transport_->Exchange(EndpointFor(options_.kind), last_body_, options_.timeout);
      return ResponseToAction(ParseResponse(reply, options_.kind), point);
    } catch (const ResponseError& e) {
      Record(point, "attempt " + std::to_string(k) + " rejected: " + e.what());
    } catch (const TransportTimeout& e) {
      Record(point, "attempt " + std::to_string(k) + " timed out: " + e.what());
    }
  }
  Record(point, "attempts exhausted; substituted wait");
  return Action::Wait();
}

int BridgePolicy::Evaluate(const DecisionPoint& point, const std::vector<Action>& candidates) {
  if (candidates.empty()) throw InvalidArgument("evaluate needs candidates");
  PromptSelection prompt = options_.prompt;
  prompt.template_id = "eval";
  const int attempts = options_.retries + 1;
  for (int k = 1; k <= attempts; ++k) {
    last_body_ = Dump(ToJson(MakeRequest(RequestKind::kEvaluateCandidates, point, *templates_,
                                         prompt, candidates, NextNonce())));
    try {
      const std::string reply = transport_->Exchange(
          EndpointFor(RequestKind::kEvaluateCandidates), last_body_, options_.timeout);
      return ResponseToIndex(ParseResponse(reply, RequestKind::kEvaluateCandidates),
                             static_cast<int>(candidates.size()));
    } catch (const ResponseError& e) {
      Record(point, "attempt " + std::to_string(k) + " rejected: " + e.what());
    } catch (const TransportTimeout& e) {
      Record(point, "attempt " + std::to_string(k) + " timed out: " + e.what());
    }
  }
  Record(point, "attempts exhausted; substituted the first candidate");
  return 0;
}

// ---------------------------------------------------------------------------
// Server side.

BridgeHandler PersonaHandler(GameSpec spec, PersonaParams params) {
  spec.Validate();
  params.Validate();
  GameSpec other = spec.variant == GameVariant::kBuyerSeller ? GameSpec::ResourceExchange()
                                                             : GameSpec::BuyerSeller();
  return [specs = std::array<GameSpec, 2>{std::move(spec), std::move(other)},
          params](const Json& body) -> Json {
    try {
      const BridgeRequest req = BridgeRequestFromJson(body);
      const bool exchange_role = req.role == "agent1" || req.role == "agent2";
      const GameSpec& spec =
          (specs[0].variant == GameVariant::kResourceExchange) == exchange_role ? specs[0]
                                                                                : specs[1];
      const Agent agent = ParseRole(spec, req.role);
      const Context context = ContextFromJson(spec, req.context);
      const EpisodeState state = ReplayTrajectory(TrajectoryFromJson(spec, req.trajectory), spec);
      if (state.terminal()) throw ProtocolError("request at a terminal state");
      if (WhoseTurn(state.h, spec.starter) != agent) {
        throw ProtocolError("role " + req.role + " is not to move");
      }
      const DecisionPoint point{spec, context, state, agent,
                                static_cast<int>(context.size()) + 1};
      Json keyed = body;
      keyed.erase("nonce");
      Rng rng = MakeRng({Fnv1a(Dump(keyed))});
      const Action own = PersonaAct(params, point, rng);

      BridgeResponse resp;
      if (req.kind == RequestKind::kEvaluateCandidates) {
        int chosen = 0;
        for (std::size_t k = 0; k < req.candidates.size(); ++k) {
          if (ActionFromJson(spec, req.candidates[k]) == own) {
            chosen = static_cast<int>(k);
            break;
          }
        }
        resp.chosen_index = chosen + 1;
        resp.thoughts = "persona preference";
      } else {
        Json proposal = ActionToJson(spec, own);
        proposal.erase("message");
        resp.proposal = proposal;
        if (own.message != kEmptyMessage) resp.message = MessageLabel(spec, own.message);
      }
      return ToJson(resp);
    } catch (const Error& e) {
      return Json{{"error", e.what()}};
    }
  };
}

void ServeStdio(std::istream& in, std::ostream& out, const BridgeHandler& handler) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json reply;
    try {
      reply = handler(Json::parse(line));
    } catch (const Json::exception&) {
      reply = Json{{"error", "malformed request"}};
    }
    out << Dump(reply) << '\n' << std::flush;
  }
}

HttpBridgeServer::HttpBridgeServer(BridgeHandler handler)
    : handler_(std::move(handler)), server_(std::make_unique<httplib::Server>()) {
  for (RequestKind kind : {RequestKind::kAct, RequestKind::kSimulateOpponent,
                           RequestKind::kEvaluateCandidates}) {
    server_->Post(std::string(EndpointFor(kind)),
                  [this](const httplib::Request& req, httplib::Response& res) {
                    Json reply;
                    try {
                      reply = handler_(Json::parse(req.body));
                    } catch (const Json::exception&) {
                      res.status = 400;
                      reply = Json{{"error", "malformed request"}};
                    }
                    res.set_content(Dump(reply), "application/json");
                  });
  }
}

HttpBridgeServer::~HttpBridgeServer() { Stop(); }

int HttpBridgeServer::Start(const std::string& host, int port) {
  if (port == 0) {
    port = server_->bind_to_any_port(host);
    if (port < 0) throw BridgeError("cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw BridgeError("cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void HttpBridgeServer::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpBridgeServer::Wait() {
  if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------
// Conformance.

namespace {

struct Probe {
  std::string name;
  RequestKind kind;
  GameSpec spec;
  Context context;
  std::vector<Turn> trajectory;
  std::vector<Action> candidates;
};

std::vector<Turn> PlayTurns(const GameSpec& spec, const std::vector<Action>& actions) {
  EpisodeState state;
  for (const Action& a : actions) state = ApplyAction(state, spec, a);
  return state.trajectory;
}

std::vector<Probe> Battery() {
  std::vector<Probe> probes;
  for (GameSpec spec : {GameSpec::BuyerSeller(), GameSpec::ResourceExchange()}) {
    const std::string game(VariantName(spec.variant));
    const auto offers = OfferPayloads(spec);
    const auto& mid = offers[offers.size() / 2];
    auto offer = [&](const Payload& p) { return Action{ProposalKind::kOffer, p, 0}; };

    probes.push_back({game + "/act_empty_context", RequestKind::kAct, spec, {}, {}, {}});

    std::vector<Action> opening(spec.horizon - 1, offer(mid));
    probes.push_back(
        {game + "/act_last_turn", RequestKind::kAct, spec, {}, PlayTurns(spec, opening), {}});

    Context history;
    {
      EpisodeState s = ApplyAction({}, spec, offer(mid));
      s = ApplyAction(s, spec, Action::Accept(0));
      history.Append(s, NormalizeRewards(EpisodeRewards(s, spec), spec));
    }
    probes.push_back({game + "/act_with_history", RequestKind::kAct, spec, history, {}, {}});

    probes.push_back({game + "/simulate_after_offer", RequestKind::kSimulateOpponent, spec,
                      history, PlayTurns(spec, {offer(mid)}), {}});

    probes.push_back({game + "/evaluate_three", RequestKind::kEvaluateCandidates, spec, {}, {},
                      {offer(offers.front()), offer(mid), offer(offers.back())}});
  }
  return probes;
}

}  // namespace

ConformanceReport RunConformance(Transport& transport, const TemplateLibrary& templates,
                                 std::chrono::milliseconds latency_budget) {
  ConformanceReport report;
  auto add = [&](const std::string& request, const std::string& check, bool pass,
                 std::string detail) {
    report.checks.push_back({request, check, pass, std::move(detail)});
    report.pass = report.pass && pass;
  };
  int counter = 0;
  for (const Probe& probe : Battery()) {
    const EpisodeState state = ReplayTrajectory(probe.trajectory, probe.spec);
    const DecisionPoint point = PointFor(probe.spec, probe.context, state,
                                         static_cast<int>(probe.context.size()) + 1);
    PromptSelection prompt;
    prompt.template_id = probe.kind == RequestKind::kAct                ? "act"
                         : probe.kind == RequestKind::kSimulateOpponent ? "oppo"
                                                                        : "eval";
    const std::string body = Dump(ToJson(MakeRequest(probe.kind, point, templates, prompt,
                                                     probe.candidates,
                                                     "conformance-" + std::to_string(++counter))));
    std::string reply;
    const auto start = std::chrono::steady_clock::now();
    try {
      reply = transport.Exchange(EndpointFor(probe.kind), body, latency_budget * 4);
    } catch (const Error& e) {
      add(probe.name, "schema", false, e.what());
      add(probe.name, "legality", false, "no response");
      add(probe.name, "latency", false, "no response");
      continue;
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    BridgeResponse resp;
    try {
      resp = ParseResponse(reply, probe.kind);
      add(probe.name, "schema", true, "");
    } catch (const ResponseError& e) {
      add(probe.name, "schema", false, e.what());
      add(probe.name, "legality", false, "schema failed");
      add(probe.name, "latency", elapsed <= latency_budget,
          std::to_string(elapsed.count()) + " ms");
      continue;
    }
    try {
      if (probe.kind == RequestKind::kEvaluateCandidates) {
        ResponseToIndex(resp, static_cast<int>(probe.candidates.size()));
      } else {
        ResponseToAction(resp, point);
      }
      add(probe.name, "legality", true, "");
    } catch (const ResponseError& e) {
      add(probe.name, "legality", false, e.what());
    }
    add(probe.name, "latency", elapsed <= latency_budget, std::to_string(elapsed.count()) + " ms");
  }
  return report;
}

Json ToJson(const ConformanceReport& r) {
  Json checks = Json::array();
  for (const ConformanceCheck& c : r.checks) {
    checks.push_back(
        {{"request", c.request}, {"check", c.check}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return {{"checks", checks}, {"pass", r.pass}};
}

}  // namespace repgame
