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

// Wire protocol for external policies. A decision point is rendered into a
// JSON request (with the instruction text already filled in from the prompt
// templates) and sent over a child-process pipe (one JSON object per line)
// or HTTP POST. Responses are checked against the schema and the protocol;
// rejected responses are retried and finally replaced by Wait.

#ifndef REPGAME_BRIDGE_H_
#define REPGAME_BRIDGE_H_

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "repgame/errors.h"
#include "repgame/persona.h"
#include "repgame/policy.h"
#include "repgame/serialize.h"

namespace httplib {
class Server;
}

namespace repgame {

// A response that does not parse, misses a field or names an illegal action.
// Retried by the provider.
class ResponseError : public Error {
 public:
  using Error::Error;
};

// No reply within the deadline. The transport stays usable.
class TransportTimeout : public Error {
 public:
  using Error::Error;
};

enum class RequestKind { kAct, kSimulateOpponent, kEvaluateCandidates };

std::string_view RequestKindName(RequestKind k);
RequestKind ParseRequestKind(std::string_view name);
// HTTP path of the kind: /act, /simulate or /evaluate.
std::string_view EndpointFor(RequestKind k);

// "seller" / "buyer" in buyer-seller, "agent1" / "agent2" in exchange.
std::string RoleName(const GameSpec& spec, Agent agent);
Agent ParseRole(const GameSpec& spec, std::string_view role);

struct BridgeRequest {
  RequestKind kind = RequestKind::kAct;
  std::string role;
  std::string template_id;
  // Rendered instruction text, including the side's private information.
  std::string private_info;
  Json context = Json::array();
  Json trajectory = Json::array();
  Json candidates = Json::array();
  std::string nonce;
  bool operator==(const BridgeRequest&) const = default;
};

Json ToJson(const BridgeRequest& r);
// Throws ConfigError on a malformed request.
BridgeRequest BridgeRequestFromJson(const Json& j);

struct BridgeResponse {
  std::optional<Json> proposal;
  std::string message;
  // 1-based, as in "[x]" answers.
  std::optional<int> chosen_index;
  std::string thoughts;
};

Json ToJson(const BridgeResponse& r);
// Throws ResponseError unless `text` is a JSON object with the fields the
// request kind needs.
BridgeResponse ParseResponse(std::string_view text, RequestKind kind);

// The response as an action legal at `point`. Throws ResponseError.
Action ResponseToAction(const BridgeResponse& r, const DecisionPoint& point);
// The response's choice as a 0-based index. Throws ResponseError.
int ResponseToIndex(const BridgeResponse& r, int candidate_count);

// Prompt templates keyed by file stem; placeholders are {{name}}.
class TemplateLibrary {
 public:
  // Every *.txt file in `dir`. Throws ConfigError when the directory is
  // missing.
  static TemplateLibrary Load(const std::filesystem::path& dir);

  void Add(std::string id, std::string text);
  bool Has(std::string_view id) const;
  const std::string& Get(std::string_view id) const;
  std::vector<std::string> ids() const;

  // Throws ConfigError for an unknown template or a placeholder missing from
  // `vars`.
  std::string Render(std::string_view id,
                     const std::map<std::string, std::string>& vars) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

std::string RenderTemplate(std::string_view text,
                           const std::map<std::string, std::string>& vars);

// Template variables describing a decision point from the side of the agent
// that is planning (`point.agent` for act, the other side otherwise).
std::map<std::string, std::string> PromptVariables(
    RequestKind kind, const DecisionPoint& point, int num_episodes,
    const std::vector<Action>& candidates);

struct PromptSelection {
  // Template rendered into private_info.
  std::string template_id;
  // Persona instructions inserted as {{persona_instructions}}; may be empty.
  std::string persona_template;
  int num_episodes = 20;
};

// Identical decision points give identical requests up to the nonce.
BridgeRequest MakeRequest(RequestKind kind, const DecisionPoint& point,
                          const TemplateLibrary& templates,
                          const PromptSelection& prompt,
                          const std::vector<Action>& candidates, std::string nonce);

class Transport {
 public:
  virtual ~Transport() = default;
  // Sends one body and returns the reply body. Throws TransportTimeout when
  // no reply arrives in time and BridgeError when the backend is unreachable
  // or has gone away.
  virtual std::string Exchange(std::string_view endpoint, const std::string& body,
                               std::chrono::milliseconds timeout) = 0;
  virtual std::string Describe() const = 0;
};

// Child process speaking one JSON object per line on stdin / stdout. A
// timed-out child is restarted so a late reply cannot be mistaken for the
// next one.
class SubprocessTransport : public Transport {
 public:
  explicit SubprocessTransport(std::vector<std::string> argv);
  ~SubprocessTransport() override;
  SubprocessTransport(const SubprocessTransport&) = delete;
  SubprocessTransport& operator=(const SubprocessTransport&) = delete;

  std::string Exchange(std::string_view endpoint, const std::string& body,
                       std::chrono::milliseconds timeout) override;
  std::string Describe() const override;

 private:
  void Start();
  void Stop();

  std::vector<std::string> argv_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string host, int port);
  std::string Exchange(std::string_view endpoint, const std::string& body,
                       std::chrono::milliseconds timeout) override;
  std::string Describe() const override;

 private:
  std::string host_;
  int port_;
};

struct BridgeOptions {
  RequestKind kind = RequestKind::kAct;
  PromptSelection prompt{"act", "", 20};
  std::chrono::milliseconds timeout{5000};
  // Extra attempts after the first.
  int retries = 2;
  std::string name = "bridge";
};

// Provider backed by an external process. Every rejected attempt is logged
// as an incident; when the attempts run out it plays Wait. Transport
// failures propagate as BridgeError.
class BridgePolicy : public PolicyProvider, public IncidentSource {
 public:
  BridgePolicy(std::shared_ptr<Transport> transport,
               std::shared_ptr<const TemplateLibrary> templates, BridgeOptions options);

  std::string Name() const override { return options_.name; }
  Action Act(const DecisionPoint& point, Rng& rng) override;
  std::vector<Incident> TakeIncidents() override;

  // 0-based choice among `candidates` through an evaluate request; 0 once
  // the attempts run out.
  int Evaluate(const DecisionPoint& point, const std::vector<Action>& candidates);

  const std::string& last_request_body() const { return last_body_; }

 private:
  std::string NextNonce();
  void Record(const DecisionPoint& point, std::string detail);

  std::shared_ptr<Transport> transport_;
  std::shared_ptr<const TemplateLibrary> templates_;
  BridgeOptions options_;
  std::uint64_t counter_ = 0;
  std::string last_body_;
  std::vector<Incident> incidents_;
};

// Server side: maps one request to one response.
using BridgeHandler = std::function<Json(const Json& request)>;

// Answers every request kind with a scripted persona playing the requested
// role. The role names select the game: `spec` for its own variant, the
// defaults of the other variant otherwise. Evaluate picks the first
// candidate the persona would play itself, or the first candidate.
// Deterministic in the request body minus the nonce.
BridgeHandler PersonaHandler(GameSpec spec, PersonaParams params);

// Reads requests line by line until end of input. Unparseable lines get an
// {"error"} reply.
void ServeStdio(std::istream& in, std::ostream& out, const BridgeHandler& handler);

// HTTP server on POST /act, /simulate and /evaluate running on its own
// thread.
class HttpBridgeServer {
 public:
  explicit HttpBridgeServer(BridgeHandler handler);
  ~HttpBridgeServer();

  // Binds and starts serving; port 0 picks a free port. Returns the port.
  int Start(const std::string& host, int port);
  void Stop();
  // Blocks until Stop is called from another thread or the server fails.
  void Wait();

 private:
  BridgeHandler handler_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

struct ConformanceCheck {
  std::string request;
  std::string check;  // schema, legality or latency
  bool pass = true;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;
  bool pass = true;
};

// Fixed battery over both games: empty-context and last-turn act requests,
// an act request with history, an opponent simulation and a
// three-candidate evaluation.
ConformanceReport RunConformance(Transport& transport, const TemplateLibrary& templates,
                                 std::chrono::milliseconds latency_budget);

Json ToJson(const ConformanceReport& r);

}  // namespace repgame

#endif  // REPGAME_BRIDGE_H_
