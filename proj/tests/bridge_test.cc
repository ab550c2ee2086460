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

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "repgame/errors.h"
#include "repgame/match.h"
#include "repgame/persona.h"

namespace repgame {
namespace {

using std::chrono::milliseconds;

EpisodeState Play(const GameSpec& spec, const std::vector<Action>& actions) {
  EpisodeState s;
  for (const Action& a : actions) s = ApplyAction(s, spec, a);
  return s;
}

std::shared_ptr<const TemplateLibrary> Shipped() {
  return std::make_shared<const TemplateLibrary>(
      TemplateLibrary::Load(std::filesystem::path(REPGAME_SOURCE_DIR) / "assets/prompts"));
}

std::set<std::string> Keys(const Json& j) {
  std::set<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
  return out;
}

std::shared_ptr<SubprocessTransport> Fake(const std::string& mode, const std::string& arg = "") {
  std::vector<std::string> argv{FAKE_BRIDGE_SERVER, mode};
  if (!arg.empty()) argv.push_back(arg);
  return std::make_shared<SubprocessTransport>(argv);
}

std::filesystem::path TempPath(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() /
                 ("repgame_bridge_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove(p);
  return p;
}

TEST(BridgeWireTest, RequestHasExactlyTheProtocolKeys) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s = Play(spec, {Action::Offer(55, 0)});
  const BridgeRequest r =
      MakeRequest(RequestKind::kAct, PointFor(spec, context, s), *Shipped(), {"act", "", 20},
                  {}, "n-1");
  const Json j = ToJson(r);
  EXPECT_EQ(Keys(j), (std::set<std::string>{"kind", "role", "template_id", "private_info",
                                            "context", "trajectory", "candidates", "nonce"}));
  EXPECT_EQ(j["kind"], "act");
  EXPECT_EQ(j["role"], "buyer");
  EXPECT_EQ(j["trajectory"].size(), 1u);
  EXPECT_EQ(BridgeRequestFromJson(j), r);
}

TEST(BridgeWireTest, RequestRejectsUnknownAndMissingKeys) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  Json j = ToJson(MakeRequest(RequestKind::kAct, PointFor(spec, context, s), *Shipped(),
                              {"act", "", 20}, {}, "n"));
  Json extra = j;
  extra["temperature"] = 1;
  EXPECT_THROW(BridgeRequestFromJson(extra), ConfigError);
  Json missing = j;
  missing.erase("role");
  EXPECT_THROW(BridgeRequestFromJson(missing), ConfigError);
}

TEST(BridgeWireTest, RequestKindsAndEndpoints) {
  EXPECT_EQ(EndpointFor(RequestKind::kAct), "/act");
  EXPECT_EQ(EndpointFor(RequestKind::kSimulateOpponent), "/simulate");
  EXPECT_EQ(EndpointFor(RequestKind::kEvaluateCandidates), "/evaluate");
  for (RequestKind k : {RequestKind::kAct, RequestKind::kSimulateOpponent,
                        RequestKind::kEvaluateCandidates}) {
    EXPECT_EQ(ParseRequestKind(RequestKindName(k)), k);
  }
}

TEST(BridgeWireTest, RoleNamesFollowTheGame) {
  const GameSpec bs = GameSpec::BuyerSeller();
  const GameSpec ex = GameSpec::ResourceExchange();
  EXPECT_EQ(RoleName(bs, Agent::kOne), "seller");
  EXPECT_EQ(RoleName(bs, Agent::kTwo), "buyer");
  EXPECT_EQ(RoleName(ex, Agent::kOne), "agent1");
  EXPECT_EQ(ParseRole(ex, "agent2"), Agent::kTwo);
  EXPECT_THROW(ParseRole(bs, "agent1"), Error);
}

TEST(BridgeWireTest, ParseResponseSchema) {
  const BridgeResponse r = ParseResponse(
      R"({"proposal":{"kind":"offer","price":50},"message":"neutral","thoughts":"t"})",
      RequestKind::kAct);
  EXPECT_EQ((*r.proposal)["price"], 50);
  EXPECT_EQ(r.message, "neutral");
  EXPECT_EQ(r.thoughts, "t");
  EXPECT_FALSE(r.chosen_index);

  EXPECT_THROW(ParseResponse("not json", RequestKind::kAct), ResponseError);
  EXPECT_THROW(ParseResponse("[1]", RequestKind::kAct), ResponseError);
  EXPECT_THROW(ParseResponse(R"({"error":"backend down"})", RequestKind::kAct), ResponseError);
  EXPECT_THROW(ParseResponse(R"({"proposal":{"kind":"wait"},"mood":1})", RequestKind::kAct),
               ResponseError);
  EXPECT_THROW(ParseResponse(R"({"thoughts":"x"})", RequestKind::kAct), ResponseError);
  EXPECT_THROW(ParseResponse(R"({"proposal":{"kind":"wait"}})",
                             RequestKind::kEvaluateCandidates),
               ResponseError);
  EXPECT_THROW(ParseResponse(R"({"chosen_index":"2"})", RequestKind::kEvaluateCandidates),
               ResponseError);
  EXPECT_EQ(*ParseResponse(R"({"chosen_index":2})", RequestKind::kEvaluateCandidates)
                 .chosen_index,
            2);
}

TEST(BridgeWireTest, ResponseRoundTrip) {
  BridgeResponse r;
  r.proposal = Json{{"kind", "accept"}};
  r.message = "happy";
  r.thoughts = "ok";
  const BridgeResponse back = ParseResponse(Dump(ToJson(r)), RequestKind::kAct);
  EXPECT_EQ(back.proposal, r.proposal);
  EXPECT_EQ(back.message, r.message);
  EXPECT_EQ(back.thoughts, r.thoughts);
}

TEST(BridgeWireTest, ResponseToActionChecksLegality) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState opened = Play(spec, {Action::Offer(55, 0)});
  const DecisionPoint point = PointFor(spec, context, opened);
  auto act = [&](const std::string& text) {
    return ResponseToAction(ParseResponse(text, RequestKind::kAct), point);
  };
  EXPECT_EQ(act(R"({"proposal":{"kind":"accept"},"message":"praise"})"), Action::Accept(5));
  EXPECT_EQ(act(R"({"proposal":{"kind":"offer","price":60},"message":"neutral"})"),
            Action::Offer(60, 0));
  EXPECT_EQ(act(R"({"proposal":{"kind":"wait"}})"), Action::Wait());
  EXPECT_THROW(act(R"({"proposal":{"kind":"offer","price":60}})"), ResponseError);
  EXPECT_THROW(act(R"({"proposal":{"kind":"offer","price":60.5},"message":"neutral"})"),
               ResponseError);
  EXPECT_THROW(act(R"({"proposal":{"kind":"offer","price":1000},"message":"neutral"})"),
               ResponseError);
  EXPECT_THROW(act(R"({"proposal":{"kind":"bribe"}})"), ResponseError);
  EXPECT_THROW(act(R"({"proposal":{"kind":"wait","message":"happy"}})"), ResponseError);
  EXPECT_THROW(act(R"({"proposal":{"kind":"wait"},"message":"not-a-token"})"), ResponseError);

  // Nothing to accept before the first offer.
  const EpisodeState empty;
  const DecisionPoint first = PointFor(spec, context, empty);
  EXPECT_THROW(
      ResponseToAction(
          ParseResponse(R"({"proposal":{"kind":"accept"},"message":"neutral"})",
                        RequestKind::kAct),
          first),
      ResponseError);
}

TEST(BridgeWireTest, ChosenIndexIsOneBased) {
  BridgeResponse r;
  r.chosen_index = 1;
  EXPECT_EQ(ResponseToIndex(r, 3), 0);
  r.chosen_index = 3;
  EXPECT_EQ(ResponseToIndex(r, 3), 2);
  r.chosen_index = 0;
  EXPECT_THROW(ResponseToIndex(r, 3), ResponseError);
  r.chosen_index = 4;
  EXPECT_THROW(ResponseToIndex(r, 3), ResponseError);
  r.chosen_index.reset();
  EXPECT_THROW(ResponseToIndex(r, 3), ResponseError);
}

TEST(TemplateTest, RenderFillsPlaceholders) {
  EXPECT_EQ(RenderTemplate("a {{x}} b {{y}}{{x}}", {{"x", "1"}, {"y", "2"}}), "a 1 b 21");
  EXPECT_EQ(RenderTemplate("no placeholders", {}), "no placeholders");
  EXPECT_THROW(RenderTemplate("{{missing}}", {{"x", "1"}}), ConfigError);
}

TEST(TemplateTest, LibraryLookup) {
  TemplateLibrary lib;
  lib.Add("greet", "hello {{name}}");
  EXPECT_TRUE(lib.Has("greet"));
  EXPECT_FALSE(lib.Has("other"));
  EXPECT_EQ(lib.Render("greet", {{"name", "seller"}}), "hello seller");
  EXPECT_THROW(lib.Render("other", {}), ConfigError);
  EXPECT_THROW(TemplateLibrary::Load("/nonexistent/prompts"), ConfigError);
}

TEST(TemplateTest, ShippedTemplatesRenderForEveryKind) {
  const auto lib = Shipped();
  for (const char* id : {"act", "oppo", "eval", "brainstorm", "self_simulation",
                         "episode_reminder"}) {
    EXPECT_TRUE(lib->Has(id)) << id;
  }
  for (GameSpec spec : {GameSpec::BuyerSeller(), GameSpec::ResourceExchange()}) {
    const Context context;
    const EpisodeState s;
    const DecisionPoint point = PointFor(spec, context, s);
    const std::vector<Action> candidates{Action::Wait(), Action::Reject(0)};
    for (const std::string& id : lib->ids()) {
      if (id.rfind("persona_", 0) == 0) continue;
      const auto vars = PromptVariables(RequestKind::kEvaluateCandidates, point, 20, candidates);
      EXPECT_NO_THROW(lib->Render(id, vars)) << id;
    }
  }
}

TEST(MakeRequestTest, StableUpToTheNonce) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s = Play(spec, {Action::Offer(55, 0), Action::Offer(50, 1)});
  const DecisionPoint point = PointFor(spec, context, s, 3);
  const PromptSelection prompt{"act", "persona_fairness", 20};
  BridgeRequest a = MakeRequest(RequestKind::kAct, point, *Shipped(), prompt, {}, "x");
  BridgeRequest b = MakeRequest(RequestKind::kAct, point, *Shipped(), prompt, {}, "y");
  EXPECT_NE(a, b);
  b.nonce = a.nonce;
  EXPECT_EQ(Dump(ToJson(a)), Dump(ToJson(b)));
  EXPECT_NE(a.private_info.find(Shipped()->Get("persona_fairness").substr(0, 20)),
            std::string::npos);
  EXPECT_EQ(a.role, "seller");
}

TEST(MakeRequestTest, EvaluateCarriesCandidates) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  const std::vector<Action> candidates{Action::Offer(60, 0), Action::Offer(55, 0)};
  const BridgeRequest r = MakeRequest(RequestKind::kEvaluateCandidates,
                                      PointFor(spec, context, s), *Shipped(),
                                      {"eval", "", 20}, candidates, "n");
  ASSERT_EQ(r.candidates.size(), 2u);
  EXPECT_EQ(ActionFromJson(spec, r.candidates[1]), candidates[1]);
}

TEST(BridgePolicyTest, ValidatesOptions) {
  auto t = Fake("offer", "50");
  BridgeOptions bad;
  bad.retries = -1;
  EXPECT_THROW(BridgePolicy(t, Shipped(), bad), ConfigError);
  bad = {};
  bad.timeout = milliseconds(0);
  EXPECT_THROW(BridgePolicy(t, Shipped(), bad), ConfigError);
  bad = {};
  bad.kind = RequestKind::kEvaluateCandidates;
  EXPECT_THROW(BridgePolicy(t, Shipped(), bad), ConfigError);
  EXPECT_THROW(BridgePolicy(nullptr, Shipped(), {}), InvalidArgument);
}

TEST(BridgePolicyTest, PlaysTheBackendsOffer) {
  BridgePolicy policy(Fake("offer", "57"), Shipped(), {});
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  Rng rng = MakeRng({1});
  EXPECT_EQ(policy.Act(PointFor(spec, context, s), rng), Action::Offer(57, 0));
  EXPECT_TRUE(policy.TakeIncidents().empty());
  const Json sent = Json::parse(policy.last_request_body());
  EXPECT_EQ(sent["nonce"], "bridge-1");
  EXPECT_EQ(sent["kind"], "act");
}

TEST(BridgePolicyTest, RetriesRejectedReplies) {
  BridgeOptions options;
  options.retries = 2;
  BridgePolicy policy(Fake("flaky", "2"), Shipped(), options);
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  Rng rng = MakeRng({1});
  EXPECT_EQ(policy.Act(PointFor(spec, context, s, 4), rng), Action::Offer(50, 0));
  const auto incidents = policy.TakeIncidents();
  ASSERT_EQ(incidents.size(), 2u);
  EXPECT_EQ(incidents[0].episode, 4);
  EXPECT_EQ(incidents[0].provider, "bridge");
  EXPECT_TRUE(policy.TakeIncidents().empty());
}

TEST(BridgePolicyTest, ExhaustedAttemptsPlayWait) {
  BridgeOptions options;
  options.retries = 1;
  BridgePolicy policy(Fake("garbage"), Shipped(), options);
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  Rng rng = MakeRng({1});
  EXPECT_EQ(policy.Act(PointFor(spec, context, s), rng), Action::Wait());
  EXPECT_EQ(policy.TakeIncidents().size(), 3u);  // two rejections and the substitution
}

TEST(BridgePolicyTest, EvaluateUsesOneBasedChoice) {
  BridgePolicy policy(Fake("offer", "50"), Shipped(), {});
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  const std::vector<Action> c{Action::Offer(60, 0), Action::Offer(55, 0), Action::Offer(50, 0)};
  EXPECT_EQ(policy.Evaluate(PointFor(spec, context, s), c), 1);
  EXPECT_EQ(Json::parse(policy.last_request_body())["template_id"], "eval");
  EXPECT_THROW(policy.Evaluate(PointFor(spec, context, s), {}), InvalidArgument);
}

TEST(BridgePolicyTest, EvaluateFallsBackToTheFirstCandidate) {
  BridgeOptions options;
  options.retries = 0;
  BridgePolicy policy(Fake("no_index"), Shipped(), options);
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  EXPECT_EQ(policy.Evaluate(PointFor(spec, context, s), {Action::Wait(), Action::Reject(0)}),
            0);
  EXPECT_EQ(policy.TakeIncidents().size(), 2u);
}

TEST(SubprocessTransportTest, TimeoutRestartsTheChild) {
  const auto marker = TempPath("slow");
  SubprocessTransport t({FAKE_BRIDGE_SERVER, "slow_once", marker.string()});
  EXPECT_THROW(t.Exchange("/act", "{}", milliseconds(300)), TransportTimeout);
  // The restarted child answers promptly and the late reply is gone.
  const std::string reply = t.Exchange("/act", "{}", milliseconds(2000));
  EXPECT_EQ(Json::parse(reply)["proposal"]["price"], 50);
  std::filesystem::remove(marker);
}

TEST(SubprocessTransportTest, TimeoutIsAnIncidentForThePolicy) {
  const auto marker = TempPath("slow_policy");
  BridgeOptions options;
  options.timeout = milliseconds(300);
  options.retries = 1;
  BridgePolicy policy(std::make_shared<SubprocessTransport>(std::vector<std::string>{
                          FAKE_BRIDGE_SERVER, "slow_once", marker.string()}),
                      Shipped(), options);
  const GameSpec spec = GameSpec::BuyerSeller();
  const Context context;
  const EpisodeState s;
  Rng rng = MakeRng({1});
  EXPECT_EQ(policy.Act(PointFor(spec, context, s), rng), Action::Offer(50, 0));
  EXPECT_EQ(policy.TakeIncidents().size(), 1u);
  std::filesystem::remove(marker);
}

TEST(SubprocessTransportTest, ExitedChildIsABridgeError) {
  SubprocessTransport t({FAKE_BRIDGE_SERVER, "exit"});
  EXPECT_THROW(t.Exchange("/act", "{}", milliseconds(2000)), BridgeError);
}

TEST(SubprocessTransportTest, MissingProgramIsABridgeError) {
  EXPECT_THROW(
      {
        SubprocessTransport t({"/nonexistent/backend"});
        t.Exchange("/act", "{}", milliseconds(2000));
      },
      BridgeError);
}

TEST(SubprocessTransportTest, SendsOneLinePerRequest) {
  const auto log = TempPath("record");
  {
    BridgePolicy policy(std::make_shared<SubprocessTransport>(std::vector<std::string>{
                            FAKE_BRIDGE_SERVER, "record", log.string()}),
                        Shipped(), {});
    const GameSpec spec = GameSpec::BuyerSeller();
    const Context context;
    const EpisodeState s;
    Rng rng = MakeRng({1});
    policy.Act(PointFor(spec, context, s), rng);
    policy.Act(PointFor(spec, context, s), rng);
  }
  std::ifstream in(log);
  std::vector<Json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(Json::parse(line));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0]["nonce"], "bridge-1");
  EXPECT_EQ(lines[1]["nonce"], "bridge-2");
  lines[0].erase("nonce");
  lines[1].erase("nonce");
  EXPECT_EQ(lines[0], lines[1]);
  std::filesystem::remove(log);
}

TEST(PersonaHandlerTest, AnswersActAndErrors) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const BridgeHandler handler =
      PersonaHandler(spec, PersonaParams::Defaults(PersonaFamily::kRational));
  const Context context;
  const EpisodeState s;
  const Json request = ToJson(MakeRequest(RequestKind::kAct, PointFor(spec, context, s),
                                          *Shipped(), {"act", "", 20}, {}, "a"));
  const Json reply = handler(request);
  const BridgeResponse r = ParseResponse(Dump(reply), RequestKind::kAct);
  EXPECT_NO_THROW(ResponseToAction(r, PointFor(spec, context, s)));

  Json wrong_turn = request;
  wrong_turn["role"] = "buyer";
  EXPECT_TRUE(handler(wrong_turn).contains("error"));
  EXPECT_TRUE(handler(Json{{"kind", "act"}}).contains("error"));
}

TEST(PersonaHandlerTest, IgnoresTheNonce) {
  const GameSpec spec = GameSpec::BuyerSeller();
  PersonaParams params = PersonaParams::Defaults(PersonaFamily::kBrainstormMix);
  const BridgeHandler handler = PersonaHandler(spec, params);
  const Context context;
  const EpisodeState s = Play(spec, {Action::Offer(70, 0)});
  for (int k = 0; k < 5; ++k) {
    const Json a = ToJson(MakeRequest(RequestKind::kAct, PointFor(spec, context, s), *Shipped(),
                                      {"act", "", 20}, {}, "a" + std::to_string(k)));
    Json b = a;
    b["nonce"] = "other";
    EXPECT_EQ(handler(a), handler(b));
  }
}

TEST(PersonaHandlerTest, ServesTheOtherGameByRoleNames) {
  const BridgeHandler handler =
      PersonaHandler(GameSpec::BuyerSeller(), PersonaParams::Defaults(PersonaFamily::kRational));
  const GameSpec ex = GameSpec::ResourceExchange();
  const Context context;
  const EpisodeState s;
  const Json reply = handler(ToJson(MakeRequest(RequestKind::kAct, PointFor(ex, context, s),
                                                *Shipped(), {"act", "", 20}, {}, "n")));
  ASSERT_FALSE(reply.contains("error")) << reply.dump();
  EXPECT_NO_THROW(ResponseToAction(ParseResponse(Dump(reply), RequestKind::kAct),
                                   PointFor(ex, context, s)));
}

TEST(PersonaHandlerTest, EvaluatePicksThePersonasOwnMove) {
  const GameSpec spec = GameSpec::BuyerSeller();
  PersonaParams params = PersonaParams::Defaults(PersonaFamily::kRational);
  params.temperature = 0.0;
  const BridgeHandler handler = PersonaHandler(spec, params);
  const Context context;
  const EpisodeState s;
  const DecisionPoint point = PointFor(spec, context, s);
  Rng rng = MakeRng({3});
  const Action own = PersonaAct(params, point, rng);
  const std::vector<Action> candidates{Action::Wait(), own};
  const Json reply = handler(ToJson(MakeRequest(RequestKind::kEvaluateCandidates, point,
                                                *Shipped(), {"eval", "", 20}, candidates,
                                                "n")));
  EXPECT_EQ(reply["chosen_index"], 2);
}

TEST(ServeStdioTest, OneReplyPerLine) {
  const GameSpec spec = GameSpec::BuyerSeller();
  const BridgeHandler handler =
      PersonaHandler(spec, PersonaParams::Defaults(PersonaFamily::kFairness));
  const Context context;
  const EpisodeState s;
  const std::string request = Dump(ToJson(MakeRequest(
      RequestKind::kAct, PointFor(spec, context, s), *Shipped(), {"act", "", 20}, {}, "n")));
  std::istringstream in(request + "\n\n{broken\n" + request + "\n");
  std::ostringstream out;
  ServeStdio(in, out, handler);
  std::istringstream lines(out.str());
  std::vector<Json> replies;
  for (std::string line; std::getline(lines, line);) replies.push_back(Json::parse(line));
  ASSERT_EQ(replies.size(), 3u);
  EXPECT_TRUE(replies[0].contains("proposal"));
  EXPECT_TRUE(replies[1].contains("error"));
  EXPECT_EQ(replies[0], replies[2]);
}

TEST(HttpBridgeTest, PolicyOverHttp) {
  const GameSpec spec = GameSpec::BuyerSeller();
  HttpBridgeServer server(PersonaHandler(spec, PersonaParams::Defaults(PersonaFamily::kRational)));
  const int port = server.Start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  BridgePolicy policy(std::make_shared<HttpTransport>("127.0.0.1", port), Shipped(), {});
  const Context context;
  const EpisodeState s;
  Rng rng = MakeRng({1});
  const Action a = policy.Act(PointFor(spec, context, s), rng);
  EXPECT_TRUE(ValidateAction(s, spec, a));
  EXPECT_TRUE(policy.TakeIncidents().empty());
  server.Stop();
}

TEST(HttpBridgeTest, UnreachableServerIsABridgeError) {
  int port = 0;
  {
    HttpBridgeServer probe([](const Json&) { return Json::object(); });
    port = probe.Start("127.0.0.1", 0);
  }
  HttpTransport t("127.0.0.1", port);
  EXPECT_THROW(t.Exchange("/act", "{}", milliseconds(1000)), BridgeError);
}

TEST(ConformanceTest, PersonaServerOverHttpPasses) {
  HttpBridgeServer server(PersonaHandler(GameSpec::BuyerSeller(),
                                         PersonaParams::Defaults(PersonaFamily::kTitForTat)));
  const int port = server.Start("127.0.0.1", 0);
  HttpTransport t("127.0.0.1", port);
  const ConformanceReport report = RunConformance(t, *Shipped(), milliseconds(2000));
  EXPECT_TRUE(report.pass) << Dump(ToJson(report));
  std::set<std::string> kinds;
  for (const auto& c : report.checks) kinds.insert(c.check);
  EXPECT_EQ(kinds, (std::set<std::string>{"schema", "legality", "latency"}));
  server.Stop();
}

TEST(ConformanceTest, CliServerOverStdioPasses) {
  SubprocessTransport t({REPGAME_CLI, "serve-bridge", "--config",
                         std::string(REPGAME_SOURCE_DIR) + "/configs/serve_bridge.json"});
  const ConformanceReport report = RunConformance(t, *Shipped(), milliseconds(2000));
  EXPECT_TRUE(report.pass) << Dump(ToJson(report));
}

TEST(ConformanceTest, BrokenBackendFails) {
  SubprocessTransport t({FAKE_BRIDGE_SERVER, "garbage"});
  const ConformanceReport report = RunConformance(t, *Shipped(), milliseconds(2000));
  EXPECT_FALSE(report.pass);
  const Json j = ToJson(report);
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(BridgeMatchTest, BridgedPersonaReplaysTheDirectMatch) {
  const GameSpec spec = GameSpec::BuyerSeller();
  PersonaParams seller = PersonaParams::Defaults(PersonaFamily::kRational);
  seller.temperature = 0.0;
  PersonaParams buyer = PersonaParams::Defaults(PersonaFamily::kTitForTat);
  buyer.temperature = 0.0;
  Persona direct_seller(seller);
  Persona buyer_a(buyer);
  Persona buyer_b(buyer);

  const auto config = TempPath("serve_rational.json");
  std::ofstream(config) << R"({"bridge": {"serve_mode": "stdio",
      "serve_persona": {"family": "rational", "temperature": 0.0}}})";
  BridgeOptions options;
  options.retries = 0;
  BridgePolicy bridged(std::make_shared<SubprocessTransport>(std::vector<std::string>{
                           REPGAME_CLI, "serve-bridge", "--config", config.string()}),
                       Shipped(), options);

  const MatchLog direct = RunMatch(spec, direct_seller, buyer_a, 6, 11);
  const MatchLog remote = RunMatch(spec, bridged, buyer_b, 6, 11);
  EXPECT_EQ(direct.context, remote.context);
  EXPECT_TRUE(bridged.TakeIncidents().empty());
  std::filesystem::remove(config);
}

}  // namespace
}  // namespace repgame
