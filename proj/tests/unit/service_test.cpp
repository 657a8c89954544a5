#include <gtest/gtest.h>

#include <atomic>
#include <future>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "forestfire/error.hpp"
#include "forestfire/ingest/event_log.hpp"
#include "forestfire/service/auth.hpp"
#include "forestfire/service/config.hpp"
#include "forestfire/service/server.hpp"
#include "support.hpp"

namespace ff = forestfire;
using ff::service::Role;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

const std::string kDev = "356938035643809";
const std::string kDev2 = "490154203237518";
const std::string kArea = "kassandra-north";
const ff::risk::Timestamp kT0 = ff::risk::parse_timestamp("2026-07-01T06:00:00Z");
constexpr std::uint32_t kFastIterations = 1000;

std::optional<std::string> no_env(const char*) { return std::nullopt; }

// A running service on a free port with one user per role; the token
// clock can be advanced.
struct Live {
  ff::test::TempDir dir{"service"};
  ff::test::Fleet fleet{{{kDev, kArea}, {kDev2, "sithonia-east"}}};
  std::shared_ptr<std::atomic<std::int64_t>> skew = std::make_shared<std::atomic<std::int64_t>>(0);
  std::unique_ptr<ff::service::Server> server;
  std::unique_ptr<httplib::Client> http;

  explicit Live(std::chrono::seconds token_ttl = 3600s) {
    fleet.registry().save(dir / "registry.json");
    ff::service::ServiceConfig c;
    c.port = 0;
    c.log_path = dir / "events.log";
    c.registry_path = dir / "registry.json";
    c.clock = ff::ingest::ClockMode::data;
    c.fsync = false;
    c.token_ttl = token_ttl;
    c.keepalive = 200ms;
    for (auto role : {Role::viewer, Role::operator_, Role::admin}) {
      const std::string name(to_string(role));
      c.users.push_back({name, role, ff::service::hash_password(name + "-pw", kFastIterations)});
    }
    server = std::make_unique<ff::service::Server>(
        c, [skew = skew] { return ff::service::SystemClock::now() + std::chrono::seconds(skew->load()); });
    const int port = server->start();
    http = std::make_unique<httplib::Client>("127.0.0.1", port);
    http->set_read_timeout(10, 0);
  }

  std::string login(const std::string& name) {
    const auto res = http->Post("/auth/login", json{{"username", name}, {"password", name + "-pw"}}.dump(),
                                "application/json");
    EXPECT_EQ(res->status, 200);
    return json::parse(res->body).at("token");
  }

  static httplib::Headers bearer(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

  httplib::Result post_package(const std::string& token, const ff::crypto::Bytes& envelope) {
    return http->Post("/packages", bearer(token), std::string(envelope.begin(), envelope.end()),
                      "application/octet-stream");
  }

  ff::crypto::Bytes envelope(int cycle, double co2 = 300, const std::string& device = kDev) {
    auto m = ff::test::sample(device, device == kDev ? kArea : "sithonia-east", kT0 + cycle * 300s);
    m.value(ff::risk::Variable::co2) = co2;
    return fleet.seal(m);
  }

  httplib::Result get(const std::string& path, const std::string& token) {
    return http->Get(path, bearer(token));
  }
  httplib::Result post(const std::string& path, const std::string& token, const json& body) {
    return http->Post(path, bearer(token), body.dump(), "application/json");
  }
};

std::string code_of(const httplib::Result& r) { return json::parse(r->body).at("code"); }

struct Frame {
  std::uint64_t id = 0;
  std::string event;
  json data;
};

// Reads SSE frames until `want` arrive or the stream ends.
std::vector<Frame> read_stream(int port, const std::string& path, httplib::Headers headers, std::size_t want) {
  httplib::Client c("127.0.0.1", port);
  c.set_read_timeout(10, 0);
  std::vector<Frame> frames;
  std::string buffer;
  const auto deadline = std::chrono::steady_clock::now() + 10s;
  c.Get(path, headers, [&](const char* data, std::size_t n) {
    buffer.append(data, n);
    for (auto end = buffer.find("\n\n"); end != std::string::npos; end = buffer.find("\n\n")) {
      const auto block = buffer.substr(0, end);
      buffer.erase(0, end + 2);
      Frame f;
      std::istringstream lines(block);
      for (std::string line; std::getline(lines, line);) {
        if (line.starts_with("id: ")) f.id = std::stoull(line.substr(4));
        if (line.starts_with("event: ")) f.event = line.substr(7);
        if (line.starts_with("data: ")) f.data = json::parse(line.substr(6));
      }
      if (!f.event.empty()) frames.push_back(std::move(f));
    }
    return frames.size() < want && std::chrono::steady_clock::now() < deadline;
  });
  return frames;
}

}  // namespace

TEST(Passwords, HashRoundTrip) {
  const auto h = ff::service::hash_password("s3cret", kFastIterations);
  EXPECT_TRUE(h.starts_with("pbkdf2-sha256$1000$"));
  EXPECT_TRUE(ff::service::verify_password("s3cret", h));
  EXPECT_FALSE(ff::service::verify_password("s3cret!", h));
  EXPECT_NE(h, ff::service::hash_password("s3cret", kFastIterations));  // fresh salt
  for (const char* bad : {"", "pbkdf2-sha256$x$00$00", "md5$1$00$00", "pbkdf2-sha256$1000$zz$00"}) {
    EXPECT_FALSE(ff::service::verify_password("s3cret", bad)) << bad;
  }
}

TEST(Roles, Hierarchy) {
  EXPECT_TRUE(ff::service::permits(Role::admin, Role::operator_));
  EXPECT_TRUE(ff::service::permits(Role::operator_, Role::viewer));
  EXPECT_FALSE(ff::service::permits(Role::viewer, Role::operator_));
  EXPECT_FALSE(ff::service::permits(Role::operator_, Role::admin));
  EXPECT_EQ(ff::service::parse_role("operator"), Role::operator_);
  EXPECT_FALSE(ff::service::parse_role("root"));
}

TEST(Tokens, StoredOnlyAsDigests) {
  ff::service::TokenStore store;
  const auto t = store.issue("alice", Role::operator_, 60s);
  EXPECT_EQ(t.token.size(), 64u);
  ASSERT_EQ(store.digests().size(), 1u);
  const auto digest = store.digests()[0];
  EXPECT_NE(ff::crypto::to_hex(digest), t.token);
  EXPECT_EQ(std::search(t.token.begin(), t.token.end(), digest.begin(), digest.end()), t.token.end());
  EXPECT_EQ(store.authenticate(t.token)->subject, "alice");
  EXPECT_FALSE(store.authenticate(t.token + "0"));
  store.revoke(t.token);
  EXPECT_FALSE(store.authenticate(t.token));
}

TEST(Tokens, ExpireOnTheirClock) {
  auto now = ff::service::SystemClock::now();
  ff::service::TokenStore store([&] { return now; });
  const auto t = store.issue("bob", Role::viewer, 10s);
  now += 9s;
  EXPECT_TRUE(store.authenticate(t.token));
  now += 1s;
  EXPECT_FALSE(store.authenticate(t.token));
  EXPECT_EQ(store.size(), 0u);
  EXPECT_THROW(store.issue("bob", Role::viewer, 0s), std::invalid_argument);
}

TEST(Config, FileThenEnvironment) {
  const auto c = ff::service::ServiceConfig::from_json(json{
      {"port", 9000},
      {"log_path", "a.log"},
      {"clock", "data"},
      {"users", {{{"username", "ops"}, {"role", "operator"}, {"password_hash", "pbkdf2-sha256$1$00$00"}}}}});
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.clock, ff::ingest::ClockMode::data);
  ASSERT_EQ(c.users.size(), 1u);

  auto env = c;
  const std::map<std::string, std::string> vars{{"FORESTFIRE_PORT", "0"},
                                                {"FORESTFIRE_LOG", "/tmp/x.log"},
                                                {"FORESTFIRE_FSYNC", "off"},
                                                {"FORESTFIRE_ADMIN_PASSWORD", "hunter2"}};
  ff::service::apply_env(env, [&](const char* name) -> std::optional<std::string> {
    const auto it = vars.find(name);
    return it == vars.end() ? std::nullopt : std::optional(it->second);
  });
  EXPECT_EQ(env.port, 0);
  EXPECT_EQ(env.log_path, "/tmp/x.log");
  EXPECT_FALSE(env.fsync);
  ASSERT_EQ(env.users.size(), 2u);
  EXPECT_EQ(env.users[1].role, Role::admin);
  EXPECT_TRUE(ff::service::verify_password("hunter2", env.users[1].password_hash));

  auto bad = c;
  EXPECT_THROW(ff::service::apply_env(bad, [](const char* n) -> std::optional<std::string> {
                 return std::string_view(n) == "FORESTFIRE_PORT" ? std::optional<std::string>("80x") : std::nullopt;
               }),
               ff::ConfigError);
  EXPECT_THROW(ff::service::ServiceConfig::from_json(json{{"clock", "sundial"}}), ff::ConfigError);
  EXPECT_THROW(ff::service::ServiceConfig::from_json(
                   json{{"users", {{{"username", "x"}, {"role", "root"}, {"password_hash", ""}}}}}),
               ff::ConfigError);
  auto untouched = c;
  ff::service::apply_env(untouched, no_env);
  EXPECT_EQ(untouched.port, 9000);
}

TEST(Config, MissingRegistryFailsStartup) {
  ff::test::TempDir dir("svc-missing");
  ff::service::ServiceConfig c;
  c.log_path = dir / "events.log";
  c.registry_path = dir / "nope.json";
  EXPECT_THROW(ff::service::Server s(c), ff::ConfigError);
}

TEST(Http, LoginAndAuthErrors) {
  Live live;
  EXPECT_EQ(live.http->Get("/health")->status, 200);
  auto r = live.http->Post("/auth/login", json{{"username", "viewer"}, {"password", "wrong"}}.dump(),
                           "application/json");
  EXPECT_EQ(r->status, 401);
  EXPECT_EQ(code_of(r), "unauthorized");
  r = live.http->Post("/auth/login", "{not json", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(live.http->Get("/areas")->status, 401);
  EXPECT_EQ(live.get("/areas", "deadbeef")->status, 401);
  EXPECT_EQ(live.get("/areas", live.login("viewer"))->status, 200);
}

TEST(Http, MutatingEndpointsRejectMissingAndExpiredTokens) {
  Live live(60s);
  const auto op = live.login("operator");
  const auto env = live.envelope(0);
  const std::string body(env.begin(), env.end());
  EXPECT_EQ(live.http->Post("/packages", body, "application/octet-stream")->status, 401);
  EXPECT_EQ(live.http->Post("/areas/" + kArea + "/declarations", R"({"level":"HFR","ttl_seconds":60})",
                            "application/json")
                ->status,
            401);
  EXPECT_EQ(live.http->Put("/devices/" + kDev + "/frequency", R"({"period_seconds":60})", "application/json")
                ->status,
            401);
  EXPECT_EQ(live.http->Post("/admin/tokens", R"({"role":"viewer"})", "application/json")->status, 401);
  *live.skew = 61;
  EXPECT_EQ(live.post_package(op, env)->status, 401);
  EXPECT_EQ(live.post("/areas/" + kArea + "/declarations", op, {{"level", "HFR"}, {"ttl_seconds", 60}})->status,
            401);
  EXPECT_EQ(live.server->core().stats().accepted, 0u);
}

TEST(Http, PackageIngestion) {
  Live live;
  const auto viewer = live.login("viewer");
  const auto op = live.login("operator");
  const auto env = live.envelope(0);

  auto r = live.post_package(viewer, env);
  EXPECT_EQ(r->status, 403);
  EXPECT_EQ(code_of(r), "forbidden");

  r = live.http->Post("/packages", Live::bearer(op), std::string(env.begin(), env.end()), "text/plain");
  EXPECT_EQ(r->status, 415);

  r = live.post_package(op, env);
  ASSERT_EQ(r->status, 200);
  auto j = json::parse(r->body);
  EXPECT_EQ(j["status"], "accepted");
  EXPECT_EQ(j["device_id"], kDev);
  EXPECT_EQ(j["assessment"]["level"], "NFR");
  EXPECT_TRUE(j["assessment"]["cold_start"].get<bool>());

  const auto seq = live.server->core().last_seq();
  r = live.post_package(op, env);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["status"], "duplicate");
  EXPECT_EQ(live.server->core().last_seq(), seq);

  auto tampered = live.envelope(1);
  tampered[tampered.size() - 1] ^= 0x01;
  r = live.post_package(op, tampered);
  EXPECT_EQ(r->status, 401);
  EXPECT_EQ(code_of(r), "bad_signature");

  r = live.post_package(op, {1, 2, 3});
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(code_of(r), "malformed_envelope");

  ff::test::Fleet stranger({{"352099001761481", kArea}});
  const auto foreign = stranger.seal(ff::test::sample("352099001761481", kArea, kT0));
  r = live.post_package(op, foreign);
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(code_of(r), "unknown_device");
}

TEST(Http, QueriesAreaAndMeasurements) {
  Live live;
  const auto op = live.login("operator");
  const auto viewer = live.login("viewer");
  for (int i = 0; i < 5; ++i) ASSERT_EQ(live.post_package(op, live.envelope(i))->status, 200);

  auto r = live.get("/areas", viewer);
  auto areas = json::parse(r->body)["areas"];
  ASSERT_EQ(areas.size(), 2u);
  EXPECT_EQ(areas[0]["area_id"], kArea);
  EXPECT_EQ(areas[0]["measurement_count"], 5);
  EXPECT_EQ(areas[1]["measurement_count"], 0);

  r = live.get("/areas/" + kArea, viewer);
  ASSERT_EQ(r->status, 200);
  auto a = json::parse(r->body);
  EXPECT_EQ(a["level"], "NFR");
  EXPECT_EQ(a["window"], "all");
  EXPECT_EQ(a["history"].size(), 5u);
  EXPECT_EQ(a["last_assessment"]["samples_averaged"], 4);

  r = live.get("/areas/" + kArea + "/measurements", viewer);
  auto ms = json::parse(r->body)["measurements"];
  ASSERT_EQ(ms.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(ms[i]["timestamp"], ff::risk::format_timestamp(kT0 + i * 300s));
  }
  r = live.get("/areas/" + kArea + "/measurements?from=2026-07-01T06:05:00Z&to=2026-07-01T06:15:00Z&offset=1&limit=1",
               viewer);
  ms = json::parse(r->body)["measurements"];
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0]["timestamp"], "2026-07-01T06:10:00Z");

  EXPECT_TRUE(json::parse(live.get("/areas/sithonia-east/measurements", viewer)->body)["measurements"].empty());
  EXPECT_EQ(live.get("/areas/atlantis", viewer)->status, 404);
  EXPECT_EQ(live.get("/areas/atlantis/measurements", viewer)->status, 404);
  EXPECT_EQ(live.get("/areas/" + kArea + "/measurements?from=yesterday", viewer)->status, 400);
  EXPECT_EQ(live.get("/areas/" + kArea + "/measurements?limit=-1", viewer)->status, 400);
}

TEST(Http, AlertsFollowLevels) {
  Live live;
  const auto op = live.login("operator");
  for (int i = 0; i < 3; ++i) live.post_package(op, live.envelope(i));
  auto r = live.post_package(op, live.envelope(3, 2500));
  auto j = json::parse(r->body);
  EXPECT_EQ(j["assessment"]["level"], "EFR");
  ASSERT_EQ(j["alerts"].size(), 1u);

  r = live.get("/alerts?state=active", op);
  auto alerts = json::parse(r->body)["alerts"];
  ASSERT_EQ(alerts.size(), 1u);
  EXPECT_EQ(alerts[0]["level"], "EFR");
  EXPECT_EQ(alerts[0]["area_id"], kArea);
  EXPECT_TRUE(json::parse(live.get("/alerts?area=sithonia-east", op)->body)["alerts"].empty());
  EXPECT_EQ(live.get("/alerts?state=burning", op)->status, 400);
}

TEST(Http, Declarations) {
  Live live;
  const auto viewer = live.login("viewer");
  const auto op = live.login("operator");
  live.post_package(op, live.envelope(0));
  const json hfr{{"level", "HFR"}, {"ttl_seconds", 7200}};

  auto r = live.post("/areas/" + kArea + "/declarations", viewer, hfr);
  EXPECT_EQ(r->status, 403);
  r = live.post("/areas/" + kArea + "/declarations", op, hfr);
  ASSERT_EQ(r->status, 201);
  EXPECT_EQ(json::parse(r->body)["expiry"], "2026-07-01T08:00:00Z");  // data clock
  EXPECT_EQ(json::parse(live.get("/areas/" + kArea, viewer)->body)["window"], "5");

  EXPECT_EQ(live.post("/areas/atlantis/declarations", op, hfr)->status, 404);
  EXPECT_EQ(live.post("/areas/" + kArea + "/declarations", op, {{"level", "NFR"}, {"ttl_seconds", 60}})->status, 400);
  EXPECT_EQ(live.post("/areas/" + kArea + "/declarations", op, {{"level", "XFR"}, {"ttl_seconds", 60}})->status, 400);
  EXPECT_EQ(live.post("/areas/" + kArea + "/declarations", op, {{"level", "HFR"}})->status, 400);
  EXPECT_EQ(live.post("/areas/" + kArea + "/declarations", op, {{"level", "HFR"}, {"ttl_seconds", 0}})->status, 400);

  r = live.post_package(op, live.envelope(1));
  EXPECT_EQ(json::parse(r->body)["assessment"]["window"], "5");
}

TEST(Http, FrequencyCommandsArePulledOnContact) {
  Live live;
  const auto op = live.login("operator");
  const auto viewer = live.login("viewer");
  const auto path = "/devices/" + kDev + "/frequency";

  EXPECT_EQ(json::parse(live.get(path, viewer)->body)["state"], "default");
  EXPECT_EQ(live.http->Put(path, Live::bearer(viewer), R"({"period_seconds":60})", "application/json")->status, 403);
  auto r = live.http->Put(path, Live::bearer(op), R"({"period_seconds":5})", "application/json");
  EXPECT_EQ(r->status, 400);
  r = live.http->Put("/devices/352099001761481/frequency", Live::bearer(op), R"({"period_seconds":60})",
                     "application/json");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(live.get("/devices/352099001761481/frequency", viewer)->status, 404);

  r = live.http->Put(path, Live::bearer(op), R"({"period_seconds":60})", "application/json");
  ASSERT_EQ(r->status, 202);
  EXPECT_EQ(json::parse(live.get(path, viewer)->body)["state"], "pending");

  r = live.post_package(op, live.envelope(0, 300, kDev2));
  EXPECT_FALSE(json::parse(r->body).contains("period_seconds"));
  r = live.post_package(op, live.envelope(0));
  EXPECT_EQ(json::parse(r->body)["period_seconds"], 60);
  const auto after = json::parse(live.get(path, viewer)->body);
  EXPECT_EQ(after["state"], "acknowledged");
  EXPECT_EQ(after["period_seconds"], 60);
  r = live.post_package(op, live.envelope(1));
  EXPECT_FALSE(json::parse(r->body).contains("period_seconds"));
}

TEST(Http, AdminEndpoints) {
  Live live;
  const auto op = live.login("operator");
  const auto admin = live.login("admin");
  EXPECT_EQ(live.post("/admin/tokens", op, {{"role", "operator"}})->status, 403);
  auto r = live.post("/admin/tokens", admin, {{"role", "operator"}, {"ttl_seconds", 600}, {"subject", "gateway-1"}});
  ASSERT_EQ(r->status, 201);
  const std::string issued = json::parse(r->body)["token"];
  EXPECT_EQ(live.post_package(issued, live.envelope(0))->status, 200);
  EXPECT_EQ(live.post("/admin/tokens", admin, {{"role", "root"}})->status, 400);

  // Provision a third device and hot-reload the registry.
  ff::test::Fleet bigger({{kDev, kArea}, {kDev2, "sithonia-east"}, {"352099001761481", "athos"}});
  bigger.registry().save(live.dir / "registry.json", true);
  EXPECT_EQ(live.post("/admin/registry/reload", op, json::object())->status, 403);
  r = live.post("/admin/registry/reload", admin, json::object());
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["devices"], 3);
  const auto m = ff::test::sample("352099001761481", "athos", kT0 + 600s);
  EXPECT_EQ(live.post_package(op, bigger.seal(m))->status, 200);
}

TEST(Events, TwoSubscribersSeeTheSameSequence) {
  Live live;
  const auto viewer = live.login("viewer");
  const auto op = live.login("operator");
  const int port = live.server->port();
  auto a = std::async(std::launch::async, [&] { return read_stream(port, "/events?since=0", Live::bearer(viewer), 5); });
  auto b = std::async(std::launch::async,
                      [&] { return read_stream(port, "/events?since=0&token=" + viewer, {}, 5); });
  for (int i = 0; i < 3; ++i) live.post_package(op, live.envelope(i));
  live.post_package(op, live.envelope(3, 2500));
  const auto fa = a.get();
  const auto fb = b.get();
  ASSERT_EQ(fa.size(), 5u);
  ASSERT_EQ(fb.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(fa[i].id, fb[i].id);
    EXPECT_EQ(fa[i].event, fb[i].event);
    EXPECT_EQ(fa[i].data, fb[i].data);
    if (i > 0) EXPECT_GT(fa[i].id, fa[i - 1].id);
  }
  std::vector<std::string> kinds;
  for (const auto& f : fa) kinds.push_back(f.event);
  EXPECT_EQ(std::count(kinds.begin(), kinds.end(), "assessment"), 4);
  EXPECT_EQ(std::count(kinds.begin(), kinds.end(), "alert"), 1);
  EXPECT_EQ(fa.back().data["level"], "EFR");
}

TEST(Events, ResumeAfterLastEventId) {
  Live live;
  const auto viewer = live.login("viewer");
  const auto op = live.login("operator");
  for (int i = 0; i < 8; ++i) live.post_package(op, live.envelope(i));
  const int port = live.server->port();
  const auto all = read_stream(port, "/events?since=0", Live::bearer(viewer), 8);
  ASSERT_EQ(all.size(), 8u);
  auto headers = Live::bearer(viewer);
  headers.emplace("Last-Event-ID", std::to_string(all[3].id));
  const auto rest = read_stream(port, "/events", headers, 4);
  ASSERT_EQ(rest.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(rest[i].id, all[4 + i].id);
}

TEST(Events, AuthFailureAndExpiryCloseTheStream) {
  Live live(30s);
  const int port = live.server->port();
  httplib::Client c("127.0.0.1", port);
  EXPECT_EQ(c.Get("/events")->status, 401);
  EXPECT_EQ(c.Get("/events?token=nope")->status, 401);

  const auto viewer = live.login("viewer");
  auto f = std::async(std::launch::async, [&] { return read_stream(port, "/events", Live::bearer(viewer), 100); });
  std::this_thread::sleep_for(300ms);
  *live.skew = 31;
  ASSERT_EQ(f.wait_for(5s), std::future_status::ready);
  const auto frames = f.get();
  ASSERT_FALSE(frames.empty());
  EXPECT_EQ(frames.back().event, "error");
  EXPECT_EQ(frames.back().data["code"], "unauthorized");
}

TEST(Events, StopEndsOpenStreams) {
  Live live;
  const auto viewer = live.login("viewer");
  const int port = live.server->port();
  auto f = std::async(std::launch::async, [&] { return read_stream(port, "/events", Live::bearer(viewer), 100); });
  std::this_thread::sleep_for(300ms);
  live.server->stop();
  EXPECT_EQ(f.wait_for(5s), std::future_status::ready);
}
