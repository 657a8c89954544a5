#include "forestfire/service/server.hpp"

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "forestfire/crypto/registry.hpp"
#include "forestfire/error.hpp"
#include "forestfire/ingest/records.hpp"

namespace forestfire::service {

namespace {

using nlohmann::json;

constexpr std::size_t kDefaultPageSize = 1000;
constexpr std::size_t kThreadCount = 32;
constexpr auto kStreamPoll = std::chrono::milliseconds(500);

// Thrown inside handlers and turned into an error body.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, status, {{"code", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw HttpError{400, "bad_request", "request body must be a JSON object"};
    return j;
  } catch (const json::exception& e) {
    throw HttpError{400, "bad_request", std::string("invalid JSON body: ") + e.what()};
  }
}

template <typename T>
T field(const json& body, const char* name) {
  if (!body.contains(name)) throw HttpError{400, "bad_request", std::string("missing field '") + name + "'"};
  try {
    return body.at(name).get<T>();
  } catch (const json::exception&) {
    throw HttpError{400, "bad_request", std::string("field '") + name + "' has the wrong type"};
  }
}

std::optional<risk::Timestamp> time_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  try {
    return risk::parse_timestamp(req.get_param_value(name));
  } catch (const std::exception&) {
    throw HttpError{400, "bad_request", std::string("parameter '") + name + "' is not an ISO-8601 UTC time"};
  }
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw HttpError{400, "bad_request", std::string("parameter '") + name + "' must be a non-negative integer"};
  }
  return v;
}

std::uint64_t parse_seq(std::string_view text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw HttpError{400, "bad_request", "event id must be a non-negative integer"};
  }
  return v;
}

std::string iso(SystemClock::time_point t) {
  return risk::format_timestamp(std::chrono::time_point_cast<std::chrono::seconds>(t));
}

std::string sse_frame(const ingest::StreamEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.kind + "\ndata: " + e.data + "\n\n";
}

}  // namespace

struct Server::Impl {
  ServiceConfig config;
  TokenStore tokens;
  UserStore users;
  std::unique_ptr<ingest::IngestCore> core;
  httplib::Server http;
  std::thread thread;
  int port = -1;

  std::mutex mu;
  std::condition_variable cv;
  bool started = false;
  bool stopped = false;

  Impl(ServiceConfig c, TokenStore::Clock clock) : config(std::move(c)), tokens(std::move(clock)) {
    for (const auto& u : config.users) users.put(u);
    auto rules = config.rulebase_path
                     ? std::make_shared<const config::RuleBase>(config::RuleBase::load(*config.rulebase_path))
                     : config::default_rule_base_ptr();
    auto registry = crypto::KeyRegistry::load(config.registry_path);
    auto log = ingest::EventLog::open(config.log_path, config.fsync);
    ingest::IngestOptions options;
    options.clock = config.clock;
    options.event_retention = config.event_retention;
    core = std::make_unique<ingest::IngestCore>(std::move(rules), std::move(registry), std::move(log), options);
    routes();
  }

  // Bearer header, or ?token= where headers cannot be set (EventSource).
  std::string token_of(const httplib::Request& req, bool allow_query) const {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.starts_with(kBearer)) return header.substr(kBearer.size());
    if (allow_query && req.has_param("token")) return req.get_param_value("token");
    return {};
  }

  Principal require(const httplib::Request& req, Role role, bool allow_query = false) const {
    const auto token = token_of(req, allow_query);
    if (token.empty()) throw HttpError{401, "unauthorized", "missing bearer token"};
    auto p = tokens.authenticate(token);
    if (!p) throw HttpError{401, "unauthorized", "invalid or expired token"};
    if (!permits(p->role, role)) {
      throw HttpError{403, "forbidden", "requires the " + std::string(to_string(role)) + " role"};
    }
    return *p;
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.message);
      } catch (const NotFound& e) {
        send_error(res, 404, "not_found", e.what());
      } catch (const std::invalid_argument& e) {
        send_error(res, 400, "bad_request", e.what());
      } catch (const ConfigError& e) {
        send_error(res, 400, "bad_request", e.what());
      }
    };
  }

  json area_summary(const ingest::AreaSnapshot& a) const {
    const auto& s = a.state;
    json j{{"area_id", s.area_id},
           {"level", fuzzy::to_string(s.current_level)},
           {"devices", a.devices},
           {"measurement_count", a.measurement_count}};
    j["percentage"] = s.last_assessment ? json(s.last_assessment->percentage) : json(nullptr);
    j["last_timestamp"] = s.last_timestamp ? json(risk::format_timestamp(*s.last_timestamp)) : json(nullptr);
    const bool declared = s.declaration && s.declaration->active_at(core->now());
    j["declaration"] = declared ? ingest::to_json(*s.declaration) : json(nullptr);
    j["window"] = risk::window_size(s.current_level, declared, core->controller().rules().controller).to_string();
    j["active_alert"] = a.active_alert ? ingest::to_json(*a.active_alert) : json(nullptr);
    return j;
  }

  void routes() {
    http.new_task_queue = [] { return new httplib::ThreadPool(kThreadCount); };
    http.set_payload_max_length(config.max_payload);
    http.set_tcp_nodelay(true);
    http.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      spdlog::error("{} {}: {}", req.method, req.path, what);
      send_error(res, 500, "internal", what);
    });
    http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });

    http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}, {"last_seq", core->last_seq()}});
    });

    http.Post("/auth/login", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto user = users.authenticate(field<std::string>(body, "username"), field<std::string>(body, "password"));
      if (!user) throw HttpError{401, "unauthorized", "invalid username or password"};
      const auto t = tokens.issue(user->username, user->role, config.token_ttl);
      send_json(res, 200, {{"token", t.token}, {"role", to_string(t.principal.role)}, {"expiry", iso(t.principal.expiry)}});
    }));

    http.Post("/packages", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto principal = require(req, Role::operator_);
      if (!req.get_header_value("Content-Type").starts_with("application/octet-stream")) {
        throw HttpError{415, "unsupported_media_type", "packages must be sent as application/octet-stream"};
      }
      const auto r = core->ingest(crypto::as_bytes(req.body));
      if (r.status == ingest::IngestStatus::rejected) {
        send_error(res, r.http_status(), ingest::to_string(*r.reason), r.message);
        return;
      }
      json j{{"status", ingest::to_string(r.status)}, {"device_id", r.device_id}, {"package_id", r.package_id}};
      if (r.assessment) j["assessment"] = ingest::to_json(*r.assessment);
      j["alerts"] = json::array();
      for (const auto& a : r.alert_changes) j["alerts"].push_back(ingest::to_json(a));
      if (r.frequency) j["period_seconds"] = r.frequency->count();
      send_json(res, r.http_status(), j);
    }));

    http.Get("/areas", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require(req, Role::viewer);
      json list = json::array();
      for (const auto& id : core->areas()) {
        if (auto a = core->area(id)) list.push_back(area_summary(*a));
      }
      send_json(res, 200, {{"areas", list}});
    }));

    http.Get(R"(/areas/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require(req, Role::viewer);
      const auto id = req.matches[1].str();
      const auto a = core->area(id);
      if (!a) throw NotFound("unknown area '" + id + "'");
      auto j = area_summary(*a);
      j["last_assessment"] = a->state.last_assessment ? ingest::to_json(*a->state.last_assessment) : json(nullptr);
      json history = json::array();
      for (const auto& m : a->state.history) history.push_back(m);
      j["history"] = std::move(history);
      send_json(res, 200, j);
    }));

    http.Get(R"(/areas/([^/]+)/measurements)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require(req, Role::viewer);
      const auto id = req.matches[1].str();
      const auto from = time_param(req, "from");
      const auto to = time_param(req, "to");
      const auto offset = size_param(req, "offset", 0);
      const auto limit = size_param(req, "limit", kDefaultPageSize);
      json list = json::array();
      for (const auto& m : core->measurements(id, from, to, offset, limit)) list.push_back(m);
      send_json(res, 200, {{"area_id", id}, {"offset", offset}, {"measurements", list}});
    }));

    http.Get("/alerts", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require(req, Role::viewer);
      std::optional<ingest::AlertState> state;
      if (req.has_param("state")) {
        state = ingest::parse_alert_state(req.get_param_value("state"));
        if (!state) throw HttpError{400, "bad_request", "state must be active, superseded or cleared"};
      }
      std::optional<std::string> area;
      if (req.has_param("area")) area = req.get_param_value("area");
      json list = json::array();
      for (const auto& a : core->alerts(state, area ? std::optional<std::string_view>(*area) : std::nullopt)) {
        list.push_back(ingest::to_json(a));
      }
      send_json(res, 200, {{"alerts", list}});
    }));

    http.Post(R"(/areas/([^/]+)/declarations)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto principal = require(req, Role::operator_);
      const auto body = parse_body(req);
      const auto level_text = field<std::string>(body, "level");
      const auto level = fuzzy::parse_risk_level(level_text);
      if (!level) throw HttpError{400, "bad_request", "unknown risk level '" + level_text + "'"};
      const auto ttl = std::chrono::seconds(field<std::int64_t>(body, "ttl_seconds"));
      const auto id = req.matches[1].str();
      const auto d = core->declare(id, *level, ttl, principal.subject);
      auto j = ingest::to_json(d);
      j["area_id"] = id;
      send_json(res, 201, j);
    }));

    http.Put(R"(/devices/([^/]+)/frequency)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto principal = require(req, Role::operator_);
      const auto body = parse_body(req);
      const auto id = req.matches[1].str();
      const auto period = std::chrono::seconds(field<std::int64_t>(body, "period_seconds"));
      const auto c = core->set_frequency(id, period, principal.subject);
      send_json(res, 202, {{"device_id", id},
                           {"period_seconds", c.period.count()},
                           {"state", "pending"},
                           {"requested", risk::format_timestamp(c.requested)}});
    }));

    http.Get(R"(/devices/([^/]+)/frequency)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require(req, Role::viewer);
      const auto id = req.matches[1].str();
      if (!core->has_device(id)) throw NotFound("unknown device '" + id + "'");
      json j{{"device_id", id}};
      if (const auto c = core->frequency(id)) {
        j["period_seconds"] = c->period.count();
        j["state"] = c->acknowledged ? "acknowledged" : "pending";
        j["requested"] = risk::format_timestamp(c->requested);
      } else {
        j["period_seconds"] = nullptr;
        j["state"] = "default";
      }
      send_json(res, 200, j);
    }));

    http.Post("/admin/tokens", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto principal = require(req, Role::admin);
      const auto body = parse_body(req);
      const auto role_text = field<std::string>(body, "role");
      const auto role = parse_role(role_text);
      if (!role) throw HttpError{400, "bad_request", "unknown role '" + role_text + "'"};
      const auto ttl = body.contains("ttl_seconds") ? std::chrono::seconds(field<std::int64_t>(body, "ttl_seconds"))
                                                    : config.token_ttl;
      const auto subject = body.value("subject", principal.subject);
      const auto t = tokens.issue(subject, *role, ttl);
      send_json(res, 201, {{"token", t.token}, {"role", to_string(t.principal.role)}, {"expiry", iso(t.principal.expiry)}});
    }));

    http.Post("/admin/registry/reload", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require(req, Role::admin);
      auto registry = crypto::KeyRegistry::load(config.registry_path);
      const auto n = registry.size();
      core->reload_registry(std::move(registry));
      send_json(res, 200, {{"devices", n}});
    }));

    http.Get("/events", guarded([this](const httplib::Request& req, httplib::Response& res) { stream(req, res); }));
  }

  // Resumes after Last-Event-ID or ?since=; otherwise starts with the next
  // event. Ends when the token expires or the server stops.
  void stream(const httplib::Request& req, httplib::Response& res) {
    require(req, Role::viewer, true);
    const auto token = token_of(req, true);
    std::uint64_t after = core->events().last_seq();
    if (req.has_header("Last-Event-ID")) {
      after = parse_seq(req.get_header_value("Last-Event-ID"));
    } else if (req.has_param("since")) {
      after = parse_seq(req.get_param_value("since"));
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_header("X-Accel-Buffering", "no");
    auto last_write = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::time_point{});
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, token, after, last_write](std::size_t, httplib::DataSink& sink) mutable {
          const auto write = [&](const std::string& s) {
            *last_write = std::chrono::steady_clock::now();
            return sink.write(s.data(), s.size());
          };
          if (last_write->time_since_epoch().count() == 0 && !write("retry: 1000\n\n")) return false;
          if (!tokens.authenticate(token)) {
            write("event: error\ndata: {\"code\":\"unauthorized\",\"message\":\"token expired\"}\n\n");
            sink.done();
            return true;
          }
          auto& bus = core->events();
          if (bus.closed()) {
            sink.done();
            return true;
          }
          const auto events = bus.wait(after, kStreamPoll, 256);
          for (const auto& e : events) {
            if (!write(sse_frame(e))) return false;
            after = e.seq;
          }
          if (events.empty() && std::chrono::steady_clock::now() - *last_write >= config.keepalive) {
            if (!write(": keepalive\n\n")) return false;
          }
          return sink.is_writable();
        });
  }
};

Server::Server(ServiceConfig config, TokenStore::Clock clock)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(clock))) {}

Server::~Server() { stop(); }

int Server::start() {
  const std::lock_guard lock(impl_->mu);
  if (impl_->started) return impl_->port;
  const auto& c = impl_->config;
  if (c.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(c.host);
  } else {
    impl_->port = impl_->http.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) throw Error("cannot bind " + c.host + ":" + std::to_string(c.port));
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  impl_->started = true;
  spdlog::info("listening on {}:{}", c.host, impl_->port);
  return impl_->port;
}

void Server::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait(lock, [this] { return impl_->stopped || !impl_->started; });
}

void Server::stop() {
  std::unique_lock lock(impl_->mu);
  if (impl_->stopped || !impl_->started) {
    impl_->stopped = true;
    impl_->cv.notify_all();
    return;
  }
  impl_->core->events().close();
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_->stopped = true;
  impl_->cv.notify_all();
}

int Server::port() const { return impl_->port; }
const ServiceConfig& Server::config() const { return impl_->config; }
ingest::IngestCore& Server::core() { return *impl_->core; }
TokenStore& Server::tokens() { return impl_->tokens; }

}  // namespace forestfire::service
