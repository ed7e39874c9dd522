#include "ranslice/northbound/api.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/northbound/runner.hpp"
#include "ranslice/northbound/service.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::northbound {

namespace codec = nrm::codec;

ApiConfig parseApiConfig(const json& j) {
  JsonReader r(j, "");
  ApiConfig c;
  c.host = r.get<std::string>("listen", c.host);
  c.port = r.get<int>("port", c.port);
  c.scenarioPath = r.opt<std::string>("scenario");
  r.finish();
  if (c.port < 0 || c.port > 65535) parseError("/port", "port out of range");
  return c;
}

ApiConfig loadApiConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "config file '" + path + "' not found", {{"path", path}});
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parseApiConfig(json::parse(buf.str()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed config: ") + e.what());
  }
}

namespace {

void sendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void sendError(httplib::Response& res, const Error& e) {
  const int status = httpStatus(e.code());
  json body = e.toJson();
  if (status == 400 && !(body.contains("details") && body["details"].contains("violations"))) {
    json v{{"message", e.what()}};
    if (e.details().is_object()) {
      if (e.details().contains("location")) v["path"] = e.details()["location"];
      if (e.details().contains("ruleId")) v["ruleId"] = e.details()["ruleId"];
      if (e.details().contains("rule")) v["ruleId"] = e.details()["rule"];
    }
    body["details"]["violations"] = json::array({v});
  }
  sendJson(res, status, body);
}

json parseBody(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON body: ") + e.what(),
                {{"location", "byte " + std::to_string(e.byte)}});
  }
}

std::optional<std::int64_t> queryInt(const httplib::Request& req, const std::string& key) {
  if (!req.has_param(key)) return std::nullopt;
  const auto v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const auto n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "query parameter '" + key + "' must be an integer", {{"location", key}});
  }
}

json lcmResponse(const lifecycle::LcmResult& r) {
  return {{"ranSliceId", r.ranSliceId}, {"record", r.record.toJson()}};
}

}  // namespace

struct ApiServer::Impl {
  Service& svc;
  std::optional<Scenario> scenario;
  std::unique_ptr<Replay> replay;
  std::mutex simMutex;
  httplib::Server server;
  std::atomic<bool> stopping{false};

  Impl(Service& s, std::optional<Scenario> sc) : svc(s), scenario(std::move(sc)) {
    if (scenario) replay = std::make_unique<Replay>(svc, *scenario);
    routes();
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  Handler guarded(Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const Error& e) {
        sendError(res, e);
      } catch (const std::exception& e) {
        sendJson(res, 500, {{"error", "InternalError"}, {"message", e.what()}});
      }
    };
  }

  // One tick; the log lines it produced.
  json stepOnce(bool& more) {
    if (replay) {
      const auto before = replay->resultLog().size();
      more = replay->advance();
      json lines = json::array();
      for (auto i = before; i < replay->resultLog().size(); ++i) lines.push_back(json::parse(replay->resultLog()[i]));
      return lines;
    }
    const auto h = svc.horizon();
    if (h && svc.nextTick() > *h) {
      more = false;
      return json::array();
    }
    json lines = json::array();
    for (const auto& l : svc.step().logLines()) lines.push_back(json::parse(l));
    more = true;
    return lines;
  }

  void routes() {
    auto& s = server;
    s.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
      sendJson(res, 200, {{"status", "ok"}});
    }));

    s.Post("/ran-slices", guarded([this](const httplib::Request& req, httplib::Response& res) {
      sendJson(res, 201, lcmResponse(svc.lcm("createRsi", "", parseBody(req))));
    }));
    s.Get("/ran-slices", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& rs : svc.model()->subnetwork.ranSlices) out.push_back(codec::attributes(rs));
      sendJson(res, 200, out);
    }));
    s.Get(R"(/ran-slices/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto id = req.matches[1].str();
      const auto model = svc.model();
      const auto* rs = model->findRanSlice(id);
      if (!rs) throw Error(ErrorCode::UnknownSlice, "RAN slice '" + id + "' not found", {{"ranSliceId", id}});
      sendJson(res, 200, codec::attributes(*rs));
    }));
    s.Patch(R"(/ran-slices/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      sendJson(res, 200, lcmResponse(svc.lcm("modifyRsi", req.matches[1].str(), parseBody(req))));
    }));
    s.Post(R"(/ran-slices/([^/]+)/scale)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      sendJson(res, 200, lcmResponse(svc.lcm("scaleRsiCapacity", req.matches[1].str(), parseBody(req))));
    }));
    s.Delete(R"(/ran-slices/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json body = parseBody(req);
      if (req.has_param("release")) body["releaseDedicatedResources"] = req.get_param_value("release") != "false";
      sendJson(res, 200, lcmResponse(svc.lcm("terminateRsi", req.matches[1].str(), body)));
    }));

    s.Get("/model", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("dn")) return sendJson(res, 200, svc.exportModel());
      const int depth = static_cast<int>(queryInt(req, "depth").value_or(-1));
      sendJson(res, 200, svc.store().getModelTree(nrm::Dn::parse(req.get_param_value("dn")), depth));
    }));
    s.Get("/model/violations", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json out = json::array();
      for (const auto& v : svc.store().validateModel(req.has_param("info"))) out.push_back(v.toJson());
      sendJson(res, 200, out);
    }));
    s.Get("/infrastructure", guarded([this](const httplib::Request&, httplib::Response& res) {
      sendJson(res, 200, svc.infrastructureJson());
    }));

    s.Get("/templates", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& t : svc.lifecycle().templates()) out.push_back(lifecycle::toJson(t));
      sendJson(res, 200, out);
    }));
    s.Post("/templates", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parseBody(req);
      svc.registerTemplate(body);
      sendJson(res, 201, lifecycle::toJson(svc.lifecycle().findTemplate(body.at("templateId").get<std::string>())));
    }));

    s.Get("/lcm-operations", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& r : svc.lifecycle().records()) out.push_back(r.toJson());
      sendJson(res, 200, out);
    }));
    s.Get(R"(/lcm-operations/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto id = req.matches[1].str();
      auto r = svc.lifecycle().record(id);
      if (!r) throw Error(ErrorCode::NotFound, "LCM operation '" + id + "' not found", {{"opId", id}});
      sendJson(res, 200, r->toJson());
    }));

    s.Get("/kpi-reports", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("ranSliceId"))
        throw Error(ErrorCode::ParseError, "query parameter 'ranSliceId' is required", {{"location", "ranSliceId"}});
      const auto& store = svc.pmfm().store();
      const auto first = store.firstTick(), last = store.lastTick();
      if (!first) throw Error(ErrorCode::WindowIncomplete, "no measurements ingested yet");
      const auto start = queryInt(req, "startTick").value_or(*first);
      const auto end = queryInt(req, "endTick").value_or(*last);
      sendJson(res, 200, store.computeKpiReport(req.get_param_value("ranSliceId"), start, end).toJson());
    }));

    s.Post("/subscriptions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto sub = pmfm::parseSubscription(parseBody(req), "");
      const auto id = svc.pmfm().dispatcher().subscribe(*svc.model(), sub);
      res.status = 201;
      res.set_header("Location", "/subscriptions/" + id);
      auto sent = std::make_shared<bool>(false);
      res.set_chunked_content_provider(
          "application/x-ndjson",
          [this, id, sent](std::size_t, httplib::DataSink& sink) {
            if (!*sent) {
              *sent = true;
              const auto head = json{{"subscriptionId", id}}.dump() + "\n";
              return sink.write(head.data(), head.size());
            }
            if (stopping) {
              sink.done();
              return true;
            }
            std::vector<Notification> batch;
            try {
              batch = svc.pmfm().dispatcher().waitAndDrain(id, std::chrono::milliseconds(1000));
            } catch (const Error&) {
              sink.done();  // unsubscribed
              return true;
            }
            std::string out;
            for (const auto& n : batch) out += n.toJson().dump() + "\n";
            if (out.empty()) out = "\n";  // keep-alive, also detects a closed peer
            return sink.write(out.data(), out.size());
          },
          [this, id](bool) {
            try {
              svc.pmfm().dispatcher().unsubscribe(id);
            } catch (const Error&) {
            }
          });
    }));
    s.Get("/subscriptions", guarded([this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& sub : svc.pmfm().dispatcher().subscriptions()) out.push_back(sub.toJson());
      sendJson(res, 200, out);
    }));
    s.Delete(R"(/subscriptions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      svc.pmfm().dispatcher().unsubscribe(req.matches[1].str());
      res.status = 204;
    }));

    s.Post(R"(/cells/([^/]+)/degradation)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parseBody(req);
      JsonReader r(body, "");
      const double factor = r.req<double>("factor");
      r.finish();
      svc.degradeCell(req.matches[1].str(), factor);
      sendJson(res, 200, {{"cellId", req.matches[1].str()}, {"factor", factor}});
    }));

    s.Post("/sim/step", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parseBody(req);
      JsonReader r(body, "");
      const int count = r.get<int>("count", 1);
      r.finish();
      if (count < 1) parseError("/count", "count must be >= 1");
      std::lock_guard lock(simMutex);
      json log = json::array();
      bool more = true;
      for (int i = 0; i < count && more; ++i)
        for (auto& l : stepOnce(more)) log.push_back(std::move(l));
      sendJson(res, 200, {{"nextTick", svc.nextTick()}, {"finished", !more}, {"log", log}});
    }));
    s.Post("/sim/run", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parseBody(req);
      JsonReader r(body, "");
      const auto until = r.opt<std::int64_t>("untilTick");
      r.finish();
      if (!replay && !until && !svc.horizon())
        throw Error(ErrorCode::ParseError, "no offered-load horizon; give untilTick", {{"location", "/untilTick"}});
      std::lock_guard lock(simMutex);
      const auto from = svc.nextTick();
      bool more = true;
      while (more && (!until || svc.nextTick() <= *until)) stepOnce(more);
      sendJson(res, 200, {{"ticksSimulated", svc.nextTick() - from}, {"nextTick", svc.nextTick()}, {"finished", !more}});
    }));
  }
};

ApiServer::ApiServer(Service& service, std::optional<Scenario> scenario)
    : impl_(std::make_unique<Impl>(service, std::move(scenario))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::NotFound, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::NotFound, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  impl_->stopping = true;
  impl_->server.stop();
}

}  // namespace ranslice::northbound
