#include "ranslice/northbound/scenario.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/northbound/service.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::northbound {

namespace {

const char* actionName(EventAction a) {
  switch (a) {
    case EventAction::LcmOperation: return "lcmOperation";
    case EventAction::UpdateManagedObject: return "updateManagedObject";
    case EventAction::DegradeCell: return "degradeCell";
    case EventAction::RestoreCell: return "restoreCell";
    case EventAction::EndSimulation: return "endSimulation";
  }
  return "?";
}

class Collector {
 public:
  void add(const std::string& path, const std::string& message) {
    violations_.push_back({{"path", path.empty() ? "/" : path}, {"message", message}});
  }

  // Runs `f`; a library error becomes a violation instead of aborting.
  void guard(const std::string& path, const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      json v{{"path", path.empty() ? "/" : path}, {"message", e.what()}, {"error", std::string(toString(e.code()))}};
      if (e.details().is_object() && e.details().contains("violations")) v["violations"] = e.details()["violations"];
      violations_.push_back(v);
    } catch (const json::exception& e) {
      add(path, e.what());
    }
  }

  bool empty() const { return violations_.empty(); }
  const json& violations() const { return violations_; }

 private:
  json violations_ = json::array();
};

template <class T>
std::vector<T> parseList(Collector& c, const json& doc, const std::string& key,
                         const std::function<T(const json&, const std::string&)>& parse,
                         const std::string& prefix = "") {
  std::vector<T> out;
  if (!doc.contains(key) || doc.at(key).is_null()) return out;
  const std::string path = prefix + "/" + key;
  if (!doc.at(key).is_array()) {
    c.add(path, "expected array");
    return out;
  }
  for (std::size_t i = 0; i < doc.at(key).size(); ++i) {
    const auto at = path + "/" + std::to_string(i);
    c.guard(at, [&] { out.push_back(parse(doc.at(key)[i], at)); });
  }
  return out;
}

TimelineEvent parseEvent(const json& j, const std::string& path) {
  JsonReader r(j, path);
  TimelineEvent e;
  e.tick = r.req<std::int64_t>("tick");
  const auto action = r.req<std::string>("action");
  if (action == "lcmOperation") {
    e.action = EventAction::LcmOperation;
    e.operation = r.req<std::string>("operation");
    static const std::set<std::string> ops{"createRsi", "modifyRsi", "scaleRsiCapacity", "terminateRsi"};
    if (!ops.count(e.operation)) parseError(r.pathOf("operation"), "unknown LCM operation '" + e.operation + "'");
    e.ranSliceId = r.get<std::string>("ranSliceId", "");
    if (e.operation != "createRsi" && e.ranSliceId.empty())
      parseError(r.pathOf("ranSliceId"), e.operation + " needs a ranSliceId");
    e.request = r.get<json>("request", json::object());
    if (!e.request.is_object()) parseError(r.pathOf("request"), "expected object");
  } else if (action == "updateManagedObject") {
    e.action = EventAction::UpdateManagedObject;
    e.dn = r.req<std::string>("dn");
    e.deltas = r.req<json>("deltas");
    if (!e.deltas.is_object()) parseError(r.pathOf("deltas"), "expected object");
  } else if (action == "degradeCell") {
    e.action = EventAction::DegradeCell;
    e.cellId = r.req<std::string>("cellId");
    e.factor = r.req<double>("factor");
    if (!(e.factor >= 0.0 && e.factor <= 1.0)) parseError(r.pathOf("factor"), "factor must be in [0,1]");
  } else if (action == "restoreCell") {
    e.action = EventAction::RestoreCell;
    e.cellId = r.req<std::string>("cellId");
  } else if (action == "endSimulation") {
    e.action = EventAction::EndSimulation;
  } else {
    parseError(r.pathOf("action"), "unknown action '" + action + "'");
  }
  r.finish();
  return e;
}

}  // namespace

json TimelineEvent::toJson() const {
  json j{{"tick", tick}, {"action", actionName(action)}};
  switch (action) {
    case EventAction::LcmOperation:
      j["operation"] = operation;
      if (!ranSliceId.empty()) j["ranSliceId"] = ranSliceId;
      break;
    case EventAction::UpdateManagedObject: j["dn"] = dn; break;
    case EventAction::DegradeCell:
      j["cellId"] = cellId;
      j["factor"] = factor;
      break;
    case EventAction::RestoreCell: j["cellId"] = cellId; break;
    case EventAction::EndSimulation: break;
  }
  return j;
}

std::int64_t Scenario::endTick() const {
  for (const auto& e : timeline)
    if (e.action == EventAction::EndSimulation) return e.tick;
  if (auto h = profiles.horizon()) return std::max(startTick, *h + 1);
  return startTick;
}

Scenario parseScenario(const json& doc) {
  Collector c;
  Scenario s;
  if (!doc.is_object()) {
    c.add("", "scenario must be a JSON object");
    throw Error(ErrorCode::ScenarioValidationError, "scenario is invalid", {{"violations", c.violations()}});
  }
  static const std::set<std::string> known{"name",     "simConfig",   "rstCatalog",   "infrastructure",
                                           "nsds",     "nsInstances", "cellBindings", "initialModel",
                                           "templates", "areas",      "loadProfiles", "eventTimeline",
                                           "kpiReports", "initialOperations"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) c.add("/" + key, "unknown field '" + key + "'");

  c.guard("/name", [&] { s.name = JsonReader(doc, "").get<std::string>("name", ""); });
  if (doc.contains("simConfig"))
    c.guard("/simConfig", [&] {
      JsonReader r(doc.at("simConfig"), "/simConfig");
      s.sim.tickDurationS = r.get<double>("tickDurationS", 1.0);
      s.sim.epsilon = r.get<double>("epsilon", s.sim.epsilon);
      s.sim.seed = r.get<std::uint64_t>("seed", 0);
      s.spectralEfficiency = r.get<double>("spectralEfficiency", s.spectralEfficiency);
      s.continueOnError = r.get<bool>("continueOnError", false);
      s.startTick = r.get<std::int64_t>("startTick", 0);
      r.finish();
      if (!(s.sim.tickDurationS > 0)) parseError(r.pathOf("tickDurationS"), "must be > 0");
      if (!(s.spectralEfficiency > 0)) parseError(r.pathOf("spectralEfficiency"), "must be > 0");
      if (!(s.sim.epsilon >= 0 && s.sim.epsilon < 1)) parseError(r.pathOf("epsilon"), "must be in [0,1)");
    });
  if (doc.contains("rstCatalog"))
    c.guard("/rstCatalog", [&] { s.rstCatalog = JsonReader::convert<std::vector<std::string>>(doc.at("rstCatalog"), "/rstCatalog"); });

  if (doc.contains("infrastructure")) {
    const json& inf = doc.at("infrastructure");
    if (!inf.is_object()) {
      c.add("/infrastructure", "expected object");
    } else {
      for (const auto& [key, _] : inf.items())
        if (key != "pops" && key != "rrhs" && key != "computeDefaults")
          c.add("/infrastructure/" + key, "unknown field '" + key + "'");
      s.pops = parseList<infra::Pop>(c, inf, "pops", infra::parsePop, "/infrastructure");
      s.rrhs = parseList<infra::Rrh>(c, inf, "rrhs", infra::parseRrh, "/infrastructure");
      if (inf.contains("computeDefaults"))
        c.guard("/infrastructure/computeDefaults", [&] {
          s.computeDefaults = infra::parseComputeDefaults(inf.at("computeDefaults"), "/infrastructure/computeDefaults");
        });
    }
  }
  s.nsds = parseList<infra::Nsd>(c, doc, "nsds", infra::parseNsd);
  s.nsInstances = parseList<NsInstanceSpec>(c, doc, "nsInstances", [](const json& j, const std::string& p) {
    JsonReader r(j, p);
    NsInstanceSpec ns;
    ns.nsdId = r.req<std::string>("nsdId");
    ns.nsInstanceId = r.req<std::string>("nsInstanceId");
    if (const json* pl = r.rawOpt("placement")) {
      if (!pl->is_object()) parseError(r.pathOf("placement"), "expected object vnfId -> popId");
      for (const auto& [vnf, pop] : pl->items())
        ns.placement[vnf] = JsonReader::convert<std::string>(pop, r.pathOf("placement") + "/" + vnf);
    }
    r.finish();
    return ns;
  });
  s.cellBindings = parseList<CellBindingSpec>(c, doc, "cellBindings", [](const json& j, const std::string& p) {
    JsonReader r(j, p);
    CellBindingSpec b;
    b.cellId = r.req<std::string>("cellId");
    b.nsInstanceId = r.req<std::string>("nsInstanceId");
    b.rrhId = r.req<std::string>("rrhId");
    b.servingVnfId = r.opt<std::string>("servingVnfId");
    r.finish();
    return b;
  });
  if (doc.contains("initialModel")) s.initialModel = doc.at("initialModel");
  s.templates = parseList<lifecycle::RanSliceTemplate>(c, doc, "templates", lifecycle::parseTemplate);
  if (doc.contains("areas"))
    c.guard("/areas", [&] {
      const json& a = doc.at("areas");
      if (!a.is_object()) parseError("/areas", "expected object tag -> cellIds");
      for (const auto& [tag, cells] : a.items())
        s.areas[tag] = JsonReader::convert<std::vector<std::string>>(cells, "/areas/" + tag);
    });
  auto profiles = parseList<enforcement::OfferedLoadProfile>(
      c, doc, "loadProfiles",
      [&](const json& j, const std::string& p) { return enforcement::parseProfile(j, p, s.sim.seed); });
  for (std::size_t i = 0; i < profiles.size(); ++i)
    c.guard("/loadProfiles/" + std::to_string(i), [&] { s.profiles.add(profiles[i]); });
  // Initial operations are LCM calls without tick or action, run first at
  // startTick.
  s.timeline = parseList<TimelineEvent>(c, doc, "initialOperations", [&](const json& j, const std::string& p) {
    if (!j.is_object()) parseError(p, "expected object");
    json event = j;
    event["tick"] = s.startTick;
    event["action"] = "lcmOperation";
    return parseEvent(event, p);
  });
  const std::size_t initialOps = s.timeline.size();
  for (auto& e : parseList<TimelineEvent>(c, doc, "eventTimeline", parseEvent)) s.timeline.push_back(std::move(e));
  s.kpiReports = parseList<KpiWindowSpec>(c, doc, "kpiReports", [](const json& j, const std::string& p) {
    JsonReader r(j, p);
    KpiWindowSpec k;
    k.ranSliceId = r.req<std::string>("ranSliceId");
    k.startTick = r.req<std::int64_t>("startTick");
    k.endTick = r.req<std::int64_t>("endTick");
    k.label = r.get<std::string>("label", k.ranSliceId + "@" + std::to_string(k.startTick) + "-" +
                                              std::to_string(k.endTick));
    if (k.endTick < k.startTick) parseError(r.pathOf("endTick"), "window ends before it starts");
    r.finish();
    return k;
  });

  // Referential checks over what parsed.
  std::set<std::string> catalog(s.rstCatalog.begin(), s.rstCatalog.end());
  std::set<std::string> templateIds;
  for (std::size_t i = 0; i < s.templates.size(); ++i) {
    const auto& t = s.templates[i];
    const auto at = "/templates/" + std::to_string(i);
    if (!templateIds.insert(t.templateId).second) c.add(at + "/templateId", "duplicate template '" + t.templateId + "'");
    if (!catalog.count(t.rst)) c.add(at + "/rst", "radio slice type '" + t.rst + "' is not in the RST catalog");
    if (t.coverageArea && !s.areas.count(*t.coverageArea))
      c.add(at + "/coverage/area", "coverage area '" + *t.coverageArea + "' is not defined");
  }

  std::set<std::string> cells, slices;
  std::optional<nrm::Model> initial;
  if (!s.initialModel.is_null())
    c.guard("/initialModel", [&] {
      initial = nrm::codec::importModel(s.initialModel);
      for (const auto* cell : initial->cells()) cells.insert(cell->cellId);
      for (const auto& rs : initial->subnetwork.ranSlices) slices.insert(rs.ranSliceId);
    });
  for (const auto& [tag, list] : s.areas)
    for (const auto& cell : list)
      if (!cells.count(cell)) c.add("/areas/" + tag, "cell '" + cell + "' is not in the initial model");

  std::int64_t previous = s.startTick;
  const std::int64_t end = s.endTick();
  bool ended = false;
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    const auto& e = s.timeline[i];
    const auto at = i < initialOps ? "/initialOperations/" + std::to_string(i)
                                   : "/eventTimeline/" + std::to_string(i - initialOps);
    if (e.tick < previous)
      c.add(at + "/tick", "timeline ticks must be non-decreasing and not before startTick " +
                              std::to_string(s.startTick));
    previous = std::max(previous, e.tick);
    if (ended) c.add(at, "event follows endSimulation");
    if (e.action == EventAction::EndSimulation) {
      ended = true;
      continue;
    }
    if (e.tick >= end)
      c.add(at + "/tick", "event at tick " + std::to_string(e.tick) + " is never reached (simulation ends at " +
                              std::to_string(end) + ")");
    switch (e.action) {
      case EventAction::LcmOperation:
        if (e.operation == "createRsi") {
          const auto tid = e.request.value("templateId", json()).is_string()
                               ? e.request["templateId"].get<std::string>()
                               : std::string();
          if (!templateIds.count(tid)) c.add(at + "/request/templateId", "template '" + tid + "' is not defined");
          c.guard(at + "/request", [&] {
            json config = e.request;
            config.erase("templateId");
            const auto parsed = lifecycle::parseInstanceConfig(config, at + "/request");
            if (parsed.ranSliceId) slices.insert(*parsed.ranSliceId);
            if (parsed.cells)
              for (const auto& cell : *parsed.cells)
                if (!cells.count(cell)) c.add(at + "/request/cells", "cell '" + cell + "' does not exist");
          });
        } else {
          if (!slices.count(e.ranSliceId))
            c.add(at + "/ranSliceId", "RAN slice '" + e.ranSliceId + "' does not exist at this point");
          c.guard(at + "/request", [&] {
            if (e.operation == "modifyRsi") {
              const auto d = lifecycle::parseModifyDelta(e.request, at + "/request");
              for (const auto& add : d.addCellSlices) {
                if (!cells.count(add.cellId)) c.add(at + "/request", "cell '" + add.cellId + "' does not exist");
                if (add.rst && !catalog.count(*add.rst))
                  c.add(at + "/request", "radio slice type '" + *add.rst + "' is not in the RST catalog");
              }
            } else if (e.operation == "scaleRsiCapacity") {
              JsonReader r(e.request, at + "/request");
              if (const json* p = r.rawOpt("plan")) {
                const auto plan = lifecycle::parseCellPlan(*p, at + "/request/plan");
                if (plan.rst && !catalog.count(*plan.rst))
                  c.add(at + "/request/plan/rst", "radio slice type '" + *plan.rst + "' is not in the RST catalog");
                cells.insert(plan.cellId);
              }
              r.finish();
            } else {
              JsonReader r(e.request, at + "/request");
              r.get<bool>("releaseDedicatedResources", true);
              r.finish();
              slices.erase(e.ranSliceId);
            }
          });
        }
        break;
      case EventAction::UpdateManagedObject:
        c.guard(at + "/dn", [&] { nrm::Dn::parse(e.dn); });
        break;
      case EventAction::DegradeCell:
      case EventAction::RestoreCell:
        if (!cells.count(e.cellId)) c.add(at + "/cellId", "cell '" + e.cellId + "' does not exist");
        break;
      case EventAction::EndSimulation: break;
    }
  }

  for (std::size_t i = 0; i < s.profiles.profiles().size(); ++i) {
    const auto& k = s.profiles.profiles()[i].key;
    const auto at = "/loadProfiles/" + std::to_string(i);
    if (!cells.count(k.cellId)) c.add(at + "/cellId", "cell '" + k.cellId + "' is never defined");
    if (!k.ranSliceId.empty() && !slices.count(k.ranSliceId)) {
      bool created = false;
      for (const auto& e : s.timeline)
        if (e.operation == "createRsi" && e.request.value("ranSliceId", "") == k.ranSliceId) created = true;
      if (!created) c.add(at + "/ranSliceId", "RAN slice '" + k.ranSliceId + "' is never defined");
    }
  }
  for (std::size_t i = 0; i < s.kpiReports.size(); ++i) {
    const auto& k = s.kpiReports[i];
    const auto at = "/kpiReports/" + std::to_string(i);
    if (k.startTick < s.startTick || k.endTick >= end)
      c.add(at, "window [" + std::to_string(k.startTick) + ", " + std::to_string(k.endTick) +
                    "] is outside the simulated ticks");
    if (!slices.count(k.ranSliceId)) {
      bool created = false;
      for (const auto& e : s.timeline)
        if (e.operation == "createRsi" && e.request.value("ranSliceId", "") == k.ranSliceId) created = true;
      if (!created) c.add(at + "/ranSliceId", "RAN slice '" + k.ranSliceId + "' is never defined");
    }
  }

  // Build the start state in memory: catches infrastructure, placement,
  // binding and model problems before anything runs.
  if (c.empty()) c.guard("", [&] { Service probe(s); });

  if (!c.empty()) {
    const auto& first = c.violations().front();
    throw Error(ErrorCode::ScenarioValidationError,
                "scenario is invalid: " + first["path"].get<std::string>() + ": " +
                    first["message"].get<std::string>() +
                    (c.violations().size() > 1 ? " (+" + std::to_string(c.violations().size() - 1) + " more)" : ""),
                {{"violations", c.violations()}});
  }
  return s;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "scenario file '" + path + "' not found", {{"path", path}});
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ScenarioValidationError, std::string("malformed JSON: ") + e.what(),
                {{"violations", json::array({{{"path", "/"}, {"message", e.what()}}})}});
  }
  return parseScenario(doc);
}

}  // namespace ranslice::northbound
