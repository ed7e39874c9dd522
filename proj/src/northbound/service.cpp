#include "ranslice/northbound/service.hpp"

#include <algorithm>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::northbound {

namespace codec = nrm::codec;
namespace nt = notification_types;

namespace {

nrm::Model buildModel(const Scenario& s) {
  nrm::ModelSettings settings;
  settings.spectralEfficiency = s.spectralEfficiency;
  settings.rstCatalog = s.rstCatalog;
  nrm::Model m;
  if (s.initialModel.is_null()) {
    m.subnetwork.id = s.name.empty() ? "Subnetwork" : s.name;
  } else {
    m = codec::importModel(s.initialModel);
  }
  m.settings = settings;
  std::vector<nrm::Violation> errors;
  for (auto& v : nrm::validate(m))
    if (v.severity == nrm::Severity::Error) errors.push_back(v);
  if (!errors.empty()) {
    json list = json::array();
    for (const auto& v : errors) list.push_back(v.toJson());
    throw Error(ErrorCode::InvariantViolation, "initial model violates " + errors.front().ruleId + " at " +
                                                   errors.front().path,
                {{"violations", list}});
  }
  return m;
}

infra::Infrastructure buildInfra(const Scenario& s, const nrm::Model& model) {
  infra::Infrastructure in(s.pops, s.rrhs, s.computeDefaults);
  for (const auto& nsd : s.nsds) in.registerNsd(nsd);
  for (const auto& ns : s.nsInstances) in.instantiateNs(ns.nsdId, ns.placement, ns.nsInstanceId);
  for (const auto& b : s.cellBindings) {
    const auto* cell = model.findCell(b.cellId);
    if (!cell) throw Error(ErrorCode::UnknownObject, "cell '" + b.cellId + "' is not in the initial model");
    auto serving = b.servingVnfId;
    if (!serving)
      if (const auto* fn = model.servingFunction(b.cellId)) serving = fn->id;
    in.bindCellResources(b.cellId, b.nsInstanceId, b.rrhId, cell->band, cell->channelBandwidthMHz, serving);
  }
  return in;
}

std::vector<nrm::PlmnId> slicePlmns(const nrm::Model& m, const std::string& ranSliceId) {
  std::vector<nrm::PlmnId> out;
  if (const auto* rs = m.findRanSlice(ranSliceId))
    for (const auto& id : rs->networkIds)
      if (std::find(out.begin(), out.end(), id.plmn) == out.end()) out.push_back(id.plmn);
  return out;
}

}  // namespace

Service::Service()
    : store_("Subnetwork"), lcm_(std::make_unique<lifecycle::LifecycleManager>(store_, infra_)), sim_({}, {}) {}

Service::Service(const Scenario& scenario)
    : store_(buildModel(scenario)),
      infra_(buildInfra(scenario, *store_.snapshot())),
      lcm_(std::make_unique<lifecycle::LifecycleManager>(store_, infra_)),
      sim_(scenario.sim, scenario.profiles),
      nextTick_(scenario.startTick) {
  for (const auto& [tag, cells] : scenario.areas) lcm_->defineArea(tag, cells);
  for (const auto& t : scenario.templates) lcm_->registerTemplate(t);
  sim_.validateWindows(*store_.snapshot());
}

lifecycle::LcmResult Service::lcm(const std::string& operation, const std::string& ranSliceId,
                                  const json& request) {
  const json body = request.is_null() ? json::object() : request;
  if (!body.is_object()) parseError("", "request body must be an object");
  {
    std::lock_guard lock(simMutex_);
    lcm_->setTick(nextTick_);
  }
  const auto before = store_.snapshot();
  std::vector<nrm::PlmnId> plmns = slicePlmns(*before, ranSliceId);
  auto finish = [&](const std::string& id) {
    auto after = slicePlmns(*store_.snapshot(), id);
    if (!after.empty()) plmns = after;
  };

  auto call = [&]() -> lifecycle::LcmResult {
    if (operation == "createRsi") {
      JsonReader r(body, "");
      const auto templateId = r.req<std::string>("templateId");
      json config = body;
      config.erase("templateId");
      auto parsed = lifecycle::parseInstanceConfig(config, "");
      if (plmns.empty())
        for (const auto& id : parsed.networkIds)
          if (std::find(plmns.begin(), plmns.end(), id.plmn) == plmns.end()) plmns.push_back(id.plmn);
      return lcm_->createRsi(templateId, parsed);
    }
    if (operation == "modifyRsi") return lcm_->modifyRsi(ranSliceId, lifecycle::parseModifyDelta(body, ""));
    if (operation == "scaleRsiCapacity") {
      JsonReader r(body, "");
      std::optional<lifecycle::CellPlan> plan;
      if (const json* p = r.rawOpt("plan")) plan = lifecycle::parseCellPlan(*p, "/plan");
      r.finish();
      return lcm_->scaleRsiCapacity(ranSliceId, plan);
    }
    if (operation == "terminateRsi") {
      JsonReader r(body, "");
      const bool release = r.get<bool>("releaseDedicatedResources", true);
      r.finish();
      return lcm_->terminateRsi(ranSliceId, release);
    }
    throw Error(ErrorCode::ParseError, "unknown LCM operation '" + operation + "'", {{"operation", operation}});
  };

  try {
    auto result = call();
    finish(result.ranSliceId);
    notifyLcm(result.record, plmns);
    return result;
  } catch (const Error& e) {
    // Only attempts that reached the manager have a record to report.
    if (e.details().is_object() && e.details().contains("opId"))
      if (auto rec = lcm_->record(e.details()["opId"].get<std::string>())) notifyLcm(*rec, plmns);
    throw;
  }
}

void Service::notifyLcm(const lifecycle::LcmOperationRecord& record, const std::vector<nrm::PlmnId>& plmns) {
  Notification n;
  const bool ok = record.status == lifecycle::LcmStatus::Completed;
  n.type = ok ? nt::kLcmOperationCompleted : nt::kLcmOperationFailed;
  n.source = "NM";
  n.tick = record.tick.value_or(0);
  n.ranSliceId = record.ranSliceId;
  n.plmns = plmns;
  n.data = {{"opId", record.opId}, {"operation", record.operation}, {"status", lifecycle::toString(record.status)}};
  if (record.failure) n.data["failure"] = *record.failure;
  std::vector<Notification> batch{std::move(n)};
  pmfm_.dispatcher().dispatch(*store_.snapshot(), batch);
}

void Service::registerTemplate(const json& body) { lcm_->registerTemplate(lifecycle::parseTemplate(body, "")); }

nrm::Dn Service::updateManagedObject(const std::string& dn, const json& deltas,
                                     std::optional<std::uint64_t> baseVersion) {
  return store_.updateManagedObject(nrm::Dn::parse(dn), deltas, baseVersion);
}

void Service::degradeCell(const std::string& cellId, double factor) {
  if (!store_.snapshot()->findCell(cellId))
    throw Error(ErrorCode::NotFound, "cell '" + cellId + "' not found", {{"cellId", cellId}});
  if (!(factor >= 0.0 && factor <= 1.0))
    throw Error(ErrorCode::InvariantViolation, "degradation factor must be in [0,1]", {{"factor", factor}});
  std::lock_guard lock(simMutex_);
  sim_.setDegradation(cellId, factor);
}

void Service::restoreCell(const std::string& cellId) { degradeCell(cellId, 1.0); }

enforcement::TickResult Service::step() {
  std::lock_guard lock(simMutex_);
  const auto snapshot = store_.snapshot();
  auto result = sim_.advanceTick(*snapshot, nextTick_);
  pmfm_.ingestTickResults(*snapshot, result);
  ++nextTick_;
  return result;
}

std::int64_t Service::nextTick() const {
  std::lock_guard lock(simMutex_);
  return nextTick_;
}

json Service::infrastructureJson() const { return lcm_->infrastructureSnapshot().toJson(); }

int httpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvariantViolation:
    case ErrorCode::IllegalContainment:
    case ErrorCode::ScenarioValidationError:
    case ErrorCode::RstUnknown:
    case ErrorCode::WindowIncomplete:
      return 400;
    case ErrorCode::ExposureDenied:
      return 403;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownObject:
    case ErrorCode::UnknownParent:
    case ErrorCode::UnknownSlice:
    case ErrorCode::UnknownTemplate:
    case ErrorCode::UnknownSubscription:
    case ErrorCode::UnknownNsd:
      return 404;
    case ErrorCode::StaleVersion:
    case ErrorCode::GuaranteeInfeasible:
    case ErrorCode::InstanceInUse:
    case ErrorCode::CellAlreadyBound:
    case ErrorCode::OutOfOrderTick:
    case ErrorCode::ProfileExhausted:
      return 409;
    case ErrorCode::UnknownNsInstance:
    case ErrorCode::UnknownRrh:
    case ErrorCode::InsufficientNfvi:
    case ErrorCode::NoFeasiblePath:
    case ErrorCode::ScalingLimitExceeded:
    case ErrorCode::BandUnsupported:
    case ErrorCode::CarrierSlotsExhausted:
    case ErrorCode::UnservableCell:
      return 422;
    case ErrorCode::CompensationFailed:
    case ErrorCode::InjectedFault:
      return 500;
  }
  return 500;
}

}  // namespace ranslice::northbound
