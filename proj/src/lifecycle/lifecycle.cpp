#include "ranslice/lifecycle/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::lifecycle {

using nrm::Dn;
using nrm::ObjectKind;
namespace codec = nrm::codec;

namespace {

int trailingNumber(const std::string& id) {
  auto hash = id.rfind('#');
  if (hash == std::string::npos || hash + 1 == id.size()) return 0;
  int n = 0;
  for (std::size_t i = hash + 1; i < id.size(); ++i) {
    if (id[i] < '0' || id[i] > '9') return 0;
    n = n * 10 + (id[i] - '0');
  }
  return n;
}

std::string nextFree(const std::string& prefix, const std::set<std::string>& taken) {
  for (int n = 1;; ++n) {
    auto id = prefix + "#" + std::to_string(n);
    if (!taken.count(id)) return id;
  }
}

json networkIdsJson(const std::vector<nrm::NetworkId>& ids) {
  json arr = json::array();
  for (const auto& id : ids) arr.push_back(codec::toJson(id));
  return arr;
}

json refsJson(const std::vector<nrm::CellSliceRef>& refs) {
  json arr = json::array();
  for (const auto& r : refs) arr.push_back({{"cellId", r.cellId}, {"cellSliceId", r.cellSliceId}});
  return arr;
}

const nrm::NrCell& requireCell(const nrm::Model& m, const std::string& cellId) {
  const auto* cell = m.findCell(cellId);
  if (!cell)
    throw Error(ErrorCode::UnservableCell, "cell '" + cellId + "' does not exist", {{"cellId", cellId}});
  return *cell;
}

const nrm::RanSlice& requireSlice(const nrm::Model& m, const std::string& id) {
  const auto* rs = m.findRanSlice(id);
  if (!rs || rs->state != nrm::SliceState::Active)
    throw Error(ErrorCode::UnknownSlice, "unknown RAN slice '" + id + "'", {{"ranSliceId", id}});
  return *rs;
}

/// Parses a cell-scope AL against the cell's capacity and returns its
/// canonical JSON (fractions).
json cellAl(const nrm::Model& m, const nrm::NrCell& cell, const json& al, const std::string& path) {
  return codec::toJson(codec::parseAuthorisedLoad(al, path, codec::LoadScope::Cell, m.cellCapacityMbps(cell)));
}

const nrm::ManagedElement* ownerElement(const nrm::Model& m, const std::string& functionId) {
  for (const auto& me : m.subnetwork.managedElements)
    for (const auto& fn : me.functions)
      if (fn.id == functionId) return &me;
  return nullptr;
}

std::string rstOf(const nrm::Model& m, const nrm::RanSlice& rs) {
  for (const auto& ref : rs.cellSliceRefs)
    if (const auto* cell = m.findCell(ref.cellId))
      if (const auto* cs = cell->findSlice(ref.cellSliceId)) return cs->rst;
  return {};
}

}  // namespace

std::string toString(LcmKind k) {
  switch (k) {
    case LcmKind::Create: return "CREATE";
    case LcmKind::Modify: return "MODIFY";
    case LcmKind::Terminate: return "TERMINATE";
  }
  return "?";
}

std::string toString(LcmStatus s) {
  switch (s) {
    case LcmStatus::Pending: return "PENDING";
    case LcmStatus::Completed: return "COMPLETED";
    case LcmStatus::Failed: return "FAILED";
    case LcmStatus::RolledBack: return "ROLLED_BACK";
    case LcmStatus::PendingManual: return "PENDING_MANUAL";
  }
  return "?";
}

json LcmOperationRecord::toJson() const {
  json steps_ = json::array();
  for (const auto& s : steps) {
    json j{{"seq", s.seq}, {"step", s.step}, {"phase", s.phase}, {"outcome", s.outcome}};
    if (!s.detail.empty()) j["detail"] = s.detail;
    steps_.push_back(j);
  }
  json j{{"opId", opId},
         {"kind", toString(kind)},
         {"operation", operation},
         {"ranSliceId", ranSliceId},
         {"requestedVersion", requestedVersion},
         {"resultingVersion", resultingVersion ? json(*resultingVersion) : json(nullptr)},
         {"status", toString(status)},
         {"steps", steps_},
         {"summary", summary}};
  if (failure) j["failure"] = *failure;
  if (tick) j["tick"] = *tick;
  return j;
}

std::string nextCellSliceId(const nrm::NrCell& cell) {
  std::set<std::string> taken;
  for (const auto& cs : cell.cellSlices) taken.insert(cs.cellSliceId);
  return nextFree("CellSlice", taken);
}

json guaranteeExcess(const nrm::NrCell& cell) {
  json out = json::array();
  for (const auto& g : nrm::guaranteedSums(cell))
    if (g.guaranteedSum > 1.0 + nrm::kFeasibilityTolerance)
      out.push_back({{"flowType", codec::toJson(g.flowType)},
                     {"guaranteedSum", g.guaranteedSum},
                     {"excess", g.guaranteedSum - 1.0}});
  return out;
}

// One LCM invocation: the step log and the compensation stack.
class LifecycleManager::Run {
 public:
  Run(LifecycleManager& owner, LcmOperationRecord rec) : record(std::move(rec)), owner_(owner) {}

  /// Runs one forward step. `undo` is its inverse; `faultable` inverses are
  /// offered to the fault injector as well.
  void step(const std::string& name, const std::function<void()>& action, std::function<void()> undo = {},
            bool faultableUndo = true) {
    try {
      if (owner_.faults_) owner_.faults_(name);
      action();
    } catch (const Error& e) {
      log(name, "do", "failed", e.what());
      throw;
    }
    log(name, "do", "ok", "");
    if (undo) undo_.push_back({name, std::move(undo), faultableUndo});
  }

  /// Runs inverses in reverse order. Returns the first compensation error.
  std::optional<Error> compensate() {
    while (!undo_.empty()) {
      auto u = std::move(undo_.back());
      undo_.pop_back();
      const std::string name = "compensate:" + u.name;
      try {
        if (u.faultable && owner_.faults_) owner_.faults_(name);
        u.action();
        log(u.name, "compensate", "ok", "");
      } catch (const Error& e) {
        log(u.name, "compensate", "failed", e.what());
        return e;
      }
    }
    return std::nullopt;
  }

  bool hasCompensations() const { return !undo_.empty(); }

  LcmOperationRecord record;

 private:
  struct Undo {
    std::string name;
    std::function<void()> action;
    bool faultable;
  };

  void log(const std::string& name, const std::string& phase, const std::string& outcome, const std::string& detail) {
    record.steps.push_back({static_cast<int>(record.steps.size()) + 1, name, phase, outcome, detail});
  }

  LifecycleManager& owner_;
  std::vector<Undo> undo_;
};

LifecycleManager::LifecycleManager(nrm::ModelStore& store, infra::Infrastructure& infrastructure)
    : store_(store), infra_(infrastructure) {}

void LifecycleManager::registerTemplate(RanSliceTemplate t) {
  if (t.templateId.empty()) throw Error(ErrorCode::InvariantViolation, "templateId must not be empty");
  if (!store_.snapshot()->settings.hasRst(t.rst))
    throw Error(ErrorCode::RstUnknown, "radio slice type '" + t.rst + "' is not in the catalog", {{"rst", t.rst}});
  if (t.coverageCells.empty() && !t.coverageArea)
    throw Error(ErrorCode::InvariantViolation, t.templateId + ": coverage needs cells or an area");
  // Syntax and range check of the default AL; mbps values are checked per cell.
  codec::parseAuthorisedLoad(t.defaultAuthorisedLoad, "/authorisedLoad", codec::LoadScope::Cell, 1.0);
  std::lock_guard lock(mutex_);
  templates_[t.templateId] = std::move(t);
}

const RanSliceTemplate& LifecycleManager::findTemplate(const std::string& templateId) const {
  auto it = templates_.find(templateId);
  if (it == templates_.end())
    throw Error(ErrorCode::UnknownTemplate, "unknown template '" + templateId + "'", {{"templateId", templateId}});
  return it->second;
}

std::vector<RanSliceTemplate> LifecycleManager::templates() const {
  std::lock_guard lock(mutex_);
  std::vector<RanSliceTemplate> out;
  for (const auto& [_, t] : templates_) out.push_back(t);
  return out;
}

void LifecycleManager::defineArea(const std::string& tag, std::vector<std::string> cellIds) {
  std::lock_guard lock(mutex_);
  areas_[tag] = std::move(cellIds);
}

std::vector<LcmOperationRecord> LifecycleManager::records() const {
  std::lock_guard lock(recordsMutex_);
  return records_;
}

std::optional<LcmOperationRecord> LifecycleManager::record(const std::string& opId) const {
  std::lock_guard lock(recordsMutex_);
  for (const auto& r : records_)
    if (r.opId == opId) return r;
  return std::nullopt;
}

infra::Infrastructure LifecycleManager::infrastructureSnapshot() const {
  std::lock_guard lock(mutex_);
  return infra_;
}

LcmResult LifecycleManager::execute(LcmKind kind, const std::string& operation, const std::string& ranSliceId,
                                    const std::function<std::string(Run&)>& body) {
  LcmOperationRecord rec;
  rec.opId = "LCM#" + std::to_string(nextOp_++);
  rec.kind = kind;
  rec.operation = operation;
  rec.ranSliceId = ranSliceId;
  rec.requestedVersion = store_.version();
  rec.tick = tick_;
  Run run(*this, std::move(rec));

  std::optional<Error> error;
  std::string resultId;
  try {
    resultId = body(run);
    run.record.status = LcmStatus::Completed;
    run.record.resultingVersion = store_.version();
    if (run.record.ranSliceId.empty()) run.record.ranSliceId = resultId;
  } catch (const Error& e) {
    error = e;
  } catch (const std::exception& e) {
    error = Error(ErrorCode::InvariantViolation, std::string("internal failure: ") + e.what());
  }
  if (error) {
    const bool hadEffects = run.hasCompensations();
    if (auto compError = run.compensate()) {
      run.record.status = LcmStatus::PendingManual;
      error = Error(ErrorCode::CompensationFailed,
                    "compensation failed after '" + std::string(error->what()) + "': " + compError->what(),
                    {{"cause", error->toJson()}, {"compensationError", compError->toJson()}});
    } else {
      run.record.status = hadEffects ? LcmStatus::RolledBack : LcmStatus::Failed;
    }
    run.record.failure = error->toJson();
  }
  {
    std::lock_guard lock(recordsMutex_);
    records_.push_back(run.record);
  }
  if (listener_) listener_(run.record);
  if (error) {
    json details = error->details();
    if (!details.is_object()) details = json::object();
    details["opId"] = run.record.opId;
    details["status"] = toString(run.record.status);
    throw Error(error->code(), error->what(), details);
  }
  return {resultId, run.record};
}

std::vector<std::string> LifecycleManager::resolveCoverage(const RanSliceTemplate& t, const InstanceConfig& c) const {
  if (c.cells) return *c.cells;
  if (!t.coverageCells.empty()) return t.coverageCells;
  auto it = areas_.find(*t.coverageArea);
  if (it == areas_.end())
    throw Error(ErrorCode::InvariantViolation, "coverage area '" + *t.coverageArea + "' is not defined",
                {{"area", *t.coverageArea}});
  return it->second;
}

void LifecycleManager::enforceFeasibility(nrm::Transaction& tx, const std::vector<std::string>& cellIds,
                                          bool force) const {
  std::set<std::string> done;
  for (const auto& cellId : cellIds) {
    if (!done.insert(cellId).second) continue;
    const auto* cell = tx.model().findCell(cellId);
    if (!cell) continue;
    const json excess = guaranteeExcess(*cell);
    if (!excess.empty() && !force) {
      double worst = 0.0;
      json flowTypes = json::array();
      for (const auto& e : excess) {
        worst = std::max(worst, e["excess"].get<double>());
        flowTypes.push_back(e["flowType"]);
      }
      throw Error(ErrorCode::GuaranteeInfeasible,
                  cellId + ": guaranteed load exceeds cell capacity by " + std::to_string(worst),
                  {{"cellId", cellId}, {"flowTypes", flowTypes}, {"excess", worst}, {"perFlowType", excess}});
    }
    const bool over = !excess.empty();
    if (cell->oversubscribed != over) tx.update(*tx.model().cellDn(cellId), {{"oversubscribed", over}}, true);
  }
}

LcmResult LifecycleManager::createRsi(const std::string& templateId, const InstanceConfig& config) {
  std::lock_guard lock(mutex_);
  return execute(LcmKind::Create, "createRsi", config.ranSliceId.value_or(""), [&](Run& run) {
    const RanSliceTemplate& t = findTemplate(templateId);
    auto tx = store_.begin();
    const nrm::Model& m = tx.model();
    if (!m.settings.hasRst(t.rst))
      throw Error(ErrorCode::RstUnknown, "radio slice type '" + t.rst + "' is not in the catalog", {{"rst", t.rst}});
    if (config.networkIds.empty())
      throw Error(ErrorCode::InvariantViolation, "networkIds must not be empty", {{"ruleId", "NRM-NETWORKIDS-EMPTY"}});

    std::string id;
    if (config.ranSliceId) {
      id = *config.ranSliceId;
      if (m.findRanSlice(id))
        throw Error(ErrorCode::InvariantViolation, "RAN slice '" + id + "' already exists", {{"ranSliceId", id}});
    } else {
      std::set<std::string> taken;
      for (const auto& rs : m.subnetwork.ranSlices) taken.insert(rs.ranSliceId);
      id = nextFree("RSI", taken);
    }
    run.record.ranSliceId = id;

    const auto cells = resolveCoverage(t, config);
    if (cells.empty()) throw Error(ErrorCode::InvariantViolation, "coverage resolves to no cells");
    for (const auto& cellId : cells) {
      const auto& cell = requireCell(m, cellId);
      if (!infra_.bindingFor(cellId))
        throw Error(ErrorCode::UnservableCell, cellId + " has no NS resources bound", {{"cellId", cellId}});
      if (cell.barred) throw Error(ErrorCode::UnservableCell, cellId + " is barred", {{"cellId", cellId}});
      if (t.isolation == Isolation::DedicatedCells && !cell.cellSlices.empty())
        throw Error(ErrorCode::UnservableCell, cellId + " already hosts cell slices; template needs dedicated cells",
                    {{"cellId", cellId}});
    }

    std::vector<nrm::CellSliceRef> refs;
    for (const auto& cellId : cells) {
      run.step("nrm.createCellSlice(" + cellId + ")", [&] {
        const auto& cell = requireCell(tx.model(), cellId);
        const json* al = &t.defaultAuthorisedLoad;
        if (config.authorisedLoad) al = &*config.authorisedLoad;
        if (auto it = config.perCellAuthorisedLoad.find(cellId); it != config.perCellAuthorisedLoad.end())
          al = &it->second;
        nrm::CellSlice cs;
        cs.cellSliceId = nextCellSliceId(cell);
        cs.rst = t.rst;
        cs.networkIds = config.networkIds;
        json attrs = codec::attributes(cs);
        attrs["authorisedLoad"] = cellAl(tx.model(), cell, *al, "/authorisedLoad");
        tx.create(*tx.model().cellDn(cellId), ObjectKind::CellSlice, attrs);
        refs.push_back({cellId, cs.cellSliceId});
      }, [] {}, false);
    }

    run.step("nrm.createRanSlice", [&] {
      nrm::RanSlice rs;
      rs.ranSliceId = id;
      rs.cellSliceRefs = refs;
      rs.networkIds = config.networkIds;
      rs.authorisedLoad = t.sliceAuthorisedLoad;
      rs.plannedLoad = config.plannedLoad ? config.plannedLoad : t.plannedLoad;
      rs.targetKpis = config.targetKpis.value_or(t.targetKpis);
      tx.create(tx.model().rootDn(), ObjectKind::RanSlice, codec::attributes(rs));
    }, [] {}, false);

    run.step("feasibility.check", [&] { enforceFeasibility(tx, cells, config.force); });
    run.step("nrm.commit", [&] { store_.commit(tx, nrm::CommitPolicy::AllRules); });

    json created = json::array();
    std::vector<std::string> forced;
    for (const auto& r : refs) {
      created.push_back({{"cellId", r.cellId}, {"cellSliceId", r.cellSliceId}});
      if (const auto* c = store_.snapshot()->findCell(r.cellId); c && c->oversubscribed) forced.push_back(r.cellId);
    }
    run.record.summary = {{"ranSliceId", id}, {"cellSlices", created}, {"oversubscribedCells", forced}};
    return id;
  });
}

LcmResult LifecycleManager::modifyRsi(const std::string& ranSliceId, const ModifyDelta& delta) {
  std::lock_guard lock(mutex_);
  return execute(LcmKind::Modify, "modifyRsi", ranSliceId, [&](Run& run) {
    auto tx = store_.begin();
    const nrm::RanSlice before = requireSlice(tx.model(), ranSliceId);
    const Dn rsDn = tx.model().rootDn().child(ObjectKind::RanSlice, ranSliceId);
    std::vector<nrm::CellSliceRef> refs = before.cellSliceRefs;
    std::vector<nrm::NetworkId> networkIds = before.networkIds;
    std::vector<std::string> touched;
    json changes = json::array();

    auto refIn = [&](const std::string& cellId) -> const nrm::CellSliceRef* {
      for (const auto& r : refs)
        if (r.cellId == cellId) return &r;
      return nullptr;
    };
    auto sliceDn = [&](const nrm::CellSliceRef& r) {
      return tx.model().cellDn(r.cellId)->child(ObjectKind::CellSlice, r.cellSliceId);
    };

    for (std::size_t i = 0; i < delta.alChanges.size(); ++i) {
      const auto& change = delta.alChanges[i];
      std::vector<nrm::CellSliceRef> targets;
      if (change.cellId) {
        const auto* r = refIn(*change.cellId);
        if (!r)
          throw Error(ErrorCode::InvariantViolation, ranSliceId + " has no cell slice in " + *change.cellId,
                      {{"cellId", *change.cellId}});
        targets.push_back(*r);
      } else {
        targets = refs;
      }
      for (const auto& r : targets) {
        run.step("nrm.updateCellSlice(" + r.cellId + ")", [&] {
          const auto& cell = requireCell(tx.model(), r.cellId);
          json al = cellAl(tx.model(), cell, change.authorisedLoad, "/alChanges/" + std::to_string(i) + "/authorisedLoad");
          tx.update(sliceDn(r), {{"authorisedLoad", al}});
          changes.push_back({{"change", "authorisedLoad"}, {"cellId", r.cellId}, {"cellSliceId", r.cellSliceId},
                             {"authorisedLoad", al}});
        }, [] {}, false);
        touched.push_back(r.cellId);
      }
    }

    if (delta.sliceAuthorisedLoad) {
      run.step("nrm.updateRanSlice(authorisedLoad)", [&] {
        tx.update(rsDn, {{"authorisedLoad", codec::toJson(*delta.sliceAuthorisedLoad)}});
        changes.push_back({{"change", "sliceAuthorisedLoad"}});
      }, [] {}, false);
    }

    if (!delta.addNetworkIds.empty() || !delta.removeNetworkIds.empty()) {
      for (const auto& id : delta.removeNetworkIds) std::erase(networkIds, id);
      for (const auto& id : delta.addNetworkIds)
        if (std::find(networkIds.begin(), networkIds.end(), id) == networkIds.end()) networkIds.push_back(id);
      run.step("nrm.updateNetworkIds", [&] {
        for (const auto& r : refs) {
          const auto* cs = tx.model().findCell(r.cellId)->findSlice(r.cellSliceId);
          auto ids = cs->networkIds;
          for (const auto& id : delta.removeNetworkIds) std::erase(ids, id);
          for (const auto& id : delta.addNetworkIds)
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
          tx.update(sliceDn(r), {{"networkIds", networkIdsJson(ids)}});
        }
        tx.update(rsDn, {{"networkIds", networkIdsJson(networkIds)}});
        changes.push_back({{"change", "networkIds"}, {"networkIds", networkIdsJson(networkIds)}});
      }, [] {}, false);
    }

    for (const auto& cellId : delta.removeCells) {
      const auto* r = refIn(cellId);
      if (!r)
        throw Error(ErrorCode::InvariantViolation, ranSliceId + " has no cell slice in " + cellId, {{"cellId", cellId}});
      const auto ref = *r;
      run.step("nrm.deleteCellSlice(" + cellId + ")", [&] {
        tx.remove(sliceDn(ref));
        std::erase(refs, ref);
        changes.push_back({{"change", "removeCellSlice"}, {"cellId", ref.cellId}, {"cellSliceId", ref.cellSliceId}});
      }, [] {}, false);
      touched.push_back(cellId);
    }

    const std::string defaultRst = rstOf(tx.model(), before);
    for (std::size_t i = 0; i < delta.addCellSlices.size(); ++i) {
      const auto& add = delta.addCellSlices[i];
      requireCell(tx.model(), add.cellId);
      if (!infra_.bindingFor(add.cellId))
        throw Error(ErrorCode::UnservableCell, add.cellId + " has no NS resources bound", {{"cellId", add.cellId}});
      if (refIn(add.cellId))
        throw Error(ErrorCode::InvariantViolation, ranSliceId + " already has a cell slice in " + add.cellId,
                    {{"cellId", add.cellId}});
      const std::string rst = add.rst.value_or(defaultRst);
      if (!tx.model().settings.hasRst(rst))
        throw Error(ErrorCode::RstUnknown, "radio slice type '" + rst + "' is not in the catalog", {{"rst", rst}});
      run.step("nrm.createCellSlice(" + add.cellId + ")", [&] {
        const auto& cell = requireCell(tx.model(), add.cellId);
        nrm::CellSlice cs;
        cs.cellSliceId = nextCellSliceId(cell);
        cs.rst = rst;
        cs.networkIds = networkIds;
        json attrs = codec::attributes(cs);
        attrs["authorisedLoad"] =
            cellAl(tx.model(), cell, add.authorisedLoad, "/addCellSlices/" + std::to_string(i) + "/authorisedLoad");
        tx.create(*tx.model().cellDn(add.cellId), ObjectKind::CellSlice, attrs);
        refs.push_back({add.cellId, cs.cellSliceId});
        changes.push_back({{"change", "addCellSlice"}, {"cellId", add.cellId}, {"cellSliceId", cs.cellSliceId}});
      }, [] {}, false);
      touched.push_back(add.cellId);
    }

    json rsPatch = json::object();
    if (refs != before.cellSliceRefs) rsPatch["cellSliceRefs"] = refsJson(refs);
    if (delta.targetKpis) {
      json k = json::array();
      for (const auto& t : *delta.targetKpis) k.push_back(codec::toJson(t));
      rsPatch["targetKpis"] = k;
      changes.push_back({{"change", "targetKpis"}});
    }
    if (delta.plannedLoad) {
      json p = json::array();
      for (const auto& item : *delta.plannedLoad) p.push_back(codec::toJson(item));
      rsPatch["plannedLoad"] = p;
      changes.push_back({{"change", "plannedLoad"}});
    }
    if (!rsPatch.empty()) run.step("nrm.updateRanSlice", [&] { tx.update(rsDn, rsPatch); }, [] {}, false);

    run.step("feasibility.check", [&] { enforceFeasibility(tx, touched, delta.force); });
    run.step("nrm.commit", [&] { store_.commit(tx, nrm::CommitPolicy::AllRules); });
    run.record.summary = {{"ranSliceId", ranSliceId}, {"changes", changes}};
    return ranSliceId;
  });
}

LcmResult LifecycleManager::scaleRsiCapacity(const std::string& ranSliceId, const std::optional<CellPlan>& plan) {
  std::lock_guard lock(mutex_);
  return execute(LcmKind::Modify, "scaleRsiCapacity", ranSliceId, [&](Run& run) {
    auto tx = store_.begin();
    const nrm::RanSlice rs = requireSlice(tx.model(), ranSliceId);
    CellPlan p = plan ? *plan : derivePlan(ranSliceId);
    if (p.servingVnfId.empty() && p.addVnf) p.servingVnfId = p.addVnf->vnfId;
    if (p.cellId.empty()) throw Error(ErrorCode::InvariantViolation, "cell plan needs a cellId");
    if (tx.model().findCell(p.cellId))
      throw Error(ErrorCode::InvariantViolation, "cell '" + p.cellId + "' already exists", {{"cellId", p.cellId}});
    if (!infra_.findInstance(p.nsInstanceId))
      throw Error(ErrorCode::UnknownNsInstance, "unknown NS instance '" + p.nsInstanceId + "'",
                  {{"nsInstanceId", p.nsInstanceId}});
    const std::string rst = p.rst.value_or(rstOf(tx.model(), rs));
    if (!tx.model().settings.hasRst(rst))
      throw Error(ErrorCode::RstUnknown, "radio slice type '" + rst + "' is not in the catalog", {{"rst", rst}});
    std::vector<nrm::PlmnId> plmns = p.plmns;
    if (plmns.empty())
      for (const auto& id : rs.networkIds)
        if (std::find(plmns.begin(), plmns.end(), id.plmn) == plmns.end()) plmns.push_back(id.plmn);

    if (p.addVnf) {
      const std::string ns = p.nsInstanceId;
      const std::string vnf = p.addVnf->vnfId;
      run.step("infra.scaleNs", [&] { infra_.scaleNs(ns, {*p.addVnf, p.newLinks}); },
               [this, ns, vnf] { infra_.scaleIn(ns, vnf); });
    }
    const std::string cellId = p.cellId;
    run.step("infra.bindCellResources",
             [&] {
               infra_.bindCellResources(p.cellId, p.nsInstanceId, p.rrhId, p.band, p.channelBandwidthMHz,
                                        p.servingVnfId.empty() ? std::nullopt : std::optional(p.servingVnfId));
             },
             [this, cellId] { infra_.releaseCellResources(cellId); });
    const std::string servingId = infra_.bindingFor(p.cellId)->servingVnfId;

    run.step("nrm.createCell", [&] {
      const nrm::Model& m = tx.model();
      const auto* ns = infra_.findInstance(p.nsInstanceId);
      const auto* vnf = ns->findVnf(servingId);
      Dn fnDn;
      if (const auto* me = ownerElement(m, servingId)) {
        fnDn = m.rootDn().child(ObjectKind::ManagedElement, me->id).child(ObjectKind::GnbFunction, servingId);
      } else {
        const std::string meId = p.managedElementId.empty() ? "ME-" + vnf->popId : p.managedElementId;
        Dn meDn = m.rootDn().child(ObjectKind::ManagedElement, meId);
        if (!m.findManagedElement(meId)) tx.create(m.rootDn(), ObjectKind::ManagedElement, {{"id", meId}});
        json fn{{"id", servingId}, {"kind", nrm::toString(vnf->kind)}};
        if (vnf->kind == infra::VnfKind::GnbDu)
          for (const auto& v : ns->vnfInstances)
            if (v.kind == infra::VnfKind::GnbCu) {
              fn["cuRef"] = v.vnfInstanceId;
              break;
            }
        fnDn = tx.create(meDn, ObjectKind::GnbFunction, fn);
      }
      nrm::NrCell cell;
      cell.cellId = p.cellId;
      cell.band = p.band;
      cell.channelBandwidthMHz = p.channelBandwidthMHz;
      cell.txPowerDbm = p.txPowerDbm;
      for (const auto& plmn : plmns) cell.plmnList.push_back({plmn, {nrm::ExposedService::PM, nrm::ExposedService::FM}});
      cell.nsdRef = ns->nsdRef;
      cell.sectorEquipmentRefs = {p.rrhId};
      tx.create(fnDn, ObjectKind::NrCell, codec::attributes(cell));
    }, [] {}, false);

    std::string cellSliceId;
    run.step("nrm.createCellSlice(" + p.cellId + ")", [&] {
      const auto& cell = requireCell(tx.model(), p.cellId);
      nrm::CellSlice cs;
      cs.cellSliceId = nextCellSliceId(cell);
      cs.rst = rst;
      cs.networkIds = rs.networkIds;
      json attrs = codec::attributes(cs);
      attrs["authorisedLoad"] = cellAl(tx.model(), cell, p.authorisedLoad, "/authorisedLoad");
      tx.create(*tx.model().cellDn(p.cellId), ObjectKind::CellSlice, attrs);
      cellSliceId = cs.cellSliceId;
      auto refs = rs.cellSliceRefs;
      refs.push_back({p.cellId, cs.cellSliceId});
      tx.update(tx.model().rootDn().child(ObjectKind::RanSlice, ranSliceId), {{"cellSliceRefs", refsJson(refs)}});
    }, [] {}, false);

    run.step("feasibility.check", [&] { enforceFeasibility(tx, {p.cellId}, false); });
    run.step("nrm.commit", [&] { store_.commit(tx, nrm::CommitPolicy::AllRules); });

    const auto* vnf = infra_.findInstance(p.nsInstanceId)->findVnf(servingId);
    run.record.summary = {{"ranSliceId", ranSliceId},
                          {"cellId", p.cellId},
                          {"cellSliceId", cellSliceId},
                          {"band", p.band},
                          {"channelBandwidthMHz", p.channelBandwidthMHz},
                          {"rrhId", p.rrhId},
                          {"nsInstanceId", p.nsInstanceId},
                          {"servingVnfId", servingId},
                          {"servingPopId", vnf ? vnf->popId : ""},
                          {"addedVnf", p.addVnf ? json(p.addVnf->vnfId) : json(nullptr)}};
    return ranSliceId;
  });
}

LcmResult LifecycleManager::terminateRsi(const std::string& ranSliceId, bool releaseDedicatedResources) {
  std::lock_guard lock(mutex_);
  return execute(LcmKind::Terminate, "terminateRsi", ranSliceId, [&](Run& run) {
    auto tx = store_.begin();
    const nrm::RanSlice rs = requireSlice(tx.model(), ranSliceId);
    // Infrastructure changes are staged on a copy and land with the commit.
    infra::Infrastructure next = infra_;
    json removedSlices = json::array(), deletedCells = json::array(), terminated = json::array();

    for (const auto& ref : rs.cellSliceRefs) {
      run.step("nrm.deleteCellSlice(" + ref.cellId + ")", [&] {
        if (auto dn = tx.model().cellDn(ref.cellId); dn && tx.model().findCell(ref.cellId)->findSlice(ref.cellSliceId))
          tx.remove(dn->child(ObjectKind::CellSlice, ref.cellSliceId));
        removedSlices.push_back({{"cellId", ref.cellId}, {"cellSliceId", ref.cellSliceId}});
      }, [] {}, false);
    }
    run.step("nrm.deleteRanSlice", [&] { tx.remove(tx.model().rootDn().child(ObjectKind::RanSlice, ranSliceId)); },
             [] {}, false);

    std::set<std::string> nsTouched;
    std::vector<std::string> survivors;
    for (const auto& ref : rs.cellSliceRefs) {
      const auto* cell = tx.model().findCell(ref.cellId);
      if (!cell) continue;
      if (!cell->cellSlices.empty()) {
        survivors.push_back(ref.cellId);
        continue;
      }
      run.step("nrm.deleteCell(" + ref.cellId + ")", [&] {
        tx.remove(*tx.model().cellDn(ref.cellId));
        // Planned-load weights of other slices must not dangle.
        for (const auto& other : tx.model().subnetwork.ranSlices) {
          if (!other.plannedLoad) continue;
          auto items = *other.plannedLoad;
          bool changed = false;
          for (auto& item : items) changed |= item.cellWeights.erase(ref.cellId) > 0;
          if (!changed) continue;
          json arr = json::array();
          for (const auto& item : items) arr.push_back(codec::toJson(item));
          tx.update(tx.model().rootDn().child(ObjectKind::RanSlice, other.ranSliceId), {{"plannedLoad", arr}});
        }
        deletedCells.push_back(ref.cellId);
      }, [] {}, false);
      if (const auto* b = next.bindingFor(ref.cellId)) {
        nsTouched.insert(b->nsInstanceId);
        run.step("infra.releaseCellResources(" + ref.cellId + ")", [&] { next.releaseCellResources(ref.cellId); },
                 [] {}, false);
      }
    }

    if (releaseDedicatedResources) {
      for (const auto& nsId : nsTouched) {
        if (!next.cellsUsing(nsId).empty()) continue;
        std::vector<std::string> vnfs;
        for (const auto& v : next.findInstance(nsId)->vnfInstances) vnfs.push_back(v.vnfInstanceId);
        run.step("infra.terminateNs(" + nsId + ")", [&] { next.terminateNs(nsId); }, [] {}, false);
        run.step("nrm.deleteFunctions(" + nsId + ")", [&] {
          for (const auto& vnfId : vnfs) {
            const auto* me = ownerElement(tx.model(), vnfId);
            if (!me) continue;
            const std::string meId = me->id;
            const Dn meDn = tx.model().rootDn().child(ObjectKind::ManagedElement, meId);
            const auto* fn = tx.model().findFunction(vnfId);
            if (!fn->cells.empty()) continue;
            tx.remove(meDn.child(ObjectKind::GnbFunction, vnfId));
            if (tx.model().findManagedElement(meId)->functions.empty()) tx.remove(meDn);
          }
        }, [] {}, false);
        terminated.push_back(nsId);
      }
    }

    run.step("feasibility.check", [&] { enforceFeasibility(tx, survivors, true); });
    run.step("nrm.commit", [&] { store_.commit(tx, nrm::CommitPolicy::AllRules); });
    infra_ = std::move(next);
    run.record.summary = {{"ranSliceId", ranSliceId},
                          {"removedCellSlices", removedSlices},
                          {"deletedCells", deletedCells},
                          {"terminatedNsInstances", terminated}};
    return ranSliceId;
  });
}

CellPlan LifecycleManager::derivePlan(const std::string& ranSliceId) const {
  auto snap = store_.snapshot();
  const nrm::Model& m = *snap;
  const auto& rs = requireSlice(m, ranSliceId);
  if (!rs.plannedLoad || rs.plannedLoad->empty())
    throw Error(ErrorCode::InvariantViolation, ranSliceId + " has no planned load to derive a cell plan from",
                {{"ranSliceId", ranSliceId}});
  double demand = 0.0;
  for (const auto& item : *rs.plannedLoad) demand += item.expectedMbps;
  // Current supply: guaranteed share of each cell, or an equal split when
  // the slice has no guarantee there.
  double supply = 0.0;
  std::string nsId;
  for (const auto& ref : rs.cellSliceRefs) {
    const auto* cell = m.findCell(ref.cellId);
    const auto* cs = cell ? cell->findSlice(ref.cellSliceId) : nullptr;
    if (!cs) continue;
    double share = 0.0;
    for (const auto& e : cs->authorisedLoad) share = std::max(share, e.guaranteedLoad.value_or(0.0));
    if (share == 0.0) share = 1.0 / static_cast<double>(cell->cellSlices.size());
    supply += share * m.cellCapacityMbps(*cell);
    if (nsId.empty())
      if (const auto* b = infra_.bindingFor(ref.cellId)) nsId = b->nsInstanceId;
  }
  const double deficit = demand - supply;
  if (deficit <= 0)
    throw Error(ErrorCode::InvariantViolation,
                ranSliceId + " planned load " + std::to_string(demand) + " Mbps is already covered by " +
                    std::to_string(supply) + " Mbps",
                {{"demandMbps", demand}, {"supplyMbps", supply}});
  if (nsId.empty()) throw Error(ErrorCode::UnservableCell, ranSliceId + " has no cell bound to an NS instance");
  const auto& ns = *infra_.findInstance(nsId);

  static const double kBandwidths[] = {5, 10, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100};
  double bw = 100;
  for (double b : kBandwidths)
    if (b * m.settings.spectralEfficiency >= deficit) {
      bw = b;
      break;
    }

  int maxVnf = 0;
  for (const auto& [_, inst] : infra_.instances())
    for (const auto& v : inst.vnfInstances) maxVnf = std::max(maxVnf, trailingNumber(v.vnfInstanceId));
  int maxCell = 0;
  for (const auto* c : m.cells()) maxCell = std::max(maxCell, trailingNumber(c->cellId));

  int dus = 0;
  for (const auto& v : ns.vnfInstances) dus += v.kind == infra::VnfKind::GnbDu;
  int duLimit = dus;
  for (const auto& r : ns.descriptor.scalingRules)
    if (r.kind == infra::VnfKind::GnbDu) duLimit = r.maxInstances;
  std::string cu;
  for (const auto& v : ns.vnfInstances)
    if (v.kind == infra::VnfKind::GnbCu) cu = v.vnfInstanceId;

  for (const auto& rrh : infra_.rrhs()) {
    if (infra_.usedCarriers(rrh.rrhId) >= rrh.maxCarriers) continue;
    std::set<std::string> usedBands;
    for (const auto& [_, b] : infra_.bindings())
      if (b.rrhId == rrh.rrhId) usedBands.insert(b.band);
    std::string band;
    for (const auto& b : rrh.supportedBands)
      if (!usedBands.count(b)) {
        band = b;
        break;
      }
    if (band.empty()) continue;

    CellPlan plan;
    plan.nsInstanceId = nsId;
    plan.cellId = "NRCell#" + std::to_string(maxCell + 1);
    plan.band = band;
    plan.channelBandwidthMHz = bw;
    plan.rrhId = rrh.rrhId;
    const double linkMbps = bw * m.settings.spectralEfficiency;
    const int duUnits = infra_.computeDefaults().forKind(infra::VnfKind::GnbDu);
    if (!cu.empty() && dus < duLimit && infra_.freeCapacity(rrh.sitePopId) >= duUnits) {
      infra::VnfProfile du;
      du.vnfId = "gNB-DU#" + std::to_string(maxVnf + 1);
      du.kind = infra::VnfKind::GnbDu;
      du.placementConstraint = rrh.sitePopId;
      plan.addVnf = du;
      plan.newLinks = {{rrh.rrhId, du.vnfId, linkMbps}, {du.vnfId, cu, linkMbps}};
      plan.servingVnfId = du.vnfId;
      return plan;
    }
    for (const auto& v : ns.vnfInstances)
      if ((v.kind == infra::VnfKind::GnbDu || v.kind == infra::VnfKind::Gnb) && v.popId == rrh.sitePopId) {
        plan.servingVnfId = v.vnfInstanceId;
        return plan;
      }
  }
  throw Error(ErrorCode::UnservableCell, "no RRH with a free carrier and a servable band for " + ranSliceId,
              {{"ranSliceId", ranSliceId}, {"deficitMbps", deficit}});
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::vector<nrm::TargetKpi> parseKpis(const json& v, const std::string& path) {
  requireArray(v, path);
  std::vector<nrm::TargetKpi> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(codec::parseTargetKpi(v[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<nrm::PlannedLoadItem> parsePlanned(const json& v, const std::string& path) {
  requireArray(v, path);
  std::vector<nrm::PlannedLoadItem> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(codec::parsePlannedLoadItem(v[i], path + "/" + std::to_string(i)));
  return out;
}

json checkedCellAl(const json& v, const std::string& path) {
  requireArray(v, path);
  return v;
}

}  // namespace

RanSliceTemplate parseTemplate(const json& j, const std::string& path) {
  JsonReader r(j, path);
  RanSliceTemplate t;
  t.templateId = r.req<std::string>("templateId");
  t.rst = r.req<std::string>("rst");
  {
    JsonReader c(r.raw("coverage"), r.pathOf("coverage"));
    t.coverageCells = c.get<std::vector<std::string>>("cells", {});
    t.coverageArea = c.opt<std::string>("area");
    c.finish();
  }
  if (const json* v = r.rawOpt("authorisedLoad")) t.defaultAuthorisedLoad = checkedCellAl(*v, r.pathOf("authorisedLoad"));
  if (const json* v = r.rawOpt("sliceAuthorisedLoad"))
    t.sliceAuthorisedLoad = codec::parseAuthorisedLoad(*v, r.pathOf("sliceAuthorisedLoad"), codec::LoadScope::Slice);
  if (const json* v = r.rawOpt("plannedLoad")) t.plannedLoad = parsePlanned(*v, r.pathOf("plannedLoad"));
  if (const json* v = r.rawOpt("targetKpis")) t.targetKpis = parseKpis(*v, r.pathOf("targetKpis"));
  if (auto iso = r.opt<std::string>("isolation")) {
    if (*iso == "sharedCells") t.isolation = Isolation::SharedCells;
    else if (*iso == "dedicatedCells") t.isolation = Isolation::DedicatedCells;
    else parseError(r.pathOf("isolation"), "expected 'sharedCells' or 'dedicatedCells'");
  }
  r.finish();
  return t;
}

json toJson(const RanSliceTemplate& t) {
  json coverage = json::object();
  if (!t.coverageCells.empty()) coverage["cells"] = t.coverageCells;
  if (t.coverageArea) coverage["area"] = *t.coverageArea;
  json kpis = json::array();
  for (const auto& k : t.targetKpis) kpis.push_back(codec::toJson(k));
  json j{{"templateId", t.templateId},
         {"rst", t.rst},
         {"coverage", coverage},
         {"authorisedLoad", t.defaultAuthorisedLoad},
         {"sliceAuthorisedLoad", codec::toJson(t.sliceAuthorisedLoad)},
         {"targetKpis", kpis},
         {"isolation", t.isolation == Isolation::SharedCells ? "sharedCells" : "dedicatedCells"}};
  if (t.plannedLoad) {
    json p = json::array();
    for (const auto& item : *t.plannedLoad) p.push_back(codec::toJson(item));
    j["plannedLoad"] = p;
  }
  return j;
}

InstanceConfig parseInstanceConfig(const json& j, const std::string& path) {
  JsonReader r(j, path);
  InstanceConfig c;
  c.ranSliceId = r.opt<std::string>("ranSliceId");
  c.networkIds = codec::parseNetworkIds(r.raw("networkIds"), r.pathOf("networkIds"));
  if (const json* v = r.rawOpt("authorisedLoad")) c.authorisedLoad = checkedCellAl(*v, r.pathOf("authorisedLoad"));
  if (const json* v = r.rawOpt("perCellAuthorisedLoad")) {
    if (!v->is_object()) parseError(r.pathOf("perCellAuthorisedLoad"), "expected object keyed by cellId");
    for (const auto& [cell, al] : v->items())
      c.perCellAuthorisedLoad[cell] = checkedCellAl(al, r.pathOf("perCellAuthorisedLoad") + "/" + cell);
  }
  c.cells = r.opt<std::vector<std::string>>("cells");
  if (const json* v = r.rawOpt("targetKpis")) c.targetKpis = parseKpis(*v, r.pathOf("targetKpis"));
  if (const json* v = r.rawOpt("plannedLoad")) c.plannedLoad = parsePlanned(*v, r.pathOf("plannedLoad"));
  c.force = r.get<bool>("force", false);
  r.finish();
  return c;
}

ModifyDelta parseModifyDelta(const json& j, const std::string& path) {
  JsonReader r(j, path);
  ModifyDelta d;
  if (const json* v = r.rawOpt("alChanges")) {
    requireArray(*v, r.pathOf("alChanges"));
    for (std::size_t i = 0; i < v->size(); ++i) {
      JsonReader cr((*v)[i], r.pathOf("alChanges") + "/" + std::to_string(i));
      AlChange c;
      c.cellId = cr.opt<std::string>("cellId");
      c.authorisedLoad = checkedCellAl(cr.raw("authorisedLoad"), cr.pathOf("authorisedLoad"));
      cr.finish();
      d.alChanges.push_back(c);
    }
  }
  if (const json* v = r.rawOpt("sliceAuthorisedLoad"))
    d.sliceAuthorisedLoad = codec::parseAuthorisedLoad(*v, r.pathOf("sliceAuthorisedLoad"), codec::LoadScope::Slice);
  if (const json* v = r.rawOpt("addCellSlices")) {
    requireArray(*v, r.pathOf("addCellSlices"));
    for (std::size_t i = 0; i < v->size(); ++i) {
      JsonReader ar((*v)[i], r.pathOf("addCellSlices") + "/" + std::to_string(i));
      AddCellSlice a;
      a.cellId = ar.req<std::string>("cellId");
      a.rst = ar.opt<std::string>("rst");
      if (const json* al = ar.rawOpt("authorisedLoad")) a.authorisedLoad = checkedCellAl(*al, ar.pathOf("authorisedLoad"));
      ar.finish();
      d.addCellSlices.push_back(a);
    }
  }
  d.removeCells = r.get<std::vector<std::string>>("removeCellSlices", {});
  if (const json* v = r.rawOpt("networkIdChanges")) {
    JsonReader nr(*v, r.pathOf("networkIdChanges"));
    if (const json* a = nr.rawOpt("add")) d.addNetworkIds = codec::parseNetworkIds(*a, nr.pathOf("add"));
    if (const json* rm = nr.rawOpt("remove")) d.removeNetworkIds = codec::parseNetworkIds(*rm, nr.pathOf("remove"));
    nr.finish();
  }
  if (const json* v = r.rawOpt("targetKpis")) d.targetKpis = parseKpis(*v, r.pathOf("targetKpis"));
  if (const json* v = r.rawOpt("plannedLoad")) d.plannedLoad = parsePlanned(*v, r.pathOf("plannedLoad"));
  d.force = r.get<bool>("force", false);
  r.finish();
  return d;
}

CellPlan parseCellPlan(const json& j, const std::string& path) {
  JsonReader r(j, path);
  CellPlan p;
  p.nsInstanceId = r.req<std::string>("nsInstanceId");
  if (const json* v = r.rawOpt("addVnf")) p.addVnf = infra::parseVnfProfile(*v, r.pathOf("addVnf"));
  if (const json* v = r.rawOpt("newLinks")) {
    requireArray(*v, r.pathOf("newLinks"));
    for (std::size_t i = 0; i < v->size(); ++i)
      p.newLinks.push_back(infra::parseVirtualLink((*v)[i], r.pathOf("newLinks") + "/" + std::to_string(i)));
  }
  p.servingVnfId = r.get<std::string>("servingVnfId", "");
  p.managedElementId = r.get<std::string>("managedElementId", "");
  p.cellId = r.req<std::string>("cellId");
  p.band = r.req<std::string>("band");
  p.channelBandwidthMHz = r.req<double>("channelBandwidthMHz");
  p.rrhId = r.req<std::string>("rrhId");
  p.txPowerDbm = r.get<double>("txPowerDbm", 0.0);
  if (const json* v = r.rawOpt("plmns")) {
    requireArray(*v, r.pathOf("plmns"));
    for (std::size_t i = 0; i < v->size(); ++i)
      p.plmns.push_back(codec::parsePlmnId((*v)[i], r.pathOf("plmns") + "/" + std::to_string(i)));
  }
  p.rst = r.opt<std::string>("rst");
  if (const json* v = r.rawOpt("authorisedLoad")) p.authorisedLoad = checkedCellAl(*v, r.pathOf("authorisedLoad"));
  r.finish();
  return p;
}

}  // namespace ranslice::lifecycle
