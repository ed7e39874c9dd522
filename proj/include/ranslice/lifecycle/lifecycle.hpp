#pragma once

// RAN slice instance (RSI) lifecycle management: template-driven creation,
// modification, capacity scale-out and termination. Model changes go through
// one transaction per operation; infrastructure steps of a scale-out run as
// a saga with compensations.

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ranslice/infra/infrastructure.hpp"
#include "ranslice/nrm/store.hpp"

namespace ranslice::lifecycle {

enum class Isolation { SharedCells, DedicatedCells };

struct RanSliceTemplate {
  std::string templateId;
  std::string rst;
  std::vector<std::string> coverageCells;
  std::optional<std::string> coverageArea;  // resolved through registered areas
  json defaultAuthorisedLoad = json::array();  // cell scope, parsed per cell
  nrm::AuthorisedLoad sliceAuthorisedLoad;     // absolute Mbps
  std::optional<std::vector<nrm::PlannedLoadItem>> plannedLoad;
  std::vector<nrm::TargetKpi> targetKpis;
  Isolation isolation = Isolation::SharedCells;
};

struct InstanceConfig {
  std::optional<std::string> ranSliceId;
  std::vector<nrm::NetworkId> networkIds;
  std::optional<json> authorisedLoad;           // replaces the template default on every cell
  std::map<std::string, json> perCellAuthorisedLoad;
  std::optional<std::vector<std::string>> cells;  // replaces the template coverage
  std::optional<std::vector<nrm::TargetKpi>> targetKpis;
  std::optional<std::vector<nrm::PlannedLoadItem>> plannedLoad;
  bool force = false;
};

struct AlChange {
  std::optional<std::string> cellId;  // absent: every cell slice of the RSI
  json authorisedLoad;
};

struct AddCellSlice {
  std::string cellId;
  std::optional<std::string> rst;  // defaults to the RSI's existing RST
  json authorisedLoad = json::array();
};

struct ModifyDelta {
  std::vector<AlChange> alChanges;
  std::optional<nrm::AuthorisedLoad> sliceAuthorisedLoad;
  std::vector<AddCellSlice> addCellSlices;
  std::vector<std::string> removeCells;  // cell ids whose RSI cell slice goes
  std::vector<nrm::NetworkId> addNetworkIds;
  std::vector<nrm::NetworkId> removeNetworkIds;
  std::optional<std::vector<nrm::TargetKpi>> targetKpis;
  std::optional<std::vector<nrm::PlannedLoadItem>> plannedLoad;
  bool force = false;
};

struct CellPlan {
  std::string nsInstanceId;
  std::optional<infra::VnfProfile> addVnf;  // NS scaling step, if any
  std::vector<infra::VirtualLink> newLinks;
  std::string servingVnfId;
  std::string managedElementId;  // created when missing
  std::string cellId;
  std::string band;
  double channelBandwidthMHz = 0.0;
  std::string rrhId;
  double txPowerDbm = 0.0;
  std::vector<nrm::PlmnId> plmns;  // defaults to the RSI's PLMNs
  std::optional<std::string> rst;
  json authorisedLoad = json::array();
};

enum class LcmKind { Create, Modify, Terminate };
enum class LcmStatus { Pending, Completed, Failed, RolledBack, PendingManual };

struct StepEntry {
  int seq = 0;
  std::string step;
  std::string phase;    // do | compensate
  std::string outcome;  // ok | failed
  std::string detail;
};

struct LcmOperationRecord {
  std::string opId;
  LcmKind kind = LcmKind::Create;
  std::string operation;  // createRsi | modifyRsi | scaleRsiCapacity | terminateRsi
  std::string ranSliceId;
  std::uint64_t requestedVersion = 0;
  std::optional<std::uint64_t> resultingVersion;
  LcmStatus status = LcmStatus::Pending;
  std::optional<json> failure;  // Error::toJson()
  std::vector<StepEntry> steps;
  json summary = json::object();
  std::optional<std::int64_t> tick;

  json toJson() const;
};

/// Called before each step, with the step name; compensation steps are
/// named "compensate:<step>". Throwing aborts the step.
using FaultInjector = std::function<void(const std::string& step)>;
using RecordListener = std::function<void(const LcmOperationRecord&)>;

/// Result of a successful LCM call. A failed call still appends its record,
/// then throws; the error details carry the opId.
struct LcmResult {
  std::string ranSliceId;
  LcmOperationRecord record;
};

class LifecycleManager {
 public:
  LifecycleManager(nrm::ModelStore& store, infra::Infrastructure& infrastructure);

  void registerTemplate(RanSliceTemplate t);
  const RanSliceTemplate& findTemplate(const std::string& templateId) const;
  std::vector<RanSliceTemplate> templates() const;
  void defineArea(const std::string& tag, std::vector<std::string> cellIds);

  LcmResult createRsi(const std::string& templateId, const InstanceConfig& config);
  LcmResult modifyRsi(const std::string& ranSliceId, const ModifyDelta& delta);
  LcmResult scaleRsiCapacity(const std::string& ranSliceId, const std::optional<CellPlan>& plan);
  LcmResult terminateRsi(const std::string& ranSliceId, bool releaseDedicatedResources);

  /// Plan derived from the RSI's planned load when none is supplied.
  CellPlan derivePlan(const std::string& ranSliceId) const;

  std::vector<LcmOperationRecord> records() const;
  std::optional<LcmOperationRecord> record(const std::string& opId) const;

  void setFaultInjector(FaultInjector f) { faults_ = std::move(f); }
  void setRecordListener(RecordListener l) { listener_ = std::move(l); }
  void setTick(std::optional<std::int64_t> tick) { tick_ = tick; }

  /// Serializes access to the infrastructure; LCM calls take it internally.
  std::mutex& mutex() const { return mutex_; }
  infra::Infrastructure infrastructureSnapshot() const;

 private:
  class Run;

  LcmResult execute(LcmKind kind, const std::string& operation, const std::string& ranSliceId,
                    const std::function<std::string(Run&)>& body);
  std::vector<std::string> resolveCoverage(const RanSliceTemplate& t, const InstanceConfig& c) const;
  void enforceFeasibility(nrm::Transaction& tx, const std::vector<std::string>& cellIds, bool force) const;

  nrm::ModelStore& store_;
  infra::Infrastructure& infra_;
  std::map<std::string, RanSliceTemplate> templates_;
  std::map<std::string, std::vector<std::string>> areas_;
  std::vector<LcmOperationRecord> records_;
  FaultInjector faults_;
  RecordListener listener_;
  std::optional<std::int64_t> tick_;
  int nextOp_ = 1;
  mutable std::mutex mutex_;
  mutable std::mutex recordsMutex_;
};

std::string toString(LcmKind k);
std::string toString(LcmStatus s);

/// Next free "CellSlice#n" in a cell.
std::string nextCellSliceId(const nrm::NrCell& cell);

/// Flow types whose guaranteed sum in the cell exceeds 1.0, with the excess.
/// Empty array when the cell is feasible.
json guaranteeExcess(const nrm::NrCell& cell);

RanSliceTemplate parseTemplate(const json& j, const std::string& path);
json toJson(const RanSliceTemplate& t);
InstanceConfig parseInstanceConfig(const json& j, const std::string& path);
ModifyDelta parseModifyDelta(const json& j, const std::string& path);
CellPlan parseCellPlan(const json& j, const std::string& path);

}  // namespace ranslice::lifecycle
