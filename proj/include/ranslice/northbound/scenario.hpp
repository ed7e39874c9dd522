#pragma once

// Scenario files: infrastructure, deployed network services, initial model,
// templates, offered load and a timeline of management events.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranslice/enforcement/simulator.hpp"
#include "ranslice/infra/infrastructure.hpp"
#include "ranslice/lifecycle/lifecycle.hpp"

namespace ranslice::northbound {

struct NsInstanceSpec {
  std::string nsdId;
  std::string nsInstanceId;
  infra::PlacementHints placement;
};

/// Binds an initial-model cell to carrier resources. Band and bandwidth
/// come from the cell; the serving VNF defaults to the cell's function.
struct CellBindingSpec {
  std::string cellId;
  std::string nsInstanceId;
  std::string rrhId;
  std::optional<std::string> servingVnfId;
};

enum class EventAction { LcmOperation, UpdateManagedObject, DegradeCell, RestoreCell, EndSimulation };

struct TimelineEvent {
  std::int64_t tick = 0;
  EventAction action = EventAction::LcmOperation;
  // lcmOperation
  std::string operation;
  std::string ranSliceId;
  json request = json::object();
  // updateManagedObject
  std::string dn;
  json deltas = json::object();
  // degradeCell / restoreCell
  std::string cellId;
  double factor = 1.0;

  json toJson() const;
};

struct KpiWindowSpec {
  std::string label;
  std::string ranSliceId;
  std::int64_t startTick = 0;
  std::int64_t endTick = 0;
};

struct Scenario {
  std::string name;
  enforcement::SimConfig sim;
  double spectralEfficiency = 5.0;
  std::vector<std::string> rstCatalog{"eMBB", "URLLC", "mMTC"};
  bool continueOnError = false;
  std::int64_t startTick = 0;

  std::vector<infra::Pop> pops;
  std::vector<infra::Rrh> rrhs;
  infra::ComputeDefaults computeDefaults;
  std::vector<infra::Nsd> nsds;
  std::vector<NsInstanceSpec> nsInstances;
  std::vector<CellBindingSpec> cellBindings;

  json initialModel;  // {"subnetwork": {...}} as exported, meta optional
  std::vector<lifecycle::RanSliceTemplate> templates;
  std::map<std::string, std::vector<std::string>> areas;
  enforcement::ProfileSet profiles;
  std::vector<TimelineEvent> timeline;
  std::vector<KpiWindowSpec> kpiReports;

  /// First tick not simulated: the endSimulation event, else one past the
  /// offered-load horizon, else startTick (nothing to simulate).
  std::int64_t endTick() const;
};

/// Parses and validates. Every problem found is reported at once in a
/// ScenarioValidationError whose details hold {"violations": [...]}.
Scenario parseScenario(const json& document);
Scenario loadScenario(const std::string& path);

}  // namespace ranslice::northbound
