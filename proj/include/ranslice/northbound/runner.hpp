#pragma once

// Deterministic scenario replay and its run directory.

#include <cstdint>
#include <string>
#include <vector>

#include "ranslice/northbound/scenario.hpp"

namespace ranslice::northbound {

/// Files written into the output directory.
namespace artifacts {
inline constexpr const char* kModelInitial = "model-initial.json";
inline constexpr const char* kModelFinal = "model-final.json";
inline constexpr const char* kInfraFinal = "infra-final.json";
inline constexpr const char* kResults = "results.ndjson";
inline constexpr const char* kPmSamples = "pm-samples.ndjson";
inline constexpr const char* kNotifications = "notifications.ndjson";
inline constexpr const char* kLcmRecords = "lcm-records.json";
inline constexpr const char* kKpiReports = "kpi-reports.json";
inline constexpr const char* kRunReport = "run-report.json";
}  // namespace artifacts

struct RunReport {
  std::string scenario;
  bool success = true;
  std::int64_t firstTick = 0;
  std::int64_t ticksSimulated = 0;
  json finalModel;
  json kpiReports = json::array();
  json lcmRecords = json::array();
  json failures = json::array();
  std::vector<std::string> resultLog;
  std::vector<std::string> notificationLog;
  std::string pmSamples;
  json initialModel;
  json finalInfrastructure;

  /// Summary written as run-report.json; the bulky parts live in their own
  /// files and are referenced by name.
  json summary() const;
};

class Service;

/// Steps a service through a scenario timeline one tick at a time.
class Replay {
 public:
  Replay(Service& service, const Scenario& scenario);

  /// Applies the events due at the next tick, then simulates it. Returns
  /// false once the run is over.
  bool advance();
  bool finished() const { return finished_; }
  bool success() const { return failures_.empty(); }
  std::int64_t ticksSimulated() const { return ticks_; }
  const std::vector<std::string>& resultLog() const { return log_; }
  const json& failures() const { return failures_; }

 private:
  Service& service_;
  const Scenario& scenario_;
  std::size_t next_ = 0;
  std::int64_t tick_;
  std::int64_t ticks_ = 0;
  bool finished_ = false;
  std::vector<std::string> log_;
  json failures_ = json::array();
};

/// Replays the timeline. Events at tick t apply before t is simulated.
/// With continueOnError off the run stops at the first failed event.
RunReport runScenario(const Scenario& scenario);

/// Writes every artifact of `report` into `outDir`, creating it.
void writeRunDirectory(const RunReport& report, const std::string& outDir);

}  // namespace ranslice::northbound
