#include "ranslice/northbound/runner.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include "ranslice/northbound/service.hpp"

namespace ranslice::northbound {

namespace fs = std::filesystem;

namespace {

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::NotFound, "cannot write '" + path.string() + "'", {{"path", path.string()}});
  out << content;
}

std::string lines(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& l : v) out += l + "\n";
  return out;
}

}  // namespace

json RunReport::summary() const {
  std::map<std::string, int> counts;
  for (const auto& line : notificationLog) ++counts[json::parse(line).at("type").get<std::string>()];
  json lcm = json::array();
  for (const auto& r : lcmRecords)
    lcm.push_back({{"opId", r["opId"]}, {"operation", r["operation"]}, {"ranSliceId", r["ranSliceId"]},
                   {"status", r["status"]}});
  json slices = json::array();
  for (const auto& rs : finalModel["subnetwork"].value("RanSlice", json::array())) slices.push_back(rs["ranSliceId"]);
  return {{"scenario", scenario},
          {"status", success ? "completed" : "failed"},
          {"ticks", {{"first", firstTick}, {"simulated", ticksSimulated}}},
          {"finalModel", artifacts::kModelFinal},
          {"finalRanSlices", slices},
          {"resultLog", artifacts::kResults},
          {"pmSamples", artifacts::kPmSamples},
          {"notificationLog", artifacts::kNotifications},
          {"notificationCounts", counts},
          {"lcmRecords", artifacts::kLcmRecords},
          {"lcmOperations", lcm},
          {"kpiReports", kpiReports},
          {"failures", failures}};
}

Replay::Replay(Service& service, const Scenario& scenario)
    : service_(service), scenario_(scenario), tick_(scenario.startTick) {}

bool Replay::advance() {
  if (finished_) return false;
  const auto& timeline = scenario_.timeline;
  while (next_ < timeline.size() && timeline[next_].tick == tick_) {
    const auto& e = timeline[next_];
    json line = e.toJson();
    line["record"] = "event";
    line["index"] = next_;
    ++next_;
    if (e.action == EventAction::EndSimulation) {
      log_.push_back(line.dump());
      finished_ = true;
      return false;
    }
    try {
      switch (e.action) {
        case EventAction::LcmOperation: {
          auto result = service_.lcm(e.operation, e.ranSliceId, e.request);
          line["ranSliceId"] = result.ranSliceId;
          line["opId"] = result.record.opId;
          break;
        }
        case EventAction::UpdateManagedObject: service_.updateManagedObject(e.dn, e.deltas); break;
        case EventAction::DegradeCell: service_.degradeCell(e.cellId, e.factor); break;
        case EventAction::RestoreCell: service_.restoreCell(e.cellId); break;
        case EventAction::EndSimulation: break;
      }
      line["outcome"] = "ok";
    } catch (const Error& err) {
      line["outcome"] = "failed";
      line["error"] = err.toJson();
      if (err.details().is_object() && err.details().contains("opId")) line["opId"] = err.details()["opId"];
      failures_.push_back(line);
      if (!scenario_.continueOnError) finished_ = true;
    }
    log_.push_back(line.dump());
    if (finished_) return false;
  }
  if (tick_ >= scenario_.endTick()) {
    finished_ = true;
    return false;
  }
  try {
    auto result = service_.step();
    for (auto& l : result.logLines()) log_.push_back(std::move(l));
    ++ticks_;
    ++tick_;
  } catch (const Error& err) {
    json line{{"record", "tickError"}, {"tick", tick_}, {"error", err.toJson()}};
    log_.push_back(line.dump());
    failures_.push_back(line);
    finished_ = true;
    return false;
  }
  return true;
}

RunReport runScenario(const Scenario& scenario) {
  Service svc(scenario);
  RunReport report;
  report.scenario = scenario.name;
  report.firstTick = scenario.startTick;
  report.initialModel = svc.exportModel();

  Replay replay(svc, scenario);
  while (replay.advance()) {
  }
  report.success = replay.success();
  report.ticksSimulated = replay.ticksSimulated();
  report.resultLog = replay.resultLog();
  report.failures = replay.failures();

  for (const auto& k : scenario.kpiReports) {
    json entry{{"label", k.label}, {"ranSliceId", k.ranSliceId}};
    try {
      entry["report"] = svc.pmfm().store().computeKpiReport(k.ranSliceId, k.startTick, k.endTick).toJson();
    } catch (const Error& err) {
      entry["error"] = err.toJson();
    }
    report.kpiReports.push_back(entry);
  }
  for (const auto& r : svc.lifecycle().records()) report.lcmRecords.push_back(r.toJson());
  for (const auto& n : svc.pmfm().dispatcher().log()) report.notificationLog.push_back(n.toJson().dump());
  report.pmSamples = svc.pmfm().store().toNdjson();
  report.finalModel = svc.exportModel();
  report.finalInfrastructure = svc.infrastructureJson();
  return report;
}

void writeRunDirectory(const RunReport& report, const std::string& outDir) {
  const fs::path dir(outDir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::NotFound, "cannot create '" + outDir + "': " + ec.message(), {{"path", outDir}});
  writeFile(dir / artifacts::kModelInitial, report.initialModel.dump(2) + "\n");
  writeFile(dir / artifacts::kModelFinal, report.finalModel.dump(2) + "\n");
  writeFile(dir / artifacts::kInfraFinal, report.finalInfrastructure.dump(2) + "\n");
  writeFile(dir / artifacts::kResults, lines(report.resultLog));
  writeFile(dir / artifacts::kPmSamples, report.pmSamples);
  writeFile(dir / artifacts::kNotifications, lines(report.notificationLog));
  writeFile(dir / artifacts::kLcmRecords, report.lcmRecords.dump(2) + "\n");
  writeFile(dir / artifacts::kKpiReports, report.kpiReports.dump(2) + "\n");
  writeFile(dir / artifacts::kRunReport, report.summary().dump(2) + "\n");
}

}  // namespace ranslice::northbound
