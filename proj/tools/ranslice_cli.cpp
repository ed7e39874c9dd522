// ranslice: run, serve and inspect RAN slicing scenarios.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ranslice/northbound/api.hpp"
#include "ranslice/northbound/diff.hpp"
#include "ranslice/northbound/runner.hpp"
#include "ranslice/northbound/service.hpp"
#include "ranslice/pmfm/pm_store.hpp"

namespace fs = std::filesystem;
using namespace ranslice;
using namespace ranslice::northbound;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitNotFound = 2;

ApiServer* g_server = nullptr;

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "file '" + path + "' not found", {{"path", path}});
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json readJson(const std::string& path) {
  try {
    return json::parse(readFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": malformed JSON: " + e.what());
  }
}

int fail(const Error& e, bool asJson) {
  if (asJson) std::cout << e.toJson().dump(2) << "\n";
  std::cerr << "error: " << toString(e.code()) << ": " << e.what() << "\n";
  if (e.code() == ErrorCode::ScenarioValidationError && e.details().contains("violations"))
    for (const auto& v : e.details()["violations"])
      std::cerr << "  " << v.value("path", "/") << ": " << v.value("message", "") << "\n";
  return e.code() == ErrorCode::NotFound ? kExitNotFound : kExitFailure;
}

int cmdValidate(const std::string& path, bool asJson) {
  const auto s = loadScenario(path);
  if (asJson)
    std::cout << json{{"valid", true}, {"scenario", s.name}, {"events", s.timeline.size()},
                      {"endTick", s.endTick()}}.dump(2)
              << "\n";
  else
    std::cout << path << ": valid (" << s.timeline.size() << " events, ticks " << s.startTick << ".."
              << s.endTick() - 1 << ")\n";
  return 0;
}

int cmdRun(const std::string& path, const std::string& out, bool asJson) {
  const auto scenario = loadScenario(path);
  const auto started = std::chrono::steady_clock::now();
  const auto report = runScenario(scenario);
  writeRunDirectory(report, out);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  if (asJson) {
    std::cout << report.summary().dump(2) << "\n";
  } else {
    std::cout << (report.success ? "completed" : "failed") << ": " << report.ticksSimulated << " ticks, "
              << report.lcmRecords.size() << " LCM operations, " << report.notificationLog.size()
              << " notifications -> " << out << "\n";
    for (const auto& f : report.failures) std::cerr << "  failure: " << f.dump() << "\n";
  }
  std::cerr << "elapsed " << ms << " ms\n";
  return report.success ? 0 : kExitFailure;
}

int cmdReport(const std::string& dir, const std::string& slice, std::optional<std::int64_t> from,
              std::optional<std::int64_t> to, bool asJson) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: run directory not found: " << dir << "\n";
    return kExitNotFound;
  }
  pmfm::PmStore store;
  store.loadNdjson(readFile((fs::path(dir) / artifacts::kPmSamples).string()));
  if (!store.firstTick()) throw Error(ErrorCode::WindowIncomplete, "run directory holds no measurements");
  const auto report = store.computeKpiReport(slice, from.value_or(*store.firstTick()), to.value_or(*store.lastTick()));
  if (asJson) {
    std::cout << report.toJson().dump(2) << "\n";
    return 0;
  }
  std::cout << report.ranSliceId << " ticks " << report.startTick << ".." << report.endTick << "\n";
  auto ratio = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("n/a"); };
  for (const auto& sc : report.scopes)
    std::cout << "  scope " << sc.scope << ": avg " << sc.avgServedMbps << " Mbps, min " << sc.minServedMbps
              << " Mbps, offered " << sc.avgOfferedMbps << " Mbps, blocked " << ratio(sc.blockedLoadRatio) << "\n";
  std::cout << "  total: avg " << report.total.avgServedMbps << " Mbps, blocked "
            << ratio(report.total.blockedLoadRatio) << "\n";
  std::cout << "  avgRateNonGbr " << report.avgRateNonGbr << " Mbps, minRateNonGbr " << report.minRateNonGbr
            << " Mbps\n";
  for (const auto& v : report.kpiVerdicts)
    std::cout << "  " << nrm::toString(v.target.name) << " " << nrm::toString(v.target.direction) << " "
              << v.target.threshold << ": " << pmfm::toString(v.verdict) << " (" << ratio(v.value) << ")\n";
  for (const auto& d : report.plannedLoadDeviation)
    std::cout << "  planned " << nrm::toString(d.flowType) << ": " << d.plannedMbps << " Mbps, served "
              << d.avgServedMbps << " Mbps, deviation " << ratio(d.deviation) << "\n";
  return 0;
}

int cmdDiff(const std::string& a, const std::string& b, bool asJson) {
  const auto changes = diffModels(readJson(a), readJson(b));
  if (asJson)
    std::cout << toJson(changes).dump(2) << "\n";
  else
    std::cout << toText(changes);
  return 0;
}

int cmdServe(std::string configPath, std::optional<int> port) {
  if (configPath.empty())
    if (const char* env = std::getenv("RANSLICE_CONFIG")) configPath = env;
  ApiConfig config;
  if (!configPath.empty()) config = loadApiConfig(configPath);
  if (port) config.port = *port;
  std::optional<Scenario> scenario;
  if (config.scenarioPath) {
    auto p = fs::path(*config.scenarioPath);
    if (p.is_relative() && !configPath.empty()) p = fs::path(configPath).parent_path() / p;
    scenario = loadScenario(p.string());
  }
  auto service = scenario ? std::make_unique<Service>(*scenario) : std::make_unique<Service>();
  ApiServer server(*service, scenario);
  const int bound = server.bind(config.host, config.port);
  std::cerr << "listening on http://" << config.host << ":" << bound << "\n";
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAN slicing management plane: scenario runner, API server and tools"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::string scenarioPath, outDir, configPath, runDir, slice, modelA, modelB;
  std::optional<std::int64_t> from, to;
  std::optional<int> port;

  auto* run = app.add_subcommand("run", "Replay a scenario and write its run directory");
  run->add_option("scenario", scenarioPath, "Scenario file")->required();
  run->add_option("--out", outDir, "Output directory")->required();

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--config", configPath, "Config file (default: $RANSLICE_CONFIG)");
  serve->add_option("--port", port, "Override the configured port");

  auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
  validate->add_option("scenario", scenarioPath, "Scenario file")->required();

  auto* report = app.add_subcommand("report", "KPI report of a RAN slice from a run directory");
  report->add_option("run-dir", runDir, "Run directory")->required();
  report->add_option("--slice", slice, "RAN slice id")->required();
  report->add_option("--from", from, "First tick (default: first ingested)");
  report->add_option("--to", to, "Last tick (default: last ingested)");

  auto* diff = app.add_subcommand("diff-model", "Structural difference of two exported models");
  diff->add_option("a", modelA, "Model export")->required();
  diff->add_option("b", modelB, "Model export")->required();

  for (auto* sub : {run, serve, validate, report, diff})
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);
  const bool asJson = format == "json";
  try {
    if (run->parsed()) return cmdRun(scenarioPath, outDir, asJson);
    if (serve->parsed()) return cmdServe(configPath, port);
    if (validate->parsed()) return cmdValidate(scenarioPath, asJson);
    if (report->parsed()) return cmdReport(runDir, slice, from, to, asJson);
    if (diff->parsed()) return cmdDiff(modelA, modelB, asJson);
  } catch (const Error& e) {
    return fail(e, asJson);
  }
  return kExitFailure;
}
