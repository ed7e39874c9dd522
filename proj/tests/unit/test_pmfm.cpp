#include <doctest.h>

#include <atomic>
#include <fstream>
#include <functional>
#include <map>

#include "oracles.hpp"
#include "ranslice/northbound/runner.hpp"
#include "ranslice/northbound/service.hpp"
#include "ranslice/nrm/codec.hpp"

using namespace ranslice;
using namespace ranslice::northbound;

namespace {

json loadDoc(const std::string& name) {
  std::ifstream in(std::string(RANSLICE_SOURCE_DIR) + "/scenarios/" + name + ".scenario");
  return json::parse(in);
}

std::string codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(toString(e.code()));
  }
  return "none";
}

// One neutral-host run shared by the read-only cases.
const RunReport& neutralHostRun() {
  static const RunReport r = runScenario(parseScenario(loadDoc("neutral-host")));
  return r;
}

pmfm::Subscription sub(std::vector<std::string> slices, std::vector<std::string> kinds,
                       std::optional<std::string> tenant = std::nullopt) {
  pmfm::Subscription s;
  s.subscriberId = "test";
  s.filter.ranSliceIds = std::move(slices);
  s.filter.notificationKinds = std::move(kinds);
  if (tenant) s.filter.tenant = nrm::codec::parsePlmnId(*tenant, "/tenant");
  return s;
}

}  // namespace

TEST_SUITE("pmfm") {
  TEST_CASE("ndjson reload is identical") {
    const auto& run = neutralHostRun();
    pmfm::PmStore store;
    store.loadNdjson(run.pmSamples);
    CHECK(store.toNdjson() == run.pmSamples);
    CHECK(store.firstTick() == 0);
    CHECK(store.lastTick() == 179);
    CHECK(codeOf([&] { store.loadNdjson(run.pmSamples); }) == "InvariantViolation");
    pmfm::PmStore bad;
    CHECK(codeOf([&] { bad.loadNdjson("{\"record\":\"nope\",\"tick\":0}\n"); }) == "ParseError");
  }

  TEST_CASE("non-GBR rates agree with a recomputation from raw samples") {
    const auto& run = neutralHostRun();
    pmfm::PmStore store;
    store.loadNdjson(run.pmSamples);
    const std::vector<std::tuple<std::string, std::int64_t, std::int64_t>> windows{
        {"RSI#1", 0, 59}, {"RSI#1", 60, 179}, {"RSI#2", 95, 119}, {"RSI#2", 125, 179},
        {"RSI#3", 30, 59}, {"RSI#4", 60, 179}, {"RSI#2", 0, 179}};
    for (const auto& [id, from, to] : windows) {
      CAPTURE(id);
      CAPTURE(from);
      const auto report = store.computeKpiReport(id, from, to);
      const auto want = oracle::nonGbrFromNdjson(run.pmSamples, id, from, to);
      CHECK(want.at("ticks") == doctest::Approx(to - from + 1));
      CHECK(std::abs(report.avgRateNonGbr - want.at("avg")) <= 1e-9 * std::max(1.0, want.at("avg")));
      CHECK(std::abs(report.minRateNonGbr - want.at("min")) <= 1e-9 * std::max(1.0, want.at("min")));
    }
  }

  TEST_CASE("verdicts follow the target direction") {
    pmfm::PmStore store;
    store.loadNdjson(neutralHostRun().pmSamples);
    const auto before = store.computeKpiReport("RSI#2", 95, 119);
    const auto after = store.computeKpiReport("RSI#2", 125, 179);
    REQUIRE(before.kpiVerdicts.size() == 1);
    REQUIRE(after.kpiVerdicts.size() == 1);
    CHECK((before.kpiVerdicts[0].verdict == pmfm::Verdict::Violated));
    CHECK((after.kpiVerdicts[0].verdict == pmfm::Verdict::Met));
    CHECK(*before.kpiVerdicts[0].value == doctest::Approx(before.avgRateNonGbr));
    CHECK_FALSE(before.plannedLoadDeviation.empty());
    const auto j = after.toJson();
    CHECK(j["ranSliceId"] == "RSI#2");
  }

  TEST_CASE("window errors") {
    pmfm::PmStore store;
    CHECK(codeOf([&] { store.computeKpiReport("RSI#1", 0, 0); }) == "WindowIncomplete");
    store.loadNdjson(neutralHostRun().pmSamples);
    CHECK(codeOf([&] { store.computeKpiReport("RSI#1", 10, 5); }) == "WindowIncomplete");
    CHECK(codeOf([&] { store.computeKpiReport("RSI#1", 100, 180); }) == "WindowIncomplete");
    CHECK(codeOf([&] { store.computeKpiReport("RSI#4", 0, 100); }) == "WindowIncomplete");  // created at 60
    CHECK(codeOf([&] { store.computeKpiReport("RSI#4", 0, 59); }) == "UnknownSlice");
    CHECK(codeOf([&] { store.computeKpiReport("RSI#77", 0, 10); }) == "UnknownSlice");
  }

  TEST_CASE("ingest rejects an out of order tick") {
    Service svc(parseScenario(loadDoc("degradation")));
    auto r0 = svc.step();
    const auto m = svc.model();
    pmfm::PmFm pf;
    pf.ingestTickResults(*m, r0);
    const auto size = pf.store().size();
    CHECK(codeOf([&] { pf.ingestTickResults(*m, r0); }) == "OutOfOrderTick");
    CHECK(pf.store().size() == size);
  }
}

TEST_SUITE("notifications") {
  TEST_CASE("filters, tenant exposure and pull delivery") {
    const auto scenario = parseScenario(loadDoc("degradation"));
    Service svc(scenario);
    auto& d = svc.pmfm().dispatcher();
    const auto all = d.subscribe(*svc.model(), sub({}, {"*"}));
    const auto gl = d.subscribe(*svc.model(), sub({}, {notification_types::kGuaranteedLoadNotFulfilled}));
    CHECK(codeOf([&] { d.subscribe(*svc.model(), sub({}, {})); }) == "InvariantViolation");
    CHECK(codeOf([&] { d.subscribe(*svc.model(), sub({}, {"Bogus"})); }) == "InvariantViolation");
    CHECK(codeOf([&] { d.subscribe(*svc.model(), sub({"RSI#1"}, {"*"})); }) == "UnknownSlice");

    Replay replay(svc, scenario);
    REQUIRE(replay.advance());  // tick 0 creates both slices
    CHECK(codeOf([&] { d.subscribe(*svc.model(), sub({"RSI#1"}, {"*"}, "001-02")); }) == "ExposureDenied");
    const auto tenant = d.subscribe(*svc.model(), sub({"RSI#1"}, {"*"}, "001-01"));
    const auto other = d.subscribe(*svc.model(), sub({}, {"*"}, "001-02"));
    while (replay.advance()) {
    }
    REQUIRE(replay.success());

    const auto log = d.log();
    for (std::size_t i = 0; i < log.size(); ++i) CHECK(log[i].id == i + 1);

    CHECK(d.drain(all).size() == log.size());
    const auto raised = d.drain(gl);
    REQUIRE(raised.size() == 2);
    for (const auto& n : raised) CHECK(n.type == notification_types::kGuaranteedLoadNotFulfilled);

    const auto mine = d.drain(tenant);
    REQUIRE(mine.size() == 2);
    CHECK(mine[0].type == notification_types::kGuaranteedLoadNotFulfilled);
    CHECK(mine[1].type == notification_types::kGuaranteedLoadRestored);
    for (const auto& n : mine) CHECK(n.ranSliceId == "RSI#1");

    const auto theirs = d.drain(other);
    REQUIRE(theirs.size() == 2);
    for (const auto& n : theirs) CHECK(n.ranSliceId == "RSI#2");

    CHECK(d.drain(all).empty());
    d.unsubscribe(all);
    CHECK(codeOf([&] { d.drain(all); }) == "UnknownSubscription");
    CHECK(codeOf([&] { d.unsubscribe(all); }) == "UnknownSubscription");
  }

  TEST_CASE("FM must be exposed on every cell of the slice") {
    auto doc = loadDoc("degradation");
    doc["initialModel"]["subnetwork"]["ManagedElement"][0]["GnbFunction"][0]["NrCell"][0]["plmnList"][0]
       ["exposedServices"] = {"PM"};
    const auto scenario = parseScenario(doc);
    Service svc(scenario);
    Replay replay(svc, scenario);
    replay.advance();
    CHECK(codeOf([&] {
            svc.pmfm().dispatcher().subscribe(*svc.model(), sub({"RSI#1"}, {"*"}, "001-01"));
          }) == "ExposureDenied");
  }

  TEST_CASE("push delivery retries and keeps undelivered notifications queued") {
    const auto scenario = parseScenario(loadDoc("degradation"));
    Service svc(scenario);
    auto& d = svc.pmfm().dispatcher();
    const auto id = d.subscribe(*svc.model(), sub({}, {"*"}));

    std::mutex m;
    std::map<std::uint64_t, int> attempts;
    std::vector<std::uint64_t> delivered;
    d.setPushHandler(
        [&](const pmfm::Subscription&, const Notification& n) {
          std::lock_guard lock(m);
          if (++attempts[n.id] < 3) throw std::runtime_error("endpoint down");
          delivered.push_back(n.id);
        },
        3);
    Replay replay(svc, scenario);
    while (replay.advance()) {
    }
    d.flush();
    const auto log = d.log();
    {
      std::lock_guard lock(m);
      REQUIRE(delivered.size() == log.size());
      for (std::size_t i = 0; i < log.size(); ++i) CHECK(delivered[i] == log[i].id);
      for (const auto& [_, a] : attempts) CHECK(a == 3);
    }
    CHECK(d.drain(id).empty());
    CHECK(d.deliveredCount() == log.size());

    d.setPushHandler([](const pmfm::Subscription&, const Notification&) { throw std::runtime_error("gone"); }, 2);
    std::vector<Notification> more{Notification{0, notification_types::kLcmOperationCompleted, "NM", 0}};
    d.dispatch(*svc.model(), more);
    d.flush();
    const auto left = d.drain(id);
    REQUIRE(left.size() == 1);
    CHECK(left[0].id == log.size() + 1);
    d.setPushHandler(nullptr);
  }
}
