#include <doctest.h>

#include <functional>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "ranslice/enforcement/simulator.hpp"
#include "ranslice/nrm/codec.hpp"

using namespace ranslice;
using namespace ranslice::enforcement;

namespace {

std::vector<Aggregate> toLib(const std::vector<oracle::Agg>& aggs) {
  std::vector<Aggregate> out;
  for (const auto& a : aggs) out.push_back({a.demand, a.guaranteed, a.maximum});
  return out;
}

std::string codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(toString(e.code()));
  }
  return "none";
}

/// One 100 Mbps cell, two cell slices with one AL entry each.
nrm::Model twoSliceCell(double g1, double g2, const char* control = "Enabled", bool oversubscribed = false) {
  auto slice = [&](const char* id, int q, double g) {
    return json{{"cellSliceId", id},
                {"rst", "eMBB"},
                {"networkIds", {{{"plmnId", "001-01"}, {"snssai", {{"sst", 1}, {"sd", q}}}}}},
                {"authorisedLoad", gen::alEntry({gen::flowType(q, 8)}, g, control)}};
  };
  auto rs = [](const char* id, const char* cs, int q) {
    return json{{"ranSliceId", id},
                {"cellSliceRefs", {{{"cellId", "C1"}, {"cellSliceId", cs}}}},
                {"networkIds", {{{"plmnId", "001-01"}, {"snssai", {{"sst", 1}, {"sd", q}}}}}}};
  };
  json doc{{"subnetwork",
            {{"id", "S"},
             {"ManagedElement",
              {{{"id", "ME"},
                {"GnbFunction",
                 {{{"id", "G"},
                   {"kind", "gNB"},
                   {"NrCell",
                    {{{"cellId", "C1"},
                      {"band", "B42"},
                      {"channelBandwidthMHz", 20},
                      {"oversubscribed", oversubscribed},
                      {"plmnList", {{{"plmnId", "001-01"}, {"exposedServices", {"PM", "FM"}}}}},
                      {"CellSlice", {slice("CS1", 9, g1), slice("CS2", 8, g2)}}}}}}}}}}},
             {"RanSlice", {rs("RSI#1", "CS1", 9), rs("RSI#2", "CS2", 8)}}}}};
  return nrm::codec::importModel(doc);
}

ProfileSet flatLoad(double mbps1, double mbps2, std::int64_t until) {
  ProfileSet set;
  set.add({{"C1", "CS1", "", {9, 8}}, {{0, mbps1}, {until, mbps1}}});
  set.add({{"C1", "CS2", "", {8, 8}}, {{0, mbps2}, {until, mbps2}}});
  return set;
}

std::vector<Notification> runTicks(Simulator& sim, const nrm::Model& m, std::int64_t from, std::int64_t to) {
  std::vector<Notification> out;
  for (auto t = from; t <= to; ++t) {
    auto r = sim.advanceTick(m, t);
    out.insert(out.end(), r.notifications.begin(), r.notifications.end());
  }
  return out;
}

}  // namespace

TEST_SUITE("allocation") {
  TEST_CASE("congested cell splits by guarantee") {
    const auto s = allocate({{250, 0.7}, {250, 0.3}}, 200);
    CHECK(s[0] == doctest::Approx(140));
    CHECK(s[1] == doctest::Approx(60));
  }

  TEST_CASE("unused guarantee is lent to the busy slice") {
    const auto s = allocate({{250, 0.7}, {30, 0.3}}, 200);
    CHECK(s[0] == doctest::Approx(170));
    CHECK(s[1] == doctest::Approx(30));
  }

  TEST_CASE("uncongested cell serves all demand") {
    const auto s = allocate({{50, 0.7}, {30, 0.3}, {10, 0.0}}, 200);
    CHECK(s == std::vector<double>{50, 30, 10});
  }

  TEST_CASE("maximum caps the share") {
    const auto s = allocate({{300, 0.0, 0.5}, {10, 0.0}}, 200);
    CHECK(s[0] == doctest::Approx(100));
    CHECK(s[1] == doctest::Approx(10));
  }

  TEST_CASE("oversubscribed floors scale down together") {
    const auto s = allocate({{300, 0.7}, {300, 0.7}}, 200);
    CHECK(s[0] == doctest::Approx(100));
    CHECK(s[1] == doctest::Approx(100));
  }

  TEST_CASE("spare is split by residual demand") {
    // floors 20 and 0, spare 80 over residuals 80 and 40
    const auto s = allocate({{100, 0.2}, {40, 0.0}}, 100);
    CHECK(s[0] == doctest::Approx(20 + 80.0 * 80 / 120));
    CHECK(s[1] == doctest::Approx(80.0 * 40 / 120));
  }

  TEST_CASE("zero capacity and empty input") {
    CHECK(allocate({}, 100).empty());
    CHECK(allocate({{10, 0.5}}, 0) == std::vector<double>{0});
  }

  TEST_CASE("matches the search oracle on the discrete grid") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
      const auto [aggs, cap] = oracle::gridInstance(rng);
      const auto got = allocate(toLib(aggs), cap);
      const auto want = oracle::allocate(aggs, cap);
      for (std::size_t k = 0; k < aggs.size(); ++k) REQUIRE(std::abs(got[k] - want[k]) <= 1e-9);
    }
  }

  TEST_CASE("properties on continuous instances") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
      const auto [aggs, cap] = oracle::continuousInstance(rng);
      const auto served = allocate(toLib(aggs), cap);
      const auto bad = oracle::allocationProperties(aggs, cap, served, 1e-9 * cap);
      CAPTURE(i);
      REQUIRE(bad.empty());
      auto more = aggs;
      const std::size_t k = rng() % aggs.size();
      more[k].demand += 1.0 + 50.0 * gen::unit(rng);
      REQUIRE(allocate(toLib(more), cap)[k] >= served[k] - 1e-9 * cap);
    }
  }

  TEST_CASE("cell allocation splits offered traffic into AL aggregates") {
    const auto m = twoSliceCell(0.7, 0.3);
    const auto& cell = *m.findCell("C1");
    std::map<std::string, OfferedByFlowType> offered{{"CS1", {{{9, 8}, 150.0}, {{5, 1}, 20.0}}},
                                                     {"CS2", {{{8, 8}, 150.0}}}};
    const auto r = allocateCapacity(cell, 100, 1.0, offered);
    CHECK(r.effectiveCapacityMbps == 100);
    REQUIRE(r.aggregates.size() == 3);
    double served = 0;
    for (const auto& a : r.aggregates) served += a.served;
    CHECK(served == doctest::Approx(100));
    CHECK(r.aggregates[0].scope == "5QI=9/ARP=8");
    CHECK(r.aggregates[0].guaranteedTarget == doctest::Approx(70));
    CHECK(r.aggregates[1].scope == nrm::kUnscopedKey);

    const auto half = allocateCapacity(cell, 100, 0.5, offered);
    CHECK(half.effectiveCapacityMbps == 50);
    CHECK(half.aggregates[0].guaranteedTarget == doctest::Approx(70));  // nominal
    CHECK(half.aggregates[0].served == doctest::Approx(35));
  }
}

TEST_SUITE("simulator") {
  TEST_CASE("profiles") {
    OfferedLoadProfile p{{"C1", "CS1", "", {9, 8}}, {{10, 5}, {20, 7}}};
    CHECK(p.at(0) == 0);
    CHECK(p.at(10) == 5);
    CHECK(p.at(19) == 5);
    CHECK(p.at(25) == 7);
    const json seg{{"cellId", "C1"}, {"cellSliceId", "CS1"}, {"segments", {{{"from", 0}, {"to", 9}, {"mbps", 100}, {"jitter", 0.2}}}}};
    const auto a = parseProfile(seg, "/p", 1), b = parseProfile(seg, "/p", 1), c = parseProfile(seg, "/p", 2);
    CHECK(a.points == b.points);
    CHECK(a.points != c.points);
    for (const auto& [t, v] : a.points) CHECK((v >= 80 && v <= 120));
    CHECK(codeOf([] { parseProfile(json{{"cellId", "C1"}, {"cellSliceId", "CS1"}}, "/p"); }) == "ParseError");
  }

  TEST_CASE("tick order and horizon") {
    const auto m = twoSliceCell(0.5, 0.5);
    Simulator sim({}, flatLoad(10, 10, 5));
    sim.advanceTick(m, 0);
    CHECK(codeOf([&] { sim.advanceTick(m, 2); }) == "OutOfOrderTick");
    runTicks(sim, m, 1, 5);
    CHECK(codeOf([&] { sim.advanceTick(m, 6); }) == "ProfileExhausted");
  }

  TEST_CASE("windows must be whole ticks") {
    const auto m = twoSliceCell(0.5, 0.5);
    SimConfig cfg;
    cfg.tickDurationS = 3;
    Simulator sim(cfg, {});
    CHECK(codeOf([&] { sim.validateWindows(m); }) == "ScenarioValidationError");
    CHECK(Simulator({}, {}).windowSpan(10) == 10);
  }

  TEST_CASE("degradation raises once per entry and clears once after restore") {
    const auto m = twoSliceCell(0.5, 0.5);
    Simulator sim({}, flatLoad(80, 80, 99));
    CHECK(runTicks(sim, m, 0, 19).empty());
    sim.setDegradation("C1", 0.5);
    const auto raised = runTicks(sim, m, 20, 59);
    REQUIRE(raised.size() == 2);
    for (const auto& n : raised) {
      CHECK(n.type == notification_types::kGuaranteedLoadNotFulfilled);
      CHECK(n.tick == 20);
    }
    sim.setDegradation("C1", 1.0);
    const auto cleared = runTicks(sim, m, 60, 99);
    REQUIRE(cleared.size() == 2);
    for (const auto& n : cleared) {
      CHECK(n.type == notification_types::kGuaranteedLoadRestored);
      CHECK(n.tick == 69);
    }
  }

  TEST_CASE("no raise before the window has filled") {
    const auto m = twoSliceCell(0.5, 0.5);
    Simulator sim({}, flatLoad(80, 80, 30));
    sim.setDegradation("C1", 0.5);
    const auto ns = runTicks(sim, m, 0, 30);
    REQUIRE(ns.size() == 2);
    CHECK(ns[0].tick == 9);
  }

  TEST_CASE("disabled entries stay silent") {
    const auto m = twoSliceCell(0.5, 0.5, "Disabled");
    Simulator sim({}, flatLoad(80, 80, 99));
    runTicks(sim, m, 0, 19);
    sim.setDegradation("C1", 0.5);
    CHECK(runTicks(sim, m, 20, 59).empty());
    sim.setDegradation("C1", 1.0);
    CHECK(runTicks(sim, m, 60, 99).empty());
  }

  TEST_CASE("forced oversubscription makes guarantees unreachable without degradation") {
    const auto m = twoSliceCell(0.7, 0.7, "Enabled", true);
    Simulator sim({}, flatLoad(100, 100, 30));
    const auto ns = runTicks(sim, m, 0, 30);
    REQUIRE(ns.size() == 2);
    CHECK(ns[0].type == notification_types::kGuaranteedLoadNotFulfilled);
  }

  TEST_CASE("result log lines") {
    const auto m = twoSliceCell(0.5, 0.5);
    Simulator sim({}, flatLoad(80, 80, 5));
    const auto r = sim.advanceTick(m, 0);
    const auto lines = r.logLines();
    REQUIRE_FALSE(lines.empty());
    const auto first = json::parse(lines.front());
    CHECK(first["tick"] == 0);
    CHECK(first.dump().find("C1") != std::string::npos);
  }
}
