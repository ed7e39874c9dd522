#include <doctest.h>

#include <fstream>
#include <functional>

#include "ranslice/infra/infrastructure.hpp"

using namespace ranslice;
using namespace ranslice::infra;

namespace {

json neutralHost() {
  std::ifstream in(std::string(RANSLICE_SOURCE_DIR) + "/scenarios/neutral-host.scenario");
  return json::parse(in);
}

Infrastructure buildInfra(const json& s) {
  std::vector<Pop> pops;
  std::vector<Rrh> rrhs;
  for (const auto& p : s["infrastructure"]["pops"]) pops.push_back(parsePop(p, "/pop"));
  for (const auto& r : s["infrastructure"]["rrhs"]) rrhs.push_back(parseRrh(r, "/rrh"));
  Infrastructure infra(pops, rrhs);
  for (const auto& n : s["nsds"]) infra.registerNsd(parseNsd(n, "/nsd"));
  return infra;
}

std::string codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(toString(e.code()));
  }
  return "none";
}

VnfProfile du(const std::string& id, const std::string& pop) {
  VnfProfile p;
  p.vnfId = id;
  p.kind = VnfKind::GnbDu;
  p.placementConstraint = pop;
  return p;
}

ScaleRequest addDu(const std::string& id, const std::string& pop, const std::string& rrh) {
  return {du(id, pop), {{rrh, id, 1000}, {id, "gNB-CU#2", 500}}};
}

}  // namespace

TEST_SUITE("infra") {
  TEST_CASE("instantiation places VNFs and routes links") {
    auto infra = buildInfra(neutralHost());
    const auto& ns = infra.instantiateNs("NSD#2", {}, std::string("NS#2"));
    CHECK(ns.vnfInstances.size() == 3);
    CHECK(ns.findVnf("gNB-CU#2")->popId == "PoP#2");
    CHECK(ns.findVnf("gNB-DU#3")->popId == "PoP#3");
    CHECK(ns.findVnf("gNB-DU#4")->popId == "PoP#1");
    CHECK(infra.freeCapacity("PoP#1") == 6);
    CHECK(infra.freeCapacity("PoP#2") == 30);
    CHECK(infra.freeCapacity("PoP#3") == 4);
    CHECK(infra.freeLinkCapacity("PoP#1", "PoP#2") == 9500);
    CHECK(infra.freeLinkCapacity("PoP#3", "PoP#2") == 9500);
    for (const auto& b : ns.linkBindings)
      if (b.link.endpointA == "gNB-DU#4") CHECK(b.path == std::vector<std::string>{"PoP#1", "PoP#2"});
    CHECK(infra.auditInvariants().empty());
  }

  TEST_CASE("free placement picks the PoP with the most room") {
    auto s = neutralHost();
    s["nsds"][0]["vnfProfiles"][0].erase("placement");
    auto infra = buildInfra(s);
    const auto& ns = infra.instantiateNs("NSD#1");
    CHECK(ns.findVnf("gNB#1")->popId == "PoP#2");
    PlacementHints hints{{"gNB#1", "PoP#1"}};
    CHECK(infra.instantiateNs("NSD#1", hints).findVnf("gNB#1")->popId == "PoP#1");
  }

  TEST_CASE("failed calls leave the state untouched") {
    auto infra = buildInfra(neutralHost());
    infra.instantiateNs("NSD#2", {}, std::string("NS#2"));
    const Infrastructure before = infra;

    auto big = du("gNB-DU#9", "PoP#3");
    big.computeUnits = 10;
    CHECK(codeOf([&] { infra.scaleNs("NS#2", {big, {{"RRH#3", "gNB-DU#9", 10}, {"gNB-DU#9", "gNB-CU#2", 10}}}); }) ==
          "InsufficientNfvi");
    CHECK(infra == before);

    CHECK(codeOf([&] {
            infra.scaleNs("NS#2", {du("gNB-DU#9", "PoP#3"), {{"RRH#3", "gNB-DU#9", 10}, {"gNB-DU#9", "gNB-CU#2", 20000}}});
          }) == "NoFeasiblePath");
    CHECK(infra == before);

    CHECK(codeOf([&] { infra.instantiateNs("NSD#404"); }) == "UnknownNsd");
    CHECK(codeOf([&] { infra.scaleNs("NS#404", addDu("gNB-DU#5", "PoP#3", "RRH#3")); }) == "UnknownNsInstance");
    CHECK(infra == before);
  }

  TEST_CASE("scale-out respects the scaling rule and scale-in undoes it") {
    auto infra = buildInfra(neutralHost());
    infra.instantiateNs("NSD#2", {}, std::string("NS#2"));
    const Infrastructure before = infra;
    infra.scaleNs("NS#2", addDu("gNB-DU#5", "PoP#3", "RRH#3"));
    CHECK(infra.findInstance("NS#2")->findVnf("gNB-DU#5")->popId == "PoP#3");
    CHECK(infra.freeCapacity("PoP#3") == 2);
    CHECK(codeOf([&] { infra.scaleNs("NS#2", addDu("gNB-DU#6", "PoP#2", "RRH#2")); }) == "ScalingLimitExceeded");
    infra.scaleIn("NS#2", "gNB-DU#5");
    CHECK(infra == before);
  }

  TEST_CASE("carrier binding") {
    auto infra = buildInfra(neutralHost());
    infra.instantiateNs("NSD#2", {}, std::string("NS#2"));
    infra.bindCellResources("NRCell#2", "NS#2", "RRH#2", "B42", 40, std::string("gNB-DU#4"));
    CHECK(infra.usedCarriers("RRH#2") == 1);
    CHECK(codeOf([&] { infra.bindCellResources("NRCell#2", "NS#2", "RRH#3", "B42", 40); }) == "CellAlreadyBound");
    CHECK(codeOf([&] { infra.bindCellResources("NRCell#9", "NS#2", "RRH#2", "B42", 40); }) ==
          "CarrierSlotsExhausted");
    CHECK(codeOf([&] { infra.bindCellResources("NRCell#9", "NS#2", "RRH#3", "B28", 5); }) == "BandUnsupported");
    CHECK(codeOf([&] { infra.bindCellResources("NRCell#9", "NS#2", "RRH#7", "B42", 5); }) == "UnknownRrh");
    CHECK(codeOf([&] { infra.terminateNs("NS#2"); }) == "InstanceInUse");
    infra.releaseCellResources("NRCell#2");
    CHECK(infra.usedCarriers("RRH#2") == 0);
  }

  TEST_CASE("terminate releases everything it placed") {
    auto infra = buildInfra(neutralHost());
    const Infrastructure fresh = infra;
    infra.instantiateNs("NSD#2", {}, std::string("NS#2"));
    const auto report = infra.terminateNs("NS#2");
    CHECK(report.totalComputeUnits == 6);
    CHECK(report.computeUnitsByPop.at("PoP#2") == 2);
    CHECK(report.releasedVnfs.size() == 3);
    CHECK(infra == fresh);
    CHECK(infra.auditInvariants().empty());
  }

  TEST_CASE("descriptor validation") {
    auto s = neutralHost();
    auto nsd = parseNsd(s["nsds"][1], "/nsd");
    nsd.nsdId = "NSD#X";
    nsd.virtualLinks.pop_back();  // gNB-DU#4 loses its CU link
    auto infra = buildInfra(s);
    CHECK(codeOf([&] { infra.registerNsd(nsd); }) == "InvariantViolation");
    auto dangling = parseNsd(s["nsds"][0], "/nsd");
    dangling.nsdId = "NSD#Y";
    dangling.virtualLinks.push_back({"gNB#1", "ghost", 1});
    CHECK(codeOf([&] { infra.registerNsd(dangling); }) == "InvariantViolation");
  }

  TEST_CASE("random operation sequences conserve capacity") {
    auto infra = buildInfra(neutralHost());
    std::uint64_t x = 42;
    auto next = [&] { return (x = x * 6364136223846793005ULL + 1442695040888963407ULL) >> 33; };
    const Infrastructure fresh = infra;
    std::vector<std::string> live;
    for (int i = 0; i < 400; ++i) {
      try {
        switch (next() % 4) {
          case 0: live.push_back(infra.instantiateNs(next() % 2 ? "NSD#1" : "NSD#2").nsInstanceId); break;
          case 1:
            if (!live.empty()) {
              const auto id = live[next() % live.size()];
              infra.terminateNs(id);
              live.erase(std::find(live.begin(), live.end(), id));
            }
            break;
          case 2:
            if (!live.empty())
              infra.scaleNs(live[next() % live.size()],
                            addDu("gNB-DU#s" + std::to_string(i), next() % 2 ? "PoP#2" : "PoP#3", "RRH#3"));
            break;
          default: break;
        }
      } catch (const Error&) {
      }
      REQUIRE(infra.auditInvariants().empty());
    }
    for (const auto& id : live) infra.terminateNs(id);
    CHECK(infra == fresh);
  }
}
