#include <doctest.h>

#include <functional>
#include <random>

#include "generators.hpp"
#include "ranslice/nrm/codec.hpp"
#include "ranslice/nrm/store.hpp"

using namespace ranslice;
using namespace ranslice::nrm;

namespace {

const Dn kRoot = Dn::parse("Subnetwork=NH");
const Dn kMe = kRoot.child(ObjectKind::ManagedElement, "ME#1");
const Dn kFn = kMe.child(ObjectKind::GnbFunction, "gNB#1");
const Dn kCell = kFn.child(ObjectKind::NrCell, "NRCell#1");

json cellAttrs(const std::string& id, std::vector<std::string> plmns = {"001-01"}) {
  json list = json::array();
  for (const auto& p : plmns) list.push_back({{"plmnId", p}, {"exposedServices", {"PM", "FM"}}});
  return {{"cellId", id}, {"band", "B42"}, {"channelBandwidthMHz", 40}, {"plmnList", list}};
}

json sliceAttrs(const std::string& id, const std::string& plmn, double g) {
  return {{"cellSliceId", id},
          {"rst", "eMBB"},
          {"networkIds", {{{"plmnId", plmn}, {"snssai", {{"sst", 1}, {"sd", "000001"}}}}}},
          {"authorisedLoad", gen::alEntry({gen::flowType(9, 8)}, g)}};
}

void fillCells(ModelStore& store) {
  store.createManagedObject(kRoot, ObjectKind::ManagedElement, {{"id", "ME#1"}, {"vendor", "v"}});
  store.createManagedObject(kMe, ObjectKind::GnbFunction, {{"id", "gNB#1"}, {"kind", "gNB"}});
  store.createManagedObject(kFn, ObjectKind::NrCell, cellAttrs("NRCell#1"));
}

std::string codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(toString(e.code()));
  }
  return "none";
}

bool hasRule(const std::vector<Violation>& vs, const std::string& rule) {
  for (const auto& v : vs)
    if (v.ruleId == rule) return true;
  return false;
}

}  // namespace

TEST_SUITE("nrm") {
  TEST_CASE("dn parse and print") {
    const auto dn = Dn::parse("Subnetwork=NH,ManagedElement=ME-PoP#1,GnbFunction=gNB#1,NrCell=NRCell#1");
    CHECK(dn.depth() == 4);
    CHECK((dn.leaf().kind == ObjectKind::NrCell));
    CHECK(dn.leaf().id == "NRCell#1");
    CHECK(dn.parent().str() == "Subnetwork=NH,ManagedElement=ME-PoP#1,GnbFunction=gNB#1");
    CHECK((Dn::parse(dn.str()) == dn));
    CHECK(codeOf([] { Dn::parse("Subnetwork=NH,Bogus=1"); }) == "ParseError");
    CHECK(codeOf([] { Dn::parse("Subnetwork"); }) == "ParseError");
    CHECK(codeOf([] { Dn::parse("Subnetwork=NH,NrCell="); }) == "ParseError");
  }

  TEST_CASE("containment") {
    CHECK(isLegalChild(ObjectKind::Subnetwork, ObjectKind::RanSlice));
    CHECK(isLegalChild(ObjectKind::NrCell, ObjectKind::CellSlice));
    CHECK_FALSE(isLegalChild(ObjectKind::GnbFunction, ObjectKind::CellSlice));
    ModelStore store("NH");
    fillCells(store);
    CHECK(codeOf([&] { store.createManagedObject(kFn, ObjectKind::CellSlice, sliceAttrs("CS", "001-01", 0.1)); }) ==
          "IllegalContainment");
    CHECK(codeOf([&] {
            store.createManagedObject(kMe.child(ObjectKind::GnbFunction, "nope"), ObjectKind::NrCell,
                                      cellAttrs("NRCell#9"));
          }) == "UnknownParent");
    CHECK(codeOf([&] { store.createManagedObject(kFn, ObjectKind::NrCell, cellAttrs("NRCell#1")); }) ==
          "InvariantViolation");
  }

  TEST_CASE("create, update and delete bump versions and audit") {
    ModelStore store("NH");
    fillCells(store);
    const auto v0 = store.version();
    const auto cs = store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-01", 0.7));
    CHECK(store.version() == v0 + 1);
    store.updateManagedObject(kCell, {{"txPowerDbm", 40.0}});
    CHECK(store.snapshot()->findCell("NRCell#1")->txPowerDbm == 40.0);
    store.deleteManagedObject(cs);
    CHECK(store.snapshot()->findCell("NRCell#1")->cellSlices.empty());
    const auto snap = store.snapshot();
    CHECK(snap->auditLog.size() == 6);
    CHECK(snap->auditLog.back().op == "delete");
    const auto replayed = replayAuditLog("NH", snap->settings, snap->auditLog);
    CHECK(sameTree(replayed, *snap));
  }

  TEST_CASE("read-only and immutable attributes") {
    ModelStore store("NH");
    fillCells(store);
    CHECK(codeOf([&] { store.updateManagedObject(kCell, {{"oversubscribed", true}}); }) ==
          "InvariantViolation");
    CHECK(codeOf([&] { store.updateManagedObject(kCell, {{"cellId", "X"}}); }) == "InvariantViolation");
    CHECK(codeOf([&] { store.updateManagedObject(kCell, {{"channelBandwidthMHz", 3}}); }) ==
          "InvariantViolation");
  }

  TEST_CASE("stale base version") {
    ModelStore store("NH");
    fillCells(store);
    const auto seen = store.snapshot()->objectVersions.at(kCell.str());
    store.updateManagedObject(kCell, {{"txPowerDbm", 20.0}}, seen);
    CHECK(codeOf([&] { store.updateManagedObject(kCell, {{"txPowerDbm", 21.0}}, seen); }) ==
          "StaleVersion");
  }

  TEST_CASE("cell slice PLMN must be served by the cell") {
    ModelStore store("NH");
    fillCells(store);
    try {
      store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-03", 0.5));
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(toString(e.code()) == "InvariantViolation");
      CHECK(e.details().dump().find("NRM-PLMN-NOT-SERVED") != std::string::npos);
    }
    store.updateManagedObject(kCell, {{"plmnList",
                                       {{{"plmnId", "001-01"}, {"exposedServices", {"PM"}}},
                                        {{"plmnId", "001-03"}, {"exposedServices", {"PM", "FM"}}}}}});
    store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-03", 0.5));
  }

  TEST_CASE("guarantee sums per flow type") {
    ModelStore store("NH");
    fillCells(store);
    store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-01", 0.7));
    store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#2", "001-01", 0.3));
    const auto sums = guaranteedSums(*store.snapshot()->findCell("NRCell#1"));
    REQUIRE(sums.size() == 1);
    CHECK(sums[0].guaranteedSum == doctest::Approx(1.0));
    CHECK(codeOf([&] {
            store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#3", "001-01", 0.01));
          }) == "InvariantViolation");
  }

  TEST_CASE("referential rules: orphan cell slice and dangling reference") {
    ModelStore store("NH");
    fillCells(store);
    store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-01", 0.2));
    CHECK(hasRule(store.validateModel(), "NRM-ORPHAN-CELLSLICE"));
    store.createManagedObject(
        kRoot, ObjectKind::RanSlice,
        {{"ranSliceId", "RSI#1"},
         {"cellSliceRefs", {{{"cellId", "NRCell#1"}, {"cellSliceId", "CellSlice#1"}},
                            {{"cellId", "NRCell#1"}, {"cellSliceId", "CellSlice#7"}}}},
         {"networkIds", {{{"plmnId", "001-01"}, {"snssai", {{"sst", 1}, {"sd", "000001"}}}}}}});
    const auto vs = store.validateModel();
    CHECK_FALSE(hasRule(vs, "NRM-ORPHAN-CELLSLICE"));
    CHECK(hasRule(vs, "NRM-DANGLING-REF"));
  }

  TEST_CASE("transactions are private until commit") {
    ModelStore store("NH");
    fillCells(store);
    auto tx = store.begin();
    tx.update(kCell, {{"txPowerDbm", 33.0}});
    CHECK(store.snapshot()->findCell("NRCell#1")->txPowerDbm == 0.0);
    store.commit(tx, CommitPolicy::LocalRules);
    CHECK(store.snapshot()->findCell("NRCell#1")->txPowerDbm == 33.0);

    auto a = store.begin();
    auto b = store.begin();
    a.update(kCell, {{"txPowerDbm", 1.0}});
    b.update(kCell, {{"txPowerDbm", 2.0}});
    store.commit(a, CommitPolicy::LocalRules);
    CHECK(codeOf([&] { store.commit(b, CommitPolicy::LocalRules); }) == "StaleVersion");
    CHECK(store.snapshot()->findCell("NRCell#1")->txPowerDbm == 1.0);
  }

  TEST_CASE("all-rules commit rejects new referential errors") {
    ModelStore store("NH");
    fillCells(store);
    auto tx = store.begin();
    tx.create(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-01", 0.2));
    const auto before = store.exportModel();
    CHECK(codeOf([&] { store.commit(tx, CommitPolicy::AllRules); }) == "InvariantViolation");
    CHECK(store.exportModel() == before);
  }

  TEST_CASE("subtree depth") {
    ModelStore store("NH");
    fillCells(store);
    store.createManagedObject(kCell, ObjectKind::CellSlice, sliceAttrs("CellSlice#1", "001-01", 0.2));
    const auto shallow = store.getModelTree(kFn, 0);
    CHECK(shallow["dn"] == kFn.str());
    CHECK_FALSE(shallow["tree"].contains("NrCell"));
    const auto deep = store.getModelTree(kFn, -1);
    CHECK(deep["tree"]["NrCell"][0]["CellSlice"][0]["cellSliceId"] == "CellSlice#1");
    CHECK(codeOf([&] { store.getModelTree(kFn.child(ObjectKind::NrCell, "nope")); }) == "UnknownObject");
  }
}

TEST_SUITE("codec") {
  TEST_CASE("load values") {
    using codec::LoadScope;
    CHECK(*codec::parseLoadValue("70%", "/g", LoadScope::Cell, std::nullopt) == doctest::Approx(0.7));
    CHECK(*codec::parseLoadValue(0.3, "/g", LoadScope::Cell, std::nullopt) == 0.3);
    CHECK(*codec::parseLoadValue(json{{"mbps", 50}}, "/g", LoadScope::Cell, 200.0) == 0.25);
    CHECK_FALSE(codec::parseLoadValue("N/A", "/g", LoadScope::Cell, std::nullopt));
    CHECK_FALSE(codec::parseLoadValue(nullptr, "/g", LoadScope::Cell, std::nullopt));
    CHECK(*codec::parseLoadValue(json{{"mbps", 50}}, "/g", LoadScope::Slice, std::nullopt) == 50.0);
    CHECK(codeOf([] { codec::parseLoadValue("70%", "/g", LoadScope::Slice, std::nullopt); }) ==
          "ParseError");
  }

  TEST_CASE("identifiers") {
    const auto p = codec::parsePlmnId("001-01", "/p");
    CHECK(p.mcc == "001");
    CHECK(p.mnc == "01");
    CHECK(codec::toJson(p) == json{{"mcc", "001"}, {"mnc", "01"}});
    const auto s = codec::parseSNssai({{"sst", 1}, {"sd", "00000A"}}, "/s");
    CHECK(*s.sd == 10);
    CHECK(codec::toJson(s)["sd"] == "00000A");
    CHECK(codeOf([] { codec::parseSNssai({{"sst", 1}, {"sd", "xyz"}}, "/s"); }) == "ParseError");
  }

  TEST_CASE("AL entry and KPI forms") {
    const auto e = codec::parseAuthorisedLoadEntry(
        {{"flowTypes", {{{"fiveQi", 9}, {"arp", 8}}}},
         {"guaranteedLoad", "70%"},
         {"maximumLoad", "N/A"},
         {"averagingWindowS", 10},
         {"notificationControl", "Enabled"}},
        "/al", codec::LoadScope::Cell, std::nullopt);
    CHECK(*e.guaranteedLoad == doctest::Approx(0.7));
    CHECK_FALSE(e.maximumLoad);
    CHECK((e.notificationControl == NotificationControl::Enabled));
    CHECK(codec::toJson(e)["maximumLoad"] == "N/A");
    const auto k = codec::parseTargetKpi({{"kpi", "blockedLoadRatio"}, {"threshold", 0.05}}, "/k");
    CHECK((k.direction == KpiDirection::AtMost));
    CHECK((codec::parseTargetKpi({{"kpi", "avgRateNonGbr"}, {"threshold", 1}}, "/k").direction ==
           KpiDirection::AtLeast));
  }

  TEST_CASE("unknown fields are rejected with their path") {
    try {
      codec::parseNrCell({{"cellId", "C"}, {"band", "B1"}, {"channelBandwidthMHz", 5}, {"colour", "red"}}, "/cell");
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(toString(e.code()) == "ParseError");
      CHECK(std::string(e.what()).find("colour") != std::string::npos);
    }
  }

  TEST_CASE("import reports invalid documents") {
    CHECK(codeOf([] { codec::importModel(std::string("{not json")); }) == "ParseError");
    json doc = {{"subnetwork",
                 {{"id", "X"},
                  {"ManagedElement",
                   {{{"id", "ME"}, {"GnbFunction", {{{"id", "DU"}, {"kind", "gNB-DU"}, {"cuRef", "CU#9"}}}}}}}}}};
    CHECK(codeOf([&] { codec::importModel(doc); }) == "InvariantViolation");
  }

  TEST_CASE("export then import is the identity on generated models") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
      CAPTURE(i);
      const auto doc = gen::randomModelDocument(rng);
      const Model m1 = codec::importModel(doc);
      const auto e1 = codec::exportModel(m1);
      const Model m2 = codec::importModel(e1);
      CHECK(sameTree(m1, m2));
      CHECK(codec::exportModel(m2).dump() == e1.dump());
    }
  }
}
