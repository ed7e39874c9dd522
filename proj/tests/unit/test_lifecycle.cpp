#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>

#include "generators.hpp"
#include "ranslice/northbound/scenario.hpp"
#include "ranslice/northbound/service.hpp"

using namespace ranslice;
using namespace ranslice::northbound;

namespace {

json neutralHostDoc() {
  std::ifstream in(std::string(RANSLICE_SOURCE_DIR) + "/scenarios/neutral-host.scenario");
  return json::parse(in);
}

const json& timelineEvent(const json& doc, const std::string& operation, const std::string& id) {
  for (const auto& e : doc["eventTimeline"])
    if (e.value("operation", "") == operation && (e.value("ranSliceId", "") == id || e["request"].value("ranSliceId", "") == id))
      return e;
  throw std::runtime_error("no such event");
}

std::string codeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return std::string(toString(e.code()));
  }
  return "none";
}

struct NeutralHost {
  json doc = neutralHostDoc();
  Scenario scenario = parseScenario(doc);
  Service svc{scenario};

  void create(const std::string& id) { svc.lcm("createRsi", "", timelineEvent(doc, "createRsi", id)["request"]); }
  json scalePlan() const { return timelineEvent(doc, "scaleRsiCapacity", "RSI#2")["request"]; }
};

json createRequest(const std::string& tpl, const std::string& id, int plmn, int sd) {
  return {{"templateId", tpl},
          {"ranSliceId", id},
          {"networkIds", {{{"plmnId", gen::plmnJson(plmn)}, {"snssai", {{"sst", 1}, {"sd", sd}}}}}}};
}

bool feasible(const nrm::Model& m, bool allowOversubscribed) {
  for (const auto* cell : m.cells())
    for (const auto& g : nrm::guaranteedSums(*cell))
      if (g.guaranteedSum > 1.0 + nrm::kFeasibilityTolerance && !(allowOversubscribed && cell->oversubscribed))
        return false;
  return true;
}

}  // namespace

TEST_SUITE("lifecycle") {
  TEST_CASE("create from a template") {
    NeutralHost nh;
    nh.create("RSI#2");
    const auto m = nh.svc.model();
    const auto* rs = m->findRanSlice("RSI#2");
    REQUIRE(rs);
    CHECK(rs->cellSliceRefs.size() == 2);
    for (const char* c : {"NRCell#2", "NRCell#3"}) {
      const auto& cs = m->findCell(c)->cellSlices.at(0);
      CHECK(cs.rst == "eMBB");
      CHECK(*cs.authorisedLoad.at(0).guaranteedLoad == doctest::Approx(0.7));
    }
    const auto recs = nh.svc.lifecycle().records();
    REQUIRE(recs.size() == 1);
    CHECK((recs[0].status == lifecycle::LcmStatus::Completed));
    CHECK(recs[0].resultingVersion.has_value());
    CHECK(nh.svc.pmfm().dispatcher().log().back().type == notification_types::kLcmOperationCompleted);
    CHECK(nh.svc.store().validateModel().empty());
  }

  TEST_CASE("failures are recorded and leave the model alone") {
    NeutralHost nh;
    const auto before = nh.svc.exportModel().dump();
    CHECK(codeOf([&] { nh.svc.lcm("createRsi", "", createRequest("nope", "RSI#9", 2, 1)); }) == "UnknownTemplate");
    CHECK(codeOf([&] { nh.svc.lcm("modifyRsi", "RSI#9", json::object()); }) == "UnknownSlice");
    CHECK(codeOf([&] { nh.svc.lcm("terminateRsi", "RSI#9", json::object()); }) == "UnknownSlice");
    CHECK(codeOf([&] { nh.svc.lcm("createRsi", "", createRequest("embb-commercial", "RSI#9", 3, 1)); }) ==
          "InvariantViolation");  // PLMN 001-03 not served on the urban cells
    CHECK(nh.svc.exportModel().dump() == before);
    const auto recs = nh.svc.lifecycle().records();
    CHECK(recs.size() == 4);
    for (const auto& r : recs) CHECK(r.failure.has_value());
    CHECK(nh.svc.pmfm().dispatcher().log().back().type == notification_types::kLcmOperationFailed);
  }

  TEST_CASE("feasibility gate and forced admission") {
    NeutralHost nh;
    nh.create("RSI#2");
    const auto before = nh.svc.exportModel().dump();
    try {
      nh.svc.lcm("createRsi", "", createRequest("embb-commercial", "RSI#9", 2, 9));
      FAIL("admitted");
    } catch (const Error& e) {
      CHECK(toString(e.code()) == "GuaranteeInfeasible");
      CHECK(e.details().contains("opId"));
    }
    CHECK(nh.svc.exportModel().dump() == before);
    auto forced = createRequest("embb-commercial", "RSI#9", 2, 9);
    forced["force"] = true;
    nh.svc.lcm("createRsi", "", forced);
    const auto m = nh.svc.model();
    CHECK(m->findCell("NRCell#2")->oversubscribed);
    CHECK(m->findCell("NRCell#3")->oversubscribed);
    CHECK_FALSE(m->findCell("NRCell#1")->oversubscribed);
    nh.svc.lcm("terminateRsi", "RSI#9", json::object());
    CHECK_FALSE(nh.svc.model()->findCell("NRCell#2")->oversubscribed);
  }

  TEST_CASE("modify authorised load, coverage and network ids") {
    NeutralHost nh;
    nh.create("RSI#1");
    nh.svc.updateManagedObject("Subnetwork=NeutralHost,ManagedElement=ME-PoP#1,GnbFunction=gNB#1,NrCell=NRCell#1",
                               {{"plmnList",
                                 {{{"plmnId", "001-01"}, {"exposedServices", {"PM", "FM"}}},
                                  {{"plmnId", "001-03"}, {"exposedServices", {"PM"}}}}}});
    nh.svc.lcm("modifyRsi", "RSI#1", timelineEvent(nh.doc, "modifyRsi", "RSI#1")["request"]);
    auto m = nh.svc.model();
    CHECK(*m->findCell("NRCell#1")->cellSlices.at(0).authorisedLoad.at(0).guaranteedLoad == doctest::Approx(0.5));

    nh.svc.lcm("modifyRsi", "RSI#1",
               {{"networkIdChanges", {{"add", {{{"plmnId", "001-01"}, {"snssai", {{"sst", 3}, {"sd", "000002"}}}}}}}}});
    m = nh.svc.model();
    CHECK(m->findRanSlice("RSI#1")->networkIds.size() == 2);

    CHECK(codeOf([&] {
            nh.svc.lcm("modifyRsi", "RSI#1",
                       {{"addCellSlices", {{{"cellId", "NRCell#2"}}}}});  // PLMN A not on NRCell#2
          }) == "InvariantViolation");
    CHECK(codeOf([&] {
            nh.svc.lcm("modifyRsi", "RSI#1", {{"alChanges", {{{"authorisedLoad", gen::alEntry({gen::flowType(9, 12)}, 1.5)}}}}});
          }) != "none");
    CHECK(nh.svc.store().validateModel().empty());
  }

  TEST_CASE("scale-out with an explicit plan") {
    NeutralHost nh;
    nh.create("RSI#2");
    const auto r = nh.svc.lcm("scaleRsiCapacity", "RSI#2", nh.scalePlan());
    CHECK(r.record.summary["cellId"] == "NRCell#4");
    CHECK(r.record.summary["servingPopId"] == "PoP#3");
    const auto m = nh.svc.model();
    const auto* cell = m->findCell("NRCell#4");
    REQUIRE(cell);
    CHECK(cell->band == "B43");
    CHECK(cell->channelBandwidthMHz == 80);
    CHECK(m->servingFunction("NRCell#4")->id == "gNB-DU#5");
    CHECK(*m->servingFunction("NRCell#4")->cuRef == "gNB-CU#2");
    CHECK(m->findRanSlice("RSI#2")->cellSliceRefs.size() == 3);
    const auto infra = nh.svc.lifecycle().infrastructureSnapshot();
    CHECK(infra.findInstance("NS#2")->findVnf("gNB-DU#5")->popId == "PoP#3");
    CHECK(infra.bindingFor("NRCell#4")->rrhId == "RRH#3");
    CHECK(infra.auditInvariants().empty());
    CHECK(codeOf([&] { nh.svc.lcm("scaleRsiCapacity", "RSI#2", nh.scalePlan()); }) == "InvariantViolation");
  }

  TEST_CASE("every injected fault in scale-out rolls back completely") {
    NeutralHost nh;
    nh.create("RSI#2");
    const auto modelBefore = nh.svc.exportModel().dump();
    const auto infraBefore = nh.svc.lifecycle().infrastructureSnapshot();
    int injected = 0;
    for (int target = 0;; ++target) {
      int calls = 0;
      bool fired = false;
      nh.svc.lifecycle().setFaultInjector([&](const std::string& step) {
        if (step.rfind("compensate:", 0) == 0) return;
        if (calls++ == target) {
          fired = true;
          throw Error(ErrorCode::InjectedFault, "injected at " + step);
        }
      });
      try {
        nh.svc.lcm("scaleRsiCapacity", "RSI#2", nh.scalePlan());
      } catch (const Error& e) {
        CHECK(toString(e.code()) == "InjectedFault");
      }
      nh.svc.lifecycle().setFaultInjector({});
      if (!fired) break;
      ++injected;
      CAPTURE(target);
      CHECK(nh.svc.exportModel().dump() == modelBefore);
      CHECK((nh.svc.lifecycle().infrastructureSnapshot() == infraBefore));
      const auto rec = nh.svc.lifecycle().records().back();
      CHECK((rec.status == lifecycle::LcmStatus::RolledBack || rec.status == lifecycle::LcmStatus::Failed));
    }
    CHECK(injected >= 5);
    CHECK(nh.svc.model()->findCell("NRCell#4"));  // the unfaulted pass went through
  }

  TEST_CASE("a failing compensation is reported for manual repair") {
    NeutralHost nh;
    nh.create("RSI#2");
    const auto modelBefore = nh.svc.exportModel().dump();
    nh.svc.lifecycle().setFaultInjector([](const std::string& step) {
      if (step == "nrm.commit" || step == "compensate:infra.scaleNs")
        throw Error(ErrorCode::InjectedFault, "injected at " + step);
    });
    CHECK(codeOf([&] { nh.svc.lcm("scaleRsiCapacity", "RSI#2", nh.scalePlan()); }) == "CompensationFailed");
    CHECK((nh.svc.lifecycle().records().back().status == lifecycle::LcmStatus::PendingManual));
    CHECK(nh.svc.exportModel().dump() == modelBefore);
  }

  TEST_CASE("terminate releases dedicated resources") {
    NeutralHost nh;
    nh.create("RSI#2");
    nh.create("RSI#3");
    nh.svc.lcm("scaleRsiCapacity", "RSI#2", nh.scalePlan());
    nh.svc.lcm("terminateRsi", "RSI#2", json::object());
    const auto m = nh.svc.model();
    CHECK_FALSE(m->findRanSlice("RSI#2"));
    CHECK_FALSE(m->findCell("NRCell#4"));
    CHECK(m->findCell("NRCell#2")->cellSlices.size() == 1);
    const auto infra = nh.svc.lifecycle().infrastructureSnapshot();
    CHECK_FALSE(infra.bindingFor("NRCell#4"));
    CHECK(infra.findInstance("NS#2"));  // still realizes NRCell#2 and #3
    CHECK(infra.auditInvariants().empty());
    CHECK(nh.svc.store().validateModel().empty());
  }

  TEST_CASE("random LCM sequences keep guarantees feasible") {
    const auto scenario = parseScenario(gen::lcmFixtureScenario(3));
    const auto pool = gen::flowTypePool();
    for (bool force : {false, true}) {
      std::mt19937_64 rng(force ? 99 : 17);
      Service svc(scenario);
      // Cells left without slices are deleted on terminate; an anchor keeps them.
      svc.lcm("createRsi", "", createRequest("mMTC", "RSI#anchor", 1, 0));
      std::vector<std::string> live;
      int seq = 0, oversubscribed = 0;
      for (int i = 0; i < 300; ++i) {
        const int op = gen::pick(rng, 0, 3);
        try {
          if (op <= 1 || live.empty()) {
            const std::string id = "RSI#" + std::to_string(++seq);
            auto req = createRequest(std::vector<std::string>{"eMBB", "URLLC", "mMTC"}[gen::pick(rng, 0, 2)], id,
                                     gen::pick(rng, 1, 3), seq);
            req["authorisedLoad"] = gen::alEntry({pool[gen::pick(rng, 0, 2)]}, 0.05 * gen::pick(rng, 1, 14));
            json cells = json::array();
            for (int c = 1; c <= 3; ++c)
              if (gen::coin(rng)) cells.push_back("NRCell#" + std::to_string(c));
            if (!cells.empty()) req["cells"] = cells;
            req["force"] = force && gen::coin(rng);
            svc.lcm("createRsi", "", req);
            live.push_back(id);
          } else if (op == 2) {
            const auto id = live[gen::pick(rng, 0, static_cast<int>(live.size()) - 1)];
            svc.lcm("modifyRsi", id,
                    {{"alChanges", {{{"authorisedLoad", gen::alEntry({pool[gen::pick(rng, 0, 2)]}, 0.05 * gen::pick(rng, 1, 14))}}}},
                     {"force", force && gen::coin(rng)}});
          } else {
            const auto k = gen::pick(rng, 0, static_cast<int>(live.size()) - 1);
            svc.lcm("terminateRsi", live[k], json::object());
            live.erase(live.begin() + k);
          }
        } catch (const Error&) {
        }
        const auto m = svc.model();
        REQUIRE(feasible(*m, force));
        for (const auto* cell : m->cells()) oversubscribed += cell->oversubscribed;
        REQUIRE(svc.store().validateModel().empty());
      }
      if (force)
        CHECK(oversubscribed > 0);
      else
        CHECK(oversubscribed == 0);
    }
  }

  TEST_CASE("templates") {
    NeutralHost nh;
    CHECK(nh.svc.lifecycle().templates().size() == 4);
    CHECK(codeOf([&] { nh.svc.registerTemplate({{"templateId", "x"}, {"rst", "XR"}, {"coverage", {{"cells", {"NRCell#1"}}}}}); }) ==
          "RstUnknown");
    nh.svc.registerTemplate({{"templateId", "x"}, {"rst", "eMBB"}, {"coverage", {{"cells", {"NRCell#1"}}}}});
    CHECK(nh.svc.lifecycle().findTemplate("x").rst == "eMBB");
    CHECK(codeOf([&] { nh.svc.lifecycle().findTemplate("y"); }) == "UnknownTemplate");
  }
}
