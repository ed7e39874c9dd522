#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace gen {

using json = nlohmann::json;

inline int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
inline bool coin(std::mt19937_64& rng, double p = 0.5) { return unit(rng) < p; }

inline json plmnJson(int n) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", n);
  return {{"mcc", "001"}, {"mnc", buf}};
}

inline json flowType(int q, int a) { return {{"fiveQi", q}, {"arp", a}}; }

/// Flow types drawn from a small pool so scopes collide across slices.
inline std::vector<json> flowTypePool() {
  return {flowType(9, 8), flowType(8, 9), flowType(7, 5), flowType(69, 2), flowType(79, 5), flowType(1, 3)};
}

/// A valid import document: random MEs, gNB/CU/DU functions, cells, cell
/// slices with cell-scope AL (feasible per flow type) and RAN slices owning
/// every cell slice.
inline json randomModelDocument(std::mt19937_64& rng) {
  const auto pool = flowTypePool();
  const std::vector<std::string> rsts{"eMBB", "URLLC", "mMTC"};
  const std::vector<std::string> bands{"B1", "B3", "B28", "B42", "B43", "n78"};
  json mes = json::array();
  int fnSeq = 0, cellSeq = 0;
  std::vector<std::string> cus;
  struct Owned {
    std::string cellId, cellSliceId;
    json networkId;
  };
  std::vector<Owned> cellSlices;

  const int nMe = pick(rng, 1, 3);
  for (int m = 0; m < nMe; ++m) {
    json fns = json::array();
    const int nFn = pick(rng, 1, 3);
    for (int f = 0; f < nFn; ++f) {
      const std::string id = "gNB#" + std::to_string(++fnSeq);
      json fn{{"id", id}};
      int kind = pick(rng, 0, 2);
      if (kind == 2 && cus.empty()) kind = 0;
      if (kind == 1) {
        fn["kind"] = "gNB-CU";
        cus.push_back(id);
        fns.push_back(fn);
        continue;
      }
      fn["kind"] = kind == 0 ? "gNB" : "gNB-DU";
      if (kind == 2) fn["cuRef"] = cus[pick(rng, 0, static_cast<int>(cus.size()) - 1)];
      json cells = json::array();
      const int nCell = pick(rng, 0, 3);
      for (int c = 0; c < nCell; ++c) {
        const std::string cellId = "NRCell#" + std::to_string(++cellSeq);
        json plmns = json::array();
        const int nPlmn = pick(rng, 1, 3);
        for (int p = 1; p <= nPlmn; ++p) {
          json services = json::array();
          if (coin(rng, 0.8)) services.push_back("PM");
          if (coin(rng, 0.8)) services.push_back("FM");
          plmns.push_back({{"plmnId", plmnJson(p)}, {"exposedServices", services}});
        }
        json slices = json::array();
        std::vector<double> budget(pool.size(), 1.0);
        const int nCs = pick(rng, 0, 3);
        for (int s = 1; s <= nCs; ++s) {
          json al = json::array();
          std::vector<bool> used(pool.size(), false);
          const int nEntries = pick(rng, 0, 2);
          for (int e = 0; e < nEntries; ++e) {
            json fts = json::array();
            std::vector<std::size_t> idx;
            for (std::size_t k = 0; k < pool.size(); ++k)
              if (!used[k] && coin(rng, 0.3)) idx.push_back(k);
            if (idx.empty()) continue;
            double room = 1.0;
            for (auto k : idx) room = std::min(room, budget[k]);
            const double g = std::floor(unit(rng) * room * 1000.0) / 1000.0;
            for (auto k : idx) {
              used[k] = true;
              budget[k] -= g;
              fts.push_back(pool[k]);
            }
            json entry{{"flowTypes", fts},
                       {"guaranteedLoad", g},
                       {"averagingWindowS", pick(rng, 1, 30)},
                       {"notificationControl", coin(rng) ? "Enabled" : "Disabled"}};
            entry["maximumLoad"] = coin(rng) ? json("N/A") : json(std::min(1.0, g + unit(rng) * (1.0 - g)));
            al.push_back(entry);
          }
          const int plmn = pick(rng, 1, nPlmn);
          json nid{{"plmnId", plmnJson(plmn)}, {"snssai", {{"sst", pick(rng, 1, 4)}, {"sd", pick(rng, 0, 0xFFFFFF)}}}};
          const std::string csId = "CellSlice#" + std::to_string(s);
          slices.push_back({{"cellSliceId", csId},
                            {"rst", rsts[pick(rng, 0, 2)]},
                            {"networkIds", json::array({nid})},
                            {"authorisedLoad", al}});
          cellSlices.push_back({cellId, csId, nid});
        }
        cells.push_back({{"cellId", cellId},
                         {"band", bands[pick(rng, 0, static_cast<int>(bands.size()) - 1)]},
                         {"channelBandwidthMHz", 5 * pick(rng, 1, 20)},
                         {"txPowerDbm", pick(rng, 10, 46) + 0.5 * pick(rng, 0, 1)},
                         {"barred", coin(rng, 0.1)},
                         {"plmnList", plmns},
                         {"nsdRef", coin(rng) ? "NSD#1" : ""},
                         {"sectorEquipmentRefs", json::array({"RRH#" + std::to_string(pick(rng, 1, 5))})},
                         {"auxRefs", coin(rng, 0.2) ? json::array({"EnergySaving#1"}) : json::array()},
                         {"CellSlice", slices}});
      }
      fn["NrCell"] = cells;
      fns.push_back(fn);
    }
    mes.push_back({{"id", "ME#" + std::to_string(m + 1)}, {"vendor", "vendor-" + std::to_string(pick(rng, 1, 3))},
                   {"GnbFunction", fns}});
  }

  // Partition the cell slices among RAN slices.
  json ranSlices = json::array();
  std::shuffle(cellSlices.begin(), cellSlices.end(), rng);
  std::size_t i = 0;
  int rsSeq = 0;
  while (i < cellSlices.size()) {
    const std::size_t take = std::min<std::size_t>(cellSlices.size() - i, pick(rng, 1, 3));
    json refs = json::array(), nids = json::array();
    for (std::size_t k = i; k < i + take; ++k) {
      refs.push_back({{"cellId", cellSlices[k].cellId}, {"cellSliceId", cellSlices[k].cellSliceId}});
      if (std::find(nids.begin(), nids.end(), cellSlices[k].networkId) == nids.end())
        nids.push_back(cellSlices[k].networkId);
    }
    i += take;
    json rs{{"ranSliceId", "RSI#" + std::to_string(++rsSeq)}, {"cellSliceRefs", refs}, {"networkIds", nids},
            {"authorisedLoad", json::array()}, {"targetKpis", json::array()}};
    if (coin(rng, 0.4))
      rs["targetKpis"].push_back({{"kpi", "avgRateNonGbr"}, {"threshold", pick(rng, 1, 500)}, {"direction", ">="}});
    if (coin(rng, 0.3))
      rs["plannedLoad"] = json::array({{{"flowType", pool[0]},
                                        {"expectedMbps", pick(rng, 0, 800)},
                                        {"cellWeights", {{refs[0]["cellId"].get<std::string>(), 1.0}}}}});
    if (coin(rng, 0.3))
      rs["authorisedLoad"].push_back({{"flowTypes", json::array({pool[pick(rng, 0, 5)]})},
                                      {"guaranteedLoad", {{"mbps", pick(rng, 0, 100)}}},
                                      {"maximumLoad", "N/A"},
                                      {"averagingWindowS", 10},
                                      {"notificationControl", "Enabled"}});
    ranSlices.push_back(rs);
  }
  return {{"subnetwork", {{"id", "Gen"}, {"ManagedElement", mes}, {"RanSlice", ranSlices}}}};
}

/// Scenario document with `cells` gNB cells of 100 Mbps each on one PoP,
/// three PLMNs on every cell, and a template per RST with no AL.
inline json lcmFixtureScenario(int cells) {
  json nrCells = json::array();
  json bindings = json::array();
  json rrhs = json::array();
  json rrhIds = json::array();
  json links = json::array();
  json pnfs = json::array();
  std::vector<std::string> cellIds;
  for (int c = 1; c <= cells; ++c) {
    const std::string id = "NRCell#" + std::to_string(c);
    const std::string rrh = "RRH#" + std::to_string(c);
    cellIds.push_back(id);
    json plmns = json::array();
    for (int p = 1; p <= 3; ++p) plmns.push_back({{"plmnId", plmnJson(p)}, {"exposedServices", {"PM", "FM"}}});
    nrCells.push_back({{"cellId", id}, {"band", "B42"}, {"channelBandwidthMHz", 20}, {"txPowerDbm", 30},
                       {"plmnList", plmns}, {"nsdRef", "NSD#1"}, {"sectorEquipmentRefs", {rrh}}});
    bindings.push_back({{"cellId", id}, {"nsInstanceId", "NS#1"}, {"rrhId", rrh}});
    rrhs.push_back({{"rrhId", rrh}, {"sitePopId", "PoP#1"}, {"supportedBands", {"B42", "B43"}}, {"maxCarriers", 2}});
    rrhIds.push_back(rrh);
    pnfs.push_back(rrh);
    links.push_back({{"endpointA", rrh}, {"endpointB", "gNB#1"}, {"requiredMbps", 100}});
  }
  json templates = json::array();
  for (const char* rst : {"eMBB", "URLLC", "mMTC"})
    templates.push_back({{"templateId", rst}, {"rst", rst}, {"coverage", {{"cells", cellIds}}}});
  return {
      {"name", "lcm-fixture"},
      {"simConfig", {{"tickDurationS", 1}, {"spectralEfficiency", 5.0}}},
      {"rstCatalog", {"eMBB", "URLLC", "mMTC"}},
      {"infrastructure",
       {{"pops", json::array({{{"popId", "PoP#1"}, {"kind", "cellSite"}, {"nfviCapacity", 64},
                               {"hostedRrhIds", rrhIds}, {"transportLinks", json::array()}}})},
        {"rrhs", rrhs}}},
      {"nsds", json::array({{{"nsdId", "NSD#1"},
                             {"vnfProfiles", json::array({{{"vnfId", "gNB#1"}, {"kind", "gNB"}, {"placement", "PoP#1"}}})},
                             {"pnfRefs", pnfs},
                             {"virtualLinks", links},
                             {"scalingRules", json::array({{{"kind", "gNB-DU"}, {"maxInstances", 4}}})}}})},
      {"nsInstances", json::array({{{"nsdId", "NSD#1"}, {"nsInstanceId", "NS#1"}}})},
      {"initialModel",
       {{"subnetwork",
         {{"id", "Fixture"},
          {"ManagedElement",
           json::array({{{"id", "ME#1"},
                         {"vendor", "vendor-a"},
                         {"GnbFunction", json::array({{{"id", "gNB#1"}, {"kind", "gNB"}, {"NrCell", nrCells}}})}}})}}}}},
      {"cellBindings", bindings},
      {"templates", templates},
      {"eventTimeline", json::array()}};
}

/// Cell-scope AL with one entry over `flowTypes`.
inline json alEntry(const std::vector<json>& flowTypes, double guaranteed, const char* control = "Enabled") {
  return json::array({{{"flowTypes", flowTypes},
                       {"guaranteedLoad", guaranteed},
                       {"maximumLoad", "N/A"},
                       {"averagingWindowS", 10},
                       {"notificationControl", control}}});
}

}  // namespace gen
