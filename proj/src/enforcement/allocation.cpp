#include "ranslice/enforcement/allocation.hpp"

#include <algorithm>

#include "ranslice/nrm/codec.hpp"

namespace ranslice::enforcement {

std::vector<double> allocate(const std::vector<Aggregate>& aggregates, double capacity) {
  const std::size_t n = aggregates.size();
  std::vector<double> floors(n), residual(n);
  capacity = std::max(0.0, capacity);
  double floorSum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = aggregates[i];
    const double d = std::max(0.0, a.demand);
    const double cap = a.maximum == kUnlimited ? d : std::min(d, a.maximum * capacity);
    floors[i] = std::min(cap, a.guaranteed * capacity);
    residual[i] = cap - floors[i];
    floorSum += floors[i];
  }
  if (floorSum > capacity) {
    const double scale = floorSum > 0 ? capacity / floorSum : 0.0;
    for (auto& f : floors) f *= scale;
    return floors;
  }
  const double spare = capacity - floorSum;
  double residualSum = 0.0;
  for (double r : residual) residualSum += r;
  std::vector<double> served(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (residualSum <= spare)
      served[i] = floors[i] + residual[i];
    else
      served[i] = floors[i] + spare * (residual[i] / residualSum);
  }
  return served;
}

AllocationResult allocateCapacity(const nrm::NrCell& cell, double capacityMbps, double degradationFactor,
                                  const std::map<std::string, OfferedByFlowType>& offered) {
  AllocationResult out;
  out.cellId = cell.cellId;
  out.capacityMbps = capacityMbps;
  out.degradationFactor = std::clamp(degradationFactor, 0.0, 1.0);
  out.effectiveCapacityMbps = capacityMbps * out.degradationFactor;

  std::vector<Aggregate> aggs;
  for (const auto& cs : cell.cellSlices) {
    const auto it = offered.find(cs.cellSliceId);
    const OfferedByFlowType empty;
    const OfferedByFlowType& load = it == offered.end() ? empty : it->second;

    std::vector<AggregateResult> local;
    for (std::size_t e = 0; e < cs.authorisedLoad.size(); ++e) {
      const auto& entry = cs.authorisedLoad[e];
      AggregateResult r;
      r.cellSliceId = cs.cellSliceId;
      r.scope = nrm::scopeKey(entry.flowTypes);
      r.flowTypes = entry.flowTypes;
      r.alEntry = e;
      local.push_back(r);
    }
    AggregateResult unscoped;
    unscoped.cellSliceId = cs.cellSliceId;
    unscoped.scope = nrm::kUnscopedKey;
    for (const auto& [ft, mbps] : load) {
      const double v = std::max(0.0, mbps);
      bool placed = false;
      for (auto& r : local)
        if (cs.authorisedLoad[*r.alEntry].covers(ft)) {
          r.offered += v;
          r.offeredByFlowType[ft] += v;
          placed = true;
          break;
        }
      if (!placed) {
        unscoped.offered += v;
        unscoped.offeredByFlowType[ft] += v;
        if (std::find(unscoped.flowTypes.begin(), unscoped.flowTypes.end(), ft) == unscoped.flowTypes.end())
          unscoped.flowTypes.push_back(ft);
      }
    }
    if (!unscoped.flowTypes.empty()) local.push_back(unscoped);

    for (auto& r : local) {
      Aggregate a;
      a.demand = r.offered;
      if (r.alEntry) {
        const auto& entry = cs.authorisedLoad[*r.alEntry];
        a.guaranteed = entry.guaranteedLoad.value_or(0.0);
        a.maximum = entry.maximumLoad.value_or(kUnlimited);
        r.guaranteedTarget = std::min(r.offered, a.guaranteed * capacityMbps);
        r.floor = std::min(r.offered, a.guaranteed * out.effectiveCapacityMbps);
      }
      aggs.push_back(a);
      out.aggregates.push_back(std::move(r));
    }
  }

  const auto served = allocate(aggs, out.effectiveCapacityMbps);
  for (std::size_t i = 0; i < served.size(); ++i) {
    auto& r = out.aggregates[i];
    r.served = std::min(served[i], r.offered);
    r.blocked = std::max(0.0, r.offered - r.served);
    for (const auto& [ft, mbps] : r.offeredByFlowType)
      r.servedByFlowType[ft] = r.offered > 0 ? r.served * (mbps / r.offered) : 0.0;
    out.offered += r.offered;
    out.served += r.served;
    out.blocked += r.blocked;
  }
  return out;
}

json AllocationResult::toJson() const {
  json aggs = json::array();
  for (const auto& a : aggregates) {
    aggs.push_back({{"cellSliceId", a.cellSliceId},
                    {"scope", a.scope},
                    {"offered", a.offered},
                    {"guaranteedTarget", a.guaranteedTarget},
                    {"served", a.served},
                    {"blocked", a.blocked}});
  }
  return {{"cellId", cellId},
          {"capacityMbps", capacityMbps},
          {"degradationFactor", degradationFactor},
          {"effectiveCapacityMbps", effectiveCapacityMbps},
          {"aggregates", aggs},
          {"offered", offered},
          {"served", served},
          {"blocked", blocked}};
}

}  // namespace ranslice::enforcement
