#include "ranslice/nrm/types.hpp"

#include <algorithm>
#include <cstdio>

namespace ranslice::nrm {

bool AuthorisedLoadEntry::covers(const QosFlowType& ft) const {
  return std::find(flowTypes.begin(), flowTypes.end(), ft) != flowTypes.end();
}

bool PlmnInfo::exposes(ExposedService s) const {
  return std::find(exposedServices.begin(), exposedServices.end(), s) != exposedServices.end();
}

const CellSlice* NrCell::findSlice(const std::string& id) const {
  for (const auto& s : cellSlices)
    if (s.cellSliceId == id) return &s;
  return nullptr;
}

CellSlice* NrCell::findSlice(const std::string& id) {
  for (auto& s : cellSlices)
    if (s.cellSliceId == id) return &s;
  return nullptr;
}

const PlmnInfo* NrCell::findPlmn(const PlmnId& plmn) const {
  for (const auto& p : plmnList)
    if (p.plmnId == plmn) return &p;
  return nullptr;
}

std::string toString(GnbKind k) {
  switch (k) {
    case GnbKind::Gnb: return "gNB";
    case GnbKind::GnbCu: return "gNB-CU";
    case GnbKind::GnbDu: return "gNB-DU";
  }
  return "?";
}

std::string toString(KpiName k) {
  switch (k) {
    case KpiName::AvgRateNonGbr: return "avgRateNonGbr";
    case KpiName::MinRateNonGbr: return "minRateNonGbr";
    case KpiName::BlockedLoadRatio: return "blockedLoadRatio";
  }
  return "?";
}

std::string toString(KpiDirection d) { return d == KpiDirection::AtLeast ? ">=" : "<="; }

std::string toString(NotificationControl c) {
  return c == NotificationControl::Enabled ? "Enabled" : "Disabled";
}

std::string toString(ExposedService s) { return s == ExposedService::PM ? "PM" : "FM"; }

std::string toString(SliceState s) { return s == SliceState::Active ? "ACTIVE" : "TERMINATED"; }

std::string toString(const QosFlowType& ft) {
  return "5QI=" + std::to_string(ft.fiveQi) + "/ARP=" + std::to_string(ft.arp);
}

std::string toString(const NetworkId& id) {
  std::string out = id.plmn.str() + ":" + std::to_string(id.snssai.sst);
  if (id.snssai.sd) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06X", *id.snssai.sd);
    out += "-";
    out += buf;
  }
  return out;
}

std::string scopeKey(std::vector<QosFlowType> flowTypes) {
  std::sort(flowTypes.begin(), flowTypes.end());
  std::string out;
  for (const auto& ft : flowTypes) {
    if (!out.empty()) out += ";";
    out += toString(ft);
  }
  return out;
}

}  // namespace ranslice::nrm
