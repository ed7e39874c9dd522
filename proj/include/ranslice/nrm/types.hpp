#pragma once

// Managed object classes of the NG-RAN resource model with RAN slicing
// support: Subnetwork > ManagedElement > GnbFunction > NrCell > CellSlice,
// plus RanSlice under the Subnetwork.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ranslice::nrm {

struct PlmnId {
  std::string mcc;  // 3 digits
  std::string mnc;  // 2 or 3 digits

  std::string str() const { return mcc + "-" + mnc; }
  auto operator<=>(const PlmnId&) const = default;
};

struct SNssai {
  int sst = 0;
  std::optional<std::uint32_t> sd;  // 24-bit slice differentiator

  auto operator<=>(const SNssai&) const = default;
};

struct NetworkId {
  PlmnId plmn;
  SNssai snssai;

  auto operator<=>(const NetworkId&) const = default;
};

/// (5QI, ARP) pair. Unit key of Authorised Load scopes.
struct QosFlowType {
  int fiveQi = 9;
  int arp = 8;

  auto operator<=>(const QosFlowType&) const = default;
};

enum class NotificationControl { Enabled, Disabled };

/// One aggregate restriction. Loads are fractions of cell capacity when the
/// entry belongs to a CellSlice and absolute Mbps when it belongs to a
/// RanSlice. An absent maximum means no cap ("N/A").
struct AuthorisedLoadEntry {
  std::vector<QosFlowType> flowTypes;
  std::optional<double> guaranteedLoad;
  std::optional<double> maximumLoad;
  double averagingWindowS = 10.0;
  NotificationControl notificationControl = NotificationControl::Disabled;

  bool covers(const QosFlowType& ft) const;
  bool operator==(const AuthorisedLoadEntry&) const = default;
};

/// Empty means unrestricted.
using AuthorisedLoad = std::vector<AuthorisedLoadEntry>;

enum class ExposedService { PM, FM };

struct PlmnInfo {
  PlmnId plmnId;
  std::vector<ExposedService> exposedServices;

  bool exposes(ExposedService s) const;
  bool operator==(const PlmnInfo&) const = default;
};

struct CellSlice {
  std::string cellSliceId;
  std::string rst;
  std::vector<NetworkId> networkIds;
  AuthorisedLoad authorisedLoad;

  bool operator==(const CellSlice&) const = default;
};

struct NrCell {
  std::string cellId;
  std::string band;
  double channelBandwidthMHz = 5.0;
  double txPowerDbm = 0.0;
  bool barred = false;
  std::vector<PlmnInfo> plmnList;
  std::vector<CellSlice> cellSlices;  // insertion order
  std::string nsdRef;
  std::vector<std::string> sectorEquipmentRefs;
  std::vector<std::string> auxRefs;  // opaque SON / energy-saving / relation IOCs
  bool oversubscribed = false;

  const CellSlice* findSlice(const std::string& id) const;
  CellSlice* findSlice(const std::string& id);
  const PlmnInfo* findPlmn(const PlmnId& plmn) const;
  bool operator==(const NrCell&) const = default;
};

enum class GnbKind { Gnb, GnbCu, GnbDu };

struct GnbFunction {
  std::string id;
  GnbKind kind = GnbKind::Gnb;
  std::optional<std::string> cuRef;  // gNB-DU only
  std::vector<NrCell> cells;

  bool operator==(const GnbFunction&) const = default;
};

struct ManagedElement {
  std::string id;
  std::string vendor;
  std::vector<GnbFunction> functions;

  bool operator==(const ManagedElement&) const = default;
};

struct CellSliceRef {
  std::string cellId;
  std::string cellSliceId;

  auto operator<=>(const CellSliceRef&) const = default;
};

/// Expected aggregate load for one flow type, with a spatial split over cells.
struct PlannedLoadItem {
  QosFlowType flowType;
  double expectedMbps = 0.0;
  std::map<std::string, double> cellWeights;

  bool operator==(const PlannedLoadItem&) const = default;
};

enum class KpiName { AvgRateNonGbr, MinRateNonGbr, BlockedLoadRatio };
enum class KpiDirection { AtLeast, AtMost };

struct TargetKpi {
  KpiName name = KpiName::AvgRateNonGbr;
  double threshold = 0.0;
  KpiDirection direction = KpiDirection::AtLeast;

  bool operator==(const TargetKpi&) const = default;
};

enum class SliceState { Active, Terminated };

struct RanSlice {
  std::string ranSliceId;
  std::vector<CellSliceRef> cellSliceRefs;
  std::vector<NetworkId> networkIds;
  AuthorisedLoad authorisedLoad;  // slice-wide, absolute Mbps
  std::optional<std::vector<PlannedLoadItem>> plannedLoad;
  std::vector<TargetKpi> targetKpis;
  SliceState state = SliceState::Active;

  bool operator==(const RanSlice&) const = default;
};

struct Subnetwork {
  std::string id;
  std::vector<ManagedElement> managedElements;
  std::vector<RanSlice> ranSlices;

  bool operator==(const Subnetwork&) const = default;
};

std::string toString(GnbKind k);
std::string toString(KpiName k);
std::string toString(KpiDirection d);
std::string toString(NotificationControl c);
std::string toString(ExposedService s);
std::string toString(SliceState s);
std::string toString(const QosFlowType& ft);
std::string toString(const NetworkId& id);

/// Canonical key of an AL scope: sorted "5QI=9/ARP=8" tokens joined by ';'.
std::string scopeKey(std::vector<QosFlowType> flowTypes);

/// Default key for offered traffic that no AL entry of a slice covers.
inline constexpr const char* kUnscopedKey = "*";

}  // namespace ranslice::nrm
