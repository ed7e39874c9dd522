#pragma once

// Simulated NG-RAN infrastructure and a minimal MANO: PoPs with NFVI
// capacity, RRHs with carrier slots, NSD templates and their instances.
//
// Infrastructure is a value type. Every mutating call computes on a copy and
// swaps it in on success, so a failed call leaves the state untouched.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ranslice/common/error.hpp"
#include "ranslice/nrm/types.hpp"

namespace ranslice::infra {

using VnfKind = nrm::GnbKind;

enum class PopKind { CellSite, Datacentre };

struct TransportLink {
  std::string peerPopId;
  double capacityMbps = 0.0;
  double latencyMs = 0.0;

  bool operator==(const TransportLink&) const = default;
};

struct Pop {
  std::string popId;
  PopKind kind = PopKind::Datacentre;
  int nfviCapacity = 0;  // abstract compute units
  std::vector<std::string> hostedRrhIds;
  std::vector<TransportLink> transportLinks;

  bool operator==(const Pop&) const = default;
};

struct Rrh {
  std::string rrhId;
  std::string sitePopId;
  std::vector<std::string> supportedBands;
  int maxCarriers = 1;

  bool operator==(const Rrh&) const = default;
};

struct VnfProfile {
  std::string vnfId;
  VnfKind kind = VnfKind::Gnb;
  int computeUnits = 0;  // 0 = use the per-kind default
  std::optional<std::string> placementConstraint;

  bool operator==(const VnfProfile&) const = default;
};

struct VirtualLink {
  std::string endpointA;  // VNF profile id or RRH id
  std::string endpointB;
  double requiredMbps = 0.0;

  bool operator==(const VirtualLink&) const = default;
};

struct ScalingRule {
  VnfKind kind = VnfKind::GnbDu;
  int maxInstances = 1;

  bool operator==(const ScalingRule&) const = default;
};

struct Nsd {
  std::string nsdId;
  std::vector<VnfProfile> vnfProfiles;
  std::vector<std::string> pnfRefs;
  std::vector<VirtualLink> virtualLinks;
  std::vector<ScalingRule> scalingRules;

  const VnfProfile* findProfile(const std::string& vnfId) const;
  bool operator==(const Nsd&) const = default;
};

struct VnfInstance {
  std::string vnfInstanceId;
  VnfKind kind = VnfKind::Gnb;
  std::string popId;
  int computeUnits = 0;

  bool operator==(const VnfInstance&) const = default;
};

struct LinkBinding {
  VirtualLink link;
  std::vector<std::string> path;  // PoP ids, endpoints included
  double latencyMs = 0.0;

  bool operator==(const LinkBinding&) const = default;
};

enum class NsState { Active };

struct NsInstance {
  std::string nsInstanceId;
  std::string nsdRef;
  Nsd descriptor;  // effective descriptor, including scale-out additions
  std::vector<VnfInstance> vnfInstances;
  std::vector<LinkBinding> linkBindings;
  NsState state = NsState::Active;

  const VnfInstance* findVnf(const std::string& vnfId) const;
  bool operator==(const NsInstance&) const = default;
};

struct CarrierBinding {
  std::string cellId;
  std::string nsInstanceId;
  std::string rrhId;
  std::string band;
  double bandwidthMHz = 0.0;
  std::string servingVnfId;

  bool operator==(const CarrierBinding&) const = default;
};

struct ReleaseReport {
  std::string nsInstanceId;
  std::map<std::string, int> computeUnitsByPop;
  int totalComputeUnits = 0;
  std::vector<std::string> releasedVnfs;
};

struct ComputeDefaults {
  int gnb = 4;
  int gnbCu = 2;
  int gnbDu = 2;

  int forKind(VnfKind k) const;
};

/// Placement hints: vnfId -> popId. Pins a VNF that the NSD leaves free.
using PlacementHints = std::map<std::string, std::string>;

struct ScaleRequest {
  VnfProfile addVnf;  // placementConstraint names the target PoP
  std::vector<VirtualLink> newLinks;
};

class Infrastructure {
 public:
  Infrastructure() = default;
  Infrastructure(std::vector<Pop> pops, std::vector<Rrh> rrhs, ComputeDefaults defaults = {});

  void registerNsd(Nsd nsd);
  const Nsd& nsd(const std::string& nsdId) const;

  const NsInstance& instantiateNs(const std::string& nsdId, const PlacementHints& hints = {},
                                  std::optional<std::string> nsInstanceId = std::nullopt);
  const NsInstance& scaleNs(const std::string& nsInstanceId, const ScaleRequest& request);
  /// Inverse of scaleNs for one VNF: removes it and the links touching it.
  void scaleIn(const std::string& nsInstanceId, const std::string& vnfId);
  ReleaseReport terminateNs(const std::string& nsInstanceId);

  const CarrierBinding& bindCellResources(const std::string& cellId, const std::string& nsInstanceId,
                                          const std::string& rrhId, const std::string& band,
                                          double bandwidthMHz,
                                          std::optional<std::string> servingVnfId = std::nullopt);
  void releaseCellResources(const std::string& cellId);

  const std::vector<Pop>& pops() const { return pops_; }
  const std::vector<Rrh>& rrhs() const { return rrhs_; }
  const Pop& pop(const std::string& popId) const;
  const Rrh& rrh(const std::string& rrhId) const;
  int freeCapacity(const std::string& popId) const;
  int usedCarriers(const std::string& rrhId) const;
  double freeLinkCapacity(const std::string& a, const std::string& b) const;
  const std::map<std::string, NsInstance>& instances() const { return instances_; }
  const NsInstance* findInstance(const std::string& id) const;
  const std::map<std::string, CarrierBinding>& bindings() const { return bindings_; }
  const CarrierBinding* bindingFor(const std::string& cellId) const;
  std::vector<std::string> cellsUsing(const std::string& nsInstanceId) const;
  const ComputeDefaults& computeDefaults() const { return defaults_; }

  /// Checks conservation (free + placed = initial per PoP), link
  /// feasibility and carrier accounting. Returns human-readable problems.
  std::vector<std::string> auditInvariants() const;

  json toJson() const;
  json instanceToJson(const NsInstance& ns) const;

  /// State equality. The instance-id counter is not part of the state.
  bool operator==(const Infrastructure& o) const;

 private:
  using LinkKey = std::pair<std::string, std::string>;
  static LinkKey linkKey(const std::string& a, const std::string& b);

  void validateNsd(const Nsd& nsd) const;
  std::string endpointPop(const NsInstance& ns, const std::string& endpoint) const;
  LinkBinding route(const NsInstance& ns, const VirtualLink& link);
  std::string place(const VnfProfile& profile, int units, const PlacementHints& hints) const;

  std::vector<Pop> pops_;
  std::vector<Rrh> rrhs_;
  ComputeDefaults defaults_;
  std::map<std::string, Nsd> nsds_;
  std::map<std::string, int> freeCapacity_;
  std::map<LinkKey, double> freeLinkMbps_;
  std::map<std::string, NsInstance> instances_;
  std::map<std::string, CarrierBinding> bindings_;  // by cellId
  int nextInstance_ = 1;
};

std::string toString(PopKind k);

json toJson(const Nsd& nsd);
Pop parsePop(const json& j, const std::string& path);
Rrh parseRrh(const json& j, const std::string& path);
Nsd parseNsd(const json& j, const std::string& path);
VirtualLink parseVirtualLink(const json& j, const std::string& path);
VnfProfile parseVnfProfile(const json& j, const std::string& path);
ComputeDefaults parseComputeDefaults(const json& j, const std::string& path);

}  // namespace ranslice::infra
