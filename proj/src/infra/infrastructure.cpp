#include "ranslice/infra/infrastructure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::infra {

namespace {

constexpr double kMbpsEps = 1e-9;

bool isRadioFunction(VnfKind k) { return k == VnfKind::Gnb || k == VnfKind::GnbDu; }

}  // namespace

std::string toString(PopKind k) { return k == PopKind::CellSite ? "cellSite" : "datacentre"; }

int ComputeDefaults::forKind(VnfKind k) const {
  switch (k) {
    case VnfKind::Gnb: return gnb;
    case VnfKind::GnbCu: return gnbCu;
    case VnfKind::GnbDu: return gnbDu;
  }
  return 0;
}

const VnfProfile* Nsd::findProfile(const std::string& vnfId) const {
  for (const auto& p : vnfProfiles)
    if (p.vnfId == vnfId) return &p;
  return nullptr;
}

const VnfInstance* NsInstance::findVnf(const std::string& vnfId) const {
  for (const auto& v : vnfInstances)
    if (v.vnfInstanceId == vnfId) return &v;
  return nullptr;
}

Infrastructure::LinkKey Infrastructure::linkKey(const std::string& a, const std::string& b) {
  return a < b ? LinkKey{a, b} : LinkKey{b, a};
}

Infrastructure::Infrastructure(std::vector<Pop> pops, std::vector<Rrh> rrhs, ComputeDefaults defaults)
    : pops_(std::move(pops)), rrhs_(std::move(rrhs)), defaults_(defaults) {
  std::sort(pops_.begin(), pops_.end(), [](const Pop& a, const Pop& b) { return a.popId < b.popId; });
  for (const auto& p : pops_) {
    if (freeCapacity_.count(p.popId))
      throw Error(ErrorCode::ScenarioValidationError, "duplicate PoP '" + p.popId + "'");
    if (p.nfviCapacity < 0)
      throw Error(ErrorCode::ScenarioValidationError, p.popId + ": nfviCapacity must be >= 0");
    freeCapacity_[p.popId] = p.nfviCapacity;
  }
  for (const auto& p : pops_) {
    for (const auto& l : p.transportLinks) {
      if (!freeCapacity_.count(l.peerPopId))
        throw Error(ErrorCode::ScenarioValidationError,
                    p.popId + ": transport link to unknown PoP '" + l.peerPopId + "'");
      if (l.peerPopId == p.popId)
        throw Error(ErrorCode::ScenarioValidationError, p.popId + ": transport link to itself");
      if (l.capacityMbps < 0 || l.latencyMs < 0)
        throw Error(ErrorCode::ScenarioValidationError,
                    p.popId + ": transport link capacity and latency must be >= 0");
      const auto& peer = pop(l.peerPopId);
      auto back = std::find_if(peer.transportLinks.begin(), peer.transportLinks.end(),
                               [&](const TransportLink& t) { return t.peerPopId == p.popId; });
      if (back == peer.transportLinks.end() || back->capacityMbps != l.capacityMbps ||
          back->latencyMs != l.latencyMs)
        throw Error(ErrorCode::ScenarioValidationError,
                    "transport link " + p.popId + " <-> " + l.peerPopId + " is not declared symmetrically");
      freeLinkMbps_[linkKey(p.popId, l.peerPopId)] = l.capacityMbps;
    }
  }
  std::set<std::string> seen;
  for (const auto& r : rrhs_) {
    if (!seen.insert(r.rrhId).second)
      throw Error(ErrorCode::ScenarioValidationError, "duplicate RRH '" + r.rrhId + "'");
    if (!freeCapacity_.count(r.sitePopId))
      throw Error(ErrorCode::ScenarioValidationError, r.rrhId + ": unknown site PoP '" + r.sitePopId + "'");
    if (r.supportedBands.empty())
      throw Error(ErrorCode::ScenarioValidationError, r.rrhId + ": supportedBands must not be empty");
    if (r.maxCarriers < 1)
      throw Error(ErrorCode::ScenarioValidationError, r.rrhId + ": maxCarriers must be >= 1");
  }
}

bool Infrastructure::operator==(const Infrastructure& o) const {
  return pops_ == o.pops_ && rrhs_ == o.rrhs_ && nsds_ == o.nsds_ && freeCapacity_ == o.freeCapacity_ &&
         freeLinkMbps_ == o.freeLinkMbps_ && instances_ == o.instances_ && bindings_ == o.bindings_ &&
         defaults_.gnb == o.defaults_.gnb && defaults_.gnbCu == o.defaults_.gnbCu &&
         defaults_.gnbDu == o.defaults_.gnbDu;
}

const Pop& Infrastructure::pop(const std::string& popId) const {
  for (const auto& p : pops_)
    if (p.popId == popId) return p;
  throw Error(ErrorCode::NotFound, "unknown PoP '" + popId + "'", {{"popId", popId}});
}

const Rrh& Infrastructure::rrh(const std::string& rrhId) const {
  for (const auto& r : rrhs_)
    if (r.rrhId == rrhId) return r;
  throw Error(ErrorCode::UnknownRrh, "unknown RRH '" + rrhId + "'", {{"rrhId", rrhId}});
}

int Infrastructure::freeCapacity(const std::string& popId) const {
  auto it = freeCapacity_.find(popId);
  if (it == freeCapacity_.end())
    throw Error(ErrorCode::NotFound, "unknown PoP '" + popId + "'", {{"popId", popId}});
  return it->second;
}

int Infrastructure::usedCarriers(const std::string& rrhId) const {
  int n = 0;
  for (const auto& [_, b] : bindings_)
    if (b.rrhId == rrhId) ++n;
  return n;
}

double Infrastructure::freeLinkCapacity(const std::string& a, const std::string& b) const {
  auto it = freeLinkMbps_.find(linkKey(a, b));
  return it == freeLinkMbps_.end() ? 0.0 : it->second;
}

const NsInstance* Infrastructure::findInstance(const std::string& id) const {
  auto it = instances_.find(id);
  return it == instances_.end() ? nullptr : &it->second;
}

const CarrierBinding* Infrastructure::bindingFor(const std::string& cellId) const {
  auto it = bindings_.find(cellId);
  return it == bindings_.end() ? nullptr : &it->second;
}

std::vector<std::string> Infrastructure::cellsUsing(const std::string& nsInstanceId) const {
  std::vector<std::string> out;
  for (const auto& [cellId, b] : bindings_)
    if (b.nsInstanceId == nsInstanceId) out.push_back(cellId);
  return out;
}

void Infrastructure::registerNsd(Nsd nsd) {
  validateNsd(nsd);
  nsds_[nsd.nsdId] = std::move(nsd);
}

const Nsd& Infrastructure::nsd(const std::string& nsdId) const {
  auto it = nsds_.find(nsdId);
  if (it == nsds_.end()) throw Error(ErrorCode::UnknownNsd, "unknown NSD '" + nsdId + "'", {{"nsdId", nsdId}});
  return it->second;
}

void Infrastructure::validateNsd(const Nsd& nsd) const {
  auto bad = [&](const std::string& msg) {
    throw Error(ErrorCode::InvariantViolation, nsd.nsdId + ": " + msg, {{"nsdId", nsd.nsdId}});
  };
  if (nsd.nsdId.empty()) bad("nsdId must not be empty");
  std::set<std::string> ids;
  for (const auto& p : nsd.vnfProfiles) {
    if (p.vnfId.empty()) bad("VNF profile without vnfId");
    if (!ids.insert(p.vnfId).second) bad("duplicate VNF profile '" + p.vnfId + "'");
    if (p.computeUnits < 0) bad(p.vnfId + ": computeUnits must be >= 0");
    if (p.placementConstraint && !freeCapacity_.count(*p.placementConstraint))
      bad(p.vnfId + ": placement constraint names unknown PoP '" + *p.placementConstraint + "'");
  }
  std::set<std::string> pnfs(nsd.pnfRefs.begin(), nsd.pnfRefs.end());
  for (const auto& r : nsd.pnfRefs) rrh(r);
  for (const auto& l : nsd.virtualLinks) {
    for (const auto* e : {&l.endpointA, &l.endpointB})
      if (!ids.count(*e) && !pnfs.count(*e)) bad("virtual link endpoint '" + *e + "' is not a declared VNF or PNF");
    if (l.requiredMbps < 0) bad("virtual link requiredMbps must be >= 0");
  }
  for (const auto& p : nsd.vnfProfiles) {
    if (p.kind != VnfKind::GnbDu) continue;
    bool toRrh = false, toCu = false;
    for (const auto& l : nsd.virtualLinks) {
      const std::string* other = l.endpointA == p.vnfId ? &l.endpointB : l.endpointB == p.vnfId ? &l.endpointA : nullptr;
      if (!other) continue;
      if (pnfs.count(*other)) toRrh = true;
      if (const auto* q = nsd.findProfile(*other); q && q->kind == VnfKind::GnbCu) toCu = true;
    }
    if (!toRrh) bad(p.vnfId + ": a gNB-DU needs a virtual link to at least one RRH");
    if (!toCu) bad(p.vnfId + ": a gNB-DU needs a virtual link to a gNB-CU");
  }
  std::set<VnfKind> ruled;
  for (const auto& r : nsd.scalingRules) {
    if (!ruled.insert(r.kind).second) bad("duplicate scaling rule for " + nrm::toString(r.kind));
    int declared = 0;
    for (const auto& p : nsd.vnfProfiles) declared += p.kind == r.kind;
    if (r.maxInstances < declared) bad("scaling rule for " + nrm::toString(r.kind) + " is below the declared count");
  }
}

std::string Infrastructure::place(const VnfProfile& profile, int units, const PlacementHints& hints) const {
  auto pinned = profile.placementConstraint;
  if (!pinned) {
    if (auto it = hints.find(profile.vnfId); it != hints.end()) pinned = it->second;
  }
  if (pinned) {
    const int free = freeCapacity(*pinned);
    if (free < units)
      throw Error(ErrorCode::InsufficientNfvi,
                  profile.vnfId + " needs " + std::to_string(units) + " compute units, " + *pinned + " has " +
                      std::to_string(free),
                  {{"popId", *pinned}, {"required", units}, {"available", free}});
    return *pinned;
  }
  std::vector<std::pair<int, std::string>> candidates;
  for (const auto& [id, free] : freeCapacity_)
    if (pop(id).nfviCapacity > 0) candidates.emplace_back(free, id);
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (const auto& [free, id] : candidates)
    if (free >= units) return id;
  const std::string best = candidates.empty() ? std::string() : candidates.front().second;
  throw Error(ErrorCode::InsufficientNfvi,
              profile.vnfId + " needs " + std::to_string(units) + " compute units, no PoP has that much free",
              {{"popId", best}, {"required", units}, {"available", candidates.empty() ? 0 : candidates.front().first}});
}

std::string Infrastructure::endpointPop(const NsInstance& ns, const std::string& endpoint) const {
  if (const auto* v = ns.findVnf(endpoint)) return v->popId;
  return rrh(endpoint).sitePopId;
}

LinkBinding Infrastructure::route(const NsInstance& ns, const VirtualLink& link) {
  const std::string src = endpointPop(ns, link.endpointA);
  const std::string dst = endpointPop(ns, link.endpointB);
  LinkBinding binding{link, {src}, 0.0};
  if (src == dst) return binding;

  std::map<std::string, double> dist;
  std::map<std::string, std::string> prev;
  using Item = std::pair<double, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[src] = 0.0;
  queue.emplace(0.0, src);
  while (!queue.empty()) {
    auto [d, at] = queue.top();
    queue.pop();
    if (d > dist[at]) continue;
    if (at == dst) break;
    for (const auto& l : pop(at).transportLinks) {
      if (freeLinkCapacity(at, l.peerPopId) + kMbpsEps < link.requiredMbps) continue;
      const double nd = d + l.latencyMs;
      auto it = dist.find(l.peerPopId);
      // Ties keep the lexically smaller predecessor so routes are deterministic.
      if (it == dist.end() || nd < it->second || (nd == it->second && at < prev[l.peerPopId])) {
        dist[l.peerPopId] = nd;
        prev[l.peerPopId] = at;
        queue.emplace(nd, l.peerPopId);
      }
    }
  }
  if (!dist.count(dst))
    throw Error(ErrorCode::NoFeasiblePath,
                "no transport path " + src + " -> " + dst + " with " + std::to_string(link.requiredMbps) +
                    " Mbps free for link " + link.endpointA + " <-> " + link.endpointB,
                {{"link", {{"endpointA", link.endpointA}, {"endpointB", link.endpointB}}},
                 {"requiredMbps", link.requiredMbps},
                 {"fromPop", src},
                 {"toPop", dst}});
  std::vector<std::string> path{dst};
  while (path.back() != src) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) freeLinkMbps_[linkKey(path[i], path[i + 1])] -= link.requiredMbps;
  binding.path = std::move(path);
  binding.latencyMs = dist[dst];
  return binding;
}

const NsInstance& Infrastructure::instantiateNs(const std::string& nsdId, const PlacementHints& hints,
                                                std::optional<std::string> nsInstanceId) {
  const Nsd& descriptor = nsd(nsdId);
  Infrastructure next = *this;
  NsInstance ns;
  ns.nsdRef = nsdId;
  ns.descriptor = descriptor;
  if (nsInstanceId) {
    ns.nsInstanceId = *nsInstanceId;
  } else {
    do ns.nsInstanceId = "NS#" + std::to_string(next.nextInstance_++);
    while (next.instances_.count(ns.nsInstanceId));
  }
  if (next.instances_.count(ns.nsInstanceId))
    throw Error(ErrorCode::InvariantViolation, "NS instance '" + ns.nsInstanceId + "' already exists");
  for (const auto& profile : descriptor.vnfProfiles) {
    const int units = profile.computeUnits > 0 ? profile.computeUnits : defaults_.forKind(profile.kind);
    const std::string popId = next.place(profile, units, hints);
    next.freeCapacity_[popId] -= units;
    ns.vnfInstances.push_back({profile.vnfId, profile.kind, popId, units});
  }
  for (const auto& link : descriptor.virtualLinks) ns.linkBindings.push_back(next.route(ns, link));
  const std::string id = ns.nsInstanceId;
  next.instances_[id] = std::move(ns);
  *this = std::move(next);
  return instances_.at(id);
}

const NsInstance& Infrastructure::scaleNs(const std::string& nsInstanceId, const ScaleRequest& request) {
  if (!instances_.count(nsInstanceId))
    throw Error(ErrorCode::UnknownNsInstance, "unknown NS instance '" + nsInstanceId + "'",
                {{"nsInstanceId", nsInstanceId}});
  Infrastructure next = *this;
  NsInstance& ns = next.instances_.at(nsInstanceId);
  const VnfProfile& add = request.addVnf;

  const auto rule = std::find_if(ns.descriptor.scalingRules.begin(), ns.descriptor.scalingRules.end(),
                                 [&](const ScalingRule& r) { return r.kind == add.kind; });
  int present = 0;
  for (const auto& v : ns.vnfInstances) present += v.kind == add.kind;
  const int limit = rule == ns.descriptor.scalingRules.end() ? present : rule->maxInstances;
  if (present + 1 > limit)
    throw Error(ErrorCode::ScalingLimitExceeded,
                nsInstanceId + " already has " + std::to_string(present) + " " + nrm::toString(add.kind) +
                    " instance(s), scaling allows " + std::to_string(limit),
                {{"nsInstanceId", nsInstanceId}, {"kind", nrm::toString(add.kind)}, {"maxInstances", limit}});
  if (ns.findVnf(add.vnfId) || ns.descriptor.findProfile(add.vnfId))
    throw Error(ErrorCode::InvariantViolation, nsInstanceId + " already has a VNF '" + add.vnfId + "'");

  ns.descriptor.vnfProfiles.push_back(add);
  for (const auto& l : request.newLinks) {
    ns.descriptor.virtualLinks.push_back(l);
    for (const auto* e : {&l.endpointA, &l.endpointB}) {
      if (ns.descriptor.findProfile(*e)) continue;
      rrh(*e);
      if (std::find(ns.descriptor.pnfRefs.begin(), ns.descriptor.pnfRefs.end(), *e) == ns.descriptor.pnfRefs.end())
        ns.descriptor.pnfRefs.push_back(*e);
    }
  }
  validateNsd(ns.descriptor);

  const int units = add.computeUnits > 0 ? add.computeUnits : defaults_.forKind(add.kind);
  const std::string popId = next.place(add, units, {});
  next.freeCapacity_[popId] -= units;
  ns.vnfInstances.push_back({add.vnfId, add.kind, popId, units});
  for (const auto& l : request.newLinks) ns.linkBindings.push_back(next.route(ns, l));
  *this = std::move(next);
  return instances_.at(nsInstanceId);
}

void Infrastructure::scaleIn(const std::string& nsInstanceId, const std::string& vnfId) {
  if (!instances_.count(nsInstanceId))
    throw Error(ErrorCode::UnknownNsInstance, "unknown NS instance '" + nsInstanceId + "'",
                {{"nsInstanceId", nsInstanceId}});
  Infrastructure next = *this;
  NsInstance& ns = next.instances_.at(nsInstanceId);
  const auto vnf = std::find_if(ns.vnfInstances.begin(), ns.vnfInstances.end(),
                                [&](const VnfInstance& v) { return v.vnfInstanceId == vnfId; });
  if (vnf == ns.vnfInstances.end())
    throw Error(ErrorCode::NotFound, nsInstanceId + " has no VNF '" + vnfId + "'");
  std::vector<std::string> users;
  for (const auto& [cellId, b] : bindings_)
    if (b.nsInstanceId == nsInstanceId && b.servingVnfId == vnfId) users.push_back(cellId);
  if (!users.empty())
    throw Error(ErrorCode::InstanceInUse, vnfId + " still serves cells", {{"cellIds", users}});

  next.freeCapacity_[vnf->popId] += vnf->computeUnits;
  ns.vnfInstances.erase(vnf);
  auto touches = [&](const VirtualLink& l) { return l.endpointA == vnfId || l.endpointB == vnfId; };
  for (auto it = ns.linkBindings.begin(); it != ns.linkBindings.end();) {
    if (!touches(it->link)) {
      ++it;
      continue;
    }
    for (std::size_t i = 0; i + 1 < it->path.size(); ++i)
      next.freeLinkMbps_[linkKey(it->path[i], it->path[i + 1])] += it->link.requiredMbps;
    it = ns.linkBindings.erase(it);
  }
  auto& d = ns.descriptor;
  d.virtualLinks.erase(std::remove_if(d.virtualLinks.begin(), d.virtualLinks.end(), touches), d.virtualLinks.end());
  d.vnfProfiles.erase(std::remove_if(d.vnfProfiles.begin(), d.vnfProfiles.end(),
                                     [&](const VnfProfile& p) { return p.vnfId == vnfId; }),
                      d.vnfProfiles.end());
  // PNFs that were only added for the removed VNF go with it.
  const auto& original = nsd(ns.nsdRef).pnfRefs;
  d.pnfRefs.erase(std::remove_if(d.pnfRefs.begin(), d.pnfRefs.end(),
                                 [&](const std::string& r) {
                                   if (std::find(original.begin(), original.end(), r) != original.end()) return false;
                                   return std::none_of(d.virtualLinks.begin(), d.virtualLinks.end(),
                                                       [&](const VirtualLink& l) {
                                                         return l.endpointA == r || l.endpointB == r;
                                                       });
                                 }),
                  d.pnfRefs.end());
  *this = std::move(next);
}

ReleaseReport Infrastructure::terminateNs(const std::string& nsInstanceId) {
  auto it = instances_.find(nsInstanceId);
  if (it == instances_.end())
    throw Error(ErrorCode::UnknownNsInstance, "unknown NS instance '" + nsInstanceId + "'",
                {{"nsInstanceId", nsInstanceId}});
  const auto users = cellsUsing(nsInstanceId);
  if (!users.empty())
    throw Error(ErrorCode::InstanceInUse, nsInstanceId + " still realizes cells", {{"cellIds", users}});
  ReleaseReport report;
  report.nsInstanceId = nsInstanceId;
  for (const auto& v : it->second.vnfInstances) {
    freeCapacity_[v.popId] += v.computeUnits;
    report.computeUnitsByPop[v.popId] += v.computeUnits;
    report.totalComputeUnits += v.computeUnits;
    report.releasedVnfs.push_back(v.vnfInstanceId);
  }
  for (const auto& b : it->second.linkBindings)
    for (std::size_t i = 0; i + 1 < b.path.size(); ++i)
      freeLinkMbps_[linkKey(b.path[i], b.path[i + 1])] += b.link.requiredMbps;
  instances_.erase(it);
  return report;
}

const CarrierBinding& Infrastructure::bindCellResources(const std::string& cellId, const std::string& nsInstanceId,
                                                        const std::string& rrhId, const std::string& band,
                                                        double bandwidthMHz, std::optional<std::string> servingVnfId) {
  if (bindings_.count(cellId))
    throw Error(ErrorCode::CellAlreadyBound, cellId + " is already bound to " + bindings_.at(cellId).rrhId,
                {{"cellId", cellId}});
  const NsInstance* ns = findInstance(nsInstanceId);
  if (!ns)
    throw Error(ErrorCode::UnknownNsInstance, "unknown NS instance '" + nsInstanceId + "'",
                {{"nsInstanceId", nsInstanceId}});
  const Rrh& r = rrh(rrhId);
  if (std::find(r.supportedBands.begin(), r.supportedBands.end(), band) == r.supportedBands.end())
    throw Error(ErrorCode::BandUnsupported, rrhId + " does not support band " + band,
                {{"rrhId", rrhId}, {"band", band}, {"supportedBands", r.supportedBands}});
  if (usedCarriers(rrhId) >= r.maxCarriers)
    throw Error(ErrorCode::CarrierSlotsExhausted,
                rrhId + " has all " + std::to_string(r.maxCarriers) + " carrier slots in use",
                {{"rrhId", rrhId}, {"maxCarriers", r.maxCarriers}});
  if (!(bandwidthMHz > 0))
    throw Error(ErrorCode::InvariantViolation, cellId + ": channel bandwidth must be positive");

  std::string serving;
  if (servingVnfId) {
    const auto* v = ns->findVnf(*servingVnfId);
    if (!v || !isRadioFunction(v->kind))
      throw Error(ErrorCode::UnservableCell,
                  nsInstanceId + " has no gNB or gNB-DU named '" + *servingVnfId + "'",
                  {{"nsInstanceId", nsInstanceId}, {"vnfId", *servingVnfId}});
    serving = *servingVnfId;
  } else {
    // Prefer a radio function with a virtual link to this RRH.
    for (const auto& b : ns->linkBindings) {
      const std::string* other = b.link.endpointA == rrhId ? &b.link.endpointB
                                 : b.link.endpointB == rrhId ? &b.link.endpointA
                                                             : nullptr;
      if (const auto* v = other ? ns->findVnf(*other) : nullptr; v && isRadioFunction(v->kind)) {
        serving = v->vnfInstanceId;
        break;
      }
    }
    if (serving.empty())
      for (const auto& v : ns->vnfInstances)
        if (isRadioFunction(v.kind)) {
          serving = v.vnfInstanceId;
          break;
        }
    if (serving.empty())
      throw Error(ErrorCode::UnservableCell, nsInstanceId + " has no gNB or gNB-DU to serve " + cellId,
                  {{"nsInstanceId", nsInstanceId}});
  }
  auto [it, _] = bindings_.emplace(cellId, CarrierBinding{cellId, nsInstanceId, rrhId, band, bandwidthMHz, serving});
  return it->second;
}

void Infrastructure::releaseCellResources(const std::string& cellId) {
  if (!bindings_.erase(cellId))
    throw Error(ErrorCode::NotFound, cellId + " has no carrier binding", {{"cellId", cellId}});
}

std::vector<std::string> Infrastructure::auditInvariants() const {
  std::vector<std::string> problems;
  std::map<std::string, int> placed;
  std::map<LinkKey, double> used;
  for (const auto& [id, ns] : instances_) {
    for (const auto& v : ns.vnfInstances) {
      placed[v.popId] += v.computeUnits;
      if (pop(v.popId).nfviCapacity <= 0)
        problems.push_back(v.vnfInstanceId + " placed on " + v.popId + " which has no NFVI");
    }
    for (const auto& b : ns.linkBindings)
      for (std::size_t i = 0; i + 1 < b.path.size(); ++i) used[linkKey(b.path[i], b.path[i + 1])] += b.link.requiredMbps;
  }
  for (const auto& p : pops_) {
    const int free = freeCapacity_.at(p.popId);
    if (free < 0) problems.push_back(p.popId + " has negative free capacity");
    if (free + placed[p.popId] != p.nfviCapacity)
      problems.push_back(p.popId + ": free " + std::to_string(free) + " + placed " + std::to_string(placed[p.popId]) +
                         " != capacity " + std::to_string(p.nfviCapacity));
    for (const auto& l : p.transportLinks) {
      const auto key = linkKey(p.popId, l.peerPopId);
      const double free_ = freeLinkMbps_.at(key);
      if (free_ < -kMbpsEps) problems.push_back(key.first + "-" + key.second + " is oversubscribed");
      if (std::abs(free_ + used[key] - l.capacityMbps) > 1e-6)
        problems.push_back(key.first + "-" + key.second + " link capacity is not conserved");
    }
  }
  for (const auto& r : rrhs_)
    if (usedCarriers(r.rrhId) > r.maxCarriers) problems.push_back(r.rrhId + " has more carriers than slots");
  return problems;
}

json toJson(const Nsd& nsd) {
  json profiles = json::array();
  for (const auto& p : nsd.vnfProfiles) {
    json j{{"vnfId", p.vnfId}, {"kind", nrm::toString(p.kind)}, {"computeUnits", p.computeUnits}};
    if (p.placementConstraint) j["placement"] = *p.placementConstraint;
    profiles.push_back(j);
  }
  json links = json::array();
  for (const auto& l : nsd.virtualLinks)
    links.push_back({{"endpointA", l.endpointA}, {"endpointB", l.endpointB}, {"requiredMbps", l.requiredMbps}});
  json rules = json::array();
  for (const auto& r : nsd.scalingRules) rules.push_back({{"kind", nrm::toString(r.kind)}, {"maxInstances", r.maxInstances}});
  return {{"nsdId", nsd.nsdId},
          {"vnfProfiles", profiles},
          {"pnfRefs", nsd.pnfRefs},
          {"virtualLinks", links},
          {"scalingRules", rules}};
}

json Infrastructure::instanceToJson(const NsInstance& ns) const {
  json vnfs = json::array();
  for (const auto& v : ns.vnfInstances)
    vnfs.push_back({{"vnfInstanceId", v.vnfInstanceId},
                    {"kind", nrm::toString(v.kind)},
                    {"popId", v.popId},
                    {"computeUnits", v.computeUnits}});
  json links = json::array();
  for (const auto& b : ns.linkBindings)
    links.push_back({{"endpointA", b.link.endpointA},
                     {"endpointB", b.link.endpointB},
                     {"requiredMbps", b.link.requiredMbps},
                     {"path", b.path},
                     {"latencyMs", b.latencyMs}});
  return {{"nsInstanceId", ns.nsInstanceId},
          {"nsdRef", ns.nsdRef},
          {"state", "ACTIVE"},
          {"descriptor", infra::toJson(ns.descriptor)},
          {"vnfInstances", vnfs},
          {"linkBindings", links}};
}

json Infrastructure::toJson() const {
  json pops = json::array();
  for (const auto& p : pops_) {
    json links = json::array();
    for (const auto& l : p.transportLinks)
      links.push_back({{"peerPopId", l.peerPopId},
                       {"capacityMbps", l.capacityMbps},
                       {"freeMbps", freeLinkCapacity(p.popId, l.peerPopId)},
                       {"latencyMs", l.latencyMs}});
    pops.push_back({{"popId", p.popId},
                    {"kind", toString(p.kind)},
                    {"nfviCapacity", p.nfviCapacity},
                    {"freeCapacity", freeCapacity_.at(p.popId)},
                    {"hostedRrhIds", p.hostedRrhIds},
                    {"transportLinks", links}});
  }
  json rrhs = json::array();
  for (const auto& r : rrhs_)
    rrhs.push_back({{"rrhId", r.rrhId},
                    {"sitePopId", r.sitePopId},
                    {"supportedBands", r.supportedBands},
                    {"maxCarriers", r.maxCarriers},
                    {"usedCarriers", usedCarriers(r.rrhId)}});
  json nsds = json::array();
  for (const auto& [_, d] : nsds_) nsds.push_back(infra::toJson(d));
  json instances = json::array();
  for (const auto& [_, ns] : instances_) instances.push_back(instanceToJson(ns));
  json bindings = json::array();
  for (const auto& [_, b] : bindings_)
    bindings.push_back({{"cellId", b.cellId},
                        {"nsInstanceId", b.nsInstanceId},
                        {"rrhId", b.rrhId},
                        {"band", b.band},
                        {"bandwidthMHz", b.bandwidthMHz},
                        {"servingVnfId", b.servingVnfId}});
  return {{"pops", pops}, {"rrhs", rrhs}, {"nsds", nsds}, {"nsInstances", instances}, {"carrierBindings", bindings}};
}

VnfProfile parseVnfProfile(const json& j, const std::string& path) {
  JsonReader r(j, path);
  VnfProfile p;
  p.vnfId = r.req<std::string>("vnfId");
  p.kind = nrm::codec::parseGnbKind(r.req<std::string>("kind"), r.pathOf("kind"));
  p.computeUnits = r.get<int>("computeUnits", 0);
  p.placementConstraint = r.opt<std::string>("placement");
  r.finish();
  return p;
}

VirtualLink parseVirtualLink(const json& j, const std::string& path) {
  JsonReader r(j, path);
  VirtualLink l;
  l.endpointA = r.req<std::string>("endpointA");
  l.endpointB = r.req<std::string>("endpointB");
  l.requiredMbps = r.get<double>("requiredMbps", 0.0);
  r.finish();
  return l;
}

Nsd parseNsd(const json& j, const std::string& path) {
  JsonReader r(j, path);
  Nsd d;
  d.nsdId = r.req<std::string>("nsdId");
  if (const json* v = r.rawOpt("vnfProfiles")) {
    requireArray(*v, r.pathOf("vnfProfiles"));
    for (std::size_t i = 0; i < v->size(); ++i)
      d.vnfProfiles.push_back(parseVnfProfile((*v)[i], r.pathOf("vnfProfiles") + "/" + std::to_string(i)));
  }
  d.pnfRefs = r.get<std::vector<std::string>>("pnfRefs", {});
  if (const json* v = r.rawOpt("virtualLinks")) {
    requireArray(*v, r.pathOf("virtualLinks"));
    for (std::size_t i = 0; i < v->size(); ++i)
      d.virtualLinks.push_back(parseVirtualLink((*v)[i], r.pathOf("virtualLinks") + "/" + std::to_string(i)));
  }
  if (const json* v = r.rawOpt("scalingRules")) {
    requireArray(*v, r.pathOf("scalingRules"));
    for (std::size_t i = 0; i < v->size(); ++i) {
      JsonReader sr((*v)[i], r.pathOf("scalingRules") + "/" + std::to_string(i));
      ScalingRule rule;
      rule.kind = nrm::codec::parseGnbKind(sr.req<std::string>("kind"), sr.pathOf("kind"));
      rule.maxInstances = sr.req<int>("maxInstances");
      sr.finish();
      d.scalingRules.push_back(rule);
    }
  }
  r.finish();
  return d;
}

Pop parsePop(const json& j, const std::string& path) {
  JsonReader r(j, path);
  Pop p;
  p.popId = r.req<std::string>("popId");
  const auto kind = r.req<std::string>("kind");
  if (kind == "cellSite") p.kind = PopKind::CellSite;
  else if (kind == "datacentre") p.kind = PopKind::Datacentre;
  else parseError(r.pathOf("kind"), "expected 'cellSite' or 'datacentre'");
  p.nfviCapacity = r.get<int>("nfviCapacity", 0);
  p.hostedRrhIds = r.get<std::vector<std::string>>("hostedRrhIds", {});
  if (const json* v = r.rawOpt("transportLinks")) {
    requireArray(*v, r.pathOf("transportLinks"));
    for (std::size_t i = 0; i < v->size(); ++i) {
      JsonReader lr((*v)[i], r.pathOf("transportLinks") + "/" + std::to_string(i));
      TransportLink l;
      l.peerPopId = lr.req<std::string>("peerPopId");
      l.capacityMbps = lr.req<double>("capacityMbps");
      l.latencyMs = lr.req<double>("latencyMs");
      lr.finish();
      p.transportLinks.push_back(l);
    }
  }
  r.finish();
  return p;
}

Rrh parseRrh(const json& j, const std::string& path) {
  JsonReader r(j, path);
  Rrh x;
  x.rrhId = r.req<std::string>("rrhId");
  x.sitePopId = r.req<std::string>("sitePopId");
  x.supportedBands = r.req<std::vector<std::string>>("supportedBands");
  x.maxCarriers = r.get<int>("maxCarriers", 1);
  r.finish();
  return x;
}

ComputeDefaults parseComputeDefaults(const json& j, const std::string& path) {
  JsonReader r(j, path);
  ComputeDefaults d;
  d.gnb = r.get<int>("gNB", d.gnb);
  d.gnbCu = r.get<int>("gNB-CU", d.gnbCu);
  d.gnbDu = r.get<int>("gNB-DU", d.gnbDu);
  r.finish();
  return d;
}

}  // namespace ranslice::infra
