#include "ranslice/nrm/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::nrm {

namespace {

constexpr std::pair<ObjectKind, std::string_view> kKindNames[] = {
    {ObjectKind::Subnetwork, "Subnetwork"},   {ObjectKind::ManagedElement, "ManagedElement"},
    {ObjectKind::GnbFunction, "GnbFunction"}, {ObjectKind::NrCell, "NrCell"},
    {ObjectKind::CellSlice, "CellSlice"},     {ObjectKind::RanSlice, "RanSlice"},
};

[[noreturn]] void invariantError(const std::string& path, const std::string& rule,
                                 const std::string& message) {
  Violation v{path, rule, message, Severity::Error, RuleTier::Local};
  throw Error(ErrorCode::InvariantViolation, path + ": " + message,
              {{"violations", json::array({v.toJson()})}});
}

// Pointers into one object of a model; only the fields up to `kind` are set.
template <class M>
struct Located {
  using SN = std::conditional_t<std::is_const_v<M>, const Subnetwork, Subnetwork>;
  using ME = std::conditional_t<std::is_const_v<M>, const ManagedElement, ManagedElement>;
  using FN = std::conditional_t<std::is_const_v<M>, const GnbFunction, GnbFunction>;
  using CL = std::conditional_t<std::is_const_v<M>, const NrCell, NrCell>;
  using CS = std::conditional_t<std::is_const_v<M>, const CellSlice, CellSlice>;
  using RS = std::conditional_t<std::is_const_v<M>, const RanSlice, RanSlice>;

  ObjectKind kind = ObjectKind::Subnetwork;
  SN* sn = nullptr;
  ME* me = nullptr;
  FN* fn = nullptr;
  CL* cell = nullptr;
  CS* cs = nullptr;
  RS* rs = nullptr;
};

template <class Vec, class Pred>
auto* findIn(Vec& v, Pred pred) {
  auto it = std::find_if(v.begin(), v.end(), pred);
  return it == v.end() ? nullptr : &*it;
}

template <class M>
std::optional<Located<M>> locate(M& model, const Dn& dn) {
  if (dn.empty()) return std::nullopt;
  const auto& rdns = dn.rdns();
  if (rdns[0].kind != ObjectKind::Subnetwork || rdns[0].id != model.subnetwork.id) return std::nullopt;
  Located<M> loc;
  loc.sn = &model.subnetwork;
  for (std::size_t i = 1; i < rdns.size(); ++i) {
    const auto& r = rdns[i];
    if (!isLegalChild(loc.kind, r.kind)) return std::nullopt;
    switch (r.kind) {
      case ObjectKind::ManagedElement:
        loc.me = findIn(loc.sn->managedElements, [&](auto& x) { return x.id == r.id; });
        if (!loc.me) return std::nullopt;
        break;
      case ObjectKind::GnbFunction:
        loc.fn = findIn(loc.me->functions, [&](auto& x) { return x.id == r.id; });
        if (!loc.fn) return std::nullopt;
        break;
      case ObjectKind::NrCell:
        loc.cell = findIn(loc.fn->cells, [&](auto& x) { return x.cellId == r.id; });
        if (!loc.cell) return std::nullopt;
        break;
      case ObjectKind::CellSlice:
        loc.cs = findIn(loc.cell->cellSlices, [&](auto& x) { return x.cellSliceId == r.id; });
        if (!loc.cs) return std::nullopt;
        break;
      case ObjectKind::RanSlice:
        loc.rs = findIn(loc.sn->ranSlices, [&](auto& x) { return x.ranSliceId == r.id; });
        if (!loc.rs) return std::nullopt;
        break;
      case ObjectKind::Subnetwork:
        return std::nullopt;
    }
    loc.kind = r.kind;
  }
  return loc;
}

bool validId(const std::string& id) {
  return !id.empty() && id.find(',') == std::string::npos && id.find('=') == std::string::npos;
}

void stamp(Model& model, const std::string& dn, const std::string& op, ObjectKind kind,
           json attrs) {
  ++model.version;
  if (op == "delete") {
    for (auto it = model.objectVersions.begin(); it != model.objectVersions.end();) {
      if (it->first == dn || it->first.rfind(dn + ",", 0) == 0)
        it = model.objectVersions.erase(it);
      else
        ++it;
    }
  } else {
    model.objectVersions[dn] = model.version;
  }
  model.auditLog.push_back({model.version, op, dn, kind, std::move(attrs)});
}

// Replaces the attributes of a located object, preserving its children.
json applyAttributes(Model& model, Located<Model>& loc, const json& attrs, const std::string& path) {
  switch (loc.kind) {
    case ObjectKind::Subnetwork: {
      JsonReader r(attrs, path);
      if (r.req<std::string>("id") != loc.sn->id) invariantError(path, "NRM-ID-IMMUTABLE", "id is immutable");
      r.finish();
      return codec::attributes(*loc.sn);
    }
    case ObjectKind::ManagedElement: {
      auto next = codec::parseManagedElement(attrs, path);
      if (next.id != loc.me->id) invariantError(path, "NRM-ID-IMMUTABLE", "id is immutable");
      next.functions = std::move(loc.me->functions);
      *loc.me = std::move(next);
      return codec::attributes(*loc.me);
    }
    case ObjectKind::GnbFunction: {
      auto next = codec::parseGnbFunction(attrs, path);
      if (next.id != loc.fn->id) invariantError(path, "NRM-ID-IMMUTABLE", "id is immutable");
      if (next.kind == GnbKind::GnbCu && !loc.fn->cells.empty())
        invariantError(path, "NRM-CU-HOSTS-CELL", "a gNB-CU cannot serve cells directly");
      next.cells = std::move(loc.fn->cells);
      *loc.fn = std::move(next);
      return codec::attributes(*loc.fn);
    }
    case ObjectKind::NrCell: {
      auto next = codec::parseNrCell(attrs, path);
      if (next.cellId != loc.cell->cellId) invariantError(path, "NRM-ID-IMMUTABLE", "cellId is immutable");
      next.cellSlices = std::move(loc.cell->cellSlices);
      *loc.cell = std::move(next);
      return codec::attributes(*loc.cell);
    }
    case ObjectKind::CellSlice: {
      auto next = codec::parseCellSlice(attrs, path, model.cellCapacityMbps(*loc.cell));
      if (next.cellSliceId != loc.cs->cellSliceId)
        invariantError(path, "NRM-ID-IMMUTABLE", "cellSliceId is immutable");
      *loc.cs = std::move(next);
      return codec::attributes(*loc.cs);
    }
    case ObjectKind::RanSlice: {
      auto next = codec::parseRanSlice(attrs, path);
      if (next.ranSliceId != loc.rs->ranSliceId)
        invariantError(path, "NRM-ID-IMMUTABLE", "ranSliceId is immutable");
      *loc.rs = std::move(next);
      return codec::attributes(*loc.rs);
    }
  }
  return json::object();
}

}  // namespace

std::string_view toString(ObjectKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

std::optional<ObjectKind> parseObjectKind(std::string_view text) {
  for (const auto& [k, name] : kKindNames)
    if (name == text) return k;
  return std::nullopt;
}

std::vector<ObjectKind> childKinds(ObjectKind parent) {
  switch (parent) {
    case ObjectKind::Subnetwork: return {ObjectKind::ManagedElement, ObjectKind::RanSlice};
    case ObjectKind::ManagedElement: return {ObjectKind::GnbFunction};
    case ObjectKind::GnbFunction: return {ObjectKind::NrCell};
    case ObjectKind::NrCell: return {ObjectKind::CellSlice};
    default: return {};
  }
}

bool isLegalChild(ObjectKind parent, ObjectKind child) {
  auto kids = childKinds(parent);
  return std::find(kids.begin(), kids.end(), child) != kids.end();
}

Dn Dn::parse(std::string_view text) {
  std::vector<Rdn> rdns;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    auto part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    auto eq = part.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, "malformed DN component '" + std::string(part) + "'");
    auto kind = parseObjectKind(part.substr(0, eq));
    if (!kind)
      throw Error(ErrorCode::ParseError,
                  "unknown object kind '" + std::string(part.substr(0, eq)) + "' in DN");
    std::string id(part.substr(eq + 1));
    if (!validId(id)) throw Error(ErrorCode::ParseError, "empty or malformed id in DN");
    rdns.push_back({*kind, std::move(id)});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Dn(std::move(rdns));
}

std::string Dn::str() const {
  std::string out;
  for (const auto& r : rdns_) {
    if (!out.empty()) out += ",";
    out += std::string(toString(r.kind)) + "=" + r.id;
  }
  return out;
}

Dn Dn::child(ObjectKind kind, std::string id) const {
  auto rdns = rdns_;
  rdns.push_back({kind, std::move(id)});
  return Dn(std::move(rdns));
}

Dn Dn::parent() const {
  if (rdns_.empty()) return {};
  return Dn(std::vector<Rdn>(rdns_.begin(), rdns_.end() - 1));
}

bool ModelSettings::hasRst(const std::string& rst) const {
  return std::find(rstCatalog.begin(), rstCatalog.end(), rst) != rstCatalog.end();
}

const NrCell* Model::findCell(const std::string& cellId) const {
  for (const auto& me : subnetwork.managedElements)
    for (const auto& fn : me.functions)
      for (const auto& c : fn.cells)
        if (c.cellId == cellId) return &c;
  return nullptr;
}

NrCell* Model::findCell(const std::string& cellId) {
  return const_cast<NrCell*>(std::as_const(*this).findCell(cellId));
}

const GnbFunction* Model::findFunction(const std::string& id) const {
  for (const auto& me : subnetwork.managedElements)
    for (const auto& fn : me.functions)
      if (fn.id == id) return &fn;
  return nullptr;
}

const ManagedElement* Model::findManagedElement(const std::string& id) const {
  for (const auto& me : subnetwork.managedElements)
    if (me.id == id) return &me;
  return nullptr;
}

const RanSlice* Model::findRanSlice(const std::string& id) const {
  for (const auto& rs : subnetwork.ranSlices)
    if (rs.ranSliceId == id) return &rs;
  return nullptr;
}

RanSlice* Model::findRanSlice(const std::string& id) {
  return const_cast<RanSlice*>(std::as_const(*this).findRanSlice(id));
}

std::optional<Dn> Model::cellDn(const std::string& cellId) const {
  for (const auto& me : subnetwork.managedElements)
    for (const auto& fn : me.functions)
      for (const auto& c : fn.cells)
        if (c.cellId == cellId)
          return rootDn()
              .child(ObjectKind::ManagedElement, me.id)
              .child(ObjectKind::GnbFunction, fn.id)
              .child(ObjectKind::NrCell, c.cellId);
  return std::nullopt;
}

const GnbFunction* Model::servingFunction(const std::string& cellId) const {
  for (const auto& me : subnetwork.managedElements)
    for (const auto& fn : me.functions)
      for (const auto& c : fn.cells)
        if (c.cellId == cellId) return &fn;
  return nullptr;
}

std::vector<const NrCell*> Model::cells() const {
  std::vector<const NrCell*> out;
  for (const auto& me : subnetwork.managedElements)
    for (const auto& fn : me.functions)
      for (const auto& c : fn.cells) out.push_back(&c);
  return out;
}

std::optional<std::string> Model::ownerOf(const std::string& cellId,
                                          const std::string& cellSliceId) const {
  for (const auto& rs : subnetwork.ranSlices)
    for (const auto& ref : rs.cellSliceRefs)
      if (ref.cellId == cellId && ref.cellSliceId == cellSliceId) return rs.ranSliceId;
  return std::nullopt;
}

json Violation::toJson() const {
  return {{"path", path},
          {"rule", ruleId},
          {"message", message},
          {"severity", severity == Severity::Error ? "error" : "info"}};
}

std::vector<FlowTypeGuarantee> guaranteedSums(const NrCell& cell) {
  std::set<QosFlowType> all;
  for (const auto& cs : cell.cellSlices)
    for (const auto& e : cs.authorisedLoad)
      for (const auto& ft : e.flowTypes) all.insert(ft);
  std::vector<FlowTypeGuarantee> out;
  for (const auto& ft : all) {
    double sum = 0.0;
    for (const auto& cs : cell.cellSlices)
      for (const auto& e : cs.authorisedLoad)
        if (e.guaranteedLoad && e.covers(ft)) sum += *e.guaranteedLoad;
    out.push_back({ft, sum});
  }
  return out;
}

namespace {

class Validator {
 public:
  Validator(const Model& m, bool includeInfo) : m_(m), includeInfo_(includeInfo) {}

  std::vector<Violation> run() {
    const auto root = m_.rootDn();
    checkId(root.str(), m_.subnetwork.id);

    std::set<std::string> meIds, fnIds, cellIds, rsIds;
    std::map<std::string, GnbKind> fnKinds;
    for (const auto& me : m_.subnetwork.managedElements)
      for (const auto& fn : me.functions) fnKinds.emplace(fn.id, fn.kind);

    for (const auto& me : m_.subnetwork.managedElements) {
      const auto meDn = root.child(ObjectKind::ManagedElement, me.id);
      checkId(meDn.str(), me.id);
      if (!meIds.insert(me.id).second)
        add(meDn.str(), "NRM-DUPLICATE-ID", "duplicate ManagedElement id");
      for (const auto& fn : me.functions) {
        const auto fnDn = meDn.child(ObjectKind::GnbFunction, fn.id);
        checkFunction(fnDn.str(), fn, fnKinds);
        if (!fnIds.insert(fn.id).second)
          add(fnDn.str(), "NRM-DUPLICATE-ID", "duplicate GnbFunction id within subnetwork");
        for (const auto& cell : fn.cells) {
          const auto cellDn = fnDn.child(ObjectKind::NrCell, cell.cellId);
          if (!cellIds.insert(cell.cellId).second)
            add(cellDn.str(), "NRM-DUPLICATE-ID", "duplicate cellId within subnetwork");
          checkCell(cellDn, cell);
        }
      }
    }

    for (const auto& rs : m_.subnetwork.ranSlices) {
      const auto rsDn = root.child(ObjectKind::RanSlice, rs.ranSliceId);
      if (!rsIds.insert(rs.ranSliceId).second)
        add(rsDn.str(), "NRM-DUPLICATE-ID", "duplicate ranSliceId within subnetwork");
      checkRanSlice(rsDn.str(), rs);
    }
    checkCellSliceOwnership();
    return std::move(out_);
  }

 private:
  void add(const std::string& path, const std::string& rule, const std::string& msg,
           RuleTier tier = RuleTier::Local, Severity sev = Severity::Error) {
    if (sev == Severity::Info && !includeInfo_) return;
    out_.push_back({path, rule, msg, sev, tier});
  }

  void checkId(const std::string& path, const std::string& id) {
    if (!validId(id)) add(path, "NRM-ID-FORMAT", "identifier must be non-empty without ',' or '='");
  }

  void checkPlmn(const std::string& path, const PlmnId& p) {
    auto digits = [](const std::string& s) {
      return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (p.mcc.size() != 3 || !digits(p.mcc))
      add(path, "NRM-PLMN-FORMAT", "mcc must be 3 digits, got '" + p.mcc + "'");
    if ((p.mnc.size() != 2 && p.mnc.size() != 3) || !digits(p.mnc))
      add(path, "NRM-PLMN-FORMAT", "mnc must be 2 or 3 digits, got '" + p.mnc + "'");
  }

  void checkNetworkIds(const std::string& path, const std::vector<NetworkId>& ids) {
    if (ids.empty()) add(path, "NRM-NETWORKIDS-EMPTY", "network/network slice identifier list is empty");
    std::set<NetworkId> seen;
    for (const auto& id : ids) {
      checkPlmn(path, id.plmn);
      if (id.snssai.sst < 0 || id.snssai.sst > 255)
        add(path, "NRM-SNSSAI-RANGE", "sst out of range 0..255");
      if (id.snssai.sd && *id.snssai.sd > 0xFFFFFFu)
        add(path, "NRM-SNSSAI-RANGE", "sd exceeds 24 bits");
      if (!seen.insert(id).second)
        add(path, "NRM-NETWORKID-DUPLICATE", "duplicate (PLMN, S-NSSAI) " + toString(id));
    }
  }

  void checkAuthorisedLoad(const std::string& path, const AuthorisedLoad& al, bool cellScope) {
    std::set<QosFlowType> claimed;
    for (std::size_t i = 0; i < al.size(); ++i) {
      const auto& e = al[i];
      const auto p = path + "/authorisedLoad/" + std::to_string(i);
      if (e.flowTypes.empty()) add(p, "NRM-AL-EMPTY-SCOPE", "flowTypes must be non-empty");
      std::set<QosFlowType> local;
      for (const auto& ft : e.flowTypes) {
        if (ft.fiveQi < 1 || ft.fiveQi > 255) add(p, "NRM-QOS-RANGE", "5QI out of range 1..255");
        if (ft.arp < 1 || ft.arp > 15) add(p, "NRM-QOS-RANGE", "ARP out of range 1..15");
        if (!local.insert(ft).second)
          add(p, "NRM-AL-DUPLICATE-FLOWTYPE", "duplicate flow type " + toString(ft));
        else if (!claimed.insert(ft).second)
          add(p, "NRM-AL-SCOPE-OVERLAP", "flow type " + toString(ft) + " already scoped by another entry");
      }
      if (!(e.averagingWindowS > 0)) add(p, "NRM-AL-WINDOW", "averagingWindow must be > 0");
      for (const auto* v : {&e.guaranteedLoad, &e.maximumLoad}) {
        if (!v->has_value()) continue;
        if (cellScope && (**v < 0.0 || **v > 1.0))
          add(p, "NRM-AL-FRACTION-RANGE", "cell-level loads are fractions in [0,1]");
        if (!cellScope && **v < 0.0) add(p, "NRM-AL-NEGATIVE", "slice-level loads must be >= 0 Mbps");
      }
      if (e.guaranteedLoad && e.maximumLoad && *e.guaranteedLoad > *e.maximumLoad)
        add(p, "NRM-AL-GUARANTEE-EXCEEDS-MAX", "guaranteedLoad exceeds maximumLoad");
    }
  }

  void checkFunction(const std::string& path, const GnbFunction& fn,
                     const std::map<std::string, GnbKind>& kinds) {
    checkId(path, fn.id);
    if (fn.kind == GnbKind::GnbDu) {
      if (!fn.cuRef) {
        add(path, "NRM-CU-REF", "gNB-DU requires cuRef", RuleTier::Referential);
      } else {
        auto it = kinds.find(*fn.cuRef);
        if (it == kinds.end() || it->second != GnbKind::GnbCu)
          add(path, "NRM-CU-REF", "cuRef '" + *fn.cuRef + "' is not a gNB-CU in this subnetwork",
              RuleTier::Referential);
      }
    } else if (fn.cuRef) {
      add(path, "NRM-CU-REF-NOT-ALLOWED", "cuRef only applies to gNB-DU");
    }
    if (fn.kind == GnbKind::GnbCu && !fn.cells.empty())
      add(path, "NRM-CU-HOSTS-CELL", "a gNB-CU cannot serve cells directly");
  }

  void checkCell(const Dn& dn, const NrCell& cell) {
    const auto path = dn.str();
    checkId(path, cell.cellId);
    if (!(cell.channelBandwidthMHz >= 5.0))
      add(path, "NRM-CELL-BANDWIDTH", "channelBandwidthMHz must be >= 5 (NR minimum)");
    if (cell.band.empty()) add(path, "NRM-CELL-BAND", "band must be set");
    std::set<PlmnId> plmns;
    for (const auto& p : cell.plmnList) {
      checkPlmn(path, p.plmnId);
      if (!plmns.insert(p.plmnId).second)
        add(path, "NRM-PLMN-DUPLICATE", "duplicate PLMN " + p.plmnId.str() + " in plmnList");
    }
    std::set<std::string> ids;
    for (const auto& cs : cell.cellSlices) {
      const auto csPath = dn.child(ObjectKind::CellSlice, cs.cellSliceId).str();
      checkId(csPath, cs.cellSliceId);
      if (!ids.insert(cs.cellSliceId).second)
        add(csPath, "NRM-DUPLICATE-ID", "duplicate cellSliceId within cell");
      if (!m_.settings.hasRst(cs.rst))
        add(csPath, "NRM-RST-UNKNOWN", "radio slice type '" + cs.rst + "' not in the RST catalog");
      checkNetworkIds(csPath, cs.networkIds);
      std::set<PlmnId> slicePlmns;
      for (const auto& id : cs.networkIds) {
        slicePlmns.insert(id.plmn);
        if (!cell.findPlmn(id.plmn))
          add(csPath, "NRM-PLMN-NOT-SERVED", "PLMN " + id.plmn.str() + " is not in the cell's plmnList");
      }
      if (slicePlmns.size() > 1)
        add(csPath, "NRM-MULTI-PLMN-SLICE", "cell slice serves S-NSSAIs of several PLMNs",
            RuleTier::Local, Severity::Info);
      checkAuthorisedLoad(csPath, cs.authorisedLoad, true);
    }
    std::string over;
    double worst = 0.0;
    for (const auto& g : guaranteedSums(cell)) {
      if (g.guaranteedSum > 1.0 + kFeasibilityTolerance) {
        if (!over.empty()) over += ", ";
        over += toString(g.flowType);
        worst = std::max(worst, g.guaranteedSum);
      }
    }
    if (!over.empty()) {
      if (!cell.oversubscribed)
        add(path, "NRM-CELL-OVERGUARANTEE",
            "guaranteed load sum " + std::to_string(worst) + " exceeds 1.0 for " + over);
      else
        add(path, "NRM-CELL-OVERSUBSCRIBED", "cell admitted with forced oversubscription",
            RuleTier::Local, Severity::Info);
    }
  }

  void checkRanSlice(const std::string& path, const RanSlice& rs) {
    checkId(path, rs.ranSliceId);
    checkNetworkIds(path, rs.networkIds);
    checkAuthorisedLoad(path, rs.authorisedLoad, false);
    if (rs.plannedLoad) {
      for (const auto& item : *rs.plannedLoad) {
        if (item.expectedMbps < 0) add(path, "NRM-PLANNED-LOAD", "expectedMbps must be >= 0");
        for (const auto& [cellId, w] : item.cellWeights) {
          if (w < 0) add(path, "NRM-PLANNED-LOAD", "cell weight must be >= 0");
          if (!m_.findCell(cellId))
            add(path, "NRM-PLANNED-LOAD", "planned load weights unknown cell " + cellId,
                RuleTier::Referential);
        }
      }
    }
    for (const auto& k : rs.targetKpis) {
      if (k.name == KpiName::BlockedLoadRatio && (k.threshold < 0 || k.threshold > 1))
        add(path, "NRM-TARGET-KPI", "blockedLoadRatio threshold must be in [0,1]");
      else if (k.threshold < 0)
        add(path, "NRM-TARGET-KPI", toString(k.name) + " threshold must be >= 0");
    }
    if (rs.state == SliceState::Active && rs.cellSliceRefs.empty())
      add(path, "NRM-EMPTY-ACTIVE-SLICE", "an ACTIVE RAN slice needs at least one cell slice",
          RuleTier::Referential);
    std::set<CellSliceRef> seen;
    for (const auto& ref : rs.cellSliceRefs) {
      if (!seen.insert(ref).second)
        add(path, "NRM-DUPLICATE-REF", "duplicate cell slice reference " + ref.cellId + "/" + ref.cellSliceId,
            RuleTier::Referential);
      const auto* cell = m_.findCell(ref.cellId);
      const auto* cs = cell ? cell->findSlice(ref.cellSliceId) : nullptr;
      if (!cs) {
        add(path, "NRM-DANGLING-REF", "cell slice " + ref.cellId + "/" + ref.cellSliceId + " does not exist",
            RuleTier::Referential);
        continue;
      }
      for (const auto& id : cs->networkIds) {
        if (std::find(rs.networkIds.begin(), rs.networkIds.end(), id) == rs.networkIds.end())
          add(path, "NRM-NETWORKID-NOT-IN-SLICE",
              "cell slice " + ref.cellId + "/" + ref.cellSliceId + " serves " + toString(id) +
                  " which the RAN slice does not list",
              RuleTier::Referential);
      }
    }
  }

  void checkCellSliceOwnership() {
    std::map<CellSliceRef, int> owners;
    for (const auto& rs : m_.subnetwork.ranSlices)
      for (const auto& ref : std::set<CellSliceRef>(rs.cellSliceRefs.begin(), rs.cellSliceRefs.end()))
        ++owners[ref];
    for (const auto& me : m_.subnetwork.managedElements)
      for (const auto& fn : me.functions)
        for (const auto& cell : fn.cells) {
          auto cellDn = m_.rootDn()
                            .child(ObjectKind::ManagedElement, me.id)
                            .child(ObjectKind::GnbFunction, fn.id)
                            .child(ObjectKind::NrCell, cell.cellId);
          for (const auto& cs : cell.cellSlices) {
            int n = owners[{cell.cellId, cs.cellSliceId}];
            auto path = cellDn.child(ObjectKind::CellSlice, cs.cellSliceId).str();
            if (n == 0)
              add(path, "NRM-ORPHAN-CELLSLICE", "cell slice is not referenced by any RAN slice",
                  RuleTier::Referential);
            else if (n > 1)
              add(path, "NRM-SHARED-CELLSLICE", "cell slice is referenced by several RAN slices",
                  RuleTier::Referential);
          }
        }
  }

  const Model& m_;
  bool includeInfo_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const Model& model, bool includeInfo) {
  return Validator(model, includeInfo).run();
}

bool exists(const Model& model, const Dn& ref) { return locate(model, ref).has_value(); }

const std::vector<std::string>& writableAttributes(ObjectKind kind) {
  static const std::vector<std::string> none;
  static const std::vector<std::string> me{"vendor"};
  static const std::vector<std::string> fn{"cuRef"};
  static const std::vector<std::string> cell{"band",     "channelBandwidthMHz", "txPowerDbm",
                                             "barred",   "plmnList",            "nsdRef",
                                             "sectorEquipmentRefs", "auxRefs"};
  static const std::vector<std::string> cs{"rst", "networkIds", "authorisedLoad"};
  static const std::vector<std::string> rs{"cellSliceRefs", "networkIds", "authorisedLoad",
                                           "plannedLoad", "targetKpis"};
  switch (kind) {
    case ObjectKind::ManagedElement: return me;
    case ObjectKind::GnbFunction: return fn;
    case ObjectKind::NrCell: return cell;
    case ObjectKind::CellSlice: return cs;
    case ObjectKind::RanSlice: return rs;
    default: return none;
  }
}

Dn createObject(Model& model, const Dn& parent, ObjectKind kind, const json& attributes) {
  auto loc = locate(model, parent);
  if (!loc) throw Error(ErrorCode::UnknownParent, "parent " + parent.str() + " does not exist");
  if (!isLegalChild(loc->kind, kind) || kind == ObjectKind::Subnetwork)
    throw Error(ErrorCode::IllegalContainment, std::string(toString(kind)) + " cannot be contained in " +
                                                   std::string(toString(loc->kind)));
  const std::string path = parent.str() + "/" + std::string(toString(kind));

  auto duplicate = [&](const std::string& id) {
    invariantError(parent.child(kind, id).str(), "NRM-DUPLICATE-ID",
                   std::string(toString(kind)) + " '" + id + "' already exists");
  };
  auto checkNewId = [&](const std::string& id) {
    if (!validId(id)) invariantError(path, "NRM-ID-FORMAT", "identifier must be non-empty without ',' or '='");
  };

  Dn dn;
  json stored;
  switch (kind) {
    case ObjectKind::ManagedElement: {
      auto obj = codec::parseManagedElement(attributes, path);
      checkNewId(obj.id);
      if (model.findManagedElement(obj.id)) duplicate(obj.id);
      dn = parent.child(kind, obj.id);
      stored = codec::attributes(obj);
      loc->sn->managedElements.push_back(std::move(obj));
      break;
    }
    case ObjectKind::GnbFunction: {
      auto obj = codec::parseGnbFunction(attributes, path);
      checkNewId(obj.id);
      if (model.findFunction(obj.id)) duplicate(obj.id);
      dn = parent.child(kind, obj.id);
      stored = codec::attributes(obj);
      loc->me->functions.push_back(std::move(obj));
      break;
    }
    case ObjectKind::NrCell: {
      if (loc->fn->kind == GnbKind::GnbCu)
        throw Error(ErrorCode::IllegalContainment, "a gNB-CU cannot serve NR cells; attach the cell to a gNB-DU");
      auto obj = codec::parseNrCell(attributes, path);
      checkNewId(obj.cellId);
      if (model.findCell(obj.cellId)) duplicate(obj.cellId);
      dn = parent.child(kind, obj.cellId);
      stored = codec::attributes(obj);
      loc->fn->cells.push_back(std::move(obj));
      break;
    }
    case ObjectKind::CellSlice: {
      auto obj = codec::parseCellSlice(attributes, path, model.cellCapacityMbps(*loc->cell));
      checkNewId(obj.cellSliceId);
      if (loc->cell->findSlice(obj.cellSliceId)) duplicate(obj.cellSliceId);
      dn = parent.child(kind, obj.cellSliceId);
      stored = codec::attributes(obj);
      loc->cell->cellSlices.push_back(std::move(obj));
      break;
    }
    case ObjectKind::RanSlice: {
      auto obj = codec::parseRanSlice(attributes, path);
      checkNewId(obj.ranSliceId);
      if (model.findRanSlice(obj.ranSliceId)) duplicate(obj.ranSliceId);
      dn = parent.child(kind, obj.ranSliceId);
      stored = codec::attributes(obj);
      loc->sn->ranSlices.push_back(std::move(obj));
      break;
    }
    case ObjectKind::Subnetwork:
      break;
  }
  stamp(model, dn.str(), "create", kind, std::move(stored));
  return dn;
}

void updateObject(Model& model, const Dn& ref, const json& deltas, bool internal) {
  auto loc = locate(model, ref);
  if (!loc) throw Error(ErrorCode::UnknownObject, "object " + ref.str() + " does not exist");
  if (!deltas.is_object()) throw Error(ErrorCode::ParseError, "attribute deltas must be a JSON object");
  if (!internal) {
    const auto& writable = writableAttributes(loc->kind);
    for (const auto& [key, _] : deltas.items()) {
      if (std::find(writable.begin(), writable.end(), key) == writable.end())
        invariantError(ref.str(), "NRM-READONLY-ATTRIBUTE", "attribute '" + key + "' is not writable");
    }
  }
  json current;
  switch (loc->kind) {
    case ObjectKind::Subnetwork: current = codec::attributes(*loc->sn); break;
    case ObjectKind::ManagedElement: current = codec::attributes(*loc->me); break;
    case ObjectKind::GnbFunction: current = codec::attributes(*loc->fn); break;
    case ObjectKind::NrCell: current = codec::attributes(*loc->cell); break;
    case ObjectKind::CellSlice: current = codec::attributes(*loc->cs); break;
    case ObjectKind::RanSlice: current = codec::attributes(*loc->rs); break;
  }
  current.merge_patch(deltas);
  auto stored = applyAttributes(model, *loc, current, ref.str());
  stamp(model, ref.str(), "update", loc->kind, std::move(stored));
}

void deleteObject(Model& model, const Dn& ref) {
  auto loc = locate(model, ref);
  if (!loc) throw Error(ErrorCode::UnknownObject, "object " + ref.str() + " does not exist");
  const auto& leaf = ref.leaf();
  auto parentLoc = locate(model, ref.parent());
  auto erase = [&](auto& vec, auto idOf) {
    vec.erase(std::remove_if(vec.begin(), vec.end(), [&](const auto& x) { return idOf(x) == leaf.id; }),
              vec.end());
  };
  switch (leaf.kind) {
    case ObjectKind::Subnetwork:
      throw Error(ErrorCode::IllegalContainment, "the Subnetwork root cannot be deleted");
    case ObjectKind::ManagedElement:
      erase(parentLoc->sn->managedElements, [](const auto& x) { return x.id; });
      break;
    case ObjectKind::GnbFunction:
      erase(parentLoc->me->functions, [](const auto& x) { return x.id; });
      break;
    case ObjectKind::NrCell:
      erase(parentLoc->fn->cells, [](const auto& x) { return x.cellId; });
      break;
    case ObjectKind::CellSlice:
      erase(parentLoc->cell->cellSlices, [](const auto& x) { return x.cellSliceId; });
      break;
    case ObjectKind::RanSlice:
      erase(parentLoc->sn->ranSlices, [](const auto& x) { return x.ranSliceId; });
      break;
  }
  stamp(model, ref.str(), "delete", leaf.kind, json::object());
}

Model replayAuditLog(const std::string& subnetworkId, const ModelSettings& settings,
                     const std::vector<AuditEntry>& log) {
  Model m;
  m.subnetwork.id = subnetworkId;
  m.settings = settings;
  for (const auto& e : log) {
    const auto dn = Dn::parse(e.dn);
    if (e.op == "create") {
      createObject(m, dn.parent(), e.kind, e.attributes);
    } else if (e.op == "update") {
      auto loc = locate(m, dn);
      if (!loc) throw Error(ErrorCode::UnknownObject, "audit replay: " + e.dn + " missing");
      auto stored = applyAttributes(m, *loc, e.attributes, e.dn);
      stamp(m, e.dn, "update", e.kind, std::move(stored));
    } else if (e.op == "delete") {
      deleteObject(m, dn);
    } else {
      throw Error(ErrorCode::ParseError, "audit replay: unknown op '" + e.op + "'");
    }
  }
  return m;
}

}  // namespace ranslice::nrm
