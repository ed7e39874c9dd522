#include "ranslice/nrm/codec.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "ranslice/common/json_reader.hpp"

namespace ranslice::nrm::codec {

namespace {

std::string idx(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

bool isKindKey(const std::string& key) { return !key.empty() && std::isupper(static_cast<unsigned char>(key[0])); }

ExposedService parseExposedService(const json& j, const std::string& path) {
  auto s = JsonReader::convert<std::string>(j, path);
  if (s == "PM") return ExposedService::PM;
  if (s == "FM") return ExposedService::FM;
  parseError(path, "exposed service must be PM or FM, got '" + s + "'");
}

NotificationControl parseNotificationControl(const json& j, const std::string& path) {
  auto s = JsonReader::convert<std::string>(j, path);
  if (s == "Enabled" || s == "E") return NotificationControl::Enabled;
  if (s == "Disabled" || s == "D") return NotificationControl::Disabled;
  parseError(path, "notificationControl must be Enabled or Disabled, got '" + s + "'");
}

SliceState parseSliceState(const std::string& s, const std::string& path) {
  if (s == "ACTIVE") return SliceState::Active;
  if (s == "TERMINATED") return SliceState::Terminated;
  parseError(path, "state must be ACTIVE or TERMINATED");
}

json optionalLoad(const std::optional<double>& v, bool naWhenAbsent) {
  if (v) return *v;
  return naWhenAbsent ? json("N/A") : json(nullptr);
}

}  // namespace

json toJson(const PlmnId& v) { return {{"mcc", v.mcc}, {"mnc", v.mnc}}; }

json toJson(const SNssai& v) {
  json j = {{"sst", v.sst}};
  if (v.sd) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06X", *v.sd);
    j["sd"] = buf;
  }
  return j;
}

json toJson(const NetworkId& v) { return {{"plmnId", toJson(v.plmn)}, {"snssai", toJson(v.snssai)}}; }

json toJson(const QosFlowType& v) { return {{"fiveQi", v.fiveQi}, {"arp", v.arp}}; }

json toJson(const AuthorisedLoadEntry& v) {
  json fts = json::array();
  for (const auto& ft : v.flowTypes) fts.push_back(toJson(ft));
  json j = {{"flowTypes", fts},
            {"maximumLoad", optionalLoad(v.maximumLoad, true)},
            {"averagingWindowS", v.averagingWindowS},
            {"notificationControl", toString(v.notificationControl)}};
  if (v.guaranteedLoad) j["guaranteedLoad"] = *v.guaranteedLoad;
  return j;
}

json toJson(const AuthorisedLoad& v) {
  json arr = json::array();
  for (const auto& e : v) arr.push_back(toJson(e));
  return arr;
}

json toJson(const TargetKpi& v) {
  return {{"kpi", toString(v.name)}, {"threshold", v.threshold}, {"direction", toString(v.direction)}};
}

json toJson(const PlannedLoadItem& v) {
  json w = json::object();
  for (const auto& [cell, weight] : v.cellWeights) w[cell] = weight;
  return {{"flowType", toJson(v.flowType)}, {"expectedMbps", v.expectedMbps}, {"cellWeights", w}};
}

PlmnId parsePlmnId(const json& j, const std::string& path) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    auto dash = s.find('-');
    if (dash == std::string::npos) parseError(path, "PLMN id string must be 'MCC-MNC'");
    return {s.substr(0, dash), s.substr(dash + 1)};
  }
  JsonReader r(j, path);
  PlmnId p{r.req<std::string>("mcc"), r.req<std::string>("mnc")};
  r.finish();
  return p;
}

SNssai parseSNssai(const json& j, const std::string& path) {
  JsonReader r(j, path);
  SNssai s;
  s.sst = r.req<int>("sst");
  if (const json* sd = r.rawOpt("sd")) {
    if (sd->is_number_unsigned() || sd->is_number_integer()) {
      auto v = sd->get<long long>();
      if (v < 0) parseError(r.pathOf("sd"), "sd must be non-negative");
      s.sd = static_cast<std::uint32_t>(std::min<long long>(v, 0xFFFFFFFFll));
    } else if (sd->is_string()) {
      auto text = sd->get<std::string>();
      char* end = nullptr;
      unsigned long v = std::strtoul(text.c_str(), &end, 16);
      if (text.empty() || *end != '\0') parseError(r.pathOf("sd"), "sd must be a hex string");
      s.sd = static_cast<std::uint32_t>(std::min<unsigned long>(v, 0xFFFFFFFFul));
    } else {
      parseError(r.pathOf("sd"), "sd must be a hex string or integer");
    }
  }
  r.finish();
  return s;
}

NetworkId parseNetworkId(const json& j, const std::string& path) {
  JsonReader r(j, path);
  NetworkId id{parsePlmnId(r.raw("plmnId"), r.pathOf("plmnId")), parseSNssai(r.raw("snssai"), r.pathOf("snssai"))};
  r.finish();
  return id;
}

std::vector<NetworkId> parseNetworkIds(const json& j, const std::string& path) {
  requireArray(j, path);
  std::vector<NetworkId> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parseNetworkId(j[i], idx(path, i)));
  return out;
}

QosFlowType parseQosFlowType(const json& j, const std::string& path) {
  JsonReader r(j, path);
  QosFlowType ft{r.req<int>("fiveQi"), r.req<int>("arp")};
  r.finish();
  return ft;
}

std::vector<QosFlowType> parseFlowTypes(const json& j, const std::string& path) {
  requireArray(j, path);
  std::vector<QosFlowType> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parseQosFlowType(j[i], idx(path, i)));
  return out;
}

std::optional<double> parseLoadValue(const json& j, const std::string& path, LoadScope scope,
                                     std::optional<double> cellCapacityMbps) {
  if (j.is_null()) return std::nullopt;
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "N/A") return std::nullopt;
    if (!s.empty() && s.back() == '%') {
      if (scope != LoadScope::Cell) parseError(path, "percentages only apply to cell-level loads");
      char* end = nullptr;
      double pct = std::strtod(s.c_str(), &end);
      if (end != s.c_str() + s.size() - 1) parseError(path, "malformed percentage '" + s + "'");
      return pct / 100.0;
    }
    parseError(path, "load must be a number, 'NN%', 'N/A' or {\"mbps\": x}");
  }
  if (j.is_object()) {
    JsonReader r(j, path);
    double mbps = r.req<double>("mbps");
    r.finish();
    if (scope == LoadScope::Slice) return mbps;
    if (!cellCapacityMbps || *cellCapacityMbps <= 0)
      parseError(path, "absolute load needs a cell capacity to convert against");
    return mbps / *cellCapacityMbps;
  }
  parseError(path, "unsupported load value");
}

AuthorisedLoadEntry parseAuthorisedLoadEntry(const json& j, const std::string& path, LoadScope scope,
                                             std::optional<double> cellCapacityMbps) {
  JsonReader r(j, path);
  AuthorisedLoadEntry e;
  e.flowTypes = parseFlowTypes(r.raw("flowTypes"), r.pathOf("flowTypes"));
  if (const json* g = r.rawOpt("guaranteedLoad"))
    e.guaranteedLoad = parseLoadValue(*g, r.pathOf("guaranteedLoad"), scope, cellCapacityMbps);
  if (const json* m = r.rawOpt("maximumLoad"))
    e.maximumLoad = parseLoadValue(*m, r.pathOf("maximumLoad"), scope, cellCapacityMbps);
  e.averagingWindowS = r.req<double>("averagingWindowS");
  if (const json* nc = r.rawOpt("notificationControl"))
    e.notificationControl = parseNotificationControl(*nc, r.pathOf("notificationControl"));
  r.finish();
  return e;
}

AuthorisedLoad parseAuthorisedLoad(const json& j, const std::string& path, LoadScope scope,
                                   std::optional<double> cellCapacityMbps) {
  if (j.is_null()) return {};
  requireArray(j, path);
  AuthorisedLoad al;
  for (std::size_t i = 0; i < j.size(); ++i)
    al.push_back(parseAuthorisedLoadEntry(j[i], idx(path, i), scope, cellCapacityMbps));
  return al;
}

KpiName parseKpiName(const std::string& s, const std::string& path) {
  if (s == "avgRateNonGbr") return KpiName::AvgRateNonGbr;
  if (s == "minRateNonGbr") return KpiName::MinRateNonGbr;
  if (s == "blockedLoadRatio") return KpiName::BlockedLoadRatio;
  parseError(path, "unknown KPI '" + s + "'");
}

TargetKpi parseTargetKpi(const json& j, const std::string& path) {
  JsonReader r(j, path);
  TargetKpi k;
  k.name = parseKpiName(r.req<std::string>("kpi"), r.pathOf("kpi"));
  k.threshold = r.req<double>("threshold");
  k.direction = k.name == KpiName::BlockedLoadRatio ? KpiDirection::AtMost : KpiDirection::AtLeast;
  if (auto d = r.opt<std::string>("direction")) {
    if (*d == ">=") k.direction = KpiDirection::AtLeast;
    else if (*d == "<=") k.direction = KpiDirection::AtMost;
    else parseError(r.pathOf("direction"), "direction must be '>=' or '<='");
  }
  r.finish();
  return k;
}

PlannedLoadItem parsePlannedLoadItem(const json& j, const std::string& path) {
  JsonReader r(j, path);
  PlannedLoadItem item;
  item.flowType = parseQosFlowType(r.raw("flowType"), r.pathOf("flowType"));
  item.expectedMbps = r.req<double>("expectedMbps");
  if (const json* w = r.rawOpt("cellWeights")) {
    if (!w->is_object()) parseError(r.pathOf("cellWeights"), "expected object");
    for (const auto& [cell, v] : w->items())
      item.cellWeights[cell] = JsonReader::convert<double>(v, r.pathOf("cellWeights") + "/" + cell);
  }
  r.finish();
  return item;
}

GnbKind parseGnbKind(const std::string& s, const std::string& path) {
  if (s == "gNB") return GnbKind::Gnb;
  if (s == "gNB-CU") return GnbKind::GnbCu;
  if (s == "gNB-DU") return GnbKind::GnbDu;
  parseError(path, "kind must be gNB, gNB-CU or gNB-DU, got '" + s + "'");
}

json attributes(const Subnetwork& v) { return {{"id", v.id}}; }

json attributes(const ManagedElement& v) { return {{"id", v.id}, {"vendor", v.vendor}}; }

json attributes(const GnbFunction& v) {
  json j = {{"id", v.id}, {"kind", toString(v.kind)}};
  if (v.cuRef) j["cuRef"] = *v.cuRef;
  return j;
}

json attributes(const NrCell& v) {
  json plmns = json::array();
  for (const auto& p : v.plmnList) {
    json svc = json::array();
    for (auto s : p.exposedServices) svc.push_back(toString(s));
    plmns.push_back({{"plmnId", toJson(p.plmnId)}, {"exposedServices", svc}});
  }
  return {{"cellId", v.cellId},
          {"band", v.band},
          {"channelBandwidthMHz", v.channelBandwidthMHz},
          {"txPowerDbm", v.txPowerDbm},
          {"barred", v.barred},
          {"plmnList", plmns},
          {"nsdRef", v.nsdRef},
          {"sectorEquipmentRefs", v.sectorEquipmentRefs},
          {"auxRefs", v.auxRefs},
          {"oversubscribed", v.oversubscribed}};
}

json attributes(const CellSlice& v) {
  json ids = json::array();
  for (const auto& id : v.networkIds) ids.push_back(toJson(id));
  return {{"cellSliceId", v.cellSliceId},
          {"rst", v.rst},
          {"networkIds", ids},
          {"authorisedLoad", toJson(v.authorisedLoad)}};
}

json attributes(const RanSlice& v) {
  json refs = json::array();
  for (const auto& r : v.cellSliceRefs) refs.push_back({{"cellId", r.cellId}, {"cellSliceId", r.cellSliceId}});
  json ids = json::array();
  for (const auto& id : v.networkIds) ids.push_back(toJson(id));
  json kpis = json::array();
  for (const auto& k : v.targetKpis) kpis.push_back(toJson(k));
  json j = {{"ranSliceId", v.ranSliceId},
            {"cellSliceRefs", refs},
            {"networkIds", ids},
            {"authorisedLoad", toJson(v.authorisedLoad)},
            {"targetKpis", kpis},
            {"state", toString(v.state)}};
  if (v.plannedLoad) {
    json pl = json::array();
    for (const auto& item : *v.plannedLoad) pl.push_back(toJson(item));
    j["plannedLoad"] = pl;
  }
  return j;
}

ManagedElement parseManagedElement(const json& attrs, const std::string& path) {
  JsonReader r(attrs, path);
  ManagedElement me;
  me.id = r.req<std::string>("id");
  me.vendor = r.get<std::string>("vendor", "");
  r.finish();
  return me;
}

GnbFunction parseGnbFunction(const json& attrs, const std::string& path) {
  JsonReader r(attrs, path);
  GnbFunction fn;
  fn.id = r.req<std::string>("id");
  fn.kind = parseGnbKind(r.req<std::string>("kind"), r.pathOf("kind"));
  fn.cuRef = r.opt<std::string>("cuRef");
  r.finish();
  return fn;
}

NrCell parseNrCell(const json& attrs, const std::string& path) {
  JsonReader r(attrs, path);
  NrCell c;
  c.cellId = r.req<std::string>("cellId");
  c.band = r.req<std::string>("band");
  c.channelBandwidthMHz = r.req<double>("channelBandwidthMHz");
  c.txPowerDbm = r.get<double>("txPowerDbm", 0.0);
  c.barred = r.get<bool>("barred", false);
  if (const json* pl = r.rawOpt("plmnList")) {
    requireArray(*pl, r.pathOf("plmnList"));
    for (std::size_t i = 0; i < pl->size(); ++i) {
      const auto p = idx(r.pathOf("plmnList"), i);
      JsonReader pr((*pl)[i], p);
      PlmnInfo info;
      info.plmnId = parsePlmnId(pr.raw("plmnId"), pr.pathOf("plmnId"));
      if (const json* svc = pr.rawOpt("exposedServices")) {
        requireArray(*svc, pr.pathOf("exposedServices"));
        for (std::size_t k = 0; k < svc->size(); ++k)
          info.exposedServices.push_back(parseExposedService((*svc)[k], idx(pr.pathOf("exposedServices"), k)));
      }
      pr.finish();
      c.plmnList.push_back(std::move(info));
    }
  }
  c.nsdRef = r.get<std::string>("nsdRef", "");
  c.sectorEquipmentRefs = r.get<std::vector<std::string>>("sectorEquipmentRefs", {});
  c.auxRefs = r.get<std::vector<std::string>>("auxRefs", {});
  c.oversubscribed = r.get<bool>("oversubscribed", false);
  r.finish();
  return c;
}

CellSlice parseCellSlice(const json& attrs, const std::string& path, std::optional<double> cellCapacityMbps) {
  JsonReader r(attrs, path);
  CellSlice cs;
  cs.cellSliceId = r.req<std::string>("cellSliceId");
  cs.rst = r.req<std::string>("rst");
  cs.networkIds = parseNetworkIds(r.raw("networkIds"), r.pathOf("networkIds"));
  if (const json* al = r.rawOpt("authorisedLoad"))
    cs.authorisedLoad = parseAuthorisedLoad(*al, r.pathOf("authorisedLoad"), LoadScope::Cell, cellCapacityMbps);
  r.finish();
  return cs;
}

RanSlice parseRanSlice(const json& attrs, const std::string& path) {
  JsonReader r(attrs, path);
  RanSlice rs;
  rs.ranSliceId = r.req<std::string>("ranSliceId");
  if (const json* refs = r.rawOpt("cellSliceRefs")) {
    requireArray(*refs, r.pathOf("cellSliceRefs"));
    for (std::size_t i = 0; i < refs->size(); ++i) {
      JsonReader rr((*refs)[i], idx(r.pathOf("cellSliceRefs"), i));
      CellSliceRef ref{rr.req<std::string>("cellId"), rr.req<std::string>("cellSliceId")};
      rr.finish();
      rs.cellSliceRefs.push_back(std::move(ref));
    }
  }
  rs.networkIds = parseNetworkIds(r.raw("networkIds"), r.pathOf("networkIds"));
  if (const json* al = r.rawOpt("authorisedLoad"))
    rs.authorisedLoad = parseAuthorisedLoad(*al, r.pathOf("authorisedLoad"), LoadScope::Slice);
  if (const json* pl = r.rawOpt("plannedLoad")) {
    requireArray(*pl, r.pathOf("plannedLoad"));
    std::vector<PlannedLoadItem> items;
    for (std::size_t i = 0; i < pl->size(); ++i)
      items.push_back(parsePlannedLoadItem((*pl)[i], idx(r.pathOf("plannedLoad"), i)));
    rs.plannedLoad = std::move(items);
  }
  if (const json* k = r.rawOpt("targetKpis")) {
    requireArray(*k, r.pathOf("targetKpis"));
    for (std::size_t i = 0; i < k->size(); ++i)
      rs.targetKpis.push_back(parseTargetKpi((*k)[i], idx(r.pathOf("targetKpis"), i)));
  }
  if (auto st = r.opt<std::string>("state")) rs.state = parseSliceState(*st, r.pathOf("state"));
  r.finish();
  return rs;
}

const char* idField(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::NrCell: return "cellId";
    case ObjectKind::CellSlice: return "cellSliceId";
    case ObjectKind::RanSlice: return "ranSliceId";
    default: return "id";
  }
}

namespace {

json node(const Model& m, const CellSlice& cs, int) { (void)m; return attributes(cs); }

json node(const Model& m, const NrCell& c, int depth) {
  json j = attributes(c);
  if (depth == 0) return j;
  json kids = json::array();
  for (const auto& cs : c.cellSlices) kids.push_back(node(m, cs, depth - 1));
  j["CellSlice"] = kids;
  return j;
}

json node(const Model& m, const GnbFunction& fn, int depth) {
  json j = attributes(fn);
  if (depth == 0) return j;
  json kids = json::array();
  for (const auto& c : fn.cells) kids.push_back(node(m, c, depth - 1));
  j["NrCell"] = kids;
  return j;
}

json node(const Model& m, const ManagedElement& me, int depth) {
  json j = attributes(me);
  if (depth == 0) return j;
  json kids = json::array();
  for (const auto& fn : me.functions) kids.push_back(node(m, fn, depth - 1));
  j["GnbFunction"] = kids;
  return j;
}

json node(const Model& m, const RanSlice& rs, int) { (void)m; return attributes(rs); }

json node(const Model& m, const Subnetwork& sn, int depth) {
  json j = attributes(sn);
  if (depth == 0) return j;
  json mes = json::array();
  for (const auto& me : sn.managedElements) mes.push_back(node(m, me, depth - 1));
  json rss = json::array();
  for (const auto& rs : sn.ranSlices) rss.push_back(node(m, rs, depth - 1));
  j["ManagedElement"] = mes;
  j["RanSlice"] = rss;
  return j;
}

}  // namespace

json subtree(const Model& model, const Dn& root, int depth) {
  if (!exists(model, root)) throw Error(ErrorCode::UnknownObject, "object " + root.str() + " does not exist");
  const auto& rdns = root.rdns();
  const auto& sn = model.subnetwork;
  if (rdns.size() == 1) return node(model, sn, depth);
  // Walk down; exists() guarantees every step resolves.
  const ManagedElement* me = nullptr;
  const GnbFunction* fn = nullptr;
  const NrCell* cell = nullptr;
  for (std::size_t i = 1; i < rdns.size(); ++i) {
    const auto& r = rdns[i];
    const bool last = i + 1 == rdns.size();
    switch (r.kind) {
      case ObjectKind::RanSlice: return node(model, *model.findRanSlice(r.id), depth);
      case ObjectKind::ManagedElement:
        me = model.findManagedElement(r.id);
        if (last) return node(model, *me, depth);
        break;
      case ObjectKind::GnbFunction:
        for (const auto& f : me->functions)
          if (f.id == r.id) fn = &f;
        if (last) return node(model, *fn, depth);
        break;
      case ObjectKind::NrCell:
        for (const auto& c : fn->cells)
          if (c.cellId == r.id) cell = &c;
        if (last) return node(model, *cell, depth);
        break;
      case ObjectKind::CellSlice: return node(model, *cell->findSlice(r.id), depth);
      case ObjectKind::Subnetwork: break;
    }
  }
  return json::object();
}

json exportModel(const Model& model) {
  json audit = json::array();
  for (const auto& e : model.auditLog)
    audit.push_back({{"version", e.version},
                     {"op", e.op},
                     {"dn", e.dn},
                     {"kind", std::string(toString(e.kind))},
                     {"attributes", e.attributes}});
  json versions = json::object();
  for (const auto& [dn, v] : model.objectVersions) versions[dn] = v;
  return {{"subnetwork", subtree(model, model.rootDn(), -1)},
          {"meta",
           {{"format", "ranslice-model/1"},
            {"version", model.version},
            {"settings",
             {{"spectralEfficiency", model.settings.spectralEfficiency},
              {"rstCatalog", model.settings.rstCatalog}}},
            {"objectVersions", versions},
            {"auditLog", audit}}}};
}

namespace {

// Recreates the tree object-by-object so duplicate ids and containment are
// checked exactly as for live writes.
void buildNode(Model& m, const Dn& parent, ObjectKind kind, const json& j, const std::string& path) {
  if (!j.is_object()) parseError(path, "expected object");
  json attrs = json::object();
  std::vector<std::pair<ObjectKind, const json*>> children;
  std::vector<std::string> childKeys;
  for (const auto& [key, value] : j.items()) {
    if (!isKindKey(key)) {
      attrs[key] = value;
      continue;
    }
    auto childKind = parseObjectKind(key);
    if (!childKind) parseError(path + "/" + key, "unknown object kind '" + key + "'");
    if (!isLegalChild(kind, *childKind))
      parseError(path + "/" + key, key + " cannot be contained in " + std::string(toString(kind)));
    requireArray(value, path + "/" + key);
    children.emplace_back(*childKind, &value);
    childKeys.push_back(key);
  }
  Dn self;
  if (kind == ObjectKind::Subnetwork) {
    JsonReader r(attrs, path);
    m.subnetwork.id = r.req<std::string>("id");
    r.finish();
    self = m.rootDn();
  } else {
    try {
      self = createObject(m, parent, kind, attrs);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      throw Error(e.code(), path + ": " + e.what(), e.details());
    }
  }
  for (std::size_t c = 0; c < children.size(); ++c) {
    const auto& [childKind, arr] = children[c];
    for (std::size_t i = 0; i < arr->size(); ++i)
      buildNode(m, self, childKind, (*arr)[i], path + "/" + childKeys[c] + "/" + std::to_string(i));
  }
}

}  // namespace

Model importModel(const json& document) {
  JsonReader top(document, "");
  Model m;
  const json* meta = top.rawOpt("meta");
  json metaAudit;
  std::optional<std::uint64_t> metaVersion;
  json metaVersions;
  if (meta) {
    JsonReader mr(*meta, "/meta");
    mr.skip("format");
    if (const json* s = mr.rawOpt("settings")) {
      JsonReader sr(*s, "/meta/settings");
      m.settings.spectralEfficiency = sr.get<double>("spectralEfficiency", m.settings.spectralEfficiency);
      m.settings.rstCatalog = sr.get<std::vector<std::string>>("rstCatalog", m.settings.rstCatalog);
      sr.finish();
    }
    metaVersion = mr.opt<std::uint64_t>("version");
    if (const json* ov = mr.rawOpt("objectVersions")) metaVersions = *ov;
    if (const json* al = mr.rawOpt("auditLog")) metaAudit = requireArray(*al, "/meta/auditLog");
    mr.finish();
  }
  buildNode(m, Dn(), ObjectKind::Subnetwork, top.raw("subnetwork"), "/subnetwork");
  top.finish();

  if (!metaAudit.is_null()) {
    std::vector<AuditEntry> log;
    for (std::size_t i = 0; i < metaAudit.size(); ++i) {
      const auto p = "/meta/auditLog/" + std::to_string(i);
      JsonReader er(metaAudit[i], p);
      AuditEntry e;
      e.version = er.req<std::uint64_t>("version");
      e.op = er.req<std::string>("op");
      e.dn = er.req<std::string>("dn");
      auto kindText = er.req<std::string>("kind");
      auto kind = parseObjectKind(kindText);
      if (!kind) parseError(er.pathOf("kind"), "unknown object kind '" + kindText + "'");
      e.kind = *kind;
      e.attributes = er.req<json>("attributes");
      er.finish();
      log.push_back(std::move(e));
    }
    Model replayed;
    try {
      replayed = replayAuditLog(m.subnetwork.id, m.settings, log);
    } catch (const Error& e) {
      parseError("/meta/auditLog", std::string("audit log does not replay: ") + e.what());
    }
    if (!sameTree(replayed, m)) parseError("/meta/auditLog", "audit log does not replay to the exported tree");
    m.auditLog = std::move(log);
    m.version = metaVersion.value_or(replayed.version);
    m.objectVersions = replayed.objectVersions;
  } else if (metaVersion) {
    m.version = std::max(*metaVersion, m.version);
  }
  if (metaVersions.is_object()) {
    m.objectVersions.clear();
    for (const auto& [dn, v] : metaVersions.items())
      m.objectVersions[dn] = JsonReader::convert<std::uint64_t>(v, "/meta/objectVersions/" + dn);
  }

  auto violations = validate(m);
  if (!violations.empty()) {
    json list = json::array();
    for (const auto& v : violations) list.push_back(v.toJson());
    throw Error(ErrorCode::InvariantViolation,
                "imported model violates " + std::to_string(violations.size()) + " invariant(s); first: " +
                    violations.front().path + ": " + violations.front().message,
                {{"violations", list}});
  }
  return m;
}

Model importModel(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what(),
                {{"location", "byte " + std::to_string(e.byte)}});
  }
  return importModel(doc);
}

}  // namespace ranslice::nrm::codec
