#include "ranslice/enforcement/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::enforcement {

namespace nt = notification_types;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<nrm::PlmnId> plmnsOf(const std::vector<nrm::NetworkId>& ids) {
  std::vector<nrm::PlmnId> out;
  for (const auto& id : ids)
    if (std::find(out.begin(), out.end(), id.plmn) == out.end()) out.push_back(id.plmn);
  return out;
}

double average(const std::deque<std::pair<double, double>>& s, bool first) {
  double sum = 0.0;
  for (const auto& [a, b] : s) sum += first ? a : b;
  return s.empty() ? 0.0 : sum / static_cast<double>(s.size());
}

}  // namespace

double OfferedLoadProfile::at(std::int64_t tick) const {
  auto it = std::upper_bound(points.begin(), points.end(), tick,
                             [](std::int64_t t, const auto& p) { return t < p.first; });
  if (it == points.begin()) return 0.0;
  return std::prev(it)->second;
}

void ProfileSet::add(OfferedLoadProfile profile) {
  const auto& k = profile.key;
  if (k.cellId.empty()) throw Error(ErrorCode::ScenarioValidationError, "offered load profile without cellId");
  if (k.cellSliceId.empty() == k.ranSliceId.empty())
    throw Error(ErrorCode::ScenarioValidationError,
                "offered load profile for " + k.cellId + " must name exactly one of cellSliceId or ranSliceId");
  for (std::size_t i = 0; i < profile.points.size(); ++i) {
    if (profile.points[i].second < 0 || !std::isfinite(profile.points[i].second))
      throw Error(ErrorCode::ScenarioValidationError, "offered load must be finite and >= 0",
                  {{"cellId", k.cellId}, {"tick", profile.points[i].first}});
    if (i > 0 && profile.points[i].first <= profile.points[i - 1].first)
      throw Error(ErrorCode::ScenarioValidationError, "offered load ticks must increase strictly",
                  {{"cellId", k.cellId}, {"tick", profile.points[i].first}});
  }
  profiles_.push_back(std::move(profile));
}

std::optional<std::int64_t> ProfileSet::horizon() const {
  std::optional<std::int64_t> h;
  for (const auto& p : profiles_)
    if (!p.points.empty()) h = std::max(h.value_or(p.points.back().first), p.points.back().first);
  return h;
}

std::map<std::string, OfferedByFlowType> ProfileSet::offered(const nrm::Model& model, const nrm::NrCell& cell,
                                                             std::int64_t tick) const {
  std::map<std::string, OfferedByFlowType> out;
  for (const auto& p : profiles_) {
    if (p.key.cellId != cell.cellId) continue;
    std::string cs = p.key.cellSliceId;
    if (cs.empty()) {
      const auto* rs = model.findRanSlice(p.key.ranSliceId);
      if (!rs) continue;
      for (const auto& ref : rs->cellSliceRefs)
        if (ref.cellId == cell.cellId) cs = ref.cellSliceId;
    }
    if (cs.empty() || !cell.findSlice(cs)) continue;
    const double v = p.at(tick);
    if (v > 0) out[cs][p.key.flowType] += v;
  }
  return out;
}

json SliceCompliance::toJson() const {
  json arr = json::array();
  for (const auto& e : entries) {
    json j{{"scope", e.scope},
           {"offered", e.offered},
           {"served", e.served},
           {"guaranteedMet", e.guaranteedMet},
           {"maximumExceeded", e.maximumExceeded}};
    j["guaranteedMbps"] = e.guaranteedMbps ? json(*e.guaranteedMbps) : json(nullptr);
    j["maximumMbps"] = e.maximumMbps ? json(*e.maximumMbps) : json("N/A");
    arr.push_back(j);
  }
  return {{"ranSliceId", ranSliceId}, {"entries", arr}};
}

std::optional<SliceCompliance> evaluateRanSliceAL(const nrm::RanSlice& slice,
                                                  const std::vector<AllocationResult>& cells) {
  if (slice.authorisedLoad.empty() || slice.state != nrm::SliceState::Active) return std::nullopt;
  std::set<nrm::CellSliceRef> refs(slice.cellSliceRefs.begin(), slice.cellSliceRefs.end());
  SliceCompliance out;
  out.ranSliceId = slice.ranSliceId;
  for (const auto& entry : slice.authorisedLoad) {
    SliceEntryCompliance c;
    c.scope = nrm::scopeKey(entry.flowTypes);
    c.guaranteedMbps = entry.guaranteedLoad;
    c.maximumMbps = entry.maximumLoad;
    for (const auto& cell : cells)
      for (const auto& agg : cell.aggregates) {
        if (!refs.count({cell.cellId, agg.cellSliceId})) continue;
        for (const auto& [ft, mbps] : agg.offeredByFlowType)
          if (entry.covers(ft)) {
            c.offered += mbps;
            c.served += agg.servedByFlowType.at(ft);
          }
      }
    if (c.guaranteedMbps) c.guaranteedMet = c.served >= std::min(c.offered, *c.guaranteedMbps) - 1e-9;
    if (c.maximumMbps) c.maximumExceeded = c.served > *c.maximumMbps + 1e-9;
    out.entries.push_back(c);
  }
  return out;
}

std::vector<std::string> TickResult::logLines() const {
  std::vector<std::string> lines;
  for (const auto& c : cells) {
    json j = c.toJson();
    j["record"] = "cellTick";
    j["tick"] = tick;
    lines.push_back(j.dump());
  }
  for (const auto& s : slices) {
    json j = s.toJson();
    j["record"] = "sliceTick";
    j["tick"] = tick;
    lines.push_back(j.dump());
  }
  for (const auto& n : notifications) {
    json j = n.toJson();
    j["record"] = "notification";
    lines.push_back(j.dump());
  }
  return lines;
}

Simulator::Simulator(SimConfig config, ProfileSet profiles) : config_(config), profiles_(std::move(profiles)) {
  if (!(config_.tickDurationS > 0))
    throw Error(ErrorCode::ScenarioValidationError, "tickDuration must be > 0");
  if (config_.epsilon < 0) throw Error(ErrorCode::ScenarioValidationError, "epsilon must be >= 0");
}

int Simulator::windowSpan(double averagingWindowS) const {
  return std::max(1, static_cast<int>(std::ceil(averagingWindowS / config_.tickDurationS - 1e-9)));
}

void Simulator::validateWindows(const nrm::Model& model) const {
  auto check = [&](const std::string& where, const nrm::AuthorisedLoad& al) {
    for (const auto& e : al) {
      const double ratio = e.averagingWindowS / config_.tickDurationS;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1)
        throw Error(ErrorCode::ScenarioValidationError,
                    where + ": averaging window " + std::to_string(e.averagingWindowS) +
                        " s is not a whole multiple of the tick",
                    {{"location", where}, {"averagingWindowS", e.averagingWindowS},
                     {"tickDurationS", config_.tickDurationS}});
    }
  };
  for (const auto* cell : model.cells())
    for (const auto& cs : cell->cellSlices) check(cell->cellId + "/" + cs.cellSliceId, cs.authorisedLoad);
  for (const auto& rs : model.subnetwork.ranSlices) check(rs.ranSliceId, rs.authorisedLoad);
}

void Simulator::setDegradation(const std::string& cellId, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0))
    throw Error(ErrorCode::InvariantViolation, "degradation factor must be in [0,1]", {{"factor", factor}});
  if (factor == 1.0)
    degradation_.erase(cellId);
  else
    degradation_[cellId] = factor;
}

double Simulator::degradation(const std::string& cellId) const {
  auto it = degradation_.find(cellId);
  return it == degradation_.end() ? 1.0 : it->second;
}

TickResult Simulator::advanceTick(const nrm::Model& model, std::int64_t tick) {
  if (lastTick_ && tick != *lastTick_ + 1)
    throw Error(ErrorCode::OutOfOrderTick,
                "tick " + std::to_string(tick) + " does not follow " + std::to_string(*lastTick_),
                {{"tick", tick}, {"lastTick", *lastTick_}});
  if (auto h = profiles_.horizon(); h && tick > *h)
    throw Error(ErrorCode::ProfileExhausted, "tick " + std::to_string(tick) + " is beyond the offered load horizon",
                {{"tick", tick}, {"horizon", *h}});
  validateWindows(model);

  TickResult result;
  result.tick = tick;
  std::set<std::string> seen;
  auto notify = [&](const char* type, const std::string& cellId, const std::string& cellSliceId,
                    const std::string& ranSliceId, std::vector<nrm::PlmnId> plmns, json data) {
    Notification n;
    n.type = type;
    n.source = "EM";
    n.tick = tick;
    n.cellId = cellId;
    n.cellSliceId = cellSliceId;
    n.ranSliceId = ranSliceId;
    n.plmns = std::move(plmns);
    n.data = std::move(data);
    result.notifications.push_back(std::move(n));
  };

  for (const auto* cell : model.cells()) {
    auto alloc = allocateCapacity(*cell, model.cellCapacityMbps(*cell), degradation(cell->cellId),
                                  profiles_.offered(model, *cell, tick));
    for (const auto& agg : alloc.aggregates) {
      if (!agg.alEntry) continue;
      const auto* cs = cell->findSlice(agg.cellSliceId);
      const auto& entry = cs->authorisedLoad[*agg.alEntry];
      if (entry.notificationControl != nrm::NotificationControl::Enabled) continue;
      const std::string key = cell->cellId + "|" + agg.cellSliceId + "|" + agg.scope;
      seen.insert(key);
      auto& w = cellWindows_[key];
      const int span = windowSpan(entry.averagingWindowS);
      const std::string signature =
          std::to_string(entry.guaranteedLoad.value_or(0.0)) + "/" + std::to_string(span);
      const std::string owner = model.ownerOf(cell->cellId, agg.cellSliceId).value_or("");
      if (w.signature != signature) {
        // A changed entry starts a fresh window; an open alarm is closed first.
        if (w.raised)
          notify(nt::kGuaranteedLoadRestored, cell->cellId, agg.cellSliceId, owner, plmnsOf(cs->networkIds),
                 {{"scope", agg.scope}, {"level", "cellSlice"}, {"reason", "authorisedLoadChanged"}});
        w = Window{span, signature, {}, false};
      }
      w.samples.emplace_back(agg.served, agg.guaranteedTarget);
      while (static_cast<int>(w.samples.size()) > w.span) w.samples.pop_front();
      if (static_cast<int>(w.samples.size()) < w.span) continue;
      const double avgServed = average(w.samples, true);
      const double avgTarget = average(w.samples, false);
      const bool violated = avgServed < avgTarget * (1.0 - config_.epsilon);
      json data{{"scope", agg.scope},
                {"level", "cellSlice"},
                {"windowAvgServedMbps", avgServed},
                {"windowAvgTargetMbps", avgTarget},
                {"averagingWindowS", entry.averagingWindowS},
                {"guaranteedLoad", entry.guaranteedLoad.value_or(0.0)}};
      if (violated && !w.raised) {
        w.raised = true;
        notify(nt::kGuaranteedLoadNotFulfilled, cell->cellId, agg.cellSliceId, owner, plmnsOf(cs->networkIds), data);
      } else if (!violated && w.raised) {
        w.raised = false;
        notify(nt::kGuaranteedLoadRestored, cell->cellId, agg.cellSliceId, owner, plmnsOf(cs->networkIds), data);
      }
    }
    result.cells.push_back(std::move(alloc));
  }
  for (auto it = cellWindows_.begin(); it != cellWindows_.end();) {
    if (seen.count(it->first)) {
      ++it;
      continue;
    }
    if (it->second.raised) {
      const auto first = it->first.find('|'), second = it->first.find('|', first + 1);
      notify(nt::kGuaranteedLoadRestored, it->first.substr(0, first), it->first.substr(first + 1, second - first - 1),
             "", {}, {{"scope", it->first.substr(second + 1)}, {"level", "cellSlice"}, {"reason", "entryRemoved"}});
    }
    it = cellWindows_.erase(it);
  }

  // Slice-level entries are monitored only.
  std::set<std::string> seenSlices;
  for (const auto& rs : model.subnetwork.ranSlices) {
    auto compliance = evaluateRanSliceAL(rs, result.cells);
    if (!compliance) continue;
    for (std::size_t i = 0; i < compliance->entries.size(); ++i) {
      const auto& c = compliance->entries[i];
      const auto& entry = rs.authorisedLoad[i];
      const std::string key = rs.ranSliceId + "|" + c.scope;
      seenSlices.insert(key);
      auto& w = sliceWindows_[key];
      const int span = windowSpan(entry.averagingWindowS);
      const std::string signature = std::to_string(entry.guaranteedLoad.value_or(-1.0)) + "/" +
                                    std::to_string(entry.maximumLoad.value_or(-1.0)) + "/" + std::to_string(span);
      if (w.signature != signature) w = SliceWindow{span, signature, {}, false, false};
      const double target = c.guaranteedMbps ? std::min(c.offered, *c.guaranteedMbps) : 0.0;
      w.samples.emplace_back(c.served, target);
      while (static_cast<int>(w.samples.size()) > w.span) w.samples.pop_front();
      if (static_cast<int>(w.samples.size()) < w.span) continue;
      const double avgServed = average(w.samples, true);
      const double avgTarget = average(w.samples, false);
      json data{{"scope", c.scope},
                {"level", "ranSlice"},
                {"windowAvgServedMbps", avgServed},
                {"windowAvgTargetMbps", avgTarget},
                {"averagingWindowS", entry.averagingWindowS}};
      if (c.maximumMbps) data["maximumLoadMbps"] = *c.maximumMbps;
      if (c.guaranteedMbps) data["guaranteedLoadMbps"] = *c.guaranteedMbps;
      const auto plmns = plmnsOf(rs.networkIds);
      if (entry.notificationControl == nrm::NotificationControl::Enabled && c.guaranteedMbps) {
        const bool violated = avgServed < avgTarget * (1.0 - config_.epsilon);
        if (violated != w.guaranteeRaised) {
          w.guaranteeRaised = violated;
          notify(violated ? nt::kGuaranteedLoadNotFulfilled : nt::kGuaranteedLoadRestored, "", "", rs.ranSliceId,
                 plmns, data);
        }
      }
      if (c.maximumMbps) {
        const bool exceeded = avgServed > *c.maximumMbps * (1.0 + config_.epsilon);
        if (exceeded != w.maximumRaised) {
          w.maximumRaised = exceeded;
          notify(exceeded ? nt::kMaximumLoadExceeded : nt::kMaximumLoadRestored, "", "", rs.ranSliceId, plmns, data);
        }
      }
    }
    result.slices.push_back(std::move(*compliance));
  }
  for (auto it = sliceWindows_.begin(); it != sliceWindows_.end();)
    it = seenSlices.count(it->first) ? std::next(it) : sliceWindows_.erase(it);

  lastTick_ = tick;
  return result;
}

OfferedLoadProfile parseProfile(const json& j, const std::string& path, std::uint64_t seed) {
  JsonReader r(j, path);
  OfferedLoadProfile p;
  p.key.cellId = r.req<std::string>("cellId");
  p.key.cellSliceId = r.get<std::string>("cellSliceId", "");
  p.key.ranSliceId = r.get<std::string>("ranSliceId", "");
  if (const json* ft = r.rawOpt("flowType")) p.key.flowType = nrm::codec::parseQosFlowType(*ft, r.pathOf("flowType"));
  const json* points = r.rawOpt("points");
  const json* segments = r.rawOpt("segments");
  if ((points == nullptr) == (segments == nullptr)) parseError(path, "profile needs exactly one of points or segments");
  if (points) {
    requireArray(*points, r.pathOf("points"));
    for (std::size_t i = 0; i < points->size(); ++i) {
      const auto& pt = (*points)[i];
      const std::string at = r.pathOf("points") + "/" + std::to_string(i);
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number_integer() || !pt[1].is_number())
        parseError(at, "expected [tick, mbps]");
      p.points.emplace_back(pt[0].get<std::int64_t>(), pt[1].get<double>());
    }
  } else {
    requireArray(*segments, r.pathOf("segments"));
    const std::uint64_t stream = fnv1a(p.key.cellId + "|" + p.key.cellSliceId + "|" + p.key.ranSliceId + "|" +
                                       nrm::toString(p.key.flowType));
    for (std::size_t i = 0; i < segments->size(); ++i) {
      JsonReader s((*segments)[i], r.pathOf("segments") + "/" + std::to_string(i));
      const auto from = s.req<std::int64_t>("from");
      const auto to = s.req<std::int64_t>("to");
      const double mbps = s.req<double>("mbps");
      const double jitter = s.get<double>("jitter", 0.0);
      s.finish();
      if (to < from) parseError(s.path(), "'to' precedes 'from'");
      if (jitter < 0 || jitter > 1) parseError(s.pathOf("jitter"), "jitter must be in [0,1]");
      for (std::int64_t t = from; t <= to; ++t) {
        double v = mbps;
        if (jitter > 0) {
          const std::uint64_t bits = splitmix64(seed ^ stream ^ splitmix64(static_cast<std::uint64_t>(t)));
          const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
          v = mbps * (1.0 + jitter * (2.0 * u - 1.0));
        }
        p.points.emplace_back(t, v);
      }
    }
  }
  r.finish();
  return p;
}

}  // namespace ranslice::enforcement
