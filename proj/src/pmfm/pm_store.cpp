#include "ranslice/pmfm/pm_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ranslice/nrm/codec.hpp"

namespace ranslice::pmfm {

namespace codec = nrm::codec;

bool isGbr(int fiveQi) {
  static const std::set<int> gbr{1, 2, 3, 4, 65, 66, 67, 71, 72, 73, 74, 75, 76, 82, 83, 84, 85, 86, 87, 88, 89, 90};
  return gbr.count(fiveQi) > 0;
}

std::string toString(Verdict v) { return v == Verdict::Met ? "MET" : "VIOLATED"; }

json PmSample::toJson() const {
  json aggs = json::array();
  for (const auto& a : aggregates) {
    json flows = json::array();
    for (const auto& f : a.flows)
      flows.push_back({{"fiveQi", f.flowType.fiveQi}, {"arp", f.flowType.arp}, {"offered", f.offered}, {"served", f.served}});
    aggs.push_back({{"scope", a.scope},
                    {"offered", a.offered},
                    {"served", a.served},
                    {"blocked", a.blocked},
                    {"guaranteedTarget", a.guaranteedTarget},
                    {"flows", flows}});
  }
  return {{"record", "sample"},
          {"tick", tick},
          {"cellId", cellId},
          {"cellSliceId", cellSliceId},
          {"ranSliceId", ranSliceId},
          {"offered", offered},
          {"served", served},
          {"blocked", blocked},
          {"aggregates", aggs}};
}

namespace {

PmSample sampleFromJson(const json& j) {
  PmSample s;
  s.tick = j.at("tick").get<std::int64_t>();
  s.cellId = j.at("cellId").get<std::string>();
  s.cellSliceId = j.at("cellSliceId").get<std::string>();
  s.ranSliceId = j.at("ranSliceId").get<std::string>();
  s.offered = j.at("offered").get<double>();
  s.served = j.at("served").get<double>();
  s.blocked = j.at("blocked").get<double>();
  for (const auto& a : j.at("aggregates")) {
    AggregateSample as;
    as.scope = a.at("scope").get<std::string>();
    as.offered = a.at("offered").get<double>();
    as.served = a.at("served").get<double>();
    as.blocked = a.at("blocked").get<double>();
    as.guaranteedTarget = a.at("guaranteedTarget").get<double>();
    for (const auto& f : a.at("flows"))
      as.flows.push_back({{f.at("fiveQi").get<int>(), f.at("arp").get<int>()},
                          f.at("offered").get<double>(),
                          f.at("served").get<double>()});
    s.aggregates.push_back(std::move(as));
  }
  return s;
}

json optionalNumber(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json scopeJson(const ScopeKpis& s) {
  return {{"scope", s.scope},
          {"avgServedMbps", s.avgServedMbps},
          {"minServedMbps", s.minServedMbps},
          {"avgOfferedMbps", s.avgOfferedMbps},
          {"blockedLoadRatio", optionalNumber(s.blockedLoadRatio)}};
}

}  // namespace

json KpiReport::toJson() const {
  json scopes_ = json::array();
  for (const auto& s : scopes) scopes_.push_back(scopeJson(s));
  json verdicts = json::array();
  for (const auto& v : kpiVerdicts) {
    json t = codec::toJson(v.target);
    t["value"] = optionalNumber(v.value);
    t["verdict"] = toString(v.verdict);
    verdicts.push_back(t);
  }
  json planned = json::array();
  for (const auto& p : plannedLoadDeviation)
    planned.push_back({{"flowType", codec::toJson(p.flowType)},
                       {"plannedMbps", p.plannedMbps},
                       {"avgServedMbps", p.avgServedMbps},
                       {"deviation", optionalNumber(p.deviation)}});
  json j{{"ranSliceId", ranSliceId},
         {"window", {{"startTick", startTick}, {"endTick", endTick}}},
         {"scopes", scopes_},
         {"total", scopeJson(total)},
         {"avgRateNonGbr", avgRateNonGbr},
         {"minRateNonGbr", minRateNonGbr},
         {"kpiVerdicts", verdicts}};
  if (!plannedLoadDeviation.empty()) j["plannedLoadDeviation"] = planned;
  return j;
}

void PmStore::applyLine(const json& line, std::string text) {
  const auto record = line.at("record").get<std::string>();
  const auto tick = line.at("tick").get<std::int64_t>();
  if (record == "ranSlice") {
    auto rs = codec::parseRanSlice(line.at("ranSlice"), "/ranSlice");
    history_[rs.ranSliceId].emplace_back(tick, std::move(rs));
  } else if (record == "tick") {
    ticks_.push_back(tick);
    auto& present = presence_[tick];
    for (const auto& id : line.at("ranSlices")) present.insert(id.get<std::string>());
    tickIndex_[tick] = {samples_.size(), samples_.size()};
  } else if (record == "sample") {
    samples_.push_back(sampleFromJson(line));
    tickIndex_[tick].second = samples_.size();
  } else {
    throw Error(ErrorCode::ParseError, "unknown PM record '" + record + "'");
  }
  lines_.push_back(std::move(text));
}

void PmStore::ingest(const nrm::Model& model, const enforcement::TickResult& result) {
  std::lock_guard lock(mutex_);
  if (!ticks_.empty() && result.tick <= ticks_.back())
    throw Error(ErrorCode::OutOfOrderTick,
                "tick " + std::to_string(result.tick) + " does not follow " + std::to_string(ticks_.back()),
                {{"tick", result.tick}, {"lastTick", ticks_.back()}});
  const auto tick = result.tick;
  auto emit = [&](const json& line) { applyLine(line, line.dump()); };

  json present = json::array();
  for (const auto& rs : model.subnetwork.ranSlices) {
    if (rs.state != nrm::SliceState::Active) continue;
    present.push_back(rs.ranSliceId);
    auto& h = history_[rs.ranSliceId];
    if (h.empty() || !(h.back().second == rs))
      emit({{"record", "ranSlice"}, {"tick", tick}, {"ranSlice", codec::attributes(rs)}});
  }
  emit({{"record", "tick"}, {"tick", tick}, {"ranSlices", present}});

  std::map<std::string, const enforcement::AllocationResult*> byCell;
  for (const auto& c : result.cells) byCell[c.cellId] = &c;
  for (const auto* cell : model.cells()) {
    const auto* alloc = byCell.count(cell->cellId) ? byCell[cell->cellId] : nullptr;
    for (const auto& cs : cell->cellSlices) {
      PmSample s;
      s.tick = tick;
      s.cellId = cell->cellId;
      s.cellSliceId = cs.cellSliceId;
      s.ranSliceId = model.ownerOf(cell->cellId, cs.cellSliceId).value_or("");
      if (alloc)
        for (const auto& agg : alloc->aggregates) {
          if (agg.cellSliceId != cs.cellSliceId) continue;
          AggregateSample a{agg.scope, agg.offered, agg.served, agg.blocked, agg.guaranteedTarget, {}};
          for (const auto& [ft, off] : agg.offeredByFlowType) a.flows.push_back({ft, off, agg.servedByFlowType.at(ft)});
          s.offered += a.offered;
          s.served += a.served;
          s.blocked += a.blocked;
          s.aggregates.push_back(std::move(a));
        }
      emit(s.toJson());
    }
  }
}

std::vector<PmSample> PmStore::samples(const std::string& cellId, const std::string& cellSliceId) const {
  std::lock_guard lock(mutex_);
  std::vector<PmSample> out;
  for (const auto& s : samples_)
    if (s.cellId == cellId && s.cellSliceId == cellSliceId) out.push_back(s);
  return out;
}

std::vector<PmSample> PmStore::samplesForSlice(const std::string& ranSliceId, std::int64_t from,
                                               std::int64_t to) const {
  std::lock_guard lock(mutex_);
  std::vector<PmSample> out;
  for (auto it = tickIndex_.lower_bound(from); it != tickIndex_.end() && it->first <= to; ++it)
    for (std::size_t i = it->second.first; i < it->second.second; ++i)
      if (samples_[i].ranSliceId == ranSliceId) out.push_back(samples_[i]);
  return out;
}

std::optional<std::int64_t> PmStore::firstTick() const {
  std::lock_guard lock(mutex_);
  if (ticks_.empty()) return std::nullopt;
  return ticks_.front();
}

std::optional<std::int64_t> PmStore::lastTick() const {
  std::lock_guard lock(mutex_);
  if (ticks_.empty()) return std::nullopt;
  return ticks_.back();
}

std::size_t PmStore::size() const {
  std::lock_guard lock(mutex_);
  return samples_.size();
}

KpiReport PmStore::computeKpiReport(const std::string& ranSliceId, std::int64_t startTick,
                                    std::int64_t endTick) const {
  std::lock_guard lock(mutex_);
  const json window{{"startTick", startTick}, {"endTick", endTick}};
  if (startTick > endTick)
    throw Error(ErrorCode::WindowIncomplete, "window start follows its end", window);
  if (ticks_.empty() || startTick < ticks_.front() || endTick > ticks_.back())
    throw Error(ErrorCode::WindowIncomplete,
                "window [" + std::to_string(startTick) + ", " + std::to_string(endTick) + "] is not fully ingested",
                {{"window", window},
                 {"firstTick", ticks_.empty() ? json(nullptr) : json(ticks_.front())},
                 {"lastTick", ticks_.empty() ? json(nullptr) : json(ticks_.back())}});
  std::vector<std::int64_t> absent;
  std::int64_t count = 0;
  for (auto it = presence_.lower_bound(startTick); it != presence_.end() && it->first <= endTick; ++it) {
    ++count;
    if (!it->second.count(ranSliceId)) absent.push_back(it->first);
  }
  if (count == 0 || static_cast<std::int64_t>(absent.size()) == count)
    throw Error(ErrorCode::UnknownSlice, "RAN slice '" + ranSliceId + "' did not exist in the window",
                {{"ranSliceId", ranSliceId}, {"window", window}});
  if (!absent.empty())
    throw Error(ErrorCode::WindowIncomplete, "RAN slice '" + ranSliceId + "' did not exist throughout the window",
                {{"ranSliceId", ranSliceId}, {"window", window}, {"absentTicks", absent.size()},
                 {"firstAbsentTick", absent.front()}});

  const nrm::RanSlice* def = nullptr;
  for (const auto& [t, rs] : history_.at(ranSliceId))
    if (t <= endTick) def = &rs;

  struct Acc {
    double served = 0, offered = 0, blocked = 0, min = std::numeric_limits<double>::infinity();
  };
  std::map<std::string, Acc> scopes;
  Acc total;
  double nonGbrSum = 0.0, nonGbrMin = std::numeric_limits<double>::infinity();
  std::map<nrm::QosFlowType, double> servedByFlow;
  std::vector<std::map<std::string, double>> perTickScope;

  for (auto it = tickIndex_.lower_bound(startTick); it != tickIndex_.end() && it->first <= endTick; ++it) {
    std::map<std::string, double> tickScope;
    double tickTotal = 0.0, tickNonGbr = 0.0;
    for (std::size_t i = it->second.first; i < it->second.second; ++i) {
      const auto& s = samples_[i];
      if (s.ranSliceId != ranSliceId) continue;
      for (const auto& a : s.aggregates) {
        auto& acc = scopes[a.scope];
        acc.offered += a.offered;
        acc.served += a.served;
        acc.blocked += a.blocked;
        tickScope[a.scope] += a.served;
        for (const auto& f : a.flows) {
          servedByFlow[f.flowType] += f.served;
          if (!isGbr(f.flowType.fiveQi)) tickNonGbr += f.served;
        }
      }
      total.offered += s.offered;
      total.served += s.served;
      total.blocked += s.blocked;
      tickTotal += s.served;
    }
    perTickScope.push_back(std::move(tickScope));
    total.min = std::min(total.min, tickTotal);
    nonGbrSum += tickNonGbr;
    nonGbrMin = std::min(nonGbrMin, tickNonGbr);
  }

  for (auto& [scope, acc] : scopes)
    for (const auto& t : perTickScope) acc.min = std::min(acc.min, t.count(scope) ? t.at(scope) : 0.0);
  const double n = static_cast<double>(count);
  auto finish = [&](const std::string& scope, const Acc& acc) {
    ScopeKpis k;
    k.scope = scope;
    k.avgServedMbps = acc.served / n;
    k.minServedMbps = std::isinf(acc.min) ? 0.0 : acc.min;
    k.avgOfferedMbps = acc.offered / n;
    if (acc.offered > 0) k.blockedLoadRatio = acc.blocked / acc.offered;
    return k;
  };
  KpiReport report;
  report.ranSliceId = ranSliceId;
  report.startTick = startTick;
  report.endTick = endTick;
  for (const auto& [scope, acc] : scopes) report.scopes.push_back(finish(scope, acc));
  report.total = finish("total", total);
  report.avgRateNonGbr = nonGbrSum / n;
  report.minRateNonGbr = std::isinf(nonGbrMin) ? 0.0 : nonGbrMin;

  if (def) {
    for (const auto& target : def->targetKpis) {
      KpiVerdict v;
      v.target = target;
      switch (target.name) {
        case nrm::KpiName::AvgRateNonGbr: v.value = report.avgRateNonGbr; break;
        case nrm::KpiName::MinRateNonGbr: v.value = report.minRateNonGbr; break;
        case nrm::KpiName::BlockedLoadRatio: v.value = report.total.blockedLoadRatio; break;
      }
      // An undefined value (nothing offered) cannot breach the target.
      if (v.value)
        v.verdict = (target.direction == nrm::KpiDirection::AtLeast ? *v.value >= target.threshold
                                                                    : *v.value <= target.threshold)
                        ? Verdict::Met
                        : Verdict::Violated;
      report.kpiVerdicts.push_back(v);
    }
    if (def->plannedLoad)
      for (const auto& item : *def->plannedLoad) {
        PlannedLoadDeviation d;
        d.flowType = item.flowType;
        d.plannedMbps = item.expectedMbps;
        d.avgServedMbps = servedByFlow.count(item.flowType) ? servedByFlow[item.flowType] / n : 0.0;
        if (item.expectedMbps > 0) d.deviation = (d.avgServedMbps - item.expectedMbps) / item.expectedMbps;
        report.plannedLoadDeviation.push_back(d);
      }
  }
  return report;
}

std::string PmStore::toNdjson() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void PmStore::loadNdjson(const std::string& text) {
  std::lock_guard lock(mutex_);
  if (!lines_.empty()) throw Error(ErrorCode::InvariantViolation, "PM store is not empty");
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, "PM line " + std::to_string(n) + ": " + e.what(), {{"line", n}});
    }
    applyLine(j, line);
  }
}

}  // namespace ranslice::pmfm
