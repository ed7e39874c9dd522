#pragma once

// Performance measurements: per-tick samples of every cell slice, and KPI
// reports per RAN slice computed from them.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ranslice/enforcement/simulator.hpp"
#include "ranslice/nrm/model.hpp"

namespace ranslice::pmfm {

struct FlowSample {
  nrm::QosFlowType flowType;
  double offered = 0.0;
  double served = 0.0;
};

struct AggregateSample {
  std::string scope;
  double offered = 0.0;
  double served = 0.0;
  double blocked = 0.0;
  double guaranteedTarget = 0.0;
  std::vector<FlowSample> flows;
};

/// One cell slice at one tick.
struct PmSample {
  std::int64_t tick = 0;
  std::string cellId;
  std::string cellSliceId;
  std::string ranSliceId;  // empty when orphaned
  double offered = 0.0;
  double served = 0.0;
  double blocked = 0.0;
  std::vector<AggregateSample> aggregates;

  json toJson() const;
};

/// 5QI values with a guaranteed bit rate resource type; all others are
/// treated as non-GBR.
bool isGbr(int fiveQi);

enum class Verdict { Met, Violated };

struct ScopeKpis {
  std::string scope;
  double avgServedMbps = 0.0;
  double minServedMbps = 0.0;
  double avgOfferedMbps = 0.0;
  std::optional<double> blockedLoadRatio;
};

struct KpiVerdict {
  nrm::TargetKpi target;
  std::optional<double> value;
  Verdict verdict = Verdict::Met;
};

struct PlannedLoadDeviation {
  nrm::QosFlowType flowType;
  double plannedMbps = 0.0;
  double avgServedMbps = 0.0;
  std::optional<double> deviation;  // (served - planned) / planned
};

struct KpiReport {
  std::string ranSliceId;
  std::int64_t startTick = 0;
  std::int64_t endTick = 0;
  std::vector<ScopeKpis> scopes;
  ScopeKpis total;
  double avgRateNonGbr = 0.0;
  double minRateNonGbr = 0.0;
  std::vector<KpiVerdict> kpiVerdicts;
  std::vector<PlannedLoadDeviation> plannedLoadDeviation;

  json toJson() const;
};

/// Append-only sample store. Writes come from the simulation loop; reads may
/// run concurrently.
class PmStore {
 public:
  /// Records every cell slice of `model` at the result's tick.
  void ingest(const nrm::Model& model, const enforcement::TickResult& result);

  std::vector<PmSample> samples(const std::string& cellId, const std::string& cellSliceId) const;
  std::vector<PmSample> samplesForSlice(const std::string& ranSliceId, std::int64_t from, std::int64_t to) const;
  std::optional<std::int64_t> firstTick() const;
  std::optional<std::int64_t> lastTick() const;
  std::size_t size() const;

  KpiReport computeKpiReport(const std::string& ranSliceId, std::int64_t startTick, std::int64_t endTick) const;

  /// Newline-delimited JSON: slice definitions when they change, a tick
  /// marker, then one line per sample.
  std::string toNdjson() const;
  /// Loads a persisted store into this (empty) one.
  void loadNdjson(const std::string& text);

 private:
  // Ingestion and loading both go through here, so a reload is identical.
  void applyLine(const json& line, std::string text);

  mutable std::mutex mutex_;
  std::vector<PmSample> samples_;
  std::vector<std::int64_t> ticks_;
  std::map<std::int64_t, std::pair<std::size_t, std::size_t>> tickIndex_;  // [begin, end) into samples_
  std::map<std::int64_t, std::set<std::string>> presence_;  // tick -> ranSliceIds
  std::map<std::string, std::vector<std::pair<std::int64_t, nrm::RanSlice>>> history_;
  std::vector<std::string> lines_;  // persisted form, in ingestion order
};

std::string toString(Verdict v);

}  // namespace ranslice::pmfm
