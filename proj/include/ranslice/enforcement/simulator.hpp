#pragma once

// Tick-driven EM/RRM simulation: reads offered load, allocates every cell,
// keeps averaging windows and raises/clears load notifications.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranslice/common/notification.hpp"
#include "ranslice/enforcement/allocation.hpp"
#include "ranslice/nrm/model.hpp"

namespace ranslice::enforcement {

/// Offered load of one flow type in one cell slice. The slice is named
/// either directly or through its owning RAN slice.
struct ProfileKey {
  std::string cellId;
  std::string cellSliceId;
  std::string ranSliceId;
  nrm::QosFlowType flowType;
};

/// Piecewise-constant series: the value at tick t is the last point with
/// tick <= t, zero before the first point.
struct OfferedLoadProfile {
  ProfileKey key;
  std::vector<std::pair<std::int64_t, double>> points;

  double at(std::int64_t tick) const;
};

class ProfileSet {
 public:
  void add(OfferedLoadProfile profile);
  const std::vector<OfferedLoadProfile>& profiles() const { return profiles_; }
  /// Last tick covered by any profile; advancing past it is ProfileExhausted.
  std::optional<std::int64_t> horizon() const;
  /// Offered load per cell slice for one cell at `tick`.
  std::map<std::string, OfferedByFlowType> offered(const nrm::Model& model, const nrm::NrCell& cell,
                                                   std::int64_t tick) const;

 private:
  std::vector<OfferedLoadProfile> profiles_;
};

struct SimConfig {
  double tickDurationS = 1.0;
  double epsilon = 1e-6;  // relative compliance tolerance
  std::uint64_t seed = 0;
};

struct SliceEntryCompliance {
  std::string scope;
  double offered = 0.0;
  double served = 0.0;
  std::optional<double> guaranteedMbps;
  std::optional<double> maximumMbps;
  bool guaranteedMet = true;
  bool maximumExceeded = false;
};

struct SliceCompliance {
  std::string ranSliceId;
  std::vector<SliceEntryCompliance> entries;

  json toJson() const;
};

/// Aggregates the slice's served/offered traffic over its cell slices per
/// slice-level AL entry. No record for a slice without slice-level AL.
std::optional<SliceCompliance> evaluateRanSliceAL(const nrm::RanSlice& slice,
                                                  const std::vector<AllocationResult>& cells);

struct TickResult {
  std::int64_t tick = 0;
  std::vector<AllocationResult> cells;
  std::vector<SliceCompliance> slices;
  std::vector<Notification> notifications;

  /// Result-log lines: one per cell, then one per notification.
  std::vector<std::string> logLines() const;
};

class Simulator {
 public:
  Simulator(SimConfig config, ProfileSet profiles);

  /// Rejects averaging windows that are not whole multiples of the tick.
  void validateWindows(const nrm::Model& model) const;

  /// Advances to `tick`, which must follow the previous one.
  TickResult advanceTick(const nrm::Model& model, std::int64_t tick);

  void setDegradation(const std::string& cellId, double factor);
  double degradation(const std::string& cellId) const;

  const SimConfig& config() const { return config_; }
  const ProfileSet& profiles() const { return profiles_; }
  std::optional<std::int64_t> lastTick() const { return lastTick_; }
  int windowSpan(double averagingWindowS) const;

 private:
  struct Window {
    int span = 1;
    std::string signature;
    std::deque<std::pair<double, double>> samples;  // (served, target)
    bool raised = false;
  };
  struct SliceWindow {
    int span = 1;
    std::string signature;
    std::deque<std::pair<double, double>> samples;  // (served, target)
    bool guaranteeRaised = false;
    bool maximumRaised = false;
  };

  SimConfig config_;
  ProfileSet profiles_;
  std::map<std::string, double> degradation_;
  std::map<std::string, Window> cellWindows_;    // cellId|cellSliceId|scope
  std::map<std::string, SliceWindow> sliceWindows_;  // ranSliceId|scope
  std::optional<std::int64_t> lastTick_;
};

/// Accepts "points": [[tick, mbps], ...] or "segments": [{from, to, mbps,
/// jitter}], where jitter is a relative uniform noise drawn from `seed`.
OfferedLoadProfile parseProfile(const json& j, const std::string& path, std::uint64_t seed = 0);

}  // namespace ranslice::enforcement
