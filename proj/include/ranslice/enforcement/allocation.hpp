#pragma once

// Per-cell capacity sharing among cell slices under Authorised Load rules.

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranslice/common/error.hpp"
#include "ranslice/nrm/types.hpp"

namespace ranslice::enforcement {

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

/// One load aggregate competing for a cell: an AL entry of a cell slice, or
/// the slice's traffic that no entry covers.
struct Aggregate {
  double demand = 0.0;
  double guaranteed = 0.0;       // fraction of capacity, 0 when unset
  double maximum = kUnlimited;   // fraction of capacity
};

/// Served amount per aggregate, same order as the input.
///
/// Floors min(d, g*C) are granted first and scaled down proportionally when
/// they do not fit. The spare is then split in proportion to each
/// aggregate's residual demand below its cap, min(d, m*C) - floor.
std::vector<double> allocate(const std::vector<Aggregate>& aggregates, double capacity);

using OfferedByFlowType = std::map<nrm::QosFlowType, double>;

struct AggregateResult {
  std::string cellSliceId;
  std::string scope;  // scopeKey of the AL entry, or "*"
  std::vector<nrm::QosFlowType> flowTypes;
  std::optional<std::size_t> alEntry;  // index into the cell slice AL
  double offered = 0.0;
  double guaranteedTarget = 0.0;  // min(offered, g * nominal capacity)
  double floor = 0.0;
  double served = 0.0;
  double blocked = 0.0;
  std::map<nrm::QosFlowType, double> servedByFlowType;  // offered-proportional split
  std::map<nrm::QosFlowType, double> offeredByFlowType;
};

struct AllocationResult {
  std::string cellId;
  double capacityMbps = 0.0;
  double degradationFactor = 1.0;
  double effectiveCapacityMbps = 0.0;
  std::vector<AggregateResult> aggregates;
  double offered = 0.0;
  double served = 0.0;
  double blocked = 0.0;

  json toJson() const;
};

/// Splits the cell's offered traffic into aggregates and allocates the
/// effective capacity. `offered` is keyed by cellSliceId; slices absent from
/// the map offer nothing.
AllocationResult allocateCapacity(const nrm::NrCell& cell, double capacityMbps, double degradationFactor,
                                  const std::map<std::string, OfferedByFlowType>& offered);

}  // namespace ranslice::enforcement
