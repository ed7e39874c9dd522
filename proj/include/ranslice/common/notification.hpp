#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranslice/common/error.hpp"
#include "ranslice/nrm/types.hpp"

namespace ranslice {

/// An event raised by the EM (enforcement, faults) or the NM (lifecycle)
/// towards the northbound. `plmns` drives per-tenant exposure filtering;
/// empty means operator-only.
struct Notification {
  std::uint64_t id = 0;  // assigned on dispatch
  std::string type;
  std::string source;  // EM | NM
  std::int64_t tick = 0;
  std::string cellId;
  std::string cellSliceId;
  std::string ranSliceId;
  std::vector<nrm::PlmnId> plmns;
  json data = json::object();

  json toJson() const;
};

namespace notification_types {
inline constexpr const char* kGuaranteedLoadNotFulfilled = "GuaranteedLoadNotFulfilled";
inline constexpr const char* kGuaranteedLoadRestored = "GuaranteedLoadRestored";
inline constexpr const char* kMaximumLoadExceeded = "MaximumLoadExceeded";
inline constexpr const char* kMaximumLoadRestored = "MaximumLoadRestored";
inline constexpr const char* kCellCapacityDegraded = "CellCapacityDegraded";
inline constexpr const char* kCellCapacityRestored = "CellCapacityRestored";
inline constexpr const char* kLcmOperationCompleted = "LcmOperationCompleted";
inline constexpr const char* kLcmOperationFailed = "LcmOperationFailed";
}  // namespace notification_types

}  // namespace ranslice
