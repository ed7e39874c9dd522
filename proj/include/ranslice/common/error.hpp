#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ranslice {

using json = nlohmann::json;

enum class ErrorCode {
  // nrm
  UnknownParent,
  UnknownObject,
  IllegalContainment,
  InvariantViolation,
  StaleVersion,
  ParseError,
  // infra
  UnknownNsd,
  UnknownNsInstance,
  UnknownRrh,
  InsufficientNfvi,
  NoFeasiblePath,
  ScalingLimitExceeded,
  InstanceInUse,
  BandUnsupported,
  CarrierSlotsExhausted,
  CellAlreadyBound,
  // lifecycle
  UnknownTemplate,
  UnknownSlice,
  UnservableCell,
  GuaranteeInfeasible,
  RstUnknown,
  CompensationFailed,
  InjectedFault,
  // enforcement / pmfm
  ProfileExhausted,
  OutOfOrderTick,
  WindowIncomplete,
  UnknownSubscription,
  ExposureDenied,
  // northbound
  ScenarioValidationError,
  NotFound,
};

std::string_view toString(ErrorCode code);

/// Every failure surfaced by the library. `details` carries structured
/// context (violation lists, offending ids, excess amounts) for the API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, json details = json::object())
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const json& details() const noexcept { return details_; }

  json toJson() const;

 private:
  ErrorCode code_;
  json details_;
};

}  // namespace ranslice
