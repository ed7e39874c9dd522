#include "ranslice/common/error.hpp"

namespace ranslice {

std::string_view toString(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::IllegalContainment: return "IllegalContainment";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::StaleVersion: return "StaleVersion";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownNsd: return "UnknownNsd";
    case ErrorCode::UnknownNsInstance: return "UnknownNsInstance";
    case ErrorCode::UnknownRrh: return "UnknownRrh";
    case ErrorCode::InsufficientNfvi: return "InsufficientNfvi";
    case ErrorCode::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorCode::ScalingLimitExceeded: return "ScalingLimitExceeded";
    case ErrorCode::InstanceInUse: return "InstanceInUse";
    case ErrorCode::BandUnsupported: return "BandUnsupported";
    case ErrorCode::CarrierSlotsExhausted: return "CarrierSlotsExhausted";
    case ErrorCode::CellAlreadyBound: return "CellAlreadyBound";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::UnknownSlice: return "UnknownSlice";
    case ErrorCode::UnservableCell: return "UnservableCell";
    case ErrorCode::GuaranteeInfeasible: return "GuaranteeInfeasible";
    case ErrorCode::RstUnknown: return "RstUnknown";
    case ErrorCode::CompensationFailed: return "CompensationFailed";
    case ErrorCode::InjectedFault: return "InjectedFault";
    case ErrorCode::ProfileExhausted: return "ProfileExhausted";
    case ErrorCode::OutOfOrderTick: return "OutOfOrderTick";
    case ErrorCode::WindowIncomplete: return "WindowIncomplete";
    case ErrorCode::UnknownSubscription: return "UnknownSubscription";
    case ErrorCode::ExposureDenied: return "ExposureDenied";
    case ErrorCode::ScenarioValidationError: return "ScenarioValidationError";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

json Error::toJson() const {
  json out = {{"error", std::string(toString(code_))}, {"message", what()}};
  if (!details_.is_null() && !details_.empty()) out["details"] = details_;
  return out;
}

}  // namespace ranslice
