#include "mfspec/error.hpp"

namespace mfspec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DigitOutOfRange: return "DigitOutOfRange";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DepthTooLarge: return "DepthTooLarge";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NonConvexInput: return "NonConvexInput";
    case ErrorCode::NoClosedForm: return "NoClosedForm";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::EmptyB: return "EmptyB";
    case ErrorCode::NonfiniteTau: return "NonfiniteTau";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
  }
  return "Unknown";
}

}  // namespace mfspec
