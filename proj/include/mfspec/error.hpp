#ifndef MFSPEC_ERROR_HPP
#define MFSPEC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfspec {

enum class ErrorCode {
  // weight validation
  BadLength,
  NegativeWeight,
  SumNotOne,
  EmptyColumn,
  ParseError,
  // words
  DigitOutOfRange,
  BaseMismatch,
  // computation
  InvalidArgument,
  DepthTooLarge,
  BudgetExceeded,
  NonConvexInput,
  NoClosedForm,
  GridTooCoarse,
  HypothesisViolated,
  HypothesisFailed,
  EmptyB,
  NonfiniteTau,
  SearchExhausted,
  WrongShape,
  ZeroMass,
  ConstraintViolated,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message names the violated invariant or hypothesis.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mfspec

#endif  // MFSPEC_ERROR_HPP
