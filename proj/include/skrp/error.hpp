#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skrp {

enum class ErrorCode {
  BadParams,
  PoleInInterval,
  PoleAtOne,
  NonPositive,
  NoRoot,
  SeedNonPositive,
  WrongFamily,
  Inconsistent,
  RangeContainsC,
  SolutionNonPositive,
  NonPositiveQ,
  AnchorOutOfRange,
  SingularEndpoint,
  WrongEndpoint,
  StencilOutOfDomain,
  SingularMetric,
  LeftDomain,
  SpecInvariantViolated,
  TableRangeExceeded,
  CriticalPoint,
  MissingC,
  MissingMeta,
  PhiNearZero,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace skrp
