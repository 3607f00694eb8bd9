#include "skrp/error.hpp"

namespace skrp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParams:
      return "BadParams";
    case ErrorCode::PoleInInterval:
      return "PoleInInterval";
    case ErrorCode::PoleAtOne:
      return "PoleAtOne";
    case ErrorCode::NonPositive:
      return "NonPositive";
    case ErrorCode::NoRoot:
      return "NoRoot";
    case ErrorCode::SeedNonPositive:
      return "SeedNonPositive";
    case ErrorCode::WrongFamily:
      return "WrongFamily";
    case ErrorCode::Inconsistent:
      return "Inconsistent";
    case ErrorCode::RangeContainsC:
      return "RangeContainsC";
    case ErrorCode::SolutionNonPositive:
      return "SolutionNonPositive";
    case ErrorCode::NonPositiveQ:
      return "NonPositiveQ";
    case ErrorCode::AnchorOutOfRange:
      return "AnchorOutOfRange";
    case ErrorCode::SingularEndpoint:
      return "SingularEndpoint";
    case ErrorCode::WrongEndpoint:
      return "WrongEndpoint";
    case ErrorCode::StencilOutOfDomain:
      return "StencilOutOfDomain";
    case ErrorCode::SingularMetric:
      return "SingularMetric";
    case ErrorCode::LeftDomain:
      return "LeftDomain";
    case ErrorCode::SpecInvariantViolated:
      return "SpecInvariantViolated";
    case ErrorCode::TableRangeExceeded:
      return "TableRangeExceeded";
    case ErrorCode::CriticalPoint:
      return "CriticalPoint";
    case ErrorCode::MissingC:
      return "MissingC";
    case ErrorCode::MissingMeta:
      return "MissingMeta";
    case ErrorCode::PhiNearZero:
      return "PhiNearZero";
    case ErrorCode::ConfigError:
      return "ConfigError";
  }
  return "Unknown";
}

}  // namespace skrp
