#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rainbow {

enum class ErrorKind {
  ParseError,
  ImproperColouring,
  DuplicateEdge,
  InvalidVertex,
  OddCycle,
  Disconnected,
  DimensionTooLarge,
  BudgetExceeded,
  ThresholdUnreachable,
  RetriesExhausted,
  PreconditionViolated,
  DegreeTooSmall,
  IsolatedVertex,
  TooLarge,
  EigensolverFailure,
  BoundViolated,
  ViolationFound,
  NoWalk,
  RoundsExhausted,
  IterationCapExceeded,
  NoGoodPair,
  NoCliqueOfGoodPairs,
  SpecError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library carries one of the kinds above so
/// callers (and the CLI exit code) can branch on it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rainbow
