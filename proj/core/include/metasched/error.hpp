#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metasched {

enum class ErrorCode {
  // numerics
  SingularMatrix,
  SizeOverflow,
  EmptyInput,
  ShapeMismatch,
  // markov
  EmptySequence,
  DegenerateTable,
  NotStochastic,
  Reducible,
  NoConvergence,
  // reward
  EmptyValidationSet,
  MissingClass,
  // schedulers
  BadExploration,
  ExhaustedTask,
  AllExhausted,
  StateSpaceTooLarge,
  // data
  ParseError,
  UnknownLabel,
  RaggedRow,
  BadMagic,
  CountMismatch,
  Truncated,
  EmptyTask,
  Exhausted,
  Io,
  // harness
  MissingKey,
  BadValue,
  TooFewSteps,
  BaselineMissing,
  // catch-all for invalid arguments to library calls
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (and tests) can dispatch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace metasched
