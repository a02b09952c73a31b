#include "metasched/error.hpp"

namespace metasched {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptyValidationSet: return "EmptyValidationSet";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::BadExploration: return "BadExploration";
    case ErrorCode::ExhaustedTask: return "ExhaustedTask";
    case ErrorCode::AllExhausted: return "AllExhausted";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::EmptyTask: return "EmptyTask";
    case ErrorCode::Exhausted: return "Exhausted";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::TooFewSteps: return "TooFewSteps";
    case ErrorCode::BaselineMissing: return "BaselineMissing";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace metasched
