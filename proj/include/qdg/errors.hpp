#pragma once

#include <stdexcept>
#include <string>

namespace qdg {

// Error categories surfaced by the conversion pipeline. Per-example failures
// are caught at the corpus level and counted; they never abort a batch run.
enum class ErrorKind {
  EmptyDecomposition,
  MalformedReference,
  UndetectableOperator,
  ConflictingProperties,
  MissingMandatoryArgument,
  InconsistentNode,
  CyclicSdg,
  DecodeAmbiguity,
  DumExhausted,
  DupExhausted,
  SolverTimeout,
  Infeasible,
  TooLarge,
  CycleDetected,
  LengthMismatch,
  MalformedCsv,
  MissingColumn,
  ParseError,
  SchemaVersionMismatch,
  InvalidInput,
};

const char* error_kind_name(ErrorKind kind);

class QdgError : public std::runtime_error {
 public:
  QdgError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyDecomposition: return "EmptyDecomposition";
    case ErrorKind::MalformedReference: return "MalformedReference";
    case ErrorKind::UndetectableOperator: return "UndetectableOperator";
    case ErrorKind::ConflictingProperties: return "ConflictingProperties";
    case ErrorKind::MissingMandatoryArgument: return "MissingMandatoryArgument";
    case ErrorKind::InconsistentNode: return "InconsistentNode";
    case ErrorKind::CyclicSdg: return "CyclicSdg";
    case ErrorKind::DecodeAmbiguity: return "DecodeAmbiguity";
    case ErrorKind::DumExhausted: return "DumExhausted";
    case ErrorKind::DupExhausted: return "DupExhausted";
    case ErrorKind::SolverTimeout: return "SolverTimeout";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "UnknownError";
}

}  // namespace qdg
