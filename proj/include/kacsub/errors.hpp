#pragma once

#include <stdexcept>
#include <string>

namespace kacsub {

enum class ErrorKind {
  InvalidInput,
  DimensionMismatch,
  NonSemisimple,
  IncompatibleTrace,
  NotACoaction,
  MixedAlgebras,
  KindMismatch,
  CrossCheckFailed,
  NotUnitary,
  TraceIncompatible,
  NotAlgebraicData,
  CertificateFailed,
  NotMarkov,
  ExtensionInconsistent,
  NotInvariant,
  ErgodicityFailed,
  MissingIrreducibles,
  ParseError,
  UnresolvedReference,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonSemisimple: return "NonSemisimple";
    case ErrorKind::IncompatibleTrace: return "IncompatibleTrace";
    case ErrorKind::NotACoaction: return "NotACoaction";
    case ErrorKind::MixedAlgebras: return "MixedAlgebras";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::CrossCheckFailed: return "CrossCheckFailed";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::TraceIncompatible: return "TraceIncompatible";
    case ErrorKind::NotAlgebraicData: return "NotAlgebraicData";
    case ErrorKind::CertificateFailed: return "CertificateFailed";
    case ErrorKind::NotMarkov: return "NotMarkov";
    case ErrorKind::ExtensionInconsistent: return "ExtensionInconsistent";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::ErgodicityFailed: return "ErgodicityFailed";
    case ErrorKind::MissingIrreducibles: return "MissingIrreducibles";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnresolvedReference: return "UnresolvedReference";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kacsub
