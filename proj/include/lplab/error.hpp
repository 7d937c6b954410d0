#pragma once

#include <stdexcept>
#include <string>

namespace lplab {

enum class ErrorKind {
  ShapeMismatch,
  NonFiniteSample,
  UnresolvableSpec,
  InvalidExponent,
  AliasingError,
  NonDivisibleSpectrum,
  RangeTooNarrow,
  BandOutOfRange,
  UnresolvedEnergy,
  GridMismatch,
  MisalignedStep,
  InvalidAxis,
  DimensionTooLow,
  QuadratureTooCoarse,
  UnknownTheoremId,
  EmptyDecomposition,
  BandRangeEmpty,
  GeometryViolated,
  ConfigParseError,
  IoError,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::UnresolvableSpec: return "UnresolvableSpec";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::AliasingError: return "AliasingError";
    case ErrorKind::NonDivisibleSpectrum: return "NonDivisibleSpectrum";
    case ErrorKind::RangeTooNarrow: return "RangeTooNarrow";
    case ErrorKind::BandOutOfRange: return "BandOutOfRange";
    case ErrorKind::UnresolvedEnergy: return "UnresolvedEnergy";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::MisalignedStep: return "MisalignedStep";
    case ErrorKind::InvalidAxis: return "InvalidAxis";
    case ErrorKind::DimensionTooLow: return "DimensionTooLow";
    case ErrorKind::QuadratureTooCoarse: return "QuadratureTooCoarse";
    case ErrorKind::UnknownTheoremId: return "UnknownTheoremId";
    case ErrorKind::EmptyDecomposition: return "EmptyDecomposition";
    case ErrorKind::BandRangeEmpty: return "BandRangeEmpty";
    case ErrorKind::GeometryViolated: return "GeometryViolated";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace lplab
