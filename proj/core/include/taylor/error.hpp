#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace taylor {

enum class ErrorKind {
  InvalidArgument,
  DivergenceUnknown,
  NegativeRadicand,
  DegenerateDistribution,
  QuantileTailUnresolved,
  InvalidPmf,
  NoSamplerAvailable,
  UnsupportedSpec,
  OutOfDomain,
  CenterMismatch,
  QuadratureStall,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DivergenceUnknown: return "DivergenceUnknown";
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::QuantileTailUnresolved: return "QuantileTailUnresolved";
    case ErrorKind::InvalidPmf: return "InvalidPmf";
    case ErrorKind::NoSamplerAvailable: return "NoSamplerAvailable";
    case ErrorKind::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::CenterMismatch: return "CenterMismatch";
    case ErrorKind::QuadratureStall: return "QuadratureStall";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace taylor
