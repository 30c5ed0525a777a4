#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zblab {

enum class ErrorKind {
  ZeroEnergyMode,
  ZeroMomentum,
  InvalidLattice,
  TooLarge,
  UnknownDof,
  InconsistentInput,
  UnresolvedPacket,
  InsufficientSamples,
  NonPositiveRadius,
  UnsupportedFormat,
  InvalidConfig,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::ZeroEnergyMode: return "ZeroEnergyMode";
  case ErrorKind::ZeroMomentum: return "ZeroMomentum";
  case ErrorKind::InvalidLattice: return "InvalidLattice";
  case ErrorKind::TooLarge: return "TooLarge";
  case ErrorKind::UnknownDof: return "UnknownDof";
  case ErrorKind::InconsistentInput: return "InconsistentInput";
  case ErrorKind::UnresolvedPacket: return "UnresolvedPacket";
  case ErrorKind::InsufficientSamples: return "InsufficientSamples";
  case ErrorKind::NonPositiveRadius: return "NonPositiveRadius";
  case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
  case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

//! Single exception type for the library; the kind distinguishes failure modes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        m_kind(kind) {}

  ErrorKind kind() const noexcept { return m_kind; }

private:
  ErrorKind m_kind;
};

} // namespace zblab
