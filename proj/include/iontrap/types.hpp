#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iontrap {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Number of shared phonon levels: 0/1 are the bus states, 2 is the shared
/// auxiliary level used by conditional-phase pulses, 3 parks the bus during
/// a Toffoli.
inline constexpr unsigned kPhononLevels = 4;

/// Laser pulse families.
///   V  carrier: (p, q=0) <-> (p, q=1) on every phonon level
///   U  sideband: (p=0, q=1) <-> (p=1, q=0)
///   A  auxiliary sideband: (p=1, q=0) <-> (p=2, q=0)
///   P  parking sideband: (p=1, q=0) <-> (p=3, q=0)
enum class PulseKind : std::uint8_t { V, U, A, P };

char to_char(PulseKind kind);
PulseKind pulse_kind_from_char(char c);

struct PulseOp {
  PulseKind kind = PulseKind::V;
  unsigned qubit = 0;
  double theta = 0.0;
  double phi = 0.0;
  std::uint64_t pulse_index = 0;
};

/// Raised when a dense allocation would exceed the configured memory cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by table validation and benchmark structural checks.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: circuit text, angle literals, config values.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses `1.25`, `-0.5e-3`, `pi`, `-pi`, `pi/64`, `-pi/4096`, `3*pi/4`.
double parse_angle(std::string_view text);

/// Inverse of parse_angle for pi/<k> style values where that is exact,
/// otherwise a 12 significant digit decimal.
std::string format_angle(double radians);

}  // namespace iontrap
