#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iontrap/types.hpp"

namespace iontrap {

enum class GateKind : std::uint8_t { NOT, CNOT, CCNOT, ROT, CPHASE };

inline constexpr std::size_t kGateKindCount = 5;

const char* to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);

/// Qubit roles: NOT/ROT act on `target`; CNOT and CPHASE use control,target;
/// CCNOT uses c1,c2,target.
enum class Role : std::uint8_t { Control, C1, C2, Target };

const char* to_string(Role role);
Role role_from_string(std::string_view name);

struct Gate {
  GateKind kind = GateKind::NOT;
  std::array<unsigned, 3> qubits{};  ///< in role order, see arity()
  double theta = 0.0;                ///< ROT
  double phi = 0.0;                  ///< ROT
  double alpha = 0.0;                ///< CPHASE

  static Gate not_gate(unsigned q) { return {GateKind::NOT, {q, 0, 0}}; }
  static Gate cnot(unsigned c, unsigned t) { return {GateKind::CNOT, {c, t, 0}}; }
  static Gate ccnot(unsigned c1, unsigned c2, unsigned t) { return {GateKind::CCNOT, {c1, c2, t}}; }
  static Gate rot(unsigned q, double theta, double phi) {
    return {GateKind::ROT, {q, 0, 0}, theta, phi};
  }
  static Gate cphase(unsigned c, unsigned t, double alpha) {
    return {GateKind::CPHASE, {c, t, 0}, 0.0, 0.0, alpha};
  }

  std::size_t arity() const;
  unsigned qubit_for(Role role) const;

  /// Distinct in-range qubits; throws std::out_of_range / std::invalid_argument.
  void validate(unsigned num_qubits) const;

  /// Reversed-angle inverse (self-inverse for NOT/CNOT/CCNOT).
  Gate inverse() const;

  bool operator==(const Gate&) const = default;
};

struct Circuit {
  unsigned num_qubits = 0;
  std::vector<Gate> gates;

  void append(const Gate& g) { gates.push_back(g); }
  void append(const std::vector<Gate>& gs) { gates.insert(gates.end(), gs.begin(), gs.end()); }
  void validate() const;
};

/// Gates reversed, each replaced by its inverse.
std::vector<Gate> inverse(const std::vector<Gate>& gates);

/// Superposition preparation: ROT(q, pi/2, pi/2), mapping |0> to (|0>+|1>)/sqrt2.
Gate hadamard_equiv(unsigned q);

/// Exact Hadamard up to global phase: ROT(q, pi/2, pi/2) then ROT(q, pi, 0).
std::vector<Gate> hadamard_exact(unsigned q);

/// Z up to a global phase, built from carrier rotations and a NOT.
std::vector<Gate> phase_flip(unsigned q);

// ---------------------------------------------------------------------------
// Pulse tables

/// constant + coefficient * parameter, where the parameter is one of the
/// gate's own angles.
struct AngleExpr {
  enum class Param : std::uint8_t { None, Theta, Phi, Alpha };
  double constant = 0.0;
  double coefficient = 0.0;
  Param param = Param::None;

  static AngleExpr fixed(double v) { return {v, 0.0, Param::None}; }
  static AngleExpr of(Param p, double coef = 1.0, double c = 0.0) { return {c, coef, p}; }

  double evaluate(const Gate& g) const;
};

/// Parses `pi/2`, `-pi/2`, `theta`, `phi`, `alpha-pi`, `-pi-alpha`, `2*pi`, `0.1`.
AngleExpr parse_angle_expr(std::string_view text);
std::string format_angle_expr(const AngleExpr& e);

struct PulseTemplate {
  PulseKind kind;
  Role role;
  AngleExpr theta;
  AngleExpr phi;
};

class PulseTableSet {
 public:
  /// The built-in decompositions (NOT=3, CNOT=5, CCNOT=7, ROT=1, CPHASE=4 pulses).
  static PulseTableSet builtin();

  const std::vector<PulseTemplate>& table(GateKind kind) const {
    return tables_[static_cast<std::size_t>(kind)];
  }
  void set_table(GateKind kind, std::vector<PulseTemplate> pulses);

  bool is_validated() const { return validated_; }

  /// Table-file overrides: one pulse per line `GATE KIND ROLE THETA PHI`;
  /// lines for a gate replace its whole table. `#` starts a comment.
  void load_overrides(std::string_view text);

 private:
  friend PulseTableSet validated(PulseTableSet tables);
  std::array<std::vector<PulseTemplate>, kGateKindCount> tables_;
  bool validated_ = false;
};

struct VariantReport {
  GateKind kind;
  std::size_t pulses = 0;
  double max_deviation = 0.0;  ///< after removing the best global phase
  double max_leakage = 0.0;    ///< amplitude left on phonon levels >= 1
  Complex global_phase{1.0, 0.0};
  bool passed = false;
};

struct TableReport {
  std::vector<VariantReport> variants;
  bool passed = false;
  std::string failures() const;
};

inline constexpr double kTableTolerance = 1e-10;

/// Composes each table by brute-force matrix multiplication over the
/// (4 * 2^M)-dimensional space and compares it with the ideal gate on the
/// phonon-ground inputs, for every qubit assignment on M = arity qubits.
TableReport validate_tables(const PulseTableSet& tables);

/// Returns a copy marked validated; throws ValidationError naming the failing
/// variants otherwise.
PulseTableSet validated(PulseTableSet tables);

/// Cached validated builtin tables.
const PulseTableSet& default_tables();

/// Row-major dense matrix over the (4 * 2^M)-dimensional space.
struct Matrix {
  std::size_t dim = 0;
  std::vector<Complex> data;
  Complex& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

/// Textbook gate on the qubit planes, identity on phonon levels (M <= 3).
Matrix ideal_unitary(const Gate& gate, unsigned num_qubits);

/// Full matrix of a single pulse, built directly from the coupling rules.
Matrix pulse_matrix(PulseKind kind, unsigned qubit, double theta, double phi, unsigned num_qubits);

// ---------------------------------------------------------------------------
// Compilation

struct PulseSchedule {
  unsigned num_qubits = 0;
  std::vector<PulseOp> pulses;
  /// gate_end[g] = number of pulses emitted through gate g (exclusive end).
  std::vector<std::uint64_t> gate_end;

  std::size_t gate_count() const { return gate_end.size(); }
  std::size_t pulse_count() const { return pulses.size(); }
  /// Pulses before gate index `gates_done` starts.
  std::uint64_t pulses_after(std::size_t gates_done) const {
    return gates_done == 0 ? 0 : gate_end[gates_done - 1];
  }
};

/// Concatenated per-gate pulse expansions with global pulse indices.
PulseSchedule compile(const Circuit& circuit, const PulseTableSet& tables = default_tables());

std::vector<PulseOp> expand_gate(const Gate& gate, const PulseTableSet& tables);

// ---------------------------------------------------------------------------
// Text formats

/// One gate per line: `NOT q0`, `CNOT q0 q1`, `CCNOT q0 q1 q2`,
/// `ROT q0 <theta> <phi>`, `CPHASE q0 q1 <alpha>`; qubits as `3` or `q3`;
/// optional `QUBITS <n>` line; `#` comments. Without QUBITS the register is
/// sized to the largest index used.
Circuit parse_circuit(std::string_view text);
std::string format_circuit(const Circuit& circuit);

// ---------------------------------------------------------------------------
// Classical reversible evaluation (NOT/CNOT/CCNOT permute basis states,
// CPHASE only adds phase).

struct ClassicalResult {
  std::uint64_t bits = 0;
  double phase = 0.0;  ///< accumulated CPHASE angle
};

/// Throws std::invalid_argument on ROT gates.
ClassicalResult simulate_classical(const std::vector<Gate>& gates, std::uint64_t bits);

}  // namespace iontrap
