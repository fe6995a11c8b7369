#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iontrap/circuits.hpp"
#include "iontrap/state.hpp"

namespace iontrap {

// ---------------------------------------------------------------------------
// Modular arithmetic

struct FactorSpec {
  std::uint64_t N = 15;
  std::uint64_t X = 7;
  unsigned L = 4;       ///< bit width of N
  unsigned a_bits = 3;  ///< width of the exponent register A

  /// Fills L, and X / a_bits when zero: X=7 for 15, 2 otherwise; a_bits=3 for
  /// 15, 6 otherwise.
  static FactorSpec for_modulus(std::uint64_t N, std::uint64_t X = 0, unsigned a_bits = 0);

  /// Throws std::invalid_argument unless N is an odd composite, gcd(X,N)=1,
  /// 1 < X < N, a_bits >= 2 and L = bit width of N.
  void validate() const;
};

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t mod);

/// Qubit map for the multiplier workspace. The control register comes first,
/// then y (L), acc (L+1, top bit is the sign), b (L, constant register),
/// the adder carry and the comparison flag.
struct ArithLayout {
  unsigned controls = 0;
  unsigned L = 0;

  unsigned control(unsigned i) const { return i; }
  unsigned y(unsigned i) const { return controls + i; }
  unsigned acc(unsigned i) const { return controls + L + i; }
  unsigned b(unsigned i) const { return controls + 2 * L + 1 + i; }
  unsigned carry() const { return controls + 3 * L + 1; }
  unsigned flag() const { return controls + 3 * L + 2; }
  unsigned total() const { return controls + 3 * L + 3; }
};

/// In-place ripple-carry addition acc += b over L+1 bits (b's top bit is
/// implicitly zero). The carry qubit must be 0 and is returned to 0.
std::vector<Gate> ripple_add(const ArithLayout& lay);

/// acc += k (mod N) when both controls are 1; acc must hold a value < N.
/// Flag and carry are clean before and after.
std::vector<Gate> modadd_cc(const ArithLayout& lay, unsigned ctl1, unsigned ctl2, std::uint64_t k,
                            std::uint64_t N);

/// y -> y * c mod N when ctl is 1 (y < N); acc, b, carry, flag are clean
/// before and after.
std::vector<Gate> controlled_modmult(const ArithLayout& lay, unsigned ctl, std::uint64_t c,
                                     std::uint64_t N);

// ---------------------------------------------------------------------------
// Benchmark circuits

/// A generated circuit plus what is needed to run and read it.
struct BenchmarkCircuit {
  std::string name;
  Circuit circuit;
  std::uint64_t initial_bits = 0;
  /// Gate counts at which a reference snapshot is mandatory (iteration ends,
  /// the pre-QFT boundary); sorted.
  std::vector<std::size_t> checkpoints;
  /// Gate count where fidelity is finally assessed; the pre-QFT boundary for
  /// factoring circuits, the full circuit otherwise.
  std::size_t fidelity_endpoint = 0;
  /// Qubits read out at the end; pattern bit j is readout[j].
  std::vector<unsigned> readout;
  /// Grover only: marked keys and the gate count after each iteration.
  std::vector<std::uint64_t> marked;
  std::vector<std::size_t> iteration_ends;
};

/// Exponent register superposition, a_bits controlled multiplications by
/// X^{2^i} mod N, then a QFT on A without swaps (readout is relabeled).
BenchmarkCircuit build_factor(const FactorSpec& spec);

/// One controlled multiplication by X from the factoring problem: control in
/// superposition, y = 1.
BenchmarkCircuit build_modmult(const FactorSpec& spec);

/// QFT on `qubits` (qubits[0] least significant). Output bit m lands on
/// qubits[n-1-m].
std::vector<Gate> build_qft(const std::vector<unsigned>& qubits);

struct GroverInstance {
  unsigned key_bits = 0;
  unsigned ancillas = 0;
  /// Phase oracle: -1 on marked keys, ancillas restored.
  std::vector<Gate> oracle;
  std::size_t num_solutions = 0;
  unsigned iterations = 12;

  unsigned num_qubits() const { return key_bits + ancillas; }

  /// 8 key bits, 2 solutions, 6 shared ancillas.
  static GroverInstance default_instance();

  /// Oracle built from one multi-controlled phase flip per marked key.
  static GroverInstance from_marked(unsigned key_bits, const std::vector<std::uint64_t>& marked,
                                    unsigned iterations = 12);

  /// Brute-force classical evaluation of the oracle over every key.
  std::vector<std::uint64_t> marked_keys() const;

  /// Throws ValidationError unless the oracle restores its ancillas and marks
  /// exactly num_solutions keys.
  void validate() const;
};

/// Phase flip on |1...1> of `qubits` using CCNOT cascades into `ancillas`
/// (needs qubits.size() - 2 of them).
std::vector<Gate> multi_controlled_z(const std::vector<unsigned>& qubits,
                                     const std::vector<unsigned>& ancillas);

BenchmarkCircuit build_grover(const GroverInstance& instance);

/// sin^2((2j+1) asin(sqrt(k/2^n)))
double grover_success_closed_form(unsigned key_bits, std::size_t k, unsigned iteration);

inline constexpr const char* kBenchmarkNames[] = {"grover",   "mult",     "factor15",
                                                  "factor21", "factor35", "factor57"};

/// Throws std::invalid_argument on unknown names.
BenchmarkCircuit make_benchmark(std::string_view name);

/// Wraps a custom circuit (text format) as a benchmark.
BenchmarkCircuit make_custom_benchmark(std::string name, Circuit circuit);

// ---------------------------------------------------------------------------
// Reference traces

/// Gate counts sampled for a circuit: every `stride` gates, checkpoints and
/// the final gate count. Strictly increasing, all > 0.
std::vector<std::size_t> sample_points(const BenchmarkCircuit& bench, std::size_t stride);

struct Snapshot {
  std::size_t gate_index = 0;
  std::uint64_t pulse_index = 0;
  QuantumState state;
};

struct ReferenceTrace {
  std::size_t stride = 0;
  std::vector<Snapshot> snapshots;

  const Snapshot* at_gate(std::size_t gate_index) const;
};

/// Zero-error, dec=0 run in sparse mode keeping a snapshot at every sample
/// point.
ReferenceTrace reference_trace(const BenchmarkCircuit& bench, const PulseSchedule& schedule,
                               std::size_t stride);

/// Probability that the key register holds a marked key.
double marked_probability(const QuantumState& state, const BenchmarkCircuit& bench);

}  // namespace iontrap
