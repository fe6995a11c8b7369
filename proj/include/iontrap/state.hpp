#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "iontrap/kernels.hpp"
#include "iontrap/types.hpp"

namespace iontrap {

enum class Representation { Dense, Sparse };

const char* to_string(Representation r);

inline constexpr std::size_t kDefaultMemoryCapBytes = std::size_t{2} << 30;

/// Sparse entries whose magnitude drops below this after a pulse are removed.
inline constexpr double kSparsePruneThreshold = 1e-15;

/// Amplitudes over (phonon level p, qubit bit-string b), flat index
/// i = p * 2^M + b. The dense form stores all 4 * 2^M amplitudes; the sparse
/// form stores only nonzero entries sorted by index, each carrying its own
/// bit-string, which is what makes decoherence-only runs O(#terms).
class QuantumState {
 public:
  struct Entry {
    std::uint64_t index;
    Complex amp;
  };

  /// Amplitude 1 on (p=0, initial_bits). Throws CapacityError when the dense
  /// allocation would exceed memory_cap_bytes.
  static QuantumState basis(unsigned num_qubits, std::uint64_t initial_bits,
                            Representation representation,
                            std::size_t memory_cap_bytes = kDefaultMemoryCapBytes);

  /// Dense state from explicit amplitudes (size must be 4 * 2^M).
  static QuantumState from_amplitudes(unsigned num_qubits, std::vector<Complex> amplitudes);

  static std::size_t dense_bytes(unsigned num_qubits);

  unsigned num_qubits() const { return num_qubits_; }
  Representation representation() const { return representation_; }
  std::uint64_t plane_size() const { return std::uint64_t{1} << num_qubits_; }
  std::uint64_t dimension() const { return kPhononLevels * plane_size(); }

  void apply_pulse(const PulseOp& op);

  /// Multiplies every amplitude on phonon level >= 1 by e^{-dec/2}; with
  /// include_aux false only level 1 decays. Never renormalizes.
  void apply_decay(double dec, bool include_aux = true);

  double norm_sq() const;

  /// Multiplies all amplitudes by a real factor.
  void scale(double factor);

  /// Moves all phonon-excited amplitude onto level 0 and discards what was on
  /// level 0 (the post-emission branch of a phonon decay jump). Not normalized.
  void collapse_excited_to_ground();

  Complex amplitude(unsigned phonon, std::uint64_t bits) const;
  Complex amplitude_at(std::uint64_t index) const;

  /// Dense copy of all amplitudes regardless of representation.
  std::vector<Complex> to_dense_vector() const;

  std::span<const Complex> dense_data() const { return dense_; }
  std::span<const Entry> sparse_entries() const { return sparse_; }

  std::size_t stored_entries() const {
    return representation_ == Representation::Dense ? dense_.size() : sparse_.size();
  }

  /// Overrides the kernel variant used by this state (for equivalence tests).
  void use_kernels(const KernelSet& kernels) { kernels_ = &kernels; }
  const KernelSet& kernels() const { return *kernels_; }

 private:
  QuantumState(unsigned num_qubits, Representation representation);

  void apply_dense(const PulseOp& op);
  void apply_sparse(const PulseOp& op);

  unsigned num_qubits_;
  Representation representation_;
  std::vector<Complex> dense_;
  std::vector<Entry> sparse_;
  const KernelSet* kernels_;
};

/// sum_i conj(a_i) b_i over the full (p, b) index space; any mix of dense and
/// sparse. Throws std::invalid_argument on mismatched qubit counts.
Complex inner_product(const QuantumState& a, const QuantumState& b);

/// Marginal probabilities of the bit pattern on `qubits` (pattern bit j is
/// qubit qubits[j]), summed over all other qubits and phonon levels.
std::map<std::uint64_t, double> measure_distribution(const QuantumState& state,
                                                     std::span<const unsigned> qubits);

}  // namespace iontrap
