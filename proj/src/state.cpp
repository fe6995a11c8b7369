#include "iontrap/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kernels_scalar_inl.hpp"

namespace iontrap {

const char* to_string(Representation r) {
  return r == Representation::Dense ? "dense" : "sparse";
}

char to_char(PulseKind kind) {
  switch (kind) {
    case PulseKind::V: return 'V';
    case PulseKind::U: return 'U';
    case PulseKind::A: return 'A';
    case PulseKind::P: return 'P';
  }
  return '?';
}

PulseKind pulse_kind_from_char(char c) {
  switch (c) {
    case 'V': return PulseKind::V;
    case 'U': return PulseKind::U;
    case 'A': return PulseKind::A;
    case 'P': return PulseKind::P;
    default: throw ParseError(std::string("unknown pulse kind '") + c + "'");
  }
}

QuantumState::QuantumState(unsigned num_qubits, Representation representation)
    : num_qubits_(num_qubits), representation_(representation), kernels_(&active_kernels()) {}

std::size_t QuantumState::dense_bytes(unsigned num_qubits) {
  if (num_qubits >= 58) return static_cast<std::size_t>(-1);
  return kPhononLevels * (std::size_t{1} << num_qubits) * sizeof(Complex);
}

QuantumState QuantumState::basis(unsigned num_qubits, std::uint64_t initial_bits,
                                 Representation representation, std::size_t memory_cap_bytes) {
  if (num_qubits == 0 || num_qubits > 60) {
    throw std::invalid_argument("num_qubits must be in [1, 60]");
  }
  if (num_qubits < 64 && (initial_bits >> num_qubits) != 0) {
    throw std::invalid_argument("initial bit-string has bits beyond num_qubits");
  }
  QuantumState s(num_qubits, representation);
  if (representation == Representation::Dense) {
    const std::size_t bytes = dense_bytes(num_qubits);
    if (bytes > memory_cap_bytes) {
      throw CapacityError("dense state for " + std::to_string(num_qubits) + " qubits needs " +
                          std::to_string(bytes) + " bytes, cap is " +
                          std::to_string(memory_cap_bytes));
    }
    s.dense_.assign(s.dimension(), Complex(0.0, 0.0));
    s.dense_[initial_bits] = Complex(1.0, 0.0);
  } else {
    s.sparse_.push_back({initial_bits, Complex(1.0, 0.0)});
  }
  return s;
}

QuantumState QuantumState::from_amplitudes(unsigned num_qubits, std::vector<Complex> amplitudes) {
  QuantumState s(num_qubits, Representation::Dense);
  if (amplitudes.size() != s.dimension()) {
    throw std::invalid_argument("amplitude vector size does not match 4 * 2^M");
  }
  s.dense_ = std::move(amplitudes);
  return s;
}

void QuantumState::apply_pulse(const PulseOp& op) {
  if (op.qubit >= num_qubits_) {
    throw std::out_of_range("pulse qubit " + std::to_string(op.qubit) + " out of range");
  }
  if (!std::isfinite(op.theta) || !std::isfinite(op.phi)) {
    throw std::invalid_argument("pulse angles must be finite");
  }
  if (representation_ == Representation::Dense) {
    apply_dense(op);
  } else {
    apply_sparse(op);
  }
}

void QuantumState::apply_dense(const PulseOp& op) {
  const PairMatrix m = PairMatrix::rotation(op.theta, op.phi);
  const std::uint64_t dim = plane_size();
  const std::uint64_t mask = std::uint64_t{1} << op.qubit;
  Complex* plane[kPhononLevels];
  for (unsigned p = 0; p < kPhononLevels; ++p) plane[p] = dense_.data() + p * dim;

  if (op.kind == PulseKind::V) {
    for (unsigned p = 0; p < kPhononLevels; ++p) {
      if (mask == 1) {
        kernels_->rotate_adjacent(plane[p], dim / 2, m);
      } else {
        for (std::uint64_t base = 0; base < dim; base += 2 * mask) {
          kernels_->rotate_runs(plane[p] + base, plane[p] + base + mask, mask, m);
        }
      }
    }
    return;
  }

  // Sideband pulses couple one run per block across two phonon planes:
  //   U: first (p=0, q=1), second (p=1, q=0)
  //   A: first (p=1, q=0), second (p=2, q=0)
  //   P: first (p=1, q=0), second (p=3, q=0)
  Complex* first_plane = nullptr;
  Complex* second_plane = nullptr;
  std::uint64_t first_offset = 0;
  switch (op.kind) {
    case PulseKind::U:
      first_plane = plane[0];
      second_plane = plane[1];
      first_offset = mask;
      break;
    case PulseKind::A:
      first_plane = plane[1];
      second_plane = plane[2];
      break;
    case PulseKind::P:
      first_plane = plane[1];
      second_plane = plane[3];
      break;
    case PulseKind::V:
      break;
  }
  if (mask == 1) {
    for (std::uint64_t base = 0; base < dim; base += 2) {
      detail::rotate_pair(first_plane[base + first_offset], second_plane[base], m);
    }
  } else {
    for (std::uint64_t base = 0; base < dim; base += 2 * mask) {
      kernels_->rotate_runs(first_plane + base + first_offset, second_plane + base, mask, m);
    }
  }
}

namespace {

enum class Role { Untouched, First, Second };

struct Coupling {
  Role role;
  std::uint64_t partner;
};

Coupling classify(PulseKind kind, unsigned num_qubits, unsigned qubit, std::uint64_t index) {
  const std::uint64_t dim = std::uint64_t{1} << num_qubits;
  const std::uint64_t mask = std::uint64_t{1} << qubit;
  const std::uint64_t p = index >> num_qubits;
  const std::uint64_t b = index & (dim - 1);
  const bool bit = (b & mask) != 0;
  switch (kind) {
    case PulseKind::V:
      return bit ? Coupling{Role::Second, index & ~mask} : Coupling{Role::First, index | mask};
    case PulseKind::U:
      if (p == 0 && bit) return {Role::First, dim + (b & ~mask)};
      if (p == 1 && !bit) return {Role::Second, b | mask};
      break;
    case PulseKind::A:
      if (p == 1 && !bit) return {Role::First, 2 * dim + b};
      if (p == 2 && !bit) return {Role::Second, dim + b};
      break;
    case PulseKind::P:
      if (p == 1 && !bit) return {Role::First, 3 * dim + b};
      if (p == 3 && !bit) return {Role::Second, dim + b};
      break;
  }
  return {Role::Untouched, 0};
}

const QuantumState::Entry* find_entry(const std::vector<QuantumState::Entry>& entries,
                                      std::uint64_t index) {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const QuantumState::Entry& e, std::uint64_t i) { return e.index < i; });
  return (it != entries.end() && it->index == index) ? &*it : nullptr;
}

bool negligible(const Complex& a) { return std::abs(a) < kSparsePruneThreshold; }

}  // namespace

void QuantumState::apply_sparse(const PulseOp& op) {
  const PairMatrix m = PairMatrix::rotation(op.theta, op.phi);
  std::vector<Entry> out;
  out.reserve(sparse_.size() * 2);
  for (const Entry& e : sparse_) {
    const Coupling c = classify(op.kind, num_qubits_, op.qubit, e.index);
    if (c.role == Role::Untouched) {
      out.push_back(e);
      continue;
    }
    const Entry* partner = find_entry(sparse_, c.partner);
    if (c.role == Role::Second && partner != nullptr) {
      continue;  // handled together with its first member
    }
    Complex x(0.0, 0.0);
    Complex y(0.0, 0.0);
    if (c.role == Role::First) {
      x = e.amp;
      if (partner != nullptr) y = partner->amp;
    } else {
      y = e.amp;
    }
    detail::rotate_pair(x, y, m);
    const std::uint64_t first_index = c.role == Role::First ? e.index : c.partner;
    const std::uint64_t second_index = c.role == Role::First ? c.partner : e.index;
    if (!negligible(x)) out.push_back({first_index, x});
    if (!negligible(y)) out.push_back({second_index, y});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  sparse_ = std::move(out);
}

void QuantumState::apply_decay(double dec, bool include_aux) {
  if (dec < 0.0 || !std::isfinite(dec)) {
    throw std::invalid_argument("dec must be finite and >= 0");
  }
  if (dec == 0.0) return;
  const double factor = std::exp(-dec / 2.0);
  const std::uint64_t dim = plane_size();
  const std::uint64_t end = include_aux ? kPhononLevels * dim : 2 * dim;
  if (representation_ == Representation::Dense) {
    kernels_->scale(dense_.data() + dim, end - dim, factor);
  } else {
    for (Entry& e : sparse_) {
      if (e.index >= dim && e.index < end) {
        e.amp = Complex(e.amp.real() * factor, e.amp.imag() * factor);
      }
    }
  }
}

double QuantumState::norm_sq() const {
  if (representation_ == Representation::Dense) {
    return kernels_->norm_sq(dense_.data(), dense_.size());
  }
  double total = 0.0;
  for (const Entry& e : sparse_) total += std::norm(e.amp);
  return total;
}

void QuantumState::scale(double factor) {
  if (representation_ == Representation::Dense) {
    kernels_->scale(dense_.data(), dense_.size(), factor);
  } else {
    for (Entry& e : sparse_) e.amp = Complex(e.amp.real() * factor, e.amp.imag() * factor);
  }
}

void QuantumState::collapse_excited_to_ground() {
  const std::uint64_t dim = plane_size();
  if (representation_ == Representation::Dense) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      Complex sum(0.0, 0.0);
      for (unsigned p = 1; p < kPhononLevels; ++p) {
        sum += dense_[p * dim + b];
        dense_[p * dim + b] = Complex(0.0, 0.0);
      }
      dense_[b] = sum;
    }
    return;
  }
  std::map<std::uint64_t, Complex> ground;
  for (const Entry& e : sparse_) {
    if (e.index >= dim) ground[e.index & (dim - 1)] += e.amp;
  }
  sparse_.clear();
  for (const auto& [b, a] : ground) {
    if (!negligible(a)) sparse_.push_back({b, a});
  }
}

Complex QuantumState::amplitude(unsigned phonon, std::uint64_t bits) const {
  if (phonon >= kPhononLevels || bits >= plane_size()) {
    throw std::out_of_range("amplitude index out of range");
  }
  return amplitude_at(phonon * plane_size() + bits);
}

Complex QuantumState::amplitude_at(std::uint64_t index) const {
  if (representation_ == Representation::Dense) return dense_.at(index);
  const Entry* e = find_entry(sparse_, index);
  return e ? e->amp : Complex(0.0, 0.0);
}

std::vector<Complex> QuantumState::to_dense_vector() const {
  if (representation_ == Representation::Dense) return dense_;
  std::vector<Complex> out(dimension(), Complex(0.0, 0.0));
  for (const Entry& e : sparse_) out[e.index] = e.amp;
  return out;
}

Complex inner_product(const QuantumState& a, const QuantumState& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("inner_product: qubit counts differ (" +
                                std::to_string(a.num_qubits()) + " vs " +
                                std::to_string(b.num_qubits()) + ")");
  }
  const bool a_dense = a.representation() == Representation::Dense;
  const bool b_dense = b.representation() == Representation::Dense;
  if (a_dense && b_dense) {
    return a.kernels().dot(a.dense_data().data(), b.dense_data().data(), a.dense_data().size());
  }
  Complex total(0.0, 0.0);
  if (!a_dense && b_dense) {
    for (const auto& e : a.sparse_entries()) total += std::conj(e.amp) * b.dense_data()[e.index];
    return total;
  }
  if (a_dense && !b_dense) {
    for (const auto& e : b.sparse_entries()) total += std::conj(a.dense_data()[e.index]) * e.amp;
    return total;
  }
  auto ia = a.sparse_entries().begin();
  auto ib = b.sparse_entries().begin();
  while (ia != a.sparse_entries().end() && ib != b.sparse_entries().end()) {
    if (ia->index < ib->index) {
      ++ia;
    } else if (ib->index < ia->index) {
      ++ib;
    } else {
      total += std::conj(ia->amp) * ib->amp;
      ++ia;
      ++ib;
    }
  }
  return total;
}

std::map<std::uint64_t, double> measure_distribution(const QuantumState& state,
                                                     std::span<const unsigned> qubits) {
  if (qubits.empty()) throw std::invalid_argument("measure_distribution: empty qubit subset");
  for (unsigned q : qubits) {
    if (q >= state.num_qubits()) throw std::out_of_range("measure_distribution: qubit out of range");
  }
  const std::uint64_t bit_mask = state.plane_size() - 1;
  auto pattern_of = [&](std::uint64_t index) {
    const std::uint64_t b = index & bit_mask;
    std::uint64_t pattern = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) {
      pattern |= ((b >> qubits[j]) & 1u) << j;
    }
    return pattern;
  };
  std::map<std::uint64_t, double> dist;
  if (state.representation() == Representation::Dense) {
    const auto data = state.dense_data();
    for (std::uint64_t i = 0; i < data.size(); ++i) {
      const double pr = std::norm(data[i]);
      if (pr != 0.0) dist[pattern_of(i)] += pr;
    }
  } else {
    for (const auto& e : state.sparse_entries()) dist[pattern_of(e.index)] += std::norm(e.amp);
  }
  return dist;
}

}  // namespace iontrap
