#include "iontrap/benchmarks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace iontrap {

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = static_cast<std::uint64_t>((unsigned __int128)result * base % mod);
    base = static_cast<std::uint64_t>((unsigned __int128)base * base % mod);
    exp >>= 1;
  }
  return result;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t mod) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(mod), new_r = static_cast<std::int64_t>(a % mod);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (r != 1) throw std::invalid_argument("mod_inverse: not invertible");
  return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(mod) : t);
}

FactorSpec FactorSpec::for_modulus(std::uint64_t N, std::uint64_t X, unsigned a_bits) {
  FactorSpec s;
  s.N = N;
  s.X = X != 0 ? X : (N == 15 ? 7 : 2);
  s.L = static_cast<unsigned>(std::bit_width(N));
  s.a_bits = a_bits != 0 ? a_bits : (N == 15 ? 3 : 6);
  s.validate();
  return s;
}

void FactorSpec::validate() const {
  if (N < 9 || N % 2 == 0) throw std::invalid_argument("N must be an odd composite >= 9");
  bool composite = false;
  for (std::uint64_t d = 3; d * d <= N; d += 2) composite = composite || N % d == 0;
  if (!composite) throw std::invalid_argument("N must be composite");
  if (X <= 1 || X >= N || std::gcd(X, N) != 1) {
    throw std::invalid_argument("X must satisfy 1 < X < N and gcd(X, N) = 1");
  }
  if (a_bits < 2) throw std::invalid_argument("a_bits must be >= 2");
  if (L != static_cast<unsigned>(std::bit_width(N))) throw std::invalid_argument("L must be the bit width of N");
  if (L > 20) throw std::invalid_argument("N too large");
}

// ---------------------------------------------------------------------------

namespace {

void maj(std::vector<Gate>& g, unsigned x, unsigned y, unsigned z) {
  g.push_back(Gate::cnot(z, y));
  g.push_back(Gate::cnot(z, x));
  g.push_back(Gate::ccnot(x, y, z));
}

void uma(std::vector<Gate>& g, unsigned x, unsigned y, unsigned z) {
  g.push_back(Gate::ccnot(x, y, z));
  g.push_back(Gate::cnot(z, x));
  g.push_back(Gate::cnot(x, y));
}

void append(std::vector<Gate>& dst, const std::vector<Gate>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

std::vector<Gate> ripple_add(const ArithLayout& lay) {
  std::vector<Gate> g;
  const unsigned L = lay.L;
  maj(g, lay.carry(), lay.acc(0), lay.b(0));
  for (unsigned i = 1; i < L; ++i) maj(g, lay.b(i - 1), lay.acc(i), lay.b(i));
  g.push_back(Gate::cnot(lay.b(L - 1), lay.acc(L)));
  for (unsigned i = L - 1; i >= 1; --i) uma(g, lay.b(i - 1), lay.acc(i), lay.b(i));
  uma(g, lay.carry(), lay.acc(0), lay.b(0));
  return g;
}

std::vector<Gate> modadd_cc(const ArithLayout& lay, unsigned ctl1, unsigned ctl2, std::uint64_t k,
                            std::uint64_t N) {
  const std::vector<Gate> add = ripple_add(lay);
  const std::vector<Gate> sub = inverse(add);
  std::vector<Gate> load_k, load_n, load_n_flag;
  for (unsigned i = 0; i < lay.L; ++i) {
    if ((k >> i) & 1) load_k.push_back(Gate::ccnot(ctl1, ctl2, lay.b(i)));
    if ((N >> i) & 1) {
      load_n.push_back(Gate::not_gate(lay.b(i)));
      load_n_flag.push_back(Gate::cnot(lay.flag(), lay.b(i)));
    }
  }
  const unsigned top = lay.acc(lay.L);
  std::vector<Gate> g;
  append(g, load_k);
  append(g, add);
  append(g, load_k);
  append(g, load_n);
  append(g, sub);
  append(g, load_n);
  g.push_back(Gate::cnot(top, lay.flag()));  // flag = (acc < 0)
  append(g, load_n_flag);
  append(g, add);
  append(g, load_n_flag);
  append(g, load_k);
  append(g, sub);
  g.push_back(Gate::not_gate(top));
  g.push_back(Gate::cnot(top, lay.flag()));
  g.push_back(Gate::not_gate(top));
  append(g, add);
  append(g, load_k);
  return g;
}

std::vector<Gate> controlled_modmult(const ArithLayout& lay, unsigned ctl, std::uint64_t c,
                                     std::uint64_t N) {
  const std::uint64_t c_inv = mod_inverse(c, N);
  std::vector<Gate> g;
  for (unsigned j = 0; j < lay.L; ++j) {
    append(g, modadd_cc(lay, ctl, lay.y(j), (c << j) % N, N));
  }
  for (unsigned i = 0; i < lay.L; ++i) {
    g.push_back(Gate::cnot(lay.acc(i), lay.y(i)));
    g.push_back(Gate::ccnot(ctl, lay.y(i), lay.acc(i)));
    g.push_back(Gate::cnot(lay.acc(i), lay.y(i)));
  }
  std::vector<Gate> clear;
  for (unsigned j = 0; j < lay.L; ++j) {
    append(clear, modadd_cc(lay, ctl, lay.y(j), (c_inv << j) % N, N));
  }
  append(g, inverse(clear));
  return g;
}

// ---------------------------------------------------------------------------

std::vector<Gate> build_qft(const std::vector<unsigned>& qubits) {
  std::vector<Gate> g;
  const auto n = static_cast<unsigned>(qubits.size());
  for (unsigned j = n; j-- > 0;) {
    append(g, hadamard_exact(qubits[j]));
    for (unsigned k = j; k-- > 0;) {
      g.push_back(Gate::cphase(qubits[k], qubits[j], kPi / std::ldexp(1.0, static_cast<int>(j - k))));
    }
  }
  return g;
}

BenchmarkCircuit build_factor(const FactorSpec& spec) {
  spec.validate();
  const ArithLayout lay{spec.a_bits, spec.L};
  BenchmarkCircuit b;
  b.name = "factor" + std::to_string(spec.N);
  b.circuit.num_qubits = lay.total();
  b.initial_bits = std::uint64_t{1} << lay.y(0);
  std::vector<unsigned> a_reg;
  for (unsigned i = 0; i < spec.a_bits; ++i) {
    a_reg.push_back(lay.control(i));
    b.circuit.append(hadamard_equiv(lay.control(i)));
  }
  std::uint64_t multiplier = spec.X % spec.N;
  for (unsigned i = 0; i < spec.a_bits; ++i) {
    b.circuit.append(controlled_modmult(lay, lay.control(i), multiplier, spec.N));
    multiplier = mod_pow(multiplier, 2, spec.N);
  }
  b.fidelity_endpoint = b.circuit.gates.size();
  b.checkpoints.push_back(b.fidelity_endpoint);
  b.circuit.append(build_qft(a_reg));
  for (unsigned m = 0; m < spec.a_bits; ++m) b.readout.push_back(a_reg[spec.a_bits - 1 - m]);
  return b;
}

BenchmarkCircuit build_modmult(const FactorSpec& spec) {
  spec.validate();
  const ArithLayout lay{1, spec.L};
  BenchmarkCircuit b;
  b.name = "mult";
  b.circuit.num_qubits = lay.total();
  b.initial_bits = std::uint64_t{1} << lay.y(0);
  b.circuit.append(hadamard_equiv(lay.control(0)));
  b.circuit.append(controlled_modmult(lay, lay.control(0), spec.X % spec.N, spec.N));
  b.fidelity_endpoint = b.circuit.gates.size();
  for (unsigned i = 0; i < spec.L; ++i) b.readout.push_back(lay.y(i));
  return b;
}

// ---------------------------------------------------------------------------

std::vector<Gate> multi_controlled_z(const std::vector<unsigned>& qubits,
                                     const std::vector<unsigned>& ancillas) {
  const std::size_t m = qubits.size();
  if (m == 0) throw std::invalid_argument("multi_controlled_z: no qubits");
  if (m == 1) return phase_flip(qubits[0]);
  if (m == 2) return {Gate::cphase(qubits[0], qubits[1], kPi)};
  if (ancillas.size() < m - 2) throw std::invalid_argument("multi_controlled_z: not enough ancillas");
  std::vector<Gate> compute;
  compute.push_back(Gate::ccnot(qubits[0], qubits[1], ancillas[0]));
  for (std::size_t i = 1; i + 2 < m; ++i) {
    compute.push_back(Gate::ccnot(ancillas[i - 1], qubits[i + 1], ancillas[i]));
  }
  std::vector<Gate> g = compute;
  g.push_back(Gate::cphase(ancillas[m - 3], qubits[m - 1], kPi));
  append(g, inverse(compute));
  return g;
}

GroverInstance GroverInstance::default_instance() {
  // Keys with bits 0-4 and 7 set and exactly one of bits 5, 6: 191 and 223.
  GroverInstance inst;
  inst.key_bits = 8;
  inst.ancillas = 6;
  inst.num_solutions = 2;
  const unsigned a0 = 8;
  std::vector<Gate> chain = {Gate::ccnot(0, 1, a0),      Gate::ccnot(a0, 2, a0 + 1),
                             Gate::ccnot(a0 + 1, 3, a0 + 2), Gate::ccnot(a0 + 2, 4, a0 + 3),
                             Gate::ccnot(a0 + 3, 7, a0 + 4)};
  inst.oracle.push_back(Gate::cnot(6, 5));
  append(inst.oracle, chain);
  inst.oracle.push_back(Gate::cphase(a0 + 4, 5, kPi));
  append(inst.oracle, inverse(chain));
  inst.oracle.push_back(Gate::cnot(6, 5));
  return inst;
}

GroverInstance GroverInstance::from_marked(unsigned key_bits, const std::vector<std::uint64_t>& marked,
                                           unsigned iterations) {
  if (key_bits < 2 || key_bits > 20) throw std::invalid_argument("grover: key_bits must be in [2, 20]");
  if (marked.empty()) throw std::invalid_argument("grover: need at least one marked key");
  GroverInstance inst;
  inst.key_bits = key_bits;
  inst.ancillas = key_bits > 2 ? key_bits - 2 : 0;
  inst.iterations = iterations;
  std::vector<unsigned> keys(key_bits), anc(inst.ancillas);
  std::iota(keys.begin(), keys.end(), 0u);
  std::iota(anc.begin(), anc.end(), key_bits);
  std::vector<std::uint64_t> sorted = marked;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("grover: duplicate marked key");
  }
  for (std::uint64_t key : sorted) {
    if (key >> key_bits) throw std::invalid_argument("grover: marked key out of range");
    std::vector<Gate> flips;
    for (unsigned i = 0; i < key_bits; ++i) {
      if (!((key >> i) & 1)) flips.push_back(Gate::not_gate(i));
    }
    append(inst.oracle, flips);
    append(inst.oracle, multi_controlled_z(keys, anc));
    append(inst.oracle, flips);
  }
  inst.num_solutions = sorted.size();
  return inst;
}

std::vector<std::uint64_t> GroverInstance::marked_keys() const {
  std::vector<std::uint64_t> out;
  const std::uint64_t keys = std::uint64_t{1} << key_bits;
  for (std::uint64_t key = 0; key < keys; ++key) {
    const ClassicalResult r = simulate_classical(oracle, key);
    if (r.bits != key) {
      throw ValidationError("grover oracle does not restore key " + std::to_string(key));
    }
    const double turns = r.phase / kPi;
    const double nearest = std::round(turns);
    if (std::fabs(turns - nearest) > 1e-9) {
      throw ValidationError("grover oracle applies a non-sign phase to key " + std::to_string(key));
    }
    if (static_cast<long long>(nearest) % 2 != 0) out.push_back(key);
  }
  return out;
}

void GroverInstance::validate() const {
  if (key_bits == 0 || key_bits > 20) throw ValidationError("grover: bad key width");
  Circuit c{num_qubits(), oracle};
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ValidationError(std::string("grover oracle: ") + e.what());
  }
  const auto marked = marked_keys();
  if (marked.size() != num_solutions) {
    throw ValidationError("grover oracle marks " + std::to_string(marked.size()) + " keys, expected " +
                          std::to_string(num_solutions));
  }
}

BenchmarkCircuit build_grover(const GroverInstance& instance) {
  instance.validate();
  const unsigned n = instance.key_bits;
  std::vector<unsigned> keys(n), anc(instance.ancillas);
  std::iota(keys.begin(), keys.end(), 0u);
  std::iota(anc.begin(), anc.end(), n);
  if (n > 2 && anc.size() < n - 2) throw std::invalid_argument("grover: ancilla budget exceeded");
  BenchmarkCircuit b;
  b.name = "grover";
  b.circuit.num_qubits = instance.num_qubits();
  b.marked = instance.marked_keys();
  b.readout = keys;
  for (unsigned q : keys) b.circuit.append(hadamard_equiv(q));
  std::vector<Gate> diffusion;
  for (unsigned q : keys) diffusion.push_back(Gate::rot(q, kPi / 2, kPi / 2));
  append(diffusion, multi_controlled_z(keys, anc));
  for (unsigned q : keys) diffusion.push_back(Gate::rot(q, kPi / 2, -kPi / 2));
  for (unsigned it = 0; it < instance.iterations; ++it) {
    b.circuit.append(instance.oracle);
    b.circuit.append(diffusion);
    b.iteration_ends.push_back(b.circuit.gates.size());
  }
  b.checkpoints = b.iteration_ends;
  b.fidelity_endpoint = b.circuit.gates.size();
  return b;
}

double grover_success_closed_form(unsigned key_bits, std::size_t k, unsigned iteration) {
  const double theta0 = std::asin(std::sqrt(static_cast<double>(k) / std::ldexp(1.0, static_cast<int>(key_bits))));
  const double s = std::sin((2.0 * iteration + 1.0) * theta0);
  return s * s;
}

BenchmarkCircuit make_benchmark(std::string_view name) {
  if (name == "grover") return build_grover(GroverInstance::default_instance());
  if (name == "mult") return build_modmult(FactorSpec::for_modulus(15));
  if (name.substr(0, 6) == "factor") {
    const std::string_view digits = name.substr(6);
    if (digits == "15" || digits == "21" || digits == "35" || digits == "57") {
      return build_factor(FactorSpec::for_modulus(std::stoull(std::string(digits))));
    }
  }
  throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

BenchmarkCircuit make_custom_benchmark(std::string name, Circuit circuit) {
  circuit.validate();
  BenchmarkCircuit b;
  b.name = std::move(name);
  b.fidelity_endpoint = circuit.gates.size();
  for (unsigned q = 0; q < circuit.num_qubits; ++q) b.readout.push_back(q);
  b.circuit = std::move(circuit);
  return b;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> sample_points(const BenchmarkCircuit& bench, std::size_t stride) {
  const std::size_t total = bench.circuit.gates.size();
  std::vector<std::size_t> pts;
  if (stride > 0) {
    for (std::size_t g = stride; g <= total; g += stride) pts.push_back(g);
  }
  for (std::size_t c : bench.checkpoints) {
    if (c > 0 && c <= total) pts.push_back(c);
  }
  if (bench.fidelity_endpoint > 0) pts.push_back(bench.fidelity_endpoint);
  if (total > 0) pts.push_back(total);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

const Snapshot* ReferenceTrace::at_gate(std::size_t gate_index) const {
  auto it = std::lower_bound(snapshots.begin(), snapshots.end(), gate_index,
                             [](const Snapshot& s, std::size_t g) { return s.gate_index < g; });
  return it != snapshots.end() && it->gate_index == gate_index ? &*it : nullptr;
}

ReferenceTrace reference_trace(const BenchmarkCircuit& bench, const PulseSchedule& schedule,
                               std::size_t stride) {
  ReferenceTrace trace;
  trace.stride = stride;
  const auto points = sample_points(bench, stride);
  QuantumState state =
      QuantumState::basis(schedule.num_qubits, bench.initial_bits, Representation::Sparse);
  std::size_t next = 0;
  std::uint64_t pulse = 0;
  for (std::size_t g = 0; g < schedule.gate_count() && next < points.size(); ++g) {
    for (; pulse < schedule.gate_end[g]; ++pulse) state.apply_pulse(schedule.pulses[pulse]);
    if (g + 1 == points[next]) {
      trace.snapshots.push_back({g + 1, pulse, state});
      ++next;
    }
  }
  return trace;
}

double marked_probability(const QuantumState& state, const BenchmarkCircuit& bench) {
  const auto dist = measure_distribution(state, bench.readout);
  double p = 0.0;
  for (std::uint64_t key : bench.marked) {
    auto it = dist.find(key);
    if (it != dist.end()) p += it->second;
  }
  return p;
}

}  // namespace iontrap
