#include "iontrap/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iontrap {

namespace {

constexpr std::array<const char*, kGateKindCount> kGateNames = {"NOT", "CNOT", "CCNOT", "ROT",
                                                                 "CPHASE"};
constexpr std::array<std::size_t, kGateKindCount> kGateArity = {1, 2, 3, 1, 2};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    ++line_no;
    fn(line_no, strip_comment(line));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

const char* to_string(GateKind kind) { return kGateNames[static_cast<std::size_t>(kind)]; }

GateKind gate_kind_from_string(std::string_view name) {
  for (std::size_t k = 0; k < kGateKindCount; ++k) {
    if (name == kGateNames[k]) return static_cast<GateKind>(k);
  }
  throw ParseError("unknown gate '" + std::string(name) + "'");
}

const char* to_string(Role role) {
  switch (role) {
    case Role::Control: return "control";
    case Role::C1: return "c1";
    case Role::C2: return "c2";
    case Role::Target: return "target";
  }
  return "?";
}

Role role_from_string(std::string_view name) {
  if (name == "control") return Role::Control;
  if (name == "c1") return Role::C1;
  if (name == "c2") return Role::C2;
  if (name == "target") return Role::Target;
  throw ParseError("unknown pulse role '" + std::string(name) + "'");
}

std::size_t Gate::arity() const { return kGateArity[static_cast<std::size_t>(kind)]; }

unsigned Gate::qubit_for(Role role) const {
  switch (kind) {
    case GateKind::NOT:
    case GateKind::ROT:
      if (role == Role::Target) return qubits[0];
      break;
    case GateKind::CNOT:
    case GateKind::CPHASE:
      if (role == Role::Control) return qubits[0];
      if (role == Role::Target) return qubits[1];
      break;
    case GateKind::CCNOT:
      if (role == Role::C1) return qubits[0];
      if (role == Role::C2) return qubits[1];
      if (role == Role::Target) return qubits[2];
      break;
  }
  throw std::invalid_argument(std::string("gate ") + to_string(kind) + " has no role " +
                              to_string(role));
}

void Gate::validate(unsigned num_qubits) const {
  const std::size_t n = arity();
  for (std::size_t i = 0; i < n; ++i) {
    if (qubits[i] >= num_qubits) {
      throw std::out_of_range(std::string(to_string(kind)) + ": qubit " +
                              std::to_string(qubits[i]) + " out of range for " +
                              std::to_string(num_qubits) + " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (qubits[i] == qubits[j]) {
        throw std::invalid_argument(std::string(to_string(kind)) + ": repeated qubit " +
                                    std::to_string(qubits[i]));
      }
    }
  }
  if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(alpha)) {
    throw std::invalid_argument("gate angles must be finite");
  }
}

Gate Gate::inverse() const {
  Gate g = *this;
  g.theta = -theta;
  g.alpha = -alpha;
  return g;
}

void Circuit::validate() const {
  for (const Gate& g : gates) g.validate(num_qubits);
}

std::vector<Gate> inverse(const std::vector<Gate>& gates) {
  std::vector<Gate> out;
  out.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) out.push_back(it->inverse());
  return out;
}

Gate hadamard_equiv(unsigned q) { return Gate::rot(q, kPi / 2, kPi / 2); }

std::vector<Gate> hadamard_exact(unsigned q) {
  return {Gate::rot(q, kPi / 2, kPi / 2), Gate::rot(q, kPi, 0.0)};
}

std::vector<Gate> phase_flip(unsigned q) {
  // Ry(pi/2) X Ry(-pi/2) = -Z
  return {Gate::rot(q, kPi / 2, -kPi / 2), Gate::not_gate(q), Gate::rot(q, kPi / 2, kPi / 2)};
}

// ---------------------------------------------------------------------------

double AngleExpr::evaluate(const Gate& g) const {
  switch (param) {
    case Param::None: return constant;
    case Param::Theta: return constant + coefficient * g.theta;
    case Param::Phi: return constant + coefficient * g.phi;
    case Param::Alpha: return constant + coefficient * g.alpha;
  }
  return constant;
}

AngleExpr parse_angle_expr(std::string_view text) {
  AngleExpr e;
  std::size_t i = 0;
  bool any = false;
  while (i < text.size()) {
    double sign = 1.0;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1.0 : 1.0;
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != '+' && text[j] != '-') {
      // allow exponents like 1e-3
      if ((text[j] == 'e' || text[j] == 'E') && j + 1 < text.size() &&
          (text[j + 1] == '-' || text[j + 1] == '+') && j > i &&
          std::isdigit(static_cast<unsigned char>(text[j - 1]))) {
        j += 2;
        continue;
      }
      ++j;
    }
    const std::string_view term = text.substr(i, j - i);
    if (term.empty()) throw ParseError("bad angle expression '" + std::string(text) + "'");
    AngleExpr::Param p = AngleExpr::Param::None;
    if (term == "theta") p = AngleExpr::Param::Theta;
    if (term == "phi") p = AngleExpr::Param::Phi;
    if (term == "alpha") p = AngleExpr::Param::Alpha;
    if (p != AngleExpr::Param::None) {
      if (e.param != AngleExpr::Param::None && e.param != p) {
        throw ParseError("angle expression may reference one parameter: '" + std::string(text) + "'");
      }
      e.param = p;
      e.coefficient += sign;
    } else {
      e.constant += sign * parse_angle(term);
    }
    any = true;
    i = j;
  }
  if (!any) throw ParseError("empty angle expression");
  return e;
}

std::string format_angle_expr(const AngleExpr& e) {
  std::string out;
  if (e.param != AngleExpr::Param::None && e.coefficient != 0.0) {
    const char* name = e.param == AngleExpr::Param::Theta ? "theta"
                       : e.param == AngleExpr::Param::Phi ? "phi"
                                                          : "alpha";
    out = (e.coefficient < 0 ? "-" : "") + std::string(name);
    if (e.constant != 0.0) {
      const std::string c = format_angle(e.constant);
      out += c.front() == '-' ? c : "+" + c;
    }
    return out;
  }
  return format_angle(e.constant);
}

PulseTableSet PulseTableSet::builtin() {
  using P = AngleExpr::Param;
  const auto F = AngleExpr::fixed;
  PulseTableSet t;
  t.set_table(GateKind::NOT, {
                                 {PulseKind::V, Role::Target, F(kPi / 2), F(0.0)},
                                 {PulseKind::V, Role::Target, F(kPi / 4), F(0.0)},
                                 {PulseKind::V, Role::Target, F(kPi / 4), F(0.0)},
                             });
  t.set_table(GateKind::CNOT, {
                                  {PulseKind::V, Role::Target, F(kPi / 2), F(-kPi / 2)},
                                  {PulseKind::U, Role::Control, F(kPi), F(0.0)},
                                  {PulseKind::A, Role::Target, F(2 * kPi), F(0.0)},
                                  {PulseKind::U, Role::Control, F(kPi), F(0.0)},
                                  {PulseKind::V, Role::Target, F(kPi / 2), F(kPi / 2)},
                              });
  t.set_table(GateKind::CCNOT, {
                                   {PulseKind::V, Role::Target, F(kPi / 2), F(-kPi / 2)},
                                   {PulseKind::U, Role::C1, F(kPi), F(0.0)},
                                   {PulseKind::P, Role::C2, F(kPi), F(0.0)},
                                   {PulseKind::A, Role::Target, F(2 * kPi), F(0.0)},
                                   {PulseKind::P, Role::C2, F(kPi), F(0.0)},
                                   {PulseKind::U, Role::C1, F(kPi), F(0.0)},
                                   {PulseKind::V, Role::Target, F(kPi / 2), F(kPi / 2)},
                               });
  t.set_table(GateKind::ROT, {
                                 {PulseKind::V, Role::Target, AngleExpr::of(P::Theta),
                                  AngleExpr::of(P::Phi)},
                             });
  // U round trip contributes e^{i alpha} to the control=1 branch, the split A
  // pair contributes e^{-i alpha} to target=0, leaving e^{i alpha} on |11>.
  t.set_table(GateKind::CPHASE, {
                                    {PulseKind::U, Role::Control, F(kPi), F(0.0)},
                                    {PulseKind::A, Role::Target, F(kPi), F(0.0)},
                                    {PulseKind::A, Role::Target, F(kPi),
                                     AngleExpr::of(P::Alpha, 1.0, -kPi)},
                                    {PulseKind::U, Role::Control, F(kPi),
                                     AngleExpr::of(P::Alpha, -1.0, -kPi)},
                                });
  return t;
}

void PulseTableSet::set_table(GateKind kind, std::vector<PulseTemplate> pulses) {
  tables_[static_cast<std::size_t>(kind)] = std::move(pulses);
  validated_ = false;
}

void PulseTableSet::load_overrides(std::string_view text) {
  std::array<std::vector<PulseTemplate>, kGateKindCount> fresh;
  std::array<bool, kGateKindCount> touched{};
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto tok = split_ws(line);
    if (tok.empty()) return;
    if (tok.size() != 5) {
      throw ParseError("table line " + std::to_string(line_no) +
                       ": expected `GATE KIND ROLE THETA PHI`");
    }
    const GateKind gate = gate_kind_from_string(tok[0]);
    if (tok[1].size() != 1) throw ParseError("table line " + std::to_string(line_no) + ": bad kind");
    const auto k = static_cast<std::size_t>(gate);
    fresh[k].push_back({pulse_kind_from_char(tok[1][0]), role_from_string(tok[2]),
                        parse_angle_expr(tok[3]), parse_angle_expr(tok[4])});
    touched[k] = true;
  });
  for (std::size_t k = 0; k < kGateKindCount; ++k) {
    if (touched[k]) set_table(static_cast<GateKind>(k), std::move(fresh[k]));
  }
}

// ---------------------------------------------------------------------------

namespace {

Complex rotation_entry(double theta, double phi, int row, int col) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const Complex minus_i(0.0, -1.0);
  if (row == col) return Complex(c, 0.0);
  if (row == 0) return minus_i * std::polar(1.0, -phi) * s;
  return minus_i * std::polar(1.0, phi) * s;
}

Matrix identity(std::size_t dim) {
  Matrix m{dim, std::vector<Complex>(dim * dim, Complex(0.0, 0.0))};
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix out{a.dim, std::vector<Complex>(a.dim * a.dim, Complex(0.0, 0.0))};
  for (std::size_t r = 0; r < a.dim; ++r) {
    for (std::size_t k = 0; k < a.dim; ++k) {
      const Complex ark = a.at(r, k);
      if (ark == Complex(0.0, 0.0)) continue;
      for (std::size_t c = 0; c < a.dim; ++c) out.at(r, c) += ark * b.at(k, c);
    }
  }
  return out;
}

}  // namespace

Matrix pulse_matrix(PulseKind kind, unsigned qubit, double theta, double phi, unsigned num_qubits) {
  const std::size_t plane = std::size_t{1} << num_qubits;
  Matrix m = identity(kPhononLevels * plane);
  const std::size_t mask = std::size_t{1} << qubit;
  auto set_block = [&](std::size_t first, std::size_t second) {
    m.at(first, first) = rotation_entry(theta, phi, 0, 0);
    m.at(first, second) = rotation_entry(theta, phi, 0, 1);
    m.at(second, first) = rotation_entry(theta, phi, 1, 0);
    m.at(second, second) = rotation_entry(theta, phi, 1, 1);
  };
  for (std::size_t b = 0; b < plane; ++b) {
    if (b & mask) continue;
    switch (kind) {
      case PulseKind::V:
        for (std::size_t p = 0; p < kPhononLevels; ++p) set_block(p * plane + b, p * plane + (b | mask));
        break;
      case PulseKind::U: set_block(b | mask, plane + b); break;
      case PulseKind::A: set_block(plane + b, 2 * plane + b); break;
      case PulseKind::P: set_block(plane + b, 3 * plane + b); break;
    }
  }
  return m;
}

Matrix ideal_unitary(const Gate& gate, unsigned num_qubits) {
  if (num_qubits > 3) throw std::invalid_argument("ideal_unitary supports at most 3 qubits");
  gate.validate(num_qubits);
  const std::size_t plane = std::size_t{1} << num_qubits;
  const std::size_t dim = kPhononLevels * plane;
  Matrix m{dim, std::vector<Complex>(dim * dim, Complex(0.0, 0.0))};
  auto bit = [](std::size_t b, unsigned q) { return (b >> q) & 1u; };
  for (std::size_t p = 0; p < kPhononLevels; ++p) {
    for (std::size_t b = 0; b < plane; ++b) {
      const std::size_t col = p * plane + b;
      switch (gate.kind) {
        case GateKind::NOT: m.at(p * plane + (b ^ (std::size_t{1} << gate.qubits[0])), col) = 1.0; break;
        case GateKind::CNOT: {
          const std::size_t out = bit(b, gate.qubits[0]) ? b ^ (std::size_t{1} << gate.qubits[1]) : b;
          m.at(p * plane + out, col) = 1.0;
          break;
        }
        case GateKind::CCNOT: {
          const bool fire = bit(b, gate.qubits[0]) && bit(b, gate.qubits[1]);
          const std::size_t out = fire ? b ^ (std::size_t{1} << gate.qubits[2]) : b;
          m.at(p * plane + out, col) = 1.0;
          break;
        }
        case GateKind::ROT: {
          const std::size_t mask = std::size_t{1} << gate.qubits[0];
          const int in = static_cast<int>(bit(b, gate.qubits[0]));
          for (int out = 0; out < 2; ++out) {
            const std::size_t ob = out ? (b | mask) : (b & ~mask);
            m.at(p * plane + ob, col) = rotation_entry(gate.theta, gate.phi, out, in);
          }
          break;
        }
        case GateKind::CPHASE: {
          const bool both = bit(b, gate.qubits[0]) && bit(b, gate.qubits[1]);
          m.at(col, col) = both ? std::polar(1.0, gate.alpha) : Complex(1.0, 0.0);
          break;
        }
      }
    }
  }
  return m;
}

std::vector<PulseOp> expand_gate(const Gate& gate, const PulseTableSet& tables) {
  const auto& table = tables.table(gate.kind);
  std::vector<PulseOp> out;
  out.reserve(table.size());
  for (const PulseTemplate& t : table) {
    out.push_back({t.kind, gate.qubit_for(t.role), t.theta.evaluate(gate), t.phi.evaluate(gate), 0});
  }
  return out;
}

namespace {

std::vector<Gate> validation_cases(GateKind kind) {
  std::vector<Gate> cases;
  std::vector<unsigned> perm;
  const std::size_t n = kGateArity[static_cast<std::size_t>(kind)];
  for (unsigned i = 0; i < n; ++i) perm.push_back(i);
  do {
    Gate g{kind, {perm[0], n > 1 ? perm[1] : 0u, n > 2 ? perm[2] : 0u}};
    if (kind == GateKind::ROT) {
      for (auto [th, ph] : {std::pair{kPi / 2, kPi / 2}, {kPi, 0.0}, {0.37, -1.2}, {-2.1, 2.9}}) {
        g.theta = th;
        g.phi = ph;
        cases.push_back(g);
      }
    } else if (kind == GateKind::CPHASE) {
      for (double a : {kPi, kPi / 2, kPi / 4, kPi / 64, 0.3, -1.1}) {
        g.alpha = a;
        cases.push_back(g);
      }
    } else {
      cases.push_back(g);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return cases;
}

}  // namespace

TableReport validate_tables(const PulseTableSet& tables) {
  TableReport report;
  report.passed = true;
  for (std::size_t k = 0; k < kGateKindCount; ++k) {
    const auto kind = static_cast<GateKind>(k);
    VariantReport v{kind};
    v.pulses = tables.table(kind).size();
    const auto m = static_cast<unsigned>(kGateArity[k]);
    const std::size_t plane = std::size_t{1} << m;
    bool ok = !tables.table(kind).empty();
    for (const Gate& g : validation_cases(kind)) {
      Matrix composed = identity(kPhononLevels * plane);
      try {
        for (const PulseOp& op : expand_gate(g, tables)) {
          composed = multiply(pulse_matrix(op.kind, op.qubit, op.theta, op.phi, m), composed);
        }
      } catch (const std::invalid_argument&) {
        ok = false;  // table references a role the gate does not have
        break;
      }
      const Matrix ideal = ideal_unitary(g, m);
      Complex overlap(0.0, 0.0);
      for (std::size_t c = 0; c < plane; ++c) {
        for (std::size_t r = 0; r < composed.dim; ++r) overlap += std::conj(ideal.at(r, c)) * composed.at(r, c);
      }
      const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
      for (std::size_t c = 0; c < plane; ++c) {
        for (std::size_t r = 0; r < composed.dim; ++r) {
          v.max_deviation = std::max(v.max_deviation, std::abs(composed.at(r, c) - phase * ideal.at(r, c)));
          if (r >= plane) v.max_leakage = std::max(v.max_leakage, std::abs(composed.at(r, c)));
        }
      }
      if (g.qubits == std::array<unsigned, 3>{0, 1, 2} || m < 3) v.global_phase = phase;
    }
    v.passed = ok && v.max_deviation <= kTableTolerance && v.max_leakage <= kTableTolerance;
    report.passed = report.passed && v.passed;
    report.variants.push_back(v);
  }
  return report;
}

std::string TableReport::failures() const {
  std::ostringstream os;
  for (const auto& v : variants) {
    if (!v.passed) {
      os << to_string(v.kind) << " (deviation " << v.max_deviation << ", leakage " << v.max_leakage
         << ") ";
    }
  }
  return os.str();
}

PulseTableSet validated(PulseTableSet tables) {
  const TableReport report = validate_tables(tables);
  if (!report.passed) throw ValidationError("pulse table validation failed: " + report.failures());
  tables.validated_ = true;
  return tables;
}

const PulseTableSet& default_tables() {
  static const PulseTableSet tables = validated(PulseTableSet::builtin());
  return tables;
}

PulseSchedule compile(const Circuit& circuit, const PulseTableSet& tables) {
  if (!tables.is_validated()) throw ValidationError("compile: pulse tables have not been validated");
  circuit.validate();
  PulseSchedule s;
  s.num_qubits = circuit.num_qubits;
  std::size_t total = 0;
  for (const Gate& g : circuit.gates) total += tables.table(g.kind).size();
  s.pulses.reserve(total);
  s.gate_end.reserve(circuit.gates.size());
  for (const Gate& g : circuit.gates) {
    for (PulseOp op : expand_gate(g, tables)) {
      op.pulse_index = s.pulses.size();
      s.pulses.push_back(op);
    }
    s.gate_end.push_back(s.pulses.size());
  }
  return s;
}

// ---------------------------------------------------------------------------

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  unsigned declared = 0;
  unsigned max_index = 0;
  bool any_gate = false;
  auto parse_qubit = [](std::string_view tok, std::size_t line_no) {
    if (!tok.empty() && (tok.front() == 'q' || tok.front() == 'Q')) tok.remove_prefix(1);
    unsigned v = 0;
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      throw ParseError("line " + std::to_string(line_no) + ": bad qubit '" + std::string(tok) + "'");
    }
    for (char ch : tok) v = v * 10 + static_cast<unsigned>(ch - '0');
    return v;
  };
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto tok = split_ws(line);
    if (tok.empty()) return;
    if (tok[0] == "QUBITS" || tok[0] == "qubits") {
      if (tok.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": QUBITS <n>");
      declared = parse_qubit(tok[1], line_no);
      return;
    }
    GateKind kind;
    try {
      kind = gate_kind_from_string(tok[0]);
    } catch (const ParseError&) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown gate '" + std::string(tok[0]) + "'");
    }
    Gate g{kind};
    const std::size_t n = g.arity();
    const std::size_t angles = kind == GateKind::ROT ? 2 : kind == GateKind::CPHASE ? 1 : 0;
    if (tok.size() != 1 + n + angles) {
      throw ParseError("line " + std::to_string(line_no) + ": " + to_string(kind) + " expects " +
                       std::to_string(n) + " qubits and " + std::to_string(angles) + " angles");
    }
    for (std::size_t i = 0; i < n; ++i) {
      g.qubits[i] = parse_qubit(tok[1 + i], line_no);
      max_index = std::max(max_index, g.qubits[i]);
    }
    try {
      if (kind == GateKind::ROT) {
        g.theta = parse_angle(tok[1 + n]);
        g.phi = parse_angle(tok[2 + n]);
      } else if (kind == GateKind::CPHASE) {
        g.alpha = parse_angle(tok[1 + n]);
      }
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    c.gates.push_back(g);
    any_gate = true;
  });
  c.num_qubits = declared != 0 ? declared : (any_gate ? max_index + 1 : 0);
  if (c.num_qubits == 0) throw ParseError("circuit has no gates and no QUBITS declaration");
  c.validate();
  return c;
}

std::string format_circuit(const Circuit& circuit) {
  std::ostringstream os;
  os << "QUBITS " << circuit.num_qubits << "\n";
  for (const Gate& g : circuit.gates) {
    os << to_string(g.kind);
    for (std::size_t i = 0; i < g.arity(); ++i) os << " q" << g.qubits[i];
    if (g.kind == GateKind::ROT) os << " " << format_angle(g.theta) << " " << format_angle(g.phi);
    if (g.kind == GateKind::CPHASE) os << " " << format_angle(g.alpha);
    os << "\n";
  }
  return os.str();
}

ClassicalResult simulate_classical(const std::vector<Gate>& gates, std::uint64_t bits) {
  ClassicalResult r{bits, 0.0};
  auto bit = [&](unsigned q) { return (r.bits >> q) & 1u; };
  for (const Gate& g : gates) {
    switch (g.kind) {
      case GateKind::NOT: r.bits ^= std::uint64_t{1} << g.qubits[0]; break;
      case GateKind::CNOT:
        if (bit(g.qubits[0])) r.bits ^= std::uint64_t{1} << g.qubits[1];
        break;
      case GateKind::CCNOT:
        if (bit(g.qubits[0]) && bit(g.qubits[1])) r.bits ^= std::uint64_t{1} << g.qubits[2];
        break;
      case GateKind::CPHASE:
        if (bit(g.qubits[0]) && bit(g.qubits[1])) r.phase += g.alpha;
        break;
      case GateKind::ROT: throw std::invalid_argument("simulate_classical: ROT is not classical");
    }
  }
  return r;
}

}  // namespace iontrap
