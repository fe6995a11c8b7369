// Acceptance harness: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "iontrap/analysis.hpp"
#include "iontrap/cli.hpp"
#include "iontrap/csv.hpp"

using namespace iontrap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) { return format_number(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Complex> random_state(std::mt19937_64& rng, unsigned m) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(kPhononLevels << m);
  double n = 0;
  for (auto& a : v) {
    a = {g(rng), g(rng)};
    n += std::norm(a);
  }
  for (auto& a : v) a /= std::sqrt(n);
  return v;
}

// 1. Pulse algebra
Outcome pulse_algebra() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ang(-2 * kPi, 2 * kPi);
  double worst_norm = 0, worst_comp = 0;
  const int cases = 10000;
  for (int i = 0; i < cases; ++i) {
    const unsigned m = 1 + static_cast<unsigned>(rng() % 10);
    const auto kind = static_cast<PulseKind>(rng() % 4);
    const unsigned q = static_cast<unsigned>(rng() % m);
    auto st = QuantumState::from_amplitudes(m, random_state(rng, m));
    st.apply_pulse({kind, q, ang(rng), ang(rng), 0});
    worst_norm = std::max(worst_norm, std::fabs(st.norm_sq() - 1.0));
  }
  for (int i = 0; i < 500; ++i) {
    const unsigned m = 1 + static_cast<unsigned>(rng() % 10);
    const unsigned q = static_cast<unsigned>(rng() % m);
    const double a = ang(rng), b = ang(rng), phi = ang(rng);
    const auto v = random_state(rng, m);
    auto two = QuantumState::from_amplitudes(m, v);
    two.apply_pulse({PulseKind::V, q, a, phi, 0});
    two.apply_pulse({PulseKind::V, q, b, phi, 1});
    auto one = QuantumState::from_amplitudes(m, v);
    one.apply_pulse({PulseKind::V, q, a + b, phi, 0});
    const auto x = two.to_dense_vector(), y = one.to_dense_vector();
    for (std::size_t k = 0; k < x.size(); ++k) worst_comp = std::max(worst_comp, std::abs(x[k] - y[k]));
  }
  return {worst_norm < 1e-12 && worst_comp < 1e-12,
          "cases=" + std::to_string(cases) + " max_norm_drift=" + num(worst_norm) +
              " max_composition_error=" + num(worst_comp)};
}

// 2. Gate tables
Outcome gate_tables() {
  const TableReport r = validate_tables(PulseTableSet::builtin());
  const std::size_t want[] = {3, 5, 7, 1, 4};
  bool counts = r.variants.size() == 5;
  double worst = 0;
  std::string d;
  for (std::size_t i = 0; i < r.variants.size(); ++i) {
    const auto& v = r.variants[i];
    counts = counts && v.pulses == want[i];
    worst = std::max(worst, v.max_deviation);
    d += std::string(to_string(v.kind)) + "=" + std::to_string(v.pulses) + " ";
  }
  return {r.passed && counts && worst < 1e-10, d + "max_deviation=" + num(worst)};
}

// 3. Grover ideal math
Outcome grover_ideal() {
  std::mt19937_64 rng(99);
  double worst = 0;
  std::string shapes;
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned n = 3 + static_cast<unsigned>(rng() % 8);  // 3..10
    const std::size_t k = 1 + rng() % std::min<std::uint64_t>(4, (1u << n) / 4);
    std::set<std::uint64_t> keys;
    while (keys.size() < k) keys.insert(rng() % (1u << n));
    const auto inst = GroverInstance::from_marked(n, {keys.begin(), keys.end()}, 12);
    const auto exp = Experiment::prepare(build_grover(inst), 0);
    const auto t = run_noisy(exp, {}, {}, 1, {Representation::Sparse});
    for (const auto& s : t.samples) {
      if (s.iteration == 0) continue;
      worst = std::max(worst, std::fabs(s.success_probability -
                                        grover_success_closed_form(n, k, static_cast<unsigned>(s.iteration))));
    }
    shapes += "(" + std::to_string(n) + "," + std::to_string(k) + ")";
  }
  const auto def = Experiment::prepare(make_benchmark("grover"), 0);
  const auto t = run_noisy(def, {}, {}, 1, {Representation::Sparse});
  std::size_t peak_it = 0;
  double peak = -1;
  for (const auto& s : t.samples) {
    if (s.iteration > 0 && s.success_probability > peak) {
      peak = s.success_probability;
      peak_it = s.iteration;
    }
  }
  return {worst < 1e-9 && peak_it == 8,
          "instances=" + shapes + " max_error=" + num(worst) + " default_peak_iteration=" + std::to_string(peak_it) +
              " default_peak=" + num(peak)};
}

// 4. Grover under noise
Outcome grover_noise() {
  const auto exp = Experiment::prepare(make_benchmark("grover"), 10);
  ReplicationOptions o;
  o.metric = ReplicationMetric::PeakSuccess;
  o.target_half_width = 0.02;
  o.max_runs = 256;
  std::string d;
  bool pass = true;
  for (int k : {128, 64}) {
    const double sigma = kPi / k;
    const auto r = replicate(exp, {0, sigma, 0, sigma}, {}, o);
    std::size_t it = 0;
    const double peak = r.peak_success(&it);
    const bool ok = k == 128 ? peak >= 0.5 : (peak >= 0.1 && peak <= 0.3);
    pass = pass && ok && !r.capped;
    d += "sigma=" + format_angle(sigma) + ": peak=" + num(peak) + " at iteration " + std::to_string(it) +
         " runs=" + std::to_string(r.n_runs) + " half_width=" + num(r.metric_ci.half_width) +
         (ok ? " ok" : " out of range") + "; ";
  }
  return {pass, d};
}

// 5. Constant phi offset cancels
Outcome phi_cancellation() {
  const auto exp = Experiment::prepare(make_benchmark("mult"), 10);
  const auto t = run_noisy(exp, {0, 0, kPi / 64, 0}, {}, 1);
  return {t.final_fidelity() >= 0.99, "mult mu_phi=pi/64 final_fidelity=" + num(t.final_fidelity())};
}

// 6. Error-source ordering on factor15
Outcome error_ordering() {
  const auto exp = Experiment::prepare(make_benchmark("factor15"), 50);
  const double s = kPi / 256;
  const ErrorModel both{0, s, 0, s}, theta{0, s, 0, 0}, phi{0, 0, 0, s};
  // The single-source legs differ by about 0.01, so they are replicated to a
  // tighter half-width than the default to resolve the ordering.
  std::string runs;
  auto rep = [&](const ErrorModel& e, double half_width) {
    ReplicationOptions o;
    o.target_half_width = half_width;
    o.max_runs = 256;
    o.workers = hardware_workers();
    const auto r = replicate(exp, e, {}, o);
    runs += std::to_string(r.n_runs) + (r.capped ? "(capped) " : " ");
    return r.final_ci;
  };
  const auto fb = rep(both, default_half_width(both)), ft = rep(theta, 0.005), fp = rep(phi, 0.005);
  const bool order = fb.mean <= ft.mean && ft.mean <= fp.mean;
  const bool separated = ft.high < fp.low;
  auto show = [](const char* n, const ConfidenceInterval& c) {
    return std::string(n) + "=" + num(c.mean) + " [" + num(c.low) + ", " + num(c.high) + "] ";
  };
  return {order && separated, show("F(theta+phi)", fb) + show("F(theta)", ft) + show("F(phi)", fp) + "runs=" + runs};
}

// 7. Decoherence behaviour
Outcome decoherence() {
  bool pass = true;
  std::string d;
  {
    const auto exp = Experiment::prepare(make_benchmark("factor15"), 50);
    const RunOptions sparse{Representation::Sparse};
    const auto lo = run_noisy(exp, {}, {1e-6}, 1, sparse);
    const auto hi = run_noisy(exp, {}, {1e-4}, 1, sparse);
    bool declining = true;
    for (std::size_t i = 1; i < hi.samples.size(); ++i) {
      if (hi.samples[i].gate_index > hi.endpoint) break;
      declining = declining && hi.samples[i].fidelity <= hi.samples[i - 1].fidelity + 1e-12;
    }
    const bool ok = lo.final_fidelity() >= 0.9 && hi.final_fidelity() < 0.5 && declining;
    pass = pass && ok;
    d += "factor15 F(1e-6)=" + num(lo.final_fidelity()) + " F(1e-4)=" + num(hi.final_fidelity()) +
         (declining ? " declining" : " not monotone") + "; ";
  }
  {
    const auto exp = Experiment::prepare(make_benchmark("mult"), 10);
    const RunOptions sparse{Representation::Sparse};
    std::vector<double> rates;
    for (double dec : {1e-7, 1e-6, 1e-5}) rates.push_back(error_rate(run_noisy(exp, {}, {dec}, 1, sparse), exp).rate);
    const double r1 = rates[1] / rates[0] / 10, r2 = rates[2] / rates[1] / 10;
    const bool linear = std::fabs(r1 - 1) <= 0.25 && std::fabs(r2 - 1) <= 0.25;
    const bool scale = rates[1] >= 9.1e-7 / 3 && rates[1] <= 9.1e-7 * 3;
    pass = pass && linear && scale;
    d += "mult rates " + num(rates[0]) + ", " + num(rates[1]) + ", " + num(rates[2]) + " per gate (linearity " +
         num(r1) + ", " + num(r2) + "; reference 9.1e-7)";
  }
  return {pass, d};
}

// 8. Correlation between decoherence and operational error
Outcome correlation_bound() {
  double worst = 0, avg_sum = 0;
  std::size_t points = 0;
  std::string d;
  std::vector<std::uint64_t> seeds(8);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 1 + i;
  for (const char* name : {"mult", "grover"}) {
    const auto exp = Experiment::prepare(make_benchmark(name), 10);
    double bench_worst = 0;
    for (int k = 10; k >= 6; --k) {
      const double sigma = kPi / std::ldexp(1.0, k);
      for (double dec : {1e-3, 1e-4, 1e-5, 1e-6}) {
        const auto c = correlation(exp, {0, sigma, 0, sigma}, {dec}, seeds, hardware_workers());
        worst = std::max(worst, c.omega_max);
        bench_worst = std::max(bench_worst, c.omega_max);
        avg_sum += c.omega_avg;
        ++points;
      }
    }
    d += std::string(name) + " max|omega|=" + num(bench_worst) + "; ";
  }
  const double avg = avg_sum / static_cast<double>(points);
  return {worst < 2e-2 && avg < 5e-3, d + "overall max=" + num(worst) + " avg=" + num(avg) + " points=" +
                                          std::to_string(points)};
}

// 9. Sparse and dense agree; sparse is faster
Outcome sparse_dense() {
  const auto exp = Experiment::prepare(make_benchmark("mult"), 10);
  RunOptions dense{Representation::Dense};
  RunOptions sparse{Representation::Sparse};
  dense.keep_final_state = sparse.keep_final_state = true;
  auto t0 = std::chrono::steady_clock::now();
  const auto a = run_noisy(exp, {}, {1e-5}, 1, dense);
  const double td = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto b = run_noisy(exp, {}, {1e-5}, 1, sparse);
  const double ts = seconds_since(t0);
  const auto x = a.final_state->to_dense_vector(), y = b.final_state->to_dense_vector();
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    worst = std::max(worst, std::fabs(a.samples[i].fidelity - b.samples[i].fidelity));
  }
  return {worst < 1e-10 && ts <= td / 10, "max_entry_diff=" + num(worst) + " dense=" + num(td) +
                                              "s sparse=" + num(ts) + "s ratio=" + num(ts / td)};
}

// 10. Jump trajectories reproduce the decay average
Outcome jump_vs_decay() {
  Circuit c{3, {}};
  const Gate cycle[] = {Gate::cnot(0, 1), Gate::cnot(1, 2), Gate::cnot(2, 0), Gate::cnot(0, 2)};
  for (int i = 0; i < 100; ++i) c.append(cycle[i % 4]);
  auto bench = make_custom_benchmark("cnot_chain", c);
  bench.initial_bits = 0b001;
  const auto e = Experiment::prepare(bench, 10);
  const double dec = 1e-3;
  const double f_decay = run_noisy(e, {}, {dec}, 1).final_fidelity();
  const std::size_t seeds = 400;
  std::vector<double> f(seeds);
  std::size_t emitted = 0;
  parallel_for(seeds, hardware_workers(), [&](std::size_t i) {
    f[i] = run_noisy(e, {}, {dec, DecayMode::Jump}, 1 + i).final_fidelity();
  });
  for (double v : f) emitted += v < 1 - 1e-9;
  const auto ci = t_interval(f);
  double ss = 0;
  for (double v : f) ss += (v - ci.mean) * (v - ci.mean);
  const double se = std::sqrt(ss / static_cast<double>(seeds - 1) / static_cast<double>(seeds));
  const bool pass = std::fabs(ci.mean - f_decay) <= 3 * se;
  return {pass, "pulses=" + std::to_string(e.schedule.pulse_count()) + " decay F=" + num(f_decay) +
                    " jump mean F=" + num(ci.mean) + " se=" + num(se) + " seeds=" + std::to_string(seeds) +
                    " trajectories_with_loss=" + std::to_string(emitted)};
}

// 11. Structural counts via `info`
Outcome structural_counts() {
  struct Want {
    const char* name;
    unsigned qubits;
    double pulses;
  };
  bool pass = true;
  std::string d;
  auto info = [](const std::string& name) {
    std::ostringstream out, err;
    const int code = run_cli({"info", name}, out, err);
    std::map<std::string, std::string> kv;
    std::istringstream in(out.str());
    std::string line;
    while (std::getline(in, line)) {
      const auto c = line.find(": ");
      if (c != std::string::npos) kv[line.substr(0, c)] = line.substr(c + 2);
    }
    kv["exit"] = std::to_string(code);
    return kv;
  };
  for (const Want& w : {Want{"grover", 13, 1838}, Want{"mult", 16, 8854}, Want{"factor15", 18, 70793}}) {
    auto kv = info(w.name);
    const double q = std::stod(kv["qubits"]), p = std::stod(kv["pulses"]);
    const bool ok = kv["exit"] == "0" && std::fabs(q - w.qubits) <= 2 && std::fabs(p - w.pulses) <= 0.25 * w.pulses;
    pass = pass && ok;
    d += std::string(w.name) + " " + kv["qubits"] + "q/" + kv["pulses"] + "p (target " + std::to_string(w.qubits) +
         "/" + num(w.pulses) + (ok ? ") " : ", out of range) ");
  }
  for (const char* n : {"factor21", "factor35", "factor57"}) {
    auto kv = info(n);
    const bool ok = kv["exit"] == "0" && !kv["pulses"].empty();
    pass = pass && ok;
    d += std::string(n) + " " + kv["qubits"] + "q/" + kv["pulses"] + "p ";
  }
  return {pass, d};
}

// 12. Byte-identical output across repeats and worker counts
Outcome determinism() {
  const std::string max_workers = std::to_string(std::max(2u, hardware_workers()));
  auto invoke = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return code == 0 ? out.str() : std::string("exit ") + std::to_string(code) + ": " + err.str();
  };
  const std::vector<std::vector<std::string>> commands = {
      {"run", "-b", "grover", "--sigma-theta", "pi/128", "--sigma-phi", "pi/128", "--dec", "1e-4", "--seeds",
       "1,2,3,4,5,6"},
      {"run", "-b", "grover", "--dec", "1e-3", "--dec-mode", "jump", "--mode", "sparse", "--seeds", "1,2,3,4"},
      {"sweep", "-b", "grover", "--sigma", "pi/256,pi/128", "--dec", "0,1e-4", "--omit-wall-time", "--max-runs", "16"},
      {"sweep", "-b", "grover", "--sigma", "pi/128", "--dec", "1e-4", "--correlate", "--omit-wall-time"},
  };
  bool pass = true;
  std::size_t bytes = 0;
  for (const auto& cmd : commands) {
    std::string first;
    for (const std::string& w : {std::string("1"), std::string("4"), max_workers, std::string("1")}) {
      auto args = cmd;
      args.insert(args.end(), {"--workers", w});
      const std::string got = invoke(args);
      if (first.empty()) {
        first = got;
        bytes += got.size();
        pass = pass && got.rfind("exit ", 0) != 0;
      } else {
        pass = pass && got == first;
      }
    }
  }
  return {pass, std::to_string(commands.size()) + " commands x workers {1,4," + max_workers +
                    ",1 again}, " + std::to_string(bytes) + " bytes compared"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"pulse algebra", pulse_algebra},
      {"gate tables", gate_tables},
      {"grover ideal", grover_ideal},
      {"grover under noise", grover_noise},
      {"phi cancellation", phi_cancellation},
      {"error-source ordering", error_ordering},
      {"decoherence", decoherence},
      {"correlation", correlation_bound},
      {"sparse/dense", sparse_dense},
      {"jump vs decay", jump_vs_decay},
      {"structural counts", structural_counts},
      {"determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %-22s %s  %s (%.1f s)\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
