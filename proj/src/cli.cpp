#include "iontrap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "iontrap/analysis.hpp"
#include "iontrap/benchmarks.hpp"
#include "iontrap/circuits.hpp"
#include "iontrap/csv.hpp"

namespace iontrap {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_angle(s));
  return out;
}

double parse_real(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("bad number '" + text + "'");
  }
  if (used != text.size()) throw UsageError("bad number '" + text + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_real(s));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& s : split_list(text)) {
    std::size_t used = 0;
    try {
      out.push_back(std::stoull(s, &used));
    } catch (const std::exception&) {
      throw UsageError("bad seed '" + s + "'");
    }
    if (used != s.size()) throw UsageError("bad seed '" + s + "'");
  }
  return out;
}

/// Turns `key=value` lines into `--key=value` arguments.
std::vector<std::string> config_arguments(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string benchmark;
  std::string circuit;
  std::string mode = "dense";
  std::string mu_theta = "0", sigma_theta = "0", mu_phi = "0", sigma_phi = "0";
  std::string dec = "0";
  std::string dec_mode = "decay";
  bool no_aux_decay = false;
  std::size_t stride = 10;
  std::string out = "-";
  unsigned workers = 0;
  double memory_cap_mb = 2048.0;
  bool allow_sparse_noise = false;
  std::string tables;
  bool emit_plot = false;
  std::string config;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--benchmark,-b", o.benchmark, "grover, mult, factor15, factor21, factor35, factor57");
  cmd->add_option("--circuit", o.circuit, "circuit text file instead of a named benchmark");
  cmd->add_option("--mode", o.mode, "dense or sparse")->check(CLI::IsMember({"dense", "sparse"}));
  cmd->add_option("--mu-theta", o.mu_theta, "mean theta error (radians or pi/k)");
  cmd->add_option("--sigma-theta", o.sigma_theta, "theta error standard deviation");
  cmd->add_option("--mu-phi", o.mu_phi, "mean phi error");
  cmd->add_option("--sigma-phi", o.sigma_phi, "phi error standard deviation");
  cmd->add_option("--dec", o.dec, "phonon decay per pulse");
  cmd->add_option("--dec-mode", o.dec_mode, "decay or jump")->check(CLI::IsMember({"decay", "jump"}));
  cmd->add_flag("--no-aux-decay", o.no_aux_decay, "decay phonon level 1 only");
  cmd->add_option("--stride", o.stride, "fidelity sample stride in gates");
  cmd->add_option("--out,-o", o.out, "output CSV path, - for stdout");
  cmd->add_option("--workers,-j", o.workers, "parallel runs (default: all cores)")->envname("IONTRAP_WORKERS");
  cmd->add_option("--memory-cap-mb", o.memory_cap_mb, "dense state memory cap");
  cmd->add_flag("--allow-sparse-noise", o.allow_sparse_noise,
                "permit operational error in sparse mode (slow, warns)");
  cmd->add_option("--tables", o.tables, "pulse table override file");
  cmd->add_flag("--emit-plot", o.emit_plot, "write a matplotlib script next to the CSV");
  cmd->add_option("--config", o.config, "key=value config file");
}

Representation parse_mode(const std::string& m) {
  return m == "sparse" ? Representation::Sparse : Representation::Dense;
}

PulseTableSet load_tables(const std::string& path) {
  PulseTableSet t = PulseTableSet::builtin();
  if (!path.empty()) t.load_overrides(read_file(path));
  return t;
}

BenchmarkCircuit load_benchmark(const CommonOptions& o) {
  if (!o.benchmark.empty() && !o.circuit.empty()) throw UsageError("give --benchmark or --circuit, not both");
  if (!o.circuit.empty()) {
    return make_custom_benchmark(std::filesystem::path(o.circuit).stem().string(),
                                 parse_circuit(read_file(o.circuit)));
  }
  if (o.benchmark.empty()) throw UsageError("--benchmark or --circuit is required");
  try {
    return make_benchmark(o.benchmark);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

RunOptions run_options(const CommonOptions& o) {
  RunOptions r;
  r.representation = parse_mode(o.mode);
  if (!(o.memory_cap_mb > 0)) throw UsageError("--memory-cap-mb must be positive");
  r.memory_cap_bytes = static_cast<std::size_t>(o.memory_cap_mb * 1024.0 * 1024.0);
  return r;
}

unsigned worker_count(const CommonOptions& o) { return o.workers > 0 ? o.workers : hardware_workers(); }

void check_sparse_noise(const CommonOptions& o, const ErrorModel& e, std::ostream& err) {
  if (parse_mode(o.mode) != Representation::Sparse || e.is_zero()) return;
  if (!o.allow_sparse_noise) {
    throw UsageError("sparse mode simulates decoherence alone; operational error needs --allow-sparse-noise");
  }
  err << "warning: operational error in sparse mode fills the state; expect dense-like cost\n";
}

DecoherenceModel decoherence_for(const CommonOptions& o, double dec) {
  DecoherenceModel d;
  d.dec = dec;
  d.mode = o.dec_mode == "jump" ? DecayMode::Jump : DecayMode::Decay;
  d.decay_aux = !o.no_aux_decay;
  d.validate();
  return d;
}

struct Output {
  std::ofstream file;
  std::ostream* stream;
  Output(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (path != "-") {
      file.open(path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + path + "'");
      stream = &file;
    }
  }
};

std::string plot_path(const std::string& csv) {
  std::filesystem::path p(csv);
  return (p.parent_path() / (p.stem().string() + "_plot.py")).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

// ---------------------------------------------------------------------------

int cmd_run(const CommonOptions& o, const std::string& seeds_text, std::ostream& out, std::ostream& err) {
  ErrorModel e{parse_angle(o.mu_theta), parse_angle(o.sigma_theta), parse_angle(o.mu_phi),
               parse_angle(o.sigma_phi)};
  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  const DecoherenceModel d = decoherence_for(o, parse_real(o.dec));
  check_sparse_noise(o, e, err);
  if (o.emit_plot && o.out == "-") throw UsageError("--emit-plot needs --out");
  const auto seeds = parse_seed_list(seeds_text);
  const PulseTableSet tables = validated(load_tables(o.tables));
  const Experiment exp = Experiment::prepare(load_benchmark(o), o.stride, tables);
  const RunOptions ropt = run_options(o);

  std::vector<RunTrace> traces(seeds.size());
  parallel_for(seeds.size(), worker_count(o),
               [&](std::size_t i) { traces[i] = run_noisy(exp, e, d, seeds[i], ropt); });

  const bool grover = !exp.bench.marked.empty();
  Output dst(o.out, out);
  write_trace_header(*dst.stream, grover);
  for (const RunTrace& t : traces) write_trace_rows(*dst.stream, t, grover);
  dst.stream->flush();
  for (const RunTrace& t : traces) {
    err << exp.bench.name << " seed " << t.seed << ": final fidelity " << format_number(t.final_fidelity())
        << " at gate " << t.endpoint;
    if (grover) err << ", peak success " << format_number(t.peak_success());
    if (d.mode == DecayMode::Jump) err << ", emissions " << t.emissions;
    err << '\n';
  }
  if (o.emit_plot) write_text(plot_path(o.out), trace_plot_script(o.out, exp.bench.iteration_ends));
  return kExitOk;
}

struct SweepOptions {
  std::string sigma, mu;
  bool correlate = false;
  double target_half_width = 0.0;
  std::size_t min_runs = 4, max_runs = 64;
  std::uint64_t base_seed = 1;
  std::size_t corr_seeds = 8;
  bool omit_wall_time = false;
};

int cmd_sweep(const CommonOptions& o, const SweepOptions& s, const std::vector<bool>& given,
              std::ostream& out, std::ostream& err) {
  // given: mu-theta, sigma-theta, mu-phi, sigma-phi, dec, sigma, mu
  if (std::none_of(given.begin(), given.end(), [](bool b) { return b; })) {
    throw UsageError("sweep needs at least one grid axis (--sigma, --mu, --sigma-theta, ..., --dec)");
  }
  if (given[5] && (given[1] || given[3])) throw UsageError("--sigma conflicts with --sigma-theta/--sigma-phi");
  if (given[6] && (given[0] || given[2])) throw UsageError("--mu conflicts with --mu-theta/--mu-phi");
  if (o.emit_plot && o.out == "-") throw UsageError("--emit-plot needs --out");
  if (s.min_runs < 1 || s.max_runs < s.min_runs) throw UsageError("need 1 <= --min-runs <= --max-runs");

  const auto mu_t = parse_angle_list(given[6] ? s.mu : o.mu_theta);
  const auto sig_t = parse_angle_list(given[5] ? s.sigma : o.sigma_theta);
  const auto mu_p = given[6] ? std::vector<double>{0.0} : parse_angle_list(o.mu_phi);
  const auto sig_p = given[5] ? std::vector<double>{0.0} : parse_angle_list(o.sigma_phi);
  const auto decs = parse_real_list(o.dec);

  std::vector<std::pair<ErrorModel, DecoherenceModel>> grid;
  for (double a : mu_t) {
    for (double b : sig_t) {
      for (double c : mu_p) {
        for (double dd : sig_p) {
          for (double dec : decs) {
            ErrorModel e{a, b, given[6] ? a : c, given[5] ? b : dd};
            try {
              e.validate();
            } catch (const std::invalid_argument& ex) {
              throw UsageError(ex.what());
            }
            grid.emplace_back(e, decoherence_for(o, dec));
          }
        }
      }
    }
  }
  for (const auto& [e, d] : grid) check_sparse_noise(o, e, err);

  const PulseTableSet tables = validated(load_tables(o.tables));
  const Experiment exp = Experiment::prepare(load_benchmark(o), o.stride, tables);
  const RunOptions ropt = run_options(o);
  const unsigned workers = worker_count(o);

  Output dst(o.out, out);
  write_summary_header(*dst.stream);
  for (const auto& [e, d] : grid) {
    const auto t0 = std::chrono::steady_clock::now();
    SummaryRow row;
    row.benchmark = exp.bench.name;
    row.param_point = format_param_point(e, d);
    if (s.correlate) {
      std::vector<std::uint64_t> seeds(s.corr_seeds);
      for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = s.base_seed + i;
      const CorrelationReport c = correlation(exp, e, d, seeds, workers, ropt);
      const ConfidenceInterval ci = t_interval(c.finals_both);
      row.n_runs = seeds.size();
      row.mean_final_fidelity = ci.mean;
      row.ci_low = ci.low;
      row.ci_high = ci.high;
      row.error_rate_per_gate = error_rate(c.gate_index, c.f_both, exp.stride, exp.bench.fidelity_endpoint).rate;
      row.omega_max = c.omega_max;
      row.omega_avg = c.omega_avg;
    } else {
      ReplicationOptions ro;
      ro.target_half_width = s.target_half_width > 0 ? s.target_half_width : default_half_width(e);
      ro.min_runs = s.min_runs;
      ro.max_runs = s.max_runs;
      ro.base_seed = s.base_seed;
      ro.workers = workers;
      ro.run = ropt;
      const ReplicationSummary r = replicate(exp, e, d, ro);
      if (r.capped) {
        err << "warning: " << row.param_point << " stopped at " << r.n_runs << " runs, half-width "
            << format_number(r.final_ci.half_width) << "\n";
      }
      row.n_runs = r.n_runs;
      row.mean_final_fidelity = r.final_ci.mean;
      row.ci_low = r.final_ci.low;
      row.ci_high = r.final_ci.high;
      row.error_rate_per_gate = error_rate(r, exp).rate;
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    row.wall_seconds = s.omit_wall_time ? 0.0 : dt.count();
    write_summary_row(*dst.stream, row);
    dst.stream->flush();
  }
  if (o.emit_plot) write_text(plot_path(o.out), summary_plot_script(o.out));
  return kExitOk;
}

int cmd_validate(const std::string& tables_path, std::ostream& out) {
  const PulseTableSet tables = load_tables(tables_path);
  const TableReport report = validate_tables(tables);
  for (const VariantReport& v : report.variants) {
    out << to_string(v.kind) << ": pulses=" << v.pulses << " max_deviation=" << format_number(v.max_deviation)
        << " max_leakage=" << format_number(v.max_leakage) << " global_phase=" << format_number(std::arg(v.global_phase))
        << " " << (v.passed ? "PASS" : "FAIL") << '\n';
  }
  if (!report.passed) {
    out << "table validation FAILED: " << report.failures() << '\n';
    return kExitFailure;
  }
  const PulseTableSet ok = validated(tables);
  bool pass = true;

  // Grover amplitude amplification against the closed form.
  {
    const Experiment exp = Experiment::prepare(make_benchmark("grover"), 0, ok);
    RunOptions ro;
    ro.representation = Representation::Sparse;
    const RunTrace t = run_noisy(exp, {}, {}, 1, ro);
    double worst = 0.0;
    std::size_t it = 0;
    for (const TraceSample& s : t.samples) {
      const auto pos = std::find(exp.bench.iteration_ends.begin(), exp.bench.iteration_ends.end(), s.gate_index);
      if (pos == exp.bench.iteration_ends.end()) continue;
      it = static_cast<std::size_t>(pos - exp.bench.iteration_ends.begin()) + 1;
      const double want = grover_success_closed_form(8, exp.bench.marked.size(), static_cast<unsigned>(it));
      worst = std::max(worst, std::fabs(s.success_probability - want));
    }
    const bool good = worst < 1e-9 && it == exp.bench.iteration_ends.size();
    out << "grover closed form: max_error=" << format_number(worst) << " " << (good ? "PASS" : "FAIL") << '\n';
    pass = pass && good;
  }
  // Controlled multiplication as a permutation of basis states.
  {
    const FactorSpec spec = FactorSpec::for_modulus(15);
    const ArithLayout lay{1, spec.L};
    const auto gates = controlled_modmult(lay, 0, spec.X, spec.N);
    std::size_t bad = 0;
    for (std::uint64_t ctl = 0; ctl < 2; ++ctl) {
      for (std::uint64_t y = 0; y < spec.N; ++y) {
        const std::uint64_t in = ctl | (y << lay.y(0));
        const std::uint64_t want = ctl ? (ctl | ((y * spec.X % spec.N) << lay.y(0))) : in;
        if (simulate_classical(gates, in).bits != want) ++bad;
      }
    }
    out << "modmult permutation (N=15, X=" << spec.X << "): mismatches=" << bad << " "
        << (bad == 0 ? "PASS" : "FAIL") << '\n';
    pass = pass && bad == 0;
  }
  return pass ? kExitOk : kExitFailure;
}

int cmd_info(const std::string& name, const CommonOptions& o, std::ostream& out) {
  std::vector<BenchmarkCircuit> benches;
  if (!o.circuit.empty() || !name.empty() || !o.benchmark.empty()) {
    CommonOptions copy = o;
    if (!name.empty()) copy.benchmark = name;
    benches.push_back(load_benchmark(copy));
  } else {
    for (const char* n : kBenchmarkNames) benches.push_back(make_benchmark(n));
  }
  const PulseTableSet tables = validated(load_tables(o.tables));
  const std::size_t cap = run_options(o).memory_cap_bytes;
  for (std::size_t i = 0; i < benches.size(); ++i) {
    const BenchmarkCircuit& b = benches[i];
    const PulseSchedule s = compile(b.circuit, tables);
    const std::size_t bytes = QuantumState::dense_bytes(b.circuit.num_qubits);
    if (i) out << '\n';
    out << "benchmark: " << b.name << '\n'
        << "qubits: " << b.circuit.num_qubits << '\n'
        << "gates: " << s.gate_count() << '\n'
        << "pulses: " << s.pulse_count() << '\n'
        << "pulses_per_gate: " << format_number(static_cast<double>(s.pulse_count()) / static_cast<double>(std::max<std::size_t>(1, s.gate_count()))) << '\n'
        << "fidelity_endpoint_gate: " << b.fidelity_endpoint << '\n'
        << "dense_bytes: " << bytes << '\n'
        << "dense_over_cap: " << (bytes > cap ? "yes" : "no") << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pulse-level trapped-ion quantum computer simulator"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  CommonOptions run_o, sweep_o, info_o;
  std::string seeds = "1";
  auto* run = app.add_subcommand("run", "simulate a benchmark and write a fidelity trace CSV");
  add_common(run, run_o);
  run->add_option("--seed,--seeds", seeds, "seed or comma-separated seeds");

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "replicated runs over a parameter grid, summary CSV");
  add_common(sweep, sweep_o);
  sweep->add_option("--sigma", sw.sigma, "joint sigma for theta and phi (list)");
  sweep->add_option("--mu", sw.mu, "joint mu for theta and phi (list)");
  sweep->add_flag("--correlate", sw.correlate, "paired-seed decoherence/operational correlation");
  sweep->add_option("--target-half-width", sw.target_half_width, "CI half-width target (default 0.02, 0.03 phi-only)");
  sweep->add_option("--min-runs", sw.min_runs, "minimum replications");
  sweep->add_option("--max-runs", sw.max_runs, "replication cap");
  sweep->add_option("--base-seed", sw.base_seed, "first seed");
  sweep->add_option("--corr-seeds", sw.corr_seeds, "seed count for --correlate");
  sweep->add_flag("--omit-wall-time", sw.omit_wall_time, "write 0 for wall_seconds (byte-stable output)");

  std::string tables_path, validate_config;
  auto* validate = app.add_subcommand("validate", "check pulse tables and benchmark structure");
  validate->add_option("--tables", tables_path, "pulse table override file");
  validate->add_option("--config", validate_config, "key=value config file");

  std::string info_name;
  auto* info = app.add_subcommand("info", "qubit, gate and pulse counts");
  info->add_option("name", info_name, "benchmark name");
  add_common(info, info_o);

  std::vector<std::string> args = args_in;
  try {
    // Splice config-file arguments in front of the command-line flags.
    for (std::size_t i = 1; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      } else {
        continue;
      }
      const auto extra = config_arguments(path);
      args.insert(args.begin() + 1, extra.begin(), extra.end());
      break;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_o, seeds, out, err);
    if (*sweep) {
      std::vector<bool> given;
      for (const char* n : {"--mu-theta", "--sigma-theta", "--mu-phi", "--sigma-phi", "--dec", "--sigma", "--mu"}) {
        given.push_back(sweep->get_option(n)->count() > 0);
      }
      return cmd_sweep(sweep_o, sw, given, out, err);
    }
    if (*validate) return cmd_validate(tables_path, out);
    if (*info) return cmd_info(info_name, info_o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace iontrap
