#include "iontrap/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace iontrap {

Experiment Experiment::prepare(BenchmarkCircuit bench, std::size_t stride, const PulseTableSet& tables) {
  Experiment e;
  e.schedule = compile(bench.circuit, tables);
  e.reference = reference_trace(bench, e.schedule, stride);
  e.stride = stride;
  e.bench = std::move(bench);
  return e;
}

double Experiment::pulses_per_gate() const {
  return schedule.gate_count() == 0
             ? 0.0
             : static_cast<double>(schedule.pulse_count()) / static_cast<double>(schedule.gate_count());
}

double RunTrace::final_fidelity() const {
  for (const TraceSample& s : samples) {
    if (s.gate_index == endpoint) return s.fidelity;
  }
  return samples.empty() ? std::numeric_limits<double>::quiet_NaN() : samples.back().fidelity;
}

double RunTrace::peak_success() const {
  double best = 0.0;
  for (const TraceSample& s : samples) {
    if (s.iteration > 0) best = std::max(best, s.success_probability);
  }
  return best;
}

double fidelity_at(const QuantumState& noisy, const QuantumState& reference) {
  return std::norm(inner_product(reference, noisy));
}

RunTrace run_noisy(const Experiment& exp, const ErrorModel& error, const DecoherenceModel& decoherence,
                   std::uint64_t seed, const RunOptions& options) {
  error.validate();
  decoherence.validate();
  RunTrace trace;
  trace.benchmark = exp.bench.name;
  trace.error = error;
  trace.decoherence = decoherence;
  trace.seed = seed;
  trace.representation = options.representation;
  trace.endpoint = exp.bench.fidelity_endpoint;

  const NoiseStream stream(seed);
  const bool perturbed = !error.is_zero();
  const bool grover = !exp.bench.marked.empty();
  QuantumState state = QuantumState::basis(exp.schedule.num_qubits, exp.bench.initial_bits,
                                           options.representation, options.memory_cap_bytes);
  const auto& snaps = exp.reference.snapshots;
  std::size_t next = 0;
  std::uint64_t pulse = 0;
  for (std::size_t g = 0; g < exp.schedule.gate_count() && next < snaps.size(); ++g) {
    for (; pulse < exp.schedule.gate_end[g]; ++pulse) {
      const PulseOp& ideal = exp.schedule.pulses[pulse];
      state.apply_pulse(perturbed ? perturb(ideal, error, stream) : ideal);
      if (decoherence.dec > 0.0) {
        if (decoherence.mode == DecayMode::Decay) {
          state.apply_decay(decoherence.dec, decoherence.decay_aux);
        } else if (jump_step(state, decoherence.dec, stream, pulse, decoherence.decay_aux)) {
          ++trace.emissions;
        }
      }
    }
    if (g + 1 == snaps[next].gate_index) {
      TraceSample s;
      s.gate_index = g + 1;
      s.pulse_index = pulse;
      s.fidelity = fidelity_at(state, snaps[next].state);
      s.norm_sq = state.norm_sq();
      if (grover) {
        s.success_probability = marked_probability(state, exp.bench);
        const auto& ends = exp.bench.iteration_ends;
        const auto it = std::lower_bound(ends.begin(), ends.end(), s.gate_index);
        if (it != ends.end() && *it == s.gate_index) s.iteration = static_cast<std::size_t>(it - ends.begin()) + 1;
      }
      trace.samples.push_back(s);
      ++next;
    }
  }
  if (options.keep_final_state) trace.final_state = std::move(state);
  return trace;
}

// ---------------------------------------------------------------------------

ConfidenceInterval t_interval(std::span<const double> values, double confidence) {
  ConfidenceInterval ci;
  const std::size_t n = values.size();
  if (n == 0) return ci;
  double sum = 0.0;
  for (double v : values) sum += v;
  ci.mean = sum / static_cast<double>(n);
  ci.low = ci.high = ci.mean;
  if (n < 2) return ci;
  double ss = 0.0;
  for (double v : values) ss += (v - ci.mean) * (v - ci.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  ci.half_width = t * sd / std::sqrt(static_cast<double>(n));
  ci.low = ci.mean - ci.half_width;
  ci.high = ci.mean + ci.half_width;
  return ci;
}

double default_half_width(const ErrorModel& error) {
  const bool theta_quiet = error.mu_theta == 0.0 && error.sigma_theta == 0.0;
  return theta_quiet && error.sigma_phi > 0.0 ? 0.03 : 0.02;
}

double ReplicationSummary::peak_success(std::size_t* iteration) const {
  double best = -1.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < mean_success.size(); ++i) {
    if (mean_success[i] > best) {
      best = mean_success[i];
      at = i;
    }
  }
  if (iteration) *iteration = at + 1;
  return best;
}

namespace {

double metric_of(const RunTrace& t, ReplicationMetric m) {
  return m == ReplicationMetric::PeakSuccess ? t.peak_success() : t.final_fidelity();
}

void aggregate(ReplicationSummary& s, const Experiment& exp, ReplicationMetric metric) {
  const std::size_t n = s.runs.size();
  const std::size_t pts = s.runs.front().samples.size();
  s.gate_index.assign(pts, 0);
  s.pulse_index.assign(pts, 0);
  s.mean_fidelity.assign(pts, 0.0);
  s.ci_low.assign(pts, 0.0);
  s.ci_high.assign(pts, 0.0);
  s.mean_norm_sq.assign(pts, 0.0);
  std::vector<double> column(n);
  for (std::size_t p = 0; p < pts; ++p) {
    s.gate_index[p] = s.runs[0].samples[p].gate_index;
    s.pulse_index[p] = s.runs[0].samples[p].pulse_index;
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      column[r] = s.runs[r].samples[p].fidelity;
      norm += s.runs[r].samples[p].norm_sq;
    }
    const ConfidenceInterval ci = t_interval(column);
    s.mean_fidelity[p] = ci.mean;
    s.ci_low[p] = ci.low;
    s.ci_high[p] = ci.high;
    s.mean_norm_sq[p] = norm / static_cast<double>(n);
  }
  // Success probability at each Grover iteration end.
  s.mean_success.clear();
  for (std::size_t end : exp.bench.iteration_ends) {
    for (std::size_t p = 0; p < pts; ++p) {
      if (s.gate_index[p] != end) continue;
      double sum = 0.0;
      for (std::size_t r = 0; r < n; ++r) sum += s.runs[r].samples[p].success_probability;
      s.mean_success.push_back(sum / static_cast<double>(n));
    }
  }
  s.finals.resize(n);
  for (std::size_t r = 0; r < n; ++r) s.finals[r] = s.runs[r].final_fidelity();
  s.final_ci = t_interval(s.finals);
  s.metric_values.resize(n);
  for (std::size_t r = 0; r < n; ++r) s.metric_values[r] = metric_of(s.runs[r], metric);
  s.metric_ci = t_interval(s.metric_values);
  s.n_runs = n;
  s.endpoint = exp.bench.fidelity_endpoint;
}

}  // namespace

ReplicationSummary replicate(const Experiment& exp, const ErrorModel& error,
                             const DecoherenceModel& decoherence, const ReplicationOptions& options) {
  if (options.min_runs < 1 || options.max_runs < options.min_runs) {
    throw std::invalid_argument("replicate: need 1 <= min_runs <= max_runs");
  }
  ReplicationSummary s;
  s.target_half_width = options.target_half_width;
  const bool stochastic =
      error.is_stochastic() || (decoherence.mode == DecayMode::Jump && decoherence.dec > 0.0);
  if (!stochastic) {
    s.degenerate = true;
    s.runs.push_back(run_noisy(exp, error, decoherence, options.base_seed, options.run));
    aggregate(s, exp, options.metric);
    return s;
  }

  const unsigned workers = std::max(1u, options.workers);
  std::vector<RunTrace> runs;
  std::size_t decided = 0;  // smallest n whose interval met the target
  std::size_t checked = options.min_runs - 1;
  while (decided == 0 && runs.size() < options.max_runs) {
    const std::size_t want =
        runs.empty() ? std::max<std::size_t>(options.min_runs, workers) : runs.size() + workers;
    const std::size_t target = std::min(want, options.max_runs);
    const std::size_t start = runs.size();
    runs.resize(target);
    parallel_for(target - start, workers, [&](std::size_t i) {
      runs[start + i] = run_noisy(exp, error, decoherence, options.base_seed + start + i, options.run);
    });
    std::vector<double> finals;
    for (std::size_t n = 1; n <= runs.size(); ++n) {
      finals.push_back(metric_of(runs[n - 1], options.metric));
      if (n <= checked) continue;
      checked = n;
      if (n >= options.min_runs && t_interval(finals).half_width <= options.target_half_width) {
        decided = n;
        break;
      }
    }
  }
  if (decided == 0) {
    s.capped = true;
    decided = runs.size();
  }
  runs.resize(decided);
  s.runs = std::move(runs);
  aggregate(s, exp, options.metric);
  return s;
}

// ---------------------------------------------------------------------------

ErrorRateReport error_rate(std::span<const std::size_t> gate_index, std::span<const double> fidelity,
                           std::size_t stride, std::size_t endpoint) {
  if (gate_index.size() != fidelity.size()) throw std::invalid_argument("error_rate: size mismatch");
  ErrorRateReport r;
  double sum = 0.0;
  for (std::size_t i = 0; i < gate_index.size(); ++i) {
    const std::size_t g = gate_index[i];
    if (g == 0 || g > endpoint || (stride > 0 && g % stride != 0)) continue;
    sum += (1.0 - fidelity[i]) / static_cast<double>(g);
    ++r.samples;
  }
  r.rate = r.samples ? sum / static_cast<double>(r.samples) : 0.0;
  return r;
}

ErrorRateReport error_rate(const RunTrace& trace, const Experiment& exp) {
  std::vector<std::size_t> g;
  std::vector<double> f;
  for (const TraceSample& s : trace.samples) {
    g.push_back(s.gate_index);
    f.push_back(s.fidelity);
  }
  ErrorRateReport r = error_rate(g, f, exp.stride, exp.bench.fidelity_endpoint);
  r.pulses_per_gate = exp.pulses_per_gate();
  return r;
}

ErrorRateReport error_rate(const ReplicationSummary& summary, const Experiment& exp) {
  ErrorRateReport r =
      error_rate(summary.gate_index, summary.mean_fidelity, exp.stride, exp.bench.fidelity_endpoint);
  r.pulses_per_gate = exp.pulses_per_gate();
  return r;
}

// ---------------------------------------------------------------------------

CorrelationReport correlation(const Experiment& exp, const ErrorModel& error,
                              const DecoherenceModel& decoherence, std::span<const std::uint64_t> seeds,
                              unsigned workers, const RunOptions& options) {
  if (seeds.empty()) throw std::invalid_argument("correlation: no seeds");
  const std::size_t n = seeds.size();
  const bool dec_stochastic = decoherence.mode == DecayMode::Jump && decoherence.dec > 0.0;
  const std::size_t dec_legs = dec_stochastic ? n : 1;
  const DecoherenceModel no_dec{0.0, decoherence.mode, decoherence.decay_aux};

  std::vector<RunTrace> dec_runs(dec_legs), op_runs(n), both_runs(n);
  RunOptions dec_opts = options;
  if (!dec_stochastic) dec_opts.representation = Representation::Sparse;
  parallel_for(dec_legs + 2 * n, workers, [&](std::size_t i) {
    if (i < dec_legs) {
      dec_runs[i] = run_noisy(exp, ErrorModel{}, decoherence, seeds[i], dec_opts);
    } else if (i < dec_legs + n) {
      op_runs[i - dec_legs] = run_noisy(exp, error, no_dec, seeds[i - dec_legs], options);
    } else {
      both_runs[i - dec_legs - n] = run_noisy(exp, error, decoherence, seeds[i - dec_legs - n], options);
    }
  });

  CorrelationReport rep;
  rep.n_seeds = n;
  const std::size_t pts = op_runs[0].samples.size();
  std::size_t counted = 0;
  for (std::size_t p = 0; p < pts; ++p) {
    double fb = 0.0, fo = 0.0, fd = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      fb += both_runs[r].samples[p].fidelity;
      fo += op_runs[r].samples[p].fidelity;
    }
    for (std::size_t r = 0; r < dec_legs; ++r) fd += dec_runs[r].samples[p].fidelity;
    fb /= static_cast<double>(n);
    fo /= static_cast<double>(n);
    fd /= static_cast<double>(dec_legs);
    const double omega = fb - fd * fo;
    const std::size_t g = op_runs[0].samples[p].gate_index;
    rep.gate_index.push_back(g);
    rep.f_both.push_back(fb);
    rep.f_op.push_back(fo);
    rep.f_dec.push_back(fd);
    rep.omega.push_back(omega);
    if (g <= exp.bench.fidelity_endpoint) {
      rep.omega_max = std::max(rep.omega_max, std::fabs(omega));
      rep.omega_avg += std::fabs(omega);
      ++counted;
    }
  }
  if (counted) rep.omega_avg /= static_cast<double>(counted);
  for (const RunTrace& t : both_runs) rep.finals_both.push_back(t.final_fidelity());
  return rep;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

unsigned hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace iontrap
