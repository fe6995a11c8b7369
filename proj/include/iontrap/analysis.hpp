#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iontrap/benchmarks.hpp"
#include "iontrap/circuits.hpp"
#include "iontrap/noise.hpp"
#include "iontrap/state.hpp"

namespace iontrap {

/// A compiled benchmark with its zero-error reference, shared read-only by
/// every noisy run.
struct Experiment {
  BenchmarkCircuit bench;
  PulseSchedule schedule;
  ReferenceTrace reference;
  std::size_t stride = 10;

  static Experiment prepare(BenchmarkCircuit bench, std::size_t stride = 10,
                            const PulseTableSet& tables = default_tables());

  double pulses_per_gate() const;
};

struct RunOptions {
  Representation representation = Representation::Dense;
  std::size_t memory_cap_bytes = kDefaultMemoryCapBytes;
  bool keep_final_state = false;
};

struct TraceSample {
  std::size_t gate_index = 0;
  std::uint64_t pulse_index = 0;
  double fidelity = 0.0;
  double norm_sq = 0.0;
  double success_probability = 0.0;  ///< marked-key probability, Grover only
  std::size_t iteration = 0;         ///< Grover iteration completed here, 0 if none
};

struct RunTrace {
  std::string benchmark;
  ErrorModel error;
  DecoherenceModel decoherence;
  std::uint64_t seed = 0;
  Representation representation = Representation::Dense;
  std::size_t endpoint = 0;
  std::size_t emissions = 0;
  std::vector<TraceSample> samples;
  std::optional<QuantumState> final_state;

  /// Fidelity at the endpoint gate (pre-QFT for factoring circuits).
  double final_fidelity() const;
  /// Largest success probability over the Grover iteration checkpoints.
  double peak_success() const;
};

/// |<reference|noisy>|^2
double fidelity_at(const QuantumState& noisy, const QuantumState& reference);

/// Perturbs each pulse, applies it, then applies decay (or a jump step), and
/// records fidelity against the reference at every snapshot.
RunTrace run_noisy(const Experiment& exp, const ErrorModel& error, const DecoherenceModel& decoherence,
                   std::uint64_t seed, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Replication

struct ConfidenceInterval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
  double half_width = 0.0;
};

/// Student-t interval on the sample mean; zero width for n < 2.
ConfidenceInterval t_interval(std::span<const double> values, double confidence = 0.95);

/// 0.03 when only phi is perturbed, 0.02 otherwise.
double default_half_width(const ErrorModel& error);

/// Quantity whose confidence interval drives the stopping rule.
enum class ReplicationMetric { FinalFidelity, PeakSuccess };

struct ReplicationOptions {
  double target_half_width = 0.02;
  ReplicationMetric metric = ReplicationMetric::FinalFidelity;
  std::size_t min_runs = 4;
  std::size_t max_runs = 64;
  std::uint64_t base_seed = 1;  ///< run i uses seed base_seed + i
  unsigned workers = 1;
  RunOptions run;
};

struct ReplicationSummary {
  std::vector<std::size_t> gate_index;
  std::vector<std::uint64_t> pulse_index;
  std::vector<double> mean_fidelity;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<double> mean_norm_sq;
  std::vector<double> mean_success;
  std::vector<double> finals;  ///< final fidelity per run, seed order
  ConfidenceInterval final_ci;
  std::vector<double> metric_values;  ///< stopping-rule metric per run
  ConfidenceInterval metric_ci;
  std::size_t endpoint = 0;
  std::size_t n_runs = 0;
  double target_half_width = 0.0;
  bool degenerate = false;  ///< deterministic configuration, one run
  bool capped = false;      ///< max_runs reached before the target width
  std::vector<RunTrace> runs;

  /// Mean-trace success probability peak and its iteration (1-based).
  double peak_success(std::size_t* iteration = nullptr) const;
};

/// Seeded runs, at least min_runs, until the 95% CI half-width of the final
/// fidelity is within the target. Runs are evaluated in seed order so the
/// result does not depend on the worker count.
ReplicationSummary replicate(const Experiment& exp, const ErrorModel& error,
                             const DecoherenceModel& decoherence, const ReplicationOptions& options);

// ---------------------------------------------------------------------------
// Error rate

struct ErrorRateReport {
  double rate = 0.0;  ///< mean of (1 - F) / gates over stride samples
  std::size_t samples = 0;
  double pulses_per_gate = 0.0;
};

/// Uses samples whose gate index is a multiple of `stride` and not past
/// `endpoint`.
ErrorRateReport error_rate(std::span<const std::size_t> gate_index, std::span<const double> fidelity,
                           std::size_t stride, std::size_t endpoint);
ErrorRateReport error_rate(const RunTrace& trace, const Experiment& exp);
ErrorRateReport error_rate(const ReplicationSummary& summary, const Experiment& exp);

// ---------------------------------------------------------------------------
// Correlation

struct CorrelationReport {
  std::vector<std::size_t> gate_index;
  std::vector<double> f_both;
  std::vector<double> f_dec;
  std::vector<double> f_op;
  std::vector<double> omega;
  double omega_max = 0.0;  ///< max |omega| up to the endpoint
  double omega_avg = 0.0;  ///< mean |omega| up to the endpoint
  std::size_t n_seeds = 0;
  std::vector<double> finals_both;  ///< combined-leg final fidelity per seed
};

/// Paired design: for each seed, an op-only and a combined run share the
/// operational noise draws. The decoherence-only leg runs once, in sparse
/// mode, unless jump mode makes it seed dependent.
/// omega = mean F_both - F_dec * mean F_op.
CorrelationReport correlation(const Experiment& exp, const ErrorModel& error,
                              const DecoherenceModel& decoherence, std::span<const std::uint64_t> seeds,
                              unsigned workers = 1, const RunOptions& options = {});

// ---------------------------------------------------------------------------

/// Calls fn(i) for i in [0, n) on up to `workers` threads; exceptions are
/// rethrown on the caller (the lowest failing index wins).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

unsigned hardware_workers();

}  // namespace iontrap
