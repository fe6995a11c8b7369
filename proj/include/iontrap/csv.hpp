#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iontrap/analysis.hpp"

namespace iontrap {

/// 12 significant digits, `nan` for NaN.
std::string format_number(double v);

inline constexpr const char* kTraceHeader =
    "benchmark,seed,dec,mode,mu_theta,sigma_theta,mu_phi,sigma_phi,gate_index,pulse_index,fidelity,"
    "norm_sq";
inline constexpr const char* kSummaryHeader =
    "benchmark,param_point,n_runs,mean_final_fidelity,ci_low,ci_high,error_rate_per_gate,omega_max,"
    "omega_avg,wall_seconds";

/// `dense` / `sparse`, with a `-jump` suffix in quantum-jump mode.
std::string trace_mode(const RunTrace& trace);

/// Grover traces carry an extra trailing success_probability column.
void write_trace_header(std::ostream& os, bool with_success);
void write_trace_rows(std::ostream& os, const RunTrace& trace, bool with_success);

struct SummaryRow {
  std::string benchmark;
  std::string param_point;
  std::size_t n_runs = 0;
  double mean_final_fidelity = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double error_rate_per_gate = 0.0;
  std::optional<double> omega_max;  ///< empty unless correlation was requested
  std::optional<double> omega_avg;
  double wall_seconds = 0.0;
};

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const SummaryRow& row);

/// `mu_theta=...;sigma_theta=...;mu_phi=...;sigma_phi=...;dec=...`
std::string format_param_point(const ErrorModel& error, const DecoherenceModel& decoherence);

/// matplotlib script plotting fidelity against gate count from a trace CSV;
/// Grover traces also get success probability against iteration.
std::string trace_plot_script(const std::string& csv_path, const std::vector<std::size_t>& iteration_ends);

/// matplotlib script plotting mean final fidelity with its CI per grid point.
std::string summary_plot_script(const std::string& csv_path);

}  // namespace iontrap
