#include "iontrap/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace iontrap {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trace_mode(const RunTrace& trace) {
  std::string m = to_string(trace.representation);
  if (trace.decoherence.mode == DecayMode::Jump) m += "-jump";
  return m;
}

void write_trace_header(std::ostream& os, bool with_success) {
  os << kTraceHeader;
  if (with_success) os << ",success_probability";
  os << '\n';
}

void write_trace_rows(std::ostream& os, const RunTrace& trace, bool with_success) {
  std::string prefix = trace.benchmark + "," + std::to_string(trace.seed) + "," +
                       format_number(trace.decoherence.dec) + "," + trace_mode(trace) + "," +
                       format_number(trace.error.mu_theta) + "," + format_number(trace.error.sigma_theta) +
                       "," + format_number(trace.error.mu_phi) + "," +
                       format_number(trace.error.sigma_phi) + ",";
  for (const TraceSample& s : trace.samples) {
    os << prefix << s.gate_index << ',' << s.pulse_index << ',' << format_number(s.fidelity) << ','
       << format_number(s.norm_sq);
    if (with_success) os << ',' << format_number(s.success_probability);
    os << '\n';
  }
}

void write_summary_header(std::ostream& os) { os << kSummaryHeader << '\n'; }

void write_summary_row(std::ostream& os, const SummaryRow& r) {
  os << r.benchmark << ',' << r.param_point << ',' << r.n_runs << ',' << format_number(r.mean_final_fidelity)
     << ',' << format_number(r.ci_low) << ',' << format_number(r.ci_high) << ','
     << format_number(r.error_rate_per_gate) << ',' << (r.omega_max ? format_number(*r.omega_max) : "")
     << ',' << (r.omega_avg ? format_number(*r.omega_avg) : "") << ',' << format_number(r.wall_seconds)
     << '\n';
}

std::string format_param_point(const ErrorModel& e, const DecoherenceModel& d) {
  return "mu_theta=" + format_angle(e.mu_theta) + ";sigma_theta=" + format_angle(e.sigma_theta) +
         ";mu_phi=" + format_angle(e.mu_phi) + ";sigma_phi=" + format_angle(e.sigma_phi) +
         ";dec=" + format_number(d.dec);
}

std::string trace_plot_script(const std::string& csv_path, const std::vector<std::size_t>& iteration_ends) {
  std::ostringstream os;
  os << "import csv\nimport collections\nimport matplotlib\nmatplotlib.use('Agg')\n"
        "import matplotlib.pyplot as plt\n\n"
     << "CSV = " << '"' << csv_path << '"' << "\nITERATION_ENDS = [";
  for (std::size_t i = 0; i < iteration_ends.size(); ++i) os << (i ? ", " : "") << iteration_ends[i];
  os << "]\n\n"
        "runs = collections.defaultdict(list)\n"
        "with open(CSV) as f:\n"
        "    for row in csv.DictReader(f):\n"
        "        runs[row['seed']].append(row)\n\n"
        "panels = 2 if ITERATION_ENDS else 1\n"
        "fig, axes = plt.subplots(1, panels, figsize=(6 * panels, 4), squeeze=False)\n"
        "ax = axes[0][0]\n"
        "for seed, rows in sorted(runs.items()):\n"
        "    ax.plot([int(r['gate_index']) for r in rows], [float(r['fidelity']) for r in rows],\n"
        "            label='seed ' + seed)\n"
        "ax.set_xlabel('Number of gates')\nax.set_ylabel('Fidelity')\nax.set_ylim(0, 1.05)\n"
        "ax.legend(fontsize='small')\n"
        "if ITERATION_ENDS:\n"
        "    ax = axes[0][1]\n"
        "    for seed, rows in sorted(runs.items()):\n"
        "        by_gate = {int(r['gate_index']): float(r['success_probability']) for r in rows}\n"
        "        its = [i + 1 for i, g in enumerate(ITERATION_ENDS) if g in by_gate]\n"
        "        ax.plot(its, [by_gate[ITERATION_ENDS[i - 1]] for i in its], marker='o',\n"
        "                label='seed ' + seed)\n"
        "    ax.set_xlabel('Iteration')\n    ax.set_ylabel('Probability')\n    ax.set_ylim(0, 1.05)\n"
        "fig.tight_layout()\n"
        "fig.savefig(CSV.rsplit('.', 1)[0] + '.png', dpi=120)\n";
  return os.str();
}

std::string summary_plot_script(const std::string& csv_path) {
  std::ostringstream os;
  os << "import csv\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
     << "CSV = " << '"' << csv_path << '"' << "\n\n"
     << "with open(CSV) as f:\n"
        "    rows = list(csv.DictReader(f))\n"
        "labels = [r['param_point'] for r in rows]\n"
        "mean = [float(r['mean_final_fidelity']) for r in rows]\n"
        "lo = [m - float(r['ci_low']) for m, r in zip(mean, rows)]\n"
        "hi = [float(r['ci_high']) - m for m, r in zip(mean, rows)]\n"
        "fig, ax = plt.subplots(figsize=(8, 4))\n"
        "ax.errorbar(range(len(rows)), mean, yerr=[lo, hi], fmt='o', capsize=3)\n"
        "ax.set_xticks(range(len(rows)))\n"
        "ax.set_xticklabels(labels, rotation=60, ha='right', fontsize='x-small')\n"
        "ax.set_ylabel('Final fidelity')\nax.set_ylim(0, 1.05)\n"
        "fig.tight_layout()\n"
        "fig.savefig(CSV.rsplit('.', 1)[0] + '.png', dpi=120)\n";
  return os.str();
}

}  // namespace iontrap
