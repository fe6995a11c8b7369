#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "iontrap/analysis.hpp"

using namespace iontrap;

namespace {

Experiment classical_experiment() {
  Circuit c{4, {}};
  for (int i = 0; i < 6; ++i) {
    c.append(Gate::not_gate(0));
    c.append(Gate::cnot(0, 1));
    c.append(Gate::ccnot(0, 1, 2));
    c.append(Gate::cphase(2, 3, 0.4));
    c.append(Gate::cnot(2, 3));
  }
  return Experiment::prepare(make_custom_benchmark("classical", c), 5);
}

Experiment mixed_experiment() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Circuit c{4, {}};
  for (int i = 0; i < 40; ++i) {
    const unsigned a = rng() % 4, b = (a + 1 + rng() % 3) % 4;
    switch (i % 4) {
      case 0: c.append(Gate::rot(a, ang(rng), ang(rng))); break;
      case 1: c.append(Gate::cnot(a, b)); break;
      case 2: c.append(Gate::cphase(a, b, ang(rng))); break;
      default: c.append(Gate::not_gate(a)); break;
    }
  }
  return Experiment::prepare(make_custom_benchmark("mixed", c), 10);
}

}  // namespace

TEST(Fidelity, Examples) {
  auto zero = QuantumState::basis(1, 0, Representation::Dense);
  auto one = QuantumState::basis(1, 1, Representation::Dense);
  EXPECT_EQ(fidelity_at(zero, zero), 1.0);
  EXPECT_EQ(fidelity_at(zero, one), 0.0);
  auto plus = zero;
  plus.apply_pulse({PulseKind::V, 0, kPi / 2, kPi / 2, 0});
  EXPECT_NEAR(fidelity_at(plus, zero), 0.5, 1e-15);
}

TEST(RunNoisy, ZeroErrorIsPerfect) {
  const auto exp = mixed_experiment();
  for (auto rep : {Representation::Dense, Representation::Sparse}) {
    const auto t = run_noisy(exp, {}, {}, 1, {rep});
    ASSERT_EQ(t.samples.size(), exp.reference.snapshots.size());
    for (const auto& s : t.samples) {
      EXPECT_NEAR(s.fidelity, 1.0, 1e-12);
      EXPECT_NEAR(s.norm_sq, 1.0, 1e-12);
    }
    EXPECT_EQ(t.samples.back().gate_index, 40u);
  }
}

TEST(RunNoisy, DenseAndSparseAgreeUnderNoise) {
  const auto exp = mixed_experiment();
  const ErrorModel err{0, kPi / 64, 0, kPi / 64};
  const auto d = run_noisy(exp, err, {1e-3}, 9, {Representation::Dense});
  const auto s = run_noisy(exp, err, {1e-3}, 9, {Representation::Sparse});
  ASSERT_EQ(d.samples.size(), s.samples.size());
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    EXPECT_NEAR(d.samples[i].fidelity, s.samples[i].fidelity, 1e-10);
    EXPECT_NEAR(d.samples[i].norm_sq, s.samples[i].norm_sq, 1e-10);
  }
  EXPECT_LT(d.final_fidelity(), 1.0);
}

TEST(RunNoisy, SameSeedSameTrace) {
  const auto exp = mixed_experiment();
  const ErrorModel err{0, kPi / 32, 0, 0};
  const auto a = run_noisy(exp, err, {}, 4);
  const auto b = run_noisy(exp, err, {}, 4);
  const auto c = run_noisy(exp, err, {}, 5);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].fidelity, b.samples[i].fidelity);
  EXPECT_NE(a.final_fidelity(), c.final_fidelity());
}

TEST(RunNoisy, FidelityEqualsNormForBasisStateInputs) {
  // Only decoherence, single computational branch: the decayed state stays
  // proportional to the reference at every gate boundary.
  const auto exp = classical_experiment();
  const auto t = run_noisy(exp, {}, {2e-3}, 1);
  double prev = 1.0;
  for (const auto& s : t.samples) {
    EXPECT_NEAR(s.fidelity, s.norm_sq, 1e-12) << s.gate_index;
    EXPECT_LE(s.norm_sq, prev);
    prev = s.norm_sq;
  }
  EXPECT_LT(prev, 1.0);
}

TEST(RunNoisy, FidelityBounded) {
  const auto exp = mixed_experiment();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = run_noisy(exp, {kPi / 256, kPi / 16, 0, kPi / 16}, {5e-3}, seed);
    for (const auto& s : t.samples) {
      EXPECT_GE(s.fidelity, 0.0);
      EXPECT_LE(s.fidelity, s.norm_sq + 1e-12);
      EXPECT_LE(s.norm_sq, 1.0 + 1e-12);
    }
  }
}

TEST(RunNoisy, JumpModeKeepsNormalised) {
  const auto exp = mixed_experiment();
  DecoherenceModel dec{0.05, DecayMode::Jump};
  std::size_t emissions = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto t = run_noisy(exp, {}, dec, seed);
    emissions += t.emissions;
    for (const auto& s : t.samples) EXPECT_NEAR(s.norm_sq, 1.0, 1e-9);
  }
  EXPECT_GT(emissions, 0u);
}

TEST(RunNoisy, CapacityError) {
  const auto exp = mixed_experiment();
  EXPECT_THROW(run_noisy(exp, {}, {}, 1, {Representation::Dense, 64}), CapacityError);
}

TEST(RunNoisy, GroverSuccessAtIterations) {
  const auto exp = Experiment::prepare(build_grover(GroverInstance::from_marked(4, {6}, 4)), 1000);
  const auto t = run_noisy(exp, {}, {}, 1);
  std::size_t seen = 0;
  for (const auto& s : t.samples) {
    if (s.iteration == 0) continue;
    ++seen;
    EXPECT_NEAR(s.success_probability, grover_success_closed_form(4, 1, static_cast<unsigned>(s.iteration)), 1e-9);
  }
  EXPECT_EQ(seen, 4u);
  EXPECT_NEAR(t.peak_success(), grover_success_closed_form(4, 1, 3), 1e-9);
}

TEST(Stats, StudentT) {
  const std::vector<double> v = {0, 1, 2, 3};
  const auto ci = t_interval(v);
  EXPECT_DOUBLE_EQ(ci.mean, 1.5);
  // t_{0.975, 3} = 3.182446305 from published tables.
  EXPECT_NEAR(ci.half_width, 3.182446305 * std::sqrt(5.0 / 3.0) / 2.0, 1e-8);
  EXPECT_EQ(t_interval(std::vector<double>{0.3}).half_width, 0.0);
  EXPECT_EQ(t_interval(std::vector<double>{}).mean, 0.0);
}

TEST(Stats, CoverageByResampling) {
  // Monte Carlo oracle: the 95% interval should cover the true mean ~95% of the time.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.7, 0.1);
  const int reps = 4000;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> v(5);
    for (auto& x : v) x = g(rng);
    const auto ci = t_interval(v);
    if (ci.low <= 0.7 && 0.7 <= ci.high) ++covered;
  }
  EXPECT_NEAR(covered / double(reps), 0.95, 4 * std::sqrt(0.95 * 0.05 / reps));
}

TEST(Stats, DefaultHalfWidth) {
  EXPECT_EQ(default_half_width({0, 0, 0, kPi / 64}), 0.03);
  EXPECT_EQ(default_half_width({0, kPi / 64, 0, 0}), 0.02);
  EXPECT_EQ(default_half_width({0, kPi / 64, 0, kPi / 64}), 0.02);
}

TEST(Replicate, DegenerateSingleRun) {
  const auto exp = mixed_experiment();
  ReplicationOptions o;
  const auto r = replicate(exp, {kPi / 128, 0, 0, 0}, {1e-3}, o);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.n_runs, 1u);
  EXPECT_EQ(r.finals.size(), 1u);
  EXPECT_EQ(r.ci_low, r.mean_fidelity);
}

TEST(Replicate, StochasticRespectsMinRunsAndIsWorkerIndependent) {
  const auto exp = mixed_experiment();
  const ErrorModel err{0, kPi / 64, 0, 0};
  ReplicationOptions o;
  o.workers = 1;
  const auto a = replicate(exp, err, {}, o);
  o.workers = 3;
  const auto b = replicate(exp, err, {}, o);
  EXPECT_FALSE(a.degenerate);
  EXPECT_GE(a.n_runs, 4u);
  EXPECT_EQ(a.n_runs, b.n_runs);
  EXPECT_EQ(a.finals, b.finals);
  EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
  EXPECT_EQ(a.ci_low, b.ci_low);
  if (!a.capped) EXPECT_LE(a.final_ci.half_width, o.target_half_width);
  for (std::size_t i = 0; i < a.gate_index.size(); ++i) {
    EXPECT_LE(a.ci_low[i], a.mean_fidelity[i]);
    EXPECT_GE(a.ci_high[i], a.mean_fidelity[i]);
  }
}

TEST(Replicate, CapsAtMaxRuns) {
  const auto exp = mixed_experiment();
  ReplicationOptions o;
  o.target_half_width = 1e-9;
  o.max_runs = 6;
  const auto r = replicate(exp, {0, kPi / 16, 0, kPi / 16}, {}, o);
  EXPECT_TRUE(r.capped);
  EXPECT_EQ(r.n_runs, 6u);
}

TEST(ErrorRate, Synthetic) {
  const std::vector<std::size_t> g = {5, 10, 20, 25, 30};
  const std::vector<double> f = {0.99, 0.9, 0.8, 0.7, 0.1};
  const auto r = error_rate(g, f, 10, 25);
  EXPECT_EQ(r.samples, 2u);
  EXPECT_NEAR(r.rate, (0.1 / 10 + 0.2 / 20) / 2, 1e-15);
  EXPECT_EQ(error_rate(g, f, 10, 5).samples, 0u);
}

TEST(ErrorRate, LinearInSmallDecay) {
  const auto exp = classical_experiment();
  const double r1 = error_rate(run_noisy(exp, {}, {1e-6}, 1), exp).rate;
  const double r2 = error_rate(run_noisy(exp, {}, {1e-5}, 1), exp).rate;
  EXPECT_GT(r1, 0.0);
  EXPECT_NEAR(r2 / r1, 10.0, 0.05);
  EXPECT_NEAR(error_rate(run_noisy(exp, {}, {1e-6}, 1), exp).pulses_per_gate, exp.pulses_per_gate(), 0);
}

TEST(Correlation, VanishesWithSingleSource) {
  const auto exp = mixed_experiment();
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const auto no_op = correlation(exp, {}, {1e-3}, seeds);
  for (double w : no_op.omega) EXPECT_NEAR(w, 0.0, 1e-12);
  const auto no_dec = correlation(exp, {0, kPi / 32, 0, 0}, {}, seeds);
  for (double w : no_dec.omega) EXPECT_NEAR(w, 0.0, 1e-12);
  EXPECT_NEAR(no_dec.omega_max, 0.0, 1e-12);
}

TEST(Correlation, PairedAndReproducible) {
  const auto exp = mixed_experiment();
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  const ErrorModel err{0, kPi / 32, 0, kPi / 32};
  const auto a = correlation(exp, err, {2e-3}, seeds, 1);
  const auto b = correlation(exp, err, {2e-3}, seeds, 2);
  EXPECT_EQ(a.omega, b.omega);
  EXPECT_EQ(a.finals_both, b.finals_both);
  EXPECT_EQ(a.n_seeds, 4u);
  ASSERT_EQ(a.omega.size(), a.gate_index.size());
  for (std::size_t i = 0; i < a.omega.size(); ++i) {
    EXPECT_NEAR(a.omega[i], a.f_both[i] - a.f_dec[i] * a.f_op[i], 1e-12);
  }
  double mx = 0;
  for (std::size_t i = 0; i < a.omega.size(); ++i) {
    if (a.gate_index[i] <= exp.bench.fidelity_endpoint) mx = std::max(mx, std::fabs(a.omega[i]));
  }
  EXPECT_EQ(a.omega_max, mx);
}

TEST(Parallel, CoversAllIndices) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Parallel, RethrowsLowestFailure) {
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}
