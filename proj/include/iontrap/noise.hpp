#pragma once

#include <array>
#include <cstdint>

#include "iontrap/state.hpp"
#include "iontrap/types.hpp"

namespace iontrap {

/// Gaussian perturbation of the pulse angles. Non-zero mu models calibration
/// offsets, non-zero sigma models laser noise.
struct ErrorModel {
  double mu_theta = 0.0;
  double sigma_theta = 0.0;
  double mu_phi = 0.0;
  double sigma_phi = 0.0;

  bool is_zero() const {
    return mu_theta == 0.0 && sigma_theta == 0.0 && mu_phi == 0.0 && sigma_phi == 0.0;
  }
  bool is_stochastic() const { return sigma_theta > 0.0 || sigma_phi > 0.0; }
  void validate() const;
};

enum class DecayMode { Decay, Jump };

const char* to_string(DecayMode m);

struct DecoherenceModel {
  double dec = 0.0;  ///< amplitude decay exponent per laser pulse
  DecayMode mode = DecayMode::Decay;
  bool decay_aux = true;  ///< also decay phonon levels 2 and 3

  void validate() const;
};

enum class NoiseChannel : std::uint32_t { Theta = 0, Phi = 1, Jump = 2 };

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream: every draw is a pure function of
/// (seed, pulse_index, channel), so draws do not depend on call order or on
/// how work is split between threads.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform in the open interval (0, 1), 53 bits of resolution.
  double uniform(std::uint64_t pulse_index, NoiseChannel channel) const;

  /// Standard normal deviate via the inverse normal CDF of uniform().
  double standard_normal(std::uint64_t pulse_index, NoiseChannel channel) const;

 private:
  std::uint64_t seed_;
};

/// mu + sigma * z; exactly mu when sigma is zero.
double draw_gaussian(const NoiseStream& stream, std::uint64_t pulse_index, NoiseChannel channel,
                     double mu, double sigma);

/// Adds independent theta and phi deviations; kind and qubit are untouched.
PulseOp perturb(const PulseOp& op, const ErrorModel& model, const NoiseStream& stream);

/// One quantum-jump step for a unit-norm state: decay, renormalize, then emit
/// with probability 1 - survival. An emission collapses the phonon-excited
/// component onto level 0 and renormalizes. Returns true on emission.
bool jump_step(QuantumState& state, double dec, const NoiseStream& stream,
               std::uint64_t pulse_index, bool decay_aux = true);

}  // namespace iontrap
