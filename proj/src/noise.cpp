#include "iontrap/noise.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <stdexcept>

namespace iontrap {

void ErrorModel::validate() const {
  for (double v : {mu_theta, sigma_theta, mu_phi, sigma_phi}) {
    if (!std::isfinite(v)) throw std::invalid_argument("error model values must be finite");
  }
  if (sigma_theta < 0.0 || sigma_phi < 0.0) {
    throw std::invalid_argument("error model sigmas must be >= 0");
  }
}

const char* to_string(DecayMode m) { return m == DecayMode::Decay ? "decay" : "jump"; }

void DecoherenceModel::validate() const {
  if (!std::isfinite(dec) || dec < 0.0) throw std::invalid_argument("dec must be finite and >= 0");
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

double NoiseStream::uniform(std::uint64_t pulse_index, NoiseChannel channel) const {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(pulse_index), static_cast<std::uint32_t>(pulse_index >> 32),
       static_cast<std::uint32_t>(channel), 0u},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const std::uint64_t bits = ((std::uint64_t{out[0]} << 32) | out[1]) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NoiseStream::standard_normal(std::uint64_t pulse_index, NoiseChannel channel) const {
  const double u = uniform(pulse_index, channel);
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double draw_gaussian(const NoiseStream& stream, std::uint64_t pulse_index, NoiseChannel channel,
                     double mu, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return mu;
  return mu + sigma * stream.standard_normal(pulse_index, channel);
}

PulseOp perturb(const PulseOp& op, const ErrorModel& model, const NoiseStream& stream) {
  PulseOp out = op;
  out.theta += draw_gaussian(stream, op.pulse_index, NoiseChannel::Theta, model.mu_theta,
                             model.sigma_theta);
  out.phi += draw_gaussian(stream, op.pulse_index, NoiseChannel::Phi, model.mu_phi, model.sigma_phi);
  return out;
}

bool jump_step(QuantumState& state, double dec, const NoiseStream& stream,
               std::uint64_t pulse_index, bool decay_aux) {
  if (dec == 0.0) return false;
  const double before = state.norm_sq();
  state.apply_decay(dec, decay_aux);
  const double after = state.norm_sq();
  if (after <= 0.0 || before <= 0.0) return false;
  const double survival = after / before;
  state.scale(1.0 / std::sqrt(after));
  const double u = stream.uniform(pulse_index, NoiseChannel::Jump);
  if (u >= 1.0 - survival) return false;
  state.collapse_excited_to_ground();
  const double n = state.norm_sq();
  if (n > 0.0) state.scale(1.0 / std::sqrt(n));
  return true;
}

}  // namespace iontrap
