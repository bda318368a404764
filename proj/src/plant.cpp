#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rbp/errors.hpp"
#include "rbp/plant.hpp"

namespace rbp {

PlantState PlantState::initial(std::uint64_t noise_seed, double noise_power) {
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) {
    throw std::invalid_argument("PlantState: noise_power must be nonnegative and finite");
  }
  PlantState st;
  st.noise_rng = Rng(noise_seed);
  st.noise_power = noise_power;
  return st;
}

std::pair<double, double> excitation(std::uint64_t t) {
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 250.0;
  return {std::sin(phase), std::cos(phase)};
}

PlantState plant_step(const PlantState& state, double u1, double u2,
                      std::pair<double, double> noise) {
  const double y1 = state.y1;
  const double y2 = state.y2;
  const double den = 2.0 + y2 * y2;

  PlantState next = state;
  next.y1 = (0.8 * y1 * y1 * y1 + u1 * u1 * u2) / den + noise.first;
  next.y2 = (y1 - y1 * y2 + (u1 - 0.5) * (u2 + 0.8)) / den + noise.second;
  next.t = state.t + 1;
  if (!std::isfinite(next.y1) || !std::isfinite(next.y2)) {
    throw DivergenceError("plant_step: state became non-finite", next.t);
  }
  return next;
}

std::pair<std::pair<double, double>, PlantState> sample_noise(const PlantState& state) {
  PlantState next = state;
  const auto [g1, g2] = next.noise_rng.gaussian_pair();
  const double sd = std::sqrt(state.noise_power);
  return {{sd * g1, sd * g2}, next};
}

std::array<double, 4> build_regressor(double u1, double u2, const PlantState& state) {
  return {u1, u2, state.y1, state.y2};
}

}  // namespace rbp
