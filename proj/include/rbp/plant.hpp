#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "rbp/rng.hpp"

namespace rbp {

// The simulated two-input two-output plant. A plain value: copies evolve
// independently and identically, which is what the reproducibility tests
// lean on.
struct PlantState {
  double y1 = 0.0;
  double y2 = 0.0;
  std::uint64_t t = 0;
  Rng noise_rng{0};
  double noise_power = 0.0;

  static PlantState initial(std::uint64_t noise_seed, double noise_power);
};

// u1 = sin(2 pi t / 250), u2 = cos(2 pi t / 250); period-250 excitation.
std::pair<double, double> excitation(std::uint64_t t);

// One step of the plant dynamics with additive measurement noise:
//   y1' = (0.8 y1^3 + u1^2 u2) / (2 + y2^2) + w1
//   y2' = (y1 - y1 y2 + (u1 - 0.5)(u2 + 0.8)) / (2 + y2^2) + w2
PlantState plant_step(const PlantState& state, double u1, double u2,
                      std::pair<double, double> noise);

// Two zero-mean Gaussian draws with variance noise_power. Advances the
// generator; variance 0 yields exact zeros.
std::pair<std::pair<double, double>, PlantState> sample_noise(const PlantState& state);

// The network input, [u1, u2, y1, y2]; the forward pass prepends the bias.
std::array<double, 4> build_regressor(double u1, double u2, const PlantState& state);

}  // namespace rbp
