#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbp/forgetting.hpp"
#include "rbp/gradient.hpp"
#include "rbp/learning_rate.hpp"
#include "rbp/metrics.hpp"
#include "rbp/network.hpp"

namespace rbp {

enum class RateStrategyKind { fixed, decayed, optimized };

struct RateStrategy {
  RateStrategyKind kind = RateStrategyKind::optimized;
  double eta = 0.1;     // fixed
  double eta0 = 1.0;    // decayed
  double beta = 0.001;  // decayed

  friend bool operator==(const RateStrategy&, const RateStrategy&) = default;
};

struct TrainerConfig {
  NetworkConfig network{.in_dim = 4, .hidden_dim = 10, .out_dim = 2};
  RateStrategy rate;
  ForgettingState forgetting;
  std::size_t steps = 5000;
  std::uint64_t seed = 1;
  bool clamp_eta_nonnegative = false;
  double eta_guard = 1e-12;
  double init_scale = 0.1;
  double noise_power = 0.001;

  void validate() const;

  friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

// One line of the per-step log.
struct StepRecord {
  std::uint64_t t = 0;
  Vector e;
  double eta = 0.0;
  double lambda = 1.0;
  double e2 = 0.0;
  double rmse = 0.0;
  bool clamped = false;
};

struct TrainStepResult {
  NetworkState net;
  GradientState grads;
  ForgettingState forget;
  RunMetrics metrics;
  StepRecord record;
};

// One full sample: forward pass, error, forgetting factor, learning rate,
// gradient recursion, weight update, metrics — in exactly that order. The
// forgetting factor computed from the current error is the one used in both
// the rate formula and the gradient recursion. A clamped optimized step
// applies no weight change but still advances gradients and forgetting;
// prev_eta is carried over such steps so the momentum ratio stays defined.
TrainStepResult train_step(const NetworkState& net, const GradientState& grads,
                           const ForgettingState& forget, const RunMetrics& metrics,
                           std::span<const double> x, std::span<const double> y,
                           const TrainerConfig& config, std::uint64_t t);

struct RunResult {
  std::vector<StepRecord> records;
  NetworkState final_net;
  bool diverged = false;
  std::size_t diverged_at = 0;
  std::string message;
};

// Drives the plant and the trainer for config.steps one-step-ahead
// prediction samples. Fully deterministic in config: the master seed is
// split into the weight-init seed and the noise seed.
RunResult run_identification_result(const TrainerConfig& config);

// Same, but throws DivergenceError instead of reporting it.
std::vector<StepRecord> run_identification(const TrainerConfig& config);

}  // namespace rbp
