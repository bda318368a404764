#include <cmath>
#include <stdexcept>
#include <utility>

#include "rbp/errors.hpp"
#include "rbp/plant.hpp"
#include "rbp/rng.hpp"
#include "rbp/trainer.hpp"

namespace rbp {

void TrainerConfig::validate() const {
  network.validate();
  if (steps < 1) throw std::invalid_argument("TrainerConfig: steps must be >= 1");
  if (!(eta_guard > 0.0)) throw std::invalid_argument("TrainerConfig: eta_guard must be > 0");
  if (!(init_scale > 0.0)) throw std::invalid_argument("TrainerConfig: init_scale must be > 0");
  if (!(noise_power >= 0.0)) {
    throw std::invalid_argument("TrainerConfig: noise_power must be >= 0");
  }
  if (rate.kind == RateStrategyKind::fixed && !std::isfinite(rate.eta)) {
    throw std::invalid_argument("TrainerConfig: fixed eta must be finite");
  }
  if (rate.kind == RateStrategyKind::decayed && (!(rate.eta0 > 0.0) || !(rate.beta > 0.0))) {
    throw std::invalid_argument("TrainerConfig: decayed rate needs eta0 > 0 and beta > 0");
  }
}

TrainStepResult train_step(const NetworkState& net, const GradientState& grads,
                           const ForgettingState& forget, const RunMetrics& metrics,
                           std::span<const double> x, std::span<const double> y,
                           const TrainerConfig& config, std::uint64_t t) {
  if (y.size() != config.network.out_dim) {
    throw std::invalid_argument("train_step: target length does not match out_dim");
  }
  if (!grads.matches(config.network)) {
    throw std::invalid_argument("train_step: gradient state does not match config");
  }

  // (1) forward pass, (2) tracking error
  ForwardTrace trace = forward(config.network, net, x);
  Vector e(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) e[i] = y[i] - trace.y_hat[i];

  // (3) forgetting factor for this sample
  auto [new_forget, lambda] = combined_lambda(forget, e);

  // (4) learning rate
  const Matrix v_bar = extract_v_bar(net.v);
  double eta = 0.0;
  bool clamped = false;
  switch (config.rate.kind) {
    case RateStrategyKind::fixed:
      eta = config.rate.eta;
      break;
    case RateStrategyKind::decayed:
      eta = decayed_eta(config.rate.eta0, config.rate.beta, t);
      break;
    case RateStrategyKind::optimized: {
      const Vector eps = compute_epsilon(trace, grads.grad_v, grads.grad_w, v_bar);
      const Matrix zeta = compute_zeta(trace, v_bar);
      const RateRecord rec = optimal_eta(zeta, e, lambda, eps, config.eta_guard);
      eta = rec.eta_star;
      clamped = rec.clamped;
      if (config.clamp_eta_nonnegative && eta < 0.0) {
        eta = 0.0;
        clamped = true;
      }
      break;
    }
  }

  // (5) gradient recursion at the pre-update weights
  GradientState new_grads = grads;
  new_grads.grad_v = grad_v_step(grads.grad_v, lambda, trace, e);
  new_grads.grad_w = grad_w_step(grads.grad_w, lambda, trace, v_bar, e);

  // (6) weight update
  WeightUpdate up = apply_update(net, eta, new_grads.grad_v, new_grads.grad_w);
  new_grads.prev_delta_v = std::move(up.delta_v);
  new_grads.prev_delta_w = std::move(up.delta_w);
  if (!clamped) new_grads.prev_eta = eta;

  // (7) metrics and record
  RunMetrics new_metrics = update_metrics(metrics, e, eta, lambda);
  StepRecord rec;
  rec.t = t;
  rec.e = std::move(e);
  rec.eta = eta;
  rec.lambda = lambda;
  rec.e2 = new_metrics.e2;
  rec.rmse = new_metrics.rmse;
  rec.clamped = clamped;

  return {std::move(up.state), std::move(new_grads), std::move(new_forget),
          new_metrics, std::move(rec)};
}

RunResult run_identification_result(const TrainerConfig& config) {
  config.validate();
  if (config.network.in_dim != 4 || config.network.out_dim != 2) {
    throw std::invalid_argument(
        "run_identification: the plant needs in_dim = 4 and out_dim = 2");
  }

  SplitMix64 seeds(config.seed);
  const std::uint64_t weight_seed = seeds.next();
  const std::uint64_t noise_seed = seeds.next();

  NetworkState net = init_weights(config.network, weight_seed, config.init_scale);
  GradientState grads = GradientState::zeros(config.network);
  ForgettingState forget = config.forgetting;
  RunMetrics metrics;
  PlantState plant = PlantState::initial(noise_seed, config.noise_power);

  RunResult result;
  result.records.reserve(config.steps);
  for (std::uint64_t t = 0; t < config.steps; ++t) {
    const auto [u1, u2] = excitation(t);
    const auto x = build_regressor(u1, u2, plant);

    PlantState next_plant;
    try {
      auto [noise, plant_mid] = sample_noise(plant);
      next_plant = plant_step(plant_mid, u1, u2, noise);
    } catch (const DivergenceError& err) {
      result.diverged = true;
      result.diverged_at = t;
      result.message = err.what();
      break;
    }
    const std::array<double, 2> target{next_plant.y1, next_plant.y2};

    TrainStepResult step = train_step(net, grads, forget, metrics, x, target, config, t);
    if (!all_finite(step.net.w) || !all_finite(step.net.v) || !std::isfinite(step.record.eta)) {
      result.diverged = true;
      result.diverged_at = t;
      result.message = "training produced non-finite weights at step " + std::to_string(t);
      break;
    }

    net = std::move(step.net);
    grads = std::move(step.grads);
    forget = std::move(step.forget);
    metrics = step.metrics;
    result.records.push_back(std::move(step.record));
    plant = next_plant;
  }
  result.final_net = std::move(net);
  return result;
}

std::vector<StepRecord> run_identification(const TrainerConfig& config) {
  RunResult result = run_identification_result(config);
  if (result.diverged) throw DivergenceError(result.message, result.diverged_at);
  return std::move(result.records);
}

}  // namespace rbp
