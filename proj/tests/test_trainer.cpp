#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include <doctest.h>

#include "rbp/errors.hpp"
#include "rbp/plant.hpp"
#include "rbp/trainer.hpp"
#include "test_support.hpp"

using namespace rbp;

namespace {

TrainerConfig toy_config(RateStrategyKind kind) {
  TrainerConfig cfg;
  cfg.network = {.in_dim = 4, .hidden_dim = 6, .out_dim = 2};
  cfg.rate.kind = kind;
  cfg.rate.eta = 0.2;
  cfg.forgetting = make_forgetting(ForgettingMode::startup, 50.0, 0.5);
  cfg.steps = 200;
  cfg.seed = 11;
  cfg.noise_power = 0.001;
  return cfg;
}

// Hand-coded scalar reference for one full optimized step on the 1-1-1
// network: plain double arithmetic, no library calls. Weights are
// w0 (hidden bias), w1, v0 (output bias), v1.
struct ScalarStep {
  double w0, w1, v0, v1;
  double eta, lambda;
};

ScalarStep scalar_reference_step(double w0, double w1, double v0, double v1, double x, double y,
                                 double lambda, double guard) {
  const double net_h = w0 + w1 * x;
  const double s = std::tanh(net_h);
  const double s_prime = 1.0 - s * s;
  const double net_o = v0 + v1 * s;
  const double y_hat = std::tanh(net_o);
  const double f_prime = 1.0 - y_hat * y_hat;
  const double e = y - y_hat;

  // zero history: epsilon = 0
  const double epsilon = 0.0;
  const double s_norm2 = 1.0 + s * s;
  const double x_norm2 = 1.0 + x * x;
  const double zeta = f_prime * (s_norm2 + x_norm2 * s_prime * s_prime * v1 * v1) * f_prime;

  const double d = zeta * e - lambda * epsilon;
  double eta = 0.0;
  if (d * d > guard) eta = d * e / (d * d);

  // single-sample gradients (zero history)
  const double gv0 = -1.0 * e * f_prime;
  const double gv1 = -s * e * f_prime;
  const double gw_common = -s_prime * v1 * f_prime * e;
  const double gw0 = gw_common * 1.0;
  const double gw1 = gw_common * x;

  return {w0 - eta * gw0, w1 - eta * gw1, v0 - eta * gv0, v1 - eta * gv1, eta, lambda};
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("zero fixed rate never changes the weights") {
  TrainerConfig cfg = toy_config(RateStrategyKind::fixed);
  cfg.rate.eta = 0.0;
  cfg.steps = 50;
  const RunResult run = run_identification_result(cfg);
  REQUIRE(!run.diverged);
  REQUIRE(run.records.size() == 50);

  // the untrained network from the same seed produces the same error path
  SplitMix64 seeds(cfg.seed);
  const std::uint64_t weight_seed = seeds.next();
  const std::uint64_t noise_seed = seeds.next();
  const NetworkState frozen = init_weights(cfg.network, weight_seed, cfg.init_scale);
  CHECK(run.final_net.w == frozen.w);
  CHECK(run.final_net.v == frozen.v);

  PlantState plant = PlantState::initial(noise_seed, cfg.noise_power);
  for (const StepRecord& rec : run.records) {
    const auto [u1, u2] = excitation(rec.t);
    const auto x = build_regressor(u1, u2, plant);
    const ForwardTrace tr = forward(cfg.network, frozen, x);
    auto [noise, mid] = sample_noise(plant);
    plant = plant_step(mid, u1, u2, noise);
    CHECK(rec.e[0] == plant.y1 - tr.y_hat[0]);
    CHECK(rec.e[1] == plant.y2 - tr.y_hat[1]);
  }
}

TEST_CASE("first optimized step reduces to the closed form with zero history") {
  Rng rng(71);
  const auto inst = test::random_instance(rng, 3, 4, 2);
  TrainerConfig cfg;
  cfg.network = inst.config;
  cfg.rate.kind = RateStrategyKind::optimized;
  cfg.forgetting = make_forgetting(ForgettingMode::fixed, 100.0, 0.5, 0.1, 0.9);

  const GradientState grads = GradientState::zeros(inst.config);
  const RunMetrics metrics;
  const TrainStepResult step =
      train_step(inst.state, grads, cfg.forgetting, metrics, inst.x, inst.y, cfg, 0);

  // with epsilon = 0: eta* = (e^T zeta e) / (e^T zeta^2 e)
  const ForwardTrace tr = forward(inst.config, inst.state, inst.x);
  Vector e(2);
  for (std::size_t i = 0; i < 2; ++i) e[i] = inst.y[i] - tr.y_hat[i];
  const Matrix zeta = compute_zeta(tr, extract_v_bar(inst.state.v));
  Vector ze(2);
  kernels::matvec(zeta, e, ze);
  const double expect = kernels::dot(ze, e) / kernels::dot(ze, ze);
  CHECK(step.record.eta == doctest::Approx(expect).epsilon(1e-12));

  // update direction equals plain single-sample backpropagation
  const Matrix gv = grad_v_step(Matrix(5, 2), 1.0, tr, e);
  for (std::size_t i = 0; i < gv.size(); ++i) {
    CHECK(step.grads.prev_delta_v.data()[i] ==
          doctest::Approx(-step.record.eta * gv.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("full optimized step matches an independent scalar implementation") {
  TrainerConfig cfg;
  cfg.network = {.in_dim = 1, .hidden_dim = 1, .out_dim = 1};
  cfg.rate.kind = RateStrategyKind::optimized;
  cfg.forgetting = make_forgetting(ForgettingMode::fixed, 100.0, 0.5, 0.1, 0.85);
  cfg.eta_guard = 1e-12;

  NetworkState net;
  net.w = Matrix(1, 2);
  net.w(0, 0) = 0.05;
  net.w(0, 1) = -0.12;
  net.v = Matrix(2, 1);
  net.v(0, 0) = 0.08;
  net.v(1, 0) = 0.2;

  const double x = 0.6, y = 0.35;
  const TrainStepResult step =
      train_step(net, GradientState::zeros(cfg.network), cfg.forgetting, RunMetrics{},
                 Vector{x}, Vector{y}, cfg, 0);

  const ScalarStep ref = scalar_reference_step(0.05, -0.12, 0.08, 0.2, x, y, 0.85, 1e-12);
  CHECK(std::abs(step.record.eta - ref.eta) <= 1e-12);
  CHECK(std::abs(step.net.w(0, 0) - ref.w0) <= 1e-12);
  CHECK(std::abs(step.net.w(0, 1) - ref.w1) <= 1e-12);
  CHECK(std::abs(step.net.v(0, 0) - ref.v0) <= 1e-12);
  CHECK(std::abs(step.net.v(1, 0) - ref.v1) <= 1e-12);
  CHECK(step.record.lambda == 0.85);
}

TEST_CASE("a 100-step optimized run matches the scalar implementation") {
  // Independent plain-double reference for the whole loop on the 1-1-1
  // network, including the gradient history feeding epsilon.
  TrainerConfig cfg;
  cfg.network = {.in_dim = 1, .hidden_dim = 1, .out_dim = 1};
  cfg.rate.kind = RateStrategyKind::optimized;
  cfg.forgetting = make_forgetting(ForgettingMode::fixed, 100.0, 0.5, 0.1, 0.85);

  NetworkState net;
  net.w = Matrix(1, 2);
  net.w(0, 0) = 0.05;
  net.w(0, 1) = -0.12;
  net.v = Matrix(2, 1);
  net.v(0, 0) = 0.08;
  net.v(1, 0) = 0.2;
  GradientState grads = GradientState::zeros(cfg.network);
  ForgettingState forget = cfg.forgetting;
  RunMetrics metrics;

  double w0 = 0.05, w1 = -0.12, v0 = 0.08, v1 = 0.2;
  double gv0 = 0.0, gv1 = 0.0, gw0 = 0.0, gw1 = 0.0;
  const double lambda = 0.85;

  Rng rng(73);
  for (int t = 0; t < 100; ++t) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = 0.4 * std::sin(0.1 * t) + 0.2 * x;

    // library step
    const TrainStepResult step =
        train_step(net, grads, forget, metrics, Vector{x}, Vector{y}, cfg, t);

    // scalar step
    const double net_h = w0 * 1.0 + w1 * x;
    const double s = std::tanh(net_h);
    const double s_prime = 1.0 - s * s;
    const double net_o = v0 * 1.0 + v1 * s;
    const double y_hat = std::tanh(net_o);
    const double f_prime = 1.0 - y_hat * y_hat;
    const double e = y - y_hat;

    // associations mirror the production formulas so rounding stays aligned
    const double ef = e * f_prime;
    const double eps =
        f_prime * ((gv0 * 1.0 + gv1 * s) + v1 * (s_prime * (gw0 * 1.0 + gw1 * x)));
    const double s2 = 1.0 + s * s;
    const double x2 = 1.0 + x * x;
    double zeta = (x2 * (s_prime * s_prime)) * (v1 * v1);
    zeta += s2;
    zeta *= f_prime * f_prime;

    const double d = zeta * e - lambda * eps;
    double eta = 0.0;
    if (d * d > cfg.eta_guard) eta = d * e / (d * d);

    gv0 = lambda * gv0 - 1.0 * ef;
    gv1 = lambda * gv1 - s * ef;
    const double q = s_prime * (v1 * ef);
    gw0 = lambda * gw0 - q * 1.0;
    gw1 = lambda * gw1 - q * x;
    w0 -= eta * gw0;
    w1 -= eta * gw1;
    v0 -= eta * gv0;
    v1 -= eta * gv1;

    CAPTURE(t);
    REQUIRE(std::abs(step.record.eta - eta) <= 1e-10);
    REQUIRE(std::abs(step.net.w(0, 0) - w0) <= 1e-10);
    REQUIRE(std::abs(step.net.w(0, 1) - w1) <= 1e-10);
    REQUIRE(std::abs(step.net.v(0, 0) - v0) <= 1e-10);
    REQUIRE(std::abs(step.net.v(1, 0) - v1) <= 1e-10);

    net = step.net;
    grads = step.grads;
    forget = step.forget;
    metrics = step.metrics;
  }
}

TEST_CASE("fixed and optimized strategies share the first-step direction") {
  Rng rng(74);
  const auto inst = test::random_instance(rng, 4, 5, 2);
  TrainerConfig base;
  base.network = inst.config;
  base.forgetting = make_forgetting(ForgettingMode::fixed, 100.0, 0.5, 0.1, 0.9);

  TrainerConfig fixed_cfg = base;
  fixed_cfg.rate = {RateStrategyKind::fixed, 0.25, 1.0, 0.001};
  TrainerConfig opt_cfg = base;
  opt_cfg.rate.kind = RateStrategyKind::optimized;

  const GradientState zeros = GradientState::zeros(inst.config);
  const TrainStepResult fixed_step =
      train_step(inst.state, zeros, base.forgetting, RunMetrics{}, inst.x, inst.y, fixed_cfg, 0);
  const TrainStepResult opt_step =
      train_step(inst.state, zeros, base.forgetting, RunMetrics{}, inst.x, inst.y, opt_cfg, 0);

  // deltas are proportional: delta_opt * eta_fixed == delta_fixed * eta_opt
  const double ef = fixed_step.record.eta;
  const double eo = opt_step.record.eta;
  REQUIRE(eo != 0.0);
  for (std::size_t i = 0; i < fixed_step.grads.prev_delta_v.size(); ++i) {
    CHECK(opt_step.grads.prev_delta_v.data()[i] * ef ==
          doctest::Approx(fixed_step.grads.prev_delta_v.data()[i] * eo).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < fixed_step.grads.prev_delta_w.size(); ++i) {
    CHECK(opt_step.grads.prev_delta_w.data()[i] * ef ==
          doctest::Approx(fixed_step.grads.prev_delta_w.data()[i] * eo).epsilon(1e-12));
  }
}

TEST_CASE("run_identification returns one record per step") {
  TrainerConfig cfg = toy_config(RateStrategyKind::optimized);
  cfg.steps = 1;
  const auto records = run_identification(cfg);
  CHECK(records.size() == 1);
  CHECK(records[0].t == 0);
  CHECK(records[0].e.size() == 2);
}

TEST_CASE("run_identification is deterministic") {
  const TrainerConfig cfg = toy_config(RateStrategyKind::optimized);
  const auto a = run_identification(cfg);
  const auto b = run_identification(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].e == b[i].e);
    CHECK(a[i].eta == b[i].eta);
    CHECK(a[i].lambda == b[i].lambda);
    CHECK(a[i].rmse == b[i].rmse);
  }
}

TEST_CASE("training state can be checkpointed and resumed") {
  Rng rng(72);
  TrainerConfig cfg;
  cfg.network = {.in_dim = 2, .hidden_dim = 3, .out_dim = 2};
  cfg.rate.kind = RateStrategyKind::optimized;
  cfg.forgetting = make_forgetting(ForgettingMode::combined, 20.0, 0.5);

  std::vector<Vector> xs, ys;
  for (int k = 0; k < 60; ++k) {
    xs.push_back(test::random_vector(rng, 2));
    ys.push_back(test::random_vector(rng, 2, 0.8));
  }

  auto drive = [&](NetworkState net, GradientState grads, ForgettingState forget,
                   RunMetrics metrics, int from, int to) {
    std::vector<StepRecord> recs;
    for (int t = from; t < to; ++t) {
      TrainStepResult r = train_step(net, grads, forget, metrics, xs[t], ys[t], cfg, t);
      net = std::move(r.net);
      grads = std::move(r.grads);
      forget = std::move(r.forget);
      metrics = r.metrics;
      recs.push_back(std::move(r.record));
    }
    return std::tuple{net, grads, forget, metrics, recs};
  };

  const NetworkState net0 = init_weights(cfg.network, 3, 0.1);
  const GradientState grads0 = GradientState::zeros(cfg.network);

  auto [net_a, grads_a, forget_a, metrics_a, recs_a] =
      drive(net0, grads0, cfg.forgetting, RunMetrics{}, 0, 60);

  auto [net_m, grads_m, forget_m, metrics_m, recs_m] =
      drive(net0, grads0, cfg.forgetting, RunMetrics{}, 0, 30);
  auto [net_b, grads_b, forget_b, metrics_b, recs_b] =
      drive(net_m, grads_m, forget_m, metrics_m, 30, 60);

  CHECK(net_a.w == net_b.w);
  CHECK(net_a.v == net_b.v);
  REQUIRE(recs_b.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(recs_a[30 + i].e == recs_b[i].e);
    CHECK(recs_a[30 + i].eta == recs_b[i].eta);
    CHECK(recs_a[30 + i].rmse == recs_b[i].rmse);
  }
}

TEST_CASE("optimized runs outperform badly tuned fixed rates") {
  TrainerConfig opt = toy_config(RateStrategyKind::optimized);
  opt.forgetting = make_forgetting(ForgettingMode::fixed, 100.0, 0.5, 0.1, 0.9);
  opt.network.hidden_dim = 10;
  opt.steps = 1500;
  const auto opt_records = run_identification(opt);

  TrainerConfig bad = opt;
  bad.rate.kind = RateStrategyKind::fixed;
  bad.rate.eta = 1.4;
  const auto bad_records = run_identification(bad);

  CHECK(opt_records.back().rmse <= bad_records.back().rmse);
}

TEST_CASE("divergent configurations are reported, not propagated") {
  TrainerConfig cfg = toy_config(RateStrategyKind::fixed);
  cfg.network.output_activation = OutputActivation::linear;
  cfg.rate.eta = 1000.0;
  cfg.forgetting = make_forgetting(ForgettingMode::fixed, 100.0, 0.5, 0.1, 1.0);
  cfg.steps = 2000;
  const RunResult result = run_identification_result(cfg);
  CHECK(result.diverged);
  CHECK(result.records.size() < 2000);
  CHECK_THROWS_AS(run_identification(cfg), DivergenceError);
}

TEST_CASE("run_identification validates the plant interface") {
  TrainerConfig cfg = toy_config(RateStrategyKind::optimized);
  cfg.network.in_dim = 3;
  CHECK_THROWS_AS(run_identification(cfg), std::invalid_argument);
}

TEST_SUITE_END();
