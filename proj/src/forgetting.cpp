#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbp/errors.hpp"
#include "rbp/forgetting.hpp"

namespace rbp {

ForgettingState make_forgetting(ForgettingMode mode, double tau_f, double lambda1_0,
                                double lambda_min, double fixed_lambda) {
  if (!(tau_f > 1.0) || !std::isfinite(tau_f)) {
    throw std::invalid_argument("make_forgetting: tau_f must be > 1");
  }
  if (!(lambda1_0 > 0.0) || !(lambda1_0 <= 1.0)) {
    throw std::invalid_argument("make_forgetting: lambda1_0 must lie in (0, 1]");
  }
  if (!(lambda_min > 0.0) || !(lambda_min < 1.0)) {
    throw std::invalid_argument("make_forgetting: lambda_min must lie in (0, 1)");
  }
  if (!(fixed_lambda > 0.0) || !(fixed_lambda <= 1.0)) {
    throw std::invalid_argument("make_forgetting: fixed_lambda must lie in (0, 1]");
  }
  ForgettingState st;
  st.mode = mode;
  st.fixed_lambda = fixed_lambda;
  st.lambda1 = lambda1_0;
  st.s_f = 1.0;
  st.s_f_seeded = false;
  st.tau_f = tau_f;
  st.alpha = std::exp(-1.0 / tau_f);
  st.lambda_min = lambda_min;
  return st;
}

std::pair<ForgettingState, double> startup_lambda_step(ForgettingState state) {
  state.lambda1 = state.alpha * state.lambda1 + 1.0 - state.alpha;
  return {state, state.lambda1};
}

std::pair<ForgettingState, double> adaptive_lambda_step(ForgettingState state,
                                                        std::span<const double> e) {
  const double ee = kernels::dot(e, e);
  if (!state.s_f_seeded) {
    state.s_f = ee > 0.0 ? ee : 1.0;
    state.s_f_seeded = true;
  }
  if (!(state.s_f > 0.0)) {
    throw InvalidStateError("adaptive_lambda_step: s_f must be positive");
  }
  if (!(state.tau_f > 1.0)) {
    throw InvalidStateError("adaptive_lambda_step: tau_f must be > 1");
  }
  const double old_sf = state.s_f;
  state.s_f = (state.tau_f - 1.0) / state.tau_f * old_sf + ee / state.tau_f;
  if (!(state.s_f > 0.0)) {
    throw InvalidStateError("adaptive_lambda_step: smoothed error energy collapsed to zero");
  }
  return {state, old_sf / state.s_f};
}

std::pair<ForgettingState, double> combined_lambda(ForgettingState state,
                                                   std::span<const double> e) {
  double lambda = 1.0;
  switch (state.mode) {
    case ForgettingMode::fixed:
      lambda = state.fixed_lambda;
      break;
    case ForgettingMode::startup: {
      auto [st, l1] = startup_lambda_step(std::move(state));
      state = std::move(st);
      lambda = l1;
      break;
    }
    case ForgettingMode::adaptive: {
      auto [st, l2] = adaptive_lambda_step(std::move(state), e);
      state = std::move(st);
      lambda = l2;
      break;
    }
    case ForgettingMode::combined: {
      auto [st1, l1] = startup_lambda_step(std::move(state));
      auto [st2, l2] = adaptive_lambda_step(std::move(st1), e);
      state = std::move(st2);
      lambda = l1 * l2;
      break;
    }
  }
  lambda = std::clamp(lambda, state.lambda_min, 1.0);
  return {state, lambda};
}

}  // namespace rbp
