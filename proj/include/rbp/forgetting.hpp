#pragma once

#include <cmath>
#include <span>
#include <utility>

#include "rbp/linalg.hpp"

namespace rbp {

enum class ForgettingMode { fixed, startup, adaptive, combined };

// State of the variable forgetting factor. lambda1 ramps geometrically from
// a small initial value toward 1 (startup); s_f is the smoothed error energy
// driving the adaptive factor lambda2 = s_f(t-1) / s_f(t).
struct ForgettingState {
  ForgettingMode mode = ForgettingMode::combined;
  double fixed_lambda = 0.98;  // used when mode == fixed
  double lambda1 = 0.5;
  double s_f = 1.0;
  bool s_f_seeded = false;  // s_f(0) is taken from the first sample's e^T e
  double tau_f = 100.0;
  double alpha = std::exp(-1.0 / 100.0);  // exp(-1 / tau_f)
  double lambda_min = 0.1;

  friend bool operator==(const ForgettingState&, const ForgettingState&) = default;
};

// Validates ranges and derives alpha from tau_f.
ForgettingState make_forgetting(ForgettingMode mode, double tau_f = 100.0,
                                double lambda1_0 = 0.5, double lambda_min = 0.1,
                                double fixed_lambda = 0.98);

// lambda1(t) = alpha lambda1(t-1) + 1 - alpha. Monotone toward 1.
std::pair<ForgettingState, double> startup_lambda_step(ForgettingState state);

// s_f(t) = ((tau_f - 1)/tau_f) s_f(t-1) + e^T e / tau_f; returns
// lambda2 = s_f(t-1) / s_f(t). Greater than 1 when the error energy shrinks;
// combined_lambda applies the final clamp.
std::pair<ForgettingState, double> adaptive_lambda_step(ForgettingState state,
                                                        std::span<const double> e);

// The factor actually fed to the gradient recursion, per mode, clamped into
// [lambda_min, 1].
std::pair<ForgettingState, double> combined_lambda(ForgettingState state,
                                                   std::span<const double> e);

}  // namespace rbp
