#pragma once

#include <span>

#include "rbp/network.hpp"

namespace rbp {

// Exponentially forgotten gradient accumulators plus the last applied weight
// deltas and learning rate (carried for the momentum-form updater).
struct GradientState {
  Matrix grad_v;        // (hidden_dim + 1) x out_dim
  Matrix grad_w;        // hidden_dim x (in_dim + 1)
  Matrix prev_delta_v;  // last applied change of v
  Matrix prev_delta_w;  // last applied change of w
  double prev_eta = 1.0;

  static GradientState zeros(const NetworkConfig& config);
  bool matches(const NetworkConfig& config) const;
};

// V with its bias row removed: rows 1..hidden_dim.
Matrix extract_v_bar(const Matrix& v);

// grad_v(t) = lambda * grad_v(t-1) - S (e .* f') ^T
Matrix grad_v_step(const Matrix& grad_v_prev, double lambda, const ForwardTrace& trace,
                   std::span<const double> e);

// grad_w(t) = lambda * grad_w(t-1) - diag(s') Vbar diag(f') e x^T
Matrix grad_w_step(const Matrix& grad_w_prev, double lambda, const ForwardTrace& trace,
                   const Matrix& v_bar, std::span<const double> e);

struct WeightUpdate {
  NetworkState state;
  Matrix delta_v;  // the applied change, -eta * grad_v
  Matrix delta_w;  // the applied change, -eta * grad_w
};

// Steepest descent: v -= eta * grad_v, w -= eta * grad_w.
WeightUpdate apply_update(const NetworkState& state, double eta, const Matrix& grad_v,
                          const Matrix& grad_w);

struct MomentumUpdate {
  NetworkState state;
  GradientState grads;  // prev deltas and prev_eta advanced; grad matrices untouched
  Matrix delta_v;
  Matrix delta_w;
};

// The forgetting recursion rewritten as gradient step plus momentum:
//   delta(t) = eta * <single-sample term> + (eta / prev_eta) * lambda * delta(t-1).
// Algebraically identical to grad_*_step followed by apply_update when every
// step actually applied its eta. Throws DegenerateMomentumError when
// |prev_eta| < 1e-12; the caller then takes the direct path. This updater
// does not maintain the gradient accumulators.
MomentumUpdate momentum_form_update(const NetworkState& state, const GradientState& grads,
                                    double eta, double lambda, const ForwardTrace& trace,
                                    std::span<const double> e);

}  // namespace rbp
