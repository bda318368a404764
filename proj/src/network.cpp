#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbp/network.hpp"
#include "rbp/rng.hpp"

namespace rbp {

void NetworkConfig::validate() const {
  if (in_dim < 1 || hidden_dim < 1 || out_dim < 1) {
    throw std::invalid_argument("NetworkConfig: all dimensions must be >= 1");
  }
  if (!(shape_factor > 0.0) || !std::isfinite(shape_factor)) {
    throw std::invalid_argument("NetworkConfig: shape_factor must be positive and finite");
  }
}

bool NetworkState::matches(const NetworkConfig& config) const {
  return w.rows() == config.hidden_dim && w.cols() == config.in_dim + 1 &&
         v.rows() == config.hidden_dim + 1 && v.cols() == config.out_dim;
}

double activation(double z, double u0) {
  if (!std::isfinite(z) || !(u0 > 0.0)) {
    throw std::invalid_argument("activation: need finite z and u0 > 0");
  }
  return std::tanh(z / u0);
}

double activation_deriv(double s_val, double u0) {
  if (!(u0 > 0.0) || !(std::abs(s_val) <= 1.0)) {
    throw std::invalid_argument("activation_deriv: need |s_val| <= 1 and u0 > 0");
  }
  return (1.0 - s_val * s_val) / u0;
}

double activation_second_deriv(double s_val, double u0) {
  if (!(u0 > 0.0) || !(std::abs(s_val) <= 1.0)) {
    throw std::invalid_argument("activation_second_deriv: need |s_val| <= 1 and u0 > 0");
  }
  return -2.0 / (u0 * u0) * s_val * (1.0 - s_val * s_val);
}

ForwardTrace forward(const NetworkConfig& config, const NetworkState& state,
                     std::span<const double> x) {
  config.validate();
  if (x.size() != config.in_dim) {
    throw std::invalid_argument("forward: input length does not match in_dim");
  }
  if (!all_finite(x)) throw std::invalid_argument("forward: non-finite input");
  if (!state.matches(config)) {
    throw std::invalid_argument("forward: state dimensions do not match config");
  }

  const double u0 = config.shape_factor;
  ForwardTrace tr;

  tr.x_aug.assign(config.in_dim + 1, 1.0);
  std::copy(x.begin(), x.end(), tr.x_aug.begin() + 1);

  tr.net_hidden.resize(config.hidden_dim);
  kernels::matvec(state.w, tr.x_aug, tr.net_hidden);

  tr.s_vec.assign(config.hidden_dim + 1, 1.0);
  kernels::tanh_map(tr.net_hidden, u0, std::span(tr.s_vec).subspan(1));

  tr.s_prime.resize(config.hidden_dim);
  kernels::tanh_deriv_map(std::span(tr.s_vec).subspan(1), u0, tr.s_prime);

  tr.net_out.resize(config.out_dim);
  kernels::matvec_t(state.v, tr.s_vec, tr.net_out);

  tr.y_hat.resize(config.out_dim);
  tr.f_prime.resize(config.out_dim);
  if (config.output_activation == OutputActivation::nonlinear) {
    kernels::tanh_map(tr.net_out, u0, tr.y_hat);
    kernels::tanh_deriv_map(tr.y_hat, u0, tr.f_prime);
  } else {
    std::copy(tr.net_out.begin(), tr.net_out.end(), tr.y_hat.begin());
    std::fill(tr.f_prime.begin(), tr.f_prime.end(), 1.0);
  }
  return tr;
}

NetworkState init_weights(const NetworkConfig& config, std::uint64_t seed, double scale) {
  config.validate();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("init_weights: scale must be positive and finite");
  }
  Rng rng(seed);
  NetworkState state;
  state.w = Matrix(config.hidden_dim, config.in_dim + 1);
  state.v = Matrix(config.hidden_dim + 1, config.out_dim);
  for (std::size_t i = 0; i < state.w.size(); ++i) state.w.data()[i] = rng.uniform(-scale, scale);
  for (std::size_t i = 0; i < state.v.size(); ++i) state.v.data()[i] = rng.uniform(-scale, scale);
  return state;
}

}  // namespace rbp
