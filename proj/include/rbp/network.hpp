#pragma once

#include <cstdint>
#include <span>

#include "rbp/linalg.hpp"

namespace rbp {

enum class OutputActivation { nonlinear, linear };

// Shape of a three-layer network: in_dim inputs, one hidden layer of
// hidden_dim tanh units, out_dim outputs. shape_factor scales the tanh
// argument: s(z) = tanh(z / shape_factor).
struct NetworkConfig {
  std::size_t in_dim = 1;
  std::size_t hidden_dim = 1;
  std::size_t out_dim = 1;
  double shape_factor = 1.0;
  OutputActivation output_activation = OutputActivation::nonlinear;

  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Weights. Biases are folded in: column 0 of w multiplies the fixed 1 that
// is prepended to the input, row 0 of v multiplies the fixed 1 at the head
// of the hidden activation vector.
struct NetworkState {
  Matrix w;  // hidden_dim x (in_dim + 1)
  Matrix v;  // (hidden_dim + 1) x out_dim

  bool matches(const NetworkConfig& config) const;

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

// Every intermediate quantity of one forward pass. The gradient recursions
// and the learning-rate formulas all read from here.
struct ForwardTrace {
  Vector x_aug;       // in_dim + 1, x_aug[0] == 1
  Vector net_hidden;  // hidden_dim
  Vector s_vec;       // hidden_dim + 1, s_vec[0] == 1
  Vector s_prime;     // hidden_dim, diagonal of the hidden Jacobian
  Vector net_out;     // out_dim
  Vector y_hat;       // out_dim
  Vector f_prime;     // out_dim, diagonal of the output Jacobian
};

// tanh(z / u0). Bounded in (-1, 1) for finite z.
double activation(double z, double u0);

// Slope expressed through the activation value: (1 - s^2) / u0.
double activation_deriv(double s_val, double u0);

// Second derivative through the activation value: -(2 / u0^2) s (1 - s^2).
// Stated for completeness; no update rule consumes it.
double activation_second_deriv(double s_val, double u0);

ForwardTrace forward(const NetworkConfig& config, const NetworkState& state,
                     std::span<const double> x);

// Entries i.i.d. uniform on [-scale, scale] from the repository's fixed
// generator; identical (config, seed, scale) give identical weights on any
// platform. Fill order: w row-major, then v row-major.
NetworkState init_weights(const NetworkConfig& config, std::uint64_t seed, double scale);

}  // namespace rbp
