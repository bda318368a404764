#include <cmath>
#include <stdexcept>
#include <utility>

#include "rbp/errors.hpp"
#include "rbp/gradient.hpp"

namespace rbp {

namespace {

Vector error_times_fprime(const ForwardTrace& trace, std::span<const double> e) {
  if (e.size() != trace.f_prime.size()) {
    throw std::invalid_argument("error vector length does not match trace");
  }
  Vector ef(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) ef[i] = e[i] * trace.f_prime[i];
  return ef;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !(lambda <= 1.0)) {
    throw std::invalid_argument("forgetting factor must lie in (0, 1]");
  }
}

}  // namespace

GradientState GradientState::zeros(const NetworkConfig& config) {
  GradientState g;
  g.grad_v = Matrix(config.hidden_dim + 1, config.out_dim);
  g.grad_w = Matrix(config.hidden_dim, config.in_dim + 1);
  g.prev_delta_v = g.grad_v;
  g.prev_delta_w = g.grad_w;
  g.prev_eta = 1.0;
  return g;
}

bool GradientState::matches(const NetworkConfig& config) const {
  return grad_v.rows() == config.hidden_dim + 1 && grad_v.cols() == config.out_dim &&
         grad_w.rows() == config.hidden_dim && grad_w.cols() == config.in_dim + 1 &&
         prev_delta_v.same_shape(grad_v) && prev_delta_w.same_shape(grad_w);
}

Matrix extract_v_bar(const Matrix& v) {
  if (v.rows() < 1) throw std::invalid_argument("extract_v_bar: v has no rows");
  Matrix out(v.rows() - 1, v.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = v(i + 1, j);
  }
  return out;
}

Matrix grad_v_step(const Matrix& grad_v_prev, double lambda, const ForwardTrace& trace,
                   std::span<const double> e) {
  check_lambda(lambda);
  if (grad_v_prev.rows() != trace.s_vec.size() || grad_v_prev.cols() != e.size()) {
    throw std::invalid_argument("grad_v_step: dimension mismatch");
  }
  const Vector ef = error_times_fprime(trace, e);
  Matrix out = grad_v_prev;
  kernels::rank1_decay(out, lambda, -1.0, trace.s_vec, ef);
  return out;
}

Matrix grad_w_step(const Matrix& grad_w_prev, double lambda, const ForwardTrace& trace,
                   const Matrix& v_bar, std::span<const double> e) {
  check_lambda(lambda);
  if (grad_w_prev.rows() != trace.s_prime.size() || grad_w_prev.cols() != trace.x_aug.size() ||
      v_bar.rows() != trace.s_prime.size() || v_bar.cols() != e.size()) {
    throw std::invalid_argument("grad_w_step: dimension mismatch");
  }
  const Vector ef = error_times_fprime(trace, e);
  Vector q(v_bar.rows());
  kernels::matvec(v_bar, ef, q);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] *= trace.s_prime[i];
  Matrix out = grad_w_prev;
  kernels::rank1_decay(out, lambda, -1.0, q, trace.x_aug);
  return out;
}

WeightUpdate apply_update(const NetworkState& state, double eta, const Matrix& grad_v,
                          const Matrix& grad_w) {
  if (!std::isfinite(eta)) throw std::invalid_argument("apply_update: eta must be finite");
  if (!grad_v.same_shape(state.v) || !grad_w.same_shape(state.w)) {
    throw std::invalid_argument("apply_update: gradient dimensions do not match state");
  }
  WeightUpdate r;
  r.delta_v = Matrix(grad_v.rows(), grad_v.cols());
  r.delta_w = Matrix(grad_w.rows(), grad_w.cols());
  kernels::axpy(r.delta_v, -eta, grad_v);
  kernels::axpy(r.delta_w, -eta, grad_w);
  r.state = state;
  kernels::axpy(r.state.v, 1.0, r.delta_v);
  kernels::axpy(r.state.w, 1.0, r.delta_w);
  return r;
}

MomentumUpdate momentum_form_update(const NetworkState& state, const GradientState& grads,
                                    double eta, double lambda, const ForwardTrace& trace,
                                    std::span<const double> e) {
  if (std::abs(grads.prev_eta) < 1e-12) {
    throw DegenerateMomentumError("momentum_form_update: previous learning rate is zero");
  }
  if (!std::isfinite(eta)) {
    throw std::invalid_argument("momentum_form_update: eta must be finite");
  }
  if (!(lambda >= 0.0) || !(lambda <= 1.0)) {
    throw std::invalid_argument("momentum_form_update: lambda must lie in [0, 1]");
  }
  if (!grads.prev_delta_v.same_shape(state.v) || !grads.prev_delta_w.same_shape(state.w)) {
    throw std::invalid_argument("momentum_form_update: dimension mismatch");
  }

  const double ratio = eta / grads.prev_eta * lambda;
  const Vector ef = error_times_fprime(trace, e);

  Matrix delta_v = grads.prev_delta_v;
  kernels::rank1_decay(delta_v, ratio, eta, trace.s_vec, ef);

  const Matrix v_bar = extract_v_bar(state.v);
  Vector q(v_bar.rows());
  kernels::matvec(v_bar, ef, q);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] *= trace.s_prime[i];
  Matrix delta_w = grads.prev_delta_w;
  kernels::rank1_decay(delta_w, ratio, eta, q, trace.x_aug);

  MomentumUpdate r;
  r.state = state;
  kernels::axpy(r.state.v, 1.0, delta_v);
  kernels::axpy(r.state.w, 1.0, delta_w);
  r.grads = grads;
  r.grads.prev_delta_v = delta_v;
  r.grads.prev_delta_w = delta_w;
  r.grads.prev_eta = eta;
  r.delta_v = std::move(delta_v);
  r.delta_w = std::move(delta_w);
  return r;
}

}  // namespace rbp
