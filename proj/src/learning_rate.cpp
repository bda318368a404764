#include <cmath>
#include <stdexcept>

#include "rbp/learning_rate.hpp"

namespace rbp {

Vector compute_epsilon(const ForwardTrace& trace, const Matrix& grad_v_prev,
                       const Matrix& grad_w_prev, const Matrix& v_bar) {
  const std::size_t on = trace.f_prime.size();
  const std::size_t hn = trace.s_prime.size();
  if (grad_v_prev.rows() != trace.s_vec.size() || grad_v_prev.cols() != on ||
      grad_w_prev.rows() != hn || grad_w_prev.cols() != trace.x_aug.size() ||
      v_bar.rows() != hn || v_bar.cols() != on) {
    throw std::invalid_argument("compute_epsilon: dimension mismatch");
  }

  Vector a(on);
  kernels::matvec_t(grad_v_prev, trace.s_vec, a);  // grad_v^T S

  Vector b(hn);
  kernels::matvec(grad_w_prev, trace.x_aug, b);  // grad_w x
  for (std::size_t i = 0; i < hn; ++i) b[i] *= trace.s_prime[i];

  Vector c(on);
  kernels::matvec_t(v_bar, b, c);  // Vbar^T diag(s') grad_w x

  Vector eps(on);
  for (std::size_t i = 0; i < on; ++i) eps[i] = trace.f_prime[i] * (a[i] + c[i]);
  return eps;
}

Matrix compute_zeta(const ForwardTrace& trace, const Matrix& v_bar) {
  const std::size_t on = trace.f_prime.size();
  const std::size_t hn = trace.s_prime.size();
  if (v_bar.rows() != hn || v_bar.cols() != on) {
    throw std::invalid_argument("compute_zeta: dimension mismatch");
  }

  const double s2 = kernels::dot(trace.s_vec, trace.s_vec);
  const double x2 = kernels::dot(trace.x_aug, trace.x_aug);

  // Fold x^T x into the Gram weights: zeta core = (x^T x) Vbar^T diag(s')^2 Vbar.
  Vector w(hn);
  for (std::size_t i = 0; i < hn; ++i) w[i] = x2 * trace.s_prime[i] * trace.s_prime[i];

  Matrix zeta(on, on);
  kernels::gram_weighted(v_bar, w, zeta);
  for (std::size_t k = 0; k < on; ++k) zeta(k, k) += s2;
  for (std::size_t k = 0; k < on; ++k) {
    for (std::size_t l = 0; l < on; ++l) {
      zeta(k, l) *= trace.f_prime[k] * trace.f_prime[l];
    }
  }
  return zeta;
}

RateRecord optimal_eta(const Matrix& zeta, std::span<const double> e, double lambda,
                       std::span<const double> epsilon, double guard) {
  if (!(guard > 0.0)) throw std::invalid_argument("optimal_eta: guard must be positive");
  if (zeta.rows() != zeta.cols() || zeta.rows() != e.size() || epsilon.size() != e.size()) {
    throw std::invalid_argument("optimal_eta: dimension mismatch");
  }
  if (!all_finite(zeta) || !all_finite(e) || !all_finite(epsilon) || !std::isfinite(lambda)) {
    throw std::invalid_argument("optimal_eta: non-finite input");
  }

  Vector d(e.size());
  kernels::matvec(zeta, e, d);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= lambda * epsilon[i];

  RateRecord rec;
  rec.epsilon.assign(epsilon.begin(), epsilon.end());
  rec.zeta = zeta;
  rec.denom = kernels::dot(d, d);
  if (rec.denom <= guard) {
    rec.eta_star = 0.0;
    rec.clamped = true;
  } else {
    rec.eta_star = kernels::dot(d, e) / rec.denom;
    rec.clamped = false;
  }
  return rec;
}

Vector predicted_error(std::span<const double> e, double eta, const Matrix& zeta, double lambda,
                       std::span<const double> epsilon) {
  if (zeta.rows() != zeta.cols() || zeta.rows() != e.size() || epsilon.size() != e.size()) {
    throw std::invalid_argument("predicted_error: dimension mismatch");
  }
  Vector ze(e.size());
  kernels::matvec(zeta, e, ze);
  Vector out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    out[i] = e[i] + eta * lambda * epsilon[i] - eta * ze[i];
  }
  return out;
}

double decayed_eta(double eta0, double beta, std::uint64_t t) {
  if (!(eta0 > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("decayed_eta: eta0 and beta must be positive");
  }
  return eta0 / (1.0 + static_cast<double>(t) * beta * eta0);
}

}  // namespace rbp
