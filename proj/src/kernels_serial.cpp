#include <cassert>
#include <cmath>
#include <stdexcept>

#include "rbp/linalg.hpp"

namespace rbp {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.span()); }

namespace kernels {

namespace serial {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw std::invalid_argument("matvec: dimension mismatch");
  }
  const double* row = a.data();
  for (std::size_t i = 0; i < a.rows(); ++i, row += a.cols()) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.rows() || y.size() != a.cols()) {
    throw std::invalid_argument("matvec_t: dimension mismatch");
  }
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, j) * x[i];
    y[j] = acc;
  }
}

void rank1_decay(Matrix& c, double decay, double scale, std::span<const double> u,
                 std::span<const double> v) {
  if (u.size() != c.rows() || v.size() != c.cols()) {
    throw std::invalid_argument("rank1_decay: dimension mismatch");
  }
  double* row = c.data();
  for (std::size_t i = 0; i < c.rows(); ++i, row += c.cols()) {
    const double su = scale * u[i];
    for (std::size_t j = 0; j < c.cols(); ++j) row[j] = decay * row[j] + su * v[j];
  }
}

void axpy(Matrix& y, double alpha, const Matrix& x) {
  if (!y.same_shape(x)) throw std::invalid_argument("axpy: dimension mismatch");
  double* yd = y.data();
  const double* xd = x.data();
  for (std::size_t i = 0; i < y.size(); ++i) yd[i] += alpha * xd[i];
}

void gram_weighted(const Matrix& a, std::span<const double> w, Matrix& g) {
  if (w.size() != a.rows() || g.rows() != a.cols() || g.cols() != a.cols()) {
    throw std::invalid_argument("gram_weighted: dimension mismatch");
  }
  for (std::size_t k = 0; k < a.cols(); ++k) {
    for (std::size_t l = k; l < a.cols(); ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) acc += w[i] * a(i, k) * a(i, l);
      g(k, l) = acc;
      g(l, k) = acc;
    }
  }
}

void tanh_map(std::span<const double> z, double u0, std::span<double> s) {
  if (z.size() != s.size()) throw std::invalid_argument("tanh_map: dimension mismatch");
  for (std::size_t i = 0; i < z.size(); ++i) s[i] = std::tanh(z[i] / u0);
}

void tanh_deriv_map(std::span<const double> s, double u0, std::span<double> d) {
  if (s.size() != d.size()) throw std::invalid_argument("tanh_deriv_map: dimension mismatch");
  for (std::size_t i = 0; i < s.size(); ++i) d[i] = (1.0 - s[i] * s[i]) / u0;
}

}  // namespace serial

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace kernels
}  // namespace rbp
