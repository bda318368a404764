#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "rbp/linalg.hpp"

namespace rbp::kernels::par {

namespace {

// Work below these sizes is not worth a fork/join. Streaming kernels move
// two doubles per flop, so their break-even sits far higher than the
// transcendental maps.
constexpr std::ptrdiff_t kGrain = 1 << 18;
constexpr std::ptrdiff_t kGrainTanh = 1 << 14;

}  // namespace

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<std::ptrdiff_t>(a.size()) < kGrain) {
    serial::matvec(a, x, y);
    return;
  }
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw std::invalid_argument("matvec: dimension mismatch");
  }
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(a.cols());
  const double* data = a.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double* row = data + i * cols;
    double acc = 0.0;
    for (std::ptrdiff_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<std::ptrdiff_t>(a.size()) < kGrain) {
    serial::matvec_t(a, x, y);
    return;
  }
  if (x.size() != a.rows() || y.size() != a.cols()) {
    throw std::invalid_argument("matvec_t: dimension mismatch");
  }
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i < rows; ++i) acc += a(i, j) * x[i];
    y[j] = acc;
  }
}

void rank1_decay(Matrix& c, double decay, double scale, std::span<const double> u,
                 std::span<const double> v) {
  if (static_cast<std::ptrdiff_t>(c.size()) < kGrain) {
    serial::rank1_decay(c, decay, scale, u, v);
    return;
  }
  if (u.size() != c.rows() || v.size() != c.cols()) {
    throw std::invalid_argument("rank1_decay: dimension mismatch");
  }
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(c.rows());
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(c.cols());
  double* data = c.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* row = data + i * cols;
    const double su = scale * u[i];
    for (std::ptrdiff_t j = 0; j < cols; ++j) row[j] = decay * row[j] + su * v[j];
  }
}

void axpy(Matrix& y, double alpha, const Matrix& x) {
  if (static_cast<std::ptrdiff_t>(y.size()) < kGrain) {
    serial::axpy(y, alpha, x);
    return;
  }
  if (!y.same_shape(x)) throw std::invalid_argument("axpy: dimension mismatch");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
  double* yd = y.data();
  const double* xd = x.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) yd[i] += alpha * xd[i];
}

void gram_weighted(const Matrix& a, std::span<const double> w, Matrix& g) {
  const std::ptrdiff_t flops =
      static_cast<std::ptrdiff_t>(a.rows() * a.cols() * (a.cols() + 1) / 2);
  if (flops < kGrain) {
    serial::gram_weighted(a, w, g);
    return;
  }
  if (w.size() != a.rows() || g.rows() != a.cols() || g.cols() != a.cols()) {
    throw std::invalid_argument("gram_weighted: dimension mismatch");
  }
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < cols; ++k) {
    for (std::ptrdiff_t l = k; l < cols; ++l) {
      double acc = 0.0;
      for (std::ptrdiff_t i = 0; i < rows; ++i) acc += w[i] * a(i, k) * a(i, l);
      g(k, l) = acc;
      g(l, k) = acc;
    }
  }
}

void tanh_map(std::span<const double> z, double u0, std::span<double> s) {
  if (static_cast<std::ptrdiff_t>(z.size()) < kGrainTanh) {
    serial::tanh_map(z, u0, s);
    return;
  }
  if (z.size() != s.size()) throw std::invalid_argument("tanh_map: dimension mismatch");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) s[i] = std::tanh(z[i] / u0);
}

void tanh_deriv_map(std::span<const double> s, double u0, std::span<double> d) {
  if (static_cast<std::ptrdiff_t>(s.size()) < kGrainTanh) {
    serial::tanh_deriv_map(s, u0, d);
    return;
  }
  if (s.size() != d.size()) throw std::invalid_argument("tanh_deriv_map: dimension mismatch");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) d[i] = (1.0 - s[i] * s[i]) / u0;
}

}  // namespace rbp::kernels::par
