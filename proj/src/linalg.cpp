#include "rbp/linalg.hpp"

// Production entry points. The par kernels fall back to the serial reference
// below the grain threshold, so these are safe for any problem size and
// degrade to pure serial when the build has no OpenMP.

namespace rbp::kernels {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y) {
  par::matvec(a, x, y);
}

void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> y) {
  par::matvec_t(a, x, y);
}

void rank1_decay(Matrix& c, double decay, double scale, std::span<const double> u,
                 std::span<const double> v) {
  par::rank1_decay(c, decay, scale, u, v);
}

void axpy(Matrix& y, double alpha, const Matrix& x) { par::axpy(y, alpha, x); }

void gram_weighted(const Matrix& a, std::span<const double> w, Matrix& g) {
  par::gram_weighted(a, w, g);
}

void tanh_map(std::span<const double> z, double u0, std::span<double> s) {
  par::tanh_map(z, u0, s);
}

void tanh_deriv_map(std::span<const double> s, double u0, std::span<double> d) {
  par::tanh_deriv_map(s, u0, d);
}

}  // namespace rbp::kernels
