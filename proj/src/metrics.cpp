#include <cmath>
#include <stdexcept>

#include "rbp/metrics.hpp"

namespace rbp {

Matrix projection_matrix(std::span<const double> d) {
  const double dd = kernels::dot(d, d);
  if (!(dd > 0.0) || !std::isfinite(dd)) {
    throw std::invalid_argument("projection_matrix: direction must be nonzero and finite");
  }
  Matrix m = Matrix::identity(d.size());
  kernels::rank1_decay(m, 1.0, -1.0 / dd, d, d);
  return m;
}

double spectral_norm_check(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("spectral_norm_check: matrix must be square");
  }
  const std::size_t n = m.rows();
  if (n == 0) return 0.0;

  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector mv(n);
  Vector bv(n);
  double sigma2 = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    kernels::matvec(m, v, mv);
    kernels::matvec_t(m, mv, bv);  // (M^T M) v
    const double norm = kernels::norm2(bv);
    if (norm == 0.0) return 0.0;
    const double rayleigh = kernels::dot(v, bv);  // v normalized, so this is sigma^2
    for (std::size_t i = 0; i < n; ++i) v[i] = bv[i] / norm;
    if (std::abs(rayleigh - sigma2) <= 1e-10 * std::max(1.0, std::abs(rayleigh))) {
      sigma2 = rayleigh;
      break;
    }
    sigma2 = rayleigh;
  }
  return std::sqrt(std::max(sigma2, 0.0));
}

RunMetrics update_metrics(const RunMetrics& prev, std::span<const double> e, double eta,
                          double lambda) {
  const double ee = kernels::dot(e, e);
  RunMetrics m;
  m.step = prev.step + 1;
  m.e2 = 0.5 * ee;
  m.rmse_accum = prev.rmse_accum + ee;
  m.rmse = m.rmse_accum / static_cast<double>(m.step + 1);
  m.eta_used = eta;
  m.lambda_used = lambda;
  return m;
}

MonotonicityReport monotonicity_monitor(std::span<const double> e2_history, double tolerance) {
  if (e2_history.empty()) {
    throw std::invalid_argument("monotonicity_monitor: history must be nonempty");
  }
  MonotonicityReport r;
  for (std::size_t t = 0; t + 1 < e2_history.size(); ++t) {
    if (e2_history[t + 1] > e2_history[t] + tolerance) {
      ++r.violations;
      r.where.push_back(t);
    }
  }
  if (e2_history.size() > 1) {
    r.fraction = static_cast<double>(r.violations) /
                 static_cast<double>(e2_history.size() - 1);
  }
  return r;
}

}  // namespace rbp
