#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbp/linalg.hpp"

namespace rbp {

// Per-step run statistics. step is the 0-based index of the last processed
// sample (-1 before any), so rmse == rmse_accum / (step + 1). rmse follows
// the running-mean convention: the mean over steps of the summed squared
// output errors, with no square root.
struct RunMetrics {
  std::int64_t step = -1;
  double e2 = 0.0;          // instantaneous 0.5 e^T e
  double rmse_accum = 0.0;  // running sum of e^T e
  double rmse = 0.0;
  double eta_used = 0.0;
  double lambda_used = 1.0;
};

// M = I - d d^T / d^T d. Symmetric, idempotent, annihilates d; spectral norm
// 1 for dimension >= 2 (0 for dimension 1, where the projection is empty).
Matrix projection_matrix(std::span<const double> d);

// Largest singular value by power iteration on M^T M (at most 50 iterations,
// relative tolerance 1e-10).
double spectral_norm_check(const Matrix& m);

RunMetrics update_metrics(const RunMetrics& prev, std::span<const double> e, double eta,
                          double lambda);

struct MonotonicityReport {
  std::size_t violations = 0;
  std::vector<std::size_t> where;  // indices t with e2[t+1] > e2[t] + tolerance
  double fraction = 0.0;           // violations / (len - 1), 0 for singleton history
};

// Counts increases of the instantaneous cost along a run. The descent
// guarantee holds for the one-step error prediction, not the simulated
// error, so this reports rather than asserts.
MonotonicityReport monotonicity_monitor(std::span<const double> e2_history, double tolerance);

}  // namespace rbp
