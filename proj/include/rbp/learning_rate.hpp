#pragma once

#include <cstdint>
#include <span>

#include "rbp/network.hpp"

namespace rbp {

// Everything computed while choosing the step size for one sample.
struct RateRecord {
  Vector epsilon;        // coupling of the previous gradient history to the current trace
  Matrix zeta;           // curvature-like out_dim x out_dim matrix, symmetric PSD
  double eta_star = 0.0;
  double denom = 0.0;    // || zeta e - lambda epsilon ||^2
  bool clamped = false;  // denominator hit the degeneracy guard; step skipped
};

// epsilon(t-1) = diag(f') [grad_v(t-1)^T S + Vbar^T diag(s') grad_w(t-1) x].
// Gradient matrices are the state from the previous step; the trace is the
// current forward pass.
Vector compute_epsilon(const ForwardTrace& trace, const Matrix& grad_v_prev,
                       const Matrix& grad_w_prev, const Matrix& v_bar);

// zeta(t) = diag(f') [ (S^T S) I + (x^T x) Vbar^T diag(s')^2 Vbar ] diag(f').
Matrix compute_zeta(const ForwardTrace& trace, const Matrix& v_bar);

// eta*(t) = d^T e / d^T d with d = zeta e - lambda epsilon. When d^T d is at
// or below the guard the rate is 0 and the record is flagged clamped.
RateRecord optimal_eta(const Matrix& zeta, std::span<const double> e, double lambda,
                       std::span<const double> epsilon, double guard);

// One-step error prediction: e + eta lambda epsilon - eta zeta e.
Vector predicted_error(std::span<const double> e, double eta, const Matrix& zeta, double lambda,
                       std::span<const double> epsilon);

// The O(1/t) baseline: eta0 / (1 + t beta eta0).
double decayed_eta(double eta0, double beta, std::uint64_t t);

}  // namespace rbp
