#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rbp {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Deliberately minimal: the heavy loops
// live in the kernels below, everything else is indexing.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

bool all_finite(std::span<const double> v);
bool all_finite(const Matrix& m);

namespace kernels {

// Serial reference kernels. These are the ground truth the OpenMP variants
// are tested against (exact equality, not tolerance).
namespace serial {

// y = A x
void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);
// y = A^T x
void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> y);
// C = decay * C + scale * u v^T
void rank1_decay(Matrix& c, double decay, double scale, std::span<const double> u,
                 std::span<const double> v);
// Y += alpha * X
void axpy(Matrix& y, double alpha, const Matrix& x);
// G = A^T diag(w) A   (G symmetric, filled on both triangles)
void gram_weighted(const Matrix& a, std::span<const double> w, Matrix& g);
// s[i] = tanh(z[i] / u0)
void tanh_map(std::span<const double> z, double u0, std::span<double> s);
// d[i] = (1 - s[i]^2) / u0
void tanh_deriv_map(std::span<const double> s, double u0, std::span<double> d);

}  // namespace serial

// OpenMP kernels. Parallelism is only across independent output elements;
// each element is accumulated in the same order as the serial reference, so
// the results are bit-identical for any thread count. Inputs below the grain
// threshold fall through to the serial kernels.
namespace par {

void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);
void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> y);
void rank1_decay(Matrix& c, double decay, double scale, std::span<const double> u,
                 std::span<const double> v);
void axpy(Matrix& y, double alpha, const Matrix& x);
void gram_weighted(const Matrix& a, std::span<const double> w, Matrix& g);
void tanh_map(std::span<const double> z, double u0, std::span<double> s);
void tanh_deriv_map(std::span<const double> s, double u0, std::span<double> d);

}  // namespace par

// Production entry points used by the library modules.
void matvec(const Matrix& a, std::span<const double> x, std::span<double> y);
void matvec_t(const Matrix& a, std::span<const double> x, std::span<double> y);
void rank1_decay(Matrix& c, double decay, double scale, std::span<const double> u,
                 std::span<const double> v);
void axpy(Matrix& y, double alpha, const Matrix& x);
void gram_weighted(const Matrix& a, std::span<const double> w, Matrix& g);
void tanh_map(std::span<const double> z, double u0, std::span<double> s);
void tanh_deriv_map(std::span<const double> s, double u0, std::span<double> d);

// Scalar reductions stay serial: a parallel reduction would reorder the
// floating-point sum and break bit-reproducibility.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace kernels
}  // namespace rbp
