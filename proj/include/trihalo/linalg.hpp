#pragma once

// Small dense linear algebra for operator construction: Householder QR and
// least-squares solves of tall systems.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trihalo {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::span<const double> data() const { return data_; }

  DenseMatrix transposed() const;
  std::vector<double> multiply(std::span<const double> x) const;

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Raised when a least-squares matrix is numerically rank deficient.
class SingularFitError : public std::runtime_error {
 public:
  SingularFitError(std::size_t column, const std::string& what)
      : std::runtime_error(what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

struct LeastSquaresSolution {
  std::vector<double> coefficients;
  // max |R_ii| / min |R_ii| of the triangular factor.
  double condition_estimate = 1.0;
};

/// Householder QR of an s x n matrix with s >= n. Factors once; solves any
/// number of right-hand sides.
class HouseholderQr {
 public:
  // Columns with |R_ii| below this fraction of max |R_ii| count as dependent.
  static constexpr double kRankTolerance = 1e-12;

  explicit HouseholderQr(const DenseMatrix& a);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double condition_estimate() const { return condition_; }

  /// Minimizer of ||A x - b||_2.
  std::vector<double> solve(std::span<const double> b) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  DenseMatrix qr_;  // R above the diagonal, Householder vectors below
  std::vector<double> beta_;
  std::vector<double> diag_;
  double condition_ = 1.0;
};

LeastSquaresSolution qr_least_squares(const DenseMatrix& a, std::span<const double> b);

/// A+ (n x s), so that x = A+ q solves the least-squares problem for any q.
DenseMatrix solve_pseudoinverse_rows(const DenseMatrix& a, double* condition_estimate = nullptr);

}  // namespace trihalo
