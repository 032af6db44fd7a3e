#include "trihalo/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace trihalo {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  DenseMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(rows[r][c])) throw std::invalid_argument("non-finite matrix entry");
      m(r, c) = rows[r][c];
    }
  }
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("matrix-vector size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) sum += (*this)(r, c) * x[c];
    y[r] = sum;
  }
  return y;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product size mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ail * b(l, j);
    }
  }
  return c;
}

HouseholderQr::HouseholderQr(const DenseMatrix& a)
    : rows_(a.rows()), cols_(a.cols()), qr_(a), beta_(a.cols()), diag_(a.cols()) {
  if (cols_ == 0 || rows_ < cols_) {
    throw std::invalid_argument("least squares needs rows >= cols >= 1, got " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < rows_; ++i) norm += qr_(i, j) * qr_(i, j);
    norm = std::sqrt(norm);
    const double alpha = qr_(j, j) > 0.0 ? -norm : norm;
    // v = x - alpha e1, stored in place with v_0 in the diagonal slot.
    const double v0 = qr_(j, j) - alpha;
    double vnorm2 = v0 * v0;
    for (std::size_t i = j + 1; i < rows_; ++i) vnorm2 += qr_(i, j) * qr_(i, j);
    beta_[j] = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
    qr_(j, j) = v0;
    for (std::size_t c = j + 1; c < cols_; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < rows_; ++i) dot += qr_(i, j) * qr_(i, c);
      const double scale = beta_[j] * dot;
      for (std::size_t i = j; i < rows_; ++i) qr_(i, c) -= scale * qr_(i, j);
    }
    diag_[j] = alpha;
  }

  double largest = 0.0;
  for (double d : diag_) largest = std::max(largest, std::abs(d));
  double smallest = largest;
  for (std::size_t j = 0; j < cols_; ++j) {
    const double d = std::abs(diag_[j]);
    if (!(d >= kRankTolerance * largest) || largest == 0.0) {
      throw SingularFitError(j, "rank-deficient least-squares matrix: column " +
                                    std::to_string(j) + " is linearly dependent");
    }
    smallest = std::min(smallest, d);
  }
  condition_ = largest / smallest;
}

std::vector<double> HouseholderQr::solve(std::span<const double> b) const {
  if (b.size() != rows_) throw std::invalid_argument("right-hand side size mismatch");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t j = 0; j < cols_; ++j) {
    double dot = 0.0;
    for (std::size_t i = j; i < rows_; ++i) dot += qr_(i, j) * y[i];
    const double scale = beta_[j] * dot;
    for (std::size_t i = j; i < rows_; ++i) y[i] -= scale * qr_(i, j);
  }
  std::vector<double> x(cols_);
  for (std::size_t jj = cols_; jj-- > 0;) {
    double sum = y[jj];
    for (std::size_t c = jj + 1; c < cols_; ++c) sum -= qr_(jj, c) * x[c];
    x[jj] = sum / diag_[jj];
  }
  return x;
}

LeastSquaresSolution qr_least_squares(const DenseMatrix& a, std::span<const double> b) {
  const HouseholderQr qr(a);
  return {qr.solve(b), qr.condition_estimate()};
}

DenseMatrix solve_pseudoinverse_rows(const DenseMatrix& a, double* condition_estimate) {
  const HouseholderQr qr(a);
  DenseMatrix pinv(a.cols(), a.rows());
  std::vector<double> unit(a.rows(), 0.0);
  for (std::size_t q = 0; q < a.rows(); ++q) {
    unit[q] = 1.0;
    const std::vector<double> column = qr.solve(unit);
    for (std::size_t j = 0; j < a.cols(); ++j) pinv(j, q) = column[j];
    unit[q] = 0.0;
  }
  if (condition_estimate) *condition_estimate = qr.condition_estimate();
  return pinv;
}

}  // namespace trihalo
