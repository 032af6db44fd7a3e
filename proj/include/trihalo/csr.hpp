#pragma once

// Compressed-sparse-row operators acting on AoS halo buffers.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trihalo/geometry.hpp"
#include "trihalo/linalg.hpp"

namespace trihalo {

enum class Scheme : int { tensor_linear = 0, matrix_linear = 1, order2 = 2, order3 = 3 };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);
inline constexpr Scheme kAllSchemes[] = {Scheme::tensor_linear, Scheme::matrix_linear,
                                         Scheme::order2, Scheme::order3};

/// Identifies what an operator was built for. `part` is a segment in [0,8]
/// for interpolation, a Half for restriction, or kWholeFace.
struct OperatorKey {
  static constexpr int kWholeFace = -1;

  Scheme scheme = Scheme::matrix_linear;
  Role role = Role::interpolate;
  int p = 1;
  int k = 1;
  int part = kWholeFace;

  static OperatorKey interpolation(Scheme scheme, int p, int k, int segment = kWholeFace) {
    return {scheme, Role::interpolate, p, k, segment};
  }
  static OperatorKey restriction(Scheme scheme, int p, int k, std::optional<Half> half) {
    return {scheme, Role::restrict, p, k, half ? static_cast<int>(*half) : kWholeFace};
  }
  std::optional<Half> half() const {
    if (role != Role::restrict || part == kWholeFace) return std::nullopt;
    return static_cast<Half>(part);
  }
  std::string fingerprint() const;

  auto operator<=>(const OperatorKey&) const = default;
};

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Metadata carried along with an operator.
struct OperatorInfo {
  OperatorKey key;
  RegionShape source;
  RegionShape target;
  // Largest condition estimate over all derivative fits (1 for linear schemes).
  double max_condition = 1.0;
  // Number of fits whose condition estimate crossed the warning threshold.
  int ill_conditioned_fits = 0;

  friend bool operator==(const OperatorInfo&, const OperatorInfo&) = default;
};

class CsrOperator {
 public:
  static constexpr double kDropTolerance = 1e-14;

  CsrOperator() = default;

  /// Canonical CSR: sorted columns, duplicates summed, |v| < 1e-14 dropped.
  static CsrOperator from_triplets(std::size_t n_rows, std::size_t n_cols,
                                   std::vector<Triplet> entries);
  static CsrOperator from_triplets(std::vector<Triplet> entries, const OperatorInfo& info);

  std::size_t n_rows() const { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int32_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  const OperatorInfo& info() const { return info_; }
  const OperatorKey& key() const { return info_.key; }
  void set_info(const OperatorInfo& info);

  std::size_t max_row_nnz() const;
  std::vector<Triplet> triplets() const;
  DenseMatrix to_dense() const;

  friend bool operator==(const CsrOperator&, const CsrOperator&) = default;

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::int32_t> col_indices_;
  std::vector<double> values_;
  OperatorInfo info_;
};

/// out[r*u + c] = sum_j values[j] * src[col[j]*u + c]. Rejects non-finite input.
HaloBuffer apply(const CsrOperator& op, const HaloBuffer& src);

/// Unchecked hot path: spans hold n_cols*u and n_rows*u values.
void apply_into(const CsrOperator& op, std::span<const double> src, std::span<double> dst,
                int u);

/// Rows of a whole-face interpolation operator that fill one segment.
CsrOperator extract_segment(const CsrOperator& full_face, int segment);

/// Text dump: header `n_rows n_cols nnz scheme_tag p k`, then `row col value`
/// per entry with 17 significant digits.
void write_dump(std::ostream& out, const CsrOperator& op);
std::string dump_to_string(const CsrOperator& op);
CsrOperator read_dump(std::istream& in);

}  // namespace trihalo
