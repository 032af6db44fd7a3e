#pragma once

// Second- and third-order operators built from local Taylor expansions.
//
// For every target cell the closest source cell is located, the derivatives
// at that source cell are fitted by least squares over a block stencil, and
// the Taylor polynomial is evaluated at the target centre. Writing the
// derivatives as linear weights on the stencil values turns each target cell
// into a single sparse row.

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "trihalo/csr.hpp"
#include "trihalo/geometry.hpp"
#include "trihalo/linalg.hpp"

namespace trihalo {

inline constexpr double kConditionWarningThreshold = 1e12;

/// Raised when the source region cannot supply a well-posed fit.
class StencilInfeasibleError : public ConfigError {
 public:
  StencilInfeasibleError(const std::string& what, int minimum_p, int minimum_k)
      : ConfigError(what), minimum_p_(minimum_p), minimum_k_(minimum_k) {}
  int minimum_p() const { return minimum_p_; }
  int minimum_k() const { return minimum_k_; }

 private:
  int minimum_p_;
  int minimum_k_;
};

/// Monomials x^a y^b z^c / (a! b! c!) with a+b+c <= order, graded
/// lexicographic order.
class TaylorBasis {
 public:
  static TaylorBasis of_order(int order);

  int order() const { return order_; }
  std::size_t size() const { return exponents_.size(); }
  const std::vector<std::array<int, 3>>& exponents() const { return exponents_; }
  int degree(std::size_t j) const {
    return exponents_[j][0] + exponents_[j][1] + exponents_[j][2];
  }
  double evaluate(std::size_t j, const std::array<double, 3>& x) const;
  std::vector<double> evaluate_all(const std::array<double, 3>& x) const;

 private:
  int order_ = 0;
  std::vector<std::array<int, 3>> exponents_;
  std::vector<double> normalization_;
};

struct StencilSpec {
  CellIndex centre{};
  std::vector<CellIndex> offsets;
  std::size_t size() const { return offsets.size(); }
};

struct DerivativeFit {
  // n x s: derivative j = sum_q weights(j,q) * value(centre + offsets[q]).
  DenseMatrix weights;
  std::vector<CellIndex> offsets;
  double condition_estimate = 1.0;
};

/// Extent per axis of the stencil for a given order (3 or 5).
int stencil_width(int order);
int minimum_patch_size(Role role, int order);
int minimum_halo_depth(int order);

/// Source cell whose centre is closest to the target centre, ties broken
/// towards the smaller index.
CellIndex nearest_source_cell(const CellIndex& target, const RegionShape& target_region,
                              const RegionShape& source_region);

/// Order 2: 3x3x3 block. Order 3: the same block plus the six cells two away
/// along the axes (33 cells). The stencil is shifted inward until it fits the
/// region and clipped on axes shorter than its extent.
StencilSpec select_stencil(const CellIndex& centre, const RegionShape& region, int order);

/// Least-squares derivative weights. Offsets enter in units of the source
/// spacing; `spacing` rescales the rows to physical derivatives.
DerivativeFit build_derivative_fit(const StencilSpec& stencil, const TaylorBasis& basis,
                                   double spacing = 1.0);

struct TaylorRowPlan {
  CellIndex target{};
  CellIndex source{};
  // Target centre minus source centre, in units of the source spacing.
  std::array<double, 3> offset{};
};
std::vector<TaylorRowPlan> plan_taylor_rows(const RegionShape& target,
                                            const RegionShape& source);

/// Reference-frame interpolation for a segment or the whole face.
CsrOperator build_interpolation(int p, int k, int order,
                                int segment = OperatorKey::kWholeFace);
CsrOperator build_interpolation(const FaceConfig& cfg, int order);
/// Reference-frame restriction into the coarse halo or one half of it.
CsrOperator build_restriction(int p, int k, int order, std::optional<Half> half);
CsrOperator build_restriction(const FaceConfig& cfg, int order, std::optional<Half> half);

int scheme_order(Scheme scheme);

}  // namespace trihalo
