#pragma once

// Baseline linear schemes: tensor-product d-linear interpolation and
// averaging restriction, and their collapsed single-matrix form.

#include <optional>
#include <vector>

#include "trihalo/csr.hpp"
#include "trihalo/geometry.hpp"
#include "trihalo/linalg.hpp"

namespace trihalo {

struct AxisOperator {
  enum class Kind { tangential, normal };
  Kind kind = Kind::tangential;
  Role role = Role::interpolate;
  DenseMatrix matrix;
};

// Interpolation: 3p x p tangentially, k x 2k along the normal. The two
// extreme fine cells of each tangential line extrapolate with the slope of
// the two nearest coarse centres; p == 1 degenerates to a copy.
AxisOperator build_axis_tangential(int p);
AxisOperator build_axis_normal(int k);

// Restriction: p x 3p means of the three fine children tangentially; along
// the normal a coarse halo layer averages its three fine children when the
// source depth holds all of them and is otherwise linearly extrapolated from
// the two fine layers nearest its centre.
AxisOperator build_axis_tangential_restrict(int p);
AxisOperator build_axis_normal_restrict(int k);

/// Applies the three axis operators one axis at a time in the reference
/// frame (tangential 1, tangential 2, then normal). Owns its scratch so that
/// repeated application does not allocate.
class TensorKernel {
 public:
  static TensorKernel interpolation(int p, int k, int segment);
  static TensorKernel restriction(int p, int k, std::optional<Half> half);

  const RegionShape& source() const { return source_; }
  const RegionShape& target() const { return target_; }

  void apply(const HaloBuffer& reference_source, HaloBuffer& reference_target);

 private:
  struct AxisRows {
    DenseMatrix matrix;
    int first_row = 0;
    int count = 0;
  };
  TensorKernel(RegionShape source, RegionShape target, AxisRows normal, AxisRows t1,
               AxisRows t2);

  RegionShape source_;
  RegionShape target_;
  AxisRows normal_;
  AxisRows t1_;
  AxisRows t2_;
  std::vector<double> stage1_;
  std::vector<double> stage2_;
};

/// World-frame application of the tensor scheme to one segment.
HaloBuffer apply_tensor_interpolate(const FaceConfig& cfg, const HaloBuffer& coarse);
/// World-frame averaging restriction into the coarse halo (or one half of it).
HaloBuffer apply_tensor_restrict(const FaceConfig& cfg, const HaloBuffer& fine,
                                 std::optional<Half> half = std::nullopt);

/// The tensor product collapsed into one CSR matrix in the reference frame.
/// `key.part` selects a segment / half or the whole face.
CsrOperator collapse_to_matrix(const OperatorKey& key);
CsrOperator collapse_to_matrix(const FaceConfig& cfg, Role role);

}  // namespace trihalo
