#include "trihalo/linear_ops.hpp"

#include <algorithm>

namespace trihalo {

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Linear interpolation row in index space: position = numerator / 3 in units
// of the source spacing, clamped to [0, count-2] for extrapolation.
void linear_row(DenseMatrix& m, std::size_t row, int numerator, int count) {
  if (count == 1) {
    m(row, 0) = 1.0;
    return;
  }
  const int left = std::clamp(floor_div(numerator, 3), 0, count - 2);
  const double right_weight = (numerator - 3 * left) / 3.0;
  m(row, left) += 1.0 - right_weight;
  m(row, left + 1) += right_weight;
}

void require_positive(int value, const char* name) {
  if (value < 1) throw ConfigError(std::string(name) + " must be >= 1");
}

}  // namespace

AxisOperator build_axis_tangential(int p) {
  require_positive(p, "p");
  AxisOperator op{AxisOperator::Kind::tangential, Role::interpolate, DenseMatrix(3 * p, p)};
  // Fine centre m+1/2 sits at (m-1)/3 in coarse index units.
  for (int m = 0; m < 3 * p; ++m) linear_row(op.matrix, m, m - 1, p);
  return op;
}

AxisOperator build_axis_normal(int k) {
  require_positive(k, "k");
  AxisOperator op{AxisOperator::Kind::normal, Role::interpolate, DenseMatrix(k, 2 * k)};
  // Fine layer i (centre i-k+1/2) sits at (i+2k-1)/3 in coarse index units.
  for (int i = 0; i < k; ++i) linear_row(op.matrix, i, i + 2 * k - 1, 2 * k);
  return op;
}

AxisOperator build_axis_tangential_restrict(int p) {
  require_positive(p, "p");
  AxisOperator op{AxisOperator::Kind::tangential, Role::restrict, DenseMatrix(p, 3 * p)};
  for (int i = 0; i < p; ++i) {
    for (int d = 0; d < 3; ++d) op.matrix(i, 3 * i + d) = 1.0 / 3.0;
  }
  return op;
}

AxisOperator build_axis_normal_restrict(int k) {
  require_positive(k, "k");
  AxisOperator op{AxisOperator::Kind::normal, Role::restrict, DenseMatrix(k, 2 * k)};
  for (int j = 0; j < k; ++j) {
    // Coarse centre 3j+3/2 is fine index 3j+k+1; its children are k+3j..k+3j+2.
    const int centre = 3 * j + k + 1;
    if (centre + 1 <= 2 * k - 1) {
      for (int d = -1; d <= 1; ++d) op.matrix(j, centre + d) = 1.0 / 3.0;
    } else {
      const int left = std::clamp(centre, 0, 2 * k - 2);
      const double right_weight = centre - left;
      op.matrix(j, left) = 1.0 - right_weight;
      op.matrix(j, left + 1) = right_weight;
    }
  }
  return op;
}

TensorKernel::TensorKernel(RegionShape source, RegionShape target, AxisRows normal,
                           AxisRows t1, AxisRows t2)
    : source_(source),
      target_(target),
      normal_(std::move(normal)),
      t1_(std::move(t1)),
      t2_(std::move(t2)) {}

TensorKernel TensorKernel::interpolation(int p, int k, int segment) {
  FaceConfig{Axis::x, Side::negative, segment, p, k, 1}.validate();
  const auto offset = reference::segment_offset(p, segment);
  DenseMatrix tangential = build_axis_tangential(p).matrix;
  return TensorKernel(reference::coarse_source(p, k), reference::fine_segment(p, k, segment),
                      AxisRows{build_axis_normal(k).matrix, 0, k},
                      AxisRows{tangential, offset[0], p}, AxisRows{tangential, offset[1], p});
}

TensorKernel TensorKernel::restriction(int p, int k, std::optional<Half> half) {
  FaceConfig{Axis::x, Side::negative, 0, p, k, 1}.validate();
  const LayerRange layers = restriction_layers(k, half);
  DenseMatrix tangential = build_axis_tangential_restrict(p).matrix;
  return TensorKernel(reference::fine_source(p, k), reference::coarse_target(p, k, half),
                      AxisRows{build_axis_normal_restrict(k).matrix, layers.first, layers.count},
                      AxisRows{tangential, 0, p}, AxisRows{tangential, 0, p});
}

void TensorKernel::apply(const HaloBuffer& src, HaloBuffer& dst) {
  if (src.shape() != source_ || dst.shape() != target_ || src.unknowns() != dst.unknowns()) {
    throw ShapeError("tensor kernel buffers do not match " + source_.describe() + " -> " +
                     target_.describe());
  }
  const std::size_t u = src.unknowns();
  const int n0 = source_.extents[0], n1 = source_.extents[1], n2 = source_.extents[2];
  const int r0 = normal_.count, r1 = t1_.count, r2 = t2_.count;
  const std::size_t line = static_cast<std::size_t>(n0) * u;

  stage1_.assign(static_cast<std::size_t>(n2) * r1 * line, 0.0);
  stage2_.assign(static_cast<std::size_t>(r2) * r1 * line, 0.0);
  const double* in = src.values().data();

  // Tangential 1: (n0, n1, n2) -> (n0, r1, n2).
  for (int c2 = 0; c2 < n2; ++c2) {
    for (int a = 0; a < r1; ++a) {
      double* out = stage1_.data() + (static_cast<std::size_t>(c2) * r1 + a) * line;
      for (int b = 0; b < n1; ++b) {
        const double w = t1_.matrix(t1_.first_row + a, b);
        const double* block = in + (static_cast<std::size_t>(c2) * n1 + b) * line;
        for (std::size_t i = 0; i < line; ++i) out[i] += w * block[i];
      }
    }
  }
  // Tangential 2: (n0, r1, n2) -> (n0, r1, r2).
  for (int a = 0; a < r2; ++a) {
    for (int c1 = 0; c1 < r1; ++c1) {
      double* out = stage2_.data() + (static_cast<std::size_t>(a) * r1 + c1) * line;
      for (int b = 0; b < n2; ++b) {
        const double w = t2_.matrix(t2_.first_row + a, b);
        const double* block = stage1_.data() + (static_cast<std::size_t>(b) * r1 + c1) * line;
        for (std::size_t i = 0; i < line; ++i) out[i] += w * block[i];
      }
    }
  }
  // Normal: (n0, r1, r2) -> (r0, r1, r2).
  double* result = dst.values().data();
  for (std::size_t column = 0; column < static_cast<std::size_t>(r1) * r2; ++column) {
    const double* in_line = stage2_.data() + column * line;
    for (int a = 0; a < r0; ++a) {
      double* out = result + (column * r0 + a) * u;
      std::fill_n(out, u, 0.0);
      for (int b = 0; b < n0; ++b) {
        const double w = normal_.matrix(normal_.first_row + a, b);
        const double* cell = in_line + b * u;
        for (std::size_t c = 0; c < u; ++c) out[c] += w * cell[c];
      }
    }
  }
}

HaloBuffer apply_tensor_interpolate(const FaceConfig& cfg, const HaloBuffer& coarse) {
  cfg.validate();
  if (coarse.shape() != interp_source_shape(cfg)) {
    throw ShapeError("coarse buffer " + coarse.shape().describe() +
                     " does not match the interpolation source of " + cfg.describe());
  }
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  TensorKernel kernel = TensorKernel::interpolation(cfg.p, cfg.k, cfg.segment);
  HaloBuffer ref_src(kernel.source(), coarse.unknowns());
  HaloBuffer ref_dst(kernel.target(), coarse.unknowns());
  to_reference_into(frame, coarse, ref_src);
  kernel.apply(ref_src, ref_dst);
  HaloBuffer out(frame.to_world(kernel.target()), coarse.unknowns());
  from_reference_into(frame, ref_dst, out);
  return out;
}

HaloBuffer apply_tensor_restrict(const FaceConfig& cfg, const HaloBuffer& fine,
                                 std::optional<Half> half) {
  cfg.validate();
  if (fine.shape() != restrict_source_shape(cfg)) {
    throw ShapeError("fine buffer " + fine.shape().describe() +
                     " does not match the restriction source of " + cfg.describe());
  }
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  TensorKernel kernel = TensorKernel::restriction(cfg.p, cfg.k, half);
  HaloBuffer ref_src(kernel.source(), fine.unknowns());
  HaloBuffer ref_dst(kernel.target(), fine.unknowns());
  to_reference_into(frame, fine, ref_src);
  kernel.apply(ref_src, ref_dst);
  HaloBuffer out(frame.to_world(kernel.target()), fine.unknowns());
  from_reference_into(frame, ref_dst, out);
  return out;
}

CsrOperator collapse_to_matrix(const OperatorKey& key) {
  FaceConfig{Axis::x, Side::negative, 0, key.p, key.k, 1}.validate();
  const int p = key.p, k = key.k;
  const bool interp = key.role == Role::interpolate;
  const DenseMatrix normal = interp ? build_axis_normal(k).matrix : build_axis_normal_restrict(k).matrix;
  const DenseMatrix tangential =
      interp ? build_axis_tangential(p).matrix : build_axis_tangential_restrict(p).matrix;

  RegionShape source = interp ? reference::coarse_source(p, k) : reference::fine_source(p, k);
  RegionShape target;
  std::array<int, 3> row_offset{0, 0, 0};
  if (interp) {
    if (key.part == OperatorKey::kWholeFace) {
      target = reference::fine_face(p, k);
    } else {
      FaceConfig{Axis::x, Side::negative, key.part, p, k, 1}.validate();
      target = reference::fine_segment(p, k, key.part);
      const auto offset = reference::segment_offset(p, key.part);
      row_offset = {0, offset[0], offset[1]};
    }
  } else {
    target = reference::coarse_target(p, k, key.half());
    row_offset[0] = restriction_layers(k, key.half()).first;
  }

  std::vector<Triplet> entries;
  for (std::size_t row = 0; row < target.cell_count(); ++row) {
    const CellIndex t = target.delinearize(row);
    const int a0 = t[0] + row_offset[0], a1 = t[1] + row_offset[1], a2 = t[2] + row_offset[2];
    for (int b2 = 0; b2 < source.extents[2]; ++b2) {
      const double w2 = tangential(a2, b2);
      if (w2 == 0.0) continue;
      for (int b1 = 0; b1 < source.extents[1]; ++b1) {
        const double w1 = tangential(a1, b1);
        if (w1 == 0.0) continue;
        for (int b0 = 0; b0 < source.extents[0]; ++b0) {
          const double w0 = normal(a0, b0);
          if (w0 == 0.0) continue;
          entries.push_back({static_cast<std::int64_t>(row),
                             static_cast<std::int64_t>(source.linear({b0, b1, b2})),
                             w0 * w1 * w2});
        }
      }
    }
  }
  OperatorInfo info;
  info.key = key;
  info.key.scheme = Scheme::matrix_linear;
  info.source = source;
  info.target = target;
  return CsrOperator::from_triplets(std::move(entries), info);
}

CsrOperator collapse_to_matrix(const FaceConfig& cfg, Role role) {
  cfg.validate();
  return collapse_to_matrix(OperatorKey{Scheme::matrix_linear, role, cfg.p, cfg.k,
                                        OperatorKey::kWholeFace});
}

}  // namespace trihalo
