#include "trihalo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trihalo {

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

std::string to_string(Side side) { return side == Side::negative ? "negative" : "positive"; }
std::string to_string(Role role) { return role == Role::interpolate ? "interpolate" : "restrict"; }
std::string to_string(Half half) { return half == Half::inner ? "inner" : "outer"; }

Role parse_role(const std::string& text) {
  if (text == "interpolate" || text == "interpolation") return Role::interpolate;
  if (text == "restrict" || text == "restriction") return Role::restrict;
  throw ConfigError("unknown role '" + text + "'");
}

Half parse_half(const std::string& text) {
  if (text == "inner") return Half::inner;
  if (text == "outer") return Half::outer;
  throw ConfigError("unknown half '" + text + "'");
}

void FaceConfig::validate() const {
  if (p < 1) throw ConfigError("patch size p must be >= 1, got " + std::to_string(p));
  if (k < 1) throw ConfigError("halo depth k must be >= 1, got " + std::to_string(k));
  if (k > p) {
    throw ConfigError("halo depth k must not exceed patch size p (k=" + std::to_string(k) +
                      ", p=" + std::to_string(p) + ")");
  }
  if (u < 1) throw ConfigError("unknowns per cell u must be >= 1, got " + std::to_string(u));
  if (segment < 0 || segment >= kSegmentCount) {
    throw ConfigError("segment must lie in [0,8], got " + std::to_string(segment));
  }
}

std::string FaceConfig::describe() const {
  std::ostringstream out;
  out << "normal=" << to_string(normal_axis) << " coarse=" << to_string(coarse_side)
      << " segment=" << segment << " p=" << p << " k=" << k << " u=" << u;
  return out.str();
}

std::vector<FaceConfig> all_face_configs(int p, int k, int u) {
  std::vector<FaceConfig> configs;
  for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
    for (Side side : {Side::negative, Side::positive}) {
      for (int s = 0; s < kSegmentCount; ++s) {
        configs.push_back(FaceConfig{axis, side, s, p, k, u});
      }
    }
  }
  return configs;
}

CellIndex RegionShape::delinearize(std::size_t index) const {
  const auto n0 = static_cast<std::size_t>(extents[0]);
  const auto n1 = static_cast<std::size_t>(extents[1]);
  CellIndex c;
  c[0] = static_cast<int>(index % n0);
  index /= n0;
  c[1] = static_cast<int>(index % n1);
  c[2] = static_cast<int>(index / n1);
  return c;
}

std::string RegionShape::describe() const {
  std::ostringstream out;
  out << extents[0] << "x" << extents[1] << "x" << extents[2] << " (spacing " << spacing
      << "h)";
  return out.str();
}

LayerRange restriction_layers(int k, std::optional<Half> half) {
  const int inner = (k + 1) / 2;
  if (!half) return {0, k};
  if (*half == Half::inner) return {0, inner};
  return {inner, k - inner};
}

namespace reference {

RegionShape coarse_source(int p, int k) {
  return RegionShape{{2 * k, p, p}, kRefinementRatio,
                     {(-k + 0.5) * kRefinementRatio, 1.5, 1.5}};
}

RegionShape fine_face(int p, int k) {
  return RegionShape{{k, 3 * p, 3 * p}, 1, {-k + 0.5, 0.5, 0.5}};
}

std::array<int, 2> segment_offset(int p, int segment) {
  return {(segment % 3) * p, (segment / 3) * p};
}

RegionShape fine_segment(int p, int k, int segment) {
  const auto offset = segment_offset(p, segment);
  return RegionShape{{k, p, p}, 1, {-k + 0.5, offset[0] + 0.5, offset[1] + 0.5}};
}

RegionShape fine_source(int p, int k) {
  return RegionShape{{2 * k, 3 * p, 3 * p}, 1, {-k + 0.5, 0.5, 0.5}};
}

RegionShape coarse_target(int p, int k, std::optional<Half> half) {
  const LayerRange layers = restriction_layers(k, half);
  return RegionShape{{layers.count, p, p}, kRefinementRatio,
                     {(layers.first + 0.5) * kRefinementRatio, 1.5, 1.5}};
}

}  // namespace reference

ReferenceFrame ReferenceFrame::for_face(const FaceConfig& cfg) {
  ReferenceFrame frame;
  const int normal = static_cast<int>(cfg.normal_axis);
  frame.permutation_[0] = normal;
  int r = 1;
  for (int axis = 0; axis < 3; ++axis) {
    if (axis != normal) frame.permutation_[r++] = axis;
  }
  frame.flips_ = {cfg.coarse_side == Side::positive, false, false};
  return frame;
}

RegionShape ReferenceFrame::to_world(const RegionShape& ref) const {
  RegionShape world;
  world.spacing = ref.spacing;
  for (int r = 0; r < 3; ++r) {
    const int w = permutation_[r];
    world.extents[w] = ref.extents[r];
    world.origin[w] = flips_[r] ? -(ref.origin[r] + (ref.extents[r] - 1) * ref.spacing)
                                : ref.origin[r];
  }
  return world;
}

RegionShape ReferenceFrame::to_reference(const RegionShape& world) const {
  RegionShape ref;
  ref.spacing = world.spacing;
  for (int r = 0; r < 3; ++r) {
    const int w = permutation_[r];
    ref.extents[r] = world.extents[w];
    ref.origin[r] = flips_[r] ? -(world.origin[w] + (world.extents[w] - 1) * world.spacing)
                              : world.origin[w];
  }
  return ref;
}

CellIndex ReferenceFrame::world_to_reference(const CellIndex& world,
                                             const std::array<int, 3>& world_extents) const {
  CellIndex ref;
  for (int r = 0; r < 3; ++r) {
    const int w = permutation_[r];
    ref[r] = flips_[r] ? world_extents[w] - 1 - world[w] : world[w];
  }
  return ref;
}

CellIndex ReferenceFrame::reference_to_world(const CellIndex& ref,
                                             const std::array<int, 3>& ref_extents) const {
  CellIndex world;
  for (int r = 0; r < 3; ++r) {
    world[permutation_[r]] = flips_[r] ? ref_extents[r] - 1 - ref[r] : ref[r];
  }
  return world;
}

std::array<double, 3> ReferenceFrame::reference_point_to_world(
    const std::array<double, 3>& x) const {
  std::array<double, 3> world{};
  for (int r = 0; r < 3; ++r) world[permutation_[r]] = flips_[r] ? -x[r] : x[r];
  return world;
}

RegionShape interp_source_shape(const FaceConfig& cfg) {
  cfg.validate();
  return ReferenceFrame::for_face(cfg).to_world(reference::coarse_source(cfg.p, cfg.k));
}

RegionShape interp_target_shape(const FaceConfig& cfg) {
  cfg.validate();
  return ReferenceFrame::for_face(cfg).to_world(
      reference::fine_segment(cfg.p, cfg.k, cfg.segment));
}

RegionShape interp_full_target_shape(const FaceConfig& cfg) {
  cfg.validate();
  return ReferenceFrame::for_face(cfg).to_world(reference::fine_face(cfg.p, cfg.k));
}

RegionShape restrict_source_shape(const FaceConfig& cfg) {
  cfg.validate();
  return ReferenceFrame::for_face(cfg).to_world(reference::fine_source(cfg.p, cfg.k));
}

RegionShape restrict_target_shape(const FaceConfig& cfg, std::optional<Half> half) {
  cfg.validate();
  return ReferenceFrame::for_face(cfg).to_world(
      reference::coarse_target(cfg.p, cfg.k, half));
}

HaloBuffer::HaloBuffer(RegionShape shape, int unknowns, double fill)
    : shape_(shape), unknowns_(unknowns) {
  if (unknowns < 1) throw ShapeError("a halo buffer needs at least one unknown per cell");
  values_.assign(shape_.cell_count() * static_cast<std::size_t>(unknowns), fill);
}

bool HaloBuffer::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

std::vector<RegionShape> reference_regions(const FaceConfig& cfg) {
  return {reference::coarse_source(cfg.p, cfg.k),
          reference::fine_segment(cfg.p, cfg.k, cfg.segment),
          reference::fine_face(cfg.p, cfg.k),
          reference::fine_source(cfg.p, cfg.k),
          reference::coarse_target(cfg.p, cfg.k),
          reference::coarse_target(cfg.p, cfg.k, Half::inner),
          reference::coarse_target(cfg.p, cfg.k, Half::outer)};
}

void require_known_region(const FaceConfig& cfg, const RegionShape& shape, bool world) {
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  for (const RegionShape& ref : reference_regions(cfg)) {
    if ((world ? frame.to_world(ref) : ref) == shape) return;
  }
  throw ShapeError("buffer shape " + shape.describe() + " is not a " +
                   (world ? "world" : "reference") + "-frame region of face " + cfg.describe());
}

void copy_permuted(const HaloBuffer& src, HaloBuffer& dst, const ReferenceFrame& frame,
                   bool src_is_world) {
  const RegionShape& s = src.shape();
  const int u = src.unknowns();
  if (dst.unknowns() != u || dst.cell_count() != src.cell_count()) {
    throw ShapeError("destination buffer does not match the permuted source");
  }
  auto in = src.values();
  auto out = dst.values();
  std::size_t linear = 0;
  CellIndex c;
  for (c[2] = 0; c[2] < s.extents[2]; ++c[2]) {
    for (c[1] = 0; c[1] < s.extents[1]; ++c[1]) {
      for (c[0] = 0; c[0] < s.extents[0]; ++c[0], ++linear) {
        const CellIndex mapped = src_is_world ? frame.world_to_reference(c, s.extents)
                                              : frame.reference_to_world(c, s.extents);
        const std::size_t target = dst.shape().linear(mapped);
        std::copy_n(in.begin() + linear * u, u, out.begin() + target * u);
      }
    }
  }
}

}  // namespace

void to_reference_into(const ReferenceFrame& frame, const HaloBuffer& world, HaloBuffer& dst) {
  if (dst.shape() != frame.to_reference(world.shape())) {
    throw ShapeError("reference buffer shape does not match the mapped world region");
  }
  copy_permuted(world, dst, frame, true);
}

void from_reference_into(const ReferenceFrame& frame, const HaloBuffer& reference,
                         HaloBuffer& dst) {
  if (dst.shape() != frame.to_world(reference.shape())) {
    throw ShapeError("world buffer shape does not match the mapped reference region");
  }
  copy_permuted(reference, dst, frame, false);
}

HaloBuffer to_reference(const FaceConfig& cfg, const HaloBuffer& world) {
  cfg.validate();
  require_known_region(cfg, world.shape(), true);
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  HaloBuffer out(frame.to_reference(world.shape()), world.unknowns());
  to_reference_into(frame, world, out);
  return out;
}

HaloBuffer from_reference(const FaceConfig& cfg, const HaloBuffer& reference) {
  cfg.validate();
  require_known_region(cfg, reference.shape(), false);
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  HaloBuffer out(frame.to_world(reference.shape()), reference.unknowns());
  from_reference_into(frame, reference, out);
  return out;
}

}  // namespace trihalo
