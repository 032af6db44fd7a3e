#pragma once

// Face-local geometry of a 3:1 refinement boundary.
//
// All coordinates are expressed in units of the fine mesh spacing h. The
// coarse spacing is always 3h. Every face exchange is described in a world
// frame (the actual orientation of the face inside a patch) and is computed
// in a single reference frame:
//
//   - reference axis 0 is the face normal, the face plane sits at x = 0,
//   - the coarse patch occupies x < 0, the fine patches occupy x > 0,
//   - reference axes 1 and 2 are the two tangential world axes in
//     ascending order; the coarse face spans [0, 3p) along both.
//
// Region cells are stored lexicographically with axis 0 fastest:
// linear = (i2 * n1 + i1) * n0 + i0.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trihalo {

inline constexpr int kRefinementRatio = 3;
inline constexpr int kSegmentCount = 9;
inline constexpr int kDefaultUnknowns = 58;

enum class Axis : int { x = 0, y = 1, z = 2 };
enum class Side : int { negative = 0, positive = 1 };
enum class Role : int { interpolate = 0, restrict = 1 };
enum class Half : int { inner = 0, outer = 1 };

std::string to_string(Axis axis);
std::string to_string(Side side);
std::string to_string(Role role);
std::string to_string(Half half);
Role parse_role(const std::string& text);
Half parse_half(const std::string& text);

/// Thrown when a face configuration violates p >= 1, 1 <= k <= p, u >= 1 or
/// segment in [0, 8].
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a buffer does not have the shape an operation expects.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FaceConfig {
  Axis normal_axis = Axis::x;
  // Which side of the face plane holds the coarse patch.
  Side coarse_side = Side::negative;
  // Which of the nine fine patches abutting the coarse face, row-major over
  // the two tangential axes.
  int segment = 0;
  int p = 4;
  int k = 3;
  int u = kDefaultUnknowns;

  void validate() const;
  bool is_reference_orientation() const {
    return normal_axis == Axis::x && coarse_side == Side::negative;
  }
  std::string describe() const;

  friend bool operator==(const FaceConfig&, const FaceConfig&) = default;
};

/// Every normal x side x segment combination for the given sizes.
std::vector<FaceConfig> all_face_configs(int p, int k, int u = 1);

using CellIndex = std::array<int, 3>;

struct RegionShape {
  std::array<int, 3> extents{0, 0, 0};
  // Cell spacing in units of h: 1 for fine regions, 3 for coarse regions.
  int spacing = 1;
  // Centre of cell (0,0,0) in units of h.
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  std::size_t cell_count() const {
    return static_cast<std::size_t>(extents[0]) * extents[1] * extents[2];
  }
  bool contains(const CellIndex& c) const {
    return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < extents[0] &&
           c[1] < extents[1] && c[2] < extents[2];
  }
  std::size_t linear(const CellIndex& c) const {
    return (static_cast<std::size_t>(c[2]) * extents[1] + c[1]) * extents[0] + c[0];
  }
  CellIndex delinearize(std::size_t index) const;
  std::array<double, 3> centre(const CellIndex& c) const {
    return {origin[0] + c[0] * spacing, origin[1] + c[1] * spacing,
            origin[2] + c[2] * spacing};
  }
  std::string describe() const;

  friend bool operator==(const RegionShape&, const RegionShape&) = default;
};

/// Normal-direction coarse layers [first, first + count) addressed by one
/// restriction half. The inner half takes ceil(k/2) layers nearest the face.
struct LayerRange {
  int first = 0;
  int count = 0;
};
LayerRange restriction_layers(int k, std::optional<Half> half);

// Reference-frame regions.
namespace reference {
RegionShape coarse_source(int p, int k);
RegionShape fine_face(int p, int k);
RegionShape fine_segment(int p, int k, int segment);
RegionShape fine_source(int p, int k);
RegionShape coarse_target(int p, int k, std::optional<Half> half = std::nullopt);
// Tangential offset of a segment in fine cells along reference axes 1 and 2.
std::array<int, 2> segment_offset(int p, int segment);
}  // namespace reference

// World-frame regions for a face configuration.
RegionShape interp_source_shape(const FaceConfig& cfg);
RegionShape interp_target_shape(const FaceConfig& cfg);
RegionShape interp_full_target_shape(const FaceConfig& cfg);
RegionShape restrict_source_shape(const FaceConfig& cfg);
RegionShape restrict_target_shape(const FaceConfig& cfg,
                                  std::optional<Half> half = std::nullopt);

/// Maps between the world frame of a face and the reference frame.
class ReferenceFrame {
 public:
  static ReferenceFrame for_face(const FaceConfig& cfg);
  ReferenceFrame() = default;

  // permutation()[r] is the world axis carried by reference axis r.
  const std::array<int, 3>& permutation() const { return permutation_; }
  // flips()[r]: reference axis r runs opposite to its world axis.
  const std::array<bool, 3>& flips() const { return flips_; }

  RegionShape to_world(const RegionShape& reference_shape) const;
  RegionShape to_reference(const RegionShape& world_shape) const;

  // Cell index maps; `extents` is the shape on the source side of the map.
  CellIndex world_to_reference(const CellIndex& world,
                               const std::array<int, 3>& world_extents) const;
  CellIndex reference_to_world(const CellIndex& ref,
                               const std::array<int, 3>& ref_extents) const;

  // Coordinate maps between frames (units of h).
  std::array<double, 3> reference_point_to_world(const std::array<double, 3>& x) const;

 private:
  std::array<int, 3> permutation_{0, 1, 2};
  std::array<bool, 3> flips_{false, false, false};
};

/// Cell values of a halo region: all u unknowns of a cell contiguous, cells
/// lexicographic.
class HaloBuffer {
 public:
  HaloBuffer() = default;
  HaloBuffer(RegionShape shape, int unknowns, double fill = 0.0);

  const RegionShape& shape() const { return shape_; }
  int unknowns() const { return unknowns_; }
  std::size_t cell_count() const { return shape_.cell_count(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> cell(std::size_t linear) {
    return std::span<double>(values_).subspan(linear * unknowns_, unknowns_);
  }
  std::span<const double> cell(std::size_t linear) const {
    return std::span<const double>(values_).subspan(linear * unknowns_, unknowns_);
  }
  double& at(std::size_t linear, int channel) { return values_[linear * unknowns_ + channel]; }
  double at(std::size_t linear, int channel) const {
    return values_[linear * unknowns_ + channel];
  }

  bool all_finite() const;

 private:
  RegionShape shape_;
  int unknowns_ = 1;
  std::vector<double> values_;
};

/// Copies a world-frame buffer of one of `cfg`'s regions into reference
/// ordering. The unknowns of a cell move together.
HaloBuffer to_reference(const FaceConfig& cfg, const HaloBuffer& world);
/// Inverse of to_reference.
HaloBuffer from_reference(const FaceConfig& cfg, const HaloBuffer& reference);

// Allocation-free variants; `dst` must already carry the mapped shape.
void to_reference_into(const ReferenceFrame& frame, const HaloBuffer& world, HaloBuffer& dst);
void from_reference_into(const ReferenceFrame& frame, const HaloBuffer& reference,
                         HaloBuffer& dst);

}  // namespace trihalo
