#include <random>
#include <set>

#include "doctest.h"
#include "trihalo/geometry.hpp"

using namespace trihalo;

namespace {

HaloBuffer random_buffer(const RegionShape& shape, int u, unsigned seed) {
  HaloBuffer buf(shape, u);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : buf.values()) v = dist(rng);
  return buf;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("reference region shapes") {
  const RegionShape coarse = reference::coarse_source(4, 3);
  CHECK(coarse.extents == std::array<int, 3>{6, 4, 4});
  CHECK(coarse.spacing == 3);
  CHECK(coarse.origin[0] == doctest::Approx(-7.5));
  CHECK(coarse.origin[1] == doctest::Approx(1.5));

  const RegionShape face = reference::fine_face(4, 3);
  CHECK(face.extents == std::array<int, 3>{3, 12, 12});
  CHECK(face.spacing == 1);
  CHECK(face.origin[0] == doctest::Approx(-2.5));

  const RegionShape fine = reference::fine_source(4, 3);
  CHECK(fine.extents == std::array<int, 3>{6, 12, 12});

  const RegionShape target = reference::coarse_target(4, 3);
  CHECK(target.extents == std::array<int, 3>{3, 4, 4});
  CHECK(target.origin[0] == doctest::Approx(1.5));
  CHECK(reference::coarse_target(4, 3, Half::outer).origin[0] == doctest::Approx(7.5));
}

TEST_CASE("segment tiling covers the face exactly once") {
  for (int p : {1, 2, 4}) {
    const int k = 1;
    const RegionShape face = reference::fine_face(p, k);
    std::multiset<std::array<double, 3>> centres;
    for (int s = 0; s < kSegmentCount; ++s) {
      const RegionShape seg = reference::fine_segment(p, k, s);
      CHECK(seg.extents == std::array<int, 3>{k, p, p});
      const auto off = reference::segment_offset(p, s);
      CHECK(off[0] == (s % 3) * p);
      CHECK(off[1] == (s / 3) * p);
      for (std::size_t i = 0; i < seg.cell_count(); ++i) {
        centres.insert(seg.centre(seg.delinearize(i)));
      }
    }
    REQUIRE(centres.size() == face.cell_count());
    for (std::size_t i = 0; i < face.cell_count(); ++i) {
      CHECK(centres.count(face.centre(face.delinearize(i))) == 1);
    }
  }
}

TEST_CASE("restriction halves") {
  CHECK(restriction_layers(3, Half::inner).first == 0);
  CHECK(restriction_layers(3, Half::inner).count == 2);
  CHECK(restriction_layers(3, Half::outer).first == 2);
  CHECK(restriction_layers(3, Half::outer).count == 1);
  CHECK(restriction_layers(1, Half::inner).count == 1);
  CHECK(restriction_layers(1, Half::outer).count == 0);
  CHECK(restriction_layers(4, std::nullopt).count == 4);
}

TEST_CASE("linearization is axis-0 fastest and round-trips") {
  const RegionShape shape{{3, 4, 5}, 1, {0, 0, 0}};
  CHECK(shape.linear({1, 0, 0}) == 1);
  CHECK(shape.linear({0, 1, 0}) == 3);
  CHECK(shape.linear({0, 0, 1}) == 12);
  for (std::size_t i = 0; i < shape.cell_count(); ++i) {
    CHECK(shape.linear(shape.delinearize(i)) == i);
  }
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(FaceConfig{}.validate());
  CHECK_THROWS_AS((FaceConfig{Axis::x, Side::negative, 0, 0, 1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((FaceConfig{Axis::x, Side::negative, 0, 2, 3, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((FaceConfig{Axis::x, Side::negative, 9, 4, 3, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((FaceConfig{Axis::x, Side::negative, -1, 4, 3, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((FaceConfig{Axis::x, Side::negative, 0, 4, 3, 0}.validate()), ConfigError);
  CHECK(all_face_configs(2, 1).size() == 6 * 9);
  CHECK(FaceConfig{}.is_reference_orientation());
  CHECK_FALSE((FaceConfig{Axis::x, Side::positive}.is_reference_orientation()));
}

TEST_CASE("reference orientation is the identity map") {
  const FaceConfig cfg{Axis::x, Side::negative, 2, 3, 2, 2};
  const HaloBuffer world = random_buffer(interp_source_shape(cfg), 2, 3);
  const HaloBuffer ref = to_reference(cfg, world);
  CHECK(ref.shape() == reference::coarse_source(3, 2));
  CHECK(std::equal(ref.values().begin(), ref.values().end(), world.values().begin()));
}

TEST_CASE("to_reference and from_reference are inverse for every face") {
  for (const FaceConfig& cfg : all_face_configs(3, 2, 2)) {
    for (const RegionShape& shape :
         {interp_source_shape(cfg), interp_target_shape(cfg), restrict_source_shape(cfg),
          restrict_target_shape(cfg), restrict_target_shape(cfg, Half::inner)}) {
      const HaloBuffer world = random_buffer(shape, 2, 17);
      const HaloBuffer back = from_reference(cfg, to_reference(cfg, world));
      REQUIRE(back.shape() == world.shape());
      CHECK(std::equal(back.values().begin(), back.values().end(), world.values().begin()));
    }
  }
}

TEST_CASE("one-hot cells land on the matching reference position") {
  for (const FaceConfig& cfg : all_face_configs(2, 1, 1)) {
    const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
    const RegionShape world_shape = interp_target_shape(cfg);
    for (std::size_t w = 0; w < world_shape.cell_count(); ++w) {
      HaloBuffer world(world_shape, 1);
      world.at(w, 0) = 1.0;
      const HaloBuffer ref = to_reference(cfg, world);
      std::size_t hot = ref.cell_count();
      int hits = 0;
      for (std::size_t r = 0; r < ref.cell_count(); ++r) {
        if (ref.at(r, 0) != 0.0) {
          hot = r;
          ++hits;
        }
      }
      REQUIRE(hits == 1);
      const CellIndex ref_cell = ref.shape().delinearize(hot);
      CHECK(frame.world_to_reference(world_shape.delinearize(w), world_shape.extents) == ref_cell);
      const auto mapped = frame.reference_point_to_world(ref.shape().centre(ref_cell));
      const auto expected = world_shape.centre(world_shape.delinearize(w));
      for (int a = 0; a < 3; ++a) CHECK(mapped[a] == doctest::Approx(expected[a]));
    }
  }
}

TEST_CASE("mismatched buffers are rejected") {
  const FaceConfig cfg{Axis::y, Side::positive, 0, 3, 2, 1};
  HaloBuffer wrong(RegionShape{{2, 2, 2}, 1, {0, 0, 0}}, 1);
  CHECK_THROWS_AS(to_reference(cfg, wrong), ShapeError);
  CHECK_THROWS_AS(from_reference(cfg, wrong), ShapeError);
  CHECK_THROWS_AS(HaloBuffer(reference::fine_face(1, 1), 0), ShapeError);
}

TEST_CASE("finite check") {
  HaloBuffer buf(reference::fine_face(1, 1), 2, 1.0);
  CHECK(buf.all_finite());
  buf.at(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(buf.all_finite());
}

}
