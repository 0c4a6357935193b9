#include <doctest.h>

#include <cmath>
#include <random>

#include "reloc/geometry.hpp"
#include "reloc/hash.hpp"

using namespace reloc;

TEST_CASE("yaw rotates local axes clockwise seen from above") {
  OrientedBox b{{0, 0, 0}, {1, 1, 1}, 90};
  CHECK(b.axis_z() == Vec3{1, 0, 0});
  CHECK(b.axis_x() == Vec3{0, 0, -1});
}

TEST_CASE("ray hits an axis-aligned box at its near face") {
  OrientedBox b{{0, 1, 5}, {0.5, 0.5, 0.5}, 0};
  auto t = b.intersect_ray({0, 1, 0}, {0, 0, 1});
  REQUIRE(t);
  CHECK(*t == doctest::Approx(4.5));
  CHECK_FALSE(b.intersect_ray({0, 1, 0}, {0, 0, -1}));
  CHECK_FALSE(b.intersect_ray({2, 1, 0}, {0, 0, 1}));
  CHECK(*b.intersect_ray({0, 1, 5}, {1, 0, 0}) == 0.0);
}

TEST_CASE("ray against a rotated box matches a fine march") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    OrientedBox b{{u(rng), u(rng), 4 + u(rng)}, {0.3 + 0.2 * u(rng), 0.4, 0.5}, 90 * u(rng)};
    Vec3 dir{0.3 * u(rng), 0.3 * u(rng), 1};
    dir = dir * (1 / norm(dir));
    std::optional<double> marched;
    for (double t = 0; t < 8; t += 1e-3) {
      Vec3 p = dir * t - b.center;
      Vec3 ax = b.axis_x(), az = b.axis_z();
      if (std::abs(dot(p, ax)) <= b.half_extents.x && std::abs(p.y) <= b.half_extents.y &&
          std::abs(dot(p, az)) <= b.half_extents.z) {
        marched = t;
        break;
      }
    }
    auto hit = b.intersect_ray({0, 0, 0}, dir);
    REQUIRE(hit.has_value() == marched.has_value());
    if (hit) CHECK(*hit == doctest::Approx(*marched).epsilon(2e-3));
  }
}

TEST_CASE("footprints overlap by separating axes") {
  Footprint a{{0, 0}, {1, 0.5}, 0};
  CHECK(a.overlaps(Footprint{{1.5, 0}, {1, 0.5}, 0}));
  CHECK_FALSE(a.overlaps(Footprint{{2.0, 0}, {1, 0.5}, 0}));  // touching only
  CHECK(a.overlaps(Footprint{{0, 1.1}, {1, 0.5}, 90}));
  CHECK_FALSE(a.overlaps(Footprint{{2.2, 1.2}, {1, 0.5}, 45}));
  CHECK(a.contains({0.9, 0.4}));
  CHECK_FALSE(a.contains({1.1, 0}));
  CHECK(a.inside(Rect{{-1, -0.5}, {1, 0.5}}));
  CHECK_FALSE(Footprint({{0, 0}, {1, 0.5}, 90}).inside(Rect{{-1, -0.5}, {1, 0.5}}));
}

TEST_CASE("hash helpers are stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
  CHECK(mix64(1) != mix64(2));
}
