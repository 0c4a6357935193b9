#include "reloc/geometry.hpp"

#include <algorithm>
#include <limits>

namespace reloc {

namespace {

constexpr double kOverlapEps = 1e-9;

// Sine/cosine that are exact at multiples of 90 degrees.
std::pair<double, double> sincos_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0) return {0.0, 1.0};
  if (r == 90.0) return {1.0, 0.0};
  if (r == 180.0) return {0.0, -1.0};
  if (r == 270.0) return {-1.0, 0.0};
  return {std::sin(deg2rad(r)), std::cos(deg2rad(r))};
}

std::pair<double, double> project_onto(const std::array<Vec2, 4>& pts, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : pts) {
    const double d = p.x * axis.x + p.z * axis.z;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

bool separated_on(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b, const Vec2& axis) {
  const auto [alo, ahi] = project_onto(a, axis);
  const auto [blo, bhi] = project_onto(b, axis);
  return ahi <= blo + kOverlapEps || bhi <= alo + kOverlapEps;
}

std::array<Vec2, 4> rect_corners(const Rect& r) {
  return {Vec2{r.min.x, r.min.z}, Vec2{r.max.x, r.min.z}, Vec2{r.max.x, r.max.z},
          Vec2{r.min.x, r.max.z}};
}

}  // namespace

Vec3 OrientedBox::axis_x() const {
  const auto [s, c] = sincos_deg(yaw_deg);
  return {c, 0.0, -s};
}

Vec3 OrientedBox::axis_z() const {
  const auto [s, c] = sincos_deg(yaw_deg);
  return {s, 0.0, c};
}

std::array<Vec3, 8> OrientedBox::corners() const {
  const Vec3 ax = axis_x() * half_extents.x;
  const Vec3 ay{0.0, half_extents.y, 0.0};
  const Vec3 az = axis_z() * half_extents.z;
  std::array<Vec3, 8> out;
  std::size_t i = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) out[i++] = center + ax * sx + ay * sy + az * sz;
  return out;
}

std::optional<double> OrientedBox::intersect_ray(const Vec3& origin, const Vec3& dir) const {
  // Slab test in the box's local frame.
  const Vec3 rel = origin - center;
  const Vec3 axes[3] = {axis_x(), Vec3{0.0, 1.0, 0.0}, axis_z()};
  const double half[3] = {half_extents.x, half_extents.y, half_extents.z};
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double o = dot(rel, axes[k]);
    const double d = dot(dir, axes[k]);
    if (std::abs(d) < 1e-15) {
      if (o < -half[k] || o > half[k]) return std::nullopt;
      continue;
    }
    double t0 = (-half[k] - o) / d;
    double t1 = (half[k] - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  return t_near;
}

std::array<Vec2, 4> Footprint::corners() const {
  const auto [s, c] = sincos_deg(yaw_deg);
  const Vec2 ax{c * half.x, -s * half.x};
  const Vec2 az{s * half.z, c * half.z};
  return {Vec2{center.x - ax.x - az.x, center.z - ax.z - az.z},
          Vec2{center.x + ax.x - az.x, center.z + ax.z - az.z},
          Vec2{center.x + ax.x + az.x, center.z + ax.z + az.z},
          Vec2{center.x - ax.x + az.x, center.z - ax.z + az.z}};
}

bool Footprint::overlaps(const Footprint& other) const {
  const auto a = corners();
  const auto b = other.corners();
  for (const auto* pts : {&a, &b}) {
    for (std::size_t i = 0; i < 2; ++i) {
      const Vec2& p0 = (*pts)[i];
      const Vec2& p1 = (*pts)[i + 1];
      const double ex = p1.x - p0.x;
      const double ez = p1.z - p0.z;
      const double len = std::hypot(ex, ez);
      if (len == 0.0) continue;
      if (separated_on(a, b, Vec2{-ez / len, ex / len})) return false;
    }
  }
  return true;
}

bool Footprint::contains(const Vec2& p) const {
  const auto [s, c] = sincos_deg(yaw_deg);
  const double dx = p.x - center.x;
  const double dz = p.z - center.z;
  const double lx = dx * c - dz * s;
  const double lz = dx * s + dz * c;
  return std::abs(lx) < half.x && std::abs(lz) < half.z;
}

bool Footprint::inside(const Rect& r) const {
  constexpr double eps = 1e-9;
  return std::ranges::all_of(corners(), [&](const Vec2& p) {
    return p.x >= r.min.x - eps && p.x <= r.max.x + eps && p.z >= r.min.z - eps &&
           p.z <= r.max.z + eps;
  });
}

bool Footprint::overlaps(const Rect& r) const {
  const auto a = corners();
  const auto b = rect_corners(r);
  if (separated_on(a, b, Vec2{1.0, 0.0}) || separated_on(a, b, Vec2{0.0, 1.0})) return false;
  for (std::size_t i = 0; i < 2; ++i) {
    const double ex = a[i + 1].x - a[i].x;
    const double ez = a[i + 1].z - a[i].z;
    const double len = std::hypot(ex, ez);
    if (len == 0.0) continue;
    if (separated_on(a, b, Vec2{-ez / len, ex / len})) return false;
  }
  return true;
}

Footprint footprint_of(const OrientedBox& box) {
  return {Vec2{box.center.x, box.center.z}, Vec2{box.half_extents.x, box.half_extents.z},
          box.yaw_deg};
}

}  // namespace reloc
