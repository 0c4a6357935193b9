#pragma once

#include <array>
#include <cmath>
#include <optional>

namespace reloc {

// World frame: y is up, yaw is measured in degrees about +y with yaw 0
// facing +z and yaw 90 facing +x.
struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  friend bool operator==(const Vec3&, const Vec3&) = default;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

struct Vec2 {
  double x{0.0};
  double z{0.0};

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Aabb {
  Vec3 min;
  Vec3 max;

  friend bool operator==(const Aabb&, const Aabb&) = default;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
};

// Axis-aligned rectangle in plan view (x, z).
struct Rect {
  Vec2 min;
  Vec2 max;

  friend bool operator==(const Rect&, const Rect&) = default;

  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.z >= min.z && p.z <= max.z;
  }
};

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double deg) { return deg * kPi / 180.0; }

// Box rotated about the vertical axis by `yaw_deg`.
struct OrientedBox {
  Vec3 center;
  Vec3 half_extents;
  double yaw_deg{0.0};

  // Local x/z axes expressed in world coordinates.
  Vec3 axis_x() const;
  Vec3 axis_z() const;

  std::array<Vec3, 8> corners() const;

  // Ray parameter of the first intersection of origin + t*dir with t >= 0,
  // or none when the ray misses. Returns 0 when the origin is inside.
  std::optional<double> intersect_ray(const Vec3& origin, const Vec3& dir) const;
};

// Plan-view footprint of an oriented box, as a rotated rectangle.
struct Footprint {
  Vec2 center;
  Vec2 half;  // half sizes along the local axes
  double yaw_deg{0.0};

  std::array<Vec2, 4> corners() const;
  // True when the interiors intersect (touching edges do not count).
  bool overlaps(const Footprint& other) const;
  bool contains(const Vec2& p) const;
  // True when every corner lies inside `r`.
  bool inside(const Rect& r) const;
  // True when the footprint and the rectangle interiors intersect.
  bool overlaps(const Rect& r) const;
};

Footprint footprint_of(const OrientedBox& box);

}  // namespace reloc
