#include "reloc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

#include "reloc/error.hpp"
#include "reloc/hash.hpp"

namespace reloc {

namespace {

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

std::string object_path(std::size_t i, const char* field) {
  return fmt::format("objects[{}].{}", i, field);
}

std::string surface_path(std::size_t i, const char* field) {
  return fmt::format("surfaces[{}].{}", i, field);
}

void validate_spec(const SceneSpec& spec) {
  if (spec.scene_id.empty()) throw SchemaError("scene_id", "must be a non-empty string");
  const Aabb& b = spec.bounds;
  if (!finite(b.min) || !finite(b.max) || b.min.x >= b.max.x || b.min.y >= b.max.y ||
      b.min.z >= b.max.z)
    throw SchemaError("bounds", "min must be strictly below max on every axis");
  if (!std::isfinite(spec.grid_step) || spec.grid_step <= 0.0)
    throw SchemaError("grid_step", "must be positive");

  std::unordered_set<std::string> surface_ids;
  for (std::size_t i = 0; i < spec.surfaces.size(); ++i) {
    const Surface& s = spec.surfaces[i];
    if (s.id.empty()) throw SchemaError(surface_path(i, "id"), "must be a non-empty string");
    if (!surface_ids.insert(s.id).second)
      throw SchemaError(surface_path(i, "id"), "duplicate surface id '" + s.id + "'");
    if (!(s.height > 0.0) || s.height > b.max.y - b.min.y)
      throw SchemaError(surface_path(i, "height"), "must lie within the scene height");
    const Rect& e = s.extent;
    if (!(e.min.x < e.max.x) || !(e.min.z < e.max.z))
      throw SchemaError(surface_path(i, "extent"), "min must be strictly below max");
    if (e.min.x < b.min.x || e.max.x > b.max.x || e.min.z < b.min.z || e.max.z > b.max.z)
      throw SchemaError(surface_path(i, "extent"), "surface leaves the scene bounds");
  }

  std::unordered_set<std::string> object_ids;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const SceneObject& o = spec.objects[i];
    if (o.instance_id.empty())
      throw SchemaError(object_path(i, "instance_id"), "must be a non-empty string");
    if (!object_ids.insert(o.instance_id).second)
      throw SchemaError(object_path(i, "instance_id"),
                        "duplicate instance id '" + o.instance_id + "'");
    if (o.class_label.empty())
      throw SchemaError(object_path(i, "class_label"), "must be a non-empty string");
    if (!finite(o.half_extents) || o.half_extents.x <= 0.0 || o.half_extents.y <= 0.0 ||
        o.half_extents.z <= 0.0)
      throw SchemaError(object_path(i, "half_extents"), "must be strictly positive");
    if (!finite(o.position) || !b.contains(o.position))
      throw SchemaError(object_path(i, "position"), "must lie within the scene bounds");
    if (!std::isfinite(o.yaw)) throw SchemaError(object_path(i, "yaw"), "must be finite");
    if (o.surface_id && !surface_ids.contains(*o.surface_id))
      throw SchemaError(object_path(i, "surface_id"), "unknown surface '" + *o.surface_id + "'");
  }
}

void check_overlaps(const std::vector<SceneObject>& objects) {
  std::vector<PlacementError::Collision> collisions;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Footprint fi = footprint_of(objects[i].box());
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      if (objects[i].surface_id != objects[j].surface_id) continue;
      if (fi.overlaps(footprint_of(objects[j].box())))
        collisions.emplace_back(objects[i].instance_id, objects[j].instance_id);
    }
  }
  if (collisions.empty()) return;
  std::string what = "overlapping placements:";
  for (const auto& [a, b] : collisions) what += fmt::format(" ({}, {})", a, b);
  throw PlacementError(what, std::move(collisions));
}

WalkableGrid make_walkable(const SceneSpec& spec) {
  const Aabb& b = spec.bounds;
  const double step = spec.grid_step;
  const int nx = static_cast<int>(std::ceil((b.max.x - b.min.x) / step - 1e-9));
  const int nz = static_cast<int>(std::ceil((b.max.z - b.min.z) / step - 1e-9));
  WalkableGrid grid(Vec2{b.min.x, b.min.z}, step, nx, nz);
  std::vector<Footprint> floor_prints;
  for (const auto& o : spec.objects)
    if (!o.surface_id) floor_prints.push_back(footprint_of(o.box()));
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nz; ++j) {
      const Vec2 c = grid.center_of(i, j);
      bool free = c.x <= b.max.x && c.z <= b.max.z;
      for (const auto& s : spec.surfaces) free = free && !s.extent.contains(c);
      for (const auto& f : floor_prints) free = free && !f.contains(c);
      grid.set(i, j, free);
    }
  }
  return grid;
}

// Plan-view axis-aligned half sizes of a box after rotation by `yaw`.
Vec2 rotated_half(const Vec3& half, double yaw) {
  const Footprint f{Vec2{}, Vec2{half.x, half.z}, yaw};
  Vec2 out;
  for (const auto& c : f.corners()) {
    out.x = std::max(out.x, std::abs(c.x));
    out.z = std::max(out.z, std::abs(c.z));
  }
  return out;
}

struct Candidate {
  Vec3 position;
  double yaw;
  std::optional<std::string> surface_id;
};

std::optional<Candidate> sample_placement(const SceneSpec& spec, const SceneObject& obj,
                                          std::mt19937_64& rng) {
  static constexpr double kYaws[] = {0.0, 90.0, 180.0, 270.0};
  std::uniform_int_distribution<std::size_t> pick_yaw(0, 3);
  const double yaw = kYaws[pick_yaw(rng)];
  const Vec2 half = rotated_half(obj.half_extents, yaw);

  Rect region;
  double base_height = 0.0;
  std::optional<std::string> surface_id;
  if (obj.surface_id) {
    if (spec.surfaces.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, spec.surfaces.size() - 1);
    const Surface& s = spec.surfaces[pick(rng)];
    region = s.extent;
    base_height = s.height;
    surface_id = s.id;
  } else {
    region = Rect{Vec2{spec.bounds.min.x, spec.bounds.min.z},
                  Vec2{spec.bounds.max.x, spec.bounds.max.z}};
    base_height = spec.bounds.min.y;
  }
  const double lo_x = region.min.x + half.x;
  const double hi_x = region.max.x - half.x;
  const double lo_z = region.min.z + half.z;
  const double hi_z = region.max.z - half.z;
  if (lo_x > hi_x || lo_z > hi_z) return std::nullopt;
  std::uniform_real_distribution<double> ux(lo_x, hi_x);
  std::uniform_real_distribution<double> uz(lo_z, hi_z);
  const double x = ux(rng);
  const double z = uz(rng);
  return Candidate{Vec3{x, base_height + obj.half_extents.y, z}, yaw, surface_id};
}

bool placement_free(const SceneSpec& spec, std::size_t self, const SceneObject& moved) {
  const Footprint fp = footprint_of(moved.box());
  for (std::size_t k = 0; k < spec.objects.size(); ++k) {
    if (k == self) continue;
    const auto& other = spec.objects[k];
    if (other.surface_id != moved.surface_id) continue;
    if (fp.overlaps(footprint_of(other.box()))) return false;
  }
  if (!moved.surface_id) {
    for (const auto& s : spec.surfaces)
      if (fp.overlaps(s.extent)) return false;
  }
  return true;
}

}  // namespace

OrientedBox Surface::box() const {
  return {Vec3{(extent.min.x + extent.max.x) / 2, height / 2, (extent.min.z + extent.max.z) / 2},
          Vec3{(extent.max.x - extent.min.x) / 2, height / 2, (extent.max.z - extent.min.z) / 2},
          0.0};
}

WalkableGrid::WalkableGrid(Vec2 origin, double step, int nx, int nz)
    : origin_(origin), step_(step), nx_(nx), nz_(nz), cells_(static_cast<std::size_t>(nx * nz), 0) {}

std::optional<std::pair<int, int>> WalkableGrid::cell_of(const Vec2& p) const {
  const double fx = (p.x - origin_.x) / step_;
  const double fz = (p.z - origin_.z) / step_;
  if (fx < 0.0 || fz < 0.0) return std::nullopt;
  const int i = static_cast<int>(std::floor(fx));
  const int j = static_cast<int>(std::floor(fz));
  if (i >= nx_ || j >= nz_) return std::nullopt;
  return std::pair{i, j};
}

Vec2 WalkableGrid::center_of(int i, int j) const {
  return {origin_.x + (i + 0.5) * step_, origin_.z + (j + 0.5) * step_};
}

bool WalkableGrid::walkable(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= nz_) return false;
  return cells_[static_cast<std::size_t>(j * nx_ + i)] != 0;
}

bool WalkableGrid::walkable_at(const Vec2& p) const {
  const auto cell = cell_of(p);
  if (!cell) return false;
  const Vec2 c = center_of(cell->first, cell->second);
  constexpr double eps = 1e-6;
  if (std::abs(c.x - p.x) > eps || std::abs(c.z - p.z) > eps) return false;
  return walkable(cell->first, cell->second);
}

void WalkableGrid::set(int i, int j, bool walkable) {
  cells_.at(static_cast<std::size_t>(j * nx_ + i)) = walkable ? 1 : 0;
}

const SceneObject* Scene::find(const std::string& instance_id) const {
  auto it = std::ranges::find(objects_, instance_id, &SceneObject::instance_id);
  return it == objects_.end() ? nullptr : &*it;
}

const Surface* Scene::find_surface(const std::string& id) const {
  auto it = std::ranges::find(surfaces_, id, &Surface::id);
  return it == surfaces_.end() ? nullptr : &*it;
}

SceneSpec to_spec(const Scene& scene) {
  return {scene.scene_id(), scene.bounds(), scene.grid_step(), scene.surfaces(), scene.objects()};
}

Scene build_scene(const SceneSpec& spec) {
  validate_spec(spec);
  check_overlaps(spec.objects);
  Scene scene;
  scene.scene_id_ = spec.scene_id;
  scene.bounds_ = spec.bounds;
  scene.walkable_ = make_walkable(spec);
  scene.surfaces_ = spec.surfaces;
  scene.objects_ = spec.objects;
  return scene;
}

Scene apply_changes(const Scene& scene, const ChangeSet& changes) {
  SceneSpec spec = to_spec(scene);
  std::unordered_set<std::string> removed;
  for (const auto& id : changes.removals) {
    if (!scene.find(id)) throw ReferenceError("removal of unknown instance '" + id + "'");
    if (!removed.insert(id).second) throw ReferenceError("instance '" + id + "' removed twice");
  }
  std::unordered_set<std::string> moved;
  for (const auto& m : changes.moves) {
    if (!scene.find(m.instance_id))
      throw ReferenceError("move of unknown instance '" + m.instance_id + "'");
    if (removed.contains(m.instance_id))
      throw ReferenceError("instance '" + m.instance_id + "' is both moved and removed");
    if (!moved.insert(m.instance_id).second)
      throw ReferenceError("instance '" + m.instance_id + "' moved twice");
    if (m.new_surface_id && !scene.find_surface(*m.new_surface_id))
      throw ReferenceError("move of '" + m.instance_id + "' targets unknown surface '" +
                           *m.new_surface_id + "'");
    auto it = std::ranges::find(spec.objects, m.instance_id, &SceneObject::instance_id);
    it->position = m.new_position;
    it->yaw = m.new_yaw;
    it->surface_id = m.new_surface_id;
  }
  std::erase_if(spec.objects, [&](const SceneObject& o) { return removed.contains(o.instance_id); });
  for (const auto& a : changes.additions) {
    if (scene.find(a.instance_id))
      throw ReferenceError("addition reuses existing instance id '" + a.instance_id + "'");
    spec.objects.push_back(a);
  }
  return build_scene(spec);
}

Scene relocate_objects(const Scene& scene, std::uint64_t seed,
                       const std::set<std::string>& instance_ids, double min_move_distance) {
  for (const auto& id : instance_ids)
    if (!scene.find(id)) throw ReferenceError("relocation of unknown instance '" + id + "'");

  SceneSpec spec = to_spec(scene);
  std::mt19937_64 rng(mix64(seed ^ 0x5ce4e5eedULL));
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    if (!instance_ids.contains(spec.objects[i].instance_id)) continue;
    const SceneObject original = spec.objects[i];
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      const auto cand = sample_placement(spec, original, rng);
      if (!cand) continue;
      const double dx = cand->position.x - original.position.x;
      const double dz = cand->position.z - original.position.z;
      if (std::hypot(dx, dz) < min_move_distance) continue;
      SceneObject trial = original;
      trial.position = cand->position;
      trial.yaw = cand->yaw;
      trial.surface_id = cand->surface_id;
      if (!spec.bounds.contains(trial.position) || !placement_free(spec, i, trial)) continue;
      spec.objects[i] = std::move(trial);
      placed = true;
    }
    if (!placed)
      throw RandomizationError(fmt::format("no valid placement for '{}' after {} attempts",
                                           original.instance_id, kPlacementRetries));
  }
  return build_scene(spec);
}

Scene randomize_placements(const Scene& scene, std::uint64_t seed,
                           const std::set<std::string>& movable_classes) {
  if (movable_classes.empty()) throw ValidationError("movable_classes must not be empty");
  std::set<std::string> ids;
  for (const auto& o : scene.objects())
    if (movable_classes.contains(o.class_label)) ids.insert(o.instance_id);
  if (ids.empty()) return scene;
  return relocate_objects(scene, seed, ids, 0.0);
}

const char* to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::unchanged: return "unchanged";
    case ChangeKind::moved: return "moved";
    case ChangeKind::removed: return "removed";
    case ChangeKind::added: return "added";
  }
  return "unknown";
}

std::map<std::string, ChangeKind> GroundTruth::changed() const {
  std::map<std::string, ChangeKind> out;
  for (const auto& [id, kind] : labels)
    if (kind != ChangeKind::unchanged) out.emplace(id, kind);
  return out;
}

bool GroundTruth::relocated(const std::string& instance_id) const {
  auto it = labels.find(instance_id);
  return it != labels.end() && it->second != ChangeKind::unchanged;
}

GroundTruth ground_truth_relocations(const Scene& pre, const Scene& post,
                                     double min_displacement) {
  GroundTruth truth;
  for (const auto& o : pre.objects()) {
    const SceneObject* after = post.find(o.instance_id);
    if (!after) {
      truth.labels[o.instance_id] = ChangeKind::removed;
      continue;
    }
    const double d = norm(after->position - o.position);
    truth.labels[o.instance_id] = d > min_displacement ? ChangeKind::moved : ChangeKind::unchanged;
  }
  for (const auto& o : post.objects())
    if (!pre.find(o.instance_id)) truth.labels[o.instance_id] = ChangeKind::added;
  return truth;
}

}  // namespace reloc
