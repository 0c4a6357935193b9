#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reloc/geometry.hpp"

namespace reloc {

inline constexpr int kFormatVersion = 1;
inline constexpr double kDefaultGridStep = 0.25;
inline constexpr double kDefaultMinDisplacement = 0.25;
inline constexpr int kPlacementRetries = 100;

struct SceneObject {
  std::string instance_id;
  std::string class_label;
  Vec3 position;
  Vec3 half_extents;
  double yaw{0.0};
  std::optional<std::string> surface_id;  // none: standing on the floor

  friend bool operator==(const SceneObject&, const SceneObject&) = default;

  OrientedBox box() const { return {position, half_extents, yaw}; }
};

// Horizontal support (counter, table). Modeled as a solid block from the
// floor up to `height`.
struct Surface {
  std::string id;
  double height{0.0};
  Rect extent;

  friend bool operator==(const Surface&, const Surface&) = default;

  OrientedBox box() const;
};

// Plan-view occupancy at nav grid resolution. Cell (i, j) spans
// [origin.x + i*step, origin.x + (i+1)*step) and likewise along z; the agent
// stands at cell centers.
class WalkableGrid {
 public:
  WalkableGrid() = default;
  WalkableGrid(Vec2 origin, double step, int nx, int nz);

  double step() const { return step_; }
  int nx() const { return nx_; }
  int nz() const { return nz_; }
  Vec2 origin() const { return origin_; }

  std::optional<std::pair<int, int>> cell_of(const Vec2& p) const;
  Vec2 center_of(int i, int j) const;
  bool walkable(int i, int j) const;
  // True when `p` sits on the center of a walkable cell.
  bool walkable_at(const Vec2& p) const;
  void set(int i, int j, bool walkable);

  friend bool operator==(const WalkableGrid&, const WalkableGrid&) = default;

 private:
  Vec2 origin_;
  double step_{kDefaultGridStep};
  int nx_{0};
  int nz_{0};
  std::vector<std::uint8_t> cells_;
};

struct SceneSpec;

// Validated, immutable kitchen scene. Construct through build_scene.
class Scene {
 public:
  const std::string& scene_id() const { return scene_id_; }
  const Aabb& bounds() const { return bounds_; }
  double grid_step() const { return walkable_.step(); }
  const WalkableGrid& walkable() const { return walkable_; }
  const std::vector<Surface>& surfaces() const { return surfaces_; }
  const std::vector<SceneObject>& objects() const { return objects_; }

  const SceneObject* find(const std::string& instance_id) const;
  const Surface* find_surface(const std::string& id) const;

  friend bool operator==(const Scene&, const Scene&) = default;

 private:
  friend Scene build_scene(const SceneSpec&);

  std::string scene_id_;
  Aabb bounds_;
  WalkableGrid walkable_;
  std::vector<Surface> surfaces_;
  std::vector<SceneObject> objects_;
};

// Unvalidated scene description, as read from a scene file.
struct SceneSpec {
  std::string scene_id;
  Aabb bounds;
  double grid_step{kDefaultGridStep};
  std::vector<Surface> surfaces;
  std::vector<SceneObject> objects;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

SceneSpec to_spec(const Scene& scene);

// Throws SchemaError for malformed values and PlacementError listing every
// colliding pair.
Scene build_scene(const SceneSpec& spec);

struct ObjectMove {
  std::string instance_id;
  Vec3 new_position;
  double new_yaw{0.0};
  std::optional<std::string> new_surface_id;

  friend bool operator==(const ObjectMove&, const ObjectMove&) = default;
};

struct ChangeSet {
  std::vector<ObjectMove> moves;
  std::vector<std::string> removals;
  std::vector<SceneObject> additions;

  bool empty() const { return moves.empty() && removals.empty() && additions.empty(); }

  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

Scene apply_changes(const Scene& scene, const ChangeSet& changes);

// Resamples the placement of every object whose class is in
// `movable_classes`. Objects resting on a surface go to a random surface;
// floor objects stay on the floor. Deterministic in (scene, seed, classes).
Scene randomize_placements(const Scene& scene, std::uint64_t seed,
                           const std::set<std::string>& movable_classes);

// Resamples the listed objects, each at least `min_move_distance` (plan view)
// away from where it was. Objects are processed in scene order.
Scene relocate_objects(const Scene& scene, std::uint64_t seed,
                       const std::set<std::string>& instance_ids, double min_move_distance = 0.0);

enum class ChangeKind { unchanged, moved, removed, added };

const char* to_string(ChangeKind kind);

// Geometric change label for every instance id of either scene. An object
// counts as moved iff its displacement strictly exceeds `min_displacement`.
struct GroundTruth {
  std::map<std::string, ChangeKind> labels;

  // Only the moved/removed/added entries.
  std::map<std::string, ChangeKind> changed() const;
  bool relocated(const std::string& instance_id) const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

GroundTruth ground_truth_relocations(const Scene& pre, const Scene& post,
                                     double min_displacement = kDefaultMinDisplacement);

}  // namespace reloc
