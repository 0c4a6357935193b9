#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reloc/geometry.hpp"
#include "reloc/scene.hpp"

namespace reloc {

inline constexpr int kRotationStep = 90;
inline constexpr int kPitchStep = 30;
inline constexpr int kMaxPitch = 30;
inline constexpr double kDefaultCameraHeight = 1.5;

// Discrete agent state. Yaw 0 faces +z, yaw 90 faces +x; positive pitch
// looks up.
struct AgentPose {
  Vec2 position;
  int yaw{0};         // one of 0, 90, 180, 270
  int head_pitch{0};  // one of -30, 0, 30
  double camera_height{kDefaultCameraHeight};

  friend bool operator==(const AgentPose&, const AgentPose&) = default;

  Vec3 eye() const { return {position.x, camera_height, position.z}; }
};

enum class Action { MoveAhead, MoveBack, MoveLeft, MoveRight, RotateLeft, RotateRight, LookUp, LookDown };

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view name);

struct Route {
  std::vector<Action> actions;
  AgentPose start_pose;
  double grid_step{kDefaultGridStep};

  friend bool operator==(const Route&, const Route&) = default;
};

struct PoseTrace {
  struct Entry {
    std::size_t frame_index;
    AgentPose pose;

    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;

  friend bool operator==(const PoseTrace&, const PoseTrace&) = default;
};

// Pure kinematics. Translation moves one grid step relative to the current
// yaw; walkability is checked by the route functions, which know the scene.
// Throws RouteError on pitch saturation.
AgentPose apply_action(const AgentPose& pose, Action action, double grid_step);

struct RouteViolation {
  enum class Kind { empty_route, invalid_start, collision, saturation, grid_mismatch };

  Kind kind;
  std::optional<std::size_t> action_index;  // none for route-level problems
  std::optional<Vec2> cell;                 // offending cell center for collisions
  std::string message;

  friend bool operator==(const RouteViolation&, const RouteViolation&) = default;
};

// Every violation with its action index; empty means the route is valid. A
// rejected action leaves the pose unchanged and checking continues.
std::vector<RouteViolation> validate_route(const Scene& scene, const Route& route);

// Throws RouteError carrying the first violation's action index.
PoseTrace execute_route(const Scene& scene, const Route& route);

// Route files: JSON with `start_pose`, `grid_step`, `actions[]`.
Route parse_route(const std::string& text);
std::string serialize_route(const Route& route);
Route load_route(const std::filesystem::path& path);
void save_route(const Route& route, const std::filesystem::path& path);

// Stable hash of the canonical route serialization.
std::string route_hash(const Route& route);

}  // namespace reloc
