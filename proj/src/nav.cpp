#include "reloc/nav.hpp"

#include <array>
#include <utility>

#include <fmt/format.h>

#include "internal/json_util.hpp"
#include "reloc/error.hpp"
#include "reloc/hash.hpp"
#include "reloc/io.hpp"

namespace reloc {

namespace {

constexpr std::array<std::pair<Action, std::string_view>, 8> kActionNames{{
    {Action::MoveAhead, "MoveAhead"},
    {Action::MoveBack, "MoveBack"},
    {Action::MoveLeft, "MoveLeft"},
    {Action::MoveRight, "MoveRight"},
    {Action::RotateLeft, "RotateLeft"},
    {Action::RotateRight, "RotateRight"},
    {Action::LookUp, "LookUp"},
    {Action::LookDown, "LookDown"},
}};

// Unit forward direction on the grid for a yaw in {0, 90, 180, 270}.
std::pair<int, int> forward_of(int yaw) {
  switch (((yaw % 360) + 360) % 360) {
    case 0: return {0, 1};
    case 90: return {1, 0};
    case 180: return {0, -1};
    default: return {-1, 0};
  }
}

bool valid_yaw(int yaw) { return yaw == 0 || yaw == 90 || yaw == 180 || yaw == 270; }
bool valid_pitch(int pitch) { return pitch == -30 || pitch == 0 || pitch == 30; }

}  // namespace

std::string_view to_string(Action a) {
  for (const auto& [act, name] : kActionNames)
    if (act == a) return name;
  return "?";
}

std::optional<Action> parse_action(std::string_view name) {
  for (const auto& [act, n] : kActionNames)
    if (n == name) return act;
  return std::nullopt;
}

AgentPose apply_action(const AgentPose& pose, Action action, double grid_step) {
  AgentPose next = pose;
  auto translate = [&](int turn) {
    const auto [fx, fz] = forward_of(pose.yaw + turn);
    next.position.x += fx * grid_step;
    next.position.z += fz * grid_step;
  };
  switch (action) {
    case Action::MoveAhead: translate(0); break;
    case Action::MoveRight: translate(90); break;
    case Action::MoveBack: translate(180); break;
    case Action::MoveLeft: translate(270); break;
    case Action::RotateRight: next.yaw = (pose.yaw + kRotationStep) % 360; break;
    case Action::RotateLeft: next.yaw = (pose.yaw + 360 - kRotationStep) % 360; break;
    case Action::LookUp:
      if (pose.head_pitch + kPitchStep > kMaxPitch)
        throw RouteError(fmt::format("LookUp saturates head pitch at {}", pose.head_pitch),
                         std::nullopt);
      next.head_pitch += kPitchStep;
      break;
    case Action::LookDown:
      if (pose.head_pitch - kPitchStep < -kMaxPitch)
        throw RouteError(fmt::format("LookDown saturates head pitch at {}", pose.head_pitch),
                         std::nullopt);
      next.head_pitch -= kPitchStep;
      break;
  }
  return next;
}

std::vector<RouteViolation> validate_route(const Scene& scene, const Route& route) {
  using Kind = RouteViolation::Kind;
  std::vector<RouteViolation> out;
  if (route.actions.empty()) out.push_back({Kind::empty_route, std::nullopt, std::nullopt, "route has no actions"});
  if (std::abs(route.grid_step - scene.grid_step()) > 1e-9)
    out.push_back({Kind::grid_mismatch, std::nullopt, std::nullopt,
                   fmt::format("route grid step {} differs from scene grid step {}",
                               route.grid_step, scene.grid_step())});
  const AgentPose& start = route.start_pose;
  if (!valid_yaw(start.yaw) || !valid_pitch(start.head_pitch) ||
      !scene.walkable().walkable_at(start.position) || !(start.camera_height > 0.0))
    out.push_back({Kind::invalid_start, std::nullopt, start.position,
                   fmt::format("start pose ({}, {}) yaw {} pitch {} is not a valid walkable pose",
                               start.position.x, start.position.z, start.yaw, start.head_pitch)});
  if (!out.empty() && out.back().kind == Kind::invalid_start) return out;

  AgentPose pose = start;
  for (std::size_t k = 0; k < route.actions.size(); ++k) {
    const Action a = route.actions[k];
    AgentPose next;
    try {
      next = apply_action(pose, a, scene.grid_step());
    } catch (const RouteError& e) {
      out.push_back({Kind::saturation, k, std::nullopt, fmt::format("action {}: {}", k, e.what())});
      continue;
    }
    if (next.position != pose.position && !scene.walkable().walkable_at(next.position)) {
      out.push_back({Kind::collision, k, next.position,
                     fmt::format("action {} ({}) enters non-walkable cell ({}, {})", k,
                                 to_string(a), next.position.x, next.position.z)});
      continue;
    }
    pose = next;
  }
  return out;
}

PoseTrace execute_route(const Scene& scene, const Route& route) {
  const auto violations = validate_route(scene, route);
  if (!violations.empty())
    throw RouteError(violations.front().message, violations.front().action_index);
  PoseTrace trace;
  trace.entries.reserve(route.actions.size() + 1);
  AgentPose pose = route.start_pose;
  trace.entries.push_back({0, pose});
  for (std::size_t k = 0; k < route.actions.size(); ++k) {
    pose = apply_action(pose, route.actions[k], route.grid_step);
    trace.entries.push_back({k + 1, pose});
  }
  return trace;
}

Route parse_route(const std::string& text) {
  using detail::json;
  const json root = detail::parse_document(text, "route file");
  if (!root.is_object()) throw SchemaError("", "route file must be a JSON object");
  detail::check_format_version(root, kFormatVersion);

  Route route;
  const json& sp = detail::require(root, "start_pose", "");
  route.start_pose.position =
      detail::as_vec2(detail::require(sp, "position", "start_pose"), "start_pose.position");
  route.start_pose.yaw =
      static_cast<int>(detail::as_int(detail::require(sp, "yaw", "start_pose"), "start_pose.yaw"));
  route.start_pose.head_pitch = static_cast<int>(
      detail::as_int(detail::require(sp, "head_pitch", "start_pose"), "start_pose.head_pitch"));
  if (auto it = sp.find("camera_height"); it != sp.end())
    route.start_pose.camera_height = detail::as_number(*it, "start_pose.camera_height");
  if (!valid_yaw(route.start_pose.yaw))
    throw SchemaError("start_pose.yaw", "must be one of 0, 90, 180, 270");
  if (!valid_pitch(route.start_pose.head_pitch))
    throw SchemaError("start_pose.head_pitch", "must be one of -30, 0, 30");
  if (auto it = root.find("grid_step"); it != root.end())
    route.grid_step = detail::as_number(*it, "grid_step");
  if (!(route.grid_step > 0.0)) throw SchemaError("grid_step", "must be positive");

  const json& actions = detail::as_array(detail::require(root, "actions", ""), "actions");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string path = detail::index("actions", i);
    const std::string name = detail::as_string(actions[i], path);
    const auto a = parse_action(name);
    if (!a) throw SchemaError(path, "unknown action '" + name + "'");
    route.actions.push_back(*a);
  }
  return route;
}

std::string serialize_route(const Route& route) {
  nlohmann::ordered_json root;
  root["format_version"] = kFormatVersion;
  root["start_pose"]["position"] = {route.start_pose.position.x, route.start_pose.position.z};
  root["start_pose"]["yaw"] = route.start_pose.yaw;
  root["start_pose"]["head_pitch"] = route.start_pose.head_pitch;
  root["start_pose"]["camera_height"] = route.start_pose.camera_height;
  root["grid_step"] = route.grid_step;
  root["actions"] = nlohmann::ordered_json::array();
  for (Action a : route.actions) root["actions"].push_back(std::string(to_string(a)));
  return root.dump(2) + "\n";
}

Route load_route(const std::filesystem::path& path) {
  try {
    return parse_route(read_text_file(path));
  } catch (const SchemaError& e) {
    throw e.in_file(path.string());
  }
}

void save_route(const Route& route, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_route(route));
}

std::string route_hash(const Route& route) { return hex64(fnv1a64(serialize_route(route))); }

}  // namespace reloc
