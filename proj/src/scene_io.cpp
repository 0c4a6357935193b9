#include "reloc/scene_io.hpp"

#include "internal/json_util.hpp"
#include "reloc/io.hpp"

namespace reloc {

namespace {

using detail::json;
using nlohmann::ordered_json;

SceneObject parse_object(const json& j, const std::string& path) {
  SceneObject o;
  o.instance_id = detail::as_string(detail::require(j, "instance_id", path), path + ".instance_id");
  o.class_label = detail::as_string(detail::require(j, "class_label", path), path + ".class_label");
  o.position = detail::as_vec3(detail::require(j, "position", path), path + ".position");
  o.half_extents = detail::as_vec3(detail::require(j, "half_extents", path), path + ".half_extents");
  if (auto it = j.find("yaw"); it != j.end()) o.yaw = detail::as_number(*it, path + ".yaw");
  if (auto it = j.find("surface_id"); it != j.end() && !it->is_null())
    o.surface_id = detail::as_string(*it, path + ".surface_id");
  return o;
}

ordered_json object_json(const SceneObject& o) {
  ordered_json j;
  j["instance_id"] = o.instance_id;
  j["class_label"] = o.class_label;
  j["position"] = {o.position.x, o.position.y, o.position.z};
  j["half_extents"] = {o.half_extents.x, o.half_extents.y, o.half_extents.z};
  j["yaw"] = o.yaw;
  if (o.surface_id) j["surface_id"] = *o.surface_id;
  return j;
}

}  // namespace

SceneSpec parse_scene_spec(const std::string& text) {
  const json root = detail::parse_document(text, "scene file");
  if (!root.is_object()) throw SchemaError("", "scene file must be a JSON object");
  detail::check_format_version(root, kFormatVersion);

  SceneSpec spec;
  spec.scene_id = detail::as_string(detail::require(root, "scene_id", ""), "scene_id");
  const json& bounds = detail::require(root, "bounds", "");
  spec.bounds.min = detail::as_vec3(detail::require(bounds, "min", "bounds"), "bounds.min");
  spec.bounds.max = detail::as_vec3(detail::require(bounds, "max", "bounds"), "bounds.max");
  if (auto it = root.find("grid_step"); it != root.end())
    spec.grid_step = detail::as_number(*it, "grid_step");

  const json& surfaces = detail::as_array(detail::require(root, "surfaces", ""), "surfaces");
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const std::string path = detail::index("surfaces", i);
    const json& s = surfaces[i];
    Surface surface;
    surface.id = detail::as_string(detail::require(s, "id", path), path + ".id");
    surface.height = detail::as_number(detail::require(s, "height", path), path + ".height");
    const json& ext = detail::require(s, "extent", path);
    surface.extent.min = detail::as_vec2(detail::require(ext, "min", path + ".extent"),
                                         path + ".extent.min");
    surface.extent.max = detail::as_vec2(detail::require(ext, "max", path + ".extent"),
                                         path + ".extent.max");
    spec.surfaces.push_back(std::move(surface));
  }

  const json& objects = detail::as_array(detail::require(root, "objects", ""), "objects");
  for (std::size_t i = 0; i < objects.size(); ++i)
    spec.objects.push_back(parse_object(objects[i], detail::index("objects", i)));
  return spec;
}

Scene parse_scene(const std::string& text) { return build_scene(parse_scene_spec(text)); }

std::string serialize_scene(const Scene& scene) {
  ordered_json root;
  root["format_version"] = kFormatVersion;
  root["scene_id"] = scene.scene_id();
  const Aabb& b = scene.bounds();
  root["bounds"]["min"] = {b.min.x, b.min.y, b.min.z};
  root["bounds"]["max"] = {b.max.x, b.max.y, b.max.z};
  root["grid_step"] = scene.grid_step();
  root["surfaces"] = ordered_json::array();
  for (const auto& s : scene.surfaces()) {
    ordered_json j;
    j["id"] = s.id;
    j["height"] = s.height;
    j["extent"]["min"] = {s.extent.min.x, s.extent.min.z};
    j["extent"]["max"] = {s.extent.max.x, s.extent.max.z};
    root["surfaces"].push_back(std::move(j));
  }
  root["objects"] = ordered_json::array();
  for (const auto& o : scene.objects()) root["objects"].push_back(object_json(o));
  return root.dump(2) + "\n";
}

Scene load_scene(const std::filesystem::path& path) {
  try {
    return parse_scene(read_text_file(path));
  } catch (const SchemaError& e) {
    throw e.in_file(path.string());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_scene(scene));
}

ChangeSet parse_changeset(const std::string& text) {
  const json root = detail::parse_document(text, "changeset file");
  if (!root.is_object()) throw SchemaError("", "changeset file must be a JSON object");
  detail::check_format_version(root, kFormatVersion);

  ChangeSet cs;
  if (auto it = root.find("moves"); it != root.end()) {
    detail::as_array(*it, "moves");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = detail::index("moves", i);
      const json& m = (*it)[i];
      ObjectMove move;
      move.instance_id =
          detail::as_string(detail::require(m, "instance_id", path), path + ".instance_id");
      move.new_position =
          detail::as_vec3(detail::require(m, "new_position", path), path + ".new_position");
      if (auto y = m.find("new_yaw"); y != m.end())
        move.new_yaw = detail::as_number(*y, path + ".new_yaw");
      if (auto s = m.find("new_surface_id"); s != m.end() && !s->is_null())
        move.new_surface_id = detail::as_string(*s, path + ".new_surface_id");
      cs.moves.push_back(std::move(move));
    }
  }
  if (auto it = root.find("removals"); it != root.end()) {
    detail::as_array(*it, "removals");
    for (std::size_t i = 0; i < it->size(); ++i)
      cs.removals.push_back(detail::as_string((*it)[i], detail::index("removals", i)));
  }
  if (auto it = root.find("additions"); it != root.end()) {
    detail::as_array(*it, "additions");
    for (std::size_t i = 0; i < it->size(); ++i)
      cs.additions.push_back(parse_object((*it)[i], detail::index("additions", i)));
  }
  return cs;
}

std::string serialize_changeset(const ChangeSet& changes) {
  ordered_json root;
  root["format_version"] = kFormatVersion;
  root["moves"] = ordered_json::array();
  for (const auto& m : changes.moves) {
    ordered_json j;
    j["instance_id"] = m.instance_id;
    j["new_position"] = {m.new_position.x, m.new_position.y, m.new_position.z};
    j["new_yaw"] = m.new_yaw;
    if (m.new_surface_id) j["new_surface_id"] = *m.new_surface_id;
    root["moves"].push_back(std::move(j));
  }
  root["removals"] = changes.removals;
  root["additions"] = ordered_json::array();
  for (const auto& a : changes.additions) root["additions"].push_back(object_json(a));
  return root.dump(2) + "\n";
}

ChangeSet load_changeset(const std::filesystem::path& path) {
  try {
    return parse_changeset(read_text_file(path));
  } catch (const SchemaError& e) {
    throw e.in_file(path.string());
  }
}

void save_changeset(const ChangeSet& changes, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_changeset(changes));
}

}  // namespace reloc
