#pragma once

#include <filesystem>
#include <string>

#include "reloc/scene.hpp"

namespace reloc {

// Scene files: JSON with `format_version`, `scene_id`, `bounds`, `grid_step`,
// `surfaces[]` and `objects[]`. Lengths in meters, angles in degrees.
SceneSpec parse_scene_spec(const std::string& text);
Scene parse_scene(const std::string& text);
std::string serialize_scene(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

// ChangeSet files: JSON with `format_version`, `moves[]`, `removals[]`,
// `additions[]`.
ChangeSet parse_changeset(const std::string& text);
std::string serialize_changeset(const ChangeSet& changes);
ChangeSet load_changeset(const std::filesystem::path& path);
void save_changeset(const ChangeSet& changes, const std::filesystem::path& path);

}  // namespace reloc
