#pragma once

#include <filesystem>
#include <string>

#include "reloc/scene.hpp"

namespace test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RELOC_FIXTURES) / name;
}

// Scratch directory, wiped on construction and destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag)
      : path(std::filesystem::temp_directory_path() / ("reloc_test_" + tag)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }

  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline reloc::SceneObject object(const std::string& id, const std::string& cls, reloc::Vec3 pos,
                                 reloc::Vec3 half, std::optional<std::string> surface = {},
                                 double yaw = 0.0) {
  return {id, cls, pos, half, yaw, std::move(surface)};
}

// 6 x 6 m room with one 2 x 1 m table (height 0.8) along the north wall.
inline reloc::SceneSpec room_spec() {
  reloc::SceneSpec s;
  s.scene_id = "room";
  s.bounds = {{0, 0, 0}, {6, 3, 6}};
  s.surfaces.push_back({"table", 0.8, {{2, 4.5}, {4, 5.5}}});
  return s;
}

inline reloc::Vec3 on_table(double x, double z, double half_height) {
  return {x, 0.8 + half_height, z};
}

}  // namespace test
