#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reloc/nav.hpp"
#include "reloc/scene.hpp"

namespace reloc {

struct CameraModel {
  double horizontal_fov{90.0};  // degrees
  double vertical_fov{90.0};    // degrees
  int image_width{640};
  int image_height{640};
  double max_depth{10.0};  // meters; depth normalization range
  double near_clip{0.1};   // meters

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

// Throws SchemaError naming the offending field.
void validate(const CameraModel& camera);

// Normalized image-space box: center, width, height in [0, 1].
struct BBox {
  double cx{0.0};
  double cy{0.0};
  double w{0.0};
  double h{0.0};

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  std::size_t frame_index{0};
  std::string object_key;  // instance id (synthetic) or class label (external)
  std::string class_label;
  BBox bbox;
  double depth{0.0};  // meters, camera center to object center
  double confidence{0.0};

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct FrameLog {
  std::string scene_id;
  std::string route_hash;
  CameraModel camera;
  std::map<std::size_t, std::vector<Detection>> frames;

  friend bool operator==(const FrameLog&, const FrameLog&) = default;
};

struct DetectorConfig {
  std::uint64_t seed{0};
  double min_visible_fraction{0.2};
  double confidence_noise_sd{0.0};
  double base_confidence{0.55};
  double visibility_weight{0.4};
  double miss_rate_at_threshold{0.0};

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

void validate(const DetectorConfig& cfg);

inline constexpr int kOcclusionGrid = 5;

// Camera placed at the agent's eye, rotated by yaw then head pitch.
struct CameraPose {
  Vec3 eye;
  Vec3 forward;
  Vec3 right;
  Vec3 up;

  static CameraPose from(const AgentPose& pose);
};

struct Projection {
  BBox bbox;
  double depth{0.0};
};

// Pinhole projection of a box's 8 corners (with near-plane clipping of its
// edges). None when nothing of the box is in front of the near plane or its
// clipped box misses the image.
std::optional<Projection> project_box(const CameraModel& camera, const CameraPose& cam,
                                      const OrientedBox& box);
std::optional<Projection> project_object(const CameraModel& camera, const AgentPose& pose,
                                         const SceneObject& object);

// Fraction of a kOcclusionGrid x kOcclusionGrid ray grid, spread over the
// object's projected box, that reaches the object before any other object or
// surface block. Only rays that hit the object count towards the total.
double visible_fraction(const Scene& scene, const AgentPose& pose, const CameraModel& camera,
                        const SceneObject& object);

// Synthetic detector. Values are quantized to the log's 6-decimal precision.
std::vector<Detection> detect(const Scene& scene, const AgentPose& pose, const CameraModel& camera,
                              const DetectorConfig& cfg, std::size_t frame_index);

FrameLog capture_scene(const Scene& scene, const Route& route, const CameraModel& camera,
                       const DetectorConfig& cfg);

// Frame logs: JSON Lines. Line 1 is the header, each further line one frame.
// Floats carry 6 decimals.
std::string serialize_frame_log(const FrameLog& log);
FrameLog parse_frame_log(const std::string& text);
FrameLog load_frame_log(const std::filesystem::path& path);
void save_frame_log(const FrameLog& log, const std::filesystem::path& path);

// Throws ValidationError naming the frame and object for the first broken
// invariant.
void validate(const FrameLog& log);

// Rounds to the 6-decimal grid used on disk.
double quantize6(double v);

// Camera and detector config files (JSON objects with the field names above).
CameraModel parse_camera(const std::string& text);
std::string serialize_camera(const CameraModel& camera);
DetectorConfig parse_detector(const std::string& text);
std::string serialize_detector(const DetectorConfig& cfg);

}  // namespace reloc
