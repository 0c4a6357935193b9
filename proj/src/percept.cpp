#include "reloc/percept.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "reloc/error.hpp"
#include "reloc/hash.hpp"

namespace reloc {

namespace {

struct CameraPoint {
  double x;  // right
  double y;  // up
  double z;  // forward
};

CameraPoint to_camera(const CameraPose& cam, const Vec3& p) {
  const Vec3 d = p - cam.eye;
  return {dot(d, cam.right), dot(d, cam.up), dot(d, cam.forward)};
}

struct Intrinsics {
  double tan_half_h;
  double tan_half_v;
};

Intrinsics intrinsics(const CameraModel& camera) {
  return {std::tan(deg2rad(camera.horizontal_fov) / 2), std::tan(deg2rad(camera.vertical_fov) / 2)};
}

// Image-space rectangle before conversion to center/size form.
struct ImageRect {
  double u0, v0, u1, v1;
};

std::optional<ImageRect> project_rect(const CameraModel& camera, const CameraPose& cam,
                                      const OrientedBox& box) {
  const auto corners = box.corners();
  std::array<CameraPoint, 8> pts;
  for (std::size_t i = 0; i < 8; ++i) pts[i] = to_camera(cam, corners[i]);

  const Intrinsics k = intrinsics(camera);
  const double near = camera.near_clip;
  double u0 = std::numeric_limits<double>::infinity();
  double v0 = u0;
  double u1 = -u0;
  double v1 = -u0;
  bool any = false;
  auto add = [&](const CameraPoint& p) {
    const double u = 0.5 + p.x / (p.z * 2 * k.tan_half_h);
    const double v = 0.5 - p.y / (p.z * 2 * k.tan_half_v);
    u0 = std::min(u0, u);
    u1 = std::max(u1, u);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
    any = true;
  };
  for (const auto& p : pts)
    if (p.z >= near) add(p);
  // Corners are indexed by bits (x, y, z); edges join indices one bit apart.
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t bit : {1u, 2u, 4u}) {
      const std::size_t b = a | bit;
      if (b == a) continue;
      const CameraPoint& pa = pts[a];
      const CameraPoint& pb = pts[b];
      if ((pa.z < near) == (pb.z < near)) continue;
      const double t = (near - pa.z) / (pb.z - pa.z);
      add({pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y), near});
    }
  }
  if (!any) return std::nullopt;
  const ImageRect clipped{std::max(u0, 0.0), std::max(v0, 0.0), std::min(u1, 1.0),
                          std::min(v1, 1.0)};
  if (clipped.u1 <= clipped.u0 || clipped.v1 <= clipped.v0) return std::nullopt;
  return clipped;
}

Vec3 ray_through(const CameraPose& cam, const Intrinsics& k, double u, double v) {
  return cam.forward + cam.right * ((u - 0.5) * 2 * k.tan_half_h) +
         cam.up * (-(v - 0.5) * 2 * k.tan_half_v);
}

double sampled_visibility(const CameraModel& camera, const CameraPose& cam,
                          const OrientedBox& target, const ImageRect& rect,
                          const std::vector<const OrientedBox*>& occluders) {
  const Intrinsics k = intrinsics(camera);
  auto blocked = [&](const Vec3& dir, double t_target) {
    for (const OrientedBox* o : occluders) {
      const auto t = o->intersect_ray(cam.eye, dir);
      if (t && *t < t_target * (1.0 - 1e-9)) return true;
    }
    return false;
  };

  int hits = 0;
  int clear = 0;
  for (int i = 0; i < kOcclusionGrid; ++i) {
    for (int j = 0; j < kOcclusionGrid; ++j) {
      const double u = rect.u0 + (i + 0.5) / kOcclusionGrid * (rect.u1 - rect.u0);
      const double v = rect.v0 + (j + 0.5) / kOcclusionGrid * (rect.v1 - rect.v0);
      const Vec3 dir = ray_through(cam, k, u, v);
      const auto t = target.intersect_ray(cam.eye, dir);
      if (!t) continue;
      ++hits;
      if (!blocked(dir, *t)) ++clear;
    }
  }
  if (hits > 0) return static_cast<double>(clear) / hits;

  // Silhouette too thin for the grid: fall back to the center ray.
  const Vec3 dir = target.center - cam.eye;
  const auto t = target.intersect_ray(cam.eye, dir);
  if (!t) return 0.0;
  return blocked(dir, *t) ? 0.0 : 1.0;
}

bool rects_overlap(const ImageRect& a, const ImageRect& b) {
  return a.u0 < b.u1 && b.u0 < a.u1 && a.v0 < b.v1 && b.v0 < a.v1;
}

Projection to_projection(const ImageRect& r, double depth) {
  return {BBox{(r.u0 + r.u1) / 2, (r.v0 + r.v1) / 2, r.u1 - r.u0, r.v1 - r.v0}, depth};
}

// Projected rectangles of every box that can occlude, for one pose.
struct FrameGeometry {
  std::vector<OrientedBox> boxes;  // objects first, then surfaces
  std::vector<std::optional<ImageRect>> rects;
};

FrameGeometry frame_geometry(const Scene& scene, const CameraModel& camera, const CameraPose& cam) {
  FrameGeometry g;
  g.boxes.reserve(scene.objects().size() + scene.surfaces().size());
  for (const auto& o : scene.objects()) g.boxes.push_back(o.box());
  for (const auto& s : scene.surfaces()) g.boxes.push_back(s.box());
  g.rects.reserve(g.boxes.size());
  for (const auto& b : g.boxes) g.rects.push_back(project_rect(camera, cam, b));
  return g;
}

double visibility_in_frame(const FrameGeometry& g, const CameraModel& camera,
                           const CameraPose& cam, std::size_t target) {
  const ImageRect& rect = *g.rects[target];
  std::vector<const OrientedBox*> occluders;
  for (std::size_t k = 0; k < g.boxes.size(); ++k) {
    if (k == target || !g.rects[k] || !rects_overlap(*g.rects[k], rect)) continue;
    occluders.push_back(&g.boxes[k]);
  }
  return sampled_visibility(camera, cam, g.boxes[target], rect, occluders);
}

std::uint64_t noise_seed(std::uint64_t seed, std::size_t frame_index, const std::string& id) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(frame_index));
  return mix64(h ^ fnv1a64(id));
}

void require_unit(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw SchemaError(field, "must lie in [0, 1]");
}

}  // namespace

void validate(const CameraModel& c) {
  if (!(c.horizontal_fov > 0.0 && c.horizontal_fov < 180.0))
    throw SchemaError("horizontal_fov", "must lie in (0, 180) degrees");
  if (!(c.vertical_fov > 0.0 && c.vertical_fov < 180.0))
    throw SchemaError("vertical_fov", "must lie in (0, 180) degrees");
  if (c.image_width <= 0 || c.image_height <= 0)
    throw SchemaError("image_size", "dimensions must be positive");
  if (!(c.near_clip > 0.0 && c.near_clip < c.max_depth))
    throw SchemaError("near_clip", "must satisfy 0 < near_clip < max_depth");
}

void validate(const DetectorConfig& cfg) {
  require_unit(cfg.min_visible_fraction, "min_visible_fraction");
  require_unit(cfg.confidence_noise_sd, "confidence_noise_sd");
  require_unit(cfg.base_confidence, "base_confidence");
  require_unit(cfg.visibility_weight, "visibility_weight");
  require_unit(cfg.miss_rate_at_threshold, "miss_rate_at_threshold");
}

CameraPose CameraPose::from(const AgentPose& pose) {
  const double yaw = deg2rad(pose.yaw);
  const double pitch = deg2rad(pose.head_pitch);
  // Exact values at the discrete yaw set keep axis-aligned scenes symmetric.
  double sy = std::sin(yaw);
  double cy = std::cos(yaw);
  if (pose.yaw % 90 == 0) {
    sy = std::round(sy);
    cy = std::round(cy);
  }
  const double sp = std::sin(pitch);
  const double cp = std::cos(pitch);
  CameraPose c;
  c.eye = pose.eye();
  c.forward = {sy * cp, sp, cy * cp};
  c.right = {cy, 0.0, -sy};
  c.up = cross(c.forward, c.right);
  return c;
}

std::optional<Projection> project_box(const CameraModel& camera, const CameraPose& cam,
                                      const OrientedBox& box) {
  const auto rect = project_rect(camera, cam, box);
  if (!rect) return std::nullopt;
  return to_projection(*rect, norm(box.center - cam.eye));
}

std::optional<Projection> project_object(const CameraModel& camera, const AgentPose& pose,
                                         const SceneObject& object) {
  return project_box(camera, CameraPose::from(pose), object.box());
}

double visible_fraction(const Scene& scene, const AgentPose& pose, const CameraModel& camera,
                        const SceneObject& object) {
  const CameraPose cam = CameraPose::from(pose);
  FrameGeometry g = frame_geometry(scene, camera, cam);
  // `object` need not belong to the scene; occluders are everything else.
  std::size_t target = g.boxes.size();
  for (std::size_t k = 0; k < scene.objects().size(); ++k)
    if (scene.objects()[k].instance_id == object.instance_id) target = k;
  if (target == g.boxes.size()) {
    g.boxes.push_back(object.box());
    g.rects.push_back(project_rect(camera, cam, g.boxes.back()));
  } else {
    g.boxes[target] = object.box();
    g.rects[target] = project_rect(camera, cam, g.boxes[target]);
  }
  if (!g.rects[target]) return 0.0;
  return visibility_in_frame(g, camera, cam, target);
}

double quantize6(double v) {
  const double q = std::round(v * 1e6) / 1e6;
  return q == 0.0 ? 0.0 : q;
}

std::vector<Detection> detect(const Scene& scene, const AgentPose& pose, const CameraModel& camera,
                              const DetectorConfig& cfg, std::size_t frame_index) {
  const CameraPose cam = CameraPose::from(pose);
  const FrameGeometry g = frame_geometry(scene, camera, cam);
  std::vector<Detection> out;
  for (std::size_t k = 0; k < scene.objects().size(); ++k) {
    if (!g.rects[k]) continue;
    const SceneObject& obj = scene.objects()[k];
    const double fraction = visibility_in_frame(g, camera, cam, k);
    if (fraction <= 0.0 || fraction < cfg.min_visible_fraction) continue;

    std::mt19937_64 stream(noise_seed(cfg.seed, frame_index, obj.instance_id));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double draw = unit(stream);
    const double slack = 1.0 - cfg.min_visible_fraction;
    const double miss_p =
        slack > 0.0 ? cfg.miss_rate_at_threshold * (1.0 - fraction) / slack : 0.0;
    if (draw < miss_p) continue;
    double noise = 0.0;
    if (cfg.confidence_noise_sd > 0.0)
      noise = std::normal_distribution<double>(0.0, cfg.confidence_noise_sd)(stream);
    const double confidence =
        std::clamp(cfg.base_confidence + cfg.visibility_weight * fraction + noise, 0.0, 1.0);

    const Projection p = to_projection(*g.rects[k], norm(obj.position - cam.eye));
    Detection d;
    d.frame_index = frame_index;
    d.object_key = obj.instance_id;
    d.class_label = obj.class_label;
    d.bbox = {quantize6(p.bbox.cx), quantize6(p.bbox.cy), quantize6(p.bbox.w), quantize6(p.bbox.h)};
    d.depth = quantize6(p.depth);
    d.confidence = quantize6(confidence);
    if (d.bbox.w <= 0.0 || d.bbox.h <= 0.0 || d.depth <= 0.0) continue;
    out.push_back(std::move(d));
  }
  return out;
}

FrameLog capture_scene(const Scene& scene, const Route& route, const CameraModel& camera,
                       const DetectorConfig& cfg) {
  validate(camera);
  validate(cfg);
  const PoseTrace trace = execute_route(scene, route);
  FrameLog log;
  log.scene_id = scene.scene_id();
  log.route_hash = route_hash(route);
  log.camera = camera;
  for (const auto& e : trace.entries)
    log.frames.emplace(e.frame_index, detect(scene, e.pose, camera, cfg, e.frame_index));
  return log;
}

}  // namespace reloc
