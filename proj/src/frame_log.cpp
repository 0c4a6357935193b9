#include <sstream>

#include <fmt/format.h>

#include "internal/json_util.hpp"
#include "reloc/error.hpp"
#include "reloc/io.hpp"
#include "reloc/percept.hpp"

namespace reloc {

namespace {

using detail::json;

constexpr double kRangeEps = 1e-6;

std::string f6(double v) { return fmt::format("{:.6f}", v); }

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string camera_record(const CameraModel& c) {
  return fmt::format(
      "{{\"horizontal_fov\":{},\"vertical_fov\":{},\"image_size\":[{},{}],\"max_depth\":{},"
      "\"near_clip\":{}}}",
      f6(c.horizontal_fov), f6(c.vertical_fov), c.image_width, c.image_height, f6(c.max_depth),
      f6(c.near_clip));
}

CameraModel camera_from_json(const json& j, const std::string& path) {
  CameraModel c;
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  if (auto it = j.find("horizontal_fov"); it != j.end())
    c.horizontal_fov = detail::as_number(*it, detail::join(path, "horizontal_fov"));
  if (auto it = j.find("vertical_fov"); it != j.end())
    c.vertical_fov = detail::as_number(*it, detail::join(path, "vertical_fov"));
  if (auto it = j.find("image_size"); it != j.end()) {
    const std::string p = detail::join(path, "image_size");
    if (!it->is_array() || it->size() != 2) throw SchemaError(p, "expected [width, height]");
    c.image_width = static_cast<int>(detail::as_int((*it)[0], detail::index(p, 0)));
    c.image_height = static_cast<int>(detail::as_int((*it)[1], detail::index(p, 1)));
  }
  if (auto it = j.find("max_depth"); it != j.end())
    c.max_depth = detail::as_number(*it, detail::join(path, "max_depth"));
  if (auto it = j.find("near_clip"); it != j.end())
    c.near_clip = detail::as_number(*it, detail::join(path, "near_clip"));
  try {
    validate(c);
  } catch (const SchemaError& e) {
    throw SchemaError(detail::join(path, e.path()), "invalid camera model");
  }
  return c;
}

std::string where(std::size_t frame, const std::string& key) {
  return fmt::format("frame {}, object '{}'", frame, key);
}

void check_detection(const Detection& d) {
  const BBox& b = d.bbox;
  auto fail = [&](const std::string& what) {
    throw ValidationError(where(d.frame_index, d.object_key) + ": " + what);
  };
  if (d.object_key.empty()) fail("empty object_key");
  for (double v : {b.cx, b.cy, b.w, b.h})
    if (!(v >= 0.0 && v <= 1.0)) fail(fmt::format("bbox value {} outside [0, 1]", v));
  if (!(b.w > 0.0) || !(b.h > 0.0)) fail("bbox width and height must be positive");
  if (b.cx - b.w / 2 < -kRangeEps || b.cx + b.w / 2 > 1.0 + kRangeEps ||
      b.cy - b.h / 2 < -kRangeEps || b.cy + b.h / 2 > 1.0 + kRangeEps)
    fail("bbox extends beyond the image");
  if (!(d.depth > 0.0) || !std::isfinite(d.depth)) fail("depth must be positive");
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) fail("confidence outside [0, 1]");
}

Detection parse_detection(const json& j, std::size_t frame, std::size_t line) {
  auto num = [&](const json& v, const char* field) {
    if (!v.is_number()) throw ParseError(fmt::format("'{}' must be a number", field), line);
    return v.get<double>();
  };
  auto str = [&](const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
      throw ParseError(fmt::format("detection needs string '{}'", field), line);
    return it->get<std::string>();
  };
  auto field = [&](const char* name) -> const json& {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(fmt::format("detection needs '{}'", name), line);
    return *it;
  };
  if (!j.is_object()) throw ParseError("detection must be an object", line);
  Detection d;
  d.frame_index = frame;
  d.object_key = str("object_key");
  d.class_label = str("class_label");
  const json& bbox = field("bbox");
  if (!bbox.is_array() || bbox.size() != 4) throw ParseError("bbox must be [cx, cy, w, h]", line);
  d.bbox = {num(bbox[0], "bbox"), num(bbox[1], "bbox"), num(bbox[2], "bbox"), num(bbox[3], "bbox")};
  d.depth = num(field("depth"), "depth");
  d.confidence = num(field("confidence"), "confidence");
  return d;
}

}  // namespace

void validate(const FrameLog& log) {
  for (const auto& [index, dets] : log.frames) {
    for (const auto& d : dets) {
      if (d.frame_index != index)
        throw ValidationError(where(index, d.object_key) + ": detection carries frame index " +
                              std::to_string(d.frame_index));
      check_detection(d);
    }
  }
}

std::string serialize_frame_log(const FrameLog& log) {
  std::string out = fmt::format(
      "{{\"scene_id\":{},\"route_hash\":{},\"camera\":{},\"format_version\":{}}}\n",
      quoted(log.scene_id), quoted(log.route_hash), camera_record(log.camera), kFormatVersion);
  for (const auto& [index, dets] : log.frames) {
    out += fmt::format("{{\"frame_index\":{},\"detections\":[", index);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const Detection& d = dets[i];
      if (i) out += ',';
      out += fmt::format(
          "{{\"object_key\":{},\"class_label\":{},\"bbox\":[{},{},{},{}],\"depth\":{},"
          "\"confidence\":{}}}",
          quoted(d.object_key), quoted(d.class_label), f6(d.bbox.cx), f6(d.bbox.cy), f6(d.bbox.w),
          f6(d.bbox.h), f6(d.depth), f6(d.confidence));
    }
    out += "]}\n";
  }
  return out;
}

FrameLog parse_frame_log(const std::string& text) {
  FrameLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object()) throw ParseError("record must be a JSON object", line_no);

    if (!header_seen) {
      if (rec.contains("frame_index")) throw ParseError("missing header record", line_no);
      auto version = rec.find("format_version");
      if (version == rec.end() || !version->is_number_integer() ||
          version->get<int>() != kFormatVersion)
        throw ParseError(fmt::format("header needs format_version {}", kFormatVersion), line_no);
      try {
        log.scene_id = detail::as_string(detail::require(rec, "scene_id", ""), "scene_id");
        log.route_hash = detail::as_string(detail::require(rec, "route_hash", ""), "route_hash");
        log.camera = camera_from_json(detail::require(rec, "camera", ""), "camera");
      } catch (const SchemaError& e) {
        throw ParseError(e.what(), line_no);
      }
      header_seen = true;
      continue;
    }

    auto fi = rec.find("frame_index");
    if (fi == rec.end() || !fi->is_number_unsigned())
      throw ParseError("frame record needs a non-negative integer frame_index", line_no);
    const auto frame = fi->get<std::size_t>();
    auto dets = rec.find("detections");
    if (dets == rec.end() || !dets->is_array())
      throw ParseError("frame record needs a detections array", line_no);
    if (log.frames.contains(frame))
      throw ParseError(fmt::format("duplicate frame_index {}", frame), line_no);
    std::vector<Detection> parsed;
    parsed.reserve(dets->size());
    for (const auto& d : *dets) {
      parsed.push_back(parse_detection(d, frame, line_no));
      try {
        check_detection(parsed.back());
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
      }
    }
    log.frames.emplace(frame, std::move(parsed));
  }
  return log;
}

FrameLog load_frame_log(const std::filesystem::path& path) {
  return parse_frame_log(read_text_file(path));
}

void save_frame_log(const FrameLog& log, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_frame_log(log));
}

CameraModel parse_camera(const std::string& text) {
  const json root = detail::parse_document(text, "camera file");
  detail::check_format_version(root, kFormatVersion);
  return camera_from_json(root, "");
}

std::string serialize_camera(const CameraModel& c) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["horizontal_fov"] = c.horizontal_fov;
  j["vertical_fov"] = c.vertical_fov;
  j["image_size"] = {c.image_width, c.image_height};
  j["max_depth"] = c.max_depth;
  j["near_clip"] = c.near_clip;
  return j.dump(2) + "\n";
}

DetectorConfig parse_detector(const std::string& text) {
  const json root = detail::parse_document(text, "detector file");
  if (!root.is_object()) throw SchemaError("", "detector file must be a JSON object");
  detail::check_format_version(root, kFormatVersion);
  DetectorConfig cfg;
  if (auto it = root.find("seed"); it != root.end()) cfg.seed = detail::as_uint(*it, "seed");
  auto unit = [&](const char* name, double& slot) {
    if (auto it = root.find(name); it != root.end()) slot = detail::as_number(*it, name);
  };
  unit("min_visible_fraction", cfg.min_visible_fraction);
  unit("confidence_noise_sd", cfg.confidence_noise_sd);
  unit("base_confidence", cfg.base_confidence);
  unit("visibility_weight", cfg.visibility_weight);
  unit("miss_rate_at_threshold", cfg.miss_rate_at_threshold);
  validate(cfg);
  return cfg;
}

std::string serialize_detector(const DetectorConfig& cfg) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = cfg.seed;
  j["min_visible_fraction"] = cfg.min_visible_fraction;
  j["confidence_noise_sd"] = cfg.confidence_noise_sd;
  j["base_confidence"] = cfg.base_confidence;
  j["visibility_weight"] = cfg.visibility_weight;
  j["miss_rate_at_threshold"] = cfg.miss_rate_at_threshold;
  return j.dump(2) + "\n";
}

}  // namespace reloc
