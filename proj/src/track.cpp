#include "reloc/track.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "internal/json_util.hpp"
#include "reloc/error.hpp"
#include "reloc/io.hpp"

namespace reloc {

namespace {

using detail::json;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double effective_max_depth(const FrameLog& log, const TrackerConfig& cfg) {
  return cfg.max_depth.value_or(log.camera.max_depth);
}

struct ObjectTrack {
  std::optional<BestFrame> best;
  std::string class_label;
  bool ambiguous{false};
};

// One pass over the log: per key, the best-scoring surviving detection of
// each frame, reduced to the argmax frame.
std::map<std::string, ObjectTrack> best_frames(const FrameLog& log, const TrackerConfig& cfg,
                                               const std::string* only_key = nullptr) {
  const double max_depth = effective_max_depth(log, cfg);
  struct Acc {
    std::optional<BestFrame> best;
    double runner_up{-1.0};
    std::string best_label;
    std::string any_label;
    bool ambiguous{false};
  };
  std::map<std::string, Acc> acc;
  for (const auto& [frame, dets] : log.frames) {
    // Best surviving score per key within this frame.
    std::map<std::string, std::pair<double, const Detection*>> in_frame;
    std::map<std::string, int> multiplicity;
    for (const auto& d : dets) {
      if (only_key && d.object_key != *only_key) continue;
      if (++multiplicity[d.object_key] > 1) acc[d.object_key].ambiguous = true;
      if (acc[d.object_key].any_label.empty()) acc[d.object_key].any_label = d.class_label;
      if (!(d.confidence > cfg.min_confidence)) continue;
      const double s = visibility_score(normalize_features(d, max_depth));
      auto it = in_frame.find(d.object_key);
      if (it == in_frame.end() || s > it->second.first) in_frame[d.object_key] = {s, &d};
    }
    for (const auto& [key, entry] : in_frame) {
      Acc& a = acc[key];
      const double s = entry.first;
      if (!a.best) {
        a.best = BestFrame{key, frame, s, 0.0};
        a.best_label = entry.second->class_label;
      } else if (s > a.best->score) {
        a.runner_up = a.best->score;
        a.best->frame_index = frame;
        a.best->score = s;
        a.best_label = entry.second->class_label;
      } else {
        a.runner_up = std::max(a.runner_up, s);
      }
    }
  }
  std::map<std::string, ObjectTrack> out;
  for (auto& [key, a] : acc) {
    ObjectTrack t;
    if (a.best) {
      a.best->runner_up_gap = a.runner_up < 0.0 ? a.best->score : a.best->score - a.runner_up;
      t.best = a.best;
      t.class_label = a.best_label;
    } else {
      t.class_label = a.any_label;
    }
    t.ambiguous = a.ambiguous;
    out.emplace(key, std::move(t));
  }
  return out;
}

json best_json(const std::optional<BestFrame>& b) {
  if (!b) return nullptr;
  return {{"frame_index", b->frame_index}, {"score", b->score}, {"runner_up_gap", b->runner_up_gap}};
}

std::optional<BestFrame> best_from_json(const json& j, const std::string& key,
                                        const std::string& path) {
  if (j.is_null()) return std::nullopt;
  BestFrame b;
  b.object_key = key;
  b.frame_index = static_cast<std::size_t>(
      detail::as_uint(detail::require(j, "frame_index", path), path + ".frame_index"));
  b.score = detail::as_number(detail::require(j, "score", path), path + ".score");
  b.runner_up_gap =
      detail::as_number(detail::require(j, "runner_up_gap", path), path + ".runner_up_gap");
  return b;
}

std::optional<Decision> parse_decision(const std::string& s) {
  for (Decision d : {Decision::unchanged, Decision::relocated, Decision::removed, Decision::added})
    if (s == to_string(d)) return d;
  return std::nullopt;
}

TrackerConfig tracker_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  TrackerConfig cfg;
  if (auto it = j.find("frame_distance_threshold"); it != j.end())
    cfg.frame_distance_threshold = static_cast<int>(
        detail::as_int(*it, detail::join(path, "frame_distance_threshold")));
  if (auto it = j.find("min_confidence"); it != j.end())
    cfg.min_confidence = detail::as_number(*it, detail::join(path, "min_confidence"));
  if (auto it = j.find("max_depth"); it != j.end() && !it->is_null())
    cfg.max_depth = detail::as_number(*it, detail::join(path, "max_depth"));
  validate(cfg);
  return cfg;
}

nlohmann::ordered_json tracker_json(const TrackerConfig& cfg) {
  nlohmann::ordered_json j;
  j["frame_distance_threshold"] = cfg.frame_distance_threshold;
  j["min_confidence"] = cfg.min_confidence;
  if (cfg.max_depth)
    j["max_depth"] = *cfg.max_depth;
  else
    j["max_depth"] = nullptr;
  return j;
}

}  // namespace

void validate(const TrackerConfig& cfg) {
  if (cfg.frame_distance_threshold < 0)
    throw SchemaError("frame_distance_threshold", "must be non-negative");
  if (!(cfg.min_confidence >= 0.0 && cfg.min_confidence <= 1.0))
    throw SchemaError("min_confidence", "must lie in [0, 1]");
  if (cfg.max_depth && !(*cfg.max_depth > 0.0)) throw SchemaError("max_depth", "must be positive");
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::unchanged: return "unchanged";
    case Decision::relocated: return "relocated";
    case Decision::removed: return "removed";
    case Decision::added: return "added";
  }
  return "unknown";
}

std::optional<std::size_t> ReportEntry::frame_distance() const {
  if (!pre_best || !post_best) return std::nullopt;
  const auto a = pre_best->frame_index;
  const auto b = post_best->frame_index;
  return a > b ? a - b : b - a;
}

std::size_t RelocationReport::count(Decision d) const {
  return static_cast<std::size_t>(
      std::ranges::count(entries, d, &ReportEntry::decision));
}

Features normalize_features(const Detection& d, double max_depth) {
  constexpr double kHalfDiagonal = 0.70710678118654752440;  // sqrt(2) / 2
  Features f;
  f.depth = clamp01(d.depth / max_depth);
  f.width = clamp01(d.bbox.w);
  f.height = clamp01(d.bbox.h);
  f.centrality = clamp01(std::hypot(d.bbox.cx - 0.5, d.bbox.cy - 0.5) / kHalfDiagonal);
  f.confidence = clamp01(d.confidence);
  return f;
}

Features normalize_features(const Detection& d, const TrackerConfig& cfg) {
  return normalize_features(d, cfg.max_depth.value_or(CameraModel{}.max_depth));
}

double visibility_score(const Features& f) {
  return 2.0 * (1.0 - f.depth) + 10.0 * f.width * f.height + (1.0 - f.centrality) + f.confidence;
}

ScoredDetection score_detection(const Detection& d, double max_depth) {
  ScoredDetection s{d, normalize_features(d, max_depth), 0.0};
  s.score = visibility_score(s.features);
  return s;
}

std::optional<BestFrame> best_associated_frame(const FrameLog& log, const std::string& object_key,
                                               const TrackerConfig& cfg) {
  auto tracks = best_frames(log, cfg, &object_key);
  auto it = tracks.find(object_key);
  if (it == tracks.end()) return std::nullopt;
  return it->second.best;
}

RelocationReport compare_scenes(const FrameLog& pre, const FrameLog& post, const TrackerConfig& cfg) {
  validate(cfg);
  if (pre.route_hash != post.route_hash)
    throw ProtocolError(fmt::format("route hash mismatch: pre '{}' vs post '{}'", pre.route_hash,
                                    post.route_hash));
  if (pre.camera != post.camera) throw ProtocolError("camera models differ between logs");

  const auto pre_tracks = best_frames(pre, cfg);
  const auto post_tracks = best_frames(post, cfg);

  RelocationReport report;
  report.config = cfg;
  report.scene_id_pre = pre.scene_id;
  report.scene_id_post = post.scene_id;
  report.route_hash = pre.route_hash;

  std::map<std::string, ReportEntry> merged;
  auto absorb = [&](const std::map<std::string, ObjectTrack>& tracks, bool is_pre) {
    for (const auto& [key, t] : tracks) {
      if (!t.best) continue;
      ReportEntry& e = merged[key];
      e.object_key = key;
      if (e.class_label.empty()) e.class_label = t.class_label;
      (is_pre ? e.pre_best : e.post_best) = t.best;
    }
  };
  absorb(pre_tracks, true);
  absorb(post_tracks, false);

  for (auto& [key, e] : merged) {
    for (const auto* tracks : {&pre_tracks, &post_tracks}) {
      auto it = tracks->find(key);
      if (it != tracks->end() && it->second.ambiguous) e.ambiguous_multiplicity = true;
    }
    if (e.pre_best && e.post_best) {
      const auto distance = *e.frame_distance();
      e.decision = distance > static_cast<std::size_t>(cfg.frame_distance_threshold)
                       ? Decision::relocated
                       : Decision::unchanged;
    } else {
      e.decision = e.pre_best ? Decision::removed : Decision::added;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

TrackerConfig parse_tracker_config(const std::string& text) {
  const json root = detail::parse_document(text, "tracker file");
  detail::check_format_version(root, kFormatVersion);
  return tracker_from_json(root, "");
}

std::string serialize_tracker_config(const TrackerConfig& cfg) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j.update(tracker_json(cfg));
  return j.dump(2) + "\n";
}

std::string serialize_report(const RelocationReport& report) {
  nlohmann::ordered_json root;
  root["format_version"] = kFormatVersion;
  root["config"] = tracker_json(report.config);
  root["scene_id_pre"] = report.scene_id_pre;
  root["scene_id_post"] = report.scene_id_post;
  root["route_hash"] = report.route_hash;
  root["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json j;
    j["object_key"] = e.object_key;
    j["class_label"] = e.class_label;
    j["pre_best"] = best_json(e.pre_best);
    j["post_best"] = best_json(e.post_best);
    if (auto d = e.frame_distance())
      j["frame_distance"] = *d;
    else
      j["frame_distance"] = nullptr;
    j["decision"] = to_string(e.decision);
    j["ambiguous_multiplicity"] = e.ambiguous_multiplicity;
    root["entries"].push_back(std::move(j));
  }
  nlohmann::ordered_json summary;
  summary["objects"] = report.entries.size();
  for (Decision d : {Decision::unchanged, Decision::relocated, Decision::removed, Decision::added})
    summary[to_string(d)] = report.count(d);
  root["summary"] = std::move(summary);
  return root.dump(2) + "\n";
}

RelocationReport parse_report(const std::string& text) {
  const json root = detail::parse_document(text, "report file");
  if (!root.is_object()) throw SchemaError("", "report file must be a JSON object");
  detail::check_format_version(root, kFormatVersion);
  RelocationReport r;
  r.config = tracker_from_json(detail::require(root, "config", ""), "config");
  r.scene_id_pre = detail::as_string(detail::require(root, "scene_id_pre", ""), "scene_id_pre");
  r.scene_id_post = detail::as_string(detail::require(root, "scene_id_post", ""), "scene_id_post");
  r.route_hash = detail::as_string(detail::require(root, "route_hash", ""), "route_hash");
  const json& entries = detail::as_array(detail::require(root, "entries", ""), "entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = detail::index("entries", i);
    const json& j = entries[i];
    ReportEntry e;
    e.object_key = detail::as_string(detail::require(j, "object_key", path), path + ".object_key");
    e.class_label = detail::as_string(detail::require(j, "class_label", path), path + ".class_label");
    e.pre_best = best_from_json(detail::require(j, "pre_best", path), e.object_key, path + ".pre_best");
    e.post_best =
        best_from_json(detail::require(j, "post_best", path), e.object_key, path + ".post_best");
    const auto decision =
        parse_decision(detail::as_string(detail::require(j, "decision", path), path + ".decision"));
    if (!decision) throw SchemaError(path + ".decision", "unknown decision");
    e.decision = *decision;
    if (auto it = j.find("ambiguous_multiplicity"); it != j.end()) {
      if (!it->is_boolean()) throw SchemaError(path + ".ambiguous_multiplicity", "expected a boolean");
      e.ambiguous_multiplicity = it->get<bool>();
    }
    r.entries.push_back(std::move(e));
  }
  return r;
}

void save_report(const RelocationReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_report(report));
}

RelocationReport load_report(const std::filesystem::path& path) {
  try {
    return parse_report(read_text_file(path));
  } catch (const SchemaError& e) {
    throw e.in_file(path.string());
  }
}

std::string render_report_table(const RelocationReport& report) {
  std::size_t width = std::string("object").size();
  for (const auto& e : report.entries) width = std::max(width, e.object_key.size());
  auto frame = [](const std::optional<BestFrame>& b) {
    return b ? std::to_string(b->frame_index) : std::string("-");
  };
  std::string out = fmt::format("{:<{}}  {:>9}  {:>10}  {:>8}  {}\n", "object", width, "pre frame",
                                "post frame", "distance", "decision");
  for (const auto& e : report.entries) {
    const auto d = e.frame_distance();
    out += fmt::format("{:<{}}  {:>9}  {:>10}  {:>8}  {}{}\n", e.object_key, width,
                       frame(e.pre_best), frame(e.post_best), d ? std::to_string(*d) : "-",
                       to_string(e.decision), e.ambiguous_multiplicity ? " (ambiguous)" : "");
  }
  out += fmt::format("{} objects: {} unchanged, {} relocated, {} removed, {} added\n",
                     report.entries.size(), report.count(Decision::unchanged),
                     report.count(Decision::relocated), report.count(Decision::removed),
                     report.count(Decision::added));
  return out;
}

}  // namespace reloc
