#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reloc/percept.hpp"

namespace reloc {

inline constexpr int kDefaultFrameDistanceThreshold = 9;
inline constexpr double kDefaultMinConfidence = 0.80;
inline constexpr double kMaxVisibilityScore = 14.0;

// Normalized scoring inputs, each in [0, 1].
struct Features {
  double depth{0.0};       // D
  double width{0.0};       // W
  double height{0.0};      // H
  double centrality{0.0};  // C: distance of the box center from the image center
  double confidence{0.0};  // F

  friend bool operator==(const Features&, const Features&) = default;
};

struct TrackerConfig {
  int frame_distance_threshold{kDefaultFrameDistanceThreshold};
  double min_confidence{kDefaultMinConfidence};
  // Depth normalization range. Unset: use the frame log's camera max_depth.
  std::optional<double> max_depth;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

void validate(const TrackerConfig& cfg);

struct ScoredDetection {
  Detection detection;
  Features features;
  double score{0.0};
};

struct BestFrame {
  std::string object_key;
  std::size_t frame_index{0};
  double score{0.0};
  // Best score minus the best score in any other frame (or the score itself
  // when the object was seen in a single frame).
  double runner_up_gap{0.0};

  friend bool operator==(const BestFrame&, const BestFrame&) = default;
};

enum class Decision { unchanged, relocated, removed, added };

const char* to_string(Decision d);

struct ReportEntry {
  std::string object_key;
  std::string class_label;
  std::optional<BestFrame> pre_best;
  std::optional<BestFrame> post_best;
  Decision decision{Decision::unchanged};
  // Several detections shared this key within one frame (class-keyed logs);
  // only the best-scoring one per frame was kept.
  bool ambiguous_multiplicity{false};

  std::optional<std::size_t> frame_distance() const;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct RelocationReport {
  TrackerConfig config;
  std::string scene_id_pre;
  std::string scene_id_post;
  std::string route_hash;
  std::vector<ReportEntry> entries;  // sorted by object_key

  std::size_t count(Decision d) const;

  friend bool operator==(const RelocationReport&, const RelocationReport&) = default;
};

// D = clamp(depth / max_depth), W and H from the box, C = center offset
// scaled so a box centered on an image corner maps to 1, F = confidence.
Features normalize_features(const Detection& d, double max_depth);
Features normalize_features(const Detection& d, const TrackerConfig& cfg);

// 2(1 - D) + 10 W H + (1 - C) + F
double visibility_score(const Features& f);

ScoredDetection score_detection(const Detection& d, double max_depth);

// Highest-scoring frame among detections of `object_key` with confidence
// strictly above cfg.min_confidence. Ties go to the lowest frame index.
std::optional<BestFrame> best_associated_frame(const FrameLog& log, const std::string& object_key,
                                               const TrackerConfig& cfg);

// Requires both logs to share the route hash and camera (ProtocolError
// otherwise). One entry per object key that survives the confidence filter
// in either log.
RelocationReport compare_scenes(const FrameLog& pre, const FrameLog& post, const TrackerConfig& cfg);

// Tracker config files: JSON with `frame_distance_threshold`,
// `min_confidence` and optional `max_depth`.
TrackerConfig parse_tracker_config(const std::string& text);
std::string serialize_tracker_config(const TrackerConfig& cfg);

// Report files: JSON with the config echo, per-object entries and summary
// counts. The table renderer prints one row per object.
std::string serialize_report(const RelocationReport& report);
RelocationReport parse_report(const std::string& text);
void save_report(const RelocationReport& report, const std::filesystem::path& path);
RelocationReport load_report(const std::filesystem::path& path);
std::string render_report_table(const RelocationReport& report);

}  // namespace reloc
