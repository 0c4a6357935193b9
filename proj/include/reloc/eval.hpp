#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reloc/nav.hpp"
#include "reloc/percept.hpp"
#include "reloc/scene.hpp"
#include "reloc/track.hpp"

namespace reloc {

struct ConfusionMatrix {
  std::uint64_t tp{0};
  std::uint64_t fn{0};
  std::uint64_t fp{0};
  std::uint64_t tn{0};

  std::uint64_t total() const { return tp + fn + fp + tn; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fn += o.fn;
    fp += o.fp;
    tn += o.tn;
    return *this;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// A metric is none when its denominator is zero.
struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> accuracy;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Removed and added count as predicted relocations. Objects in `truth` that
// the tracker never reported count as predicted unchanged. Throws
// CoverageError for report keys missing from `truth`.
ConfusionMatrix score_report(const RelocationReport& report, const GroundTruth& truth);

Metrics derive_metrics(const ConfusionMatrix& cm);

// Fixed 4-decimal rendering, "undefined" for a missing metric.
std::string format_metric(const std::optional<double>& m);

struct ExperimentConfig {
  std::filesystem::path base_scene;
  int n_random_scenes{9};
  std::uint64_t seed{0};
  std::filesystem::path route;
  CameraModel camera;
  DetectorConfig detector;
  TrackerConfig tracker;
  double min_displacement{kDefaultMinDisplacement};
  // Classes eligible to move. Empty: every object resting on a surface.
  std::set<std::string> movable_classes;
  // Share of all objects relocated per randomized scene.
  double relocation_fraction{0.3};
  // Plan-view floor on how far a relocated object travels.
  double min_move_distance{1.0};
  // When set, every post-change scene is base + this changeset instead of a
  // randomization.
  std::optional<std::filesystem::path> changeset;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws SchemaError for out-of-range fields (n_random_scenes < 1, ...).
void validate(const ExperimentConfig& cfg);

// Relative paths inside the file resolve against the file's directory.
// Camera, detector and tracker may be inline objects or file paths.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct SceneResult {
  int index{0};
  std::uint64_t seed{0};
  std::size_t objects{0};
  std::size_t actual_relocations{0};
  RelocationReport report;
  ConfusionMatrix matrix;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SceneResult> scenes;
  ConfusionMatrix pooled;
  Metrics metrics;
};

struct ExperimentInputs {
  Scene base;
  Route route;
  std::optional<ChangeSet> changes;
};

// Writes pre.jsonl and, per scene i, scene_i.json, post_i.jsonl and
// report_i.json into `artifact_dir` when given.
ExperimentResult run_experiment(const ExperimentInputs& inputs, const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& artifact_dir = {});
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& artifact_dir = {});

std::string serialize_experiment_result(const ExperimentResult& result);
// Confusion matrix laid out as actual x predicted, followed by the metrics.
std::string render_summary_table(const ExperimentResult& result);
std::string render_confusion_table(const ConfusionMatrix& cm);

}  // namespace reloc
