#include "reloc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "internal/json_util.hpp"
#include "reloc/error.hpp"
#include "reloc/hash.hpp"
#include "reloc/io.hpp"
#include "reloc/scene_io.hpp"

namespace reloc {

namespace {

using detail::json;
using nlohmann::ordered_json;

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

ordered_json metric_json(const std::optional<double>& m) {
  if (!m) return nullptr;
  return round4(*m);
}

ordered_json matrix_json(const ConfusionMatrix& cm) {
  ordered_json j;
  j["tp"] = cm.tp;
  j["fn"] = cm.fn;
  j["fp"] = cm.fp;
  j["tn"] = cm.tn;
  return j;
}

// Seeds for the i-th derived scene and capture; index 0 is the base scene.
std::uint64_t scene_seed(std::uint64_t seed, int index) {
  return mix64(seed ^ mix64(0x5eed0000ULL + static_cast<std::uint64_t>(index)));
}

std::uint64_t capture_seed(std::uint64_t seed, int index) {
  return mix64(scene_seed(seed, index) ^ 0xc0ffeeULL);
}

std::set<std::string> pick_relocations(const Scene& base, const ExperimentConfig& cfg,
                                       std::uint64_t seed) {
  std::vector<std::string> candidates;
  for (const auto& o : base.objects()) {
    const bool eligible = cfg.movable_classes.empty() ? o.surface_id.has_value()
                                                      : cfg.movable_classes.contains(o.class_label);
    if (eligible) candidates.push_back(o.instance_id);
  }
  const auto wanted = static_cast<std::size_t>(
      std::llround(cfg.relocation_fraction * static_cast<double>(base.objects().size())));
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(std::min(wanted, candidates.size()));
  return {candidates.begin(), candidates.end()};
}

template <typename T, typename Parse>
T inline_or_file(const json& j, const std::string& field, const std::filesystem::path& base_dir,
                 Parse parse) {
  if (j.is_string()) {
    const std::filesystem::path p = base_dir / j.get<std::string>();
    try {
      return parse(read_text_file(p));
    } catch (const SchemaError& e) {
      throw e.in_file(p.string());
    }
  }
  if (!j.is_object()) throw SchemaError(field, "expected an object or a file path");
  try {
    return parse(j.dump());
  } catch (const SchemaError& e) {
    throw SchemaError(detail::join(field, e.path()), "invalid value");
  }
}

}  // namespace

ConfusionMatrix score_report(const RelocationReport& report, const GroundTruth& truth) {
  ConfusionMatrix cm;
  std::set<std::string> reported;
  auto tally = [&](bool predicted, bool actual) {
    if (predicted && actual) ++cm.tp;
    else if (!predicted && actual) ++cm.fn;
    else if (predicted) ++cm.fp;
    else ++cm.tn;
  };
  for (const auto& e : report.entries) {
    if (!truth.labels.contains(e.object_key))
      throw CoverageError("object '" + e.object_key + "' has no ground-truth label");
    reported.insert(e.object_key);
    tally(e.decision != Decision::unchanged, truth.relocated(e.object_key));
  }
  for (const auto& [id, kind] : truth.labels)
    if (!reported.contains(id)) tally(false, kind != ChangeKind::unchanged);
  return cm;
}

Metrics derive_metrics(const ConfusionMatrix& cm) {
  return {ratio(cm.tp, cm.tp + cm.fp), ratio(cm.tp, cm.tp + cm.fn),
          ratio(cm.tp + cm.tn, cm.total())};
}

std::string format_metric(const std::optional<double>& m) {
  return m ? fmt::format("{:.4f}", *m) : std::string("undefined");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_random_scenes < 1) throw SchemaError("n_random_scenes", "must be at least 1");
  if (!(cfg.min_displacement >= 0.0)) throw SchemaError("min_displacement", "must be non-negative");
  if (!(cfg.relocation_fraction >= 0.0 && cfg.relocation_fraction <= 1.0))
    throw SchemaError("relocation_fraction", "must lie in [0, 1]");
  if (!(cfg.min_move_distance >= 0.0)) throw SchemaError("min_move_distance", "must be non-negative");
  validate(cfg.camera);
  validate(cfg.detector);
  validate(cfg.tracker);
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir) {
  const json root = detail::parse_document(text, "experiment file");
  if (!root.is_object()) throw SchemaError("", "experiment file must be a JSON object");
  detail::check_format_version(root, kFormatVersion);

  ExperimentConfig cfg;
  cfg.base_scene = base_dir / detail::as_string(detail::require(root, "base_scene", ""), "base_scene");
  cfg.route = base_dir / detail::as_string(detail::require(root, "route", ""), "route");
  if (auto it = root.find("n_random_scenes"); it != root.end())
    cfg.n_random_scenes = static_cast<int>(detail::as_int(*it, "n_random_scenes"));
  if (auto it = root.find("seed"); it != root.end()) cfg.seed = detail::as_uint(*it, "seed");
  if (auto it = root.find("camera"); it != root.end())
    cfg.camera = inline_or_file<CameraModel>(*it, "camera", base_dir, parse_camera);
  if (auto it = root.find("detector"); it != root.end())
    cfg.detector = inline_or_file<DetectorConfig>(*it, "detector", base_dir, parse_detector);
  if (auto it = root.find("tracker"); it != root.end())
    cfg.tracker = inline_or_file<TrackerConfig>(*it, "tracker", base_dir, parse_tracker_config);
  if (auto it = root.find("min_displacement"); it != root.end())
    cfg.min_displacement = detail::as_number(*it, "min_displacement");
  if (auto it = root.find("movable_classes"); it != root.end()) {
    detail::as_array(*it, "movable_classes");
    for (std::size_t i = 0; i < it->size(); ++i)
      cfg.movable_classes.insert(detail::as_string((*it)[i], detail::index("movable_classes", i)));
  }
  if (auto it = root.find("relocation_fraction"); it != root.end())
    cfg.relocation_fraction = detail::as_number(*it, "relocation_fraction");
  if (auto it = root.find("min_move_distance"); it != root.end())
    cfg.min_move_distance = detail::as_number(*it, "min_move_distance");
  if (auto it = root.find("changeset"); it != root.end() && !it->is_null())
    cfg.changeset = base_dir / detail::as_string(*it, "changeset");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  try {
    return parse_experiment_config(read_text_file(path), path.parent_path());
  } catch (const SchemaError& e) {
    throw e.in_file(path.string());
  }
}

ExperimentResult run_experiment(const ExperimentInputs& inputs, const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& artifact_dir) {
  validate(cfg);
  if (artifact_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*artifact_dir, ec);
    if (ec) throw OutputError("cannot create '" + artifact_dir->string() + "': " + ec.message());
  }

  ExperimentResult result;
  result.config = cfg;

  DetectorConfig pre_detector = cfg.detector;
  pre_detector.seed = capture_seed(cfg.seed, 0);
  FrameLog pre_log;
  try {
    pre_log = capture_scene(inputs.base, inputs.route, cfg.camera, pre_detector);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("base scene: {}", e.what()));
  }
  if (artifact_dir) save_frame_log(pre_log, *artifact_dir / "pre.jsonl");

  for (int i = 1; i <= cfg.n_random_scenes; ++i) {
    SceneResult sr;
    sr.index = i;
    sr.seed = scene_seed(cfg.seed, i);
    try {
      const Scene post =
          inputs.changes ? apply_changes(inputs.base, *inputs.changes)
                         : relocate_objects(inputs.base, sr.seed, pick_relocations(inputs.base, cfg, sr.seed),
                                            cfg.min_move_distance);
      const GroundTruth truth = ground_truth_relocations(inputs.base, post, cfg.min_displacement);
      DetectorConfig post_detector = cfg.detector;
      post_detector.seed = capture_seed(cfg.seed, i);
      const FrameLog post_log = capture_scene(post, inputs.route, cfg.camera, post_detector);
      sr.report = compare_scenes(pre_log, post_log, cfg.tracker);
      sr.matrix = score_report(sr.report, truth);
      sr.objects = truth.labels.size();
      sr.actual_relocations = truth.changed().size();
      if (artifact_dir) {
        save_scene(post, *artifact_dir / fmt::format("scene_{}.json", i));
        save_frame_log(post_log, *artifact_dir / fmt::format("post_{}.jsonl", i));
        save_report(sr.report, *artifact_dir / fmt::format("report_{}.json", i));
      }
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("scene {}: {}", i, e.what()));
    } catch (const Error& e) {
      throw Error(fmt::format("scene {}: {}", i, e.what()));
    }
    result.pooled += sr.matrix;
    result.scenes.push_back(std::move(sr));
  }
  result.metrics = derive_metrics(result.pooled);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& artifact_dir) {
  ExperimentInputs inputs{load_scene(cfg.base_scene), load_route(cfg.route), std::nullopt};
  if (cfg.changeset) inputs.changes = load_changeset(*cfg.changeset);
  return run_experiment(inputs, cfg, artifact_dir);
}

std::string serialize_experiment_result(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  ordered_json root;
  root["format_version"] = kFormatVersion;
  ordered_json c;
  c["base_scene"] = cfg.base_scene.generic_string();
  c["route"] = cfg.route.generic_string();
  c["n_random_scenes"] = cfg.n_random_scenes;
  c["seed"] = cfg.seed;
  c["camera"] = ordered_json::parse(serialize_camera(cfg.camera));
  c["detector"] = ordered_json::parse(serialize_detector(cfg.detector));
  c["tracker"] = ordered_json::parse(serialize_tracker_config(cfg.tracker));
  for (auto* sub : {&c["camera"], &c["detector"], &c["tracker"]}) sub->erase("format_version");
  c["min_displacement"] = cfg.min_displacement;
  c["movable_classes"] = cfg.movable_classes;
  c["relocation_fraction"] = cfg.relocation_fraction;
  c["min_move_distance"] = cfg.min_move_distance;
  if (cfg.changeset)
    c["changeset"] = cfg.changeset->generic_string();
  else
    c["changeset"] = nullptr;
  root["config"] = std::move(c);

  root["scenes"] = ordered_json::array();
  for (const auto& s : result.scenes) {
    ordered_json j;
    j["index"] = s.index;
    j["seed"] = s.seed;
    j["objects"] = s.objects;
    j["actual_relocations"] = s.actual_relocations;
    j["reported_objects"] = s.report.entries.size();
    j["matrix"] = matrix_json(s.matrix);
    root["scenes"].push_back(std::move(j));
  }
  root["pooled"] = matrix_json(result.pooled);
  root["metrics"]["precision"] = metric_json(result.metrics.precision);
  root["metrics"]["recall"] = metric_json(result.metrics.recall);
  root["metrics"]["accuracy"] = metric_json(result.metrics.accuracy);
  return root.dump(2) + "\n";
}

std::string render_confusion_table(const ConfusionMatrix& cm) {
  std::string out;
  out += fmt::format("{:<22}{:>12}{:>15}\n", "", "Predicted", "Predicted");
  out += fmt::format("{:<22}{:>12}{:>15}\n", "", "Relocation", "No Relocation");
  out += fmt::format("{:<22}{:>12}{:>15}\n", "Actual Relocation", cm.tp, cm.fn);
  out += fmt::format("{:<22}{:>12}{:>15}\n", "Actual No Relocation", cm.fp, cm.tn);
  return out;
}

std::string render_summary_table(const ExperimentResult& result) {
  std::string out = fmt::format("{} scenes, {} object judgments\n\n", result.scenes.size(),
                                result.pooled.total());
  out += render_confusion_table(result.pooled);
  out += fmt::format("\nprecision {}  recall {}  accuracy {}\n",
                     format_metric(result.metrics.precision), format_metric(result.metrics.recall),
                     format_metric(result.metrics.accuracy));
  return out;
}

}  // namespace reloc
