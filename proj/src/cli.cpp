#include "reloc/cli.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "reloc/error.hpp"
#include "reloc/eval.hpp"
#include "reloc/io.hpp"
#include "reloc/scene_io.hpp"
#include "reloc/track.hpp"

namespace reloc::cli {

namespace {

std::set<std::string> split_classes(const std::string& csv) {
  std::set<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

std::set<std::string> surface_classes(const Scene& scene) {
  std::set<std::string> out;
  for (const auto& o : scene.objects())
    if (o.surface_id) out.insert(o.class_label);
  return out;
}

struct SceneGenArgs {
  std::string scene;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string changeset;
  std::string movable;
};

void cmd_scene_gen(const SceneGenArgs& a) {
  const Scene base = load_scene(a.scene);
  Scene derived = [&] {
    if (!a.changeset.empty()) return apply_changes(base, load_changeset(a.changeset));
    const auto classes = a.movable.empty() ? surface_classes(base) : split_classes(a.movable);
    if (classes.empty()) return base;
    return randomize_placements(base, a.seed.value_or(0), classes);
  }();
  save_scene(derived, a.out);
}

struct CaptureArgs {
  std::string scene;
  std::string route;
  std::string camera;
  std::string detector;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void cmd_capture(const CaptureArgs& a) {
  const Scene scene = load_scene(a.scene);
  const Route route = load_route(a.route);
  const CameraModel camera = a.camera.empty() ? CameraModel{} : parse_camera(read_text_file(a.camera));
  DetectorConfig detector =
      a.detector.empty() ? DetectorConfig{} : parse_detector(read_text_file(a.detector));
  if (a.seed) detector.seed = *a.seed;
  save_frame_log(capture_scene(scene, route, camera, detector), a.out);
}

struct TrackArgs {
  std::string pre;
  std::string post;
  std::string tracker;
  std::string out;
  std::string format{"json"};
};

void cmd_track(const TrackArgs& a, std::ostream& out) {
  const FrameLog pre = load_frame_log(a.pre);
  const FrameLog post = load_frame_log(a.post);
  const TrackerConfig cfg =
      a.tracker.empty() ? TrackerConfig{} : parse_tracker_config(read_text_file(a.tracker));
  const RelocationReport report = compare_scenes(pre, post, cfg);
  if (!a.out.empty()) save_report(report, a.out);
  if (a.format == "table")
    out << render_report_table(report);
  else if (a.out.empty())
    out << serialize_report(report);
}

struct EvalArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string artifacts;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  std::optional<std::filesystem::path> artifacts;
  if (!a.artifacts.empty()) artifacts = a.artifacts;
  const ExperimentResult result = run_experiment(cfg, artifacts);
  if (!a.out.empty()) write_file_atomic(a.out, serialize_experiment_result(result));
  out << render_summary_table(result);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene relocation tracking: simulate, capture, track, evaluate", "reloctrack"};
  app.set_version_flag("--version",
                       fmt::format("reloctrack {} (format_version {})", kVersion, kFormatVersion));
  app.require_subcommand(1);

  SceneGenArgs gen;
  auto* sub_gen = app.add_subcommand("scene-gen", "Derive a post-change scene");
  sub_gen->add_option("--scene", gen.scene, "Base scene file")->required();
  sub_gen->add_option("--seed", gen.seed, "Randomization seed");
  sub_gen->add_option("--out", gen.out, "Derived scene file")->required();
  sub_gen->add_option("--changeset", gen.changeset, "Apply this changeset instead of randomizing");
  sub_gen->add_option("--movable", gen.movable,
                      "Comma-separated movable classes (default: classes resting on surfaces)");

  CaptureArgs cap;
  auto* sub_cap = app.add_subcommand("capture", "Run the route and record detections");
  sub_cap->add_option("--scene", cap.scene, "Scene file")->required();
  sub_cap->add_option("--route", cap.route, "Route file")->required();
  sub_cap->add_option("--camera", cap.camera, "Camera model file");
  sub_cap->add_option("--detector", cap.detector, "Detector config file");
  sub_cap->add_option("--seed", cap.seed, "Overrides the detector seed");
  sub_cap->add_option("--out", cap.out, "Frame log (JSON Lines)")->required();

  TrackArgs trk;
  auto* sub_trk = app.add_subcommand("track", "Compare pre- and post-change frame logs");
  sub_trk->add_option("--pre", trk.pre, "Pre-change frame log")->required();
  sub_trk->add_option("--post", trk.post, "Post-change frame log")->required();
  sub_trk->add_option("--tracker", trk.tracker, "Tracker config file");
  sub_trk->add_option("--out", trk.out, "Report file (JSON)");
  sub_trk->add_option("--format", trk.format, "stdout format")
      ->check(CLI::IsMember({"json", "table"}));

  EvalArgs ev;
  auto* sub_ev = app.add_subcommand("eval", "Run the randomized-scene experiment");
  sub_ev->add_option("--config", ev.config, "Experiment config file")->required();
  sub_ev->add_option("--seed", ev.seed, "Overrides the experiment seed");
  sub_ev->add_option("--out", ev.out, "Experiment result file (JSON)");
  sub_ev->add_option("--artifacts", ev.artifacts, "Directory for per-scene logs and reports");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  try {
    if (*sub_gen) cmd_scene_gen(gen);
    else if (*sub_cap) cmd_capture(cap);
    else if (*sub_trk) cmd_track(trk, out);
    else if (*sub_ev) cmd_eval(ev, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace reloc::cli
