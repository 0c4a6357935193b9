#include <doctest.h>

#include "reloc/error.hpp"
#include "reloc/track.hpp"

using namespace reloc;

namespace {

Detection det(std::size_t frame, const std::string& key, double conf, BBox box = {0.5, 0.5, 0.2, 0.2},
              double depth = 2.0) {
  return {frame, key, key, box, depth, conf};
}

FrameLog log_of(std::vector<Detection> dets, std::size_t frames) {
  FrameLog log;
  log.scene_id = "s";
  log.route_hash = "h";
  for (std::size_t f = 0; f < frames; ++f) log.frames[f];
  for (auto& d : dets) log.frames[d.frame_index].push_back(d);
  return log;
}

// Detection scoring `score` on a 10 m depth range: W = H = 0.1, F = 0.1, with
// depth and then centrality absorbing the rest. Needs a lowered confidence
// filter.
Detection scored(std::size_t frame, const std::string& key, double score) {
  double d = 1.0, c = 0.0;
  if (score <= 1.2)
    c = 1.2 - score;
  else
    d = 1.0 - (score - 1.2) / 2.0;
  return det(frame, key, 0.1, {0.5 + c / 2, 0.5 + c / 2, 0.1, 0.1}, 10.0 * d);
}

}  // namespace

TEST_CASE("feature normalization") {
  CHECK(normalize_features(det(0, "a", 0.9, {0.5, 0.5, 0.2, 0.2}), 5.0).centrality == 0.0);
  CHECK(normalize_features(det(0, "a", 0.9, {1.0, 1.0, 0.0, 0.0}), 5.0).centrality == doctest::Approx(1.0));
  CHECK(normalize_features(det(0, "a", 0.9, {0.5, 0.5, 0.2, 0.2}, 2.5), 5.0).depth == 0.5);
  CHECK(normalize_features(det(0, "a", 0.9, {0.5, 0.5, 0.2, 0.2}, 25.0), 5.0).depth == 1.0);
  Features f = normalize_features(det(0, "a", 0.7, {0.5, 0.5, 0.2, 0.3}), 10.0);
  CHECK(f.width == 0.2);
  CHECK(f.height == 0.3);
  CHECK(f.confidence == 0.7);
}

TEST_CASE("visibility score worked examples") {
  CHECK(visibility_score({1, 0, 0, 1, 0}) == 0.0);
  CHECK(visibility_score({0, 1, 1, 0, 1}) == 14.0);
  CHECK(visibility_score({0.5, 0.2, 0.3, 0.4, 0.9}) == doctest::Approx(3.1).epsilon(1e-12));
}

TEST_CASE("best frame") {
  TrackerConfig cfg;
  SUBCASE("single surviving frame") {
    auto log = log_of({det(2, "a", 0.95), det(4, "a", 0.5)}, 6);
    auto b = best_associated_frame(log, "a", cfg);
    REQUIRE(b);
    CHECK(b->frame_index == 2);
    CHECK(b->runner_up_gap == b->score);
  }
  SUBCASE("ties go to the earliest frame") {
    cfg.min_confidence = 0.05;
    auto log = log_of({scored(0, "a", 1.0), scored(1, "a", 3.2), scored(2, "a", 3.2), scored(3, "a", 2.0),
                       scored(4, "a", 0.5)},
                      5);
    auto b = best_associated_frame(log, "a", cfg);
    REQUIRE(b);
    CHECK(b->frame_index == 1);
    CHECK(b->score == doctest::Approx(3.2));
    CHECK(b->runner_up_gap == 0.0);
    CHECK(scored(0, "a", 0.5).bbox.cx == doctest::Approx(0.85));
    CHECK(visibility_score(normalize_features(scored(0, "a", 0.5), 10.0)) == doctest::Approx(0.5));
    CHECK(visibility_score(normalize_features(scored(0, "a", 2.0), 10.0)) == doctest::Approx(2.0));
  }
  SUBCASE("confidence exactly at the filter is dropped") {
    auto log = log_of({det(0, "a", 0.80), det(1, "a", 0.80)}, 2);
    CHECK_FALSE(best_associated_frame(log, "a", cfg));
    log = log_of({det(0, "a", 0.80), det(1, "a", 0.800001)}, 2);
    CHECK(best_associated_frame(log, "a", cfg)->frame_index == 1);
  }
  SUBCASE("unknown key") { CHECK_FALSE(best_associated_frame(log_of({}, 3), "a", cfg)); }
}

TEST_CASE("relocation decisions") {
  TrackerConfig cfg;
  auto decide = [&](std::size_t pre_frame, std::size_t post_frame) {
    auto pre = log_of({det(pre_frame, "a", 0.9)}, 30);
    auto post = log_of({det(post_frame, "a", 0.9)}, 30);
    auto r = compare_scenes(pre, post, cfg);
    REQUIRE(r.entries.size() == 1);
    return r.entries[0];
  };
  CHECK(decide(12, 12).decision == Decision::unchanged);
  CHECK(decide(3, 20).decision == Decision::relocated);
  CHECK(*decide(3, 20).frame_distance() == 17);
  CHECK(decide(3, 12).decision == Decision::unchanged);
  CHECK(decide(3, 13).decision == Decision::relocated);
  CHECK(decide(20, 10).decision == Decision::relocated);
  CHECK(decide(20, 11).decision == Decision::unchanged);
}

TEST_CASE("removed, added and filtered objects") {
  TrackerConfig cfg;
  auto pre = log_of({det(1, "gone", 0.9), det(1, "stay", 0.9), det(2, "weak", 0.8)}, 5);
  auto post = log_of({det(1, "stay", 0.9), det(3, "new", 0.9), det(2, "weak", 0.7)}, 5);
  auto r = compare_scenes(pre, post, cfg);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].object_key == "gone");
  CHECK(r.entries[0].decision == Decision::removed);
  CHECK(r.entries[1].object_key == "new");
  CHECK(r.entries[1].decision == Decision::added);
  CHECK(r.entries[2].object_key == "stay");
  CHECK(r.entries[2].decision == Decision::unchanged);
  CHECK(r.count(Decision::removed) == 1);
  CHECK(r.scene_id_pre == "s");
  CHECK(r.route_hash == "h");
}

TEST_CASE("class-keyed logs flag repeated keys") {
  auto pre = log_of({det(1, "mug", 0.9, {0.3, 0.5, 0.1, 0.1}), det(1, "mug", 0.9, {0.5, 0.5, 0.1, 0.1})}, 3);
  auto r = compare_scenes(pre, pre, TrackerConfig{});
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].ambiguous_multiplicity);
  CHECK(r.entries[0].pre_best->score ==
        doctest::Approx(visibility_score(normalize_features(det(1, "mug", 0.9, {0.5, 0.5, 0.1, 0.1}), 10.0))));
}

TEST_CASE("logs from different routes or cameras are not comparable") {
  auto pre = log_of({det(1, "a", 0.9)}, 3);
  auto post = pre;
  post.route_hash = "other";
  CHECK_THROWS_AS(compare_scenes(pre, post, TrackerConfig{}), ProtocolError);
  post = pre;
  post.camera.horizontal_fov = 60;
  CHECK_THROWS_AS(compare_scenes(pre, post, TrackerConfig{}), ProtocolError);
}

TEST_CASE("tracker max_depth falls back to the log camera") {
  auto log = log_of({det(0, "a", 0.9, {0.5, 0.5, 0.2, 0.2}, 5.0)}, 1);
  log.camera.max_depth = 20.0;
  TrackerConfig cfg;
  CHECK(normalize_features(log.frames[0][0], cfg).depth == 0.5);  // default camera range 10
  auto b = best_associated_frame(log, "a", cfg);
  CHECK(b->score == doctest::Approx(visibility_score({0.25, 0.2, 0.2, 0.0, 0.9})));
  cfg.max_depth = 5.0;
  b = best_associated_frame(log, "a", cfg);
  CHECK(b->score == doctest::Approx(visibility_score({1.0, 0.2, 0.2, 0.0, 0.9})));
}

TEST_CASE("report files") {
  auto pre = log_of({det(1, "gone", 0.9), det(1, "stay", 0.9), det(2, "moved", 0.85)}, 30);
  auto post = log_of({det(1, "stay", 0.9), det(3, "new", 0.9), det(25, "moved", 0.95)}, 30);
  TrackerConfig cfg;
  cfg.max_depth = 8.0;
  auto r = compare_scenes(pre, post, cfg);
  CHECK(parse_report(serialize_report(r)) == r);
  const std::string table = render_report_table(r);
  for (const char* key : {"gone", "stay", "moved", "new", "relocated"})
    CHECK(table.find(key) != std::string::npos);
  CHECK(parse_tracker_config(serialize_tracker_config(cfg)) == cfg);
  CHECK_THROWS_AS(parse_tracker_config(R"({"format_version":1,"frame_distance_threshold":-1})"),
                  SchemaError);
}
