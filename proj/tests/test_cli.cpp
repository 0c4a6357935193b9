#include <doctest.h>

#include <sstream>

#include "reloc/cli.hpp"
#include "reloc/io.hpp"
#include "reloc/percept.hpp"
#include "reloc/scene_io.hpp"
#include "reloc/track.hpp"
#include "support.hpp"

using namespace reloc;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return test::fixture(name).string(); }

}  // namespace

TEST_CASE("version and usage") {
  Run v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("reloctrack 1.0.0") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"capture", "--scene", "x"}).code == 1);
}

TEST_CASE("scene-gen") {
  test::TempDir dir("cli_gen");
  const std::string out = (dir / "post.json").string();
  Run r = run({"scene-gen", "--scene", fx("kitchen_scene.json"), "--seed", "42", "--out", out});
  CHECK(r.code == 0);
  Scene post = load_scene(out);
  CHECK(post.objects().size() == load_scene(fx("kitchen_scene.json")).objects().size());

  Run missing = run({"scene-gen", "--scene", (dir / "absent.json").string(), "--out", out});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("absent.json") != std::string::npos);

  write_file_atomic(dir / "bad.json",
                    R"({"format_version":1,"moves":[],"removals":["ghost"],"additions":[]})");
  CHECK(run({"scene-gen", "--scene", fx("kitchen_scene.json"), "--changeset", (dir / "bad.json").string(),
             "--out", out})
            .code == 1);
  CHECK(run({"scene-gen", "--scene", fx("kitchen_scene.json"), "--changeset", fx("empty_changeset.json"),
             "--out", out})
            .code == 0);
  CHECK(load_scene(out) == load_scene(fx("kitchen_scene.json")));
}

TEST_CASE("capture") {
  test::TempDir dir("cli_capture");
  const std::string log = (dir / "pre.jsonl").string();
  Run r = run({"capture", "--scene", fx("kitchen_scene.json"), "--route", fx("kitchen_route.json"), "--camera",
               fx("camera.json"), "--detector", fx("detector.json"), "--out", log});
  CHECK(r.code == 0);
  CHECK_NOTHROW(validate(load_frame_log(log)));

  write_file_atomic(dir / "route.json",
                    R"({"format_version":1,"grid_step":0.25,"start_pose":{"position":[0.375,4.875],"yaw":0,"head_pitch":0},"actions":["RotateRight","MoveBack","MoveAhead","MoveLeft","MoveLeft","MoveLeft"]})");
  Run blocked = run({"capture", "--scene", fx("kitchen_scene.json"), "--route", (dir / "route.json").string(),
                     "--out", log});
  CHECK(blocked.code == 1);
  CHECK(blocked.err.find("action 5") != std::string::npos);

  Run unwritable = run({"capture", "--scene", fx("kitchen_scene.json"), "--route", fx("kitchen_route.json"),
                        "--out", "/nonexistent/dir/log.jsonl"});
  CHECK(unwritable.code == 2);
}

TEST_CASE("track") {
  test::TempDir dir("cli_track");
  const std::string pre = (dir / "pre.jsonl").string(), post = (dir / "post.jsonl").string();
  const std::string scene2 = (dir / "scene2.json").string();
  REQUIRE(run({"capture", "--scene", fx("kitchen_scene.json"), "--route", fx("kitchen_route.json"), "--out", pre})
              .code == 0);
  REQUIRE(run({"scene-gen", "--scene", fx("kitchen_scene.json"), "--seed", "3", "--out", scene2}).code == 0);
  REQUIRE(run({"capture", "--scene", scene2, "--route", fx("kitchen_route.json"), "--seed", "5", "--out", post})
              .code == 0);

  const std::string report = (dir / "report.json").string();
  Run r = run({"track", "--pre", pre, "--post", post, "--tracker", fx("tracker.json"), "--out", report});
  CHECK(r.code == 0);
  RelocationReport rep = load_report(report);
  CHECK_FALSE(rep.entries.empty());

  Run table = run({"track", "--pre", pre, "--post", post, "--format", "table"});
  CHECK(table.code == 0);
  CHECK(table.out.find(rep.entries.front().object_key) != std::string::npos);
  CHECK(run({"track", "--pre", pre, "--post", post, "--format", "xml"}).code == 1);

  FrameLog other = load_frame_log(post);
  other.route_hash = "0000000000000000";
  save_frame_log(other, dir / "other.jsonl");
  Run mismatch = run({"track", "--pre", pre, "--post", (dir / "other.jsonl").string()});
  CHECK(mismatch.code == 1);
  CHECK(mismatch.err.find("route hash") != std::string::npos);
}

TEST_CASE("eval") {
  test::TempDir dir("cli_eval");
  write_file_atomic(dir / "zero.json", R"({"format_version":1,"base_scene":")" + fx("kitchen_scene.json") +
                                           R"(","route":")" + fx("kitchen_route.json") + R"(","n_random_scenes":0})");
  CHECK(run({"eval", "--config", (dir / "zero.json").string()}).code == 1);

  const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  Run r = run({"eval", "--config", fx("null_experiment.json"), "--out", a});
  CHECK(r.code == 0);
  for (const char* s : {"precision", "recall", "accuracy"}) CHECK(r.out.find(s) != std::string::npos);
  CHECK(run({"eval", "--config", fx("null_experiment.json"), "--out", b}).code == 0);
  CHECK(read_text_file(a) == read_text_file(b));
}
