#include "doctest.h"

#include "handreq/error.hpp"
#include "handreq/pipeline.hpp"
#include "handreq/synthetic.hpp"
#include "test_util.hpp"

using namespace handreq;
namespace fs = std::filesystem;

namespace {

// Two short tasks written next to their suite file.
fs::path write_small_suite(const fs::path& dir) {
  std::vector<TaskConfig> tasks(2);
  tasks[0].name = "small pinch";
  tasks[0].handle_size = HandleSize::Small;
  tasks[0].radius = 0.008;
  tasks[0].grasp = GraspType::MPinch;
  tasks[0].palm = true;
  tasks[1].name = "large tripod";
  tasks[1].handle_size = HandleSize::Large;
  tasks[1].radius = 0.022;
  tasks[1].grasp = GraspType::Tripod2;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    SyntheticSpec spec;
    spec.base = Wrench::from(0.1, 0.2, 1.0, 0.0, 0.0, 0.005);
    spec.amplitude = Wrench::from(0.3, 0.1, 0.5, 0.002, 0.001, 0.004);
    spec.duration_s = 0.3;
    spec.frequency_hz = 2.0;
    spec.seed = 100 + i;
    fs::create_directories(dir / "traj");
    tasks[i].trajectory_path = dir / "traj" / (slugify(tasks[i].name) + ".csv");
    save_trajectory(synthesize(spec), tasks[i].trajectory_path);
  }
  const fs::path suite = dir / "suite.json";
  std::ofstream(suite) << format_task_suite(tasks, dir);
  return suite;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("manifest parsing resolves relative paths") {
    const auto m = parse_manifest(R"({"suite": "s.json", "grasp_library": "/abs/lib.json", "seed": 9,
                                      "solver": {"restarts": 3}, "bandwidth": {"step_Hz": 0.1}})",
                                  "/base");
    CHECK(m.suite_path == fs::path("/base/s.json"));
    CHECK(m.library_path == fs::path("/abs/lib.json"));
    CHECK(m.seed == 9);
    CHECK(m.solver.restarts == 3);
    CHECK(m.bandwidth.sweep.step_hz == 0.1);
    CHECK(m.bandwidth.sweep.stop_hz == 100.0);
    CHECK(parse_manifest(format_manifest(m)).seed == 9);
    CHECK_THROWS_AS(parse_manifest(R"({"suite": "s.json"})"), ConfigError);
    CHECK_THROWS_AS(parse_manifest(R"({"suite": "s", "grasp_library": "l", "solver": {"restarts": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_manifest("{"), ConfigError);
  }

  TEST_CASE("two runs produce identical trees") {
    const testutil::TempDir dir("pipeline");
    RunManifest m;
    m.suite_path = write_small_suite(dir.path());
    m.library_path = testutil::data_dir() / "grasp_library.json";
    m.seed = 3;
    m.output_dir = dir / "a";
    const auto first = run_suite(m);
    m.output_dir = dir / "b";
    m.jobs = 2;
    (void)run_suite(m);
    REQUIRE(first.runs.size() == 2);
    const auto a = testutil::read_tree(dir / "a");
    const auto b = testutil::read_tree(dir / "b");
    CHECK(a.size() == b.size());
    CHECK(a == b);
    CHECK(a.count("suite.csv") == 1);
    CHECK(a.count("manifest.json") == 1);
    CHECK(a.count("summary.txt") == 1);
    CHECK(a.count("tasks/small_pinch/peaks.csv") == 1);
    CHECK(a.count("tasks/small_pinch/bandwidth.csv") == 1);
    CHECK(parse_suite_csv(a.at("suite.csv")).size() == 2);
  }

  TEST_CASE("seeds derive deterministically") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  }

  TEST_CASE("the shipped everyday suite is regenerated byte for byte") {
    const testutil::TempDir dir("regen");
    (void)write_everyday_suite(dir.path(), 2024);
    (void)write_feasibility_suite(dir / "synthetic", 2024);
    CHECK(testutil::read_file(dir / "task_suite.json") == testutil::read_file(testutil::data_dir() / "task_suite.json"));
    const auto regen = testutil::read_tree(dir / "trajectories");
    const auto shipped = testutil::read_tree(testutil::data_dir() / "trajectories");
    CHECK(regen == shipped);
    CHECK(testutil::read_tree(dir / "synthetic") == testutil::read_tree(testutil::data_dir() / "synthetic"));
  }

  TEST_CASE("synthetic signals") {
    SyntheticSpec spec;
    spec.shape = SignalShape::Ramp;
    spec.base = Wrench::from(1, 0, 0, 0, 0, 0);
    spec.amplitude = Wrench::from(1, 0, 0, 0, 0, 0);
    spec.duration_s = 1.0;
    const auto t = synthesize(spec);
    CHECK(t.size() == 100);
    CHECK(t.samples.front().force.x() == 1.0);
    CHECK(t.samples.back().force.x() > t.samples.front().force.x());
    spec.shape = SignalShape::Constant;
    for (const auto& w : synthesize(spec).samples) CHECK(w.force.x() == 1.0);
    CHECK(slugify("Spread/Oil, now!") == "spread_oil_now");
    CHECK(everyday_tasks().size() == 30);
  }
}
