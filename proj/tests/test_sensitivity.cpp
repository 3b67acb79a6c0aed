#include "doctest.h"

#include "handreq/sensitivity.hpp"
#include "handreq/synthetic.hpp"
#include "test_util.hpp"

using namespace handreq;

namespace {

struct Fixture {
  GraspConfig cfg;
  WrenchTrajectory traj;

  Fixture() {
    const auto lib = load_grasp_library(testutil::data_dir() / "grasp_library.json");
    TaskConfig task;
    task.grasp = GraspType::MPinch;
    task.palm = true;
    cfg = grasp_from_config(task, lib);
    SyntheticSpec spec;
    spec.base = Wrench::from(0.2, 0.1, 1.5, 0.0, 0.0, 0.01);
    spec.amplitude = Wrench::from(0.3, 0.2, 0.5, 0.002, 0.002, 0.005);
    spec.duration_s = 0.1;
    spec.seed = 5;
    traj = synthesize(spec);
  }
};

}  // namespace

TEST_SUITE("sensitivity") {
  TEST_CASE("zero perturbation gives exactly zero") {
    const Fixture f;
    TouchpointPerturbation p;
    p.trials = 3;
    p.position_radius = 0.0;
    p.radius_delta = 0.0;
    const auto s = sensitivity_touchpoints(f.traj, f.cfg, SolverOptions{}, p);
    CHECK(s.trials == 3);
    CHECK(s.mean == 0.0);
    CHECK(s.stddev == 0.0);
    for (double d : s.deltas) CHECK(d == 0.0);
  }

  TEST_CASE("fixed seed reproduces the statistics") {
    const Fixture f;
    TouchpointPerturbation p;
    p.trials = 3;
    p.seed = 11;
    const auto a = sensitivity_touchpoints(f.traj, f.cfg, SolverOptions{}, p);
    const auto b = sensitivity_touchpoints(f.traj, f.cfg, SolverOptions{}, p);
    CHECK(a.deltas == b.deltas);
    CHECK(a.mean == b.mean);
    CHECK(a.stddev == b.stddev);
    CHECK(a.deltas.size() == 3 * a.trials);
    CHECK(a.trials + a.skipped_trials == 3);
  }

  TEST_CASE("friction at the baseline changes nothing") {
    const Fixture f;
    const std::vector<double> mu{0.6};
    const auto s = sensitivity_friction(f.traj, f.cfg, SolverOptions{}, mu, 0.6);
    CHECK(s.mean == 0.0);
    CHECK(s.stddev == 0.0);
    const std::vector<double> both{0.5, 0.7};
    const auto t = sensitivity_friction(f.traj, f.cfg, SolverOptions{}, both, 0.6);
    CHECK(t.trials == 2);
    CHECK(t.deltas.size() == 6);
    CHECK(t.mean < 0.1);
  }

  TEST_CASE("statistics are population moments") {
    SensitivityStats s;
    s.deltas = {1.0, 2.0, 3.0, 4.0};
    fill_statistics(s);
    CHECK(s.mean == 2.5);
    CHECK(s.stddev == doctest::Approx(std::sqrt(1.25)));
  }
}
