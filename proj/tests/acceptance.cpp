// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "handreq/actuator.hpp"
#include "handreq/bandwidth.hpp"
#include "handreq/grasp_optim.hpp"
#include "handreq/pipeline.hpp"
#include "handreq/report.hpp"
#include "handreq/sensitivity.hpp"
#include "handreq/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace handreq;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

GraspLibrary library() { return load_grasp_library(testutil::data_dir() / "grasp_library.json"); }

GraspConfig mpinch_fixture() {
  TaskConfig task;
  task.grasp = GraspType::MPinch;
  task.palm = false;
  task.radius = 0.015;
  return grasp_from_config(task, library());
}

const std::vector<Wrench>& fixture_wrenches() {
  static const std::vector<Wrench> w{
      Wrench::from(0, 0, 4, 0, 0, 0),     Wrench::from(0, 0, 0, 0, 0, 0.06),  Wrench::from(1, 0, 2, 0, 0, 0),
      Wrench::from(0, 1, 3, 0, 0, 0),     Wrench::from(0, 0, 2, 0, 0, 0.03),  Wrench::from(-1, -0.5, 3, 0, 0, 0),
      Wrench::from(0, 0, 3, 0.02, 0, 0),
  };
  return w;
}

SolverOptions frozen_positions() {
  SolverOptions o;
  o.frozen = kFreezePositions;
  return o;
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome sea_round_trips() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    MotorSpecd m;
    m.diameter = 0.005 + 0.05 * u(rng);
    m.length = 0.005 + 0.05 * u(rng);
    m.shear_stress = 1e3 + 1e5 * u(rng);
    m.gear_ratio = 1.0 + 100.0 * u(rng);
    m.rotor_inertia = std::pow(10.0, -9.0 + 5.0 * u(rng));
    m.max_speed = 1.0 + 1000.0 * u(rng);
    const double strength = 0.01 + 10.0 * u(rng), band = 1.0 + 600.0 * u(rng);
    const auto w = sea_window(m, strength, band);
    worst = std::max({worst, relative(natural_frequency(m, w.k_min), band),
                      relative(collision_torque(m, w.k_max).torque, strength)});
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-9, "relative error " + fmt_num(worst));
  o.require(elapsed < 1.0, "runtime " + fmt_num(elapsed) + " s");
  o.detail = o.pass ? "worst relative error " + fmt_num(worst) + ", " + fmt_num(elapsed) + " s" : o.detail;
  return o;
}

Outcome closed_forms() {
  Outcome o;
  MotorSpecd m;
  m.diameter = 0.020;
  m.length = 0.010;
  m.shear_stress = MotorSpecd::bar(0.2);
  m.gear_ratio = 1.0;
  m.rotor_inertia = 1e-6;
  m.max_speed = 10.0;
  GearSpecd g;
  g.pitch_diameter = 0.015;
  g.module = 0.0005;
  g.width = 0.001;
  g.lewis_factor = 0.35;
  g.yield_strength = 415e6;
  g.safety_factor = 2.0;
  // Hand computation: 2e4 Pa * 0.01 m * (pi * 0.02 m * 0.01 m), and
  // 0.015 / 4 * 0.0005 * 0.35 * 415e6 * 0.001.
  const double motor_hand = 2e4 * 0.01 * (std::numbers::pi * 0.02 * 0.01);
  const double gear_hand = 0.015 / 4.0 * 0.0005 * 0.35 * 415e6 * 0.001;
  const double motor = motor_torque(m), gear = gear_strength(g);
  o.require(relative(motor, motor_hand) <= 1e-6, "motor " + fmt_num(motor));
  o.require(relative(gear, gear_hand) <= 1e-6, "gear " + fmt_num(gear));
  o.require(std::round(motor * 1e4) / 1e4 == 0.1257, "motor rounds to " + fmt_num(std::round(motor * 1e4) / 1e4));
  o.require(std::round(gear * 1e4) / 1e4 == 0.2723, "gear rounds to " + fmt_num(std::round(gear * 1e4) / 1e4));
  if (o.pass) o.detail = "motor " + fmt_num(motor) + " N m, gear " + fmt_num(gear) + " N m";
  return o;
}

Outcome optimizer_feasibility() {
  Outcome o;
  const auto suite = load_task_suite(testutil::data_dir() / "synthetic" / "synthetic_suite.json");
  const auto lib = library();
  std::size_t steps = 0, infeasible = 0;
  double eq = 0.0, cone = 0.0, pressure = 0.0;
  const auto t0 = Clock::now();
  for (const auto& task : suite.tasks) {
    const auto traj = load_trajectory(task.trajectory_path);
    const auto cfg = grasp_from_config(task, lib);
    std::vector<ContactSolution> sols;
    (void)solve_trajectory(traj, cfg, SolverOptions{}, &sols);
    for (std::size_t k = 0; k < sols.size(); ++k) {
      ++steps;
      if (!sols[k].feasible) {
        ++infeasible;
        continue;
      }
      const auto v = constraint_violation(traj.samples[k], cfg, sols[k].contacts);
      eq = std::max(eq, v.equilibrium);
      cone = std::max(cone, v.cone);
      pressure = std::max(pressure, v.pressure);
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(suite.tasks.size() >= 10, "only " + std::to_string(suite.tasks.size()) + " trajectories");
  o.require(steps >= 1000, "only " + std::to_string(steps) + " timesteps");
  o.require(eq <= 1e-6, "equilibrium " + fmt_num(eq));
  o.require(cone <= 1e-8, "cone " + fmt_num(cone));
  o.require(pressure <= 1e-12, "pressure " + fmt_num(pressure));
  o.require(elapsed < 60.0 * static_cast<double>(steps) / 1000.0, "runtime " + fmt_num(elapsed) + " s");
  const std::string summary = std::to_string(steps) + " steps (" + std::to_string(infeasible) +
                              " infeasible), max residuals eq " + fmt_num(eq) + " cone " + fmt_num(cone) +
                              " pressure " + fmt_num(pressure) + ", " + fmt_num(elapsed) + " s";
  o.detail = o.pass ? summary : o.detail + "; " + summary;
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto cfg = mpinch_fixture();
  double worst = 0.0;
  for (const auto& w : fixture_wrenches()) {
    const auto grid = oracle::grid_search(w, cfg, kFreezeNone, 0.05, 12.0);
    const auto sol = solve_timestep(w, cfg, frozen_positions());
    if (!sol.feasible || grid.feasible == 0) {
      o.require(false, "no feasible point for a fixture");
      continue;
    }
    const double err = relative(sol.objective_value, grid.objective);
    worst = std::max(worst, err);
    o.require(err <= 0.05, "objective " + fmt_num(sol.objective_value) + " vs grid " + fmt_num(grid.objective));
    // Axial torque equilibrium fixes the tangential sum exactly.
    double sum = 0.0;
    for (const auto& c : sol.contacts) sum += c.tangential;
    o.require(std::abs(sum - w.torque.z() / cfg.cylinder.radius) <= 1e-6, "tangential sum " + fmt_num(sum));
  }
  if (o.pass)
    o.detail = std::to_string(fixture_wrenches().size()) + " fixtures, worst gap " + fmt_num(100.0 * worst) + " %";
  return o;
}

Outcome bandwidth_analyzer() {
  Outcome o;
  JointTorqueTrajectory ref;
  ref.sample_rate = 100.0;
  ref.values.assign(20000, 0.55);
  const auto res = min_bandwidth(ref, {}, 0.98, 0.05, true);
  const double bound = oracle::dc_gain_threshold(0.05) / (2.0 * std::numbers::pi);
  double first = -1.0;
  for (const auto& [hz, frac] : res.curve)
    if (frac >= 0.98) {
      first = hz;
      break;
    }
  o.require(res.passed && res.bandwidth_hz == first, "not the first passing grid point");
  o.require(res.bandwidth_hz >= bound && res.bandwidth_hz - bound <= 0.2 + 1e-12,
            "constant signal gives " + fmt_num(res.bandwidth_hz) + " Hz vs bound " + fmt_num(bound));

  JointTorqueTrajectory zero = ref;
  zero.values.assign(500, 0.0);
  const auto z = min_bandwidth(zero);
  o.require(z.bandwidth_hz == BandwidthSweep{}.start_hz, "zero signal gives " + fmt_num(z.bandwidth_hz));

  double worst = 0.0;
  for (double b : {0.3, 2.0, 10.0, 62.8, 600.0}) {
    const std::vector<double> step(1000, 1.0);
    const auto y = simulate_first_order(step, 1000.0, b);
    for (std::size_t k = 0; k < y.size(); ++k)
      worst = std::max(worst, std::abs(y[k] - oracle::first_order_step(b, static_cast<double>(k) / 1000.0)));
  }
  o.require(worst <= 1e-9, "step response error " + fmt_num(worst));
  if (o.pass)
    o.detail = "constant " + fmt_num(res.bandwidth_hz) + " Hz (bound " + fmt_num(bound) + "), step error " +
               fmt_num(worst);
  return o;
}

Outcome sensitivity_harness() {
  Outcome o;
  const auto suite = load_task_suite(testutil::data_dir() / "synthetic" / "synthetic_suite.json");
  const auto lib = library();

  {
    const auto& task = suite.tasks.front();
    const auto traj = load_trajectory(task.trajectory_path);
    const auto cfg = grasp_from_config(task, lib);
    TouchpointPerturbation p;
    p.trials = 3;
    p.seed = 17;
    const auto a = sensitivity_touchpoints(traj, cfg, SolverOptions{}, p);
    const auto b = sensitivity_touchpoints(traj, cfg, SolverOptions{}, p);
    o.require(a.deltas == b.deltas && a.mean == b.mean && a.stddev == b.stddev, "seeded runs differ");
    p.position_radius = 0.0;
    p.radius_delta = 0.0;
    const auto zero = sensitivity_touchpoints(traj, cfg, SolverOptions{}, p);
    o.require(zero.mean == 0.0 && zero.stddev == 0.0, "zero perturbation gives " + fmt_num(zero.mean));
  }

  SensitivityStats touch, friction;
  std::size_t skipped = 0;
  const std::vector<double> mu{0.5, 0.7};
  for (std::size_t i = 0; i < suite.tasks.size(); ++i) {
    const auto& task = suite.tasks[i];
    const auto traj = load_trajectory(task.trajectory_path);
    const auto cfg = grasp_from_config(task, lib);
    SolverOptions solver;
    solver.seed = derive_seed(7, i);
    TouchpointPerturbation p;
    p.trials = 5;
    p.seed = derive_seed(8, i);
    const auto t = sensitivity_touchpoints(traj, cfg, solver, p);
    touch.deltas.insert(touch.deltas.end(), t.deltas.begin(), t.deltas.end());
    skipped += t.skipped_trials;
    const auto f = sensitivity_friction(traj, cfg, solver, mu);
    friction.deltas.insert(friction.deltas.end(), f.deltas.begin(), f.deltas.end());
  }
  fill_statistics(touch);
  fill_statistics(friction);
  o.require(touch.mean < 0.1, "touch-point mean " + fmt_num(touch.mean));
  o.require(friction.mean < 0.1, "friction mean " + fmt_num(friction.mean));
  const std::string summary = "touch-point " + fmt_num(touch.mean) + " +/- " + fmt_num(touch.stddev) +
                              " N m (" + std::to_string(skipped) + " trials skipped), friction " +
                              fmt_num(friction.mean) + " +/- " + fmt_num(friction.stddev) + " N m";
  o.detail = o.pass ? summary : o.detail + "; " + summary;
  return o;
}

Outcome table_one() {
  Outcome o;
  const auto rep = compare(load_profile(testutil::data_dir() / "profiles" / "everyday.json"),
                           load_measurements(testutil::data_dir() / "profiles" / "table1_achieved.json"));
  o.require(rep.passes() == 11 && rep.failures() == 2,
            std::to_string(rep.passes()) + " pass / " + std::to_string(rep.failures()) + " fail");
  for (const auto& m : rep.metrics) {
    const bool knuckle = m.requirement.metric == "knuckle_width" || m.requirement.metric == "knuckle_height";
    o.require(m.pass != knuckle, "unexpected outcome for " + m.requirement.metric);
  }
  if (o.pass) o.detail = "11 pass / 2 fail (knuckle width, knuckle height)";
  return o;
}

Outcome wrench_scaling() {
  Outcome o;
  const auto cfg = mpinch_fixture();
  double worst = 0.0;
  for (const auto& w : fixture_wrenches()) {
    const double base = solve_timestep(w, cfg, frozen_positions()).objective_value;
    for (double s : {0.5, 2.0}) {
      const double scaled = solve_timestep(s * w, cfg, frozen_positions()).objective_value;
      worst = std::max(worst, relative(scaled, std::pow(s, 4) * base));
    }
  }
  o.require(worst <= 0.01, "relative error " + fmt_num(worst));
  if (o.pass) o.detail = "worst relative error " + fmt_num(worst);
  return o;
}

Outcome pipeline_determinism() {
  Outcome o;
  const testutil::TempDir dir("acceptance");
  RunManifest m;
  m.suite_path = testutil::data_dir() / "task_suite.json";
  m.library_path = testutil::data_dir() / "grasp_library.json";
  m.seed = 1;
  double slowest = 0.0;
  for (const char* sub : {"a", "b"}) {
    m.output_dir = dir / sub;
    const auto t0 = Clock::now();
    (void)run_suite(m);
    slowest = std::max(slowest, seconds_since(t0));
  }
  const auto a = testutil::read_tree(dir / "a");
  const auto b = testutil::read_tree(dir / "b");
  o.require(!a.empty() && a == b, "output trees differ");
  o.require(slowest < 300.0, "run took " + fmt_num(slowest) + " s");
  if (o.pass) o.detail = std::to_string(a.size()) + " identical files, slowest run " + fmt_num(slowest) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"SEA algebra round trips", sea_round_trips},
      {"motor and Lewis closed forms", closed_forms},
      {"grasp optimizer feasibility", optimizer_feasibility},
      {"oracle equivalence", oracle_equivalence},
      {"bandwidth analyzer", bandwidth_analyzer},
      {"sensitivity harness", sensitivity_harness},
      {"table I reproduction", table_one},
      {"wrench scaling", wrench_scaling},
      {"full-pipeline determinism", pipeline_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
