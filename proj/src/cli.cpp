#include "handreq/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "handreq/actuator.hpp"
#include "handreq/actuator_io.hpp"
#include "handreq/bandwidth.hpp"
#include "handreq/error.hpp"
#include "handreq/pipeline.hpp"
#include "handreq/report.hpp"
#include "handreq/sensitivity.hpp"
#include "handreq/synthetic.hpp"

#ifndef HANDREQ_DATA_DIR
#define HANDREQ_DATA_DIR "data"
#endif

namespace handreq {
namespace {

namespace fs = std::filesystem;

fs::path env_path(const char* var, const fs::path& fallback) {
  const char* v = std::getenv(var);
  return v && *v ? fs::path(v) : fallback;
}

fs::path data_dir() { return env_path("HANDREQ_DATA_DIR", HANDREQ_DATA_DIR); }
fs::path default_output() { return env_path("HANDREQ_OUTPUT_DIR", "handreq-out"); }

struct SolverFlags {
  std::uint64_t seed = 0;
  int restarts = 5;
  int max_iterations = 500;
  bool cold = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Random seed for solver restarts")->capture_default_str();
    cmd->add_option("--restarts", restarts, "Starts per timestep")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--max-iterations", max_iterations, "Iterations per start")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--cold", cold, "Disable warm starts between timesteps");
  }
  SolverOptions options() const {
    SolverOptions o;
    o.seed = seed;
    o.restarts = restarts;
    o.max_iterations = max_iterations;
    o.warm_start = !cold;
    return o;
  }
};

struct SweepFlags {
  BandwidthOptions opt;
  void attach(CLI::App* cmd) {
    cmd->add_option("--start", opt.sweep.start_hz, "Sweep start (Hz)")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--stop", opt.sweep.stop_hz, "Sweep stop (Hz)")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--step", opt.sweep.step_hz, "Sweep step (Hz)")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--pass-fraction", opt.pass_fraction, "Required fraction of samples in band")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--band-fraction", opt.band_fraction, "Band as a fraction of max |reference|")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
};

HandleSize handle_from_flag(const std::string& s, double& radius) {
  try {
    std::size_t used = 0;
    radius = std::stod(s, &used);
    if (used == s.size()) {
      if (!(radius > 0.0)) throw ConfigError("handle radius must be positive");
      return HandleSize::Custom;
    }
  } catch (const std::invalid_argument&) {
  }
  const auto size = parse_handle_size(s);
  radius = handle_radius(size);
  return size;
}

void print_peaks(std::ostream& out, const TaskRun& run) {
  out << fmt::format("task '{}': {} timesteps, {} infeasible\n", run.task.name, run.result.timesteps,
                     run.result.infeasible_steps);
  for (auto j : kJoints) {
    const auto& o = run.result.joints[static_cast<std::size_t>(j)];
    out << fmt::format("  {:<6} peak {:.6f} N m", to_string(j), o.peak_torque);
    if (!run.bandwidths.empty())
      out << (o.bandwidth_passed ? fmt::format("  bandwidth {:.1f} Hz", o.bandwidth_hz) : std::string("  bandwidth none"));
    out << "\n";
  }
}

std::string stats_row(std::string_view task, std::string_view mode, const SensitivityStats& s) {
  return fmt::format("\"{}\",{},{},{},{},{},{}\n", task, mode, s.trials, format_number(s.mean), format_number(s.stddev),
                     s.resamples, s.skipped_trials);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robotic finger requirements toolkit: grasp force optimization, bandwidth and actuator sizing"};
  app.require_subcommand(1);
  app.name("handreq");

  // optimize-task
  auto* opt = app.add_subcommand("optimize-task", "Optimize joint torques for one task trajectory");
  std::string o_traj, o_suite, o_task, o_grasp = "M-Pinch", o_size = "medium";
  fs::path o_library, o_output;
  bool o_palm = false, o_bandwidth = false;
  double o_mu = 0.6;
  SolverFlags o_solver;
  SweepFlags o_sweep;
  opt->add_option("--trajectory", o_traj, "Wrench CSV (t,Fx,Fy,Fz,Tx,Ty,Tz)");
  opt->add_option("--suite", o_suite, "Task suite JSON; use with --task");
  opt->add_option("--task", o_task, "Task name within --suite");
  opt->add_option("--grasp", o_grasp, "Grasp name")->capture_default_str();
  opt->add_option("--handle-size", o_size, "small, medium, large or a radius in m")->capture_default_str();
  opt->add_flag("--palm", o_palm, "Add the palm contact");
  opt->add_option("--mu", o_mu, "Friction coefficient")->check(CLI::Range(1e-9, 2.5))->capture_default_str();
  opt->add_option("--library", o_library, "Grasp library JSON");
  opt->add_option("--output", o_output, "Output directory (default $HANDREQ_OUTPUT_DIR or ./handreq-out)");
  opt->add_flag("--bandwidth", o_bandwidth, "Also compute minimum bandwidths");
  o_solver.attach(opt);
  o_sweep.attach(opt);

  // bandwidth
  auto* bw = app.add_subcommand("bandwidth", "Minimum first-order bandwidth for a torque trajectory");
  fs::path b_traj, b_curve, b_output;
  SweepFlags b_sweep;
  bw->add_option("--trajectory", b_traj, "Torque CSV (t,torque)")->required();
  bw->add_option("--curve", b_curve, "Write per-grid-point pass fractions to this CSV");
  bw->add_option("--output", b_output, "Write the result CSV here instead of standard output");
  b_sweep.attach(bw);

  // size-motor
  auto* sm = app.add_subcommand("size-motor", "Peak motor torque from air-gap shear stress");
  fs::path s_motor;
  sm->add_option("--motor", s_motor, "Motor spec JSON")->required();

  // gear-strength
  auto* gs = app.add_subcommand("gear-strength", "Lewis bending strength of a gear");
  fs::path g_gear;
  gs->add_option("--gear", g_gear, "Gear spec JSON")->required();

  // sea-range
  auto* sr = app.add_subcommand("sea-range", "Series-elastic stiffness window, collision torque, natural frequency");
  fs::path r_motor, r_sea;
  std::optional<double> r_strength, r_bandwidth_hz, r_stiffness;
  sr->add_option("--motor", r_motor, "Motor spec JSON")->required();
  sr->add_option("--sea", r_sea, "SEA spec JSON (strength, bandwidth, optional stiffness)");
  sr->add_option("--strength", r_strength, "Transmission strength (N m)")->check(CLI::PositiveNumber);
  sr->add_option("--bandwidth-hz", r_bandwidth_hz, "Bandwidth target (Hz)")->check(CLI::PositiveNumber);
  sr->add_option("--stiffness", r_stiffness, "Candidate stiffness (N m/rad)")->check(CLI::PositiveNumber);

  // sensitivity
  auto* sn = app.add_subcommand("sensitivity", "Peak-torque sensitivity to contact placement and friction");
  fs::path n_suite, n_library, n_output;
  std::vector<std::string> n_tasks;
  std::string n_mode = "both";
  TouchpointPerturbation n_pert;
  std::vector<double> n_mu = {0.5, 0.7};
  double n_baseline = 0.6;
  SolverFlags n_solver;
  sn->add_option("--suite", n_suite, "Task suite JSON")->required();
  sn->add_option("--task", n_tasks, "Restrict to these task names (repeatable)");
  sn->add_option("--library", n_library, "Grasp library JSON");
  sn->add_option("--mode", n_mode, "touchpoints, friction or both")
      ->check(CLI::IsMember({"touchpoints", "friction", "both"}))
      ->capture_default_str();
  sn->add_option("--trials", n_pert.trials, "Touch-point trials per task")->check(CLI::PositiveNumber)->capture_default_str();
  sn->add_option("--pos-radius", n_pert.position_radius, "Contact displacement radius (m)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sn->add_option("--radius-delta", n_pert.radius_delta, "Handle radius change (m)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sn->add_option("--mu-values", n_mu, "Friction coefficients to compare")->delimiter(',')->check(CLI::PositiveNumber);
  sn->add_option("--baseline-mu", n_baseline, "Reference friction coefficient")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sn->add_option("--output", n_output, "Write statistics CSV here as well");
  n_solver.attach(sn);

  // report
  auto* rp = app.add_subcommand("report", "Suite summary and desired-versus-achieved comparison");
  fs::path p_results, p_profile, p_achieved, p_output;
  bool p_derive = false;
  rp->add_option("--results", p_results, "Run output directory containing suite.csv")->required();
  rp->add_option("--profile", p_profile, "Requirements profile JSON (default: shipped everyday profile)");
  rp->add_option("--achieved", p_achieved, "Achieved measurements JSON")->required();
  rp->add_flag("--derive", p_derive, "Replace torque and bandwidth targets with the suite maxima");
  rp->add_option("--output", p_output, "Also write report.csv and summary.txt here");

  // run
  auto* rn = app.add_subcommand("run", "Batch run of a task suite");
  fs::path u_manifest, u_suite, u_library, u_output;
  int u_jobs = 1;
  std::optional<std::uint64_t> u_seed;
  rn->add_option("--manifest", u_manifest, "Run manifest JSON");
  rn->add_option("--suite", u_suite, "Task suite JSON (without --manifest)");
  rn->add_option("--library", u_library, "Grasp library JSON");
  rn->add_option("--output", u_output, "Output directory");
  rn->add_option("--seed", u_seed, "Manifest seed override");
  rn->add_option("--jobs", u_jobs, "Tasks solved concurrently")->check(CLI::PositiveNumber)->capture_default_str();

  // synthesize
  auto* sy = app.add_subcommand("synthesize", "Generate the synthetic task suites");
  fs::path y_output;
  std::uint64_t y_seed = 0;
  std::string y_kind = "both";
  double y_duration = 3.0;
  sy->add_option("--output", y_output, "Directory for suite files and trajectories")->required();
  sy->add_option("--seed", y_seed, "Generator seed")->capture_default_str();
  sy->add_option("--kind", y_kind, "everyday, feasibility or both")
      ->check(CLI::IsMember({"everyday", "feasibility", "both"}))
      ->capture_default_str();
  sy->add_option("--duration", y_duration, "Everyday trajectory duration (s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> argv_store = {"handreq"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (opt->parsed()) {
      TaskConfig task;
      WrenchTrajectory traj;
      if (!o_suite.empty()) {
        if (o_task.empty()) throw ConfigError("--suite requires --task");
        const auto suite = load_task_suite(o_suite);
        const auto it = std::find_if(suite.tasks.begin(), suite.tasks.end(), [&](auto& t) { return t.name == o_task; });
        if (it == suite.tasks.end()) throw ConfigError(fmt::format("task '{}' not in '{}'", o_task, o_suite));
        task = *it;
        traj = load_trajectory(task.trajectory_path);
      } else {
        if (o_traj.empty()) throw ConfigError("either --trajectory or --suite/--task is required");
        task.name = fs::path(o_traj).stem().string();
        task.grasp = parse_grasp_type(o_grasp);
        task.handle_size = handle_from_flag(o_size, task.radius);
        task.palm = o_palm;
        task.friction_mu = o_mu;
        task.trajectory_path = o_traj;
        traj = load_trajectory(o_traj);
      }
      const auto library = load_grasp_library(o_library.empty() ? data_dir() / "grasp_library.json" : o_library);
      const auto run = run_task(task, traj, library, o_solver.options(), o_bandwidth ? &o_sweep.opt : nullptr);
      const auto dir = o_output.empty() ? default_output() : o_output;
      write_task_outputs(run, traj.start_time, dir);
      print_peaks(out, run);
      if (run.requirements.infeasible_warning) {
        err << fmt::format("warning: {} of {} timesteps infeasible\n", run.result.infeasible_steps, run.result.timesteps);
        return kExitPartial;
      }
      return kExitOk;
    }

    if (bw->parsed()) {
      const auto table = read_csv(b_traj, {"t", "torque"});
      JointTorqueTrajectory tr;
      tr.sample_rate = uniform_sample_rate(table);
      tr.values = table.column("torque");
      const auto res = min_bandwidth(tr, b_sweep.opt.sweep, b_sweep.opt.pass_fraction, b_sweep.opt.band_fraction,
                                     !b_curve.empty());
      const auto line = fmt::format("bandwidth_Hz,pass_fraction,tolerance_band_Nm,passed\n{},{},{},{}\n",
                                    format_number(res.bandwidth_hz), format_number(res.pass_fraction),
                                    format_number(res.tolerance_band), res.passed ? 1 : 0);
      if (b_output.empty())
        out << line;
      else
        write_file_atomic(b_output, line);
      if (!b_curve.empty()) {
        std::string curve = "bandwidth_Hz,pass_fraction\n";
        for (const auto& [hz, frac] : res.curve) curve += fmt::format("{},{}\n", format_number(hz), format_number(frac));
        write_file_atomic(b_curve, curve);
      }
      return kExitOk;
    }

    if (sm->parsed()) {
      const auto m = load_motor_spec(s_motor);
      out << fmt::format("motor_torque_Nm,{}\n", format_number(motor_torque(m)));
      return kExitOk;
    }

    if (gs->parsed()) {
      const auto g = load_gear_spec(g_gear);
      out << fmt::format("gear_strength_Nm,{}\n", format_number(gear_strength(g)));
      return kExitOk;
    }

    if (sr->parsed()) {
      const auto m = load_motor_spec(r_motor);
      SeaSpec sea;
      if (!r_sea.empty()) sea = load_sea_spec(r_sea);
      if (r_strength) sea.strength = *r_strength;
      if (r_bandwidth_hz) sea.bandwidth_rad = hz_to_rad(*r_bandwidth_hz);
      if (r_stiffness) sea.stiffness = *r_stiffness;
      if (!(sea.strength > 0.0 && sea.bandwidth_rad > 0.0))
        throw ConfigError("sea-range needs a strength and a bandwidth (--sea or --strength/--bandwidth-hz)");
      const auto w = sea_window(m, sea.strength, sea.bandwidth_rad);
      out << fmt::format("k_min_Nm_per_rad,{}\nk_max_Nm_per_rad,{}\nwindow,{}\n", format_number(w.k_min),
                         format_number(w.k_max), w.feasible() ? "feasible" : "infeasible");
      std::string verdict = w.feasible() ? "a stiffness in [k_min, k_max] meets both limits"
                                         : "no spring satisfies both the bandwidth and the impact limit";
      if (sea.stiffness) {
        const double k = *sea.stiffness;
        const auto hit = collision_torque(m, k);
        out << fmt::format("stiffness_Nm_per_rad,{}\nnatural_frequency_rad_s,{}\ncollision_torque_Nm,{}\n"
                           "max_deflection_rad,{}\n",
                           format_number(k), format_number(natural_frequency(m, k)), format_number(hit.torque),
                           format_number(hit.deflection));
        if (w.feasible()) {
          if (k > w.k_max)
            verdict = "spring required: stiffness above k_max lets a collision exceed the strength";
          else if (k < w.k_min)
            verdict = "stiffness below k_min: bandwidth target not met";
          else
            verdict = "stiffness within the window";
        }
      }
      out << "verdict," << verdict << "\n";
      return kExitOk;
    }

    if (sn->parsed()) {
      const auto suite = load_task_suite(n_suite);
      const auto library = load_grasp_library(n_library.empty() ? data_dir() / "grasp_library.json" : n_library);
      for (const auto& name : n_tasks)
        if (std::none_of(suite.tasks.begin(), suite.tasks.end(), [&](auto& t) { return t.name == name; }))
          throw ConfigError(fmt::format("task '{}' not in '{}'", name, n_suite.string()));
      std::string csv = fmt::format("# seed={}\ntask,mode,trials,mean_Nm,std_Nm,resamples,skipped\n", n_solver.seed);
      SensitivityStats pooled_touch, pooled_mu;
      for (std::size_t i = 0; i < suite.tasks.size(); ++i) {
        const auto& task = suite.tasks[i];
        if (!n_tasks.empty() && std::find(n_tasks.begin(), n_tasks.end(), task.name) == n_tasks.end()) continue;
        const auto traj = load_trajectory(task.trajectory_path);
        const auto config = grasp_from_config(task, library);
        auto solver = n_solver.options();
        solver.seed = derive_seed(n_solver.seed, i);
        if (n_mode != "friction") {
          auto pert = n_pert;
          pert.seed = derive_seed(n_solver.seed, i + (1ull << 32));
          const auto s = sensitivity_touchpoints(traj, config, solver, pert);
          csv += stats_row(task.name, "touchpoints", s);
          pooled_touch.deltas.insert(pooled_touch.deltas.end(), s.deltas.begin(), s.deltas.end());
          pooled_touch.trials += s.trials;
          pooled_touch.resamples += s.resamples;
          pooled_touch.skipped_trials += s.skipped_trials;
        }
        if (n_mode != "touchpoints") {
          const auto s = sensitivity_friction(traj, config, solver, n_mu, n_baseline);
          csv += stats_row(task.name, "friction", s);
          pooled_mu.deltas.insert(pooled_mu.deltas.end(), s.deltas.begin(), s.deltas.end());
          pooled_mu.trials += s.trials;
        }
      }
      fill_statistics(pooled_touch);
      fill_statistics(pooled_mu);
      if (n_mode != "friction") csv += stats_row("ALL", "touchpoints", pooled_touch);
      if (n_mode != "touchpoints") csv += stats_row("ALL", "friction", pooled_mu);
      out << csv;
      if (!n_output.empty()) write_file_atomic(n_output, csv);
      return kExitOk;
    }

    if (rp->parsed()) {
      const auto suite_file = p_results / "suite.csv";
      const auto results = parse_suite_csv(read_file(suite_file), suite_file.string());
      if (results.empty()) throw ConfigError(fmt::format("'{}' lists no tasks", suite_file.string()));
      const auto summary = summarize_tasks(results);
      auto profile = load_profile(p_profile.empty() ? data_dir() / "profiles" / "everyday.json" : p_profile);
      if (p_derive) profile = derive_profile(profile, summary);
      const auto report = compare(profile, load_measurements(p_achieved));
      const auto summary_text = summary_table(summary);
      out << summary_text << "\n" << report_table(report);
      if (!p_output.empty()) {
        write_file_atomic(p_output / "report.csv", report_csv(report));
        write_file_atomic(p_output / "summary.txt", summary_text);
      }
      return kExitOk;
    }

    if (rn->parsed()) {
      RunManifest m;
      if (!u_manifest.empty()) {
        m = load_manifest(u_manifest);
      } else {
        if (u_suite.empty()) throw ConfigError("run needs --manifest or --suite");
        m.suite_path = u_suite;
      }
      if (!u_suite.empty()) m.suite_path = u_suite;
      if (!u_library.empty()) m.library_path = u_library;
      if (m.library_path.empty()) m.library_path = data_dir() / "grasp_library.json";
      if (!u_output.empty()) m.output_dir = u_output;
      if (m.output_dir.empty()) m.output_dir = default_output();
      if (u_seed) m.seed = *u_seed;
      if (rn->count("--jobs")) m.jobs = u_jobs;
      const auto summary = run_suite(m, &err);
      out << fmt::format("wrote {} tasks to {}\n", summary.runs.size(), m.output_dir.string());
      if (summary.flagged_tasks > 0) {
        err << fmt::format("warning: {} tasks over the infeasible-timestep threshold\n", summary.flagged_tasks);
        return kExitPartial;
      }
      return kExitOk;
    }

    if (sy->parsed()) {
      if (y_kind != "feasibility") {
        const auto tasks = write_everyday_suite(y_output, y_seed, "task_suite.json", y_duration);
        out << fmt::format("wrote {} everyday tasks to {}\n", tasks.size(), (y_output / "task_suite.json").string());
      }
      if (y_kind != "everyday") {
        const auto tasks = write_feasibility_suite(y_output / "synthetic", y_seed);
        out << fmt::format("wrote {} synthetic tasks to {}\n", tasks.size(),
                           (y_output / "synthetic" / "synthetic_suite.json").string());
      }
      return kExitOk;
    }
  } catch (const handreq::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace handreq
