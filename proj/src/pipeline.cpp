#include "handreq/pipeline.hpp"

#include <fmt/format.h>

#include <atomic>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <thread>

#include "handreq/error.hpp"
#include "handreq/synthetic.hpp"

namespace handreq {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.empty() || p.is_absolute() || base.empty() ? p : base / p;
}

std::string seed_comment(const TaskRun& run) { return fmt::format("task='{}' seed={}", run.task.name, run.seed); }

}  // namespace

RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("manifest is not valid JSON: {}", e.what()));
  }
  RunManifest m;
  try {
    m.suite_path = resolve(doc.at("suite").get<std::string>(), base_dir);
    m.library_path = resolve(doc.at("grasp_library").get<std::string>(), base_dir);
    m.output_dir = resolve(doc.value("output", std::string{}), base_dir);
    m.seed = doc.value("seed", std::uint64_t{0});
    m.jobs = doc.value("jobs", 1);
    if (doc.contains("solver")) {
      const auto& s = doc.at("solver");
      m.solver.equilibrium_tolerance = s.value("equilibrium_tolerance", m.solver.equilibrium_tolerance);
      m.solver.optimality_tolerance = s.value("optimality_tolerance", m.solver.optimality_tolerance);
      m.solver.restarts = s.value("restarts", m.solver.restarts);
      m.solver.max_iterations = s.value("max_iterations", m.solver.max_iterations);
      m.solver.warm_start = s.value("warm_start", m.solver.warm_start);
    }
    if (doc.contains("bandwidth")) {
      const auto& b = doc.at("bandwidth");
      m.bandwidth.sweep.start_hz = b.value("start_Hz", m.bandwidth.sweep.start_hz);
      m.bandwidth.sweep.stop_hz = b.value("stop_Hz", m.bandwidth.sweep.stop_hz);
      m.bandwidth.sweep.step_hz = b.value("step_Hz", m.bandwidth.sweep.step_hz);
      m.bandwidth.pass_fraction = b.value("pass_fraction", m.bandwidth.pass_fraction);
      m.bandwidth.band_fraction = b.value("band_fraction", m.bandwidth.band_fraction);
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed manifest: {}", e.what()));
  }
  if (m.solver.restarts < 1 || m.solver.max_iterations < 1) throw ConfigError("restarts and max_iterations must be >= 1");
  if (!(m.bandwidth.sweep.step_hz > 0.0)) throw ConfigError("bandwidth step must be positive");
  if (m.jobs < 1) throw ConfigError("jobs must be >= 1");
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

std::string format_manifest(const RunManifest& m) {
  ordered_json doc;
  doc["suite"] = m.suite_path.generic_string();
  doc["grasp_library"] = m.library_path.generic_string();
  doc["seed"] = m.seed;
  doc["solver"] = {{"equilibrium_tolerance", m.solver.equilibrium_tolerance},
                   {"optimality_tolerance", m.solver.optimality_tolerance},
                   {"restarts", m.solver.restarts},
                   {"max_iterations", m.solver.max_iterations},
                   {"warm_start", m.solver.warm_start}};
  doc["bandwidth"] = {{"start_Hz", m.bandwidth.sweep.start_hz},
                      {"stop_Hz", m.bandwidth.sweep.stop_hz},
                      {"step_Hz", m.bandwidth.sweep.step_hz},
                      {"pass_fraction", m.bandwidth.pass_fraction},
                      {"band_fraction", m.bandwidth.band_fraction}};
  return doc.dump(2) + "\n";
}

TaskRun run_task(const TaskConfig& task, const WrenchTrajectory& traj, const GraspLibrary& library,
                 const SolverOptions& solver, const BandwidthOptions* bandwidth) {
  TaskRun run;
  run.task = task;
  run.seed = solver.seed;
  const auto config = grasp_from_config(task, library);
  run.requirements = solve_trajectory(traj, config, solver);

  auto& r = run.result;
  r.name = task.name;
  r.handle_size = task.handle_size;
  r.radius = task.radius;
  r.palm = task.palm;
  r.infeasible_steps = run.requirements.infeasible_steps.size();
  r.timesteps = run.requirements.timesteps;
  for (auto j : kJoints) r.joints[static_cast<std::size_t>(j)].peak_torque = run.requirements.peak(j);

  if (bandwidth) {
    for (const auto& tr : run.requirements.trajectories) {
      auto b = min_bandwidth(tr, bandwidth->sweep, bandwidth->pass_fraction, bandwidth->band_fraction);
      auto& o = r.joints[static_cast<std::size_t>(tr.joint)];
      o.bandwidth_hz = std::max(o.bandwidth_hz, b.passed ? b.bandwidth_hz : 0.0);
      o.bandwidth_passed = o.bandwidth_passed && b.passed;
      run.bandwidths.push_back(std::move(b));
    }
  }
  return run;
}

std::string torque_csv(const JointTorqueTrajectory& tr, double start_time, std::string_view comment) {
  std::string out;
  if (!comment.empty()) out += fmt::format("# {}\n", comment);
  out += "t,torque\n";
  for (std::size_t k = 0; k < tr.values.size(); ++k)
    out += fmt::format("{},{}\n", format_number(start_time + static_cast<double>(k) / tr.sample_rate),
                       format_number(tr.values[k]));
  return out;
}

void write_task_outputs(const TaskRun& run, double start_time, const std::filesystem::path& dir) {
  const auto comment = seed_comment(run);
  const auto& req = run.requirements;
  for (const auto& tr : req.trajectories)
    write_file_atomic(dir / fmt::format("finger{}_{}.csv", tr.finger_index, to_string(tr.joint)),
                      torque_csv(tr, start_time, comment));

  std::string peaks = fmt::format("# {}\n# timesteps={} infeasible={}{}\n", comment, req.timesteps,
                                  req.infeasible_steps.size(), req.infeasible_warning ? " warning=over-threshold" : "");
  peaks += "joint,peak_torque_Nm,finger0_Nm,finger1_Nm,finger2_Nm\n";
  std::vector<bool> skip(req.timesteps, false);
  for (auto k : req.infeasible_steps) skip[k] = true;
  for (auto j : kJoints) {
    std::array<double, 3> per{};
    for (int f = 0; f < 3; ++f) {
      const auto& values = req.trajectory(f, j).values;
      for (std::size_t k = 0; k < values.size(); ++k)
        if (!skip[k]) per[static_cast<std::size_t>(f)] = std::max(per[static_cast<std::size_t>(f)], std::abs(values[k]));
    }
    peaks += fmt::format("{},{},{},{},{}\n", to_string(j), format_number(req.peak(j)), format_number(per[0]),
                         format_number(per[1]), format_number(per[2]));
  }
  write_file_atomic(dir / "peaks.csv", peaks);

  if (!run.bandwidths.empty()) {
    std::string bw = fmt::format("# {}\nfinger,joint,bandwidth_Hz,pass_fraction,tolerance_band_Nm,passed\n", comment);
    for (std::size_t i = 0; i < run.bandwidths.size(); ++i) {
      const auto& tr = req.trajectories[i];
      const auto& b = run.bandwidths[i];
      bw += fmt::format("{},{},{},{},{},{}\n", tr.finger_index, to_string(tr.joint), format_number(b.bandwidth_hz),
                        format_number(b.pass_fraction), format_number(b.tolerance_band), b.passed ? 1 : 0);
    }
    write_file_atomic(dir / "bandwidth.csv", bw);
  }
}

RunSummary run_suite(const RunManifest& manifest, std::ostream* log) {
  if (manifest.output_dir.empty()) throw ConfigError("manifest has no output directory");
  const auto suite = load_task_suite(manifest.suite_path);
  if (suite.tasks.empty()) throw ConfigError(fmt::format("task suite '{}' is empty", manifest.suite_path.string()));
  const auto library = load_grasp_library(manifest.library_path);

  // Load everything up front so input errors surface before any solve.
  std::vector<WrenchTrajectory> trajectories;
  for (const auto& t : suite.tasks) {
    if (t.trajectory_path.empty()) throw ConfigError(fmt::format("task '{}' has no trajectory", t.name));
    trajectories.push_back(load_trajectory(t.trajectory_path));
  }
  std::vector<std::string> slugs;
  for (const auto& t : suite.tasks) {
    auto slug = slugify(t.name);
    if (std::find(slugs.begin(), slugs.end(), slug) != slugs.end())
      throw ConfigError(fmt::format("task names collide after slugging: '{}'", slug));
    slugs.push_back(std::move(slug));
  }

  RunSummary summary;
  summary.runs.resize(suite.tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < suite.tasks.size();) {
      try {
        SolverOptions solver = manifest.solver;
        solver.seed = derive_seed(manifest.seed, i);
        auto run = run_task(suite.tasks[i], trajectories[i], library, solver, &manifest.bandwidth);
        write_task_outputs(run, trajectories[i].start_time, manifest.output_dir / "tasks" / slugs[i]);
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << fmt::format("[{}/{}] {}: {} steps, {} infeasible\n", i + 1, suite.tasks.size(), run.task.name,
                              run.result.timesteps, run.result.infeasible_steps);
        }
        summary.runs[i] = std::move(run);
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next = suite.tasks.size();
      }
    }
  };
  const auto jobs = static_cast<std::size_t>(std::max(1, manifest.jobs));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::min(jobs, suite.tasks.size()); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<TaskResult> results;
  for (const auto& run : summary.runs) {
    results.push_back(run.result);
    if (run.requirements.infeasible_warning) ++summary.flagged_tasks;
  }
  const auto comment = fmt::format("seed={}", manifest.seed);
  write_file_atomic(manifest.output_dir / "manifest.json", format_manifest(manifest));
  write_file_atomic(manifest.output_dir / "suite.csv", suite_csv(results, comment));
  write_file_atomic(manifest.output_dir / "summary.txt",
                    fmt::format("# {}\n{}", comment, summary_table(summarize_tasks(results))));
  return summary;
}

}  // namespace handreq
