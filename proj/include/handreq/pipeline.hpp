#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "handreq/bandwidth.hpp"
#include "handreq/grasp.hpp"
#include "handreq/grasp_optim.hpp"
#include "handreq/report.hpp"

namespace handreq {

struct BandwidthOptions {
  BandwidthSweep sweep;
  double pass_fraction = 0.98;
  double band_fraction = 0.05;
};

/// Everything that determines the output of a batch run.
struct RunManifest {
  std::filesystem::path suite_path;
  std::filesystem::path library_path;
  std::filesystem::path output_dir;
  SolverOptions solver;
  BandwidthOptions bandwidth;
  std::uint64_t seed = 0;
  int jobs = 1;  // tasks solved concurrently; does not affect outputs
};

/// Relative paths are resolved against `base_dir`.
RunManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunManifest load_manifest(const std::filesystem::path& path);
/// Canonical JSON echo; output directory and jobs are omitted so that runs
/// into different directories produce identical trees.
std::string format_manifest(const RunManifest& manifest);

struct TaskRun {
  TaskConfig task;
  std::uint64_t seed = 0;
  TorqueRequirements requirements;
  /// Finger-major like TorqueRequirements::trajectories; empty when skipped.
  std::vector<BandwidthResult> bandwidths;
  TaskResult result;
};

/// Solves the task's trajectory and, when `bandwidth` is given, the minimum
/// bandwidth of every finger-joint torque trajectory.
TaskRun run_task(const TaskConfig& task, const WrenchTrajectory& traj, const GraspLibrary& library,
                 const SolverOptions& solver, const BandwidthOptions* bandwidth);

/// `<dir>/<finger>_<joint>.csv` (columns t,torque) for the nine trajectories,
/// `peaks.csv`, and `bandwidth.csv` when bandwidths were computed.
void write_task_outputs(const TaskRun& run, double start_time, const std::filesystem::path& dir);

std::string torque_csv(const JointTorqueTrajectory& tr, double start_time, std::string_view comment);

struct RunSummary {
  std::vector<TaskRun> runs;  // suite order
  std::size_t flagged_tasks = 0;  // tasks over the infeasible-timestep threshold
};

/// Runs every task of the manifest's suite and writes
/// `<out>/manifest.json`, `<out>/tasks/<slug>/...`, `<out>/suite.csv` and
/// `<out>/summary.txt`. Progress lines go to `log` when non-null.
RunSummary run_suite(const RunManifest& manifest, std::ostream* log = nullptr);

}  // namespace handreq
