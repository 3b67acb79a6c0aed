#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "handreq/wrench_io.hpp"

namespace handreq {

enum class SignalShape { Constant, Ramp, Sinusoid, NoiseSpiked };

std::string_view to_string(SignalShape s);

struct SyntheticSpec {
  SignalShape shape = SignalShape::Sinusoid;
  Wrench base;       // value at t = 0 (constant, ramp) or mean (sinusoid)
  Wrench amplitude;  // ramp increment over the duration, or oscillation amplitude
  double frequency_hz = 0.5;
  double duration_s = 1.0;
  double sample_rate = 100.0;
  /// Noise standard deviation and spike height as fractions of |amplitude|, per component.
  double noise_fraction = 0.05;
  double spike_probability = 0.02;
  double spike_fraction = 1.5;
  /// Half-cosine fade from zero over this initial interval (s).
  double fade_in_s = 0.0;
  std::uint64_t seed = 0;
};

/// Deterministic trajectory with round(duration * rate) samples starting at t = 0.
WrenchTrajectory synthesize(const SyntheticSpec& spec);

/// SplitMix64 finalizer; used to derive independent per-item seeds from one seed.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Lowercase file-system-safe slug of a task name.
std::string slugify(std::string_view name);

/// The 30 manipulation tasks with their handle size, grasp and palm usage.
std::vector<TaskConfig> everyday_tasks();

/// Writes `<dir>/<suite_file>` and one trajectory per task under
/// `<dir>/trajectories/`. Returns the task list with trajectory paths set
/// relative to `dir`.
std::vector<TaskConfig> write_everyday_suite(const std::filesystem::path& dir, std::uint64_t seed,
                                             std::string_view suite_file = "task_suite.json",
                                             double duration_s = 3.0, double sample_rate = 100.0);

/// Short trajectories of every signal shape over assorted grasps, used to
/// exercise the optimizer: at least ten tasks, 1000 samples in total.
std::vector<TaskConfig> write_feasibility_suite(const std::filesystem::path& dir, std::uint64_t seed,
                                                std::string_view suite_file = "synthetic_suite.json");

std::string format_task_suite(const std::vector<TaskConfig>& tasks, const std::filesystem::path& relative_to);

}  // namespace handreq
