#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handreq/joint_torque.hpp"
#include "handreq/wrench_io.hpp"

namespace handreq {

enum class Direction { AtLeast, AtMost };

std::string_view to_string(Direction d);  // ">=" or "<="
Direction parse_direction(std::string_view s);

/// Suite quantity a requirement can be derived from.
enum class DerivedQuantity { None, PeakTorque, Bandwidth };

struct Requirement {
  std::string metric;  // unique key, e.g. "pip_torque"
  std::string label;   // display name
  double desired = 0.0;
  std::string unit;
  Direction direction = Direction::AtLeast;
  /// Free-text qualifier such as an operating point ("@0.55 N m").
  std::string note;
  DerivedQuantity quantity = DerivedQuantity::None;
  Joint joint = Joint::PIP;
};

struct RequirementsProfile {
  std::string name;
  std::vector<Requirement> requirements;

  /// Throws ConfigError on duplicate metric names.
  void validate() const;
};

struct Measurement {
  double value = 0.0;
  double uncertainty = 0.0;  // display only
};

using Measurements = std::map<std::string, Measurement, std::less<>>;

struct MetricResult {
  Requirement requirement;
  Measurement achieved;
  bool pass = false;
};

struct DesignReport {
  std::vector<MetricResult> metrics;

  int passes() const;
  int failures() const;
};

/// Central-value comparison; equality passes. Throws ConfigError naming the
/// first profile metric without a measurement.
DesignReport compare(const RequirementsProfile& profile, const Measurements& achieved);

RequirementsProfile parse_profile(std::string_view json_text);
RequirementsProfile load_profile(const std::filesystem::path& path);
Measurements parse_measurements(std::string_view json_text);
Measurements load_measurements(const std::filesystem::path& path);

/// `metric,desired,achieved,unit,direction,pass`
std::string report_csv(const DesignReport& report);
/// Aligned text table in the layout of a desired/achieved/pass comparison.
std::string report_table(const DesignReport& report);

/// Per-joint outcome of one task.
struct JointOutcome {
  double peak_torque = 0.0;   // N m, max over fingers
  double bandwidth_hz = 0.0;  // max over fingers of the minimum passing bandwidth
  bool bandwidth_passed = true;
};

struct TaskResult {
  std::string name;
  HandleSize handle_size = HandleSize::Medium;
  double radius = 0.015;
  bool palm = false;
  std::array<JointOutcome, 3> joints{};  // indexed by Joint
  std::size_t infeasible_steps = 0;
  std::size_t timesteps = 0;
};

struct JointSummary {
  double max_torque = 0.0;
  double max_bandwidth_hz = 0.0;
  std::size_t tasks = 0;
};

using JointSummaries = std::array<JointSummary, 3>;

struct SuiteSummary {
  JointSummaries overall{};
  std::map<HandleSize, JointSummaries> by_size;
  std::map<bool, JointSummaries> by_palm;
  std::size_t tasks = 0;
  std::size_t infeasible_steps = 0;
};

/// Element-wise maxima over tasks, overall and per handle size / palm usage.
/// Throws ConfigError on an empty list.
SuiteSummary summarize_tasks(std::span<const TaskResult> results);

/// Copy of `profile` with torque and bandwidth requirements replaced by the
/// suite-wide maxima.
RequirementsProfile derive_profile(const RequirementsProfile& profile, const SuiteSummary& summary);

/// `task,joint,peak_torque_Nm,bandwidth_Hz,handle_size,palm,infeasible_steps`,
/// rows sorted by task name then joint.
std::string suite_csv(std::span<const TaskResult> results, std::string_view comment = {});
std::vector<TaskResult> parse_suite_csv(std::string_view text, const std::string& source = "<memory>");

/// Plain-text summary of a SuiteSummary.
std::string summary_table(const SuiteSummary& summary);

}  // namespace handreq
