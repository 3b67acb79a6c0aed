#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace handreq {

/// Six-axis force/torque sample at the tool base, expressed in the handle frame.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // N m

  static Wrench from(double fx, double fy, double fz, double tx, double ty, double tz) {
    return {Eigen::Vector3d(fx, fy, fz), Eigen::Vector3d(tx, ty, tz)};
  }
  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, torque;
    return w;
  }
  bool finite() const { return force.allFinite() && torque.allFinite(); }
};

inline Wrench operator*(double s, const Wrench& w) { return {s * w.force, s * w.torque}; }

struct WrenchTrajectory {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s
  std::vector<Wrench> samples;

  double dt() const { return 1.0 / sample_rate; }
  double time(std::size_t k) const { return start_time + static_cast<double>(k) / sample_rate; }
  std::size_t size() const { return samples.size(); }
};

enum class HandleSize { Small, Medium, Large, Custom };
enum class GraspType { MPinch, LPinch, Tripod1, Tripod2, Tripod3 };

std::string_view to_string(HandleSize s);
std::string_view to_string(GraspType g);
/// Throws ConfigError on unknown names.
HandleSize parse_handle_size(std::string_view s);
GraspType parse_grasp_type(std::string_view s);
/// Handle radius in metres for the three shipped sizes.
double handle_radius(HandleSize s);

struct TaskConfig {
  std::string name;
  HandleSize handle_size = HandleSize::Medium;
  double radius = 0.015;  // m, resolved from handle_size unless Custom
  GraspType grasp = GraspType::MPinch;
  bool palm = false;
  double friction_mu = 0.6;
  std::filesystem::path trajectory_path;
};

struct TaskSuite {
  std::vector<TaskConfig> tasks;
  std::vector<std::string> warnings;
};

/// Column-oriented numeric CSV. `#` lines and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  std::vector<std::size_t> line_numbers;  // source line of each row (1-based)

  const std::vector<double>& column(std::string_view name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Reads a numeric CSV file and checks that every `required` column exists.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required);
CsvTable parse_csv(std::string_view text, const std::vector<std::string>& required,
                   const std::string& source = "<memory>");

/// Checks t is strictly increasing and uniform within 1e-9 s; returns the rate in Hz.
double uniform_sample_rate(const CsvTable& table, std::string_view time_column = "t");

WrenchTrajectory load_trajectory(const std::filesystem::path& path);
WrenchTrajectory parse_trajectory(std::string_view text, const std::string& source = "<memory>");
void save_trajectory(const WrenchTrajectory& traj, const std::filesystem::path& path,
                     std::string_view comment = {});
std::string format_trajectory(const WrenchTrajectory& traj, std::string_view comment = {});

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Relative trajectory paths are resolved against the suite file's directory.
TaskSuite load_task_suite(const std::filesystem::path& path);
TaskSuite parse_task_suite(std::string_view text, const std::filesystem::path& base_dir = {});

/// Atomically replaces `path` with `contents` (write temp, then rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace handreq
