#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "handreq/grasp.hpp"
#include "handreq/joint_torque.hpp"
#include "handreq/wrench_io.hpp"

namespace handreq {

/// Decision variables of one contact.
struct ContactVariables {
  double normal = 0.0;      // N_i      (N)
  double tangential = 0.0;  // f_theta,i (N)
  double axial = 0.0;       // f_z,i    (N)
  double z = 0.0;           // m
  double theta = 0.0;       // rad
};

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Components that can be held fixed: positions stay at nominal, frozen
/// friction components stay at zero.
enum FrozenComponents : unsigned {
  kFreezeNone = 0,
  kFreezePositions = 1u << 0,
  kFreezeTangential = 1u << 1,
  kFreezeAxial = 1u << 2,
};

struct SolverOptions {
  /// Equilibrium residual (N, N m) above which a solve is reported infeasible.
  double equilibrium_tolerance = 1e-6;
  double optimality_tolerance = 1e-9;
  /// Starts per solve: the nominal start plus (restarts - 1) seeded perturbations.
  int restarts = 5;
  std::uint64_t seed = 0;
  /// Interior-point iterations per start.
  int max_iterations = 500;
  double regularization = 1e-9;
  unsigned frozen = kFreezeNone;
  /// Seed each trajectory step with the previous step's solution.
  bool warm_start = true;
  /// Fraction of infeasible timesteps above which a trajectory is flagged.
  double infeasible_warning_fraction = 0.10;
};

struct ContactSolution {
  std::vector<ContactVariables> contacts;
  /// (tau_MCP-Z, tau_MCP-X, tau_PIP) per finger, N m.
  std::vector<Eigen::Vector3d> finger_torques;
  double objective_value = 0.0;  // sum of tau^4, N^4 m^4
  bool feasible = false;
  double kkt_residual = 0.0;
  double equilibrium_residual = 0.0;  // inf-norm, N and N m
  double max_violation = 0.0;         // largest constraint violation, physical units

  double force_norm() const;
};

/// Contacts at their nominal locations carrying no load.
std::vector<ContactVariables> nominal_variables(const GraspConfig& config);

/// Wrench minus the contact contribution: (F_x, F_y, F_z, T_x, T_y, T_z) residuals.
Vector6d equilibrium_residual(const Wrench& wrench, const GraspConfig& config,
                              std::span<const ContactVariables> candidate);

/// Largest violation of each constraint family, physical units. Cone and
/// pressure entries are positive only when the constraint is broken.
struct ConstraintViolation {
  double equilibrium = 0.0;  // inf-norm, N and N m
  double cone = 0.0;         // |(f_theta, f_z)| - mu N, N
  double pressure = 0.0;     // (z - zbar)^2 + R^2 (theta - thetabar)^2 - r^2, m^2
  double normal = 0.0;       // -N, N
  double max() const;
};

ConstraintViolation constraint_violation(const Wrench& wrench, const GraspConfig& config,
                                         std::span<const ContactVariables> candidate);

/// Joint torques of finger `finger` through its fixed contact Jacobian.
Eigen::Vector3d finger_torque(const GraspConfig& config, std::size_t finger, const ContactVariables& v);

/// Sum over fingers and joints of tau^4.
double torque_objective(const GraspConfig& config, std::span<const ContactVariables> candidate);

ContactSolution solve_timestep(const Wrench& wrench, const GraspConfig& config, const SolverOptions& options,
                               const ContactSolution* warm_start = nullptr);

struct TorqueRequirements {
  double peak_mcp_z = 0.0;
  double peak_mcp_x = 0.0;
  double peak_pip = 0.0;
  /// Finger-major: trajectories[3 * finger + joint].
  std::vector<JointTorqueTrajectory> trajectories;
  std::vector<std::size_t> infeasible_steps;
  std::size_t timesteps = 0;
  bool infeasible_warning = false;
  double max_equilibrium_residual = 0.0;  // over feasible steps

  double peak(Joint j) const;
  const JointTorqueTrajectory& trajectory(int finger, Joint j) const {
    return trajectories.at(3 * static_cast<std::size_t>(finger) + static_cast<std::size_t>(j));
  }
  /// Peaks recomputed from the stored trajectories, excluding infeasible steps.
  void recompute_peaks();
};

/// Sequential per-timestep solves, warm-started from the previous feasible step.
/// Infeasible steps hold the previous torque value in the trajectories and are
/// excluded from the peaks.
TorqueRequirements solve_trajectory(const WrenchTrajectory& traj, const GraspConfig& config,
                                    const SolverOptions& options,
                                    std::vector<ContactSolution>* solutions = nullptr);

}  // namespace handreq
