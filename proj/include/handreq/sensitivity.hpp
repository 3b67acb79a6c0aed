#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "handreq/grasp.hpp"
#include "handreq/grasp_optim.hpp"

namespace handreq {

struct SensitivityStats {
  double mean = 0.0;    // N m
  double stddev = 0.0;  // population standard deviation, N m
  /// |peak change| per evaluated perturbation and joint type, perturbation-major.
  std::vector<double> deltas;
  std::array<double, 3> baseline_peaks{};  // indexed by Joint
  std::size_t trials = 0;                  // perturbations actually evaluated
  std::size_t resamples = 0;               // rejected perturbed configurations
  std::size_t skipped_trials = 0;          // trials that exhausted the resample cap
};

struct TouchpointPerturbation {
  int trials = 10;
  double position_radius = 0.005;  // m, uniform over a disc on the cylinder surface
  double radius_delta = 0.005;     // m, applied with a uniformly random sign
  std::uint64_t seed = 0;
  int max_resamples = 100;
};

/// Peak torque per joint type over all fingers, excluding infeasible steps.
std::array<double, 3> peak_torques(const TorqueRequirements& req);

/// Mean and population standard deviation.
void fill_statistics(SensitivityStats& stats);

/// Moves every contact centre to a random point within `position_radius` of
/// its nominal location and changes the handle radius by +/- radius_delta,
/// then re-solves the trajectory. Perturbed grasps whose pressure circles
/// overlap, or whose fingers cannot reach, are redrawn.
SensitivityStats sensitivity_touchpoints(const WrenchTrajectory& traj, const GraspConfig& config,
                                         const SolverOptions& options, const TouchpointPerturbation& perturbation);

/// Re-solves with each friction coefficient and compares peaks against the
/// solve at `baseline_mu`.
SensitivityStats sensitivity_friction(const WrenchTrajectory& traj, const GraspConfig& config,
                                      const SolverOptions& options, std::span<const double> mu_values,
                                      double baseline_mu = 0.6);

}  // namespace handreq
