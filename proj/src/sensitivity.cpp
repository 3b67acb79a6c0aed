#include "handreq/sensitivity.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <random>

#include "handreq/error.hpp"

namespace handreq {
namespace {

void record(SensitivityStats& stats, const std::array<double, 3>& peaks) {
  for (std::size_t j = 0; j < 3; ++j) stats.deltas.push_back(std::abs(peaks[j] - stats.baseline_peaks[j]));
  ++stats.trials;
}

}  // namespace

std::array<double, 3> peak_torques(const TorqueRequirements& req) {
  return {req.peak(Joint::MCP_Z), req.peak(Joint::MCP_X), req.peak(Joint::PIP)};
}

void fill_statistics(SensitivityStats& stats) {
  stats.mean = stats.stddev = 0.0;
  if (stats.deltas.empty()) return;
  const double n = static_cast<double>(stats.deltas.size());
  for (double d : stats.deltas) stats.mean += d;
  stats.mean /= n;
  double var = 0.0;
  for (double d : stats.deltas) var += (d - stats.mean) * (d - stats.mean);
  stats.stddev = std::sqrt(var / n);
}

SensitivityStats sensitivity_touchpoints(const WrenchTrajectory& traj, const GraspConfig& config,
                                         const SolverOptions& options, const TouchpointPerturbation& p) {
  if (p.trials < 1) throw DomainError("sensitivity needs at least one trial");
  if (!(p.position_radius >= 0.0 && p.radius_delta >= 0.0)) throw DomainError("perturbation sizes must be >= 0");
  if (config.fingers.empty()) throw ConfigError("grasp configuration has no fingers");

  SensitivityStats stats;
  stats.baseline_peaks = peak_torques(solve_trajectory(traj, config, options));

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& geom = config.fingers.front().geometry;
  for (int trial = 0; trial < p.trials; ++trial) {
    bool evaluated = false;
    for (int attempt = 0; attempt <= p.max_resamples; ++attempt) {
      CylinderFrame cyl = config.cylinder;
      cyl.radius += (unit(rng) < 0.5 ? -1.0 : 1.0) * p.radius_delta;
      std::vector<ContactPoint> contacts = config.contacts;
      for (auto& c : contacts) {
        const double rad = p.position_radius * std::sqrt(unit(rng));
        const double ang = 2.0 * std::numbers::pi * unit(rng);
        c.nominal_z += rad * std::cos(ang);
        // Arc length on the original surface, re-expressed as an angle on the new one.
        c.nominal_theta += rad * std::sin(ang) / config.cylinder.radius;
      }
      if (!(cyl.radius > 0.0)) {
        ++stats.resamples;
        continue;
      }
      GraspConfig perturbed;
      try {
        perturbed = build_grasp(cyl, std::move(contacts), config.friction_mu, geom);
      } catch (const Error&) {
        ++stats.resamples;
        continue;
      }
      record(stats, peak_torques(solve_trajectory(traj, perturbed, options)));
      evaluated = true;
      break;
    }
    if (!evaluated) ++stats.skipped_trials;
  }
  fill_statistics(stats);
  return stats;
}

SensitivityStats sensitivity_friction(const WrenchTrajectory& traj, const GraspConfig& config,
                                      const SolverOptions& options, std::span<const double> mu_values,
                                      double baseline_mu) {
  for (double mu : mu_values)
    if (!(mu > 0.0)) throw DomainError(fmt::format("friction coefficient {} must be positive", mu));
  if (!(baseline_mu > 0.0)) throw DomainError("baseline friction coefficient must be positive");
  SensitivityStats stats;
  GraspConfig cfg = config;
  cfg.friction_mu = baseline_mu;
  stats.baseline_peaks = peak_torques(solve_trajectory(traj, cfg, options));
  for (double mu : mu_values) {
    cfg.friction_mu = mu;
    record(stats, peak_torques(solve_trajectory(traj, cfg, options)));
  }
  fill_statistics(stats);
  return stats;
}

}  // namespace handreq
