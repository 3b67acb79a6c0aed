#pragma once

#include <span>
#include <utility>
#include <vector>

#include "handreq/joint_torque.hpp"

namespace handreq {

/// Bandwidth grid in Hz: start, start + step, ... up to stop inclusive.
struct BandwidthSweep {
  double start_hz = 0.2;
  double stop_hz = 100.0;
  double step_hz = 0.2;

  std::vector<double> grid() const;
};

struct BandwidthResult {
  double bandwidth_hz = 0.0;
  double pass_fraction = 0.0;
  double tolerance_band = 0.0;  // N m
  bool passed = false;
  /// (grid point Hz, pass fraction), filled when requested.
  std::vector<std::pair<double, double>> curve;
};

constexpr double hz_to_rad(double hz) { return 2.0 * 3.14159265358979323846 * hz; }

/// Steady-state gain sqrt(B^2 + 1) / B of T(s) = sqrt(B^2 + 1) / (s + B).
double first_order_dc_gain(double bandwidth_rad);

/// Exact zero-order-hold response of T(s) from zero initial state; y[0] = 0.
std::vector<double> simulate_first_order(std::span<const double> reference, double sample_rate,
                                         double bandwidth_rad);
std::vector<double> simulate_first_order(const JointTorqueTrajectory& reference, double bandwidth_rad);

/// Fraction of samples with |output - reference| <= band.
double tracking_fraction(std::span<const double> reference, std::span<const double> output, double band);

/// Smallest grid bandwidth whose response keeps `pass_fraction` of the samples
/// within band_fraction * max|r| of the reference.
BandwidthResult min_bandwidth(const JointTorqueTrajectory& reference, const BandwidthSweep& sweep = {},
                              double pass_fraction = 0.98, double band_fraction = 0.05,
                              bool record_curve = false);

/// First-order approximation B (Hz) = 0.35 / t_r (s).
double bandwidth_from_rise_time(double rise_time);

}  // namespace handreq
