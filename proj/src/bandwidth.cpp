#include "handreq/bandwidth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "handreq/error.hpp"

namespace handreq {

Joint parse_joint(std::string_view s) {
  for (auto j : kJoints)
    if (to_string(j) == s) return j;
  throw ConfigError(fmt::format("unknown joint '{}'", s));
}

void JointTorqueTrajectory::validate() const {
  if (!(sample_rate > 0.0)) throw DomainError("sample rate must be positive");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("torque trajectory has non-finite samples");
}

std::vector<double> BandwidthSweep::grid() const {
  if (!(step_hz > 0.0)) throw DomainError("sweep step must be positive");
  if (!(start_hz > 0.0) || stop_hz < start_hz) throw DomainError("sweep needs 0 < start <= stop");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double b = start_hz + static_cast<double>(k) * step_hz;
    if (b > stop_hz + 1e-9 * step_hz) break;
    // Snap 0.1 * 224 style products back to the decimal grid value.
    out.push_back(std::round(b * 1e9) / 1e9);
  }
  return out;
}

double first_order_dc_gain(double bandwidth_rad) {
  return std::sqrt(bandwidth_rad * bandwidth_rad + 1.0) / bandwidth_rad;
}

std::vector<double> simulate_first_order(std::span<const double> reference, double sample_rate, double bandwidth_rad) {
  if (!(bandwidth_rad > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(sample_rate > 0.0)) throw DomainError("sample rate must be positive");
  const double decay = std::exp(-bandwidth_rad / sample_rate);
  const double input_gain = -std::expm1(-bandwidth_rad / sample_rate) * first_order_dc_gain(bandwidth_rad);
  std::vector<double> y(reference.size(), 0.0);
  double state = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    y[k] = state;
    state = decay * state + input_gain * reference[k];
  }
  return y;
}

std::vector<double> simulate_first_order(const JointTorqueTrajectory& reference, double bandwidth_rad) {
  return simulate_first_order(reference.values, reference.sample_rate, bandwidth_rad);
}

double tracking_fraction(std::span<const double> reference, std::span<const double> output, double band) {
  if (reference.empty()) return 1.0;
  std::size_t inside = 0;
  for (std::size_t k = 0; k < reference.size(); ++k)
    if (std::abs(output[k] - reference[k]) <= band) ++inside;
  return static_cast<double>(inside) / static_cast<double>(reference.size());
}

BandwidthResult min_bandwidth(const JointTorqueTrajectory& reference, const BandwidthSweep& sweep,
                              double pass_fraction, double band_fraction, bool record_curve) {
  reference.validate();
  if (reference.values.empty()) throw DomainError("reference trajectory is empty");
  double peak = 0.0;
  for (double v : reference.values) peak = std::max(peak, std::abs(v));

  BandwidthResult res;
  res.tolerance_band = band_fraction * peak;
  double best_fraction = -1.0;
  double best_hz = 0.0;
  for (double hz : sweep.grid()) {
    const auto y = simulate_first_order(reference, hz_to_rad(hz));
    const double frac = tracking_fraction(reference.values, y, res.tolerance_band);
    if (record_curve) res.curve.emplace_back(hz, frac);
    if (frac > best_fraction) {
      best_fraction = frac;
      best_hz = hz;
    }
    if (!res.passed && frac >= pass_fraction - 1e-12) {
      res.passed = true;
      res.bandwidth_hz = hz;
      res.pass_fraction = frac;
      if (!record_curve) break;
    }
  }
  if (!res.passed) {
    res.bandwidth_hz = best_hz;
    res.pass_fraction = best_fraction;
  }
  return res;
}

double bandwidth_from_rise_time(double rise_time) {
  if (!(rise_time > 0.0)) throw DomainError("rise time must be positive");
  return 0.35 / rise_time;
}

}  // namespace handreq
