#pragma once

// Closed-form actuator and transmission sizing. All quantities SI; bandwidths
// in rad/s at this layer.

#include <cmath>
#include <numbers>

#include "handreq/error.hpp"

namespace handreq {

template <typename Scalar>
struct MotorSpec {
  Scalar diameter{};       // rotor-stator interface diameter D (m)
  Scalar length{};         // rotor-stator interface length L (m)
  Scalar shear_stress{};   // tau_em (Pa)
  Scalar gear_ratio{1};    // N
  Scalar rotor_inertia{};  // J_m (kg m^2)
  Scalar max_speed{};      // motor-side (rad/s)

  static constexpr Scalar pascal_per_bar = Scalar(1e5);
  static Scalar bar(Scalar b) { return b * pascal_per_bar; }

  void validate() const {
    if (!(diameter > 0 && length > 0 && shear_stress > 0 && gear_ratio > 0 && rotor_inertia > 0 && max_speed > 0))
      throw DomainError("motor spec fields must be positive");
  }
};

template <typename Scalar>
struct GearSpec {
  Scalar pitch_diameter{};  // D_gear (m)
  Scalar module{};          // m (m)
  Scalar width{};           // w_gear (m)
  Scalar lewis_factor{};    // gamma
  Scalar yield_strength{};  // sigma_y (Pa)
  Scalar safety_factor{1};  // SF
  Scalar ratio_to_output{1};

  void validate() const {
    if (!(pitch_diameter > 0 && module > 0 && width > 0 && lewis_factor > 0 && yield_strength > 0 &&
          ratio_to_output > 0))
      throw DomainError("gear spec fields must be positive");
    if (!(safety_factor >= 1)) throw DomainError("safety factor must be at least 1");
  }
};

/// Peak output torque from air-gap shear stress: N tau_em (D/2)(pi D L).
template <typename Scalar>
Scalar motor_torque(const MotorSpec<Scalar>& m) {
  m.validate();
  return m.gear_ratio * m.shear_stress * (m.diameter / 2) * (std::numbers::pi_v<Scalar> * m.diameter * m.length);
}

/// Lewis bending strength at the output: D/(2 SF) m gamma sigma_y w N_gear.
template <typename Scalar>
Scalar gear_strength(const GearSpec<Scalar>& g) {
  g.validate();
  return g.pitch_diameter / (2 * g.safety_factor) * g.module * g.lewis_factor * g.yield_strength * g.width *
         g.ratio_to_output;
}

template <typename Scalar>
struct StiffnessWindow {
  Scalar k_min{};  // bandwidth floor, N m/rad
  Scalar k_max{};  // impact-strength ceiling, N m/rad
  bool feasible() const { return k_min <= k_max; }
};

template <typename Scalar>
StiffnessWindow<Scalar> sea_window(const MotorSpec<Scalar>& m, Scalar strength, Scalar bandwidth_rad) {
  m.validate();
  if (!(strength > 0 && bandwidth_rad > 0)) throw DomainError("strength and bandwidth must be positive");
  const Scalar n2 = m.gear_ratio * m.gear_ratio;
  const Scalar output_speed = m.gear_ratio * m.max_speed;
  return {bandwidth_rad * bandwidth_rad * m.rotor_inertia * n2,
          strength * strength / (output_speed * output_speed * m.rotor_inertia)};
}

template <typename Scalar>
struct CollisionLoad {
  Scalar torque{};      // N m
  Scalar deflection{};  // rad
};

/// Full-speed impact: reflected rotor energy stored in the series spring.
template <typename Scalar>
CollisionLoad<Scalar> collision_torque(const MotorSpec<Scalar>& m, Scalar stiffness) {
  m.validate();
  if (!(stiffness > 0)) throw DomainError("stiffness must be positive");
  const Scalar output_speed = m.gear_ratio * m.max_speed;
  return {output_speed * std::sqrt(stiffness * m.rotor_inertia),
          output_speed * std::sqrt(m.rotor_inertia / stiffness)};
}

template <typename Scalar>
Scalar natural_frequency(const MotorSpec<Scalar>& m, Scalar stiffness) {
  m.validate();
  if (!(stiffness > 0)) throw DomainError("stiffness must be positive");
  return std::sqrt(stiffness / (m.rotor_inertia * m.gear_ratio * m.gear_ratio));
}

using MotorSpecd = MotorSpec<double>;
using GearSpecd = GearSpec<double>;

}  // namespace handreq
