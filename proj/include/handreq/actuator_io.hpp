#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "handreq/actuator.hpp"

namespace handreq {

/// Series-elastic design inputs. Stiffness is optional: without it only the
/// admissible window is evaluated.
struct SeaSpec {
  double strength = 0.0;       // tau_strength, N m
  double bandwidth_rad = 0.0;  // B, rad/s
  std::optional<double> stiffness;  // k_theta, N m/rad
};

// JSON spec files in SI units. Shear stress may be given in Pa
// ("shear_stress_Pa") or bar ("shear_stress_bar"); bandwidth in rad/s or Hz.
MotorSpecd parse_motor_spec(std::string_view json_text);
GearSpecd parse_gear_spec(std::string_view json_text);
SeaSpec parse_sea_spec(std::string_view json_text);
MotorSpecd load_motor_spec(const std::filesystem::path& path);
GearSpecd load_gear_spec(const std::filesystem::path& path);
SeaSpec load_sea_spec(const std::filesystem::path& path);

}  // namespace handreq
