#include "handreq/actuator_io.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include "handreq/bandwidth.hpp"
#include "handreq/wrench_io.hpp"

namespace handreq {
namespace {

using nlohmann::json;

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{} is not valid JSON: {}", what, e.what()));
  }
}

double field(const json& doc, const char* key, std::string_view what) {
  if (!doc.contains(key)) throw ConfigError(fmt::format("{}: missing field '{}'", what, key));
  if (!doc.at(key).is_number()) throw ConfigError(fmt::format("{}: field '{}' must be a number", what, key));
  return doc.at(key).get<double>();
}

template <class F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("{}: {}", what, e.what()));
  }
}

}  // namespace

MotorSpecd parse_motor_spec(std::string_view text) {
  constexpr std::string_view what = "motor spec";
  const json doc = parse(text, what);
  return guarded(what, [&] {
    MotorSpecd m;
    m.diameter = field(doc, "diameter_m", what);
    m.length = field(doc, "length_m", what);
    if (doc.contains("shear_stress_bar"))
      m.shear_stress = MotorSpecd::bar(field(doc, "shear_stress_bar", what));
    else
      m.shear_stress = field(doc, "shear_stress_Pa", what);
    m.gear_ratio = doc.contains("gear_ratio") ? field(doc, "gear_ratio", what) : 1.0;
    m.rotor_inertia = field(doc, "rotor_inertia_kgm2", what);
    m.max_speed = field(doc, "max_speed_rad_s", what);
    m.validate();
    return m;
  });
}

GearSpecd parse_gear_spec(std::string_view text) {
  constexpr std::string_view what = "gear spec";
  const json doc = parse(text, what);
  return guarded(what, [&] {
    GearSpecd g;
    g.pitch_diameter = field(doc, "pitch_diameter_m", what);
    g.module = field(doc, "module_m", what);
    g.width = field(doc, "width_m", what);
    g.lewis_factor = field(doc, "lewis_factor", what);
    g.yield_strength = field(doc, "yield_strength_Pa", what);
    g.safety_factor = field(doc, "safety_factor", what);
    g.ratio_to_output = doc.contains("ratio_to_output") ? field(doc, "ratio_to_output", what) : 1.0;
    g.validate();
    return g;
  });
}

SeaSpec parse_sea_spec(std::string_view text) {
  constexpr std::string_view what = "SEA spec";
  const json doc = parse(text, what);
  SeaSpec s;
  s.strength = field(doc, "strength_Nm", what);
  s.bandwidth_rad = doc.contains("bandwidth_Hz") ? hz_to_rad(field(doc, "bandwidth_Hz", what))
                                                 : field(doc, "bandwidth_rad_s", what);
  if (doc.contains("stiffness_Nm_per_rad")) s.stiffness = field(doc, "stiffness_Nm_per_rad", what);
  if (!(s.strength > 0.0 && s.bandwidth_rad > 0.0) || (s.stiffness && !(*s.stiffness > 0.0)))
    throw ConfigError("SEA spec: strength, bandwidth and stiffness must be positive");
  return s;
}

MotorSpecd load_motor_spec(const std::filesystem::path& path) { return parse_motor_spec(read_file(path)); }
GearSpecd load_gear_spec(const std::filesystem::path& path) { return parse_gear_spec(read_file(path)); }
SeaSpec load_sea_spec(const std::filesystem::path& path) { return parse_sea_spec(read_file(path)); }

}  // namespace handreq
