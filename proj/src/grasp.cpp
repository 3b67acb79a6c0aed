#include "handreq/grasp.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <json.hpp>

#include "handreq/error.hpp"

namespace handreq {

void CylinderFrame::validate() const {
  if (!(radius > 0.0)) throw ConfigError("cylinder radius must be positive");
  if (std::abs(axis.norm() - 1.0) > 1e-12) throw ConfigError("cylinder axis must have unit norm");
}

Eigen::Matrix3d CylinderFrame::basis() const {
  Eigen::Vector3d seed = std::abs(axis.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = (seed - seed.dot(axis) * axis).normalized();
  Eigen::Matrix3d b;
  b << e1, axis.cross(e1), axis;
  return b;
}

Eigen::Vector3d CylinderFrame::surface_point(double z, double theta) const {
  const Eigen::Matrix3d b = basis();
  return origin + radius * (std::cos(theta) * b.col(0) + std::sin(theta) * b.col(1)) + z * b.col(2);
}

ContactFrame<double> CylinderFrame::contact_frame(double theta) const {
  const Eigen::Matrix3d b = basis();
  const Eigen::Vector3d n = std::cos(theta) * b.col(0) + std::sin(theta) * b.col(1);
  return {n, b.col(2), b.col(2).cross(n)};
}

double pressure_separation(double radius, const ContactPoint& a, const ContactPoint& b) {
  double dtheta = std::remainder(a.nominal_theta - b.nominal_theta, 2.0 * std::numbers::pi);
  const double dz = a.nominal_z - b.nominal_z;
  return std::hypot(dz, radius * dtheta) - (a.pressure_radius + b.pressure_radius);
}

const GraspTemplate& GraspLibrary::at(std::string_view name) const {
  const auto it = grasps.find(std::string(name));
  if (it == grasps.end()) throw ConfigError(fmt::format("unknown grasp '{}'", name));
  return it->second;
}

GraspLibrary parse_grasp_library(std::string_view text) {
  GraspLibrary lib;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.contains("finger")) {
      const auto& f = doc.at("finger");
      lib.finger.mcp_separation = f.value("mcp_separation", lib.finger.mcp_separation);
      lib.finger.proximal_len = f.value("proximal_len", lib.finger.proximal_len);
      lib.finger.distal_len = f.value("distal_len", lib.finger.distal_len);
      lib.finger.fingertip_radius = f.value("fingertip_radius", lib.finger.fingertip_radius);
      lib.finger.validate();
    }
    for (const auto& [name, list] : doc.at("grasps").items()) {
      parse_grasp_type(name);
      GraspTemplate tmpl;
      for (const auto& c : list) {
        ContactPoint cp;
        cp.nominal_z = c.at("z").get<double>();
        cp.nominal_theta = c.at("theta").get<double>();
        cp.is_palm = c.value("palm", false);
        cp.pressure_radius = c.value("pressure_radius", cp.is_palm ? 0.012 : 0.008);
        if (c.contains("q")) {
          const auto q = c.at("q").get<std::vector<double>>();
          if (q.size() != 3) throw ConfigError(fmt::format("grasp '{}': q needs three angles", name));
          cp.nominal_q = {q[0], q[1], q[2]};
        }
        if (!(cp.pressure_radius > 0.0)) throw ConfigError(fmt::format("grasp '{}': bad pressure radius", name));
        tmpl.contacts.push_back(cp);
      }
      const auto fingers = std::count_if(tmpl.contacts.begin(), tmpl.contacts.end(),
                                         [](const ContactPoint& c) { return !c.is_palm; });
      if (fingers != 3 || tmpl.contacts.size() > 4)
        throw ConfigError(fmt::format("grasp '{}' needs three finger contacts and at most one palm", name));
      lib.grasps.emplace(name, std::move(tmpl));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed grasp library: {}", e.what()));
  }
  return lib;
}

GraspLibrary load_grasp_library(const std::filesystem::path& path) { return parse_grasp_library(read_file(path)); }

Eigen::Isometry3d place_finger_base(const FingerGeometry& geom, const JointAnglesd& q, const Eigen::Vector3d& contact,
                                    const Eigen::Vector3d& normal, const Eigen::Vector3d& axis) {
  const auto frames = chain_frames(geom, q, Eigen::Isometry3d::Identity());
  const Eigen::Vector3d flex_axis = frames.axis[1];
  const Eigen::Vector3d pad = frames.tip.orientation.col(2);
  Eigen::Matrix3d local;
  local << flex_axis, pad, flex_axis.cross(pad);
  const Eigen::Vector3d press = -normal;
  Eigen::Matrix3d world;
  world << axis, press, axis.cross(press);

  Eigen::Isometry3d base = Eigen::Isometry3d::Identity();
  base.linear() = world * local.transpose();
  base.translation() = contact - base.linear() * frames.tip.position;
  return base;
}

GraspConfig build_grasp(const CylinderFrame& cylinder, std::vector<ContactPoint> contacts, double friction_mu,
                        const FingerGeometry& geom) {
  cylinder.validate();
  geom.validate();
  if (!(friction_mu > 0.0)) throw ConfigError("friction coefficient must be positive");
  std::stable_partition(contacts.begin(), contacts.end(), [](const ContactPoint& c) { return !c.is_palm; });
  const auto fingers = std::count_if(contacts.begin(), contacts.end(), [](const ContactPoint& c) { return !c.is_palm; });
  if (fingers != 3 || contacts.size() > 4)
    throw ConfigError("grasp needs exactly three finger contacts and at most one palm");

  for (std::size_t i = 0; i < contacts.size(); ++i)
    for (std::size_t j = i + 1; j < contacts.size(); ++j)
      if (!(pressure_separation(cylinder.radius, contacts[i], contacts[j]) > 0.0))
        throw ConfigError(fmt::format("pressure circles of contacts {} and {} overlap", i, j));

  GraspConfig cfg;
  cfg.cylinder = cylinder;
  cfg.friction_mu = friction_mu;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = contacts[i];
    if (!within_limits(geom.limits, c.nominal_q))
      throw ConfigError(fmt::format("finger {} nominal posture violates joint limits", i));
    const auto frame = cylinder.contact_frame(c.nominal_theta);
    const Eigen::Vector3d point = cylinder.surface_point(c.nominal_z, c.nominal_theta);
    PlacedFinger finger;
    finger.geometry = geom;
    finger.base = place_finger_base(geom, c.nominal_q, point, frame.normal, frame.axial);
    try {
      finger.q = inverse_kinematics(geom, point, finger.base);
    } catch (const InfeasibleError& e) {
      throw ConfigError(fmt::format("finger {} cannot reach its contact: {}", i, e.what()));
    }
    finger.jacobian = contact_jacobian(geom, finger.q, finger.base, frame);
    cfg.fingers.push_back(finger);
  }
  cfg.contacts = std::move(contacts);
  return cfg;
}

GraspConfig grasp_from_config(const TaskConfig& task, const GraspLibrary& library) {
  const auto& tmpl = library.at(to_string(task.grasp));
  std::vector<ContactPoint> contacts;
  bool palm_found = false;
  for (const auto& c : tmpl.contacts) {
    if (c.is_palm) {
      palm_found = true;
      if (!task.palm) continue;
    }
    contacts.push_back(c);
  }
  if (task.palm && !palm_found)
    throw ConfigError(fmt::format("task '{}' uses a palm but grasp '{}' defines none", task.name, to_string(task.grasp)));
  CylinderFrame cyl;
  cyl.radius = task.radius;
  return build_grasp(cyl, std::move(contacts), task.friction_mu, library.finger);
}

}  // namespace handreq
