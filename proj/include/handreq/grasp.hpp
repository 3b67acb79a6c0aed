#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "handreq/model.hpp"
#include "handreq/wrench_io.hpp"

namespace handreq {

/// Cylindrical handle. The handle frame is (e1, e2, axis) centred at `origin`;
/// contact angle theta is measured from e1 toward e2.
struct CylinderFrame {
  double radius = 0.015;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();

  void validate() const;
  /// (e1, e2, axis) as columns.
  Eigen::Matrix3d basis() const;
  Eigen::Vector3d surface_point(double z, double theta) const;
  ContactFrame<double> contact_frame(double theta) const;
};

struct ContactPoint {
  double nominal_z = 0.0;      // m along the axis
  double nominal_theta = 0.0;  // rad around the axis
  double pressure_radius = 0.008;
  bool is_palm = false;
  /// Finger posture at the nominal contact; ignored for the palm.
  JointAnglesd nominal_q{0.0, 0.6, 0.9};
};

/// Surface distance between two pressure-circle centres minus both radii.
/// Positive when the circles are disjoint.
double pressure_separation(double radius, const ContactPoint& a, const ContactPoint& b);

struct PlacedFinger {
  FingerGeometry geometry;
  Eigen::Isometry3d base = Eigen::Isometry3d::Identity();
  JointAnglesd q;
  /// Contact Jacobian at the nominal contact, held fixed for the task.
  Eigen::Matrix3d jacobian = Eigen::Matrix3d::Zero();
};

/// Contacts are ordered fingers first (exactly three), then the palm if present.
struct GraspConfig {
  CylinderFrame cylinder;
  std::vector<ContactPoint> contacts;
  double friction_mu = 0.6;
  std::vector<PlacedFinger> fingers;

  std::size_t contact_count() const { return contacts.size(); }
  bool has_palm() const { return contacts.size() == 4; }
};

struct GraspTemplate {
  std::vector<ContactPoint> contacts;  // three fingers plus optionally one palm
};

struct GraspLibrary {
  FingerGeometry finger;
  std::map<std::string, GraspTemplate> grasps;

  const GraspTemplate& at(std::string_view name) const;
};

GraspLibrary parse_grasp_library(std::string_view text);
GraspLibrary load_grasp_library(const std::filesystem::path& path);

/// Base pose that puts the fingertip pad of a finger at posture `q` on the
/// surface point with outward normal `normal`, MCP-X axis along `axis`.
Eigen::Isometry3d place_finger_base(const FingerGeometry& geom, const JointAnglesd& q,
                                    const Eigen::Vector3d& contact, const Eigen::Vector3d& normal,
                                    const Eigen::Vector3d& axis);

/// Validates contacts (3 fingers + optional palm, disjoint pressure circles),
/// places each finger and evaluates its contact Jacobian at the nominal contact.
GraspConfig build_grasp(const CylinderFrame& cylinder, std::vector<ContactPoint> contacts, double friction_mu,
                        const FingerGeometry& geom);

GraspConfig grasp_from_config(const TaskConfig& task, const GraspLibrary& library);

}  // namespace handreq
