#pragma once

// Serial 3-DOF finger: base -> MCP-Z (about base z) -> mcp_separation along y
// -> MCP-X (about local x) -> proximal link along y -> PIP (about local x)
// -> distal link along y. Positive flexion curls the finger toward local +z,
// so the fingertip pad faces the distal frame's +z axis.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>

#include "handreq/error.hpp"

namespace handreq {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Isometry3 = Eigen::Transform<Scalar, 3, Eigen::Isometry>;

struct JointLimits {
  double mcp_z_min = -std::numbers::pi / 2.0;
  double mcp_z_max = std::numbers::pi / 2.0;
  double flexion_min = 0.0;
  double flexion_max = 2.0 * std::numbers::pi / 3.0;
};

struct FingerGeometry {
  double mcp_separation = 0.022;
  double proximal_len = 0.045;
  double distal_len = 0.0335;
  double fingertip_radius = 0.008;
  JointLimits limits{};

  double reach() const noexcept { return mcp_separation + proximal_len + distal_len; }

  void validate() const {
    if (!(mcp_separation > 0.0 && proximal_len > 0.0 && distal_len > 0.0 && fingertip_radius > 0.0))
      throw DomainError("finger lengths must be strictly positive");
  }
};

template <typename Scalar>
struct JointAngles {
  Scalar mcp_z{0};
  Scalar mcp_x{0};
  Scalar pip{0};

  Vector3<Scalar> vector() const { return {mcp_z, mcp_x, pip}; }
  static JointAngles from_vector(const Vector3<Scalar>& v) { return {v[0], v[1], v[2]}; }
};

using JointAnglesd = JointAngles<double>;

template <typename Scalar>
bool within_limits(const JointLimits& lim, const JointAngles<Scalar>& q, double slack = 1e-12) {
  auto inside = [slack](double v, double lo, double hi) { return v >= lo - slack && v <= hi + slack; };
  return inside(static_cast<double>(q.mcp_z), lim.mcp_z_min, lim.mcp_z_max) &&
         inside(static_cast<double>(q.mcp_x), lim.flexion_min, lim.flexion_max) &&
         inside(static_cast<double>(q.pip), lim.flexion_min, lim.flexion_max);
}

template <typename Scalar>
struct FingertipPose {
  Vector3<Scalar> position;
  /// Columns: PIP axis, distal link direction, pad normal.
  Matrix3<Scalar> orientation;
};

/// World-frame joint axes and origins along the chain, plus the fingertip.
template <typename Scalar>
struct ChainFrames {
  std::array<Vector3<Scalar>, 3> axis;
  std::array<Vector3<Scalar>, 3> origin;
  FingertipPose<Scalar> tip;
};

template <typename Scalar>
ChainFrames<Scalar> chain_frames(const FingerGeometry& geom, const JointAngles<Scalar>& q,
                                 const Isometry3<Scalar>& base) {
  using AngleAxis = Eigen::AngleAxis<Scalar>;
  const Vector3<Scalar> ex = Vector3<Scalar>::UnitX();
  const Vector3<Scalar> ey = Vector3<Scalar>::UnitY();
  const Vector3<Scalar> ez = Vector3<Scalar>::UnitZ();

  ChainFrames<Scalar> out;
  Matrix3<Scalar> rot = base.linear();
  Vector3<Scalar> pos = base.translation();

  out.axis[0] = rot * ez;
  out.origin[0] = pos;
  rot = rot * AngleAxis(q.mcp_z, ez).toRotationMatrix();
  pos += rot * (ey * Scalar(geom.mcp_separation));

  out.axis[1] = rot * ex;
  out.origin[1] = pos;
  rot = rot * AngleAxis(q.mcp_x, ex).toRotationMatrix();
  pos += rot * (ey * Scalar(geom.proximal_len));

  out.axis[2] = rot * ex;
  out.origin[2] = pos;
  rot = rot * AngleAxis(q.pip, ex).toRotationMatrix();
  pos += rot * (ey * Scalar(geom.distal_len));

  out.tip = {pos, rot};
  return out;
}

/// Fingertip center-of-pressure pose in world coordinates.
template <typename Scalar>
FingertipPose<Scalar> forward_kinematics(const FingerGeometry& geom, const JointAngles<Scalar>& q,
                                         const Isometry3<Scalar>& base = Isometry3<Scalar>::Identity()) {
  if (!within_limits(geom.limits, q)) throw DomainError("joint angles outside configured limits");
  return chain_frames(geom, q, base).tip;
}

/// 3x3 positional Jacobian dp_tip/dq (columns MCP-Z, MCP-X, PIP).
template <typename Scalar>
Matrix3<Scalar> geometric_jacobian(const FingerGeometry& geom, const JointAngles<Scalar>& q,
                                   const Isometry3<Scalar>& base = Isometry3<Scalar>::Identity()) {
  const auto frames = chain_frames(geom, q, base);
  Matrix3<Scalar> jac;
  for (int j = 0; j < 3; ++j) jac.col(j) = frames.axis[j].cross(frames.tip.position - frames.origin[j]);
  return jac;
}

/// Orthonormal contact frame on the cylinder surface. Columns of `rotation()`
/// are ordered to match the force vector (N, f_z, f_theta).
template <typename Scalar>
struct ContactFrame {
  Vector3<Scalar> normal;
  Vector3<Scalar> axial;
  Vector3<Scalar> tangential;

  Matrix3<Scalar> rotation() const {
    Matrix3<Scalar> r;
    r << normal, axial, tangential;
    return r;
  }
};

/// J such that J^T [N; f_z; f_theta] = [tau_MCP-Z; tau_MCP-X; tau_PIP].
/// Contact moments are not transmitted.
template <typename Scalar>
Matrix3<Scalar> contact_jacobian(const FingerGeometry& geom, const JointAngles<Scalar>& q,
                                 const Isometry3<Scalar>& base, const ContactFrame<Scalar>& frame) {
  return frame.rotation().transpose() * geometric_jacobian(geom, q, base);
}

/// Elbow-up (PIP flexion >= 0) solution placing the fingertip at `target`.
/// Throws InfeasibleError when the target is outside the reachable workspace
/// or needs angles outside the joint limits.
JointAnglesd inverse_kinematics(const FingerGeometry& geom, const Eigen::Vector3d& target,
                                const Eigen::Isometry3d& base = Eigen::Isometry3d::Identity());

}  // namespace handreq
