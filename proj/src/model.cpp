#include "handreq/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <optional>

namespace handreq {
namespace {

struct PlanarSolution {
  double shoulder;
  double elbow;
};

// Two-link planar IK with elbow >= 0. Returns the signed distance outside the
// annulus |L1-L2| <= r <= L1+L2 when the point is unreachable.
std::optional<PlanarSolution> planar_ik(double l1, double l2, double u, double h, double& miss) {
  const double r = std::hypot(u, h);
  const double c2 = (r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  constexpr double kSlack = 1e-12;
  miss = 0.0;
  if (c2 > 1.0 + kSlack) {
    miss = r - (l1 + l2);
    return std::nullopt;
  }
  if (c2 < -1.0 - kSlack) {
    miss = std::abs(l1 - l2) - r;
    return std::nullopt;
  }
  const double elbow = std::acos(std::clamp(c2, -1.0, 1.0));
  const double shoulder = std::atan2(h, u) - std::atan2(l2 * std::sin(elbow), l1 + l2 * std::cos(elbow));
  return PlanarSolution{shoulder, elbow};
}

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace

JointAnglesd inverse_kinematics(const FingerGeometry& geom, const Eigen::Vector3d& target,
                                const Eigen::Isometry3d& base) {
  geom.validate();
  const Eigen::Vector3d p = base.inverse() * target;
  const double rho = std::hypot(p.x(), p.y());
  const double yaw = rho > 1e-15 ? std::atan2(-p.x(), p.y()) : 0.0;

  double best_miss = std::numeric_limits<double>::infinity();
  // Facing the target first, then the flipped yaw with the chain folded back.
  for (const double sign : {1.0, -1.0}) {
    const double mcp_z = sign > 0 ? yaw : wrap_angle(yaw + std::numbers::pi);
    const double u = sign * rho - geom.mcp_separation;
    double miss = 0.0;
    const auto planar = planar_ik(geom.proximal_len, geom.distal_len, u, p.z(), miss);
    if (!planar) {
      best_miss = std::min(best_miss, miss);
      continue;
    }
    const JointAnglesd q{mcp_z, planar->shoulder, planar->elbow};
    if (within_limits(geom.limits, q, 1e-12)) {
      return {std::clamp(q.mcp_z, geom.limits.mcp_z_min, geom.limits.mcp_z_max),
              std::clamp(q.mcp_x, geom.limits.flexion_min, geom.limits.flexion_max),
              std::clamp(q.pip, geom.limits.flexion_min, geom.limits.flexion_max)};
    }
    best_miss = std::min(best_miss, 0.0);
  }
  if (best_miss > 0.0)
    throw InfeasibleError(fmt::format("target unreachable: {:.6g} m outside the finger workspace", best_miss),
                          best_miss);
  throw InfeasibleError("target reachable only outside the configured joint limits", 0.0);
}

}  // namespace handreq
