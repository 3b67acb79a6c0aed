#include "doctest.h"

#include <random>

#include "handreq/model.hpp"

using namespace handreq;

namespace {

JointAnglesd random_angles(std::mt19937_64& rng, const JointLimits& lim) {
  std::uniform_real_distribution<double> z(lim.mcp_z_min, lim.mcp_z_max);
  std::uniform_real_distribution<double> flex(lim.flexion_min, lim.flexion_max);
  return {z(rng), flex(rng), flex(rng)};
}

Eigen::Isometry3d random_base(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Isometry3d base = Eigen::Isometry3d::Identity();
  base.linear() = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng)).normalized().toRotationMatrix();
  base.translation() = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.05;
  return base;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("straight chain sums the link lengths") {
    const FingerGeometry g;
    const auto tip = forward_kinematics(g, JointAnglesd{0.0, 0.0, 0.0});
    CHECK(tip.position.norm() == doctest::Approx(0.1005).epsilon(1e-12));
    CHECK(tip.position.y() == doctest::Approx(0.1005).epsilon(1e-12));
  }

  TEST_CASE("right-angle MCP-X flexion swings the distal chain off the offset axis") {
    const FingerGeometry g;
    const auto tip = forward_kinematics(g, JointAnglesd{0.0, std::numbers::pi / 2.0, 0.0});
    CHECK(tip.position.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tip.position.y() == doctest::Approx(g.mcp_separation).epsilon(1e-12));
    CHECK(std::abs(tip.position.z()) == doctest::Approx(g.proximal_len + g.distal_len).epsilon(1e-12));
  }

  TEST_CASE("joint limits are enforced") {
    const FingerGeometry g;
    CHECK_THROWS_AS(forward_kinematics(g, JointAnglesd{0.0, -0.1, 0.0}), DomainError);
    CHECK_THROWS_AS(forward_kinematics(g, JointAnglesd{2.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(forward_kinematics(g, JointAnglesd{0.0, 0.0, 2.2}), DomainError);
    FingerGeometry bad;
    bad.distal_len = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("inverse kinematics of the straight fingertip is the zero posture") {
    const FingerGeometry g;
    const auto q = inverse_kinematics(g, Eigen::Vector3d(0.0, 0.1005, 0.0));
    CHECK(std::abs(q.mcp_z) < 1e-9);
    CHECK(std::abs(q.mcp_x) < 1e-6);
    CHECK(std::abs(q.pip) < 1e-6);
  }

  TEST_CASE("targets beyond the reach are reported with their distance") {
    const FingerGeometry g;
    try {
      (void)inverse_kinematics(g, Eigen::Vector3d(0.0, 0.2, 0.0));
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      CHECK(e.distance_to_workspace() > 0.09);
    }
  }

  TEST_CASE("FK of IK matches 100 random reachable targets") {
    const FingerGeometry g;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const auto base = random_base(rng);
      const auto q = random_angles(rng, g.limits);
      const Eigen::Vector3d target = forward_kinematics(g, q, base).position;
      const auto solved = inverse_kinematics(g, target, base);
      CHECK(within_limits(g.limits, solved));
      CHECK((forward_kinematics(g, solved, base).position - target).norm() < 1e-9);
    }
  }

  TEST_CASE("IK chooses the flexed-PIP branch") {
    const FingerGeometry g;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const auto q = random_angles(rng, g.limits);
      CHECK(inverse_kinematics(g, forward_kinematics(g, q).position).pip >= 0.0);
    }
  }

  TEST_CASE("Jacobian columns match central finite differences") {
    const FingerGeometry g;
    std::mt19937_64 rng(3);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
      const auto base = random_base(rng);
      // Stay h away from the limits so the differences remain admissible.
      auto q = random_angles(rng, g.limits);
      q.mcp_x = std::clamp(q.mcp_x, 2 * h, g.limits.flexion_max - 2 * h);
      q.pip = std::clamp(q.pip, 2 * h, g.limits.flexion_max - 2 * h);
      const Eigen::Matrix3d jac = geometric_jacobian(g, q, base);
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d plus = q.vector(), minus = q.vector();
        plus[j] += h;
        minus[j] -= h;
        const Eigen::Vector3d fd = (forward_kinematics(g, JointAnglesd::from_vector(plus), base).position -
                                    forward_kinematics(g, JointAnglesd::from_vector(minus), base).position) /
                                   (2 * h);
        CHECK((jac.col(j) - fd).norm() <= 1e-6 * std::max(fd.norm(), 1e-3));
      }
    }
  }

  TEST_CASE("straight finger lever arms") {
    const FingerGeometry g;
    const ContactFrame<double> frame{Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()};
    const Eigen::Matrix3d jac = contact_jacobian(g, JointAnglesd{0.0, 0.0, 0.0}, Eigen::Isometry3d::Identity(), frame);
    const Eigen::Vector3d tau = jac.transpose() * Eigen::Vector3d(1.0, 0.0, 0.0);
    CHECK(tau[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(tau[1] == doctest::Approx(g.proximal_len + g.distal_len).epsilon(1e-12));
    CHECK(tau[2] == doctest::Approx(g.distal_len).epsilon(1e-12));
  }

  TEST_CASE("1 N at 0.1 m from MCP-X gives 0.1 N m") {
    FingerGeometry g;
    g.proximal_len = 0.06;
    g.distal_len = 0.04;
    const ContactFrame<double> frame{Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()};
    const Eigen::Matrix3d jac = contact_jacobian(g, JointAnglesd{0.0, 0.0, 0.0}, Eigen::Isometry3d::Identity(), frame);
    CHECK((jac.transpose() * Eigen::Vector3d(1.0, 0.0, 0.0))[1] == doctest::Approx(0.1).epsilon(1e-12));
  }

  TEST_CASE("virtual work and zero force") {
    const FingerGeometry g;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto base = random_base(rng);
      const auto q = random_angles(rng, g.limits);
      const Eigen::Vector3d nrm = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
      const Eigen::Vector3d ax = nrm.unitOrthogonal();
      const ContactFrame<double> frame{nrm, ax, nrm.cross(ax)};
      const Eigen::Matrix3d jac = contact_jacobian(g, q, base, frame);
      const Eigen::Vector3d f(n(rng), n(rng), n(rng)), qd(n(rng), n(rng), n(rng));
      CHECK(f.dot(jac * qd) == doctest::Approx((jac.transpose() * f).dot(qd)).epsilon(1e-12));
      CHECK((jac.transpose() * Eigen::Vector3d::Zero()).norm() == 0.0);
    }
  }
}
