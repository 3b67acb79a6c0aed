#include "handreq/grasp_optim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "handreq/interior_point.hpp"
#include "handreq/error.hpp"

namespace handreq {
namespace {

constexpr int kVarsPerContact = 5;
enum Slot { kNormal = 0, kTangential = 1, kAxial = 2, kU = 3, kV = 4 };

// Contact contribution to the handle wrench, cylinder frame.
Vector6d contribution(double radius, const ContactVariables& v) {
  const double c = std::cos(v.theta), s = std::sin(v.theta);
  const double fx = v.normal * c - v.tangential * s;
  const double fy = v.normal * s + v.tangential * c;
  Vector6d w;
  w << fx, fy, v.axial, -v.z * fy + radius * s * v.axial, v.z * fx - radius * c * v.axial, radius * v.tangential;
  return w;
}

// Projection onto {|(t, a)| <= mu n}.
void project_cone(double mu, double& n, double& t, double& a) {
  const double s = std::hypot(t, a);
  if (s <= mu * n) return;
  if (mu * s <= -n) {
    n = t = a = 0.0;
    return;
  }
  const double scale = (n + mu * s) / (1.0 + mu * mu);
  n = scale;
  if (s > 0.0) {
    t *= mu * scale / s;
    a *= mu * scale / s;
  }
}

// Scaled problem. Forces are divided by `force_scale`, torque equations by
// `force_scale * moment_arm`, torques in the objective by `force_scale *
// reach`. Contact positions live in the unit disc: z = zbar + r u,
// theta = thetabar + (r / R) v.
class GraspProblem {
 public:
  GraspProblem(const GraspConfig& cfg, const Wrench& w, double force_scale, const SolverOptions& opt)
      : cfg_(cfg), scale_(force_scale), opt_(opt), contacts_(static_cast<int>(cfg.contacts.size())) {
    arm_ = cfg.cylinder.radius;
    for (const auto& c : cfg.contacts) arm_ = std::max(arm_, std::abs(c.nominal_z) + c.pressure_radius);
    reach_ = cfg.fingers.front().geometry.reach();
    target_ << w.force / scale_, w.torque / (scale_ * arm_);
  }

  Eigen::Index dimension() const { return kVarsPerContact * contacts_; }
  Eigen::Index equality_count() const { return 6; }
  double force_scale() const { return scale_; }
  double moment_arm() const { return arm_; }

  ContactVariables physical(const Eigen::VectorXd& x, int i) const {
    const auto& c = cfg_.contacts[static_cast<std::size_t>(i)];
    const auto b = kVarsPerContact * i;
    return {scale_ * x[b + kNormal], scale_ * x[b + kTangential], scale_ * x[b + kAxial],
            c.nominal_z + c.pressure_radius * x[b + kU],
            c.nominal_theta + c.pressure_radius / cfg_.cylinder.radius * x[b + kV]};
  }

  Eigen::VectorXd scaled(std::span<const ContactVariables> vars) const {
    Eigen::VectorXd x(dimension());
    for (int i = 0; i < contacts_; ++i) {
      const auto& c = cfg_.contacts[static_cast<std::size_t>(i)];
      const auto& v = vars[static_cast<std::size_t>(i)];
      const auto b = kVarsPerContact * i;
      x[b + kNormal] = v.normal / scale_;
      x[b + kTangential] = v.tangential / scale_;
      x[b + kAxial] = v.axial / scale_;
      x[b + kU] = (v.z - c.nominal_z) / c.pressure_radius;
      x[b + kV] = (v.theta - c.nominal_theta) * cfg_.cylinder.radius / c.pressure_radius;
    }
    return x;
  }

  double objective(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    grad.setZero(dimension());
    double f = 0.0;
    for (int i = 0; i < contacts_; ++i) {
      const auto b = kVarsPerContact * i;
      for (int k : {kNormal, kTangential, kAxial}) {
        f += opt_.regularization * x[b + k] * x[b + k];
        grad[b + k] += 2.0 * opt_.regularization * x[b + k];
      }
    }
    for (int i = 0; i < 3; ++i) {
      const auto b = kVarsPerContact * i;
      const Eigen::Matrix3d& jac = cfg_.fingers[static_cast<std::size_t>(i)].jacobian;
      const Eigen::Vector3d force(x[b + kNormal], x[b + kAxial], x[b + kTangential]);
      const Eigen::Vector3d tau = jac.transpose() * force / reach_;
      f += tau.array().pow(4).sum();
      const Eigen::Vector3d dforce = jac * (4.0 * tau.array().cube()).matrix() / reach_;
      grad[b + kNormal] += dforce[0];
      grad[b + kAxial] += dforce[1];
      grad[b + kTangential] += dforce[2];
    }
    return f;
  }

  void equalities(const Eigen::VectorXd& x, Eigen::VectorXd& h, Eigen::MatrixXd& jac) const {
    h = target_;
    jac.setZero(6, dimension());
    const double radius = cfg_.cylinder.radius;
    for (int i = 0; i < contacts_; ++i) {
      const auto& c = cfg_.contacts[static_cast<std::size_t>(i)];
      const auto b = kVarsPerContact * i;
      const double n = x[b + kNormal], t = x[b + kTangential], a = x[b + kAxial];
      const double z = c.nominal_z + c.pressure_radius * x[b + kU];
      const double th = c.nominal_theta + c.pressure_radius / radius * x[b + kV];
      const double cs = std::cos(th), sn = std::sin(th);
      const double fx = n * cs - t * sn, fy = n * sn + t * cs;
      const double inv_arm = 1.0 / arm_;

      h[0] -= fx;
      h[1] -= fy;
      h[2] -= a;
      h[3] -= (-z * fy + radius * sn * a) * inv_arm;
      h[4] -= (z * fx - radius * cs * a) * inv_arm;
      h[5] -= radius * t * inv_arm;

      // Partial derivatives of the contribution; h = target - contribution.
      Eigen::Matrix<double, 6, 5> d;
      d.col(kNormal) << cs, sn, 0.0, -z * sn * inv_arm, z * cs * inv_arm, 0.0;
      d.col(kTangential) << -sn, cs, 0.0, -z * cs * inv_arm, -z * sn * inv_arm, radius * inv_arm;
      d.col(kAxial) << 0.0, 0.0, 1.0, radius * sn * inv_arm, -radius * cs * inv_arm, 0.0;
      d.col(kU) << 0.0, 0.0, 0.0, -fy * inv_arm, fx * inv_arm, 0.0;
      d.col(kU) *= c.pressure_radius;
      const double dfx = -n * sn - t * cs, dfy = n * cs - t * sn;
      d.col(kV) << dfx, dfy, 0.0, (-z * dfy + radius * cs * a) * inv_arm, (z * dfx + radius * sn * a) * inv_arm, 0.0;
      d.col(kV) *= c.pressure_radius / radius;
      jac.middleCols(b, kVarsPerContact) = -d;
    }
  }

  void project(Eigen::VectorXd& x) const {
    for (int i = 0; i < contacts_; ++i) {
      const auto b = kVarsPerContact * i;
      if (opt_.frozen & kFreezeTangential) x[b + kTangential] = 0.0;
      if (opt_.frozen & kFreezeAxial) x[b + kAxial] = 0.0;
      project_cone(cfg_.friction_mu, x[b + kNormal], x[b + kTangential], x[b + kAxial]);
      if (opt_.frozen & kFreezePositions) {
        x[b + kU] = x[b + kV] = 0.0;
      } else {
        const double r = std::hypot(x[b + kU], x[b + kV]);
        if (r > 1.0) {
          x[b + kU] /= r;
          x[b + kV] /= r;
        }
      }
    }
  }

  // Barrier-solver interface over the free coordinates only. Frozen entries
  // keep the value they have in `base_`.
  void set_base(const Eigen::VectorXd& full) {
    base_ = full;
    free_.clear();
    for (int i = 0; i < contacts_; ++i)
      for (int k = 0; k < kVarsPerContact; ++k)
        if (slot_free(k)) free_.push_back(kVarsPerContact * i + k);
  }
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd full = base_;
    for (std::size_t j = 0; j < free_.size(); ++j) full[free_[j]] = reduced[static_cast<Eigen::Index>(j)];
    return full;
  }
  Eigen::VectorXd reduce(const Eigen::VectorXd& full) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t j = 0; j < free_.size(); ++j) r[static_cast<Eigen::Index>(j)] = full[free_[j]];
    return r;
  }
  Eigen::Index free_dimension() const { return static_cast<Eigen::Index>(free_.size()); }
  Eigen::Index inequality_count() const { return contacts_ * ((opt_.frozen & kFreezePositions) ? 1 : 2); }

  // Friction cone as mu^2 n^2 - t^2 - a^2 >= 0 on n > 0, whose log is the
  // usual self-concordant cone barrier; pressure disc as 1 - u^2 - v^2 >= 0.
  void inequalities_full(const Eigen::VectorXd& x, Eigen::VectorXd& c, Eigen::MatrixXd& jac) const {
    const bool disc = !(opt_.frozen & kFreezePositions);
    const int per = disc ? 2 : 1;
    const double mu = cfg_.friction_mu;
    c.resize(inequality_count());
    jac.setZero(inequality_count(), dimension());
    for (int i = 0; i < contacts_; ++i) {
      const auto b = kVarsPerContact * i;
      const double n = x[b + kNormal], t = x[b + kTangential], a = x[b + kAxial];
      const double q = t * t + a * a;
      const auto r = per * i;
      // The mirrored cone n < 0 also satisfies mu^2 n^2 >= q; report it as
      // violated so line searches never step onto it.
      c[r] = n > 0.0 ? mu * mu * n * n - q : -1.0;
      jac(r, b + kNormal) = 2.0 * mu * mu * n;
      jac(r, b + kTangential) = -2.0 * t;
      jac(r, b + kAxial) = -2.0 * a;
      if (disc) {
        const double u = x[b + kU], v = x[b + kV];
        c[r + 1] = 1.0 - u * u - v * v;
        jac(r + 1, b + kU) = -2.0 * u;
        jac(r + 1, b + kV) = -2.0 * v;
      }
    }
  }

  /// Hessian of f - y'h - z'c in the full coordinates. Block diagonal per contact.
  void hessian_full(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                    Eigen::MatrixXd& hess) const {
    hess.setZero(dimension(), dimension());
    const double radius = cfg_.cylinder.radius;
    const bool disc = !(opt_.frozen & kFreezePositions);
    const int per = disc ? 2 : 1;
    const double mu = cfg_.friction_mu;
    for (int i = 0; i < contacts_; ++i) {
      const auto& cp = cfg_.contacts[static_cast<std::size_t>(i)];
      const auto b = kVarsPerContact * i;
      auto blk = hess.block<kVarsPerContact, kVarsPerContact>(b, b);
      for (int k : {kNormal, kTangential, kAxial}) blk(k, k) += 2.0 * opt_.regularization;
      if (i < 3) {
        const Eigen::Matrix3d& jac = cfg_.fingers[static_cast<std::size_t>(i)].jacobian;
        const Eigen::Vector3d force(x[b + kNormal], x[b + kAxial], x[b + kTangential]);
        const Eigen::Vector3d tau = jac.transpose() * force / reach_;
        const Eigen::Matrix3d hf = jac * (12.0 * tau.array().square()).matrix().asDiagonal() * jac.transpose() /
                                   (reach_ * reach_);
        const int map[3] = {kNormal, kAxial, kTangential};
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) blk(map[p], map[q]) += hf(p, q);
      }

      // y' * contribution'' in (n, t, a, z, theta), then scaled to (u, v).
      const double n = x[b + kNormal], t = x[b + kTangential], a = x[b + kAxial];
      const double zz = cp.nominal_z + cp.pressure_radius * x[b + kU];
      const double th = cp.nominal_theta + cp.pressure_radius / radius * x[b + kV];
      const double cs = std::cos(th), sn = std::sin(th);
      const double fx = n * cs - t * sn, fy = n * sn + t * cs;
      const double y3 = y[3] / arm_, y4 = y[4] / arm_;
      Eigen::Matrix<double, 5, 5> e = Eigen::Matrix<double, 5, 5>::Zero();
      constexpr int Z = kU, T = kV;
      e(kNormal, T) = -y[0] * sn + y[1] * cs - y3 * zz * cs - y4 * zz * sn;
      e(kTangential, T) = -y[0] * cs - y[1] * sn + y3 * zz * sn - y4 * zz * cs;
      e(kAxial, T) = y3 * radius * cs + y4 * radius * sn;
      e(T, T) = -y[0] * fx - y[1] * fy + y3 * (zz * fy - radius * sn * a) + y4 * (-zz * fx + radius * cs * a);
      e(Z, kNormal) = -y3 * sn + y4 * cs;
      e(Z, kTangential) = -y3 * cs - y4 * sn;
      e(Z, T) = -y3 * fx - y4 * fy;
      for (int p = 0; p < 5; ++p)
        for (int q = p + 1; q < 5; ++q) {
          const double off = e(p, q) + e(q, p);
          e(p, q) = e(q, p) = off;
        }
      Eigen::Matrix<double, 5, 1> sc;
      sc << 1.0, 1.0, 1.0, cp.pressure_radius, cp.pressure_radius / radius;
      blk += sc.asDiagonal() * e * sc.asDiagonal();

      const auto r = per * i;
      blk(kNormal, kNormal) -= z[r] * 2.0 * mu * mu;
      blk(kTangential, kTangential) += z[r] * 2.0;
      blk(kAxial, kAxial) += z[r] * 2.0;
      if (disc) {
        blk(kU, kU) += z[r + 1] * 2.0;
        blk(kV, kV) += z[r + 1] * 2.0;
      }
    }
  }

  // Reduced-coordinate callbacks used by the interior-point solver.
  struct Reduced {
    const GraspProblem& p;
    Eigen::Index dimension() const { return p.free_dimension(); }
    Eigen::Index equality_count() const { return 6; }
    Eigen::Index inequality_count() const { return p.inequality_count(); }
    double objective(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
      Eigen::VectorXd full(p.dimension());
      const double f = p.objective(p.expand(x), full);
      g = p.reduce(full);
      return f;
    }
    void equalities(const Eigen::VectorXd& x, Eigen::VectorXd& h, Eigen::MatrixXd& jac) const {
      Eigen::MatrixXd full;
      p.equalities(p.expand(x), h, full);
      jac = p.reduce_cols(full);
    }
    void inequalities(const Eigen::VectorXd& x, Eigen::VectorXd& c, Eigen::MatrixXd& jac) const {
      Eigen::MatrixXd full;
      p.inequalities_full(p.expand(x), c, full);
      jac = p.reduce_cols(full);
    }
    void lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z,
                            Eigen::MatrixXd& hess) const {
      Eigen::MatrixXd full;
      p.hessian_full(p.expand(x), y, z, full);
      hess.resize(p.free_dimension(), p.free_dimension());
      for (Eigen::Index r = 0; r < hess.rows(); ++r)
        for (Eigen::Index c = 0; c < hess.cols(); ++c)
          hess(r, c) = full(p.free_[static_cast<std::size_t>(r)], p.free_[static_cast<std::size_t>(c)]);
    }
  };
  Reduced reduced() const { return {*this}; }

  Eigen::MatrixXd reduce_cols(const Eigen::MatrixXd& full) const {
    Eigen::MatrixXd out(full.rows(), free_dimension());
    for (std::size_t j = 0; j < free_.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = full.col(free_[j]);
    return out;
  }

  bool slot_free(int slot) const {
    if (slot == kU || slot == kV) return !(opt_.frozen & kFreezePositions);
    return force_slot_free(slot);
  }

  /// Pulls a projected point strictly inside the cones and discs.
  void make_interior(Eigen::VectorXd& x) const {
    project(x);
    const double mu = cfg_.friction_mu;
    for (int i = 0; i < contacts_; ++i) {
      const auto b = kVarsPerContact * i;
      double& n = x[b + kNormal];
      n = std::max(n, 1e-3);
      const double lateral = std::hypot(x[b + kTangential], x[b + kAxial]);
      if (lateral > 0.9 * mu * n) {
        x[b + kTangential] *= 0.9 * mu * n / lateral;
        x[b + kAxial] *= 0.9 * mu * n / lateral;
      }
      const double r = std::hypot(x[b + kU], x[b + kV]);
      if (r > 0.95) {
        x[b + kU] *= 0.95 / r;
        x[b + kV] *= 0.95 / r;
      }
    }
  }

  bool force_slot_free(int slot) const {
    if (slot == kTangential) return !(opt_.frozen & kFreezeTangential);
    if (slot == kAxial) return !(opt_.frozen & kFreezeAxial);
    return slot == kNormal;
  }

  /// Least-squares correction of the free force components at fixed positions,
  /// alternated with the cone projection.
  void polish(Eigen::VectorXd& x) const {
    std::vector<Eigen::Index> free;
    for (int i = 0; i < contacts_; ++i)
      for (int k : {kNormal, kTangential, kAxial})
        if (force_slot_free(k)) free.push_back(kVarsPerContact * i + k);
    Eigen::VectorXd h(6);
    Eigen::MatrixXd jac(6, dimension());
    equalities(x, h, jac);
    Eigen::MatrixXd a(6, static_cast<Eigen::Index>(free.size()));
    for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) = -jac.col(free[static_cast<std::size_t>(j)]);
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    for (int it = 0; it < 50 && h.lpNorm<Eigen::Infinity>() > 1e-14; ++it) {
      const Eigen::VectorXd step = cod.solve(h);
      for (Eigen::Index j = 0; j < step.size(); ++j) x[free[static_cast<std::size_t>(j)]] += step[j];
      project(x);
      equalities(x, h, jac);
    }
  }

  double physical_residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h(6);
    Eigen::MatrixXd jac(6, dimension());
    equalities(x, h, jac);
    return std::max(scale_ * h.head<3>().lpNorm<Eigen::Infinity>(),
                    scale_ * arm_ * h.tail<3>().lpNorm<Eigen::Infinity>());
  }

  /// Minimum-norm forces balancing the wrench at nominal positions.
  Eigen::VectorXd nominal_start() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension());
    polish(x);
    return x;
  }

 private:
  const GraspConfig& cfg_;
  double scale_;
  const SolverOptions& opt_;
  int contacts_;
  double arm_ = 0.0;
  double reach_ = 0.0;
  Vector6d target_;
  Eigen::VectorXd base_;
  std::vector<Eigen::Index> free_;
};

struct Candidate {
  Eigen::VectorXd x;
  double merit = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  double kkt = 0.0;
  double force_norm = 0.0;
};

double scaled_force_norm(const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index b = 0; b < x.size(); b += kVarsPerContact)
    s += x[b + kNormal] * x[b + kNormal] + x[b + kTangential] * x[b + kTangential] + x[b + kAxial] * x[b + kAxial];
  return std::sqrt(s);
}

}  // namespace

double ContactSolution::force_norm() const {
  double s = 0.0;
  for (const auto& c : contacts) s += c.normal * c.normal + c.tangential * c.tangential + c.axial * c.axial;
  return std::sqrt(s);
}

std::vector<ContactVariables> nominal_variables(const GraspConfig& config) {
  std::vector<ContactVariables> out;
  for (const auto& c : config.contacts) out.push_back({0.0, 0.0, 0.0, c.nominal_z, c.nominal_theta});
  return out;
}

Vector6d equilibrium_residual(const Wrench& wrench, const GraspConfig& config,
                              std::span<const ContactVariables> candidate) {
  if (candidate.size() != config.contacts.size())
    throw DomainError(fmt::format("expected {} contact tuples, got {}", config.contacts.size(), candidate.size()));
  Vector6d r = wrench.stacked();
  for (const auto& v : candidate) r -= contribution(config.cylinder.radius, v);
  return r;
}

double ConstraintViolation::max() const { return std::max({equilibrium, cone, pressure, normal}); }

ConstraintViolation constraint_violation(const Wrench& wrench, const GraspConfig& config,
                                         std::span<const ContactVariables> candidate) {
  ConstraintViolation v;
  v.equilibrium = equilibrium_residual(wrench, config, candidate).lpNorm<Eigen::Infinity>();
  const double radius = config.cylinder.radius;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const auto& c = candidate[i];
    const auto& p = config.contacts[i];
    v.cone = std::max(v.cone, std::hypot(c.tangential, c.axial) - config.friction_mu * c.normal);
    const double dz = c.z - p.nominal_z, arc = radius * (c.theta - p.nominal_theta);
    v.pressure = std::max(v.pressure, dz * dz + arc * arc - p.pressure_radius * p.pressure_radius);
    v.normal = std::max(v.normal, -c.normal);
  }
  return v;
}

Eigen::Vector3d finger_torque(const GraspConfig& config, std::size_t finger, const ContactVariables& v) {
  return config.fingers.at(finger).jacobian.transpose() * Eigen::Vector3d(v.normal, v.axial, v.tangential);
}

double torque_objective(const GraspConfig& config, std::span<const ContactVariables> candidate) {
  double f = 0.0;
  for (std::size_t i = 0; i < 3; ++i) f += finger_torque(config, i, candidate[i]).array().pow(4).sum();
  return f;
}

ContactSolution solve_timestep(const Wrench& wrench, const GraspConfig& config, const SolverOptions& options,
                               const ContactSolution* warm_start) {
  if (config.fingers.size() != 3 || config.contacts.size() < 3)
    throw ConfigError("grasp configuration must carry three placed fingers");
  if (!wrench.finite()) throw DomainError("wrench has non-finite components");

  ContactSolution sol;
  const double force_scale = std::max(wrench.force.norm(), wrench.torque.norm() / config.cylinder.radius);
  if (force_scale == 0.0) {
    sol.contacts = nominal_variables(config);
    sol.finger_torques.assign(3, Eigen::Vector3d::Zero());
    sol.feasible = true;
    return sol;
  }

  GraspProblem problem(config, wrench, force_scale, options);
  problem.set_base(Eigen::VectorXd::Zero(problem.dimension()));
  optim::InteriorPointOptions ipm;
  ipm.max_iterations = options.max_iterations;
  ipm.tolerance = options.optimality_tolerance;

  std::vector<Eigen::VectorXd> starts;
  if (warm_start && warm_start->contacts.size() == config.contacts.size()) {
    Eigen::VectorXd x = problem.scaled(warm_start->contacts);
    problem.project(x);
    starts.push_back(std::move(x));
  }
  const Eigen::VectorXd nominal = problem.nominal_start();
  starts.push_back(nominal);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.5);
  for (int r = 1; r < options.restarts; ++r) {
    Eigen::VectorXd x = nominal;
    for (Eigen::Index b = 0; b < x.size(); b += kVarsPerContact) {
      for (int k : {kNormal, kTangential, kAxial}) x[b + k] += gauss(rng);
      const double rad = std::sqrt(unit(rng));
      const double ang = 2.0 * std::numbers::pi * unit(rng);
      x[b + kU] = rad * std::cos(ang);
      x[b + kV] = rad * std::sin(ang);
    }
    problem.project(x);
    problem.polish(x);
    starts.push_back(std::move(x));
  }

  Candidate best;
  bool best_feasible = false;
  for (auto& start : starts) {
    problem.make_interior(start);
    auto rep = optim::interior_point_minimize(problem.reduced(), problem.reduce(start), ipm);
    rep.x = problem.expand(rep.x);
    problem.project(rep.x);
    problem.polish(rep.x);
    Candidate cand;
    Eigen::VectorXd grad(problem.dimension());
    cand.merit = problem.objective(rep.x, grad);
    cand.residual = problem.physical_residual(rep.x);
    cand.kkt = rep.kkt_error;
    cand.force_norm = scaled_force_norm(rep.x);
    cand.x = std::move(rep.x);
    const bool feasible = cand.residual <= options.equilibrium_tolerance;

    bool take = false;
    if (feasible != best_feasible) {
      take = feasible;
    } else if (!feasible) {
      take = cand.residual < best.residual;
    } else {
      const double tie = 1e-12 * std::max(1e-300, std::abs(best.merit));
      take = cand.merit < best.merit - tie ||
             (std::abs(cand.merit - best.merit) <= tie && cand.force_norm < best.force_norm);
    }
    if (take || best.x.size() == 0) {
      best = std::move(cand);
      best_feasible = feasible;
    }
  }

  for (int i = 0; i < static_cast<int>(config.contacts.size()); ++i) sol.contacts.push_back(problem.physical(best.x, i));
  for (std::size_t i = 0; i < 3; ++i) sol.finger_torques.push_back(finger_torque(config, i, sol.contacts[i]));
  sol.objective_value = torque_objective(config, sol.contacts);
  sol.feasible = best_feasible;
  sol.kkt_residual = best.kkt;
  const auto violation = constraint_violation(wrench, config, sol.contacts);
  sol.equilibrium_residual = violation.equilibrium;
  sol.max_violation = violation.max();
  return sol;
}

double TorqueRequirements::peak(Joint j) const {
  switch (j) {
    case Joint::MCP_Z: return peak_mcp_z;
    case Joint::MCP_X: return peak_mcp_x;
    case Joint::PIP: return peak_pip;
  }
  return 0.0;
}

void TorqueRequirements::recompute_peaks() {
  std::vector<bool> skip(timesteps, false);
  for (auto k : infeasible_steps) skip.at(k) = true;
  std::array<double, 3> peaks{0.0, 0.0, 0.0};
  for (const auto& tr : trajectories)
    for (std::size_t k = 0; k < tr.values.size(); ++k)
      if (!skip[k]) {
        auto& p = peaks[static_cast<std::size_t>(tr.joint)];
        p = std::max(p, std::abs(tr.values[k]));
      }
  peak_mcp_z = peaks[0];
  peak_mcp_x = peaks[1];
  peak_pip = peaks[2];
}

TorqueRequirements solve_trajectory(const WrenchTrajectory& traj, const GraspConfig& config,
                                    const SolverOptions& options, std::vector<ContactSolution>* solutions) {
  TorqueRequirements req;
  req.timesteps = traj.size();
  for (int f = 0; f < 3; ++f)
    for (auto j : kJoints) req.trajectories.push_back({traj.sample_rate, j, f, std::vector<double>(traj.size(), 0.0)});
  if (solutions) solutions->clear();

  std::optional<ContactSolution> previous;
  Eigen::Vector3d held[3] = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const ContactSolution* warm = options.warm_start && previous ? &*previous : nullptr;
    auto sol = solve_timestep(traj.samples[k], config, options, warm);
    if (sol.feasible) {
      for (int f = 0; f < 3; ++f) held[f] = sol.finger_torques[static_cast<std::size_t>(f)];
      req.max_equilibrium_residual = std::max(req.max_equilibrium_residual, sol.equilibrium_residual);
      previous = sol;
    } else {
      req.infeasible_steps.push_back(k);
    }
    for (int f = 0; f < 3; ++f)
      for (int j = 0; j < 3; ++j) req.trajectories[static_cast<std::size_t>(3 * f + j)].values[k] = held[f][j];
    if (solutions) solutions->push_back(std::move(sol));
  }
  req.recompute_peaks();
  req.infeasible_warning = traj.size() > 0 && static_cast<double>(req.infeasible_steps.size()) >
                                                  options.infeasible_warning_fraction * static_cast<double>(traj.size());
  return req;
}

}  // namespace handreq
