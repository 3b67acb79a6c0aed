#pragma once

// Dense primal-dual barrier method for
//
//   min f(x)  s.t.  h(x) = 0,  c(x) >= 0
//
// Iterates stay strictly inside c(x) > 0, so the caller must supply such a
// start. Each iteration takes a Newton step on the barrier KKT system
//
//   grad f - Ah'y - Ac'z = 0,  h = 0,  z_i c_i = mu
//
// with the inequality multipliers eliminated. Curvature is regularised until
// the Hessian is positive definite on the null space of Ah, and further while
// the primal step exceeds a trust radius. Steps are accepted on an l1 merit
// function f - mu sum log c + nu |h|_1 with Armijo backtracking.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>

namespace handreq::optim {

template <class P>
concept BarrierProblem = requires(const P& p, const Eigen::VectorXd& cx, Eigen::VectorXd& v, Eigen::MatrixXd& m) {
  { p.dimension() } -> std::convertible_to<Eigen::Index>;
  { p.equality_count() } -> std::convertible_to<Eigen::Index>;
  { p.inequality_count() } -> std::convertible_to<Eigen::Index>;
  { p.objective(cx, v) } -> std::convertible_to<double>;
  p.equalities(cx, v, m);
  p.inequalities(cx, v, m);
  /// Hessian of f - y'h - z'c.
  p.lagrangian_hessian(cx, cx, cx, m);
};

struct InteriorPointOptions {
  double tolerance = 1e-10;
  int max_iterations = 500;
  double initial_barrier = 0.1;
  double min_barrier = 1e-13;
  double barrier_tolerance_factor = 10.0;
  /// Inf-norm trust radius on the primal step.
  double max_step = 1.0;
  /// Largest Hessian shift used to enforce the trust radius.
  double max_damping = 1e2;
  /// Bound on z_i c_i / mu (and its inverse) after each dual step.
  double centrality = 1e2;
  /// Stop early when the KKT error has not halved within this many iterations.
  int stall_iterations = 40;
};

struct InteriorPointReport {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd z;  // inequality multipliers
  double objective = 0.0;
  double kkt_error = std::numeric_limits<double>::infinity();
  double equality_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

template <BarrierProblem P>
InteriorPointReport interior_point_minimize(const P& problem, Eigen::VectorXd x, const InteriorPointOptions& opt) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const Eigen::Index n = problem.dimension();
  const Eigen::Index me = problem.equality_count();
  const Eigen::Index mi = problem.inequality_count();

  VectorXd g(n), h(me), c(mi);
  MatrixXd ah(me, n), ac(mi, n), hess(n, n);
  double f = 0.0;
  auto evaluate = [&](const VectorXd& at) {
    f = problem.objective(at, g);
    problem.equalities(at, h, ah);
    problem.inequalities(at, c, ac);
  };

  InteriorPointReport rep;
  evaluate(x);
  if (mi > 0 && !(c.minCoeff() > 0.0)) {
    rep.x = std::move(x);
    rep.objective = f;
    return rep;
  }

  // Least-squares multipliers at the start point set the first barrier
  // value, so a start near a solution is not pushed back to the centre.
  double mu = opt.initial_barrier;
  VectorXd z = (mu / c.array()).matrix();
  if (mi > 0) {
    MatrixXd jac(n, me + mi);
    jac << ah.transpose(), ac.transpose();
    const VectorXd w = jac.colPivHouseholderQr().solve(g);
    const double comp = w.tail(mi).cwiseAbs().cwiseProduct(c).mean();
    mu = std::clamp(comp, 1e3 * opt.min_barrier, opt.initial_barrier);
    for (Eigen::Index i = 0; i < mi; ++i)
      z[i] = std::clamp(w[me + i], mu / (opt.centrality * c[i]), opt.centrality * mu / c[i]);
  }
  VectorXd y = VectorXd::Zero(me);
  if (me > 0) y = ah.transpose().colPivHouseholderQr().solve(g - ac.transpose() * z);
  double penalty = 1.0;

  auto kkt_error = [&](double barrier) {
    const double dual = (g - ah.transpose() * y - ac.transpose() * z).template lpNorm<Eigen::Infinity>();
    const double primal = me ? h.template lpNorm<Eigen::Infinity>() : 0.0;
    const double comp = mi ? (c.cwiseProduct(z).array() - barrier).abs().maxCoeff() : 0.0;
    return std::max({dual, primal, comp});
  };
  auto merit = [&] { return f - mu * c.array().log().sum() + penalty * h.template lpNorm<1>(); };

  MatrixXd kkt = MatrixXd::Zero(n + me, n + me);
  double best_error = std::numeric_limits<double>::infinity();
  int best_iteration = 0;
  for (rep.iterations = 0; rep.iterations < opt.max_iterations; ++rep.iterations) {
    const double error = kkt_error(0.0);
    if (error <= opt.tolerance) {
      rep.converged = true;
      break;
    }
    if (error < 0.5 * best_error) {
      best_error = error;
      best_iteration = rep.iterations;
    } else if (rep.iterations - best_iteration > opt.stall_iterations) {
      break;
    }
    while (mu > opt.min_barrier && kkt_error(mu) <= opt.barrier_tolerance_factor * mu)
      mu = std::max(opt.min_barrier, 0.2 * mu);

    const VectorXd sigma = z.cwiseQuotient(c);
    problem.lagrangian_hessian(x, y, z, hess);
    const MatrixXd cond = hess + ac.transpose() * sigma.asDiagonal() * ac;
    const VectorXd r1 = -g + ah.transpose() * y + ac.transpose() * (mu / c.array()).matrix();

    MatrixXd basis;
    if (me > 0) {
      const Eigen::FullPivHouseholderQR<MatrixXd> qr(ah.transpose());
      const MatrixXd q = qr.matrixQ();
      basis = q.rightCols(n - qr.rank());
    } else {
      basis = MatrixXd::Identity(n, n);
    }
    const MatrixXd reduced = basis.transpose() * cond * basis;
    double delta = 0.0;
    for (;;) {
      const Eigen::LLT<MatrixXd> llt(reduced + delta * MatrixXd::Identity(reduced.rows(), reduced.cols()));
      if (llt.info() == Eigen::Success || delta > 1e10) break;
      delta = delta == 0.0 ? 1e-8 : 10.0 * delta;
    }

    kkt.topRightCorner(n, me) = ah.transpose();
    kkt.bottomLeftCorner(me, n) = ah;
    kkt.bottomRightCorner(me, me) = -1e-14 * MatrixXd::Identity(me, me);
    VectorXd rhs(n + me);
    rhs << r1, -h;
    VectorXd sol;
    for (;;) {
      kkt.topLeftCorner(n, n) = cond + delta * MatrixXd::Identity(n, n);
      sol = kkt.partialPivLu().solve(rhs);
      if (sol.head(n).template lpNorm<Eigen::Infinity>() <= opt.max_step || delta >= opt.max_damping) break;
      delta = std::max(10.0 * delta, 1e-6);
    }
    const VectorXd dx = sol.head(n);
    const VectorXd dy = -sol.tail(me);
    const VectorXd dc = ac * dx;
    const VectorXd dz = (mu / c.array()).matrix() - z - sigma.cwiseProduct(dc);

    const double tau = std::max(0.99, 1.0 - mu);
    double alpha = std::min(1.0, opt.max_step / std::max(dx.template lpNorm<Eigen::Infinity>(), 1e-300));
    double alpha_d = 1.0;
    for (Eigen::Index i = 0; i < mi; ++i) {
      if (dc[i] < 0.0) alpha = std::min(alpha, -tau * c[i] / dc[i]);
      if (dz[i] < 0.0) alpha_d = std::min(alpha_d, -tau * z[i] / dz[i]);
    }

    if (me > 0) penalty = std::max(penalty, 1.1 * (y + dy).template lpNorm<Eigen::Infinity>());
    const double phi0 = merit();
    const double slope = g.dot(dx) - mu * dc.cwiseQuotient(c).sum() - penalty * h.template lpNorm<1>();

    const VectorXd x0 = x;
    const VectorXd c0 = c;
    const MatrixXd ah0 = ah;
    auto acceptable = [&](double step) {
      const bool interior = mi == 0 || ((c - (1.0 - tau) * c0).array() > 0.0).all();
      return interior && merit() <= phi0 + 1e-4 * step * std::min(slope, 0.0);
    };
    for (int ls = 0; ls < 50; ++ls) {
      x = x0 + alpha * dx;
      evaluate(x);
      if (acceptable(alpha)) break;
      if (ls == 0 && me > 0) {
        // Second-order correction: project the trial point back towards h = 0
        // using the equality Jacobian at the current iterate.
        const VectorXd corr = -ah0.transpose() * (ah0 * ah0.transpose()).ldlt().solve(h);
        x = x0 + alpha * dx + corr;
        evaluate(x);
        if (acceptable(alpha)) break;
      }
      alpha *= 0.5;
    }
    z += alpha_d * dz;
    // Keep z within a bounded ratio of the central-path value.
    for (Eigen::Index i = 0; i < mi; ++i) z[i] = std::clamp(z[i], mu / (opt.centrality * c[i]), opt.centrality * mu / c[i]);
    // Least-squares equality multipliers; the Newton multiplier step is
    // unreliable once the primal step has been damped.
    if (me > 0) y = ah.transpose().colPivHouseholderQr().solve(g - ac.transpose() * z);
  }
  rep.kkt_error = kkt_error(0.0);
  rep.equality_residual = me ? h.template lpNorm<Eigen::Infinity>() : 0.0;
  rep.objective = f;
  rep.x = std::move(x);
  rep.y = std::move(y);
  rep.z = std::move(z);
  return rep;
}

}  // namespace handreq::optim
