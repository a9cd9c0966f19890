#include "graspguard/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspguard/error.hpp"

namespace graspguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Working set of the dual method. J holds L^-T rotated so that its first q
// columns span the active normals; R is the q x q upper-triangular factor.
struct Workspace {
  Eigen::Index n = 0;
  Eigen::MatrixXd J;
  Eigen::MatrixXd R;
  std::vector<int> active;
  std::vector<double> duals;
  double r_norm = 1.0;

  int q() const { return static_cast<int>(active.size()); }
};

bool add_constraint(Workspace& ws, Eigen::VectorXd& d) {
  const Eigen::Index n = ws.n;
  const int q = ws.q();
  for (Eigen::Index j = n - 1; j >= q + 1; --j) {
    double cc = d[j - 1];
    double ss = d[j];
    const double h = std::hypot(cc, ss);
    if (std::abs(h) < kEps) continue;
    d[j] = 0.0;
    ss /= h;
    cc /= h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d[j - 1] = -h;
    } else {
      d[j - 1] = h;
    }
    const double xny = ss / (1.0 + cc);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t1 = ws.J(k, j - 1);
      const double t2 = ws.J(k, j);
      ws.J(k, j - 1) = t1 * cc + t2 * ss;
      ws.J(k, j) = xny * (t1 + ws.J(k, j - 1)) - t2;
    }
  }
  ws.R.col(q).head(q + 1) = d.head(q + 1);
  if (std::abs(d[q]) <= kEps * ws.r_norm) return false;
  ws.r_norm = std::max(ws.r_norm, std::abs(d[q]));
  return true;
}

void delete_constraint(Workspace& ws, int position) {
  const Eigen::Index n = ws.n;
  const int q = ws.q();
  for (int i = position; i < q - 1; ++i) ws.R.col(i) = ws.R.col(i + 1);
  ws.R.col(q - 1).setZero();
  ws.active.erase(ws.active.begin() + position);
  ws.duals.erase(ws.duals.begin() + position);
  const int remaining = q - 1;
  for (int j = position; j < remaining; ++j) {
    double cc = ws.R(j, j);
    double ss = ws.R(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (std::abs(h) < kEps) continue;
    cc /= h;
    ss /= h;
    ws.R(j + 1, j) = 0.0;
    if (cc < 0.0) {
      ws.R(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      ws.R(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < remaining; ++k) {
      const double t1 = ws.R(j, k);
      const double t2 = ws.R(j + 1, k);
      ws.R(j, k) = t1 * cc + t2 * ss;
      ws.R(j + 1, k) = xny * (t1 + ws.R(j, k)) - t2;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t1 = ws.J(k, j);
      const double t2 = ws.J(k, j + 1);
      ws.J(k, j) = t1 * cc + t2 * ss;
      ws.J(k, j + 1) = xny * (ws.J(k, j) + t1) - t2;
    }
  }
}

void check_problem(const QpProblem& pb, const QpTolerances& tol) {
  const Eigen::Index n = pb.dim();
  require(n > 0, "QpProblem: empty decision vector");
  require(pb.H.rows() == n && pb.H.cols() == n, "QpProblem: H must be n x n");
  require(pb.A.cols() == n || pb.A.rows() == 0, "QpProblem: A must have n columns");
  require(pb.A.rows() == pb.lb.size(), "QpProblem: A and lb disagree on m");
  if (pb.box) {
    require(pb.box->lower.size() == n && pb.box->upper.size() == n, "QpProblem: box must have n entries");
  }
  const double asym = (pb.H - pb.H.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * std::max(1.0, pb.H.cwiseAbs().maxCoeff()), "QpProblem: H is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pb.H, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > tol.min_eigenvalue, "QpProblem: H is not positive definite");
}

}  // namespace

void QpProblem::stacked(Eigen::MatrixXd& rows, Eigen::VectorXd& offsets) const {
  const Eigen::Index n = dim();
  const Eigen::Index m = A.rows();
  const Eigen::Index extra = box ? 2 * n : 0;
  rows.setZero(m + extra, n);
  offsets.setZero(m + extra);
  if (m > 0) {
    rows.topRows(m) = A;
    offsets.head(m) = lb;
  }
  if (box) {
    for (Eigen::Index i = 0; i < n; ++i) {
      rows(m + i, i) = 1.0;
      offsets[m + i] = -box->lower[i];
      rows(m + n + i, i) = -1.0;
      offsets[m + n + i] = box->upper[i];
    }
  }
}

double QpProblem::objective(const Eigen::VectorXd& u) const { return 0.5 * u.dot(H * u) + g.dot(u); }

QpSolution solve(const QpProblem& problem, const QpTolerances& tol) {
  check_problem(problem, tol);
  const Eigen::Index n = problem.dim();

  Eigen::MatrixXd C;
  Eigen::VectorXd c0;
  problem.stacked(C, c0);
  const Eigen::Index m = C.rows();

  const Eigen::LLT<Eigen::MatrixXd> llt(problem.H);
  if (llt.info() != Eigen::Success) throw ContractViolation("QpProblem: Cholesky factorization failed");

  Workspace ws;
  ws.n = n;
  const Eigen::MatrixXd L = llt.matrixL();
  ws.J = L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
  ws.R = Eigen::MatrixXd::Zero(n, n);

  QpSolution sol;
  Eigen::VectorXd x = llt.solve(-problem.g);
  std::vector<char> excluded(static_cast<std::size_t>(m), 0);

  auto finish = [&](QpStatus status) {
    sol.u = x;
    sol.status = status;
    sol.multipliers = Eigen::VectorXd::Zero(m);
    sol.active_set = ws.active;
    for (int i = 0; i < ws.q(); ++i) sol.multipliers[ws.active[i]] = ws.duals[i];
    return sol;
  };

  auto is_active = [&](int idx) { return std::find(ws.active.begin(), ws.active.end(), idx) != ws.active.end(); };
  auto row_scale = [&](int idx) { return 1.0 + std::abs(c0[idx]) + C.row(idx).cwiseAbs().sum() * x.cwiseAbs().maxCoeff(); };

  while (true) {
    if (++sol.iterations > tol.max_iterations) return finish(QpStatus::infeasible);

    // Step 1: most violated constraint among the inactive ones.
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (excluded[i] || is_active(i)) continue;
      const double s = C.row(i).dot(x) + c0[i];
      if (s < -tol.feasibility * row_scale(i) && s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) return finish(QpStatus::solved);

    const Eigen::VectorXd np = C.row(p).transpose();
    double u_plus = 0.0;
    double s_p = worst;

    // Step 2: move along primal and/or dual directions until p is satisfied.
    while (true) {
      const int q = ws.q();
      Eigen::VectorXd d = ws.J.transpose() * np;
      const Eigen::VectorXd z = ws.J.rightCols(n - q) * d.tail(n - q);
      Eigen::VectorXd r = Eigen::VectorXd::Zero(q);
      if (q > 0) r = ws.R.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));

      double t1 = kInf;
      int drop = -1;
      for (int j = 0; j < q; ++j) {
        if (r[j] > tol.pivot) {
          const double ratio = ws.duals[j] / r[j];
          if (ratio < t1) {
            t1 = ratio;
            drop = j;
          }
        }
      }
      const double znp = z.dot(np);
      const double t2 = (z.norm() > tol.pivot && znp > tol.pivot) ? -s_p / znp : kInf;
      const double t = std::min(t1, t2);

      if (!std::isfinite(t)) return finish(QpStatus::infeasible);

      if (!std::isfinite(t2)) {
        // Dual step only: rotate multipliers, drop the blocking constraint.
        for (int j = 0; j < q; ++j) ws.duals[j] -= t * r[j];
        u_plus += t;
        delete_constraint(ws, drop);
        continue;
      }

      x += t * z;
      for (int j = 0; j < q; ++j) ws.duals[j] -= t * r[j];
      u_plus += t;

      if (t2 <= t1) {
        if (!add_constraint(ws, d)) {
          // Numerically dependent on the active normals: skip it this round.
          excluded[p] = 1;
          break;
        }
        ws.active.push_back(p);
        ws.duals.push_back(u_plus);
        std::fill(excluded.begin(), excluded.end(), 0);
        break;
      }

      delete_constraint(ws, drop);
      s_p = C.row(p).dot(x) + c0[p];
    }
  }
}

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution) {
  Eigen::MatrixXd C;
  Eigen::VectorXd c0;
  problem.stacked(C, c0);
  KktResiduals res;
  const Eigen::VectorXd grad = problem.H * solution.u + problem.g - C.transpose() * solution.multipliers;
  res.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    const double s = C.row(i).dot(solution.u) + c0[i];
    res.primal = std::max(res.primal, -s);
    res.dual = std::max(res.dual, -solution.multipliers[i]);
    res.complementarity = std::max(res.complementarity, std::abs(solution.multipliers[i] * s));
  }
  return res;
}

}  // namespace graspguard
