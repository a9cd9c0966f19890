#pragma once

// Reference solvers for small QPs, independent of the active-set code.

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

struct Qp {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd C;  // all inequalities, C u + c >= 0
  Eigen::VectorXd c;
};

inline double objective(const Qp& qp, const Eigen::VectorXd& u) { return 0.5 * u.dot(qp.H * u) + qp.g.dot(u); }

/// Enumerates every active subset of size <= n, solves its equality KKT
/// system, keeps primal and dual feasible candidates, returns the best.
/// nullopt when no candidate exists (the problem is infeasible).
inline std::optional<Eigen::VectorXd> enumerate(const Qp& qp, double tol = 1e-9) {
  const int n = static_cast<int>(qp.g.size());
  const int m = static_cast<int>(qp.C.rows());
  std::optional<Eigen::VectorXd> best;
  double best_f = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> S;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) S.push_back(i);
    if (static_cast<int>(S.size()) > n) continue;
    const int k = static_cast<int>(S.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    K.topLeftCorner(n, n) = qp.H;
    rhs.head(n) = -qp.g;
    for (int j = 0; j < k; ++j) {
      K.block(0, n + j, n, 1) = -qp.C.row(S[j]).transpose();
      K.block(n + j, 0, 1, n) = qp.C.row(S[j]);
      rhs[n + j] = -qp.c[S[j]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + k) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd u = sol.head(n);
    if (k > 0 && sol.tail(k).minCoeff() < -tol) continue;
    const Eigen::VectorXd s = qp.C * u + qp.c;
    if (m > 0 && s.minCoeff() < -tol * (1.0 + qp.c.cwiseAbs().maxCoeff())) continue;
    const double f = objective(qp, u);
    if (f < best_f) {
      best_f = f;
      best = u;
    }
  }
  return best;
}

/// Dense grid search over [lo, hi]^n (n <= 2), keeping feasible points.
inline std::optional<Eigen::VectorXd> grid(const Qp& qp, double lo, double hi, double step) {
  const int n = static_cast<int>(qp.g.size());
  std::optional<Eigen::VectorXd> best;
  double best_f = std::numeric_limits<double>::infinity();
  const int N = static_cast<int>((hi - lo) / step + 0.5);
  Eigen::VectorXd u(n);
  const int total = n == 1 ? N + 1 : (N + 1) * (N + 1);
  for (int idx = 0; idx < total; ++idx) {
    u[0] = lo + step * (idx % (N + 1));
    if (n == 2) u[1] = lo + step * (idx / (N + 1));
    if (qp.C.rows() && (qp.C * u + qp.c).minCoeff() < 0.0) continue;
    const double f = objective(qp, u);
    if (f < best_f) {
      best_f = f;
      best = u;
    }
  }
  return best;
}

/// Random strictly convex QP, feasible around a random point unless
/// make_infeasible adds a contradictory pair of rows.
inline Qp random_qp(std::mt19937_64& rng, int n, int m, bool make_infeasible = false) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto rand_mat = [&](int r, int c) {
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) M(i, j) = U(rng);
    return M;
  };
  Qp qp;
  const Eigen::MatrixXd M = rand_mat(n, n);
  qp.H = M.transpose() * M + 0.1 * Eigen::MatrixXd::Identity(n, n);
  qp.g = 3.0 * rand_mat(n, 1);
  qp.C = rand_mat(m, n);
  const Eigen::VectorXd x0 = rand_mat(n, 1);
  qp.c = -qp.C * x0;
  for (int i = 0; i < m; ++i) qp.c[i] += (U(rng) > 0.0 ? 0.0 : 0.5 * (U(rng) + 1.0));
  if (make_infeasible && m >= 2) {
    // rows 0 and 1: a u >= 1 and -a u >= 0
    qp.C.row(1) = -qp.C.row(0);
    qp.c[0] = -1.0;
    qp.c[1] = 0.0;
  }
  return qp;
}

}  // namespace oracle
