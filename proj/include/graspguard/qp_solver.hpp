#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace graspguard {

struct BoxBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// minimize 1/2 u'Hu + g'u  subject to  A u + lb >= 0  and  lower <= u <= upper.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A;   // m x n, m may be 0
  Eigen::VectorXd lb;  // m
  std::optional<BoxBounds> box;

  Eigen::Index dim() const { return g.size(); }

  /// All inequalities in one block: the A rows first, then u - lower >= 0,
  /// then upper - u >= 0 for each box coordinate.
  void stacked(Eigen::MatrixXd& rows, Eigen::VectorXd& offsets) const;
  double objective(const Eigen::VectorXd& u) const;
};

enum class QpStatus { solved, infeasible };

struct QpSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd multipliers;  // one per stacked row, zero when inactive
  std::vector<int> active_set;  // indices into the stacked rows
  QpStatus status = QpStatus::infeasible;
  int iterations = 0;

  bool solved() const { return status == QpStatus::solved; }
};

struct QpTolerances {
  double feasibility = 1e-10;
  double pivot = 1e-12;
  double min_eigenvalue = 1e-10;
  int max_iterations = 500;
};

/// Goldfarb-Idnani dual active-set method. Starts from the unconstrained
/// minimizer and adds the most violated constraint each major iteration,
/// keeping the active set dual feasible throughout. H is factored once
/// (Cholesky); the factors J = L^-T and R are updated with Givens rotations.
/// Throws ContractViolation for a non-symmetric or non positive definite H.
QpSolution solve(const QpProblem& problem, const QpTolerances& tol = {});

struct KktResiduals {
  double stationarity = 0.0;     // ||H u + g - C' lambda||_inf
  double primal = 0.0;           // max(0, -(C u + c))
  double dual = 0.0;             // max(0, -lambda)
  double complementarity = 0.0;  // max |lambda_i (C_i u + c_i)|
};

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution);

}  // namespace graspguard
