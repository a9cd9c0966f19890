#include <doctest.h>

#include <random>

#include "graspguard/error.hpp"
#include "graspguard/qp_solver.hpp"
#include "oracles/qp_bruteforce.hpp"

using namespace graspguard;

namespace {

QpProblem make(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::MatrixXd& A,
               const Eigen::VectorXd& lb) {
  QpProblem qp;
  qp.H = H;
  qp.g = g;
  qp.A = A;
  qp.lb = lb;
  return qp;
}

QpProblem from_oracle(const oracle::Qp& o) { return make(o.H, o.g, o.C, o.c); }

Eigen::VectorXd v(std::initializer_list<double> xs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("unconstrained minimum is -H^-1 g") {
  const auto sol = solve(make(Eigen::MatrixXd::Identity(1, 1), v({-3}), Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)));
  REQUIRE(sol.solved());
  CHECK(sol.u[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sol.active_set.empty());
}

TEST_CASE("single upper bound clips") {
  Eigen::MatrixXd A(1, 1);
  A << -1.0;
  const auto sol = solve(make(Eigen::MatrixXd::Identity(1, 1), v({-3}), A, v({2})));
  REQUIRE(sol.solved());
  CHECK(sol.u[0] == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(sol.active_set.size() == 1);
  CHECK(sol.multipliers[0] == doctest::Approx(1.0));
}

TEST_CASE("simplex example agrees with a 1e-3 grid") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, -1, -1;
  const QpProblem qp = make(Eigen::MatrixXd::Identity(2, 2), v({-1, -1}), A, v({0, 0, 1}));
  const auto sol = solve(qp);
  REQUIRE(sol.solved());
  CHECK(sol.u[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.u[1] == doctest::Approx(0.5).epsilon(1e-12));
  const auto g = oracle::grid({qp.H, qp.g, qp.A, qp.lb}, -0.5, 1.5, 1e-3);
  REQUIRE(g);
  CHECK((*g - sol.u).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("box bounds are honoured and reported as stacked rows") {
  QpProblem qp = make(Eigen::MatrixXd::Identity(2, 2), v({-5, 5}), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0));
  qp.box = BoxBounds{v({-1, -1}), v({1, 1})};
  const auto sol = solve(qp);
  REQUIRE(sol.solved());
  CHECK(sol.u[0] == doctest::Approx(1.0));
  CHECK(sol.u[1] == doctest::Approx(-1.0));
  CHECK(sol.multipliers.size() == 4);
  // rows: u0 - l0, u1 - l1, h0 - u0, h1 - u1
  CHECK(sol.multipliers[1] == doctest::Approx(4.0));
  CHECK(sol.multipliers[2] == doctest::Approx(4.0));
  CHECK(sol.multipliers[0] == 0.0);
  CHECK(sol.multipliers[3] == 0.0);
}

TEST_CASE("contradictory constraints report infeasible without throwing") {
  Eigen::MatrixXd A(2, 1);
  A << 1, -1;
  const auto sol = solve(make(Eigen::MatrixXd::Identity(1, 1), v({0}), A, v({-2, 1})));  // u >= 2, u <= 1
  CHECK(sol.status == QpStatus::infeasible);
}

TEST_CASE("non positive definite H is a contract violation") {
  Eigen::MatrixXd H(2, 2);
  H << 1, 0, 0, 0;
  CHECK_THROWS_AS(solve(make(H, v({0, 0}), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0))), ContractViolation);
  Eigen::MatrixXd N(1, 1);
  N << -1;
  CHECK_THROWS_AS(solve(make(N, v({0}), Eigen::MatrixXd(0, 1), Eigen::VectorXd(0))), ContractViolation);
  Eigen::MatrixXd S(2, 2);
  S << 2, 1, 0, 2;
  CHECK_THROWS_AS(solve(make(S, v({0, 0}), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0))), ContractViolation);
}

TEST_CASE("random problems match the enumeration oracle and satisfy KKT") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> dn(1, 3), dm(0, 5);
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = dn(rng), m = dm(rng);
    const bool bad = m >= 2 && trial % 10 == 0;
    const oracle::Qp o = oracle::random_qp(rng, n, m, bad);
    const auto expect = oracle::enumerate(o);
    const auto sol = solve(from_oracle(o));
    if (!expect) {
      CHECK(sol.status == QpStatus::infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(sol.solved());
    CHECK(oracle::objective(o, sol.u) == doctest::Approx(oracle::objective(o, *expect)).epsilon(1e-8));
    const auto res = kkt_residuals(from_oracle(o), sol);
    CHECK(res.stationarity <= 1e-8);
    CHECK(res.primal <= 1e-8);
    CHECK(res.dual <= 1e-10);
    CHECK(res.complementarity <= 1e-8);
  }
  CHECK(infeasible > 0);
}

TEST_CASE("adding a constraint never lowers the optimum") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const oracle::Qp o = oracle::random_qp(rng, 2, 4);
    QpProblem fewer = from_oracle(o);
    fewer.A = o.C.topRows(3);
    fewer.lb = o.c.head(3);
    const auto a = solve(fewer);
    const auto b = solve(from_oracle(o));
    REQUIRE(a.solved());
    REQUIRE(b.solved());
    CHECK(b.u.dot(o.H * b.u) * 0.5 + o.g.dot(b.u) >= a.u.dot(o.H * a.u) * 0.5 + o.g.dot(a.u) - 1e-10);
  }
}

TEST_CASE("strictly inactive constraints leave the unconstrained minimizer untouched") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  const auto sol = solve(make(Eigen::MatrixXd::Identity(2, 2), v({-0.3, -0.7}), A, v({1, 1})));
  REQUIRE(sol.solved());
  CHECK(sol.u[0] == 0.3);
  CHECK(sol.u[1] == 0.7);
}
