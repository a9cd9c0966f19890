#include <doctest.h>

#include <cmath>
#include <random>

#include "graspguard/contact_dynamics.hpp"
#include "graspguard/error.hpp"

using namespace graspguard;

namespace {

ContactParams params1(double k, double b, double m = 1.0) { return ContactParams::uniform(1, k, b, m); }

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("contact_force examples") {
  CHECK(contact_force(ContactState::scalar(0.01, 0.0), params1(100, 1))[0] == doctest::Approx(-1.0));
  CHECK(contact_force(ContactState::scalar(0.0, 0.0), params1(100, 1))[0] == 0.0);
  // -300*0.02 - 2*(-0.5)
  CHECK(contact_force(ContactState::scalar(0.02, -0.5), params1(300, 2))[0] == doctest::Approx(-5.0));
}

TEST_CASE("contact_force is linear in the state") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  const ContactParams p = ContactParams::uniform(3, 250.0, 7.0, 0.3);
  for (int i = 0; i < 50; ++i) {
    const ContactState a(Eigen::VectorXd::NullaryExpr(3, [&] { return U(rng); }),
                         Eigen::VectorXd::NullaryExpr(3, [&] { return U(rng); }));
    const ContactState b(Eigen::VectorXd::NullaryExpr(3, [&] { return U(rng); }),
                         Eigen::VectorXd::NullaryExpr(3, [&] { return U(rng); }));
    const double s = U(rng);
    const ContactState mix(a.p + s * b.p, a.p_dot + s * b.p_dot);
    const Eigen::VectorXd lhs = contact_force(mix, p);
    const Eigen::VectorXd rhs = contact_force(a, p) + s * contact_force(b, p);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dimension mismatch is a contract violation") {
  const ContactParams p = ContactParams::uniform(2, 1, 1, 1);
  CHECK_THROWS_AS(contact_force(ContactState::scalar(0.1, 0), p), ContractViolation);
  CHECK_THROWS_AS(parametric_dynamics(ContactState::zero(2), p, v1(0)), ContractViolation);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(params1(0.0, 1.0).validate(), ContractViolation);
  CHECK_THROWS_AS(params1(1.0, -1.0).validate(), ContractViolation);
  ContactParams p = params1(1, 1);
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), ContractViolation);
}

TEST_CASE("parametric_dynamics examples") {
  // force balance: u = k p + b p_dot gives zero acceleration
  const ContactState x = ContactState::scalar(0.013, -0.2);
  const ContactParams p = params1(321, 4.5, 0.7);
  const double u = 321 * 0.013 + 4.5 * -0.2;
  CHECK(std::abs(parametric_dynamics(x, p, v1(u)).dv[0]) <= 1e-14);

  const StateRate r = parametric_dynamics(ContactState::scalar(0.01, 0.0), params1(100, 1, 0.1), v1(0));
  CHECK(r.dp[0] == 0.0);
  CHECK(r.dv[0] == doctest::Approx(-10.0));

  const StateRate z = parametric_dynamics(ContactState::scalar(0, 0), params1(100, 1, 0.5), v1(1));
  CHECK(z.dp[0] == 0.0);
  CHECK(z.dv[0] == doctest::Approx(2.0));
}

TEST_CASE("disturbance_dynamics examples") {
  const ContactState x = ContactState::scalar(0.004, 0.3);
  const ContactParams p = params1(200, 3, 0.2);
  const StateRate a = disturbance_dynamics(x, p, v1(1.5), v1(0.0));
  const StateRate b = parametric_dynamics(x, p, v1(1.5));
  CHECK(a.stacked() == b.stacked());

  CHECK(disturbance_dynamics(ContactState::scalar(0, 0), params1(1, 1, 1), v1(0), v1(1)).dv[0] == 1.0);
  CHECK(disturbance_dynamics(ContactState::scalar(0, 0), params1(5, 5, 2), v1(2), v1(-2)).dv[0] == 0.0);
}

TEST_CASE("friction_cone_residual examples") {
  ContactParams p = params1(1, 1);
  p.mu = 0.5;
  CHECK(friction_cone_residual({0, 0, 1, 0}, p) == doctest::Approx(1.0));
  CHECK(std::abs(friction_cone_residual({0.5, 0, 1, 0}, p)) <= 1e-15);
  CHECK(std::abs(friction_cone_residual({0.3, 0.4, 1, 0}, p)) <= 1e-15);
  CHECK(friction_cone_residual({0, 0, 1, 2.0}, p) == doctest::Approx(-1.0));  // 1 - 2/(1*1)
}

TEST_CASE("linearized_cone_matrix examples") {
  const ContactParams p = params1(1, 1);
  Eigen::Matrix4d expect;
  expect << 1, 0, 1, 1, -1, 0, 1, -1, 0, 1, 1, 1, 0, -1, 1, -1;
  CHECK(linearized_cone_matrix(p) == expect);

  ContactParams q = params1(1, 1);
  q.mu = 0.5;
  q.a = 2.0;
  const Eigen::Matrix4d L = linearized_cone_matrix(q);
  for (int i = 0; i < 4; ++i) {
    CHECK(L(i, 2) == 0.5);
    CHECK(std::abs(L(i, 3)) == 0.5);
  }
  const Eigen::Vector4d F(0, 0, 3.0, 0);
  CHECK(((L * F).array() > 0.0).all());
}

TEST_CASE("cone linearization agrees with |f_cx| <= mu f_cz on the f_cy = tau = 0 slice") {
  ContactParams p = params1(1, 1);
  p.mu = 0.37;
  const Eigen::Matrix4d L = linearized_cone_matrix(p);
  int disagreements = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double fz = 0.1 + 0.5 * i;
      const double fx = -1.2 * p.mu * fz + 2.4 * p.mu * fz * j / 99.0;
      const Eigen::Vector4d F(fx, 0, fz, 0);
      const bool lin = ((L * F).array() >= -1e-10).all();
      const bool exact = std::abs(fx) <= p.mu * fz + 1e-10;
      if (lin != exact) ++disagreements;
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("undriven damped plant loses energy under RK4") {
  const ContactParams p = params1(300, 10, 0.5);
  ContactState x = ContactState::scalar(0.01, 0.0);
  auto energy = [&](const ContactState& s) {
    return 0.5 * p.m_o * s.p_dot[0] * s.p_dot[0] + 0.5 * p.k[0] * s.p[0] * s.p[0];
  };
  auto none = [](double) { return v1(0.0); };
  double e = energy(x);
  for (int i = 0; i < 2000; ++i) {
    x = rk4_step(x, p, v1(0.0), none, i * 1e-3, 1e-3);
    const double e2 = energy(x);
    CHECK(e2 <= e + 1e-15);
    e = e2;
  }
}

TEST_CASE("RK4 error drops by at least 8 when the step halves") {
  // closed form of the underdamped oscillator
  const double k = 300, b = 10, m = 0.5;
  const ContactParams p = params1(k, b, m);
  const double zeta = b / (2 * m), wd = std::sqrt(k / m - zeta * zeta);
  const double p0 = 0.01, T = 1.0;
  const double exact = std::exp(-zeta * T) * p0 * (std::cos(wd * T) + zeta / wd * std::sin(wd * T));
  auto run = [&](double dt) {
    ContactState x = ContactState::scalar(p0, 0.0);
    const int N = static_cast<int>(std::lround(T / dt));
    for (int i = 0; i < N; ++i) x = rk4_step(x, p, v1(0.0), [](double) { return v1(0.0); }, i * dt, dt);
    return std::abs(x.p[0] - exact);
  };
  const double e1 = run(4e-3), e2 = run(2e-3);
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("clamp_separation zeroes separated axes") {
  ContactState x(Eigen::Vector2d(-0.1, 0.2), Eigen::Vector2d(1.0, 1.0));
  x.clamp_separation();
  CHECK(x.p[0] == 0.0);
  CHECK(x.p_dot[0] == 0.0);
  CHECK(x.p[1] == 0.2);
  CHECK(x.p_dot[1] == 1.0);
}
