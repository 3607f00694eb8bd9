#include "skrp/error.hpp"
#include "skrp/models.hpp"
#include "skrp/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace skrp;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

Profile unit_quadratic() { return make_profile(ProfileSpec::quadratic(1, 1), {-1, 1}); }

Model quadratic_shell() { return build_shell({2, unit_quadratic().restricted({0.2, 0.9}), 1.0, 1, 0.0}); }

Model poly_shell() {
  return build_shell({2, make_profile(ProfileSpec::polynomial({0.5, 0.3, -0.2, 0.1}), {1, 2}), 1.0, 1, 0.0});
}

}  // namespace

TEST_CASE("shell metric on the vertical and horizontal blocks") {
  const Model M = poly_shell();
  const Profile& p = *M.chart.meta.profile;
  const double a = M.chart.meta.a, c = *M.chart.meta.c;
  const auto pts = sample_points(M, 100, 3);
  for (const auto& x : pts) {
    const Mat g = M.chart.g(x);
    const double Q = p.Q(M.chart.phi(x));
    const Vec v = a * x, u = a * (M.chart.J * x);
    CHECK(std::abs(v.dot(g * v) - Q) < 1e-9 * Q);
    CHECK(std::abs(u.dot(g * u) - Q) < 1e-9 * Q);
    CHECK(std::abs(v.dot(g * u)) < 1e-9 * Q);
    // horizontal vector orthogonal to x and Jx
    Vec w(4);
    w << -x(2), x(3), x(0), -x(1);
    w -= w.dot(x) / x.squaredNorm() * x;
    const Vec jx = M.chart.J * x;
    w -= w.dot(jx) / jx.squaredNorm() * jx;
    const double fs = 2 * std::abs(M.chart.phi(x) - c) / std::abs(a) * w.squaredNorm() / x.squaredNorm();
    CHECK(std::abs(w.dot(g * w) - fs) < 1e-8 * fs);
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    CHECK(es.eigenvalues().minCoeff() > 1e-6);
    CHECK(es.eigenvalues().maxCoeff() < 1e6);
  }
}

TEST_CASE("shell Q from finite differences matches the profile") {
  const Model M = poly_shell();
  for (const auto& x : sample_points(M, 100, 4)) {
    const auto d = potential_derivatives(M.chart, x);
    CHECK(std::abs(d.Q - M.chart.meta.profile->Q(d.phi)) < 1e-6);
  }
}

TEST_CASE("shell with m = 3") {
  const Model M = build_shell({3, unit_quadratic().restricted({0.2, 0.9}), 1.0, 1, 0.0});
  CHECK(M.chart.n == 6);
  for (const auto& x : sample_points(M, 5, 1)) {
    const auto d = potential_derivatives(M.chart, x);
    CHECK(std::abs(d.Q - M.chart.meta.profile->Q(d.phi)) < 1e-6);
  }
}

TEST_CASE("shell spec invariants") {
  const Profile p = unit_quadratic().restricted({0.2, 0.9});
  CHECK_THROWS_AS(build_shell({2, p, -1.0, 1, 0.0}), Error);
  CHECK_THROWS_AS(build_shell({2, p, 1.0, 1, 0.5}), Error);
  CHECK_THROWS_AS(build_shell({1, p, 1.0, 1, 0.0}), Error);
}

TEST_CASE("annulus: positivity and inversion duality") {
  const Profile p = unit_quadratic().restricted({-0.8, 0.7});
  const Model A = build_annulus({p, 1.0, std::make_pair(0.0, 1.0)});
  const Model D = build_annulus({p, -1.0, std::make_pair(0.0, 1.0)});
  for (int i = 0; i < 1000; ++i) {
    const double phi = -0.78 + 1.46 * i / 999.0;
    const double r = A.radial->r(phi);
    Vec x(2);
    x << r * std::cos(0.01 * i), r * std::sin(0.01 * i);
    if (A.chart.domain(x)) CHECK(A.chart.g(x)(0, 0) > 0);
  }
  for (const auto& x : sample_points(A, 100, 5)) {
    const Vec z = inversion(x);
    const Mat Jz = inversion_jacobian(x);
    const Mat g = A.chart.g(x);
    CHECK((Jz.transpose() * D.chart.g(z) * Jz - g).cwiseAbs().maxCoeff() < 1e-10 * g.cwiseAbs().maxCoeff());
    CHECK(std::abs(D.chart.phi(z) - A.chart.phi(x)) < 1e-9);
  }
}

TEST_CASE("Riemann sphere") {
  const SphereModel S = build_sphere({4, 1});
  CHECK(S.model.chart.meta.a == -4);
  std::vector<Vec> pts = sample_points(S.model, 40, 6);
  for (int i = 0; i < 10; ++i) {
    const double r = 1e-3 * std::pow(10.0, i / 9.0);
    Vec x(2);
    x << r * std::cos(1.1 * i), r * std::sin(1.1 * i);
    pts.push_back(x);
  }
  for (const auto& x : pts) {
    const auto c = curvature(S.model.chart, x);
    CHECK(std::abs(c.scalar / 2 - 4) < 4e-5);
  }

  const Eigen::Vector3d pole = S.chi(Vec::Zero(2));
  CHECK((pole - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);

  const double h = 1e-3 * S.model.chart.scale;
  for (const auto& x : sample_points(S.model, 50, 7)) {
    Eigen::Matrix<double, 3, 2> D;
    for (int k = 0; k < 2; ++k) {
      auto at = [&](double t) {
        Vec y = x;
        y(k) += t;
        return S.chi(y);
      };
      D.col(k) = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
    }
    CHECK(std::abs(S.chi(x).norm() - 1) < 1e-12);
    const Mat g = S.model.chart.g(x);
    CHECK((D.transpose() * D / 4.0 - g).cwiseAbs().maxCoeff() < 1e-7 * g.cwiseAbs().maxCoeff());
  }

  Rng rng(8);
  for (const auto& x : sample_points(S.model, 20, 9)) {
    const double th = 2 * M_PI * rng.uniform();
    Mat R(2, 2);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Mat g = S.model.chart.g(x);
    CHECK((R.transpose() * S.model.chart.g(R * x) * R - g).cwiseAbs().maxCoeff() < 1e-10 * g.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("ball extension coefficients") {
  const Profile p = unit_quadratic();
  const BoundaryLimits lim = boundary_limits(build_reparam(p, 1.0, {0.0, 1.0}), Endpoint::Lower);
  const BallCoeffs c0 = ball_extension_coeffs(p, 1.0, -1.0, 0.0, std::make_pair(0.0, 1.0));
  CHECK(lim.q0 > 0);
  CHECK(c0.c2 == doctest::Approx(lim.q0 / 1.0).epsilon(1e-6));
  const BallCoeffs c3 = ball_extension_coeffs(p, 1.0, -1.0, 1e-3, std::make_pair(0.0, 1.0));
  const BallCoeffs c4 = ball_extension_coeffs(p, 1.0, -1.0, 1e-4, std::make_pair(0.0, 1.0));
  CHECK(std::isfinite(c3.c1));
  CHECK(std::abs(c3.c1 - c4.c1) <= 0.1 * std::abs(c4.c1));
  Vec x = Vec::Zero(4);
  x(0) = 1e-3;
  const Mat J = standard_J<double>(4);
  const Vec xi = x, xip = J * x;
  const Mat g = c3.c1 * (xi * xi.transpose() + xip * xip.transpose()) + c3.c2 * Mat::Identity(4, 4);
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff() > 0);
  CHECK_THROWS_AS(ball_extension_coeffs(p, 1.0, 1.0, 0.1), Error);
  CHECK_THROWS_AS(ball_extension_coeffs(p, 2.0, -1.0, 0.1), Error);
}

TEST_CASE("hyperbolic plane times sphere") {
  const double K = 1.5, t = 0.8;
  const Model P = build_product({K, t});
  for (const auto& x : sample_points(P, 100, 10)) {
    const auto tp = point_tensors(P.chart, x);
    CHECK(std::abs(tp.Q - K * (t * t - tp.phi * tp.phi)) < 1e-6);
    const Mat base = tp.g.topLeftCorner(2, 2);
    CHECK((tp.Ricci.topLeftCorner(2, 2) + K * base).cwiseAbs().maxCoeff() < 1e-5 * base.cwiseAbs().maxCoeff());
    CHECK(tp.Hess.topLeftCorner(2, 2).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(tp.g.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("tautological line bundle curvature") {
  const auto at0 = tautological_connection(Eigen::Vector2d::Zero());
  CHECK(std::abs(at0.Gamma[0]) < 1e-15);
  CHECK(std::abs(at0.Gamma[1]) < 1e-15);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const Eigen::Vector2d y(-2 + 0.4 * i + 0.2, -2 + 0.4 * j + 0.2);
      const auto t = tautological_connection(y);
      CHECK(std::abs(t.Omega.real() + 2 * t.omega_fs) < 1e-6);
      CHECK(t.imag_residual < 1e-8);
    }
}

TEST_CASE("every model chart is Kahler with a Killing potential") {
  std::vector<Model> models;
  models.push_back(quadratic_shell());
  models.push_back(build_sphere({4, 1}).model);
  models.push_back(build_product({1, 1}));
  models.push_back(build_annulus({unit_quadratic().restricted({-0.8, 0.7}), 1.0, std::nullopt}));
  for (const auto& M : models) {
    double worst = 0;
    for (const auto& x : sample_points(M, 100, 11)) {
      const auto k = kahler_residuals(M.chart, x);
      const auto l = killing_residual(M.chart, x);
      worst = std::max({worst, k.hermitian, k.domega, k.nablaJ, l.sym_nabla_u, l.hermitian_hess});
    }
    INFO(M.chart.meta.model);
    CHECK(worst < 1e-6);
  }
}
