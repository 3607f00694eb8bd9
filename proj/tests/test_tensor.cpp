#include "skrp/tensor.hpp"

#include <doctest.h>

#include <cmath>

using namespace skrp;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

// conformally flat surface of constant curvature K in stereographic coordinates
Chart constant_curvature(double K) {
  Chart c = euclidean_chart(2);
  const double sg = K > 0 ? 1.0 : -1.0;
  c.domain = [sg](const Vec& x) { return sg > 0 ? x.norm() < 100 : x.norm() < 0.99; };
  c.g = [K, sg](const Vec& x) -> Mat {
    const double d = 1 + sg * x.squaredNorm();
    return 4.0 / (std::abs(K) * d * d) * Mat::Identity(2, 2);
  };
  c.scale = 0.5;
  return c;
}

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

// a generic smooth 4D metric
Chart lumpy4() {
  Chart c = euclidean_chart(4);
  c.g = [](const Vec& x) -> Mat {
    Mat A(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) A(i, j) = 0.2 * std::sin(1.3 * x(i) + 0.7 * x(j) + i - j);
    return Mat::Identity(4, 4) + 0.5 * (A * A.transpose());
  };
  return c;
}

}  // namespace

TEST_CASE("flat space has no connection or curvature") {
  const Chart e = euclidean_chart<double>(4, [](const Vec& x) { return x.squaredNorm(); });
  const Vec x = vec({0.3, 0.1, -0.2, 0.5});
  CHECK(connection_coefficients(e, x).max_abs() < 1e-12);
  const auto c = curvature(e, x);
  CHECK(c.Riemann.max_abs() < 1e-10);
  CHECK(c.Ricci.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(c.scalar) < 1e-10);
}

TEST_CASE("Christoffel symbols are scale invariant") {
  Chart s = constant_curvature(4);
  Chart s7 = s;
  s7.g = [g = s.g](const Vec& x) -> Mat { return 7.0 * g(x); };
  const Vec x = vec({0.4, -0.3});
  const auto G = connection_coefficients(s, x), G7 = connection_coefficients(s7, x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(G(k, i, j) - G7(k, i, j)) < 1e-10);
}

TEST_CASE("Christoffel symbols of a conformally flat metric") {
  const Chart s = constant_curvature(4);
  const Vec x = vec({0.4, -0.3});
  const auto G = connection_coefficients(s, x);
  const Vec dl = -4.0 * x / (1 + x.squaredNorm());  // gradient of log rho
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double exact = 0.5 * ((k == i) * dl(j) + (k == j) * dl(i) - (i == j) * dl(k));
        CHECK(std::abs(G(k, i, j) - exact) < 1e-7);
      }
}

TEST_CASE("curvature sign convention: sphere positive, hyperbolic negative") {
  for (double K : {4.0, -4.0, 1.0, -0.5}) {
    const Chart c = constant_curvature(K);
    const Vec x = vec({0.2, -0.1});
    const auto t = point_tensors(c, x);
    CHECK((t.Ricci - K * t.g).cwiseAbs().maxCoeff() < 1e-6 * t.g.cwiseAbs().maxCoeff() * std::abs(K));
    CHECK(t.scalar == doctest::Approx(2 * K).epsilon(1e-6));
  }
}

TEST_CASE("potential derivatives on flat space") {
  const Vec x = vec({0.3, 0.1, -0.2, 0.5});
  const auto sq = potential_derivatives(euclidean_chart<double>(4, [](const Vec& y) { return y.squaredNorm(); }), x);
  CHECK((sq.Hess - 2 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sq.Y == doctest::Approx(8).epsilon(1e-9));
  CHECK(sq.Q == doctest::Approx(4 * x.squaredNorm()).epsilon(1e-9));
  const auto lin = potential_derivatives(euclidean_chart<double>(4, [](const Vec& y) { return 2 * y(0) - y(3); }), x);
  CHECK(lin.Hess.cwiseAbs().maxCoeff() < 1e-9);
  const auto t = point_tensors(lumpy4(), x);
  CHECK((t.Ricci - t.Ricci.transpose()).cwiseAbs().maxCoeff() < 1e-8 * t.Ricci.cwiseAbs().maxCoeff());
}

TEST_CASE("Hessian symmetric on a curved chart") {
  Chart c = lumpy4();
  c.phi = [](const Vec& y) { return std::sin(y(0)) * y(1) + y(2) * y(2) * y(3); };
  const auto t = point_tensors(c, vec({0.3, -0.2, 0.4, 0.1}), FDConfig{}, false);
  CHECK((t.Hess - t.Hess.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * t.Hess.cwiseAbs().maxCoeff());
}

TEST_CASE("frame Ricci equals direct contraction; first Bianchi identity") {
  const Chart c = lumpy4();
  const auto t = point_tensors(c, vec({0.3, -0.2, 0.4, 0.1}));
  const double scale = t.Ricci.cwiseAbs().maxCoeff();
  CHECK((t.Ricci - t.RicciDirect).cwiseAbs().maxCoeff() < 1e-8 * scale);
  double worst = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          worst = std::max(worst, std::abs(t.Riemann(i, j, k, l) + t.Riemann(j, k, i, l) + t.Riemann(k, i, j, l)));
  CHECK(worst < 1e-7 * t.Riemann.max_abs());
}

TEST_CASE("finite differences converge at high order") {
  const Chart s = constant_curvature(4);
  const Vec x = vec({0.4, 0.2});
  auto err = [&](double h) {
    const auto t = point_tensors(s, x, FDConfig{h, 4, false});
    return std::abs(t.scalar - 8.0);
  };
  const double e1 = err(0.08), e2 = err(0.04);
  CHECK(e1 / e2 >= 8);
}

TEST_CASE("stencils must stay in the domain") {
  Chart c = euclidean_chart(2);
  c.domain = [](const Vec& y) { return y.norm() < 1; };
  CHECK_THROWS_AS(connection_coefficients(c, vec({0.99999, 0})), Error);
}

TEST_CASE("geodesics") {
  const Chart e = euclidean_chart(2);
  const auto line = geodesic(e, vec({0.1, 0.2}), vec({3, 4}), 2.0);
  CHECK((line.x.back() - vec({0.1 + 1.2, 0.2 + 1.6})).norm() < 1e-12);

  const Chart s = constant_curvature(4);
  const Vec x0 = vec({0.5, 0});
  const auto arc = geodesic(s, x0, vec({0, 1}), M_PI / 2, FDConfig{1e-3, 4, false});
  CHECK_FALSE(arc.left_domain);
  CHECK((arc.x.back() - vec({-2, 0})).norm() < 1e-4);

  const auto longer = geodesic(s, vec({0.2, 0.1}), vec({1, 0.3}), 5.0, FDConfig{1e-3, 4, false});
  CHECK(longer.drift < 1e-6);
}

TEST_CASE("Kahler residuals with a negative control") {
  const Chart e = euclidean_chart(4);
  const Vec x = vec({0.3, 0.1, -0.2, 0.5});
  const auto r = kahler_residuals(e, x);
  CHECK(r.hermitian < 1e-12);
  CHECK(r.domega < 1e-12);
  CHECK(r.nablaJ < 1e-12);
  Chart bumped = e;
  bumped.g = [](const Vec& y) -> Mat {
    Mat g = Mat::Identity(4, 4);
    g(0, 0) += 0.01 * std::exp(-y.squaredNorm());
    return g;
  };
  CHECK(kahler_residuals(bumped, x).hermitian > 5e-3);
}

TEST_CASE("Killing residuals with a negative control") {
  const Vec x = vec({0.3, 0.1, -0.2, 0.5});
  const auto k = killing_residual(euclidean_chart<double>(4, [](const Vec& y) { return y.squaredNorm(); }), x);
  CHECK(k.sym_nabla_u < 1e-10);
  CHECK(k.hermitian_hess < 1e-10);
  const auto bad =
      killing_residual(euclidean_chart<double>(4, [](const Vec& y) { return y.squaredNorm() + 0.01 * std::pow(y(0), 3); }), x);
  CHECK(bad.sym_nabla_u > 1e-4);
}

TEST_CASE("extended precision instantiation") {
  using LD = long double;
  const auto e = euclidean_chart<LD>(2, [](const VecX<LD>& y) { return y.squaredNorm(); });
  VecX<LD> x(2);
  x << 0.25L, -0.5L;
  const auto t = point_tensors<LD>(e, x);
  CHECK(std::abs(static_cast<double>(t.Y) - 4.0) < 1e-12);
}
