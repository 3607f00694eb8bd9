#include "skrp/error.hpp"
#include "skrp/reparam.hpp"

#include <doctest.h>

#include <cmath>

using namespace skrp;

namespace {

Profile unit_quadratic() { return make_profile(ProfileSpec::quadratic(1, 1), {-1, 1}); }

}  // namespace

TEST_CASE("table for the unit quadratic with a = -1") {
  const ReparamTable t = build_reparam(unit_quadratic(), -1.0, {0.0, 1.0});
  REQUIRE(t.size() >= 512);
  // nodes sorted by r; phi must then decrease
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(t.r[i] > t.r[i - 1]);
    CHECK(t.phi[i] < t.phi[i - 1]);
    CHECK(t.r[i] > 0);
  }
  CHECK(t.phi.front() > 0.999);
  CHECK(t.r.front() < 1e-2);
  // closed form: r = sqrt((1 - phi)/(1 + phi))
  for (double phi : {-0.9, -0.5, 0.0, 0.3, 0.8, 0.99}) {
    const double exact = std::sqrt((1 - phi) / (1 + phi));
    CHECK(std::abs(t.r_of_phi(phi) / exact - 1) < 1e-9);
  }
  CHECK(table_ode_residual(t) < 1e-8);
}

TEST_CASE("anchor rescales r by a constant factor") {
  const Profile p = make_profile(ProfileSpec::polynomial({0.4, 0.2, -0.3}), {0.5, 1.5});
  const ReparamTable t1 = build_reparam(p, 0.7, {1.0, 1.0});
  const ReparamTable t2 = build_reparam(p, 0.7, {1.0, 2.0});
  for (double phi : {0.6, 0.8, 1.0, 1.2, 1.4}) CHECK(std::abs(t2.r_of_phi(phi) / t1.r_of_phi(phi) - 2) < 1e-9);
}

TEST_CASE("r_+ = infinity is flagged") {
  const ReparamTable t = build_reparam(unit_quadratic(), 1.0, {0.0, 1.0});
  CHECK(t.overflow);
  const ReparamTable inner = build_reparam(unit_quadratic().restricted({-0.5, 0.5}), 1.0, {0.0, 1.0});
  CHECK_FALSE(inner.overflow);
}

TEST_CASE("anchor outside the interval") {
  CHECK_THROWS_AS(build_reparam(unit_quadratic(), 1.0, {2.0, 1.0}), Error);
}

TEST_CASE("arclength reparameterization") {
  const ReparamTable t = build_reparam(unit_quadratic(), -1.0, {0.0, 1.0});
  // s = (sgn a) * arcsin(phi) up to a constant
  const double s0 = t.s_of_phi(0.0);
  for (double phi : {-0.7, -0.2, 0.4, 0.9}) CHECK(std::abs((t.s_of_phi(phi) - s0) + std::asin(phi)) < 1e-6);
}

TEST_CASE("compute_L") {
  for (double phi0 : {0.5, 1.0, -2.0}) {
    const double w = std::abs(phi0);
    CHECK(std::abs(compute_L(make_profile(ProfileSpec::quadratic(4, phi0), {-w, w})) - M_PI / 2) < 1e-9);
  }
  const Profile p = make_profile(ProfileSpec::polynomial({0, 2, -1, -0.5}), {0, 1.236067977499790});
  const double L = compute_L(p);
  for (double lam : {2.0, 10.0}) {
    std::vector<double> c = p.spec().coeffs;
    for (double& x : c) x *= lam * lam;
    CHECK(std::abs(compute_L(make_profile(ProfileSpec::polynomial(c), p.interval())) - L / lam) < 1e-9 * L);
  }
  CHECK_THROWS_AS(compute_L(make_profile(ProfileSpec::polynomial({0, 0, 1, -1}), {0, 1})), Error);
}

TEST_CASE("duality") {
  const ReparamTable t = build_reparam(unit_quadratic().restricted({-0.9, 0.8}), 1.3, {0.1, 1.0});
  const ReparamTable d = dual_table(t);
  const ReparamTable dd = dual_table(d);
  REQUIRE(dd.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(dd.r[i] - t.r[i]) <= 1e-12 * t.r[i]);
    CHECK(dd.phi[i] == t.phi[i]);
  }
  CHECK(d.a == -t.a);
  CHECK(table_ode_residual(d) < 1e-8);
  for (int i = 0; i < 100; ++i) {
    const double r = t.r.front() * std::pow(t.r.back() / t.r.front(), (i + 0.5) / 100);
    CHECK(std::abs(t.phi_of_r(r) - d.phi_of_r(1 / r)) < 1e-9);
  }
  const ReparamTable full = build_reparam(unit_quadratic(), -1.0, {0.0, 1.0});
  CHECK(compute_L(dual_table(full).profile) == compute_L(full.profile));
}

TEST_CASE("round trip phi -> r -> phi") {
  const Profile p = make_profile(ProfileSpec::polynomial({0.5, 0.3, -0.2, 0.1}), {1, 2});
  const ReparamTable t = build_reparam(p, 1.0, {1.5, 1.0});
  for (int i = 0; i < 1000; ++i) {
    const double phi = 1.001 + 0.998 * i / 999.0;
    CHECK(std::abs(t.phi_of_r(t.r_of_phi(phi)) - phi) < 1e-8 * std::abs(phi));
  }
}

TEST_CASE("one-sided limits at the center endpoint") {
  const ReparamTable t = build_reparam(unit_quadratic(), -1.0, {0.0, 1.0});
  const BoundaryLimits b = boundary_limits(t, Endpoint::Upper);
  CHECK(b.q0 > 0);
  CHECK(b.pass);
  // Q / r^2 = 2a dphi/dxi
  CHECK(std::abs(b.dphi_dxi / (b.q0 / (2 * t.a)) - 1) < 5e-4);
  CHECK(b.ratio_dphi >= 0.2);
  CHECK(b.ratio_dphi <= 5);
  CHECK_THROWS_AS(boundary_limits(t, Endpoint::Lower), Error);
  const ReparamTable wrong = build_reparam(unit_quadratic(), -0.5, {0.0, 1.0});
  CHECK_THROWS_AS(boundary_limits(wrong, Endpoint::Upper), Error);
}
