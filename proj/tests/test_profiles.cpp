#include "skrp/error.hpp"
#include "skrp/profiles.hpp"

#include <doctest.h>

#include <cmath>

using namespace skrp;

namespace {

bool throws_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("family evaluators at hand-computed points") {
  const Profile quad = make_profile(ProfileSpec::quadratic(1, 1), {-1, 1});
  CHECK(quad.Q(0.0) == doctest::Approx(1.0).epsilon(1e-15));

  const Profile tc = make_profile(ProfileSpec::type_c(2, 1, 1, 1, 0), {1.5, 3});
  CHECK(tc.Q(2.0) == doctest::Approx(4.0).epsilon(1e-14));

  const Profile ta = find_admissible_interval(ProfileSpec::type_a(2, 1, 0, -6), 0.0);
  CHECK(ta.interval().lo == doctest::Approx(-1).epsilon(1e-12));
  CHECK(ta.interval().hi == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("eval_FE") {
  CHECK(eval_FE(2, 2.0).F == 0.0);
  for (int m = 1; m <= 6; ++m) CHECK(eval_E(m, 1.0) == 0.0);
  const FE fe = eval_FE(2, 3.0);
  CHECK(fe.F == doctest::Approx(27.0 / 4).epsilon(1e-15));
  CHECK(fe.E == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(throws_code(ErrorCode::PoleAtOne, [] { eval_F(3, 1.0); }));
}

TEST_CASE("eval_f_bc1 roots and value") {
  CHECK(eval_f_bc1(3, 1.0).f == 0.0);
  CHECK(std::abs(eval_f_bc1(3, -1.0).f) < 1e-14);
  CHECK(eval_f_bc1(2, 2.0).f == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sign scan finds only beta = 1 and (-1)^k") {
  for (int k = 2; k <= 10; ++k) {
    const SignScan s = scan_f_bc1(k, -3, 3, 10000);
    CHECK(s.only_expected);
    CHECK(s.all_expected_found);
    CHECK(s.max_factor_residual <= 1e-10);
  }
}

TEST_CASE("admissible intervals and endpoint slopes") {
  const Profile q = find_admissible_interval(ProfileSpec::quadratic(2, 1), 0.0);
  CHECK(q.interval().lo == doctest::Approx(-1).epsilon(1e-12));
  CHECK(q.interval().hi == doctest::Approx(1).epsilon(1e-12));
  CHECK(q.endpoint_slopes().first == doctest::Approx(4).epsilon(1e-10));
  CHECK(q.endpoint_slopes().second == doctest::Approx(-4).epsilon(1e-10));

  const Profile a = find_admissible_interval(ProfileSpec::type_a(2, 1, 0, -6), 0.0);
  CHECK(a.endpoint_slopes().first == doctest::Approx(2).epsilon(1e-10));
  CHECK(a.endpoint_slopes().second == doctest::Approx(-2).epsilon(1e-10));

  CHECK(throws_code(ErrorCode::SeedNonPositive, [] { find_admissible_interval(ProfileSpec::quadratic(1, 1), 2.0); }));
  CHECK(throws_code(ErrorCode::NoRoot, [] { find_admissible_interval(ProfileSpec::polynomial({1.0}), 0.0); }));
}

TEST_CASE("tangential root in a spline profile fails the boundary condition") {
  std::vector<double> phi, Q;
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    phi.push_back(x);
    Q.push_back(x * x * (1 - x));
  }
  const Profile p = find_admissible_interval(ProfileSpec::custom(phi, Q), 0.5);
  CHECK(p.interval().lo == doctest::Approx(0).epsilon(1e-9));
  CHECK(p.interval().hi == doctest::Approx(1).epsilon(1e-9));
  CHECK_FALSE(check_mw1(p).pass());
}

TEST_CASE("check_mw1") {
  const BoundaryReport q = check_mw1(make_profile(ProfileSpec::quadratic(1, 1), {-1, 1}));
  CHECK(q.pass());
  CHECK(q.endpoint_slopes.first == doctest::Approx(2));
  CHECK(q.endpoint_slopes.second == doctest::Approx(-2));

  const BoundaryReport lin = check_mw1(make_profile(ProfileSpec::polynomial({0, 1, -1}), {0, 1}));
  CHECK(lin.pass());
  CHECK(lin.endpoint_slopes.first == doctest::Approx(1));
  CHECK(lin.endpoint_slopes.second == doctest::Approx(-1));

  const BoundaryReport tan = check_mw1(make_profile(ProfileSpec::polynomial({0, 0, 1, -1}), {0, 1}));
  CHECK_FALSE(tan.pass());
  CHECK_FALSE(tan.slopes_nonzero);
}

TEST_CASE("check_sy on C = 0 profiles") {
  // Q = (t - 1)(t^2 - 1/4) on t in [-1/2, 1/2]
  const Profile p = make_profile(ProfileSpec::type_c(2, 1, 0.75, 1, 0), {-0.5, 0.5});
  const SyReport s = check_sy(2, p);
  CHECK(s.a_analytic);
  CHECK(s.b_roots);
  CHECK(s.c_positive);
  CHECK(s.d_slopes_nonzero);
  CHECK_FALSE(s.e_slopes_opposite);
  CHECK(s.one_not_in_I);
  CHECK_FALSE(s.rationality_vacuous);
  CHECK(s.rationality_ok);

  const Profile z = make_profile(ProfileSpec::type_c(2, 1, 0, 1, 0), {1.2, 2});
  CHECK(check_sy(2, z).rationality_vacuous);

  CHECK(throws_code(ErrorCode::WrongFamily, [] { check_sy(2, make_profile(ProfileSpec::quadratic(1, 1), {-1, 1})); }));
  CHECK(throws_code(ErrorCode::PoleInInterval,
                    [] { make_profile(ProfileSpec::type_c(2, 1, 1, 1, 1), {0.5, 1.5}); }));
}

TEST_CASE("classify_type") {
  CHECK(classify_type(0, std::nullopt, {-1, 1}).tag == Tag::A);
  CHECK(classify_type(1, 2.0, {-1, 1}).tag == Tag::C1);
  CHECK(classify_type(1, 0.5, {-1, 1}).tag == Tag::C2);
  const TypeTag b = classify_type(-1, 0.0, {1, 2});
  CHECK(b.tag == Tag::B);
  CHECK(b.excluded);
  CHECK(throws_code(ErrorCode::Inconsistent, [] { classify_type(1, std::nullopt, {-1, 1}); }));
}

TEST_CASE("soliton profile solves its ODE") {
  SolitonParams s;
  s.m = 2;
  s.p = 1;
  s.s0 = 0;
  s.kappa = 0;
  s.c = 0;
  s.epsilon = 1;
  s.phi_a = 1;
  s.Q_a = 1;
  s.range = {0.5, 2};
  CHECK(soliton_rhs(s, 1.0, 1.0) == doctest::Approx(0.0));
  const SolitonProfile sp = soliton_profile(s);
  CHECK(soliton_ode_residual(s, sp.profile) < 1e-8);
  CHECK(std::abs(sp.profile.dQ(1.0)) < 1e-6);

  s.s0 = 0.5;
  s.kappa = 4;
  s.range = {1, 2};
  CHECK(soliton_ode_residual(s, soliton_profile(s).profile) < 1e-8);

  s.range = {-1, 1};
  CHECK(throws_code(ErrorCode::RangeContainsC, [&] { soliton_profile(s); }));
}

TEST_CASE("verify_bc2") {
  const Bc2Report a = verify_bc2(ProfileSpec::type_a(2, 1, 0, -6));
  CHECK(a.pass);
  CHECK(a.symmetric);
  CHECK(a.interval.lo == doctest::Approx(-1));

  const Bc2Report bad = verify_bc2(ProfileSpec::type_a(3, 1, 0.5, -6));
  CHECK(bad.interval_found);
  CHECK_FALSE(bad.mw1.slopes_opposite);

  const Bc2Report b = verify_bc2(ProfileSpec::type_b(3, 0, -1, -2));
  REQUIRE(b.interval_found);
  CHECK(std::abs(b.interval.lo + b.interval.hi) < 1e-9 * b.interval.hi);
}

TEST_CASE("C = 0 TypeC matches its polynomial expansion in t") {
  for (int m = 2; m <= 5; ++m) {
    const double c = 1.7, A = -2.0, B = 0.3;
    const Profile p = make_profile(ProfileSpec::type_c(m, c, A, B, 0), {-1, 1});
    for (int i = 0; i <= 20; ++i) {
      const double phi = -1 + 2.0 * i / 20, t = phi / c;
      double E = 0;
      for (int k = 1; k <= m; ++k)
        E += static_cast<double>(k) / m * binomial(2 * m - k - 1, m - 1) * std::pow(t, k - 1);
      E *= t - 1;
      const double expect = (t - 1) * (A + B * E);
      CHECK(p.Q(phi) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("derivative evaluators agree with finite differences") {
  const Profile p = make_profile(ProfileSpec::type_b(3, 0.7, -0.4, -1.1), {-0.5, 0.5});
  for (double phi : {-0.3, 0.0, 0.2, 0.41}) {
    const double h = 1e-5;
    const double fd = (p.Q(phi + h) - p.Q(phi - h)) / (2 * h);
    CHECK(std::abs(fd - p.dQ(phi)) <= 1e-8 * std::max(1.0, std::abs(p.dQ(phi))));
  }
}

TEST_CASE("parameter validation") {
  CHECK(throws_code(ErrorCode::BadParams, [] { make_profile(ProfileSpec::quadratic(1, 0), {-1, 1}); }));
  CHECK(throws_code(ErrorCode::BadParams, [] { make_profile(ProfileSpec::type_a(1, 1, 0, -1), {-1, 1}); }));
  CHECK(throws_code(ErrorCode::BadParams, [] { make_profile(ProfileSpec::type_c(2, 0, 1, 1, 0), {-1, 1}); }));
  CHECK(throws_code(ErrorCode::NonPositive, [] { make_profile(ProfileSpec::quadratic(1, 1), {-2, 1}); }));
}
