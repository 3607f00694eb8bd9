#include "skrp/error.hpp"
#include "skrp/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace skrp;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

std::vector<Vec> box_points(int n, int count, std::uint64_t seed, double lo = 0.2, double hi = 0.8) {
  Rng rng(seed);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec x(n);
    for (int k = 0; k < n; ++k) x(k) = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(lo, hi);
    pts.push_back(x);
  }
  return pts;
}

Model typec_shell(double lo, double hi) {
  return build_shell({2, make_profile(ProfileSpec::type_c(2, 1.0, 2.0, -1.0, 0.0), {lo, hi}), 1.0, 1, 1.0});
}

}  // namespace

TEST_CASE("flat space with the norm-squared potential") {
  const Chart e = euclidean_chart<double>(4, [](const Vec& x) { return x.squaredNorm(); });
  const auto pts = box_points(4, 10, 1);
  const SkrpReport r = skrp_report(e, pts);
  for (const auto& s : r.samples) {
    CHECK(s.sigma == doctest::Approx(2).epsilon(1e-8));
    CHECK(s.tau == doctest::Approx(2).epsilon(1e-8));
    CHECK(std::abs(s.lambda) < 1e-8);
    CHECK(std::abs(s.mu) < 1e-8);
  }
  CHECK(r.max_residual() < 1e-8);
  VerifyOptions wide;
  wide.fd.h = 1e-2;
  CHECK(soliton_report(e, 0.37, 2.0, pts, wide) < 1e-10);
}

TEST_CASE("shell identities and epsilon consistency") {
  const Model M = build_shell({2, make_profile(ProfileSpec::polynomial({0.5, 0.3, -0.2, 0.1}), {1, 2}), 1.0, 1, 0.0});
  const auto pts = sample_points(M, 100, 2);
  const SkrpReport r = skrp_report(M.chart, pts);
  CHECK(r.max_residual() < 1e-5);
  CHECK(r.epsilon_mismatches == 0);
  const IdentityReport id = identity_report(M.chart, pts, {}, true);
  CHECK(id.max_residual() < 1e-5);
  CHECK_FALSE(id.sigma_c_vacuous);
}

TEST_CASE("identity (ii) catches a shifted tau") {
  const Model M = build_shell({2, make_profile(ProfileSpec::polynomial({0.5, 0.3, -0.2, 0.1}), {1, 2}), 1.0, 1, 0.0});
  const auto pts = sample_points(M, 10, 3);
  VerifyOptions opt;
  opt.tau_offset = 1e-3;
  CHECK(identity_report(M.chart, pts, opt).Y > 1e-4);
}

TEST_CASE("product model: sigma vanishes, identity (iii) vacuous") {
  const Model P = build_product({1, 1});
  const auto pts = sample_points(P, 30, 4);
  const SkrpReport r = skrp_report(P.chart, pts);
  for (const auto& s : r.samples) CHECK(std::abs(s.sigma) < 1e-7);
  const IdentityReport id = identity_report(P.chart, pts);
  CHECK(id.sigma_c_vacuous);
  CHECK(id.max_residual() < 1e-5);
  CHECK_THROWS_AS(identity_report(P.chart, pts, {}, true), Error);
}

TEST_CASE("conformally Einstein residuals") {
  const Model T = typec_shell(1.15, 1.65);
  const auto pts = sample_points(T, 30, 5);
  const auto ce = conformal_einstein_report(T.chart, pts);
  CHECK(ce.einstein_res < 1e-4);
  CHECK(ce.lambda_spread < 1e-4);
  CHECK(ce.wedge_res < 1e-6);

  const Model G = build_shell({2, make_profile(ProfileSpec::polynomial({0.5, 0.3, -0.2, 0.1}), {1, 2}), 1.0, 1, 0.0});
  CHECK(conformal_einstein_report(G.chart, sample_points(G, 10, 6)).einstein_res > 1e-2);

  const Chart lin = euclidean_chart<double>(4, [](const Vec& x) { return x(0); });
  std::vector<Vec> cross = box_points(4, 5, 7);
  cross[0](0) = 1e-4;
  CHECK_THROWS_AS(conformal_einstein_report(lin, cross), Error);
}

TEST_CASE("classification of model charts") {
  CHECK(classify_model(build_product({1, 1}).chart.meta).tag.tag == Tag::A);
  CHECK(classify_model(typec_shell(1.15, 1.65).chart.meta).tag.tag == Tag::C1);
  ChartMeta m = typec_shell(1.15, 1.65).chart.meta;
  m.c = 1.3;
  const Classification c2 = classify_model(m);
  CHECK(c2.tag.tag == Tag::C2);
  CHECK_FALSE(c2.notes.empty());
  CHECK_THROWS_AS(classify_model(euclidean_chart(4).meta), Error);
}

TEST_CASE("constant rescaling of the metric") {
  const Model M = build_shell({2, make_profile(ProfileSpec::quadratic(1, 1), {0.2, 0.9}), 1.0, 1, 0.0});
  Chart big = M.chart;
  big.g = [g = M.chart.g](const Vec& x) -> Mat { return 4.0 * g(x); };
  const auto pts = sample_points(M, 10, 8);
  const SkrpReport r1 = skrp_report(M.chart, pts), r4 = skrp_report(big, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto G1 = connection_coefficients(M.chart, pts[i]), G4 = connection_coefficients(big, pts[i]);
    CHECK(std::abs(G1(0, 1, 2) - G4(0, 1, 2)) < 1e-10 * std::max(1.0, G1.max_abs()));
    CHECK(r4.samples[i].lambda == doctest::Approx(r1.samples[i].lambda / 4).epsilon(1e-6));
    CHECK(r4.samples[i].mu == doctest::Approx(r1.samples[i].mu / 4).epsilon(1e-6));
  }
  CHECK(classify_model(big.meta).tag.tag == classify_model(M.chart.meta).tag.tag);
}

TEST_CASE("reports do not depend on the thread count") {
  const Model P = build_product({1, 1});
  const auto pts = sample_points(P, 12, 9);
  VerifyOptions one, four;
  four.threads = 4;
  const SkrpReport a = skrp_report(P.chart, pts, one), b = skrp_report(P.chart, pts, four);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(a.samples[i].lambda == b.samples[i].lambda);
    CHECK(a.samples[i].sigma == b.samples[i].sigma);
  }
  CHECK(a.max_residual() == b.max_residual());
}

TEST_CASE("normal geodesics on the sphere") {
  const auto g = normal_geodesic_report(build_sphere({4, 1}));
  CHECK(g.dphids_res < 1e-5);
  CHECK(g.gauss_res < 1e-4);
  REQUIRE(g.distance_vs_L);
  CHECK(*g.distance_vs_L < 1e-4);
}
