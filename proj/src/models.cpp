#include "skrp/models.hpp"

#include "skrp/error.hpp"

#include <cmath>

namespace skrp {

namespace {

Eigen::VectorXd random_direction(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (;;) {
    for (int i = 0; i < n; i += 2) {
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      const double rad = std::sqrt(-2.0 * std::log(u1));
      v(i) = rad * std::cos(2 * M_PI * u2);
      if (i + 1 < n) v(i + 1) = rad * std::sin(2 * M_PI * u2);
    }
    const double nrm = v.norm();
    if (nrm > 1e-8) return v / nrm;
  }
}

// the same H/V metric for shells and balls: theta_H on H, theta_V on V = span{x, Jx}
Eigen::MatrixXd hv_metric(const Eigen::VectorXd& x, const Eigen::MatrixXd& J, double theta_h, double theta_v) {
  const int n = static_cast<int>(x.size());
  const Eigen::VectorXd jx = J * x;
  const double r2 = x.squaredNorm();
  Eigen::MatrixXd g = theta_h * Eigen::MatrixXd::Identity(n, n);
  if (r2 > 0) g += (theta_v - theta_h) / r2 * (x * x.transpose() + jx * jx.transpose());
  return g;
}

std::pair<double, double> default_anchor(const Profile& p, const std::optional<std::pair<double, double>>& a) {
  return a ? *a : std::make_pair(p.interval().mid(), 1.0);
}

struct RadialChart {
  std::shared_ptr<const RadialMap> map;
  std::shared_ptr<const PiecewiseChebyshev> fit;  // phi as a function of log r
  double r_lo, r_hi;
  Interval phi_range;
};

RadialChart radial_chart(const Profile& profile, double a, std::pair<double, double> anchor, double margin) {
  RadialChart rc;
  rc.map = std::make_shared<const RadialMap>(profile, a, anchor.first, anchor.second);
  const Interval iv = profile.interval();
  rc.phi_range = {iv.lo + margin * iv.length(), iv.hi - margin * iv.length()};
  const double l1 = rc.map->log_r(rc.phi_range.lo), l2 = rc.map->log_r(rc.phi_range.hi);
  if (std::max(std::abs(l1), std::abs(l2)) > std::log(ReparamTable::kSentinel))
    throw Error(ErrorCode::TableRangeExceeded, "chart radii exceed the table sentinel");
  rc.r_lo = std::exp(std::min(l1, l2));
  rc.r_hi = std::exp(std::max(l1, l2));
  auto map = rc.map;
  rc.fit = std::make_shared<const PiecewiseChebyshev>(
      [map](double lr) { return Eigen::VectorXd::Constant(1, map->phi_of_log_r(lr)); }, std::min(l1, l2),
      std::max(l1, l2), 24, 5e-14, 1024);
  return rc;
}

// inset 5% in phi and 10% in r from the chart boundary
Interval sample_range(const RadialChart& rc) {
  const double inset = 0.05 * rc.phi_range.length();
  const double p1 = rc.map->phi_of_log_r(std::log(rc.r_lo) + 0.1);
  const double p2 = rc.map->phi_of_log_r(std::log(rc.r_hi) - 0.1);
  Interval iv{std::max(rc.phi_range.lo + inset, std::min(p1, p2)), std::min(rc.phi_range.hi - inset, std::max(p1, p2))};
  if (!(iv.hi > iv.lo)) throw Error(ErrorCode::TableRangeExceeded, "chart too thin to sample");
  return iv;
}

}  // namespace

Model build_shell(const ShellSpec& spec) {
  const Profile& profile = spec.profile;
  const Interval iv = profile.interval();
  if (spec.m < 2 || spec.m > 4) throw Error(ErrorCode::SpecInvariantViolated, "shell needs 2 <= m <= 4");
  if (spec.epsilon != 1 && spec.epsilon != -1) throw Error(ErrorCode::SpecInvariantViolated, "epsilon must be +1 or -1");
  if (!(spec.epsilon * spec.a > 0)) throw Error(ErrorCode::SpecInvariantViolated, "epsilon * a must be positive");
  if (spec.epsilon * (iv.lo - spec.c) < 0 || spec.epsilon * (iv.hi - spec.c) < 0)
    throw Error(ErrorCode::SpecInvariantViolated, "epsilon * (phi - c) must be positive on the interval");

  const RadialChart rc = radial_chart(profile, spec.a, default_anchor(profile, spec.anchor), spec.margin);
  const int n = 2 * spec.m;
  Model model;
  model.radial = rc.map;
  Chart& chart = model.chart;
  chart.n = n;
  chart.J = standard_J<double>(n);
  const double r_lo = rc.r_lo, r_hi = rc.r_hi;
  chart.domain = [r_lo, r_hi](const Eigen::VectorXd& x) {
    const double r = x.norm();
    return r > r_lo && r < r_hi;
  };
  auto map = rc.map;
  auto fit = rc.fit;
  chart.phi = [fit](const Eigen::VectorXd& x) { return (*fit)(std::log(x.norm()), 0); };
  const double a = spec.a, c = spec.c;
  const Eigen::MatrixXd J = chart.J;
  chart.g = [fit, a, c, J, profile](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double r2 = x.squaredNorm();
    const double phi = (*fit)(0.5 * std::log(r2), 0);
    const double th = 2.0 * std::abs(phi - c) / (std::abs(a) * r2);
    const double tv = profile.Q(phi) / (a * a * r2);
    return hv_metric(x, J, th, tv);
  };
  chart.scale = std::sqrt(r_lo * r_hi);
  chart.local_scale = [](const Eigen::VectorXd& x) { return x.norm(); };
  chart.meta = {"shell", spec.m, spec.a, spec.epsilon, spec.c, profile};

  model.sample_phi = sample_range(rc);
  const Interval sp = model.sample_phi;
  model.sample = [map, sp, n](Rng& rng) -> Eigen::VectorXd {
    const double phi = rng.uniform(sp.lo, sp.hi);
    return map->r(phi) * random_direction(rng, n);
  };
  return model;
}

Model build_annulus(const AnnulusSpec& spec) {
  const Profile& profile = spec.profile;
  const RadialChart rc = radial_chart(profile, spec.a, default_anchor(profile, spec.anchor), spec.margin);
  Model model;
  model.radial = rc.map;
  Chart& chart = model.chart;
  chart.n = 2;
  chart.J = standard_J<double>(2);
  const double r_lo = rc.r_lo, r_hi = rc.r_hi;
  chart.domain = [r_lo, r_hi](const Eigen::VectorXd& x) {
    const double r = x.norm();
    return r > r_lo && r < r_hi;
  };
  auto map = rc.map;
  auto fit = rc.fit;
  chart.phi = [fit](const Eigen::VectorXd& x) { return (*fit)(std::log(x.norm()), 0); };
  const double a = spec.a;
  chart.g = [fit, a, profile](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double r2 = x.squaredNorm();
    const double phi = (*fit)(0.5 * std::log(r2), 0);
    return profile.Q(phi) / (a * a * r2) * Eigen::MatrixXd::Identity(2, 2);
  };
  chart.scale = std::sqrt(r_lo * r_hi);
  chart.local_scale = [](const Eigen::VectorXd& x) { return x.norm(); };
  chart.meta = {"annulus", 1, spec.a, 0, std::nullopt, profile};

  model.sample_phi = sample_range(rc);
  const Interval sp = model.sample_phi;
  model.sample = [map, sp](Rng& rng) -> Eigen::VectorXd {
    const double phi = rng.uniform(sp.lo, sp.hi);
    return map->r(phi) * random_direction(rng, 2);
  };
  return model;
}

Model build_ball(const BallSpec& spec) {
  const Profile& profile = spec.profile;
  if (spec.m < 1 || spec.m > 4) throw Error(ErrorCode::SpecInvariantViolated, "ball needs 1 <= m <= 4");
  const auto anchor = default_anchor(profile, spec.anchor);
  auto map = std::make_shared<const RadialMap>(profile, spec.a, anchor.first, anchor.second);
  if (!map->has_center()) throw Error(ErrorCode::WrongEndpoint, "no endpoint with Q = 0 and dQ/dphi = 2a");
  const double e = map->center_root();
  const double span = map->center_span();
  const double u_max = 0.98 * span;
  double xi_max;
  {
    // r^2 at u_max: E(u) = r^2/u
    const double phi_max = e + (e == profile.interval().lo ? u_max : -u_max);
    xi_max = std::exp(2.0 * map->log_r(phi_max));
  }
  const int n = 2 * spec.m;
  Model model;
  model.radial = map;
  Chart& chart = model.chart;
  chart.n = n;
  chart.J = standard_J<double>(n);
  const double r_max = std::sqrt(xi_max);
  chart.domain = [r_max](const Eigen::VectorXd& x) { return x.norm() < r_max; };
  // (phi, E, p) as functions of xi = r^2
  auto fit = std::make_shared<const PiecewiseChebyshev>(
      [map](double xi) {
        const auto c = map->center(xi);
        return Eigen::Vector3d(c.phi, c.E, c.p).eval();
      },
      0.0, xi_max, 24, 5e-14, 1024);
  chart.phi = [fit](const Eigen::VectorXd& x) { return (*fit)(x.squaredNorm(), 0); };
  const double a = spec.a;
  const Eigen::MatrixXd J = chart.J;
  chart.g = [fit, a, J](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::VectorXd c = (*fit)(x.squaredNorm());
    const double E = c(1), p = c(2);
    const double th = 2.0 / (std::abs(a) * E);
    const double c1 = p / (a * a * E * E);
    const int n = static_cast<int>(x.size());
    const Eigen::VectorXd jx = J * x;
    return th * Eigen::MatrixXd::Identity(n, n) + c1 * (x * x.transpose() + jx * jx.transpose());
  };
  chart.scale = 0.5 * r_max;
  chart.meta = {spec.m == 1 ? "sphere" : "ball", spec.m, spec.a, spec.m == 1 ? 0 : (spec.a > 0 ? 1 : -1), e, profile};
  if (spec.m == 1) chart.meta.c.reset();

  const double sigma = e == profile.interval().lo ? 1.0 : -1.0;
  model.sample_phi = {std::min(e + sigma * 0.02 * span, e + sigma * 0.9 * span),
                      std::max(e + sigma * 0.02 * span, e + sigma * 0.9 * span)};
  const Interval sp = model.sample_phi;
  model.sample = [map, sp, n](Rng& rng) -> Eigen::VectorXd {
    const double phi = rng.uniform(sp.lo, sp.hi);
    return map->r(phi) * random_direction(rng, n);
  };
  return model;
}

SphereModel build_sphere(const SphereSpec& spec) {
  if (!(spec.K > 0) || spec.phi0 == 0.0) throw Error(ErrorCode::SpecInvariantViolated, "sphere needs K > 0, phi0 != 0");
  const double w = std::abs(spec.phi0);
  const Profile profile = make_profile(ProfileSpec::quadratic(spec.K, spec.phi0), {-w, w});
  SphereModel s;
  const double a = -spec.K * spec.phi0;
  s.model = build_ball({1, profile, a, std::make_pair(0.0, 1.0)});
  s.dual = build_ball({1, profile, -a, std::make_pair(0.0, 1.0)});
  s.model.chart.meta.model = "sphere";
  s.dual.chart.meta.model = "sphere/dual";
  auto map = s.model.radial;
  const double K = spec.K;
  const double R = std::sqrt(K) * w;
  s.chi = [map, K, R](const Eigen::VectorXd& z) -> Eigen::Vector3d {
    const auto c = map->center(z.squaredNorm());
    const double qr = std::sqrt(std::abs(c.q) / c.E);  // sqrt(Q / r^2)
    return Eigen::Vector3d(qr * z(0), qr * z(1), std::sqrt(K) * c.phi) / R;
  };
  s.L = compute_L(profile);
  return s;
}

Model build_product(const ProductSpec& spec) {
  if (!(spec.K > 0) || spec.t == 0.0) throw Error(ErrorCode::SpecInvariantViolated, "product needs K > 0, t != 0");
  const double K = spec.K, t = spec.t;
  Model model;
  Chart& chart = model.chart;
  chart.n = 4;
  chart.J = standard_J<double>(4);
  chart.domain = [](const Eigen::VectorXd& x) { return x.head(2).norm() < 0.95 && x.tail(2).norm() < 3.0; };
  chart.g = [K](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    const double z2 = x.head(2).squaredNorm(), w2 = x.tail(2).squaredNorm();
    const double base = 4.0 / (K * (1 - z2) * (1 - z2));
    const double fibre = 4.0 / (K * (1 + w2) * (1 + w2));
    g(0, 0) = g(1, 1) = base;
    g(2, 2) = g(3, 3) = fibre;
    return g;
  };
  chart.phi = [t](const Eigen::VectorXd& x) {
    const double w2 = x.tail(2).squaredNorm();
    return t * (w2 - 1) / (w2 + 1);
  };
  chart.scale = 0.5;
  const double w = std::abs(t);
  chart.meta = {"product", 2, 0.0, 0, std::nullopt, make_profile(ProfileSpec::quadratic(K, t), {-w, w})};
  model.sample_phi = {-w, w};
  model.sample = [](Rng& rng) -> Eigen::VectorXd {
    Eigen::VectorXd x(4);
    const double rz = 0.9 * std::sqrt(rng.uniform()), az = 2 * M_PI * rng.uniform();
    const double rw = rng.uniform(0.1, 0.5), aw = 2 * M_PI * rng.uniform();
    x << rz * std::cos(az), rz * std::sin(az), rw * std::cos(aw), rw * std::sin(aw);
    return x;
  };
  return model;
}

Model build_model(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> Model {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ShellSpec>) return build_shell(s);
        if constexpr (std::is_same_v<T, AnnulusSpec>) return build_annulus(s);
        if constexpr (std::is_same_v<T, SphereSpec>) return build_sphere(s).model;
        if constexpr (std::is_same_v<T, ProductSpec>) return build_product(s);
        if constexpr (std::is_same_v<T, BallSpec>) return build_ball(s);
      },
      spec);
}

BallCoeffs ball_extension_coeffs(const Profile& profile, double a, double c, double r,
                                 std::optional<std::pair<double, double>> anchor) {
  const Interval iv = profile.interval();
  if ((c != iv.lo && c != iv.hi) || !profile.endpoint_is_root(c) ||
      std::abs(profile.dQ(c) - 2.0 * a) > 1e-6 * std::abs(2.0 * a))
    throw Error(ErrorCode::WrongEndpoint, "c must be an endpoint with Q = 0 and dQ/dphi = 2a");
  const auto an = default_anchor(profile, anchor);
  const RadialMap map(profile, a, an.first, an.second);
  if (!map.has_center() || map.center_root() != c) throw Error(ErrorCode::WrongEndpoint, "no center frame at c");
  const auto cf = map.center(r * r);
  const double a2 = a * a;
  return {cf.p / (a2 * a2 * cf.E * cf.E), 2.0 / (std::abs(a) * cf.E)};
}

namespace {

std::array<std::complex<double>, 2> tautological_gamma(const Eigen::Vector2d& y) {
  const std::complex<double> yc(y(0), y(1));
  const double n2 = 1.0 + std::norm(yc);
  // <dw(v), w> / <w, w> with w = (1, y), dw(d/dy1) = (0, 1), dw(d/dy2) = (0, i)
  return {std::conj(yc) / n2, std::complex<double>(0, 1) * std::conj(yc) / n2};
}

}  // namespace

Eigen::Matrix2d fubini_study_metric(const Eigen::Vector2d& y) {
  const std::complex<double> yc(y(0), y(1));
  const double n2 = 1.0 + std::norm(yc);
  const std::complex<double> dw[2] = {1.0, std::complex<double>(0, 1)};
  Eigen::Matrix2d g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const std::complex<double> flat = dw[i] * std::conj(dw[j]);
      const std::complex<double> proj = dw[i] * std::conj(yc) * yc * std::conj(dw[j]);
      g(i, j) = std::real(flat / n2 - proj / (n2 * n2));
    }
  return g;
}

TautologicalData tautological_connection(const Eigen::Vector2d& y, const FDConfig& fd) {
  TautologicalData out;
  const auto G = tautological_gamma(y);
  out.Gamma[0] = G[0];
  out.Gamma[1] = G[1];
  auto partial = [&](int dir, int comp, double h) {
    auto at = [&](double s) {
      Eigen::Vector2d z = y;
      z(dir) += s * h;
      return tautological_gamma(z)[comp];
    };
    return ((at(-2) - at(2)) + 8.0 * (at(1) - at(-1))) / (12.0 * h);
  };
  auto dgamma = [&](double h) { return partial(0, 1, h) - partial(1, 0, h); };
  std::complex<double> d = dgamma(fd.h);
  if (fd.richardson) d = (16.0 * d - dgamma(2 * fd.h)) / 15.0;
  out.Omega = std::complex<double>(0, 1) * d;
  out.imag_residual = std::abs(out.Omega.imag());
  // omega(u, v) = g(Ju, v) with J d/dy1 = d/dy2
  const Eigen::Matrix2d g = fubini_study_metric(y);
  out.omega_fs = g(1, 1);
  return out;
}

Eigen::VectorXd inversion(const Eigen::VectorXd& z) {
  const double r2 = z.squaredNorm();
  Eigen::VectorXd w(2);
  w << z(0) / r2, -z(1) / r2;
  return w;
}

Eigen::MatrixXd inversion_jacobian(const Eigen::VectorXd& z) {
  const double x = z(0), y = z(1), r2 = z.squaredNorm(), r4 = r2 * r2;
  Eigen::MatrixXd D(2, 2);
  D << (y * y - x * x) / r4, -2 * x * y / r4, 2 * x * y / r4, (y * y - x * x) / r4;
  return D;
}

}  // namespace skrp
