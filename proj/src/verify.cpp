#include "skrp/verify.hpp"

#include "skrp/error.hpp"

#include <algorithm>
#include <cmath>

namespace skrp {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// g-orthonormal frame e1 = v/|v|, e2 = Jv/|v|, then H by Gram-Schmidt on the coordinate basis
Mat adapted_frame(const Mat& g, const Mat& J, const Vec& v) {
  const int n = static_cast<int>(g.rows());
  Mat E(n, n);
  int k = 0;
  auto add = [&](Vec w) {
    for (int j = 0; j < k; ++j) w -= E.col(j).dot(g * w) * E.col(j);
    const double nrm = std::sqrt(w.dot(g * w));
    if (nrm < 1e-6 * std::sqrt(g.diagonal().maxCoeff())) return;
    E.col(k++) = w / nrm;
  };
  add(v);
  add(J * v);
  for (int i = 0; i < n && k < n; ++i) add(Vec::Unit(n, i));
  return E;
}

double block_max(const Mat& M, int r0, int nr, int c0, int nc) {
  if (nr <= 0 || nc <= 0) return 0.0;
  return M.block(r0, c0, nr, nc).cwiseAbs().maxCoeff();
}

double g_norm(const Mat& ginv, const Vec& w) { return std::sqrt(std::max(0.0, w.dot(ginv * w))); }

FDConfig outer_config(const VerifyOptions& opt) { return {opt.outer_h, opt.fd.order, true}; }
FDConfig nested_config(const VerifyOptions& opt) { return {opt.nested_h, opt.fd.order, true}; }

// differential of a scalar field computed from inner tensors, by an outer stencil
template <class F>
Vec outer_gradient(const Chart& chart, const F& f, const Vec& x, const VerifyOptions& opt) {
  const auto jet = detail::fd_jet<double, double>(chart, f, x, outer_config(opt), false);
  Vec d(chart.n);
  for (int i = 0; i < chart.n; ++i) d(i) = jet.d1[i];
  return d;
}

struct Decomp {
  PointTensors<double> t;
  Mat E, Hf, Rf;
  double tau, mu, sigma_trace, sigma_h, lambda;
};

Decomp decompose(const Chart& chart, const Vec& x, const FDConfig& fd, bool curvature) {
  Decomp d;
  d.t = point_tensors(chart, x, fd, curvature);
  if (!(std::sqrt(std::max(d.t.Q, 0.0)) > 1e-6)) throw Error(ErrorCode::CriticalPoint, "|grad phi| <= 1e-6");
  const int n = chart.n, m = n / 2;
  d.E = adapted_frame(d.t.g, chart.J, d.t.grad);
  d.Hf = d.E.transpose() * d.t.Hess * d.E;
  d.tau = d.Hf(0, 0);
  d.sigma_trace = m > 1 ? (d.t.Y - 2 * d.tau) / (2.0 * (m - 1)) : 0.0;
  d.sigma_h = m > 1 ? d.Hf.block(2, 2, n - 2, n - 2).trace() / (2.0 * (m - 1)) : 0.0;
  if (curvature) {
    d.Rf = d.E.transpose() * d.t.Ricci * d.E;
    d.mu = d.Rf(0, 0);
    d.lambda = m > 1 ? (d.Rf.trace() - 2 * d.mu) / (2.0 * (m - 1)) : 0.0;
  } else {
    d.mu = d.lambda = 0.0;
  }
  return d;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_points(const Model& model, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(model.sample(rng));
  return pts;
}

double SkrpReport::max_residual() const { return std::max({hess_H, ric_H, hess_mixed, ric_mixed, hess_V, ric_V}); }

SkrpReport skrp_report(const Chart& chart, const std::vector<Eigen::VectorXd>& points, const VerifyOptions& opt) {
  const int np = static_cast<int>(points.size());
  const int n = chart.n;
  SkrpReport rep;
  rep.samples.resize(np);
  struct Slot {
    double hH, rH, hM, rM, hV, rV;
    bool mismatch;
  };
  std::vector<Slot> slots(np);
  parallel_for(np, opt.threads, [&](int i) {
    const Decomp d = decompose(chart, points[i], opt.fd, true);
    PointSample& s = rep.samples[i];
    s = {points[i], d.t.phi, d.t.Q, d.sigma_trace, d.tau, d.lambda, d.mu, d.t.Y};
    const Mat I = Mat::Identity(n - 2, n - 2);
    Slot sl{};
    if (n > 2) {
      sl.hH = (d.Hf.block(2, 2, n - 2, n - 2) - s.sigma * I).cwiseAbs().maxCoeff();
      sl.rH = (d.Rf.block(2, 2, n - 2, n - 2) - s.lambda * I).cwiseAbs().maxCoeff();
    }
    sl.hM = block_max(d.Hf, 0, 2, 2, n - 2);
    sl.rM = block_max(d.Rf, 0, 2, 2, n - 2);
    sl.hV = (d.Hf.block(0, 0, 2, 2) - s.tau * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
    sl.rV = (d.Rf.block(0, 0, 2, 2) - s.mu * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
    sl.mismatch = chart.meta.epsilon != 0 && std::abs(s.sigma) > 1e-8 && sgn(s.sigma) != chart.meta.epsilon;
    slots[i] = sl;
  });
  for (const Slot& s : slots) {
    rep.hess_H = std::max(rep.hess_H, s.hH);
    rep.ric_H = std::max(rep.ric_H, s.rH);
    rep.hess_mixed = std::max(rep.hess_mixed, s.hM);
    rep.ric_mixed = std::max(rep.ric_mixed, s.rM);
    rep.hess_V = std::max(rep.hess_V, s.hV);
    rep.ric_V = std::max(rep.ric_V, s.rV);
    rep.epsilon_mismatches += s.mismatch;
  }
  return rep;
}

double IdentityReport::max_residual() const {
  double r = std::max({dQ, Y, dY});
  if (!sigma_c_vacuous) r = std::max(r, sigma_c);
  if (!profile_vacuous) r = std::max(r, profile);
  return r;
}

IdentityReport identity_report(const Chart& chart, const std::vector<Eigen::VectorXd>& points,
                               const VerifyOptions& opt, bool require_c) {
  const bool has_c = chart.meta.epsilon != 0 && chart.meta.c.has_value();
  if (require_c && !has_c) throw Error(ErrorCode::MissingC, "identity (iii) needs epsilon = +-1 and c");
  const int np = static_cast<int>(points.size());
  const int m = chart.n / 2;
  IdentityReport rep;
  rep.sigma_c_vacuous = !has_c;
  rep.profile_vacuous = !chart.meta.profile.has_value();
  std::vector<std::array<double, 5>> slots(np);
  const FDConfig inner = nested_config(opt);
  auto Qf = [&](const Vec& y) { return point_tensors(chart, y, inner, false).Q; };
  auto Yf = [&](const Vec& y) { return point_tensors(chart, y, inner, false).Y; };
  parallel_for(np, opt.threads, [&](int i) {
    const Vec& x = points[i];
    const Decomp d = decompose(chart, x, opt.fd, true);
    const double tau = d.tau + opt.tau_offset;
    std::array<double, 5> r{};
    const Vec dQ = outer_gradient(chart, Qf, x, opt);
    r[0] = g_norm(d.t.ginv, dQ - 2 * tau * d.t.dphi);
    r[1] = std::abs(d.t.Y - 2 * tau - 2.0 * (m - 1) * d.sigma_h);
    if (has_c) r[2] = std::abs(d.t.Q - 2 * (d.t.phi - *chart.meta.c) * d.sigma_h);
    const Vec dY = outer_gradient(chart, Yf, x, opt);
    r[3] = g_norm(d.t.ginv, dY + 2 * d.mu * d.t.dphi);
    if (chart.meta.profile) r[4] = std::abs(2 * tau - chart.meta.profile->dQ(d.t.phi));
    slots[i] = r;
  });
  for (const auto& r : slots) {
    rep.dQ = std::max(rep.dQ, r[0]);
    rep.Y = std::max(rep.Y, r[1]);
    rep.sigma_c = std::max(rep.sigma_c, r[2]);
    rep.dY = std::max(rep.dY, r[3]);
    rep.profile = std::max(rep.profile, r[4]);
  }
  return rep;
}

ConformalEinsteinReport conformal_einstein_report(const Chart& chart, const std::vector<Eigen::VectorXd>& points,
                                                  const VerifyOptions& opt) {
  const int np = static_cast<int>(points.size());
  double pmax = 0.0;
  std::vector<double> phis(np);
  for (int i = 0; i < np; ++i) {
    phis[i] = chart.phi(points[i]);
    pmax = std::max(pmax, std::abs(phis[i]));
  }
  for (double p : phis)
    if (!(std::abs(p) > 0.1 * pmax)) throw Error(ErrorCode::PhiNearZero, "|phi| <= 0.1 max|phi| at a sample point");
  const Chart tilde = conformal_chart(chart);
  const int n = chart.n;
  ConformalEinsteinReport rep;
  rep.lambdas.resize(np);
  std::vector<double> eres(np), wres(np);
  const FDConfig inner = nested_config(opt);
  auto Yf = [&](const Vec& y) { return point_tensors(chart, y, inner, false).Y; };
  parallel_for(np, opt.threads, [&](int i) {
    const Vec& x = points[i];
    const auto t = point_tensors(tilde, x, opt.fd, true);
    const Mat E = orthonormal_frame<double>(t.g);
    const Mat R = E.transpose() * t.Ricci * E;
    const double lam = R.trace() / n;
    rep.lambdas[i] = lam;
    eres[i] = (R - lam * Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    const auto base = point_tensors(chart, x, opt.fd, false);
    const Mat Eg = orthonormal_frame<double>(base.g);
    const Vec a = Eg.transpose() * base.dphi;
    const Vec b = Eg.transpose() * outer_gradient(chart, Yf, x, opt);
    wres[i] = (a * b.transpose() - b * a.transpose()).cwiseAbs().maxCoeff();
  });
  if (np > 0) {
    rep.einstein_res = *std::max_element(eres.begin(), eres.end());
    rep.wedge_res = *std::max_element(wres.begin(), wres.end());
    const auto [lo, hi] = std::minmax_element(rep.lambdas.begin(), rep.lambdas.end());
    rep.lambda_spread = *hi - *lo;
  }
  return rep;
}

double soliton_report(const Chart& chart, double p, double s0, const std::vector<Eigen::VectorXd>& points,
                      const VerifyOptions& opt) {
  const int np = static_cast<int>(points.size());
  const int n = chart.n;
  std::vector<double> res(np);
  parallel_for(np, opt.threads, [&](int i) {
    const auto t = point_tensors(chart, points[i], opt.fd, true);
    if (!(std::sqrt(std::max(t.Q, 0.0)) > 1e-6)) throw Error(ErrorCode::CriticalPoint, "|grad phi| <= 1e-6");
    const Mat E = orthonormal_frame<double>(t.g);
    const Mat M = E.transpose() * (t.Hess + p * t.Ricci) * E - s0 * Mat::Identity(n, n);
    res[i] = M.cwiseAbs().maxCoeff();
  });
  return np ? *std::max_element(res.begin(), res.end()) : 0.0;
}

namespace {

struct Fan {
  std::vector<GeodesicPath<double>> paths;
  double dtheta;
};

void fan_diagnostics(const Chart& chart, const Fan& fan, double sgn_a, const Profile& profile,
                     NormalGeodesicReport& rep) {
  const int k = static_cast<int>(fan.paths.size());
  std::size_t len = fan.paths[0].x.size();
  for (const auto& p : fan.paths) {
    len = std::min(len, p.x.size());
    rep.drift = std::max(rep.drift, p.drift);
    rep.left_domain = rep.left_domain || p.left_domain;
  }
  if (len < 5) throw Error(ErrorCode::LeftDomain, "geodesic fan left the chart immediately");
  const double ds = fan.paths[0].s[1] - fan.paths[0].s[0];
  const std::size_t stride = std::max<std::size_t>(1, len / 64);
  for (int j = 0; j < k; ++j) {
    const auto& p = fan.paths[j];
    for (std::size_t i = 2; i + 2 < len; i += stride) {
      const double dphi = (chart.phi(p.x[i - 2]) - 8 * chart.phi(p.x[i - 1]) + 8 * chart.phi(p.x[i + 1]) -
                           chart.phi(p.x[i + 2])) /
                          (12 * ds);
      const double phi = chart.phi(p.x[i]);
      rep.dphids_res = std::max(rep.dphids_res, std::abs(dphi - sgn_a * std::sqrt(std::max(0.0, profile.Q(phi)))));
      const auto& next = fan.paths[(j + 1) % k];
      const auto& prev = fan.paths[(j + k - 1) % k];
      const Vec xt = (next.x[i] - prev.x[i]) / (2 * fan.dtheta);
      rep.gauss_res = std::max(rep.gauss_res, std::abs(p.xdot[i].dot(chart.g(p.x[i]) * xt)));
    }
  }
}

}  // namespace

NormalGeodesicReport normal_geodesic_report(const SphereModel& sphere, const GeodesicOptions& opt) {
  const Chart& chart = sphere.model.chart;
  const Profile& profile = *chart.meta.profile;
  NormalGeodesicReport rep;
  Fan fan;
  fan.dtheta = 2 * M_PI / opt.fan;
  fan.paths.resize(opt.fan);
  const double s_max = 0.6 * sphere.L;
  parallel_for(opt.fan, 1, [&](int j) {
    const double th = j * fan.dtheta;
    Vec x0 = Vec::Zero(2), w0(2);
    w0 << std::cos(th), std::sin(th);
    fan.paths[j] = geodesic(chart, x0, w0, s_max, opt.fd, opt.steps);
  });
  fan_diagnostics(chart, fan, sgn(chart.meta.a), profile, rep);

  // pole to pole: leave through |x| = 1 into the dual chart, stop at its center
  const auto& p = fan.paths[0];
  std::size_t cross = 0;
  while (cross + 1 < p.x.size() && p.x[cross + 1].norm() < 1.0) ++cross;
  if (cross + 1 >= p.x.size()) throw Error(ErrorCode::LeftDomain, "geodesic did not reach |x| = 1");
  const Vec z0 = inversion(p.x[cross]);
  const Vec w0 = inversion_jacobian(p.x[cross]) * p.xdot[cross];
  const auto q = geodesic(sphere.dual.chart, z0, w0, s_max, opt.fd, opt.steps);
  rep.drift = std::max(rep.drift, q.drift);
  double s_star = -1;
  for (std::size_t i = 0; i + 1 < q.x.size(); ++i) {
    const double f0 = q.x[i].dot(q.xdot[i]), f1 = q.x[i + 1].dot(q.xdot[i + 1]);
    if (f0 < 0 && f1 >= 0) {
      s_star = q.s[i] + (q.s[i + 1] - q.s[i]) * f0 / (f0 - f1);
      break;
    }
  }
  if (s_star < 0) throw Error(ErrorCode::LeftDomain, "geodesic did not reach the opposite pole");
  rep.arclength = p.s[cross] + s_star;
  rep.distance_vs_L = std::abs(rep.arclength - sphere.L);
  return rep;
}

NormalGeodesicReport normal_geodesic_report(const Model& shell, const GeodesicOptions& opt) {
  const Chart& chart = shell.chart;
  if (!chart.meta.profile) throw Error(ErrorCode::MissingMeta, "chart carries no profile");
  const Profile& profile = *chart.meta.profile;
  const RadialMap& map = *shell.radial;
  const double r1 = map.r(shell.sample_phi.lo), r2 = map.r(shell.sample_phi.hi);
  const double phi_in = r1 < r2 ? shell.sample_phi.lo : shell.sample_phi.hi;
  const double phi_out = r1 < r2 ? shell.sample_phi.hi : shell.sample_phi.lo;
  const double r_in = std::min(r1, r2);
  const double s_max = 0.9 * std::abs(arclength(profile, phi_in, phi_out));
  const int n = chart.n;
  NormalGeodesicReport rep;
  Fan fan;
  fan.dtheta = 2 * M_PI / opt.fan;
  fan.paths.resize(opt.fan);
  parallel_for(opt.fan, 1, [&](int j) {
    const double th = j * fan.dtheta;
    Vec x0 = Vec::Zero(n);
    x0(0) = r_in * std::cos(th);
    x0(2) = r_in * std::sin(th);
    fan.paths[j] = geodesic(chart, x0, Vec(x0 / r_in), s_max, opt.fd, opt.steps);
  });
  fan_diagnostics(chart, fan, sgn(chart.meta.a), profile, rep);
  return rep;
}

Classification classify_model(const ChartMeta& meta) {
  if (!meta.profile) throw Error(ErrorCode::MissingMeta, "chart meta carries no profile");
  Classification c;
  const std::optional<double> cc = meta.epsilon != 0 ? meta.c : std::nullopt;
  c.tag = classify_type(meta.epsilon, cc, meta.profile->interval());
  if (c.tag.tag == Tag::B) c.notes.push_back("excluded: type B cannot be realized on a compact manifold");
  if (c.tag.tag == Tag::C2) c.notes.push_back("advisory: type C2 requires 1 in the t-interval");
  return c;
}

}  // namespace skrp
