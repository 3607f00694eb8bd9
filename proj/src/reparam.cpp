#include "skrp/reparam.hpp"

#include "skrp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skrp {

namespace {

constexpr int kPanelNodes = 20;

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// cubic Hermite on a single piece
double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0, t = (x - x0) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;
}

double hermite_d1(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0, t = (x - x0) / h;
  const double g00 = 6 * t * t - 6 * t, g10 = 3 * t * t - 4 * t + 1, g11 = 3 * t * t - 2 * t;
  return g00 * (y0 - y1) / h + g10 * d0 + g11 * d1;
}

// index i with x in [xs[i], xs[i+1]] for monotone xs of either direction
std::size_t bracket(const std::vector<double>& xs, double x) {
  const std::size_t n = xs.size();
  if (xs.back() > xs.front()) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    return std::min(i, n - 2);
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x, [](double v, double e) { return v > e; });
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(i, n - 2);
}

}  // namespace

LogDensity::LogDensity(const Profile& profile) : profile_(profile) {
  const Interval iv = profile.interval();
  for (double e : {iv.lo, iv.hi}) {
    if (profile.endpoint_is_root(e)) {
      defl_.push_back(profile.deflation(e));
      poles_.push_back({e, 1.0 / defl_.back().q0()});
    }
  }
  breaks_ = profile.panel_breaks(64);
  cumulative_.assign(breaks_.size(), 0.0);
  const GaussRule& rule = gauss_legendre(kPanelNodes);
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] +
                     gauss_integrate([this](double x) { return regular(x); }, breaks_[i - 1], breaks_[i], rule);
}

double LogDensity::regular(double phi) const {
  if (poles_.empty()) return 1.0 / profile_.Q(phi);
  std::size_t k = 0;
  for (std::size_t j = 1; j < poles_.size(); ++j)
    if (std::abs(phi - poles_[j].first) < std::abs(phi - poles_[k].first)) k = j;
  double val = -poles_[k].second * defl_[k].p(phi) / defl_[k].q(phi);
  for (std::size_t j = 0; j < poles_.size(); ++j)
    if (j != k) val -= poles_[j].second / (phi - poles_[j].first);
  return val;
}

double LogDensity::singular_log(double phi) const {
  double s = 0.0;
  for (const auto& [e, res] : poles_) s += res * std::log(std::abs(phi - e));
  return s;
}

double LogDensity::regular_integral(double phi) const {
  std::size_t i = bracket(breaks_, phi);
  if (phi < breaks_.front()) i = 0;
  return cumulative_[i] +
         gauss_integrate([this](double x) { return regular(x); }, breaks_[i], phi, gauss_legendre(kPanelNodes));
}

double RadialMap::CenterData::integrand(double u) const {
  const double phi = defl.root() + sigma * u;
  return -sigma * defl.p(phi) / defl.q(phi);
}

double RadialMap::CenterData::S(double u) const {
  std::size_t i = bracket(breaks, u);
  if (u < 0) i = 0;
  return cumulative[i] +
         gauss_integrate([this](double x) { return integrand(x); }, breaks[i], u, gauss_legendre(kPanelNodes));
}

RadialMap::RadialMap(const Profile& profile, double a, double phi_a, double r_a)
    : dens_(profile), a_(a), phi_a_(phi_a), r_a_(r_a) {
  const Interval iv = profile.interval();
  if (a == 0.0) throw Error(ErrorCode::BadParams, "a must be nonzero");
  if (!iv.interior(phi_a) || !(r_a > 0)) throw Error(ErrorCode::AnchorOutOfRange, "anchor must be interior with r > 0");
  offset_ = std::log(r_a) - a * (dens_.singular_log(phi_a) + dens_.regular_integral(phi_a));
  const int n = 257;
  for (int i = 0; i < n; ++i) {
    const double x = iv.lo + iv.length() * (i + 0.5) / n;
    guess_phi_.push_back(x);
    guess_logr_.push_back(log_r(x));
  }
  for (double e : {iv.lo, iv.hi}) {
    if (!profile.endpoint_is_root(e)) continue;
    const Deflation d = profile.deflation(e);
    if (std::abs(d.q0() - 2.0 * a) > 1e-6 * std::abs(2.0 * a)) continue;
    CenterData c;
    c.defl = d;
    c.sigma = e == iv.lo ? 1.0 : -1.0;
    const double ua = std::abs(phi_a - e);
    c.span = std::max(0.9 * iv.length(), ua);
    const int panels = 64;
    for (int i = 0; i <= panels; ++i) c.breaks.push_back(c.span * i / panels);
    c.cumulative.assign(c.breaks.size(), 0.0);
    const GaussRule& rule = gauss_legendre(kPanelNodes);
    for (std::size_t i = 1; i < c.breaks.size(); ++i)
      c.cumulative[i] = c.cumulative[i - 1] +
                        gauss_integrate([&c](double x) { return c.integrand(x); }, c.breaks[i - 1], c.breaks[i], rule);
    c.E0 = r_a * r_a / (ua * std::exp(c.S(ua)));
    center_ = std::move(c);
    break;
  }
}

double RadialMap::log_r(double phi) const {
  return offset_ + a_ * (dens_.singular_log(phi) + dens_.regular_integral(phi));
}

double RadialMap::phi_of_log_r(double target) const {
  const Interval iv = profile().interval();
  const bool increasing = a_ > 0;
  // bracket [lo, hi] in phi with log r(lo) <= target <= log r(hi) in the increasing sense
  double lo = iv.lo, hi = iv.hi;
  const std::size_t n = guess_phi_.size();
  auto below = [&](std::size_t i) { return increasing ? guess_logr_[i] <= target : guess_logr_[i] >= target; };
  std::size_t k = 0;
  while (k < n && below(k)) ++k;
  if (k > 0) lo = guess_phi_[k - 1];
  if (k < n) hi = guess_phi_[k];
  double x;
  if (k > 0 && k < n) {
    const double w = (target - guess_logr_[k - 1]) / (guess_logr_[k] - guess_logr_[k - 1]);
    x = lo + w * (hi - lo);
  } else {
    x = 0.5 * (lo + hi);
  }
  for (int it = 0; it < 100; ++it) {
    const double f = log_r(x) - target;
    if (f == 0.0) return x;
    if ((f < 0) == increasing)
      lo = x;
    else
      hi = x;
    const double step = f * profile().Q(x) / a_;
    double nx = x - step;
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 2e-16 * std::max(1.0, std::abs(x))) return nx;
    x = nx;
    if (hi - lo <= 1e-300) return x;
  }
  return x;
}

double RadialMap::center_root() const {
  if (!center_) throw Error(ErrorCode::WrongEndpoint, "no endpoint with Q' = 2a");
  return center_->defl.root();
}

double RadialMap::center_span() const {
  if (!center_) throw Error(ErrorCode::WrongEndpoint, "no endpoint with Q' = 2a");
  return center_->span;
}

RadialMap::Center RadialMap::center(double xi) const {
  if (!center_) throw Error(ErrorCode::WrongEndpoint, "no endpoint with Q' = 2a");
  const CenterData& c = *center_;
  const double e = c.defl.root();
  auto frame = [&](double u, double E) {
    const double phi = e + c.sigma * u;
    const double q = c.defl.q(phi);
    return Center{u, E, q, c.defl.p(phi), phi, c.sigma * u * q};
  };
  if (xi <= 0.0) return frame(0.0, c.E0);
  double lo = 0.0, hi = c.span;
  double u = std::min(xi / c.E0, 0.5 * c.span);
  double E = c.E0 * std::exp(c.S(u));
  for (int it = 0; it < 100; ++it) {
    const double g = u * E - xi;
    if (g > 0)
      hi = u;
    else
      lo = u;
    const double phi = e + c.sigma * u;
    const double dg = E * c.defl.q0() / c.defl.q(phi);
    double nu = u - g / dg;
    if (!(nu > lo && nu < hi)) nu = 0.5 * (lo + hi);
    const bool done = std::abs(nu - u) <= 2e-16 * nu;
    u = nu;
    E = c.E0 * std::exp(c.S(u));
    if (done) break;
  }
  return frame(u, E);
}

namespace {

// int from root e to phi of dpsi/sqrt(Q), with psi = e + sigma w^2
double root_tail(const Profile& profile, const Deflation& d, double phi) {
  const double e = d.root();
  const double sigma = phi >= e ? 1.0 : -1.0;
  const double wmax = std::sqrt(std::abs(phi - e));
  auto f = [&](double w) { return 2.0 / std::sqrt(sigma * d.q(e + sigma * w * w)); };
  (void)profile;
  return integrate_adaptive(f, 0.0, wmax, 1e-12, 1e-15).value;
}

}  // namespace

double arclength(const Profile& profile, double phi1, double phi2) {
  if (phi1 > phi2) return -arclength(profile, phi2, phi1);
  if (phi1 == phi2) return 0.0;
  const Interval iv = profile.interval();
  const double mid = iv.mid();
  const bool root_lo = profile.endpoint_is_root(iv.lo), root_hi = profile.endpoint_is_root(iv.hi);
  const Deflation dlo = root_lo ? profile.deflation(iv.lo) : Deflation();
  const Deflation dhi = root_hi ? profile.deflation(iv.hi) : Deflation();
  auto plain = [&](double x0, double x1) {
    return integrate_adaptive([&](double x) { return 1.0 / std::sqrt(profile.Q(x)); }, x0, x1, 1e-12, 1e-15).value;
  };
  // primitive from mid
  auto P = [&](double x) {
    if (x >= mid) {
      if (root_hi) return root_tail(profile, dhi, mid) - root_tail(profile, dhi, x);
      return plain(mid, x);
    }
    if (root_lo) return root_tail(profile, dlo, mid) - root_tail(profile, dlo, x);
    return -plain(x, mid);
  };
  if ((phi1 >= mid) == (phi2 >= mid)) {
    // same half: direct integration avoids differencing large tails
    const bool upper = phi1 >= mid;
    if (upper && root_hi) return root_tail(profile, dhi, phi1) - root_tail(profile, dhi, phi2);
    if (!upper && root_lo) return root_tail(profile, dlo, phi2) - root_tail(profile, dlo, phi1);
    return plain(phi1, phi2);
  }
  return P(phi2) - P(phi1);
}

double compute_L(const Profile& profile) {
  const Interval iv = profile.interval();
  const auto [s1, s2] = profile.endpoint_slopes();
  if (std::abs(s1) < 1e-12 || std::abs(s2) < 1e-12)
    throw Error(ErrorCode::SingularEndpoint, "endpoint slope vanishes");
  if (!profile.endpoint_is_root(iv.lo) || !profile.endpoint_is_root(iv.hi))
    throw Error(ErrorCode::SingularEndpoint, "endpoints must be simple roots of Q");
  const double mid = iv.mid();
  return root_tail(profile, profile.deflation(iv.lo), mid) + root_tail(profile, profile.deflation(iv.hi), mid);
}

namespace {

double sing_log(const std::vector<std::pair<double, double>>& poles, double phi) {
  double s = 0.0;
  for (const auto& [e, res] : poles) s += res * std::log(std::abs(phi - e));
  return s;
}

double sing_slope(const std::vector<std::pair<double, double>>& poles, double phi) {
  double s = 0.0;
  for (const auto& [e, res] : poles) s += res / (phi - e);
  return s;
}

}  // namespace

double ReparamTable::log_r_of_phi(double x) const {
  const std::size_t i = bracket(phi, x);
  const double g = hermite(phi[i], phi[i + 1], G[i], G[i + 1], dG[i], dG[i + 1], x);
  return g + a * sing_log(poles, x);
}

double ReparamTable::r_of_phi(double x) const { return std::exp(log_r_of_phi(x)); }

double ReparamTable::phi_of_r(double rr) const {
  const double lr = std::log(rr);
  const std::size_t i = bracket(log_r, lr);
  const double d0 = profile.Q(phi[i]) / a, d1 = profile.Q(phi[i + 1]) / a;
  double x = hermite(log_r[i], log_r[i + 1], phi[i], phi[i + 1], d0, d1, lr);
  const double plo = std::min(phi[i], phi[i + 1]), phi_hi = std::max(phi[i], phi[i + 1]);
  for (int it = 0; it < 4; ++it) {
    x = std::clamp(x, plo, phi_hi);
    const std::size_t j = bracket(phi, x);
    const double g = hermite(phi[j], phi[j + 1], G[j], G[j + 1], dG[j], dG[j + 1], x);
    const double dg = hermite_d1(phi[j], phi[j + 1], G[j], G[j + 1], dG[j], dG[j + 1], x);
    const double f = g + a * sing_log(poles, x) - lr;
    const double df = dg + a * sing_slope(poles, x);
    if (df == 0.0) break;
    x -= f / df;
  }
  return std::clamp(x, plo, phi_hi);
}

double ReparamTable::s_of_phi(double x) const {
  const std::size_t i = bracket(phi, x);
  const double sg = sign(a);
  const double d0 = sg / std::sqrt(profile.Q(phi[i])), d1 = sg / std::sqrt(profile.Q(phi[i + 1]));
  return hermite(phi[i], phi[i + 1], s[i], s[i + 1], d0, d1, x);
}

ReparamTable build_reparam(const Profile& profile, double a, std::pair<double, double> anchor, int nodes) {
  const Interval iv = profile.interval();
  if (a == 0.0) throw Error(ErrorCode::BadParams, "a must be nonzero");
  if (!iv.interior(anchor.first) || !(anchor.second > 0))
    throw Error(ErrorCode::AnchorOutOfRange, "anchor must be interior with r_a > 0");
  if (nodes < 512) nodes = 512;
  for (int i = 1; i < 1000; ++i)
    if (!(profile.Q(iv.lo + iv.length() * i / 1000) > 0)) throw Error(ErrorCode::NonPositiveQ, "Q <= 0 inside the interval");

  const LogDensity dens(profile);
  const bool root_lo = profile.endpoint_is_root(iv.lo), root_hi = profile.endpoint_is_root(iv.hi);
  const double clip = 1e-6 * iv.length();
  const double lo = iv.lo + (root_lo ? clip : 0.0), hi = iv.hi - (root_hi ? clip : 0.0);

  std::vector<double> grid(nodes);
  for (int i = 0; i < nodes; ++i) grid[i] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(M_PI * i / (nodes - 1)));
  grid.front() = lo;
  grid.back() = hi;

  const double sg = sign(a);
  std::vector<double> lr(nodes), ss(nodes);
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  OdeRhs rhs = [&](double x, const Eigen::VectorXd&, Eigen::VectorXd& dy) {
    dy.resize(2);
    const double q = profile.Q(x);
    dy(0) = a / q;
    dy(1) = sg / std::sqrt(q);
  };
  const std::size_t first_right =
      static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), anchor.first) - grid.begin());
  Eigen::VectorXd y(2);
  y << std::log(anchor.second), 0.0;
  double x = anchor.first;
  for (std::size_t i = first_right; i < grid.size(); ++i) {
    y = dopri45(rhs, x, y, grid[i], opt).back().y;
    x = grid[i];
    lr[i] = y(0);
    ss[i] = y(1);
  }
  y << std::log(anchor.second), 0.0;
  x = anchor.first;
  for (std::size_t i = first_right; i-- > 0;) {
    y = dopri45(rhs, x, y, grid[i], opt).back().y;
    x = grid[i];
    lr[i] = y(0);
    ss[i] = y(1);
  }

  // extension toward root endpoints through the singular split
  std::vector<double> phis, lrs, sss;
  auto extend = [&](double e, double xc, double lrc, double sc, bool prepend) {
    std::vector<double> ep, el, es;
    const double sigma = xc > e ? 1.0 : -1.0;
    for (int k = 1; k <= 12; ++k) {
      const double px = e + sigma * clip * std::pow(10.0, -0.5 * k);
      ep.push_back(px);
      el.push_back(lrc + a * ((dens.singular_log(px) - dens.singular_log(xc)) +
                              (dens.regular_integral(px) - dens.regular_integral(xc))));
      es.push_back(sc + sg * arclength(profile, xc, px));
    }
    if (prepend) {
      phis.insert(phis.begin(), ep.rbegin(), ep.rend());
      lrs.insert(lrs.begin(), el.rbegin(), el.rend());
      sss.insert(sss.begin(), es.rbegin(), es.rend());
    } else {
      phis.insert(phis.end(), ep.begin(), ep.end());
      lrs.insert(lrs.end(), el.begin(), el.end());
      sss.insert(sss.end(), es.begin(), es.end());
    }
  };
  phis = grid;
  lrs = lr;
  sss = ss;
  if (root_lo) extend(iv.lo, grid.front(), lr.front(), ss.front(), true);
  if (root_hi) extend(iv.hi, grid.back(), lr.back(), ss.back(), false);

  ReparamTable t;
  t.profile = profile;
  t.a = a;
  t.anchor = anchor;
  t.poles = dens.poles();
  const std::size_t n = phis.size();
  for (std::size_t i = 0; i < n; ++i) {
    t.phi.push_back(phis[i]);
    t.log_r.push_back(lrs[i]);
    const double r = std::exp(lrs[i]);
    if (r > ReparamTable::kSentinel) t.overflow = true;
    t.r.push_back(std::min(r, ReparamTable::kSentinel));
    t.s.push_back(sss[i]);
    t.G.push_back(lrs[i] - a * dens.singular_log(phis[i]));
    t.dG.push_back(a * dens.regular(phis[i]));
  }
  if (a < 0) {
    for (auto* v : {&t.phi, &t.log_r, &t.r, &t.s, &t.G, &t.dG}) std::reverse(v->begin(), v->end());
  }
  for (const auto& [e, res] : t.poles)
    if (a * res < 0) t.overflow = true;
  t.L = (root_lo && root_hi) ? compute_L(profile) : arclength(profile, iv.lo, iv.hi);
  t.ode_residual = table_ode_residual(t);
  return t;
}

double table_ode_residual(const ReparamTable& t) {
  const LogDensity dens(t.profile);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double x = 0.5 * (t.phi[i] + t.phi[i + 1]);
    const double slope = hermite_d1(t.phi[i], t.phi[i + 1], t.G[i], t.G[i + 1], t.dG[i], t.dG[i + 1], x);
    const double exact = t.a * dens.regular(x);
    worst = std::max(worst, std::abs(slope - exact) * t.profile.Q(x) / std::abs(t.a));
  }
  return worst;
}

ReparamTable dual_table(const ReparamTable& t) {
  ReparamTable d;
  d.profile = t.profile;
  d.a = -t.a;
  d.anchor = {t.anchor.first, 1.0 / t.anchor.second};
  d.poles = t.poles;
  d.L = t.L;
  const std::size_t n = t.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = n - 1 - k;
    d.phi.push_back(t.phi[i]);
    d.log_r.push_back(-t.log_r[i]);
    const double r = std::exp(-t.log_r[i]);
    if (r > ReparamTable::kSentinel) d.overflow = true;
    d.r.push_back(std::min(r, ReparamTable::kSentinel));
    d.s.push_back(-t.s[i]);
    d.G.push_back(-t.G[i]);
    d.dG.push_back(-t.dG[i]);
  }
  for (const auto& [e, res] : d.poles)
    if (d.a * res < 0) d.overflow = true;
  d.ode_residual = table_ode_residual(d);
  return d;
}

BoundaryLimits boundary_limits(const ReparamTable& t, Endpoint endpoint) {
  const Interval iv = t.profile.interval();
  const double e = endpoint == Endpoint::Lower ? iv.lo : iv.hi;
  if (!t.profile.endpoint_is_root(e)) throw Error(ErrorCode::WrongEndpoint, "endpoint is not a simple root of Q");
  const double slope = t.profile.dQ(e);
  if (std::abs(slope - 2.0 * t.a) > 1e-6 * std::abs(2.0 * t.a))
    throw Error(ErrorCode::WrongEndpoint, "dQ/dphi at the endpoint differs from 2a");

  BoundaryLimits out;
  // three smallest-r nodes come first
  double xi[3], f[3];
  for (int k = 0; k < 3; ++k) {
    xi[k] = t.r[k] * t.r[k];
    f[k] = t.profile.Q(t.phi[k]) / xi[k];
  }
  out.q0 = f[0] * xi[1] * xi[2] / ((xi[0] - xi[1]) * (xi[0] - xi[2])) +
           f[1] * xi[0] * xi[2] / ((xi[1] - xi[0]) * (xi[1] - xi[2])) +
           f[2] * xi[0] * xi[1] / ((xi[2] - xi[0]) * (xi[2] - xi[1]));

  const RadialMap map(t.profile, t.a, t.anchor.first, t.anchor.second);
  const RadialMap::Center c0 = map.center(0.0);
  out.q0_exact = 2.0 * std::abs(t.a) / c0.E;
  const double h = 0.02 * iv.length() * c0.E;
  auto fphi = [&](double x) { return map.center(x).phi; };
  auto fq = [&](double x) {
    if (x == 0.0) return out.q0_exact;
    const auto c = map.center(x);
    return c.Q / x;
  };
  auto d1 = [](const auto& f, double f0, double hh) { return (f(hh) - f0) / hh; };
  auto d2 = [](const auto& f, double f0, double hh) { return (f(2 * hh) - 2 * f(hh) + f0) / (hh * hh); };
  auto ratio = [&](const auto& D) {
    const double a0 = D(h), a1 = D(h / 2), a2 = D(h / 4);
    return (a0 - a1) / (a1 - a2);
  };
  const double phi0 = e, q0 = out.q0_exact;
  auto D1p = [&](double hh) { return d1(fphi, phi0, hh); };
  auto D2p = [&](double hh) { return d2(fphi, phi0, hh); };
  auto D1q = [&](double hh) { return d1(fq, q0, hh); };
  auto D2q = [&](double hh) { return d2(fq, q0, hh); };
  out.ratio_dphi = ratio(D1p);
  out.ratio_d2phi = ratio(D2p);
  out.ratio_dq = ratio(D1q);
  out.ratio_d2q = ratio(D2q);
  out.dphi_dxi = 2.0 * D1p(h / 64) - D1p(h / 32);
  out.d2phi_dxi2 = 2.0 * D2p(h / 8) - D2p(h / 4);
  out.dq_dxi = 2.0 * D1q(h / 64) - D1q(h / 32);
  out.d2q_dxi2 = 2.0 * D2q(h / 8) - D2q(h / 4);
  auto in = [](double r) { return r >= 0.2 && r <= 5.0; };
  out.pass = out.q0 > 0 && in(out.ratio_dphi) && in(out.ratio_d2phi) && in(out.ratio_dq) && in(out.ratio_d2q);
  return out;
}

}  // namespace skrp
