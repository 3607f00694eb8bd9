#include "skrp/profiles.hpp"

#include "skrp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skrp {

std::string to_string(Family f) {
  switch (f) {
    case Family::Quadratic:
      return "Quadratic";
    case Family::TypeA:
      return "TypeA";
    case Family::TypeB:
      return "TypeB";
    case Family::TypeC:
      return "TypeC";
    case Family::Polynomial:
      return "Polynomial";
    case Family::Custom:
      return "Custom";
  }
  return "Unknown";
}

std::string to_string(Tag t) {
  switch (t) {
    case Tag::A:
      return "A";
    case Tag::B:
      return "B";
    case Tag::C1:
      return "C1";
    case Tag::C2:
      return "C2";
  }
  return "?";
}

ProfileSpec ProfileSpec::quadratic(double K, double phi0) {
  ProfileSpec s;
  s.family = Family::Quadratic;
  s.K = K;
  s.phi0 = phi0;
  return s;
}

ProfileSpec ProfileSpec::type_a(int m, double K, double alpha, double eta) {
  ProfileSpec s;
  s.family = Family::TypeA;
  s.m = m;
  s.K = K;
  s.alpha = alpha;
  s.eta = eta;
  return s;
}

ProfileSpec ProfileSpec::type_b(int m, double K, double alpha, double eta) {
  ProfileSpec s = type_a(m, K, alpha, eta);
  s.family = Family::TypeB;
  return s;
}

ProfileSpec ProfileSpec::type_c(int m, double c, double A, double B, double C) {
  ProfileSpec s;
  s.family = Family::TypeC;
  s.m = m;
  s.c = c;
  s.A = A;
  s.B = B;
  s.C = C;
  return s;
}

ProfileSpec ProfileSpec::polynomial(std::vector<double> coeffs) {
  ProfileSpec s;
  s.family = Family::Polynomial;
  s.coeffs = std::move(coeffs);
  return s;
}

ProfileSpec ProfileSpec::custom(std::vector<double> phi, std::vector<double> Q) {
  ProfileSpec s;
  s.family = Family::Custom;
  s.grid_phi = std::move(phi);
  s.grid_Q = std::move(Q);
  return s;
}

void ProfileSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  switch (family) {
    case Family::Quadratic:
      if (!(K > 0) || phi0 == 0.0 || !finite(phi0)) throw Error(ErrorCode::BadParams, "Quadratic needs K > 0, phi0 != 0");
      break;
    case Family::TypeA:
    case Family::TypeB:
      if (m < 2) throw Error(ErrorCode::BadParams, "m must be at least 2");
      if (!finite(K) || !finite(alpha) || !finite(eta)) throw Error(ErrorCode::BadParams, "non-finite parameter");
      break;
    case Family::TypeC:
      if (m < 2) throw Error(ErrorCode::BadParams, "m must be at least 2");
      if (c == 0.0 || !finite(c)) throw Error(ErrorCode::BadParams, "TypeC needs c != 0");
      if (!finite(A) || !finite(B) || !finite(C)) throw Error(ErrorCode::BadParams, "non-finite parameter");
      break;
    case Family::Polynomial:
      if (coeffs.empty()) throw Error(ErrorCode::BadParams, "Polynomial needs coefficients");
      for (double v : coeffs)
        if (!finite(v)) throw Error(ErrorCode::BadParams, "non-finite coefficient");
      break;
    case Family::Custom:
      if (grid_phi.size() < 2 || grid_phi.size() != grid_Q.size())
        throw Error(ErrorCode::BadParams, "Custom needs matching phi/Q samples");
      if (!grid_dQ.empty() && grid_dQ.size() != grid_phi.size())
        throw Error(ErrorCode::BadParams, "Custom slope samples must match phi samples");
      break;
  }
}

double eval_E(int m, double t) {
  if (m < 1) throw Error(ErrorCode::BadParams, "m must be positive");
  double sum = 0.0;
  for (int k = m; k >= 1; --k) {
    const double coef = static_cast<double>(k) * static_cast<double>(binomial(2 * m - k - 1, m - 1)) / m;
    sum = sum * t + coef;
  }
  return (t - 1.0) * sum;
}

double eval_F(int m, double t) {
  if (m < 1) throw Error(ErrorCode::BadParams, "m must be positive");
  if (t == 1.0) throw Error(ErrorCode::PoleAtOne, "F has a pole at t = 1");
  return (t - 2.0) * std::pow(t, 2 * m - 1) / std::pow(t - 1.0, m);
}

FE eval_FE(int m, double t) { return {eval_F(m, t), eval_E(m, t)}; }

namespace {

Polynomial e_polynomial(int m) {
  std::vector<double> c(m, 0.0);
  for (int k = 1; k <= m; ++k)
    c[k - 1] = static_cast<double>(k) * static_cast<double>(binomial(2 * m - k - 1, m - 1)) / m;
  return Polynomial::linear(-1.0, 1.0) * Polynomial(c);
}

Polynomial power(const Polynomial& p, int k) {
  Polynomial out({1.0});
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

}  // namespace

RationalFunction family_rational(const ProfileSpec& s) {
  RationalFunction rf;
  switch (s.family) {
    case Family::Quadratic:
      rf.num = Polynomial({s.K * s.phi0 * s.phi0, 0.0, -s.K});
      break;
    case Family::TypeA: {
      const double w = 1.0 / (2 * s.m - 1);
      rf.num = Polynomial({-w * s.eta / s.m, 0.0, -s.K}) + Polynomial::monomial(2 * s.m - 1, w * s.alpha);
      break;
    }
    case Family::TypeB:
      rf.num = Polynomial({-2.0 * s.eta / (s.m * (s.m + 1.0)), s.K / s.m}) + Polynomial::monomial(s.m + 1, s.alpha);
      break;
    case Family::TypeC: {
      const Polynomial t1 = Polynomial::linear(-1.0, 1.0);
      Polynomial base = t1 * (Polynomial({s.A}) + e_polynomial(s.m) * s.B);
      Polynomial num = base, den({1.0});
      if (s.C != 0.0) {
        den = power(t1, s.m - 1);
        num = base * den + Polynomial::linear(-2.0, 1.0) * Polynomial::monomial(2 * s.m - 1, s.C);
      }
      rf.num = num.compose_affine(1.0 / s.c, 0.0);
      rf.den = den.compose_affine(1.0 / s.c, 0.0);
      break;
    }
    case Family::Polynomial:
      rf.num = Polynomial(s.coeffs);
      break;
    case Family::Custom:
      throw Error(ErrorCode::BadParams, "Custom profiles have no closed form");
  }
  return rf;
}

Deflation::Deflation(double root, Polynomial q_num, Polynomial p_num, Polynomial den, double den_root)
    : e_(root), qn_(std::move(q_num)), pn_(std::move(p_num)), den_(std::move(den)), de_(den_root) {
  q0_ = qn_(e_) / (den_(e_) * de_);
}

Deflation::Deflation(double root, std::shared_ptr<const CubicSpline> spline) : e_(root), spline_(std::move(spline)) {
  const std::size_t i = spline_->piece(root);
  piece_ = {spline_->knots()[i], spline_->knots()[i + 1]};
  const Polynomial poly = spline_->piece_polynomial(i);
  piece_q_ = poly.deflate(e_);
  piece_p_ = piece_q_.deflate(e_);
  q0_ = piece_q_(e_);
}

double Deflation::q(double phi) const {
  if (!spline_) return qn_(phi) / (den_(phi) * de_);
  if (piece_.contains(phi)) return piece_q_(phi);
  return ((*spline_)(phi) - (*spline_)(e_)) / (phi - e_);
}

double Deflation::p(double phi) const {
  if (!spline_) return pn_(phi) / (den_(phi) * de_ * de_);
  if (piece_.contains(phi)) return piece_p_(phi);
  return (q(phi) - q0_) / (phi - e_);
}

Profile::Profile(ProfileSpec spec, Interval interval, RationalFunction rf)
    : spec_(std::move(spec)), interval_(interval), rf_(std::move(rf)) {
  n1_ = rf_.num.derivative();
  n2_ = n1_.derivative();
  d1_ = rf_.den.derivative();
  d2_ = d1_.derivative();
}

Profile::Profile(ProfileSpec spec, Interval interval, CubicSpline spline)
    : spec_(std::move(spec)), interval_(interval), spline_(std::make_shared<const CubicSpline>(std::move(spline))) {}

Profile Profile::restricted(Interval iv) const {
  Profile p = *this;
  p.interval_ = iv;
  return p;
}

double Profile::Q(double phi) const {
  if (spline_) return (*spline_)(phi);
  return rf_.num(phi) / rf_.den(phi);
}

double Profile::dQ(double phi) const {
  if (spline_) return spline_->d1(phi);
  const double n = rf_.num(phi), d = rf_.den(phi);
  return (n1_(phi) * d - n * d1_(phi)) / (d * d);
}

double Profile::d2Q(double phi) const {
  if (spline_) return spline_->d2(phi);
  const double n = rf_.num(phi), d = rf_.den(phi), np = n1_(phi), dp = d1_(phi);
  return (n2_(phi) * d - n * d2_(phi)) / (d * d) - 2.0 * dp * (np * d - n * dp) / (d * d * d);
}

double Profile::root_tolerance() const {
  double scale = 0.0;
  const int n = 64;
  for (int i = 1; i < n; ++i) scale = std::max(scale, std::abs(Q(interval_.lo + interval_.length() * i / n)));
  return 1e-9 * std::max(scale, 1e-300);
}

bool Profile::endpoint_is_root(double e) const {
  return std::abs(Q(e)) <= root_tolerance() && std::abs(dQ(e)) > 1e-12;
}

Deflation Profile::deflation(double e) const {
  if (spline_) return Deflation(e, spline_);
  const double de = rf_.den(e);
  const Polynomial p1 = (rf_.num * de - rf_.den * rf_.num(e)).deflate(e);
  const Polynomial p2 = (p1 * de - rf_.den * p1(e)).deflate(e);
  return Deflation(e, p1, p2, rf_.den, de);
}

std::vector<double> Profile::panel_breaks(int uniform_panels) const {
  std::vector<double> b;
  if (spline_) {
    b.push_back(interval_.lo);
    for (double k : spline_->knots())
      if (interval_.interior(k)) b.push_back(k);
    b.push_back(interval_.hi);
    return b;
  }
  for (int i = 0; i <= uniform_panels; ++i) b.push_back(interval_.lo + interval_.length() * i / uniform_panels);
  b.back() = interval_.hi;
  return b;
}

namespace {

Profile unrestricted(const ProfileSpec& spec, Interval iv) {
  if (spec.family == Family::Custom) {
    std::vector<double> x = spec.grid_phi, y = spec.grid_Q;
    if (!spec.grid_dQ.empty()) return Profile(spec, iv, CubicSpline(x, y, spec.grid_dQ));
    if (spec.end_slopes)
      return Profile(spec, iv, CubicSpline::clamped(x, y, spec.end_slopes->first, spec.end_slopes->second));
    return Profile(spec, iv, CubicSpline::natural(x, y));
  }
  return Profile(spec, iv, family_rational(spec));
}

bool pole_between(const ProfileSpec& spec, double x0, double x1) {
  if (spec.family != Family::TypeC || spec.C == 0.0) return false;
  return spec.c >= std::min(x0, x1) && spec.c <= std::max(x0, x1);
}

}  // namespace

Profile make_profile(const ProfileSpec& spec, Interval interval) {
  spec.validate();
  if (!(interval.hi > interval.lo) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi))
    throw Error(ErrorCode::BadParams, "interval must be nondegenerate");
  if (spec.family == Family::Custom &&
      (interval.lo < spec.grid_phi.front() || interval.hi > spec.grid_phi.back()))
    throw Error(ErrorCode::BadParams, "interval exceeds the sample grid");
  if (spec.family == Family::TypeC && spec.C != 0.0 && interval.interior(spec.c))
    throw Error(ErrorCode::PoleInInterval, "t = 1 lies inside the interval while C != 0");
  Profile p = unrestricted(spec, interval);
  const int n = 1000;
  for (int i = 1; i < n; ++i) {
    const double x = interval.lo + interval.length() * i / n;
    const double q = p.Q(x);
    if (!(q > 0)) throw Error(ErrorCode::NonPositive, "Q <= 0 at phi = " + std::to_string(x));
  }
  return p;
}

FBc1 eval_f_bc1(int k, double beta) {
  if (k < 2) throw Error(ErrorCode::BadParams, "k must be at least 2");
  std::vector<double> c(k + 2, 0.0);
  c[0] = -(k - 1.0);
  c[1] = k + 1.0;
  c[k] = -(k + 1.0);
  c[k + 1] = k - 1.0;
  const double f = Polynomial(c)(beta);
  double pi = 0.0;
  for (int j = k - 1; j >= 1; --j) pi = pi * beta + static_cast<double>(j) * (k - j);
  const double u = beta - 1.0;
  return {f, std::abs(f - u * u * u * pi)};
}

double eval_f_bc1_shifted(int k, double beta) {
  // f(1+u) = sum_j d_j u^j with integer d_j
  std::vector<long long> d(k + 2, 0);
  auto add_power = [&](int n, long long coef) {
    for (int j = 0; j <= n; ++j) d[j] += coef * binomial(n, j);
  };
  add_power(k + 1, k - 1);
  add_power(k, -(k + 1));
  add_power(1, k + 1);
  add_power(0, -(k - 1));
  const double u = beta - 1.0;
  double acc = 0.0;
  for (int j = k + 1; j >= 0; --j) acc = acc * u + static_cast<double>(d[j]);
  return acc;
}

SignScan scan_f_bc1(int k, double lo, double hi, int count, double tol) {
  SignScan out;
  out.k = k;
  const double alt = (k % 2 == 0) ? 1.0 : -1.0;
  std::vector<double> xs(count), fs(count);
  for (int i = 0; i < count; ++i) {
    xs[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    fs[i] = eval_f_bc1_shifted(k, xs[i]);
    const FBc1 r = eval_f_bc1(k, xs[i]);
    out.max_factor_residual = std::max(out.max_factor_residual, r.factor_residual / (1.0 + std::abs(r.f)));
  }
  auto f = [k](double b) { return eval_f_bc1_shifted(k, b); };
  for (int i = 0; i < count; ++i) {
    if (fs[i] == 0.0) {
      out.zeros.push_back(xs[i]);
      continue;
    }
    if (i + 1 < count && fs[i + 1] != 0.0 && (fs[i] > 0) != (fs[i + 1] > 0))
      out.zeros.push_back(bisect(f, xs[i], xs[i + 1], 1e-14));
  }
  std::vector<double> expected{1.0};
  if (alt != 1.0) expected.push_back(alt);
  for (double z : out.zeros) {
    bool near = false;
    for (double e : expected) near = near || std::abs(z - e) <= tol;
    out.only_expected = out.only_expected && near;
  }
  for (double e : expected) {
    if (e < lo || e > hi) continue;
    bool found = false;
    for (double z : out.zeros) found = found || std::abs(z - e) <= tol;
    out.all_expected_found = out.all_expected_found && found;
  }
  return out;
}

Profile find_admissible_interval(const ProfileSpec& spec, double seed, const SearchOptions& opt) {
  spec.validate();
  double box_lo = opt.box_lo, box_hi = opt.box_hi;
  if (spec.family == Family::Custom) {
    box_lo = std::max(box_lo, spec.grid_phi.front());
    box_hi = std::min(box_hi, spec.grid_phi.back());
  }
  if (!(seed > box_lo && seed < box_hi)) throw Error(ErrorCode::SeedNonPositive, "seed outside the search box");
  const Profile raw = unrestricted(spec, {box_lo, box_hi});
  if (pole_between(spec, seed, seed)) throw Error(ErrorCode::PoleInInterval, "seed sits on the pole");
  if (!(raw.Q(seed) > 0)) throw Error(ErrorCode::SeedNonPositive, "Q(seed) <= 0");

  const double step = (box_hi - box_lo) / (opt.grid - 1);
  auto march = [&](double dir) {
    double prev = seed;
    for (int i = 1;; ++i) {
      double x = seed + dir * step * i;
      const bool edge = dir > 0 ? x >= box_hi : x <= box_lo;
      if (edge) x = dir > 0 ? box_hi : box_lo;
      if (pole_between(spec, prev, x)) throw Error(ErrorCode::PoleInInterval, "pole of Q reached before a root");
      const double q = raw.Q(x);
      if (!(q > 0)) {
        const double root = bisect([&](double t) { return raw.Q(t); }, prev, x, opt.bisect_tol);
        const double d = raw.dQ(root);
        if (d != 0.0 && std::isfinite(d)) {
          const double polished = root - raw.Q(root) / d;
          if (polished >= std::min(prev, x) && polished <= std::max(prev, x)) return polished;
        }
        return root;
      }
      if (edge) throw Error(ErrorCode::NoRoot, "Q stays positive up to the search-box edge");
      prev = x;
    }
  };
  const double hi = march(1.0);
  const double lo = march(-1.0);
  return raw.restricted({lo, hi});
}

double default_mw1_tol(const Profile& p) { return p.is_spline() ? 1e-6 : 1e-9; }

BoundaryReport check_mw1(const Profile& profile, double tol) {
  BoundaryReport r;
  r.tol = tol;
  r.endpoint_values = profile.endpoint_values();
  r.endpoint_slopes = profile.endpoint_slopes();
  const Interval iv = profile.interval();
  double qmax = 0.0;
  bool positive = true;
  const int n = 1000;
  for (int i = 1; i < n; ++i) {
    const double q = profile.Q(iv.lo + iv.length() * i / n);
    positive = positive && q > 0;
    qmax = std::max(qmax, std::abs(q));
  }
  r.positivity_ok = positive;
  const double root_tol = tol * std::max(1.0, qmax);
  r.roots_ok = std::abs(r.endpoint_values.first) <= root_tol && std::abs(r.endpoint_values.second) <= root_tol;
  const double s1 = r.endpoint_slopes.first, s2 = r.endpoint_slopes.second;
  r.slopes_nonzero = std::abs(s1) > 1e-12 && std::abs(s2) > 1e-12;
  r.slopes_opposite = std::abs(s1 + s2) <= tol * std::max(std::abs(s1), std::abs(s2));
  return r;
}

SyReport check_sy(int m, const Profile& profile, double tol) {
  const ProfileSpec& s = profile.spec();
  if (s.family != Family::TypeC) throw Error(ErrorCode::WrongFamily, "check_sy needs a TypeC profile");
  if (m != s.m) throw Error(ErrorCode::BadParams, "m does not match the profile");
  SyReport r;
  const Interval iv = profile.interval();
  const double t0 = iv.lo / s.c, t1 = iv.hi / s.c;
  r.t_interval = {std::min(t0, t1), std::max(t0, t1)};
  r.one_not_in_I = !r.t_interval.contains(1.0);
  r.a_analytic = s.C == 0.0 || r.one_not_in_I;

  auto Qt = [&](double t) { return profile.Q(s.c * t); };
  auto dQt = [&](double t) { return s.c * profile.dQ(s.c * t); };
  double qmax = 0.0;
  bool positive = true;
  const int n = 1000;
  for (int i = 1; i < n; ++i) {
    const double t = r.t_interval.lo + r.t_interval.length() * i / n;
    if (s.C != 0.0 && t == 1.0) continue;
    const double q = Qt(t);
    positive = positive && q > 0;
    qmax = std::max(qmax, std::abs(q));
  }
  r.c_positive = positive;
  r.b_roots = std::abs(Qt(r.t_interval.lo)) <= tol * std::max(1.0, qmax) &&
              std::abs(Qt(r.t_interval.hi)) <= tol * std::max(1.0, qmax);
  r.dQdt = {dQt(r.t_interval.lo), dQt(r.t_interval.hi)};
  const double s1 = r.dQdt.first, s2 = r.dQdt.second;
  r.d_slopes_nonzero = std::abs(s1) > 1e-12 && std::abs(s2) > 1e-12;
  r.e_slopes_opposite = std::abs(s1 + s2) <= tol * std::max(std::abs(s1), std::abs(s2));
  if (s.A == 0.0) {
    r.rationality_vacuous = true;
    r.rationality_ok = true;
  } else {
    const double x1 = s1 / s.A, x2 = s2 / s.A;
    const Rational q1 = best_rational(x1, 64), q2 = best_rational(x2, 64);
    r.rational_values = {q1, q2};
    auto close = [&](double x, Rational q) {
      return std::abs(x - static_cast<double>(q.p) / static_cast<double>(q.q)) <= 1e-9 * std::max(1.0, std::abs(x));
    };
    r.rationality_ok = close(x1, q1) && close(x2, q2);
  }
  return r;
}

TypeTag classify_type(int epsilon, std::optional<double> c, Interval interval) {
  if (epsilon < -1 || epsilon > 1) throw Error(ErrorCode::BadParams, "epsilon must be -1, 0 or 1");
  if (epsilon != 0 && !c) throw Error(ErrorCode::Inconsistent, "epsilon != 0 requires c");
  if (epsilon == 0 && c) throw Error(ErrorCode::Inconsistent, "epsilon = 0 leaves c undefined");
  TypeTag t;
  t.epsilon = epsilon;
  t.c = c;
  if (epsilon == 0) {
    t.tag = Tag::A;
    t.note = "sigma vanishes identically";
  } else if (*c == 0.0) {
    t.tag = Tag::B;
    t.excluded = true;
    t.note = "type B cannot occur on a compact manifold";
  } else if (!interval.contains(*c)) {
    t.tag = Tag::C1;
    t.note = "c lies outside the phi-range";
  } else {
    t.tag = Tag::C2;
    t.note = "c lies inside the phi-range; requires 1 in I (reported empty elsewhere, not asserted here)";
  }
  return t;
}

double soliton_rhs(const SolitonParams& s, double phi, double Q) {
  const double d = phi - s.c;
  return (Q - (s.m - 1) * s.p * Q / d + s.epsilon * s.p * s.kappa - 2.0 * s.s0 * d) / s.p;
}

SolitonProfile soliton_profile(const SolitonParams& s) {
  if (s.m < 2 || s.p == 0.0 || (s.epsilon != 1 && s.epsilon != -1))
    throw Error(ErrorCode::BadParams, "soliton needs m >= 2, p != 0, epsilon = +-1");
  const Interval R = s.range;
  if (!(R.hi > R.lo)) throw Error(ErrorCode::BadParams, "empty range");
  if (R.contains(s.c)) throw Error(ErrorCode::RangeContainsC, "range contains phi = c");
  if (s.epsilon * (R.mid() - s.c) <= 0) throw Error(ErrorCode::BadParams, "epsilon (phi - c) must be positive");
  if (!R.contains(s.phi_a)) throw Error(ErrorCode::AnchorOutOfRange, "anchor outside range");
  if (!(s.Q_a > 0)) throw Error(ErrorCode::SolutionNonPositive, "anchor value must be positive");

  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  opt.h_max = R.length() / 1000.0;
  OdeRhs rhs = [&](double phi, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(1);
    dy(0) = soliton_rhs(s, phi, y(0));
  };
  bool truncated = false;
  auto run = [&](double end) {
    std::vector<OdeStep> steps;
    if (end == s.phi_a) return steps;
    Eigen::VectorXd y0(1);
    y0(0) = s.Q_a;
    steps = dopri45(rhs, s.phi_a, y0, end, opt, [](const OdeStep& st) { return !(st.y(0) > 0); });
    while (!steps.empty() && !(steps.back().y(0) > 0)) {
      steps.pop_back();
      truncated = true;
    }
    return steps;
  };
  auto left = run(R.lo);
  auto right = run(R.hi);
  std::vector<double> x, y, dy;
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    x.push_back(it->t);
    y.push_back(it->y(0));
    dy.push_back(it->dy(0));
  }
  if (x.empty()) {
    x.push_back(s.phi_a);
    y.push_back(s.Q_a);
    dy.push_back(soliton_rhs(s, s.phi_a, s.Q_a));
  }
  for (std::size_t i = 1; i < right.size(); ++i) {
    x.push_back(right[i].t);
    y.push_back(right[i].y(0));
    dy.push_back(right[i].dy(0));
  }
  if (x.size() < 2) throw Error(ErrorCode::SolutionNonPositive, "solution is non-positive on the whole range");
  ProfileSpec spec;
  spec.family = Family::Custom;
  spec.grid_phi = x;
  spec.grid_Q = y;
  spec.grid_dQ = dy;
  Interval iv{x.front(), x.back()};
  return {Profile(spec, iv, CubicSpline(x, y, dy)), truncated};
}

double soliton_ode_residual(const SolitonParams& s, const Profile& profile, int points) {
  const Interval iv = profile.interval();
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double phi = iv.lo + iv.length() * (i + 0.5) / points;
    const double Q = profile.Q(phi), dQ = profile.dQ(phi), d = phi - s.c;
    const double terms[5] = {s.p * dQ, -Q, (s.m - 1) * s.p * Q / d, -s.epsilon * s.p * s.kappa, 2.0 * s.s0 * d};
    double sum = 0.0, scale = 0.0;
    for (double t : terms) {
      sum += t;
      scale += std::abs(t);
    }
    worst = std::max(worst, std::abs(sum) / std::max(scale, 1e-300));
  }
  return worst;
}

Bc2Report verify_bc2(const ProfileSpec& spec, const SearchOptions& opt) {
  if (spec.family != Family::TypeA && spec.family != Family::TypeB)
    throw Error(ErrorCode::WrongFamily, "verify_bc2 needs TypeA or TypeB");
  Bc2Report r;
  try {
    const Profile p = find_admissible_interval(spec, 0.0, opt);
    r.interval_found = true;
    r.interval = p.interval();
    r.mw1 = check_mw1(p);
    r.symmetric = std::abs(r.interval.lo + r.interval.hi) <= 1e-9 * std::abs(r.interval.hi);
  } catch (const Error& e) {
    r.note = std::string("no interval around 0: ") + e.what();
  }
  if (!r.interval_found) {
    r.pass = true;
    return r;
  }
  if (spec.family == Family::TypeA) {
    if (spec.alpha == 0.0) {
      r.pass = r.symmetric && (r.mw1.pass() || !(spec.K > 0 && spec.eta < 0));
      r.note = "alpha = 0";
    } else {
      r.pass = !r.mw1.pass();
      r.note = r.pass ? "alpha != 0 is never admissible" : "alpha != 0 passed the boundary conditions";
    }
  } else {
    r.pass = !r.mw1.pass() || r.symmetric;
    r.note = r.mw1.pass() ? "admissible; symmetry checked" : "not admissible";
  }
  return r;
}

}  // namespace skrp
