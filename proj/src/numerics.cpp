#include "skrp/numerics.hpp"

#include "skrp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace skrp {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
  trim();
}

void Polynomial::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

Polynomial Polynomial::monomial(int degree, double coeff) {
  std::vector<double> c(degree + 1, 0.0);
  c[degree] = coeff;
  return Polynomial(std::move(c));
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::compose_affine(double s, double t) const {
  Polynomial lin({t, s});
  Polynomial out;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) out = out * lin + Polynomial({*it});
  return out;
}

Polynomial Polynomial::deflate(double e) const {
  if (c_.size() <= 1) return Polynomial();
  const std::size_t n = c_.size() - 1;
  std::vector<double> q(n);
  double acc = 0.0;
  for (std::size_t k = n; k >= 1; --k) {
    acc = acc * e + c_[k];
    q[k - 1] = acc;
  }
  return Polynomial(std::move(q));
}

Polynomial Polynomial::shifted(double e) const { return compose_affine(1.0, e); }

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> r = c_;
  for (auto& v : r) v *= s;
  return Polynomial(std::move(r));
}

double RationalFunction::d1(double x) const {
  const double n = num(x), d = den(x);
  return (num.derivative()(x) * d - n * den.derivative()(x)) / (d * d);
}

double RationalFunction::d2(double x) const {
  const Polynomial n1 = num.derivative(), d1p = den.derivative();
  const double n = num(x), d = den(x), np = n1(x), dp = d1p(x);
  const double npp = n1.derivative()(x), dpp = d1p.derivative()(x);
  return (npp * d - n * dpp) / (d * d) - 2.0 * dp * (np * d - n * dp) / (d * d * d);
}

double RationalFunction::divided_difference(double x, double e) const {
  const double de = den(e);
  const Polynomial p = (num * de - den * num(e)).deflate(e);
  return p(x) / (den(x) * de);
}

double RationalFunction::divided_difference2(double x, double e) const {
  const double de = den(e);
  const Polynomial p1 = (num * de - den * num(e)).deflate(e);
  const Polynomial p2 = (p1 * de - den * p1(e)).deflate(e);
  return p2(x) / (den(x) * de * de);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, std::vector<double> dy)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
  if (x_.size() < 2 || y_.size() != x_.size() || dy_.size() != x_.size())
    throw Error(ErrorCode::BadParams, "spline needs matching arrays of at least two samples");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::BadParams, "spline knots must increase strictly");
}

namespace {

// Tridiagonal solve for spline slopes. Rows: lower, diag, upper, rhs.
std::vector<double> solve_tridiagonal(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                                      std::vector<double> rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

std::vector<double> spline_slopes(const std::vector<double>& x, const std::vector<double>& y, bool clamped,
                                  double d0, double dn) {
  const std::size_t n = x.size();
  std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
  auto h = [&](std::size_t i) { return x[i + 1] - x[i]; };
  auto sl = [&](std::size_t i) { return (y[i + 1] - y[i]) / h(i); };
  if (clamped) {
    di[0] = 1.0;
    rhs[0] = d0;
    di[n - 1] = 1.0;
    rhs[n - 1] = dn;
  } else {
    di[0] = 2.0;
    up[0] = 1.0;
    rhs[0] = 3.0 * sl(0);
    lo[n - 1] = 1.0;
    di[n - 1] = 2.0;
    rhs[n - 1] = 3.0 * sl(n - 2);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    lo[i] = h(i);
    di[i] = 2.0 * (h(i - 1) + h(i));
    up[i] = h(i - 1);
    rhs[i] = 3.0 * (h(i) * sl(i - 1) + h(i - 1) * sl(i));
  }
  return solve_tridiagonal(lo, di, up, rhs);
}

}  // namespace

CubicSpline CubicSpline::natural(std::vector<double> x, std::vector<double> y) {
  if (x.size() < 2) throw Error(ErrorCode::BadParams, "spline needs at least two samples");
  auto dy = spline_slopes(x, y, false, 0.0, 0.0);
  return CubicSpline(std::move(x), std::move(y), std::move(dy));
}

CubicSpline CubicSpline::clamped(std::vector<double> x, std::vector<double> y, double d0, double dn) {
  if (x.size() < 2) throw Error(ErrorCode::BadParams, "spline needs at least two samples");
  auto dy = spline_slopes(x, y, true, d0, dn);
  return CubicSpline(std::move(x), std::move(y), std::move(dy));
}

std::size_t CubicSpline::piece(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  const std::size_t i = piece(x);
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * y_[i] + h * h10 * dy_[i] + h01 * y_[i + 1] + h * h11 * dy_[i + 1];
}

double CubicSpline::d1(double x) const {
  const std::size_t i = piece(x);
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double g00 = 6 * t * t - 6 * t, g10 = 3 * t * t - 4 * t + 1;
  const double g01 = -g00, g11 = 3 * t * t - 2 * t;
  return g00 * y_[i] / h + g10 * dy_[i] + g01 * y_[i + 1] / h + g11 * dy_[i + 1];
}

double CubicSpline::d2(double x) const {
  const std::size_t i = piece(x);
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double k00 = 12 * t - 6, k10 = 6 * t - 4, k11 = 6 * t - 2;
  return (k00 * (y_[i] - y_[i + 1]) / h + k10 * dy_[i] + k11 * dy_[i + 1]) / h;
}

Polynomial CubicSpline::piece_polynomial(std::size_t i) const {
  const double h = x_[i + 1] - x_[i];
  const double y0 = y_[i], y1 = y_[i + 1], m0 = dy_[i] * h, m1 = dy_[i + 1] * h;
  // in t = (x - x_i)/h
  Polynomial pt({y0, m0, -3 * y0 - 2 * m0 + 3 * y1 - m1, 2 * y0 + m0 - 2 * y1 + m1});
  return pt.compose_affine(1.0 / h, -x_[i] / h);
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    rule.weights[k] = 2.0 * v * v;
  }
  // symmetrize to remove eigensolver asymmetry
  for (int k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (rule.nodes[n - 1 - k] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[k] + rule.weights[n - 1 - k]);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    rule.weights[k] = rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx), f2 = f(c + dx);
    rk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                              double abs_tol, int max_intervals) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment s0 = gk15(f, a, b);
  heap.push(s0);
  double value = s0.value, error = s0.error;
  out.evaluations = 15;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size()) < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    Segment l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
    out.evaluations += 30;
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // resum to limit drift from incremental updates
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

std::vector<OdeStep> dopri45(const OdeRhs& f, double t0, const Eigen::VectorXd& y0, double t1,
                             const OdeOptions& opt, const std::function<bool(const OdeStep&)>& stop) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Eigen::Index n = y0.size();
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<OdeStep> out;
  Eigen::VectorXd y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n);
  f(t0, y, k1);
  out.push_back({t0, y, k1});
  if (t0 == t1) return out;
  if (stop && stop(out.back())) return out;

  double h = opt.h0 > 0 ? opt.h0 : std::max(1e-6 * std::abs(t1 - t0), 1e-12);
  if (opt.h_max > 0) h = std::min(h, opt.h_max);
  double t = t0;
  for (int step = 0; step < opt.max_steps; ++step) {
    if (dir * (t + dir * h - t1) > 0) h = std::abs(t1 - t);
    const double hs = dir * h;
    f(t + c2 * hs, y + hs * (a21 * k1), k2);
    f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2), k3);
    f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3), k4);
    f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
    f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
    ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + hs, ynew, k7);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      en = std::max(en, std::abs(err(i)) / sc);
    }
    if (en <= 1.0) {
      t += hs;
      y = ynew;
      k1 = k7;
      out.push_back({t, y, k1});
      if (stop && stop(out.back())) return out;
      if (dir * (t - t1) >= 0) return out;
    }
    const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= fac;
    if (opt.h_max > 0) h = std::min(h, opt.h_max);
    if (h < 1e-15 * std::max(1.0, std::abs(t))) throw Error(ErrorCode::BadParams, "ODE step size underflow");
  }
  throw Error(ErrorCode::BadParams, "ODE integration exceeded the step budget");
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int i = 0; i < max_iter && std::abs(hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Rational best_rational(double x, long long max_den) {
  // continued-fraction convergents and the best semiconvergent within the cap
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  Rational best{static_cast<long long>(std::llround(x)), 1};
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(r);
    const long long ai = static_cast<long long>(fl);
    const long long q2 = ai * q1 + q0;
    if (q2 > max_den) {
      const long long k = (max_den - q0) / q1;
      Rational semi{k * p1 + p0, k * q1 + q0};
      Rational conv{p1, q1};
      const double es = std::abs(x - static_cast<double>(semi.p) / static_cast<double>(semi.q));
      const double ec = std::abs(x - static_cast<double>(conv.p) / static_cast<double>(conv.q));
      best = (k > 0 && es < ec) ? semi : conv;
      break;
    }
    const long long p2 = ai * p1 + p0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    best = {p1, q1};
    const double frac = r - fl;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return best;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

PiecewiseChebyshev::PiecewiseChebyshev(const std::function<Eigen::VectorXd(double)>& f, double lo, double hi,
                                       int degree, double tol, int max_pieces)
    : lo_(lo), hi_(hi), degree_(degree) {
  if (!(hi > lo)) throw Error(ErrorCode::BadParams, "empty interpolation interval");
  for (int pieces = 1;; pieces *= 2) {
    fit(f, pieces);
    // check between the Chebyshev nodes, per component
    Eigen::VectorXd err, scale;
    for (int k = 0; k < pieces; ++k)
      for (int j = 0; j < 3; ++j) {
        const double w = (hi_ - lo_) / pieces;
        const double x = lo_ + w * (k + (j + 0.37) / 3.0);
        const Eigen::VectorXd exact = f(x);
        const Eigen::VectorXd e = (exact - (*this)(x)).cwiseAbs();
        if (err.size() == 0) {
          err = e;
          scale = exact.cwiseAbs();
        } else {
          err = err.cwiseMax(e);
          scale = scale.cwiseMax(exact.cwiseAbs());
        }
      }
    const double floor = 1e-12 * scale.maxCoeff() + 1e-300;
    error_ = (err.array() / scale.array().max(floor)).maxCoeff();
    if (error_ <= tol || pieces * 2 > max_pieces) return;
  }
}

void PiecewiseChebyshev::fit(const std::function<Eigen::VectorXd(double)>& f, int pieces) {
  pieces_ = pieces;
  coeffs_.assign(pieces, Eigen::MatrixXd());
  const int n = degree_ + 1;
  const double w = (hi_ - lo_) / pieces;
  for (int k = 0; k < pieces; ++k) {
    const double a = lo_ + k * w;
    std::vector<Eigen::VectorXd> vals(n);
    for (int j = 0; j < n; ++j) {
      const double t = std::cos(M_PI * (j + 0.5) / n);
      vals[j] = f(a + 0.5 * w * (t + 1.0));
    }
    dim_ = static_cast<int>(vals[0].size());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, dim_);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) c.row(i) += std::cos(M_PI * i * (j + 0.5) / n) * vals[j].transpose();
      c.row(i) *= (i == 0 ? 1.0 : 2.0) / n;
    }
    coeffs_[k] = std::move(c);
  }
}

Eigen::VectorXd PiecewiseChebyshev::operator()(double x) const {
  const double w = (hi_ - lo_) / pieces_;
  int k = static_cast<int>(std::floor((x - lo_) / w));
  k = std::clamp(k, 0, pieces_ - 1);
  const double t = 2.0 * (x - (lo_ + k * w)) / w - 1.0;
  const Eigen::MatrixXd& c = coeffs_[k];
  Eigen::RowVectorXd b1 = Eigen::RowVectorXd::Zero(dim_), b2 = b1;
  for (int i = degree_; i >= 1; --i) {
    Eigen::RowVectorXd b0 = 2.0 * t * b1 - b2 + c.row(i);
    b2 = b1;
    b1 = b0;
  }
  return (t * b1 - b2 + c.row(0)).transpose();
}

double PiecewiseChebyshev::operator()(double x, int component) const {
  const double w = (hi_ - lo_) / pieces_;
  int k = static_cast<int>(std::floor((x - lo_) / w));
  k = std::clamp(k, 0, pieces_ - 1);
  const double t = 2.0 * (x - (lo_ + k * w)) / w - 1.0;
  const Eigen::MatrixXd& c = coeffs_[k];
  double b1 = 0.0, b2 = 0.0;
  for (int i = degree_; i >= 1; --i) {
    const double b0 = 2.0 * t * b1 - b2 + c(i, component);
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c(0, component);
}

}  // namespace skrp
