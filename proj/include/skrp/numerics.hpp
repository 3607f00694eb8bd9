#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace skrp {

// Dense polynomial, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial monomial(int degree, double coeff = 1.0);
  static Polynomial linear(double c0, double c1) { return Polynomial({c0, c1}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }

  double operator()(double x) const;
  Polynomial derivative() const;
  // p(s*x + t)
  Polynomial compose_affine(double s, double t) const;
  // Quotient of (p - p(e)) by (x - e), via synthetic division.
  Polynomial deflate(double e) const;
  // Coefficients of p(e + u) as a polynomial in u.
  Polynomial shifted(double e) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

 private:
  void trim();
  std::vector<double> c_{0.0};
};

// N(x) / D(x)
struct RationalFunction {
  Polynomial num;
  Polynomial den{std::vector<double>{1.0}};

  double operator()(double x) const { return num(x) / den(x); }
  double d1(double x) const;
  double d2(double x) const;
  // (R(x) - R(e)) / (x - e) without cancellation
  double divided_difference(double x, double e) const;
  // second divided difference R[e, e, x]
  double divided_difference2(double x, double e) const;
};

// Piecewise cubic Hermite interpolant; natural or clamped cubic spline when
// built from samples alone.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y, std::vector<double> dy);

  static CubicSpline natural(std::vector<double> x, std::vector<double> y);
  static CubicSpline clamped(std::vector<double> x, std::vector<double> y, double d0, double dn);

  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  std::size_t piece(double x) const;
  // cubic of piece i as a polynomial in the global variable
  Polynomial piece_polynomial(std::size_t i) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return dy_; }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, dy_;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// Fixed rule on [a, b].
template <class F>
double gauss_integrate(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7/15.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol = 1e-10, double abs_tol = 1e-14, int max_intervals = 2000);

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 0.0;
  double h_max = 0.0;
  int max_steps = 200000;
};

using OdeRhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct OdeStep {
  double t;
  Eigen::VectorXd y;
  Eigen::VectorXd dy;
};

// Dormand-Prince 5(4); returns accepted steps including the initial point.
// `stop` may end integration early (checked after each accepted step).
std::vector<OdeStep> dopri45(const OdeRhs& f, double t0, const Eigen::VectorXd& y0, double t1,
                             const OdeOptions& opt = {},
                             const std::function<bool(const OdeStep&)>& stop = {});

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13,
              int max_iter = 400);

// Best rational approximation with bounded denominator.
struct Rational {
  long long p = 0;
  long long q = 1;
};
Rational best_rational(double x, long long max_den);

long long binomial(int n, int k);

// Vector-valued piecewise Chebyshev interpolant on [lo, hi]; pieces are doubled
// until the midpoint error drops below tol (relative to the value scale).
class PiecewiseChebyshev {
 public:
  PiecewiseChebyshev() = default;
  PiecewiseChebyshev(const std::function<Eigen::VectorXd(double)>& f, double lo, double hi, int degree = 24,
                     double tol = 1e-14, int max_pieces = 4096);

  Eigen::VectorXd operator()(double x) const;
  double operator()(double x, int component) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int pieces() const { return pieces_; }
  double fit_error() const { return error_; }

 private:
  void fit(const std::function<Eigen::VectorXd(double)>& f, int pieces);
  double lo_ = 0, hi_ = 1;
  int degree_ = 24, pieces_ = 1, dim_ = 1;
  double error_ = 0;
  std::vector<Eigen::MatrixXd> coeffs_;  // per piece: (degree+1) x dim
};

// Uniform doubles with a platform-independent bit mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace skrp
