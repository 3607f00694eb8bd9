#pragma once

#include "skrp/numerics.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skrp {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool interior(double x) const { return x > lo && x < hi; }
};

enum class Family { Quadratic, TypeA, TypeB, TypeC, Polynomial, Custom };

std::string to_string(Family f);

struct ProfileSpec {
  Family family = Family::Quadratic;
  int m = 2;
  double K = 0.0;
  double phi0 = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double c = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  std::vector<double> coeffs;                        // Polynomial, ascending powers of phi
  std::vector<double> grid_phi;
  std::vector<double> grid_Q;
  std::vector<double> grid_dQ;                       // optional exact slopes at the samples
  std::optional<std::pair<double, double>> end_slopes;  // clamped spline ends

  static ProfileSpec quadratic(double K, double phi0);
  static ProfileSpec type_a(int m, double K, double alpha, double eta);
  static ProfileSpec type_b(int m, double K, double alpha, double eta);
  static ProfileSpec type_c(int m, double c, double A, double B, double C);
  static ProfileSpec polynomial(std::vector<double> coeffs);
  static ProfileSpec custom(std::vector<double> phi, std::vector<double> Q);

  void validate() const;
};

// Q = (phi - e) q(phi),  q = q0 + (phi - e) p(phi)
class Deflation {
 public:
  Deflation() = default;
  Deflation(double root, Polynomial q_num, Polynomial p_num, Polynomial den, double den_root);
  Deflation(double root, std::shared_ptr<const CubicSpline> spline);

  double root() const { return e_; }
  double q0() const { return q0_; }
  double q(double phi) const;
  double p(double phi) const;

 private:
  double e_ = 0.0;
  double q0_ = 0.0;
  Polynomial qn_, pn_, den_;
  double de_ = 1.0;
  std::shared_ptr<const CubicSpline> spline_;
  Polynomial piece_q_, piece_p_;
  Interval piece_;
};

class Profile {
 public:
  Profile() = default;
  Profile(ProfileSpec spec, Interval interval, RationalFunction rf);
  Profile(ProfileSpec spec, Interval interval, CubicSpline spline);

  const ProfileSpec& spec() const { return spec_; }
  Family family() const { return spec_.family; }
  const Interval& interval() const { return interval_; }
  Profile restricted(Interval iv) const;

  double Q(double phi) const;
  double dQ(double phi) const;
  double d2Q(double phi) const;
  double operator()(double phi) const { return Q(phi); }

  std::pair<double, double> endpoint_values() const { return {Q(interval_.lo), Q(interval_.hi)}; }
  std::pair<double, double> endpoint_slopes() const { return {dQ(interval_.lo), dQ(interval_.hi)}; }

  bool is_spline() const { return spline_ != nullptr; }
  const RationalFunction* rational() const { return spline_ ? nullptr : &rf_; }
  const CubicSpline* spline() const { return spline_.get(); }

  // endpoint counts as a root when |Q| there is below this scale
  double root_tolerance() const;
  bool endpoint_is_root(double e) const;
  Deflation deflation(double e) const;

  // quadrature panel breaks over the interval
  std::vector<double> panel_breaks(int uniform_panels = 64) const;

 private:
  ProfileSpec spec_;
  Interval interval_;
  RationalFunction rf_;
  Polynomial n1_, n2_, d1_, d2_;
  std::shared_ptr<const CubicSpline> spline_;
};

// Closed-form representation of a non-custom family.
RationalFunction family_rational(const ProfileSpec& spec);

Profile make_profile(const ProfileSpec& spec, Interval interval);

struct FE {
  double F;
  double E;
};
double eval_E(int m, double t);
double eval_F(int m, double t);
FE eval_FE(int m, double t);

struct FBc1 {
  double f;
  double factor_residual;
};
FBc1 eval_f_bc1(int k, double beta);
// Same polynomial expanded about beta = 1 with exact integer coefficients.
double eval_f_bc1_shifted(int k, double beta);

struct SignScan {
  int k = 0;
  std::vector<double> zeros;
  bool only_expected = true;   // every zero within tol of 1 or (-1)^k
  bool all_expected_found = true;
  double max_factor_residual = 0.0;  // relative to 1 + |f|
};
SignScan scan_f_bc1(int k, double lo, double hi, int count, double tol = 1e-9);

struct SearchOptions {
  double box_lo = -1e3;
  double box_hi = 1e3;
  int grid = 10000;
  double bisect_tol = 1e-13;
};

Profile find_admissible_interval(const ProfileSpec& spec, double seed, const SearchOptions& opt = {});

struct BoundaryReport {
  std::pair<double, double> endpoint_values;
  std::pair<double, double> endpoint_slopes;
  bool roots_ok = false;
  bool positivity_ok = false;
  bool slopes_nonzero = false;
  bool slopes_opposite = false;
  double tol = 0.0;

  bool pass() const { return roots_ok && positivity_ok && slopes_nonzero && slopes_opposite; }
};

double default_mw1_tol(const Profile& p);
BoundaryReport check_mw1(const Profile& profile, double tol);
inline BoundaryReport check_mw1(const Profile& profile) { return check_mw1(profile, default_mw1_tol(profile)); }

struct SyReport {
  Interval t_interval;
  bool a_analytic = false;
  bool b_roots = false;
  bool c_positive = false;
  bool d_slopes_nonzero = false;
  bool e_slopes_opposite = false;
  bool one_not_in_I = false;
  std::pair<double, double> dQdt;
  bool rationality_vacuous = false;
  bool rationality_ok = false;
  std::pair<Rational, Rational> rational_values;

  bool conditions_hold() const {
    return a_analytic && b_roots && c_positive && d_slopes_nonzero && e_slopes_opposite;
  }
};
SyReport check_sy(int m, const Profile& profile, double tol = 1e-9);

enum class Tag { A, B, C1, C2 };
std::string to_string(Tag t);

struct TypeTag {
  Tag tag = Tag::A;
  int epsilon = 0;
  std::optional<double> c;
  bool excluded = false;  // type B cannot be compact
  std::string note;
};
TypeTag classify_type(int epsilon, std::optional<double> c, Interval interval);

struct SolitonParams {
  int m = 2;
  double p = 1.0;
  double s0 = 0.0;
  double kappa = 0.0;
  int epsilon = 1;
  double c = 0.0;
  double phi_a = 1.0;
  double Q_a = 1.0;
  Interval range;
};

struct SolitonProfile {
  Profile profile;
  bool truncated = false;
};

double soliton_rhs(const SolitonParams& s, double phi, double Q);
SolitonProfile soliton_profile(const SolitonParams& params);
// max |p Q' - Q + (m-1) p Q/(phi-c) - eps p kappa + 2 s0 (phi-c)| relative to the term scale
double soliton_ode_residual(const SolitonParams& params, const Profile& profile, int points = 100);

struct Bc2Report {
  bool interval_found = false;
  Interval interval;
  BoundaryReport mw1;
  bool symmetric = false;
  bool pass = false;
  std::string note;
};
Bc2Report verify_bc2(const ProfileSpec& spec, const SearchOptions& opt = {});

}  // namespace skrp
