#pragma once

#include "skrp/profiles.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace skrp {

// 1/Q split into simple-pole parts at root endpoints plus a regular remainder.
class LogDensity {
 public:
  LogDensity() = default;
  explicit LogDensity(const Profile& profile);

  const Profile& profile() const { return profile_; }
  // endpoints that are simple roots, with residues 1/Q'(e)
  const std::vector<std::pair<double, double>>& poles() const { return poles_; }

  double regular(double phi) const;             // 1/Q minus the pole parts
  double singular_log(double phi) const;        // sum of residue * log|phi - e|
  // integral of the regular part from the interval start, exact up to quadrature
  double regular_integral(double phi) const;

 private:
  Profile profile_;
  std::vector<std::pair<double, double>> poles_;
  std::vector<Deflation> defl_;
  std::vector<double> breaks_, cumulative_;
};

// Exact radial coordinate r(phi) with log r = log r_a + a * int_{phi_a}^{phi} 1/Q.
class RadialMap {
 public:
  RadialMap() = default;
  RadialMap(const Profile& profile, double a, double phi_a, double r_a);

  const Profile& profile() const { return dens_.profile(); }
  double a() const { return a_; }
  double phi_anchor() const { return phi_a_; }
  double r_anchor() const { return r_a_; }

  double log_r(double phi) const;
  double phi_of_log_r(double log_r) const;
  double phi(double r) const { return phi_of_log_r(std::log(r)); }
  double r(double phi) const { return std::exp(log_r(phi)); }

  // Frame near the endpoint e where Q(e) = 0 and Q'(e) = 2a, so r -> 0 there.
  struct Center {
    double u;    // |phi - e|
    double E;    // r^2 / u
    double q;    // Q/(phi - e)
    double p;    // (q - 2a)/(phi - e)
    double phi;
    double Q;
  };
  bool has_center() const { return center_.has_value(); }
  double center_root() const;
  double center_span() const;  // largest u supported by the center frame
  Center center(double xi) const;

 private:
  struct CenterData {
    Deflation defl;
    double sigma;  // +1 when e is the lower endpoint
    double span;
    double E0;
    std::vector<double> breaks, cumulative;
    double S(double u) const;
    double integrand(double u) const;
  };

  LogDensity dens_;
  double a_ = 1.0, phi_a_ = 0.0, r_a_ = 1.0;
  double offset_ = 0.0;
  std::vector<double> guess_phi_, guess_logr_;
  std::optional<CenterData> center_;
};

// sgn(a)-free arclength int_{phi1}^{phi2} dphi/sqrt(Q), regularized at root endpoints.
double arclength(const Profile& profile, double phi1, double phi2);

struct ReparamTable {
  Profile profile;
  double a = 1.0;
  std::pair<double, double> anchor;
  // nodes sorted by increasing r
  std::vector<double> phi, r, s;
  std::vector<double> log_r;   // unclamped
  std::vector<double> G, dG;   // regular part of log r and its phi-slope
  double L = 0.0;
  bool overflow = false;       // r exceeds the sentinel, at a node or toward a root endpoint
  double ode_residual = 0.0;   // max relative mismatch of dr/dphi = a r/Q at nodes
  std::vector<std::pair<double, double>> poles;  // (root, residue) used by the split

  static constexpr double kSentinel = 1e12;

  double r_of_phi(double phi) const;
  double log_r_of_phi(double phi) const;
  double phi_of_r(double r) const;
  double s_of_phi(double phi) const;
  std::size_t size() const { return phi.size(); }
};

ReparamTable build_reparam(const Profile& profile, double a, std::pair<double, double> anchor, int nodes = 512);
double compute_L(const Profile& profile);
ReparamTable dual_table(const ReparamTable& table);
// max relative deviation of the interpolant slope d(log r)/dphi from a/Q between nodes
double table_ode_residual(const ReparamTable& table);

enum class Endpoint { Lower, Upper };

struct BoundaryLimits {
  double q0 = 0.0;
  double q0_exact = 0.0;
  double dphi_dxi = 0.0;
  double d2phi_dxi2 = 0.0;
  double dq_dxi = 0.0;
  double d2q_dxi2 = 0.0;
  double ratio_dphi = 0.0, ratio_d2phi = 0.0, ratio_dq = 0.0, ratio_d2q = 0.0;
  bool pass = false;
};
BoundaryLimits boundary_limits(const ReparamTable& table, Endpoint endpoint);

}  // namespace skrp
