#pragma once

#include "skrp/numerics.hpp"
#include "skrp/profiles.hpp"
#include "skrp/reparam.hpp"
#include "skrp/tensor.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <variant>

namespace skrp {

struct ShellSpec {
  int m = 2;
  Profile profile;
  double a = 1.0;
  int epsilon = 1;
  double c = 0.0;
  std::optional<std::pair<double, double>> anchor;  // (phi_a, r_a); default (mid, 1)
  double margin = 0.02;                              // fraction of the phi-interval kept off the chart
};

struct AnnulusSpec {
  Profile profile;
  double a = 1.0;
  std::optional<std::pair<double, double>> anchor;
  double margin = 0.02;
};

struct SphereSpec {
  double K = 1.0;
  double phi0 = 1.0;
};

struct ProductSpec {
  double K = 1.0;
  double t = 1.0;
};

struct BallSpec {
  int m = 1;
  Profile profile;
  double a = 1.0;
  std::optional<std::pair<double, double>> anchor;
};

using ModelSpec = std::variant<ShellSpec, AnnulusSpec, SphereSpec, ProductSpec, BallSpec>;

// A chart with its radial data and a seeded sampler of interior points.
struct Model {
  Chart chart;
  std::shared_ptr<const RadialMap> radial;
  std::function<Eigen::VectorXd(Rng&)> sample;
  Interval sample_phi;  // phi-range covered by sample()
};

Model build_shell(const ShellSpec& spec);
Model build_annulus(const AnnulusSpec& spec);
Model build_ball(const BallSpec& spec);
Model build_product(const ProductSpec& spec);

struct SphereModel {
  Model model;
  Model dual;  // chart about the opposite pole, related by zeta -> 1/zeta
  std::function<Eigen::Vector3d(const Eigen::VectorXd&)> chi;  // into the unit sphere
  double L = 0.0;
};
SphereModel build_sphere(const SphereSpec& spec);

Model build_model(const ModelSpec& spec);

struct BallCoeffs {
  double c1 = 0.0;  // coefficient of xi (x) xi + xi' (x) xi', with xi = a Re<x, .>
  double c2 = 0.0;  // coefficient of the Euclidean metric
};
// c is the endpoint where Q = 0 and dQ/dphi = 2a; values at r = 0 are the exact limits
BallCoeffs ball_extension_coeffs(const Profile& profile, double a, double c, double r,
                                 std::optional<std::pair<double, double>> anchor = std::nullopt);

struct TautologicalData {
  std::complex<double> Gamma[2];  // Gamma(d/dy1), Gamma(d/dy2)
  std::complex<double> Omega;     // Omega(d/dy1, d/dy2) = i dGamma
  double omega_fs = 0.0;          // omega_FS(d/dy1, d/dy2)
  double imag_residual = 0.0;     // |Im Omega|
};
TautologicalData tautological_connection(const Eigen::Vector2d& y, const FDConfig& fd = {});
// Fubini-Study metric on the affine chart w = (1, y), normalized to total area pi
Eigen::Matrix2d fubini_study_metric(const Eigen::Vector2d& y);

// zeta -> 1/zeta on C = R^2 and its Jacobian
Eigen::VectorXd inversion(const Eigen::VectorXd& z);
Eigen::MatrixXd inversion_jacobian(const Eigen::VectorXd& z);

}  // namespace skrp
