#pragma once

#include "skrp/models.hpp"
#include "skrp/tensor.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace skrp {

struct VerifyOptions {
  FDConfig fd;
  double outer_h = 1e-2;   // relative step for derivatives of Q and Y
  double nested_h = 5e-3;  // inner step when Q and Y are evaluated off the sample point
  int threads = 1;
  double tau_offset = 0.0;  // added to tau in identity (ii); negative controls only
};

// f(i) for i in [0, n) on up to `threads` workers; the first failure by index is rethrown
template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  auto work = [&](int t) {
    for (int i = t; i < n; i += threads) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Eigen::VectorXd> sample_points(const Model& model, int count, std::uint64_t seed);

struct PointSample {
  Eigen::VectorXd x;
  double phi = 0, Q = 0, sigma = 0, tau = 0, lambda = 0, mu = 0, Y = 0;
};

struct SkrpReport {
  std::vector<PointSample> samples;
  double hess_H = 0, ric_H = 0;          // Hess - sigma g, Ric - lambda g on H
  double hess_mixed = 0, ric_mixed = 0;  // H-V blocks
  double hess_V = 0, ric_V = 0;          // Hess - tau g, Ric - mu g on V
  int epsilon_mismatches = 0;            // sgn(sigma) != epsilon
  double max_residual() const;
};
SkrpReport skrp_report(const Chart& chart, const std::vector<Eigen::VectorXd>& points, const VerifyOptions& opt = {});

struct IdentityReport {
  double dQ = 0;       // dQ - 2 tau dphi
  double Y = 0;        // Y - 2 tau - 2(m-1) sigma
  double sigma_c = 0;  // Q - 2(phi - c) sigma
  double dY = 0;       // dY + 2 mu dphi
  double profile = 0;  // 2 tau - Q'(phi)
  bool sigma_c_vacuous = false;
  bool profile_vacuous = false;
  double max_residual() const;
};
// require_c: identity (iii) requested explicitly, so epsilon = 0 raises MissingC
IdentityReport identity_report(const Chart& chart, const std::vector<Eigen::VectorXd>& points,
                               const VerifyOptions& opt = {}, bool require_c = false);

struct ConformalEinsteinReport {
  double einstein_res = 0;
  double lambda_spread = 0;
  double wedge_res = 0;
  std::vector<double> lambdas;
};
ConformalEinsteinReport conformal_einstein_report(const Chart& chart, const std::vector<Eigen::VectorXd>& points,
                                                  const VerifyOptions& opt = {});

double soliton_report(const Chart& chart, double p, double s0, const std::vector<Eigen::VectorXd>& points,
                      const VerifyOptions& opt = {});

struct NormalGeodesicReport {
  double dphids_res = 0;
  double gauss_res = 0;
  double drift = 0;
  std::optional<double> distance_vs_L;
  double arclength = 0;  // pole-to-pole length when measured
  bool left_domain = false;
};
struct GeodesicOptions {
  int fan = 16;
  int steps = 4096;
  FDConfig fd{1e-3, 4, false};
};
NormalGeodesicReport normal_geodesic_report(const SphereModel& sphere, const GeodesicOptions& opt = {});
NormalGeodesicReport normal_geodesic_report(const Model& shell, const GeodesicOptions& opt = {});

struct Classification {
  TypeTag tag;
  std::vector<std::string> notes;
};
Classification classify_model(const ChartMeta& meta);

}  // namespace skrp
