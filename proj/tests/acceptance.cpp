#include "skrp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

using namespace skrp;
using cli::json;
namespace fs = std::filesystem;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

// below: value <= tol; above: value > tol
struct Measure {
  std::string label;
  double value;
  double tol;
  bool above = false;
  bool ok() const { return above ? value > tol : value <= tol; }
};

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<Measure>()> run;
};

json load(const std::string& name) { return cli::load_json(std::string(SKRP_CONFIG_DIR) + "/" + name); }

json verify(json config, const std::vector<std::pair<std::string, double>>& plan, int points) {
  json items = json::array();
  for (const auto& [check, tol] : plan) items.push_back({{"check", check}, {"tolerance", tol}});
  config["plan"] = items;
  config["points"] = points;
  return cli::verify(cli::parse_config(config)).report;
}

const json& check(const json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) {
      if (c["residual"].is_null()) throw std::runtime_error(name + ": " + c.value("error", std::string("no residual")));
      return c;
    }
  throw std::runtime_error("missing check " + name);
}

Measure from(const json& report, const std::string& name, const std::string& label = "") {
  const json& c = check(report, name);
  return {label.empty() ? name : label, c["residual"].get<double>(), c["tolerance"].get<double>()};
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

Profile random_cubic(Rng& rng) {
  std::vector<double> c(4);
  for (auto& x : c) x = rng.uniform(-1.0, 1.0);
  const Polynomial P(c);
  double lo = INFINITY;
  for (int i = 0; i <= 4000; ++i) lo = std::min(lo, P(1.0 + i / 4000.0));
  c[0] += rng.uniform(0.2, 1.0) - lo;
  return make_profile(ProfileSpec::polynomial(c), {1.0, 2.0});
}

Model random_shell(Rng& rng) { return build_shell({2, random_cubic(rng), 1.0, 1, 0.0}); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<Criterion> criteria() {
  std::vector<Criterion> c;

  c.push_back({1, "sphere curvature equals K at 50 points including near the pole", [] {
                 const json r = verify(load("sphere_k4.json"), {{"curvature_K", 1e-5}}, 40);
                 return std::vector<Measure>{from(r, "curvature_K", "max |K_FD - K|/K")};
               }});

  c.push_back({2, "sphere pole-to-pole length", [] {
                 const json r = verify(load("sphere_k4.json"), {{"L_closed_form", 1e-8}, {"distance_L", 1e-4}}, 10);
                 return std::vector<Measure>{from(r, "L_closed_form", "|L - pi/2|/(pi/2)"),
                                             from(r, "distance_L", "|d - L|/L")};
               }});

  c.push_back({3, "20 random polynomial shells satisfy the block structure", [] {
                 Rng rng(2024);
                 std::vector<double> res;
                 for (int i = 0; i < 20; ++i) {
                   const Model M = random_shell(rng);
                   res.push_back(skrp_report(M.chart, sample_points(M, 100, 100 + i)).max_residual());
                 }
                 return std::vector<Measure>{{"max block residual", max_of(res), 1e-5}};
               }});

  c.push_back({4, "structure identities on a shell and on the product", [] {
                 std::vector<Measure> out;
                 const std::vector<std::string> ids = {"identity_dQ", "identity_Y", "identity_sigma_c", "identity_dY",
                                                       "identity_profile"};
                 for (const char* file : {"shell_quadratic.json", "product.json"}) {
                   std::vector<std::pair<std::string, double>> plan;
                   for (const auto& id : ids) plan.push_back({id, 1e-5});
                   const json r = verify(load(file), plan, 100);
                   std::vector<double> v;
                   for (const auto& id : ids) v.push_back(check(r, id)["residual"].get<double>());
                   out.push_back({std::string(file) + " max identity", max_of(v), 1e-5});
                 }
                 return out;
               }});

  c.push_back({5, "conformally Einstein examples and a generic negative control", [] {
                 std::vector<Measure> out;
                 for (const char* file : {"product.json", "typec_einstein.json"}) {
                   const json r = verify(load(file), {{"einstein", 1e-4}, {"lambda_spread", 1e-4}, {"wedge", 1e-6}}, 100);
                   const std::string tag = std::string(file) + " ";
                   out.push_back(from(r, "einstein", tag + "einstein"));
                   out.push_back(from(r, "lambda_spread", tag + "lambda spread"));
                   out.push_back(from(r, "wedge", tag + "wedge"));
                 }
                 Rng rng(77);
                 const Model G = random_shell(rng);
                 out.push_back({"generic shell einstein", conformal_einstein_report(G.chart, sample_points(G, 100, 78)).einstein_res,
                                1e-2, true});
                 return out;
               }});

  c.push_back({6, "tautological bundle curvature", [] {
                 const json r = verify(load("product.json"), {{"tautological_curvature", 1e-6}, {"tautological_real", 1e-8}}, 1);
                 return std::vector<Measure>{from(r, "tautological_curvature", "|Omega + 2 omega_FS|"),
                                             from(r, "tautological_real", "|Im Omega|")};
               }});

  c.push_back({7, "annulus inversion duality", [] {
                 const json r = verify(load("annulus.json"), {{"duality_metric", 1e-10}, {"duality_phi", 1e-9}}, 100);
                 return std::vector<Measure>{from(r, "duality_metric", "pullback metric"), from(r, "duality_phi", "phi")};
               }});

  c.push_back({8, "sign changes of f_bc1 for k = 2..10", [] {
                 double factor = 0.0, unexpected = 0.0, missing = 0.0;
                 for (int k = 2; k <= 10; ++k) {
                   const SignScan s = scan_f_bc1(k, -3.0, 3.0, 10000);
                   factor = std::max(factor, s.max_factor_residual);
                   unexpected += !s.only_expected;
                   missing += !s.all_expected_found;
                 }
                 return std::vector<Measure>{{"factorization residual", factor, 1e-10},
                                             {"unexpected sign changes", unexpected, 0},
                                             {"missing sign changes", missing, 0}};
               }});

  c.push_back({9, "bc2 symmetry for type B and inadmissibility of type A with alpha != 0", [] {
                 Rng rng(909);
                 double asym = 0.0, admissible_b = 0.0, tried_b = 0.0;
                 while (admissible_b < 200 && tried_b < 2000) {
                   ++tried_b;
                   const int m = 2 + static_cast<int>(rng.uniform() * 6);
                   const bool even_family = m % 2 == 1 && rng.uniform() < 0.75;
                   const double K = even_family ? 0.0 : rng.uniform(-1.0, 1.0);
                   const ProfileSpec s = ProfileSpec::type_b(m, K, -rng.uniform(0.1, 2.0) * (even_family ? 1 : rng.uniform(-1, 1)),
                                                             -rng.uniform(0.1, 2.0));
                   const Bc2Report r = verify_bc2(s);
                   if (!r.interval_found || !r.mw1.pass()) continue;
                   ++admissible_b;
                   asym = std::max(asym, std::abs(r.interval.lo + r.interval.hi) / std::abs(r.interval.hi));
                 }
                 double a_passed = 0.0, a_found = 0.0;
                 for (int i = 0; i < 200; ++i) {
                   const int m = 2 + static_cast<int>(rng.uniform() * 5);
                   const double K = rng.uniform(0.5, 2.0), rho = rng.uniform(0.5, 1.2);
                   const double alpha = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 2.0);
                   const Bc2Report r = verify_bc2(ProfileSpec::type_a(m, K, alpha, -m * (2.0 * m - 1) * K * rho * rho));
                   a_found += r.interval_found;
                   a_passed += r.interval_found && r.mw1.pass();
                 }
                 return std::vector<Measure>{{"type B admissible sets found", admissible_b, 199, true},
                                             {"type B max |lo + hi|/phi_max", asym, 1e-9},
                                             {"type A sets with an interval about 0", a_found, 0, true},
                                             {"type A sets passing the boundary conditions", a_passed, 0}};
               }});

  c.push_back({10, "gradient Kahler-Ricci soliton", [] {
                 const json r = verify(load("soliton.json"), {{"soliton", 1e-4}}, 100);
                 return std::vector<Measure>{from(r, "soliton", "soliton residual")};
               }});

  c.push_back({11, "smooth extension over the ball", [] {
                 const json r = verify(load("ball.json"),
                                       {{"ball_q0", 1e-6}, {"ball_c1_finite", 0.1}, {"ball_positive", 0}, {"ball_ratios", std::log(5.0)}},
                                       1);
                 const json& q0 = check(r, "ball_q0");
                 const json& c1 = check(r, "ball_c1_finite");
                 const double c1v = c1["c1_1e-4"].get<double>();
                 return std::vector<Measure>{{"q0", q0["q0"].get<double>(), 0.0, true},
                                             from(r, "ball_q0", "|q0 - Q'(c)/2|/q0"),
                                             {"c1 finite (|c1| at r = 1e-4)", std::abs(c1v), 1e300},
                                             from(r, "ball_c1_finite", "c1 relative change 1e-3 vs 1e-4"),
                                             from(r, "ball_positive", "limit metric not positive"),
                                             from(r, "ball_ratios", "max |log ratio| (ratios within [0.2, 5])")};
               }});

  c.push_back({12, "Kahler and Killing on four models with negative controls", [] {
                 std::vector<Measure> out;
                 for (const char* file : {"sphere_k4.json", "shell_quadratic.json", "annulus.json", "product.json"}) {
                   const json r = verify(load(file), {{"kahler", 1e-6}, {"killing", 1e-6}}, 100);
                   out.push_back(from(r, "kahler", std::string(file) + " kahler"));
                   out.push_back(from(r, "killing", std::string(file) + " killing"));
                 }
                 const Model S = build_shell({2, make_profile(ProfileSpec::quadratic(1, 1), {0.2, 0.9}), 1.0, 1, 0.0});
                 const auto pts = sample_points(S, 100, 12);
                 Chart bent = S.chart;
                 bent.g = [g = S.chart.g](const Vec& x) -> Mat {
                   Mat m = g(x);
                   m(0, 0) *= 1.0 + 0.05 * std::exp(-x.squaredNorm());
                   return m;
                 };
                 Chart skew = S.chart;
                 skew.phi = [phi = S.chart.phi](const Vec& x) { return phi(x) + 0.05 * std::pow(x(0), 3); };
                 double kmax = 0.0, pmax = 0.0;
                 for (const auto& x : pts) {
                   const auto k = kahler_residuals(bent, x);
                   kmax = std::max({kmax, k.hermitian, k.domega, k.nablaJ});
                   const auto p = killing_residual(skew, x);
                   pmax = std::max({pmax, p.sym_nabla_u, p.hermitian_hess});
                 }
                 out.push_back({"perturbed metric kahler", kmax, 1e-3, true});
                 out.push_back({"perturbed potential killing", pmax, 1e-3, true});
                 return out;
               }});

  c.push_back({13, "normal geodesics on the sphere and a shell", [] {
                 std::vector<Measure> out;
                 for (const char* file : {"sphere_k4.json", "shell_quadratic.json"}) {
                   const json r = verify(load(file), {{"gauss_lemma", 1e-4}, {"geodesic_dphids", 1e-5}}, 1);
                   out.push_back(from(r, "gauss_lemma", std::string(file) + " gauss lemma"));
                   out.push_back(from(r, "geodesic_dphids", std::string(file) + " dphi/ds"));
                 }
                 return out;
               }});

  c.push_back({14, "repeated CLI runs are identical apart from the timestamp", [] {
                 const fs::path dir = fs::temp_directory_path() / ("skrp_accept_" + std::to_string(::getpid()));
                 fs::create_directories(dir);
                 const std::string cfg = std::string(SKRP_CONFIG_DIR) + "/product.json";
                 double code = 0.0;
                 for (const char* name : {"a.json", "b.json"}) {
                   const std::string cmd = std::string("\"") + SKRP_BINARY + "\" verify --config \"" + cfg + "\" --seed 42 --out \"" +
                                           (dir / name).string() + "\" > /dev/null 2>&1";
                   code = std::max(code, static_cast<double>(std::system(cmd.c_str())));
                 }
                 const auto a = lines(slurp(dir / "a.json")), b = lines(slurp(dir / "b.json"));
                 double differing = a.size() == b.size() ? 0.0 : 1.0 + std::abs(static_cast<double>(a.size()) - b.size());
                 for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
                   if (i != 1 && a[i] != b[i]) ++differing;
                 const double stamp = a.size() > 1 && a[1].find("\"generated_at\"") != std::string::npos ? 0.0 : 1.0;
                 fs::remove_all(dir);
                 return std::vector<Measure>{{"exit status", code, 0},
                                             {"timestamp not on line 2", stamp, 0},
                                             {"differing lines", a.empty() ? 1.0 : differing, 0}};
               }});
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Measure> ms;
    std::string error;
    try {
      ms = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    bool pass = error.empty() && !ms.empty();
    for (const auto& m : ms) pass = pass && m.ok();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title << " (" << fmt(secs) << " s)\n";
    for (const auto& m : ms)
      std::cout << "         " << (m.ok() ? "ok  " : "BAD ") << m.label << ": " << fmt(m.value) << (m.above ? " > " : " <= ")
                << fmt(m.tol) << "\n";
    if (!error.empty()) std::cout << "         error: " << error << "\n";
    failed += !pass;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
