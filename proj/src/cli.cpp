#include "skrp/cli.hpp"

#include "skrp/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <locale>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace skrp::cli {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void only_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& item : j.items())
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
      fail("unknown key '" + item.key() + "' in " + where);
}

double num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("missing '" + std::string(key) + "' in " + where);
  if (!j[key].is_number()) fail("'" + std::string(key) + "' in " + where + " must be a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) fail("'" + std::string(key) + "' in " + where + " must be finite");
  return v;
}

double num_or(const json& j, const char* key, double def, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : def;
}

int integer(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("missing '" + std::string(key) + "' in " + where);
  if (!j[key].is_number_integer()) fail("'" + std::string(key) + "' in " + where + " must be an integer");
  return j[key].get<int>();
}

int integer_or(const json& j, const char* key, int def, const std::string& where) {
  return j.contains(key) ? integer(j, key, where) : def;
}

std::pair<double, double> number_pair(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where + " must be an array of two numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

Interval interval_of(const json& j, const std::string& where) {
  const auto [lo, hi] = number_pair(j, where);
  if (!(lo < hi)) fail(where + " must satisfy lo < hi");
  return {lo, hi};
}

std::vector<double> number_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) fail(where + " must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::optional<std::pair<double, double>> anchor_of(const json& j, const std::string& where) {
  if (!j.contains("anchor")) return std::nullopt;
  return number_pair(j["anchor"], where + ".anchor");
}

SolitonParams soliton_params(const json& p) {
  const std::string w = "profile";
  SolitonParams s;
  s.m = integer_or(p, "m", 2, w);
  s.p = num(p, "p", w);
  s.s0 = num(p, "s0", w);
  s.kappa = num(p, "kappa", w);
  s.epsilon = integer(p, "epsilon", w);
  s.c = num(p, "c", w);
  const auto an = number_pair(p.at("anchor"), w + ".anchor");
  s.phi_a = an.first;
  s.Q_a = an.second;
  s.range = interval_of(p.at("range"), w + ".range");
  return s;
}

const std::map<std::string, std::vector<std::string_view>>& family_keys() {
  static const std::map<std::string, std::vector<std::string_view>> keys = {
      {"Quadratic", {"K", "phi0"}},
      {"TypeA", {"m", "K", "alpha", "eta"}},
      {"TypeB", {"m", "K", "alpha", "eta"}},
      {"TypeC", {"m", "c", "A", "B", "C"}},
      {"Polynomial", {"coeffs"}},
      {"Custom", {"phi", "Q"}},
      {"Soliton", {"m", "p", "s0", "kappa", "epsilon", "c", "anchor", "range"}},
  };
  return keys;
}

void validate_profile(const json& p) {
  if (!p.is_object()) fail("profile must be an object");
  if (!p.contains("family") || !p["family"].is_string()) fail("profile.family must be a string");
  const std::string fam = p["family"];
  const auto it = family_keys().find(fam);
  if (it == family_keys().end()) fail("unknown profile family '" + fam + "'");
  std::set<std::string_view> allowed(it->second.begin(), it->second.end());
  allowed.insert({"family", "restrict"});
  if (fam != "Soliton") allowed.insert({"interval", "seed"});
  for (const auto& item : p.items())
    if (!allowed.count(item.key())) fail("unknown key '" + item.key() + "' in profile (" + fam + ")");
  if (fam == "Soliton") {
    for (const char* k : {"p", "s0", "kappa", "epsilon", "c", "anchor", "range"})
      if (!p.contains(k)) fail("missing '" + std::string(k) + "' in profile (Soliton)");
    return;
  }
  if (fam != "Custom" && p.contains("interval") == p.contains("seed"))
    fail("profile needs exactly one of 'interval' or 'seed'");
  if (fam == "Custom" && p.contains("seed")) fail("Custom profiles take 'interval', not 'seed'");
}

ProfileSpec profile_spec(const json& p) {
  const std::string fam = p["family"];
  const std::string w = "profile";
  ProfileSpec s;
  if (fam == "Quadratic") {
    s = ProfileSpec::quadratic(num(p, "K", w), num(p, "phi0", w));
  } else if (fam == "TypeA") {
    s = ProfileSpec::type_a(integer(p, "m", w), num(p, "K", w), num(p, "alpha", w), num(p, "eta", w));
  } else if (fam == "TypeB") {
    s = ProfileSpec::type_b(integer(p, "m", w), num(p, "K", w), num(p, "alpha", w), num(p, "eta", w));
  } else if (fam == "TypeC") {
    s = ProfileSpec::type_c(integer(p, "m", w), num(p, "c", w), num(p, "A", w), num(p, "B", w), num(p, "C", w));
  } else if (fam == "Polynomial") {
    s = ProfileSpec::polynomial(number_array(p.at("coeffs"), w + ".coeffs"));
  } else {
    s = ProfileSpec::custom(number_array(p.at("phi"), w + ".phi"), number_array(p.at("Q"), w + ".Q"));
  }
  return s;
}

const std::map<std::string, std::vector<std::string_view>>& variant_keys() {
  static const std::map<std::string, std::vector<std::string_view>> keys = {
      {"Shell", {"m", "a", "epsilon", "c", "anchor", "margin"}},
      {"Annulus", {"a", "anchor", "margin"}},
      {"Sphere", {"K", "phi0"}},
      {"ProductS2", {"K", "t"}},
      {"BallCoeffs", {"m", "a", "c", "anchor"}},
  };
  return keys;
}

bool variant_takes_profile(const std::string& v) { return v == "Shell" || v == "Annulus" || v == "BallCoeffs"; }

std::string variant_of(const json& model) {
  if (!model.is_object()) fail("model must be an object");
  if (!model.contains("variant") || !model["variant"].is_string()) fail("model.variant must be a string");
  const std::string v = model["variant"];
  const auto it = variant_keys().find(v);
  if (it == variant_keys().end()) fail("unknown model variant '" + v + "'");
  for (const auto& item : model.items())
    if (item.key() != "variant" && std::find(it->second.begin(), it->second.end(), item.key()) == it->second.end())
      fail("unknown key '" + item.key() + "' in model (" + v + ")");
  return v;
}

// ---- check catalog

using VariantSet = std::set<std::string>;
const VariantSet kAll = {"Shell", "Annulus", "Sphere", "ProductS2", "BallCoeffs"};


struct CheckDef {
  CheckInfo info;
  VariantSet variants;
};

const std::vector<CheckDef>& catalog() {
  static const std::vector<CheckDef> defs = {
      {{"curvature_K", "Gaussian curvature = K", 1e-4}, {"Sphere"}},
      {{"L_closed_form", "L = pi / sqrt(K)", 1e-8}, {"Sphere"}},
      {{"distance_L", "pole-to-pole geodesic length = L", 1e-4}, {"Sphere"}},
      {{"chi_isometry", "chi^*(g_S2 / K) = g", 1e-7}, {"Sphere"}},
      {{"skrp_blocks", "Hess phi = sigma g, Ric = lambda g on H; tau g, mu g on V", 1e-5}, {"Shell", "ProductS2"}},
      {{"epsilon_consistency", "sgn(sigma) = epsilon", 0.0}, {"Shell"}},
      {{"identity_dQ", "dQ = 2 tau dphi", 1e-5}, {"Shell", "ProductS2"}},
      {{"identity_Y", "Y = 2 tau + 2(m-1) sigma", 1e-5}, {"Shell", "ProductS2"}},
      {{"identity_sigma_c", "Q = 2 (phi - c) sigma", 1e-5}, {"Shell", "ProductS2"}},
      {{"identity_dY", "dY = -2 mu dphi", 1e-5}, {"Shell", "ProductS2"}},
      {{"identity_profile", "2 tau = dQ/dphi", 1e-5}, {"Shell", "ProductS2"}},
      {{"profile_Q", "g(grad phi, grad phi) = Q(phi)", 1e-6}, {"Shell", "Annulus", "Sphere", "ProductS2"}},
      {{"einstein", "Ric(g / phi^2) = lambda g / phi^2", 1e-4}, {"Shell", "ProductS2"}},
      {{"lambda_spread", "Einstein constant of g / phi^2 is uniform", 1e-4}, {"Shell", "ProductS2"}},
      {{"wedge", "dphi ^ dY = 0", 1e-6}, {"Shell", "ProductS2"}},
      {{"soliton", "Hess phi + p Ric = s0 g", 1e-4}, {"Shell"}},
      {{"kahler", "J^T g J = g, d omega = 0, nabla J = 0", 1e-6}, kAll},
      {{"killing", "L_{J grad phi} g = 0, Hess phi J-invariant", 1e-6}, kAll},
      {{"geodesic_dphids", "dphi/ds = sqrt(Q) along normal geodesics", 1e-5}, {"Sphere", "Shell"}},
      {{"gauss_lemma", "normal geodesics stay orthogonal to level sets", 1e-4}, {"Sphere", "Shell"}},
      {{"reparam_ode", "d log r / dphi = a / Q", 1e-6}, {"Shell", "Annulus", "BallCoeffs"}},
      {{"duality_metric", "(1/zeta)^* g_dual = g", 1e-10}, {"Annulus"}},
      {{"duality_phi", "phi_dual(1/zeta) = phi(zeta)", 1e-9}, {"Annulus"}},
      {{"ball_q0", "lim Q / r^2 = q0 > 0", 1e-6}, {"BallCoeffs"}},
      {{"ball_c2_limit", "c2(0) = q0 / a^2", 1e-6}, {"BallCoeffs"}},
      {{"ball_c1_finite", "c1(1e-3) ~ c1(1e-4)", 0.1}, {"BallCoeffs"}},
      {{"ball_positive", "limit metric positive definite", 0.0}, {"BallCoeffs"}},
      {{"ball_ratios", "|log| of one-sided derivative ratios", std::log(5.0)}, {"BallCoeffs"}},
      {{"boundary_mw1", "Q = 0 at both ends, dQ/dphi opposite and nonzero", 1e-6}, kAll},
      {{"tautological_curvature", "Omega = -2 omega_FS", 1e-6}, kAll},
      {{"tautological_real", "Im Omega = 0", 1e-8}, kAll},
  };
  return defs;
}

const CheckDef& find_check(const std::string& name) {
  for (const auto& d : catalog())
    if (d.info.name == name) return d;
  fail("unknown check '" + name + "'");
}

std::vector<std::string> default_plan(const std::string& variant) {
  if (variant == "Sphere")
    return {"curvature_K", "L_closed_form", "distance_L", "chi_isometry", "profile_Q",
            "kahler", "killing", "geodesic_dphids", "gauss_lemma"};
  if (variant == "Shell")
    return {"skrp_blocks", "epsilon_consistency", "identity_dQ", "identity_Y", "identity_sigma_c", "identity_dY",
            "identity_profile", "profile_Q", "kahler", "killing", "reparam_ode"};
  if (variant == "ProductS2")
    return {"skrp_blocks", "identity_dQ", "identity_Y", "identity_sigma_c", "identity_dY", "identity_profile",
            "profile_Q", "einstein", "lambda_spread", "wedge", "kahler", "killing"};
  if (variant == "Annulus") return {"profile_Q", "kahler", "killing", "duality_metric", "duality_phi", "reparam_ode"};
  return {"ball_q0", "ball_c2_limit", "ball_c1_finite", "ball_positive", "ball_ratios", "kahler", "killing"};
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json header(const std::string& command) {
  json r;
  r["generated_at"] = timestamp();
  r["tool"] = {{"name", "skrp"}, {"version", "1.0.0"}};
  r["command"] = command;
  return r;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// ---- built model

struct Built {
  std::string variant;
  std::optional<Profile> profile;
  Model model;
  std::optional<SphereModel> sphere;
  std::pair<double, double> anchor{0.0, 1.0};
  double a = 0.0, c = 0.0;
  double margin = 0.02;
  int m = 1;
};

Built build_all(const RunConfig& cfg) {
  Built b;
  b.variant = cfg.model["variant"];
  const json& mj = cfg.model;
  const std::string w = "model";
  try {
    if (!cfg.profile.is_null()) b.profile = build_profile(cfg.profile);
    if (b.variant == "Sphere") {
      b.sphere = build_sphere({num(mj, "K", w), num(mj, "phi0", w)});
      b.model = b.sphere->model;
      b.profile = *b.model.chart.meta.profile;
    } else if (b.variant == "ProductS2") {
      b.model = build_product({num(mj, "K", w), num(mj, "t", w)});
      b.profile = *b.model.chart.meta.profile;
    } else {
      b.a = num(mj, "a", w);
      b.anchor = anchor_of(mj, w).value_or(std::make_pair(b.profile->interval().mid(), 1.0));
      b.margin = num_or(mj, "margin", 0.02, w);
      if (b.variant == "Shell") {
        ShellSpec s;
        s.m = integer_or(mj, "m", 2, w);
        s.profile = *b.profile;
        s.a = b.a;
        s.epsilon = integer(mj, "epsilon", w);
        s.c = b.c = num(mj, "c", w);
        s.anchor = b.anchor;
        s.margin = b.margin;
        b.m = s.m;
        b.model = build_shell(s);
      } else if (b.variant == "Annulus") {
        b.model = build_annulus({*b.profile, b.a, b.anchor, b.margin});
      } else {
        b.m = integer_or(mj, "m", 1, w);
        b.c = num(mj, "c", w);
        ball_extension_coeffs(*b.profile, b.a, b.c, 0.0, b.anchor);
        b.model = build_ball({b.m, *b.profile, b.a, b.anchor});
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(std::string("model construction failed: ") + e.what());
  }
  return b;
}

json model_json(const Built& b) {
  const ChartMeta& meta = b.model.chart.meta;
  json j;
  j["variant"] = b.variant;
  j["name"] = meta.model;
  j["n"] = b.model.chart.n;
  j["m"] = meta.m;
  j["a"] = meta.a;
  j["epsilon"] = meta.epsilon;
  j["c"] = meta.c ? json(*meta.c) : json(nullptr);
  if (meta.profile) {
    j["profile"] = {{"family", to_string(meta.profile->family())},
                    {"interval", {meta.profile->interval().lo, meta.profile->interval().hi}}};
  }
  j["sample_phi"] = {b.model.sample_phi.lo, b.model.sample_phi.hi};
  return j;
}

json classification_json(const ChartMeta& meta) {
  try {
    const Classification c = classify_model(meta);
    json j;
    j["tag"] = to_string(c.tag.tag);
    j["epsilon"] = c.tag.epsilon;
    j["c"] = c.tag.c ? json(*c.tag.c) : json(nullptr);
    j["excluded"] = c.tag.excluded;
    j["note"] = c.tag.note;
    j["notes"] = c.notes;
    return j;
  } catch (const Error& e) {
    return {{"error", e.what()}};
  }
}

// ---- checks

struct Context {
  const RunConfig& cfg;
  Built b;
  VerifyOptions opt;
  std::vector<Vec> pts;
  std::optional<SkrpReport> skrp;
  std::optional<IdentityReport> ids;
  std::optional<ConformalEinsteinReport> ce;
  std::optional<NormalGeodesicReport> geo;

  const Chart& chart() const { return b.model.chart; }
  const SkrpReport& skrp_rep() {
    if (!skrp) skrp = skrp_report(chart(), pts, opt);
    return *skrp;
  }
  const IdentityReport& id_rep() {
    if (!ids) ids = identity_report(chart(), pts, opt);
    return *ids;
  }
  const ConformalEinsteinReport& ce_rep() {
    if (!ce) ce = conformal_einstein_report(chart(), pts, opt);
    return *ce;
  }
  const NormalGeodesicReport& geo_rep() {
    if (!geo) geo = b.sphere ? normal_geodesic_report(*b.sphere) : normal_geodesic_report(b.model);
    return *geo;
  }
};

double max_over(Context& ctx, const std::vector<Vec>& pts, const std::function<double(const Vec&)>& f) {
  std::vector<double> v(pts.size(), 0.0);
  parallel_for(static_cast<int>(pts.size()), ctx.opt.threads, [&](int i) { v[i] = f(pts[i]); });
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double curvature_K(Context& ctx) {
  const double K = ctx.cfg.model["K"];
  std::vector<Vec> pts = ctx.pts;
  Rng rng(ctx.cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < 10; ++i) {
    const double r = 1e-3 * std::pow(10.0, i / 9.0), th = 2 * M_PI * rng.uniform();
    Vec x(2);
    x << r * std::cos(th), r * std::sin(th);
    pts.push_back(x);
  }
  return max_over(ctx, pts, [&](const Vec& x) {
    const auto t = point_tensors(ctx.chart(), x, ctx.opt.fd, true);
    return std::abs(0.5 * t.scalar - K) / K;
  });
}

double chi_isometry(Context& ctx) {
  const SphereModel& s = *ctx.b.sphere;
  const double K = ctx.cfg.model["K"];
  const double h = 1e-3 * ctx.chart().scale;
  return max_over(ctx, ctx.pts, [&](const Vec& x) {
    Eigen::Matrix<double, 3, 2> D;
    for (int k = 0; k < 2; ++k) {
      auto at = [&](double t) {
        Vec y = x;
        y(k) += t;
        return s.chi(y);
      };
      D.col(k) = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
    }
    const Mat pull = D.transpose() * D / K;
    const Mat g = ctx.chart().g(x);
    return (pull - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff();
  });
}

double profile_Q(Context& ctx) {
  const Profile& p = *ctx.b.profile;
  double qmax = 0.0;
  std::vector<double> diff(ctx.pts.size());
  parallel_for(static_cast<int>(ctx.pts.size()), ctx.opt.threads, [&](int i) {
    const auto t = point_tensors(ctx.chart(), ctx.pts[i], ctx.opt.fd, false);
    diff[i] = std::abs(t.Q - p.Q(t.phi));
  });
  for (const auto& x : ctx.pts) qmax = std::max(qmax, std::abs(p.Q(ctx.chart().phi(x))));
  const double d = diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  return d / std::max(qmax, 1e-300);
}

std::pair<double, double> duality(Context& ctx) {
  const Built& b = ctx.b;
  const Model dual = build_annulus({*b.profile, -b.a, std::make_pair(b.anchor.first, 1.0 / b.anchor.second), b.margin});
  double gm = 0.0, pm = 0.0;
  for (const auto& x : ctx.pts) {
    const Vec z = inversion(x);
    const Mat D = inversion_jacobian(x);
    const Mat g = ctx.chart().g(x);
    const Mat pull = D.transpose() * dual.chart.g(z) * D;
    gm = std::max(gm, (pull - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
    pm = std::max(pm, std::abs(dual.chart.phi(z) - ctx.chart().phi(x)));
  }
  return {gm, pm};
}

struct BallData {
  BoundaryLimits limits;
  BallCoeffs c0, c3, c4;
};

BallData ball_data(Context& ctx) {
  const Built& b = ctx.b;
  const ReparamTable table = build_reparam(*b.profile, b.a, b.anchor);
  const Endpoint ep = b.c == b.profile->interval().lo ? Endpoint::Lower : Endpoint::Upper;
  BallData d;
  d.limits = boundary_limits(table, ep);
  d.c0 = ball_extension_coeffs(*b.profile, b.a, b.c, 0.0, b.anchor);
  d.c3 = ball_extension_coeffs(*b.profile, b.a, b.c, 1e-3, b.anchor);
  d.c4 = ball_extension_coeffs(*b.profile, b.a, b.c, 1e-4, b.anchor);
  return d;
}

double ball_positive(const Built& b, const BallCoeffs& c) {
  const int n = 2 * b.m;
  const Mat J = standard_J<double>(n);
  Vec x = Vec::Zero(n);
  x(0) = 1e-3;
  const Vec xi = b.a * x, xip = b.a * (J * x);
  const Mat g = c.c1 * (xi * xi.transpose() + xip * xip.transpose()) + c.c2 * Mat::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().cwiseAbs().maxCoeff();
  return lo > 0 ? 0.0 : -lo / std::max(hi, 1e-300) + (lo == 0 ? 1.0 : 0.0);
}

std::pair<double, double> tautological(const FDConfig& fd) {
  double curv = 0.0, imag = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const Eigen::Vector2d y(-2.0 + 4.0 * (i + 0.5) / 10.0, -2.0 + 4.0 * (j + 0.5) / 10.0);
      const auto t = tautological_connection(y, fd);
      curv = std::max(curv, std::abs(t.Omega.real() + 2.0 * t.omega_fs));
      imag = std::max(imag, t.imag_residual);
    }
  return {curv, imag};
}

double run_check(Context& ctx, const PlanItem& item, json& extra) {
  const std::string& name = item.check;
  const Built& b = ctx.b;
  if (name == "curvature_K") return curvature_K(ctx);
  if (name == "L_closed_form") {
    const double exact = M_PI / std::sqrt(static_cast<double>(ctx.cfg.model["K"]));
    extra["L"] = b.sphere->L;
    return std::abs(b.sphere->L - exact) / exact;
  }
  if (name == "distance_L") {
    const auto& g = ctx.geo_rep();
    extra["arclength"] = g.arclength;
    extra["L"] = b.sphere->L;
    return *g.distance_vs_L / b.sphere->L;
  }
  if (name == "chi_isometry") return chi_isometry(ctx);
  if (name == "skrp_blocks") {
    const auto& r = ctx.skrp_rep();
    extra["blocks"] = {{"hess_H", r.hess_H}, {"ric_H", r.ric_H}, {"hess_mixed", r.hess_mixed},
                       {"ric_mixed", r.ric_mixed}, {"hess_V", r.hess_V}, {"ric_V", r.ric_V}};
    return r.max_residual();
  }
  if (name == "epsilon_consistency") return ctx.skrp_rep().epsilon_mismatches;
  if (name == "identity_dQ") return ctx.id_rep().dQ;
  if (name == "identity_Y") return ctx.id_rep().Y;
  if (name == "identity_sigma_c") {
    if (ctx.id_rep().sigma_c_vacuous) extra["vacuous"] = true;
    return ctx.id_rep().sigma_c;
  }
  if (name == "identity_dY") return ctx.id_rep().dY;
  if (name == "identity_profile") {
    if (ctx.id_rep().profile_vacuous) extra["vacuous"] = true;
    return ctx.id_rep().profile;
  }
  if (name == "profile_Q") return profile_Q(ctx);
  if (name == "einstein") return ctx.ce_rep().einstein_res;
  if (name == "lambda_spread") {
    const auto& l = ctx.ce_rep().lambdas;
    if (!l.empty()) extra["lambda_mean"] = std::accumulate(l.begin(), l.end(), 0.0) / l.size();
    return ctx.ce_rep().lambda_spread;
  }
  if (name == "wedge") return ctx.ce_rep().wedge_res;
  if (name == "soliton") {
    const json& prof = ctx.cfg.profile;
    const double p = item.params.contains("p") ? item.params["p"].get<double>() : prof["p"].get<double>();
    const double s0 = item.params.contains("s0") ? item.params["s0"].get<double>() : prof["s0"].get<double>();
    extra["p"] = p;
    extra["s0"] = s0;
    return soliton_report(ctx.chart(), p, s0, ctx.pts, ctx.opt);
  }
  if (name == "kahler")
    return max_over(ctx, ctx.pts, [&](const Vec& x) {
      const auto r = kahler_residuals(ctx.chart(), x, ctx.opt.fd);
      return std::max({r.hermitian, r.domega, r.nablaJ});
    });
  if (name == "killing")
    return max_over(ctx, ctx.pts, [&](const Vec& x) {
      const auto r = killing_residual(ctx.chart(), x, ctx.opt.fd);
      return std::max(r.sym_nabla_u, r.hermitian_hess);
    });
  if (name == "geodesic_dphids") {
    extra["drift"] = ctx.geo_rep().drift;
    return ctx.geo_rep().dphids_res;
  }
  if (name == "gauss_lemma") return ctx.geo_rep().gauss_res;
  if (name == "reparam_ode") {
    const ReparamTable t = build_reparam(*b.profile, b.a, b.anchor);
    extra["nodes"] = t.size();
    extra["overflow"] = t.overflow;
    return table_ode_residual(t);
  }
  if (name == "duality_metric") return duality(ctx).first;
  if (name == "duality_phi") return duality(ctx).second;
  if (name.rfind("ball_", 0) == 0) {
    const BallData d = ball_data(ctx);
    if (name == "ball_q0") {
      extra["q0"] = d.limits.q0;
      extra["q0_exact"] = d.limits.q0_exact;
      if (!(d.limits.q0 > 0)) return 1.0;
      return std::abs(d.limits.q0 - d.limits.q0_exact) / d.limits.q0_exact;
    }
    if (name == "ball_c2_limit") {
      const double expect = d.limits.q0_exact / (b.a * b.a);
      extra["c2"] = d.c0.c2;
      return std::abs(d.c0.c2 - expect) / expect;
    }
    if (name == "ball_c1_finite") {
      extra["c1_1e-3"] = d.c3.c1;
      extra["c1_1e-4"] = d.c4.c1;
      return std::abs(d.c3.c1 - d.c4.c1) / std::max(std::abs(d.c4.c1), 1e-300);
    }
    if (name == "ball_positive") return ball_positive(b, d.c3);
    const auto& L = d.limits;
    extra["ratios"] = {L.ratio_dphi, L.ratio_d2phi, L.ratio_dq, L.ratio_d2q};
    double worst = 0.0;
    for (double r : {L.ratio_dphi, L.ratio_d2phi, L.ratio_dq, L.ratio_d2q})
      worst = std::max(worst, r > 0 ? std::abs(std::log(r)) : INFINITY);
    return worst;
  }
  if (name == "boundary_mw1") {
    const BoundaryReport r = check_mw1(*b.profile);
    extra["slopes"] = {r.endpoint_slopes.first, r.endpoint_slopes.second};
    if (!(r.roots_ok && r.positivity_ok && r.slopes_nonzero)) return 1.0;
    const auto [s1, s2] = r.endpoint_slopes;
    return std::abs(s1 + s2) / std::max(std::abs(s1), std::abs(s2));
  }
  if (name == "tautological_curvature") return tautological(ctx.opt.fd).first;
  if (name == "tautological_real") return tautological(ctx.opt.fd).second;
  fail("unknown check '" + name + "'");
}

json samples_json(Context& ctx) {
  json arr = json::array();
  if (ctx.skrp) {
    for (const auto& s : ctx.skrp->samples)
      arr.push_back({{"x", vec_json(s.x)}, {"phi", s.phi}, {"Q", s.Q}, {"sigma", s.sigma}, {"tau", s.tau},
                     {"lambda", s.lambda}, {"mu", s.mu}, {"Y", s.Y}});
  } else {
    for (const auto& x : ctx.pts) arr.push_back({{"x", vec_json(x)}, {"phi", ctx.chart().phi(x)}});
  }
  return arr;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> range_values(const json& j, const std::string& where) {
  if (j.is_array()) return number_array(j, where);
  only_keys(j, where, {"lo", "hi", "count"});
  const double lo = num(j, "lo", where), hi = num(j, "hi", where);
  const int count = integer(j, "count", where);
  if (count < 0) fail(where + ".count must be >= 0");
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return v;
}

std::vector<int> int_range(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    fail(where + " must be [lo, hi] integers");
  std::vector<int> v;
  for (int k = j[0].get<int>(); k <= j[1].get<int>(); ++k) v.push_back(k);
  return v;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  f << text;
}

}  // namespace

// ---- public

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> v;
    for (const auto& d : catalog()) v.push_back(d.info);
    return v;
  }();
  return infos;
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    fail("'" + path + "' does not parse: " + e.what());
  }
}

Profile build_profile(const json& p) {
  validate_profile(p);
  const std::string fam = p["family"];
  Profile prof;
  if (fam == "Soliton") {
    prof = soliton_profile(soliton_params(p)).profile;
  } else {
    const ProfileSpec spec = profile_spec(p);
    if (p.contains("seed")) {
      prof = find_admissible_interval(spec, num(p, "seed", "profile"));
    } else if (p.contains("interval")) {
      prof = make_profile(spec, interval_of(p["interval"], "profile.interval"));
    } else {
      prof = make_profile(spec, {spec.grid_phi.front(), spec.grid_phi.back()});
    }
  }
  if (p.contains("restrict")) prof = prof.restricted(interval_of(p["restrict"], "profile.restrict"));
  return prof;
}

ModelSpec build_model_spec(const json& model, const std::optional<Profile>& profile) {
  const std::string v = variant_of(model);
  const std::string w = "model";
  if (v == "Sphere") return SphereSpec{num(model, "K", w), num(model, "phi0", w)};
  if (v == "ProductS2") return ProductSpec{num(model, "K", w), num(model, "t", w)};
  if (!profile) fail("model variant " + v + " needs a profile");
  if (v == "Shell")
    return ShellSpec{integer_or(model, "m", 2, w), *profile, num(model, "a", w), integer(model, "epsilon", w),
                     num(model, "c", w), anchor_of(model, w), num_or(model, "margin", 0.02, w)};
  if (v == "Annulus")
    return AnnulusSpec{*profile, num(model, "a", w), anchor_of(model, w), num_or(model, "margin", 0.02, w)};
  return BallSpec{integer_or(model, "m", 1, w), *profile, num(model, "a", w), anchor_of(model, w)};
}

RunConfig parse_config(const json& config, const Overrides& ov) {
  RunConfig cfg;
  cfg.raw = config;
  only_keys(config, "config", {"profile", "model", "plan", "fd", "points", "seed", "output", "sweep"});
  cfg.sweep = config.value("sweep", json());
  cfg.profile = config.value("profile", json());
  if (!cfg.profile.is_null()) validate_profile(cfg.profile);
  if (config.contains("model")) {
    cfg.model = config["model"];
    const std::string v = variant_of(cfg.model);
    if (variant_takes_profile(v) && cfg.profile.is_null()) fail("model variant " + v + " needs a profile");
    if (!variant_takes_profile(v) && !cfg.profile.is_null()) fail("model variant " + v + " implies its profile");
  }
  if (config.contains("fd")) {
    const json& f = config["fd"];
    only_keys(f, "fd", {"h", "order", "richardson"});
    cfg.fd.h = num_or(f, "h", cfg.fd.h, "fd");
    if (!(cfg.fd.h > 0)) fail("fd.h must be positive");
    cfg.fd.order = integer_or(f, "order", 4, "fd");
    if (cfg.fd.order != 4) fail("fd.order: only 4 is supported");
    if (f.contains("richardson")) {
      if (!f["richardson"].is_boolean()) fail("fd.richardson must be a boolean");
      cfg.fd.richardson = f["richardson"];
    }
  }
  cfg.points = integer_or(config, "points", 100, "config");
  if (cfg.points < 1) fail("points must be >= 1");
  if (config.contains("seed")) {
    if (!config["seed"].is_number_unsigned()) fail("seed must be a non-negative integer");
    cfg.seed = config["seed"].get<std::uint64_t>();
  }
  if (ov.seed) cfg.seed = *ov.seed;
  if (config.contains("output")) {
    const json& o = config["output"];
    only_keys(o, "output", {"report", "grid"});
    if (o.contains("report")) cfg.report_path = o["report"].get<std::string>();
    if (o.contains("grid")) cfg.grid_path = o["grid"].get<std::string>();
  }
  if (config.contains("plan")) {
    if (!config["plan"].is_array()) fail("plan must be an array");
    const std::string v = cfg.model.is_null() ? "" : cfg.model["variant"].get<std::string>();
    for (const auto& it : config["plan"]) {
      only_keys(it, "plan item", {"check", "tolerance", "p", "s0"});
      if (!it.contains("check") || !it["check"].is_string()) fail("plan item needs a 'check' name");
      const CheckDef& def = find_check(it["check"]);
      if (!v.empty() && !def.variants.count(v)) fail("check '" + def.info.name + "' does not apply to " + v);
      PlanItem p;
      p.check = def.info.name;
      p.tolerance = num_or(it, "tolerance", def.info.default_tolerance, "plan item");
      if (!(p.tolerance >= 0)) fail("tolerance must be >= 0");
      for (const char* k : {"p", "s0"})
        if (it.contains(k)) {
          if (p.check != "soliton") fail(std::string("'") + k + "' applies only to the soliton check");
          p.params[k] = num(it, k, "plan item");
        }
      if (p.check == "soliton" && (!p.params.contains("p") || !p.params.contains("s0"))) {
        const bool sol = !cfg.profile.is_null() && cfg.profile["family"] == "Soliton";
        if (!sol) fail("soliton check needs 'p' and 's0' or a Soliton profile");
      }
      cfg.plan.push_back(std::move(p));
    }
  } else if (!cfg.model.is_null()) {
    for (const auto& n : default_plan(cfg.model["variant"])) cfg.plan.push_back({n, find_check(n).info.default_tolerance});
  }
  if (!(ov.tol_scale > 0)) fail("--tol-scale must be positive");
  cfg.tol_scale = ov.tol_scale;
  if (ov.threads) {
    cfg.threads = *ov.threads;
  } else if (const char* env = std::getenv("SKRP_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      fail("SKRP_THREADS must be an integer");
    }
  }
  if (cfg.threads < 1) fail("threads must be >= 1");
  return cfg;
}

json RunConfig::resolved() const {
  json r;
  if (!profile.is_null()) r["profile"] = profile;
  if (!model.is_null()) r["model"] = model;
  json plan_j = json::array();
  for (const auto& p : plan) {
    json it = {{"check", p.check}, {"tolerance", p.tolerance}};
    for (const auto& item : p.params.items()) it[item.key()] = item.value();
    plan_j.push_back(it);
  }
  r["plan"] = plan_j;
  r["fd"] = {{"h", fd.h}, {"order", fd.order}, {"richardson", fd.richardson}};
  r["points"] = points;
  r["seed"] = seed;
  r["tol_scale"] = tol_scale;
  json out = json::object();
  if (raw.contains("output")) out = raw["output"];
  r["output"] = out;
  if (!sweep.is_null()) r["sweep"] = sweep;
  return r;
}

Outcome verify(const RunConfig& cfg) {
  if (cfg.model.is_null()) fail("verify needs a model");
  Context ctx{cfg, build_all(cfg), {}, {}, {}, {}, {}, {}};
  ctx.opt.fd = cfg.fd;
  ctx.opt.threads = cfg.threads;
  ctx.pts = sample_points(ctx.b.model, cfg.points, cfg.seed);

  json report = header("verify");
  report["seed"] = cfg.seed;
  report["config"] = cfg.resolved();
  report["model"] = model_json(ctx.b);
  report["classification"] = classification_json(ctx.chart().meta);
  json checks = json::array();
  bool pass = true;
  for (const auto& item : cfg.plan) {
    const CheckDef& def = find_check(item.check);
    const double tol = item.tolerance * cfg.tol_scale;
    json extra = json::object();
    json entry;
    entry["name"] = item.check;
    try {
      const double res = run_check(ctx, item, extra);
      const bool ok = std::isfinite(res) && res <= tol;
      entry["residual"] = number_or_null(res);
      entry["tolerance"] = tol;
      entry["pass"] = ok;
      pass = pass && ok;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      entry["residual"] = nullptr;
      entry["tolerance"] = tol;
      entry["pass"] = false;
      extra["error"] = e.what();
      pass = false;
    }
    entry["identity"] = def.info.identity;
    for (const auto& x : extra.items()) entry[x.key()] = x.value();
    checks.push_back(entry);
  }
  report["checks"] = checks;
  report["samples"] = samples_json(ctx);
  report["pass"] = pass;
  return {report, pass};
}

Outcome build(const RunConfig& cfg, std::string* grid_csv) {
  if (cfg.model.is_null()) fail("build needs a model");
  const Built b = build_all(cfg);
  const Chart& chart = b.model.chart;
  const auto pts = sample_points(b.model, cfg.points, cfg.seed);
  std::vector<std::string> cols;
  for (int i = 0; i < chart.n; ++i) cols.push_back("x" + std::to_string(i));
  cols.push_back("phi");
  cols.push_back("Q");
  for (int i = 0; i < chart.n; ++i)
    for (int j = i; j < chart.n; ++j) cols.push_back("g" + std::to_string(i) + std::to_string(j));
  std::ostringstream csv;
  for (std::size_t k = 0; k < cols.size(); ++k) csv << (k ? "," : "") << csv_field(cols[k]);
  csv << "\r\n";
  for (const auto& x : pts) {
    const double phi = chart.phi(x);
    const Mat g = chart.g(x);
    std::vector<double> row(x.data(), x.data() + x.size());
    row.push_back(phi);
    row.push_back(b.profile ? b.profile->Q(phi) : NAN);
    for (int i = 0; i < chart.n; ++i)
      for (int j = i; j < chart.n; ++j) row.push_back(g(i, j));
    for (std::size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << csv_number(row[k]);
    csv << "\r\n";
  }
  if (grid_csv) *grid_csv = csv.str();

  json report = header("build");
  report["seed"] = cfg.seed;
  report["config"] = cfg.resolved();
  report["model"] = model_json(b);
  report["chart"] = {{"scale", chart.scale}, {"J", json::array()}};
  for (int i = 0; i < chart.n; ++i) report["chart"]["J"].push_back(vec_json(chart.J.row(i).transpose()));
  json grid;
  grid["path"] = cfg.grid_path ? json(*cfg.grid_path) : json(nullptr);
  grid["rows"] = pts.size();
  grid["columns"] = cols;
  grid["column_notes"] = {{"x*", "chart coordinates"},
                          {"phi", "Killing potential"},
                          {"Q", "profile Q(phi)"},
                          {"gij", "metric components, i <= j"}};
  report["grid"] = grid;
  report["pass"] = true;
  return {report, true};
}

Outcome classify(const RunConfig& cfg) {
  if (cfg.model.is_null()) fail("classify needs a model");
  const Built b = build_all(cfg);
  json report = header("classify");
  report["config"] = cfg.resolved();
  report["model"] = model_json(b);
  report["classification"] = classification_json(b.model.chart.meta);
  if (b.profile) {
    const BoundaryReport br = check_mw1(*b.profile);
    report["boundary"] = {{"endpoint_values", {br.endpoint_values.first, br.endpoint_values.second}},
                          {"endpoint_slopes", {br.endpoint_slopes.first, br.endpoint_slopes.second}},
                          {"roots_ok", br.roots_ok},
                          {"positivity_ok", br.positivity_ok},
                          {"slopes_nonzero", br.slopes_nonzero},
                          {"slopes_opposite", br.slopes_opposite},
                          {"pass", br.pass()}};
    const ProfileSpec& spec = b.profile->spec();
    if (spec.family == Family::TypeC) {
      const SyReport sy = check_sy(spec.m, *b.profile);
      report["sy"] = {{"t_interval", {sy.t_interval.lo, sy.t_interval.hi}},
                      {"analytic", sy.a_analytic},
                      {"roots", sy.b_roots},
                      {"positive", sy.c_positive},
                      {"slopes_nonzero", sy.d_slopes_nonzero},
                      {"slopes_opposite", sy.e_slopes_opposite},
                      {"one_not_in_I", sy.one_not_in_I},
                      {"rationality_vacuous", sy.rationality_vacuous},
                      {"rationality_ok", sy.rationality_ok}};
    }
    if (spec.family == Family::TypeA || spec.family == Family::TypeB) {
      const Bc2Report bc = verify_bc2(spec);
      report["bc2"] = {{"interval_found", bc.interval_found},
                       {"interval", {bc.interval.lo, bc.interval.hi}},
                       {"symmetric", bc.symmetric},
                       {"pass", bc.pass},
                       {"note", bc.note}};
    }
  }
  report["pass"] = true;
  return {report, true};
}

std::string sweep_csv(const RunConfig& cfg) {
  const json& s = cfg.sweep;
  if (s.is_null()) fail("sweep needs a 'sweep' section");
  if (!s.is_object() || !s.contains("target") || !s["target"].is_string()) fail("sweep.target must be a string");
  const std::string target = s["target"];
  std::ostringstream csv;
  auto row = [&csv](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) csv << (k ? "," : "") << cells[k];
    csv << "\r\n";
  };
  if (target == "f_bc1") {
    only_keys(s, "sweep", {"target", "k", "beta"});
    const auto ks = int_range(s.at("k"), "sweep.k");
    const auto betas = range_values(s.at("beta"), "sweep.beta");
    for (int k : ks)
      if (k < 2) fail("sweep.k must be >= 2");
    row({"k", "beta", "f", "sign", "factor_residual"});
    for (int k : ks)
      for (double beta : betas) {
        const FBc1 f = eval_f_bc1(k, beta);
        const double fs = eval_f_bc1_shifted(k, beta);
        const int sign = fs > 0 ? 1 : (fs < 0 ? -1 : 0);
        row({std::to_string(k), csv_number(beta), csv_number(f.f), std::to_string(sign),
             csv_number(f.factor_residual)});
      }
  } else if (target == "type_a" || target == "type_b") {
    only_keys(s, "sweep", {"target", "m", "K", "alpha", "eta"});
    const auto ms = int_range(s.at("m"), "sweep.m");
    for (int m : ms)
      if (m < 2) fail("sweep.m must be >= 2");
    const auto Ks = range_values(s.at("K"), "sweep.K");
    const auto alphas = range_values(s.at("alpha"), "sweep.alpha");
    const auto etas = range_values(s.at("eta"), "sweep.eta");
    row({"m", "K", "alpha", "eta", "interval_found", "phi_min", "phi_max", "mw1_pass", "symmetric"});
    for (int m : ms)
      for (double K : Ks)
        for (double al : alphas)
          for (double eta : etas) {
            const ProfileSpec spec =
                target == "type_a" ? ProfileSpec::type_a(m, K, al, eta) : ProfileSpec::type_b(m, K, al, eta);
            const Bc2Report r = verify_bc2(spec);
            row({std::to_string(m), csv_number(K), csv_number(al), csv_number(eta),
                 r.interval_found ? "1" : "0", r.interval_found ? csv_number(r.interval.lo) : "",
                 r.interval_found ? csv_number(r.interval.hi) : "", r.mw1.pass() ? "1" : "0",
                 r.symmetric ? "1" : "0"});
          }
  } else {
    fail("unknown sweep target '" + target + "'");
  }
  return csv.str();
}

std::string render_summary(const json& report) {
  std::ostringstream out;
  out << "command: " << report.value("command", "?");
  if (report.contains("model") && report["model"].contains("name"))
    out << "  model: " << report["model"]["name"].get<std::string>();
  if (report.contains("classification") && report["classification"].contains("tag"))
    out << "  type: " << report["classification"]["tag"].get<std::string>();
  out << "\n";
  if (report.contains("checks")) {
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %12s %12s  %s\n", "check", "residual", "tolerance", "result");
    out << line;
    for (const auto& c : report["checks"]) {
      char res[32] = "error";
      if (c["residual"].is_number()) std::snprintf(res, sizeof res, "%12.3e", c["residual"].get<double>());
      std::snprintf(line, sizeof line, "%-24s %12s %12.3e  %s\n", c["name"].get<std::string>().c_str(), res,
                    c["tolerance"].get<double>(), c["pass"].get<bool>() ? "pass" : "FAIL");
      out << line;
    }
  }
  if (report.contains("pass")) out << (report["pass"].get<bool>() ? "overall: pass\n" : "overall: FAIL\n");
  return out.str();
}

std::string dump_report(json report) {
  json ordered;
  ordered["generated_at"] = report.value("generated_at", timestamp());
  for (const auto& item : report.items())
    if (item.key() != "generated_at") ordered[item.key()] = item.value();
  return ordered.dump(2) + "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model SKRP metrics: build, verify, classify, sweep, report"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides ov;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<int> threads;
  double tol_scale = 1.0;
  const std::pair<const char*, const char*> subs[] = {
      {"build", "write the chart grid as CSV plus a JSON report"},
      {"verify", "run the check plan and write a JSON report"},
      {"classify", "report the type tag and boundary conditions"},
      {"sweep", "scan a parameter family to CSV"},
      {"report", "summarize an existing JSON report"}};
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, name == std::string("report") ? "report file" : "config file")
        ->required();
    sub->add_option("--seed", seed, "override the sampling seed");
    sub->add_option("--out", out_path, "output path");
    sub->add_option("--tol-scale", tol_scale, "multiply every tolerance");
    sub->add_option("--threads", threads, "worker threads (fallback: SKRP_THREADS)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kPass : kConfigError;
  }
  ov.seed = seed;
  ov.out = out_path;
  ov.tol_scale = tol_scale;
  ov.threads = threads;
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    if (cmd == "report") {
      const json rep = load_json(config_path);
      const std::string text = render_summary(rep);
      if (out_path)
        write_file(*out_path, text);
      else
        out << text;
      return rep.value("pass", false) ? kPass : kNumericFail;
    }
    const RunConfig cfg = parse_config(load_json(config_path), ov);
    if (cmd == "sweep") {
      const std::string csv = sweep_csv(cfg);
      const auto path = out_path ? out_path : cfg.grid_path;
      if (path)
        write_file(*path, csv);
      else
        out << csv;
      return kPass;
    }
    Outcome o;
    std::string grid;
    if (cmd == "verify")
      o = verify(cfg);
    else if (cmd == "build") {
      RunConfig bc = cfg;
      const auto rp = out_path ? out_path : cfg.report_path;
      if (!bc.grid_path && rp) bc.grid_path = rp->substr(0, rp->rfind('.')) + ".csv";
      o = build(bc, &grid);
      if (bc.grid_path) write_file(*bc.grid_path, grid);
    }
    else
      o = classify(cfg);
    const auto path = out_path ? out_path : cfg.report_path;
    const std::string text = dump_report(o.report);
    if (path) {
      write_file(*path, text);
      out << render_summary(o.report);
    } else {
      out << text;
    }
    return o.pass ? kPass : kNumericFail;
  } catch (const Error& e) {
    err << "skrp: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kConfigError : kNumericFail;
  } catch (const json::exception& e) {
    err << "skrp: ConfigError: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace skrp::cli
