#pragma once

#include "skrp/error.hpp"
#include "skrp/profiles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace skrp {

struct ChartMeta {
  std::string model;
  int m = 1;
  double a = 0.0;
  int epsilon = 0;
  std::optional<double> c;
  std::optional<Profile> profile;
};

template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar = double>
struct ChartMetric {
  using Vec = VecX<Scalar>;
  using Mat = MatX<Scalar>;

  int n = 0;
  std::function<bool(const Vec&)> domain;
  std::function<Mat(const Vec&)> g;
  Mat J;
  std::function<Scalar(const Vec&)> phi;
  ChartMeta meta;
  Scalar scale = 1;  // coordinate scale for FD steps
  std::function<Scalar(const Vec&)> local_scale;  // overrides scale when set

  Scalar scale_at(const Vec& x) const { return local_scale ? local_scale(x) : scale; }
};

using Chart = ChartMetric<double>;

struct FDConfig {
  double h = 1e-3;  // relative to chart.scale
  int order = 4;
  bool richardson = true;
};

// T(i,j,k) and T(i,j,k,l) over a flat buffer
template <class Scalar>
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), d_(static_cast<std::size_t>(n) * n * n, Scalar(0)) {}
  int dim() const { return n_; }
  Scalar& operator()(int i, int j, int k) { return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  Scalar operator()(int i, int j, int k) const { return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k]; }
  Scalar max_abs() const {
    Scalar m(0);
    for (Scalar v : d_) m = std::max<Scalar>(m, std::abs(v));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<Scalar> d_;
};

template <class Scalar>
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), d_(static_cast<std::size_t>(n) * n * n * n, Scalar(0)) {}
  int dim() const { return n_; }
  Scalar& operator()(int i, int j, int k, int l) {
    return d_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }
  Scalar operator()(int i, int j, int k, int l) const {
    return d_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
  }
  Scalar max_abs() const {
    Scalar m(0);
    for (Scalar v : d_) m = std::max<Scalar>(m, std::abs(v));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<Scalar> d_;
};

namespace detail {

// f, first partials and (optionally) all second partials of a field sampled by finite differences
template <class T>
struct Jet {
  T f;
  std::vector<T> d1;  // d1[i]
  std::vector<T> d2;  // d2[i*n+j]
};

template <class Scalar, class T, class F>
Jet<T> fd_jet_step(const F& f, const VecX<Scalar>& x, Scalar h, int n, bool second, const T& f0) {
  Jet<T> out;
  out.f = f0;
  out.d1.resize(n);
  if (second) out.d2.resize(static_cast<std::size_t>(n) * n);
  auto at = [&](int i, Scalar si, int j, Scalar sj) -> T {
    VecX<Scalar> y = x;
    y(i) += si * h;
    if (j >= 0) y(j) += sj * h;
    return f(y);
  };
  for (int i = 0; i < n; ++i) {
    const T p1 = at(i, 1, -1, 0), m1 = at(i, -1, -1, 0), p2 = at(i, 2, -1, 0), m2 = at(i, -2, -1, 0);
    out.d1[i] = ((m2 - p2) + Scalar(8) * (p1 - m1)) / (Scalar(12) * h);
    if (second)
      out.d2[i * n + i] = (Scalar(16) * (p1 + m1) - (p2 + m2) - Scalar(30) * f0) / (Scalar(12) * h * h);
  }
  if (second) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const T a1 = at(i, 1, j, -2) + at(i, 2, j, -1) + at(i, -2, j, 1) + at(i, -1, j, 2);
        const T a2 = at(i, -1, j, -2) + at(i, -2, j, -1) + at(i, 1, j, 2) + at(i, 2, j, 1);
        const T a3 = at(i, 2, j, -2) + at(i, -2, j, 2) - at(i, -2, j, -2) - at(i, 2, j, 2);
        const T a4 = at(i, -1, j, -1) + at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1);
        const T v = (Scalar(8) * (a1 - a2) - a3 + Scalar(64) * a4) / (Scalar(144) * h * h);
        out.d2[i * n + j] = v;
        out.d2[j * n + i] = v;
      }
  }
  return out;
}

template <class Scalar>
void check_stencil(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x, Scalar reach) {
  if (!chart.domain) return;
  for (int i = 0; i < chart.n; ++i)
    for (Scalar s : {Scalar(-1), Scalar(1)}) {
      VecX<Scalar> y = x;
      y(i) += s * reach;
      if (!chart.domain(y)) throw Error(ErrorCode::StencilOutOfDomain, "stencil leaves the chart domain");
      for (int j = i + 1; j < chart.n; ++j)
        for (Scalar t : {Scalar(-1), Scalar(1)}) {
          VecX<Scalar> z = y;
          z(j) += t * reach;
          if (!chart.domain(z)) throw Error(ErrorCode::StencilOutOfDomain, "stencil leaves the chart domain");
        }
    }
}

template <class Scalar, class T, class F>
Jet<T> fd_jet(const ChartMetric<Scalar>& chart, const F& f, const VecX<Scalar>& x, const FDConfig& fd, bool second) {
  const Scalar h = Scalar(fd.h) * chart.scale_at(x);
  const int n = chart.n;
  check_stencil(chart, x, (fd.richardson ? Scalar(4) : Scalar(2)) * h);
  const T f0 = f(x);
  Jet<T> a = fd_jet_step<Scalar, T>(f, x, h, n, second, f0);
  if (!fd.richardson) return a;
  const Jet<T> b = fd_jet_step<Scalar, T>(f, x, Scalar(2) * h, n, second, f0);
  for (std::size_t i = 0; i < a.d1.size(); ++i) a.d1[i] = (Scalar(16) * a.d1[i] - b.d1[i]) / Scalar(15);
  for (std::size_t i = 0; i < a.d2.size(); ++i) a.d2[i] = (Scalar(16) * a.d2[i] - b.d2[i]) / Scalar(15);
  return a;
}

template <class Scalar>
MatX<Scalar> inverse_metric(const MatX<Scalar>& g) {
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> es(g, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > Scalar(0))) throw Error(ErrorCode::SingularMetric, "metric is not positive definite");
  return g.ldlt().solve(MatX<Scalar>::Identity(g.rows(), g.cols()));
}

template <class Scalar>
Tensor3<Scalar> christoffel(const MatX<Scalar>& ginv, const std::vector<MatX<Scalar>>& dg) {
  const int n = static_cast<int>(ginv.rows());
  Tensor3<Scalar> G(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Scalar s(0);
        for (int l = 0; l < n; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        G(k, i, j) = s / Scalar(2);
        G(k, j, i) = s / Scalar(2);
      }
  return G;
}

template <class Scalar>
Scalar max_abs(const MatX<Scalar>& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : Scalar(0);
}

}  // namespace detail

// Gram-Schmidt on the coordinate basis in index order; columns are g-orthonormal
template <class Scalar>
MatX<Scalar> orthonormal_frame(const MatX<Scalar>& g) {
  const int n = static_cast<int>(g.rows());
  MatX<Scalar> E = MatX<Scalar>::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) E.col(j) -= (E.col(k).dot(g * E.col(j))) * E.col(k);
    E.col(j) /= std::sqrt(E.col(j).dot(g * E.col(j)));
  }
  return E;
}

template <class Scalar>
Tensor3<Scalar> connection_coefficients(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x,
                                        const FDConfig& fd = {}) {
  const auto jet = detail::fd_jet<Scalar, MatX<Scalar>>(chart, chart.g, x, fd, false);
  return detail::christoffel<Scalar>(detail::inverse_metric<Scalar>(jet.f), jet.d1);
}

template <class Scalar>
struct PointTensors {
  int n = 0;
  MatX<Scalar> g, ginv;
  std::vector<MatX<Scalar>> dg;
  Tensor3<Scalar> Gamma;     // Gamma(k,i,j) = Γ^k_ij
  Tensor4<Scalar> Riemann;   // Riemann(i,j,k,l) = dx^l(R(∂i,∂j)∂k)
  MatX<Scalar> Ricci;        // frame contraction
  MatX<Scalar> RicciDirect;  // g^{pq} R(a,p,b,q) lowered
  Scalar scalar = 0;
  VecX<Scalar> dphi, grad;
  MatX<Scalar> Hess;
  Scalar Y = 0, Q = 0, phi = 0;
};

template <class Scalar>
struct Curvature {
  Tensor4<Scalar> Riemann;
  MatX<Scalar> Ricci, RicciDirect;
  Scalar scalar = 0;
};

template <class Scalar>
struct PotentialDerivatives {
  VecX<Scalar> dphi, grad;
  MatX<Scalar> Hess;
  Scalar Y = 0, Q = 0, phi = 0;
};

template <class Scalar>
PointTensors<Scalar> point_tensors(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x, const FDConfig& fd = {},
                                   bool with_curvature = true) {
  using Mat = MatX<Scalar>;
  const int n = chart.n;
  PointTensors<Scalar> t;
  t.n = n;
  const auto gj = detail::fd_jet<Scalar, Mat>(chart, chart.g, x, fd, with_curvature);
  t.g = gj.f;
  t.ginv = detail::inverse_metric<Scalar>(t.g);
  t.dg = gj.d1;
  t.Gamma = detail::christoffel<Scalar>(t.ginv, t.dg);

  if (chart.phi) {
    const auto pj = detail::fd_jet<Scalar, Scalar>(chart, chart.phi, x, fd, true);
    t.phi = pj.f;
    t.dphi = VecX<Scalar>(n);
    for (int i = 0; i < n; ++i) t.dphi(i) = pj.d1[i];
    t.grad = t.ginv * t.dphi;
    t.Hess = Mat(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Scalar s = pj.d2[i * n + j];
        for (int k = 0; k < n; ++k) s -= t.Gamma(k, i, j) * t.dphi(k);
        t.Hess(i, j) = s;
      }
    t.Hess = (t.Hess + t.Hess.transpose()) / Scalar(2);
    t.Y = (t.ginv.cwiseProduct(t.Hess)).sum();
    t.Q = t.dphi.dot(t.grad);
  }
  if (!with_curvature) return t;

  // ∂_m Γ^k_ij from ∂g^{-1} and ∂∂g
  std::vector<Mat> dginv(n);
  for (int m = 0; m < n; ++m) dginv[m] = -t.ginv * t.dg[m] * t.ginv;
  auto ddg = [&](int a, int b) -> const Mat& { return gj.d2[a * n + b]; };
  Tensor4<Scalar> dGamma(n);  // dGamma(m,k,i,j) = ∂_m Γ^k_ij
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Scalar s(0);
          for (int l = 0; l < n; ++l) {
            const Scalar first = t.dg[i](j, l) + t.dg[j](i, l) - t.dg[l](i, j);
            const Scalar second = ddg(m, i)(j, l) + ddg(m, j)(i, l) - ddg(m, l)(i, j);
            s += dginv[m](k, l) * first + t.ginv(k, l) * second;
          }
          dGamma(m, k, i, j) = s / Scalar(2);
          dGamma(m, k, j, i) = s / Scalar(2);
        }

  t.Riemann = Tensor4<Scalar>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Scalar s = dGamma(j, l, i, k) - dGamma(i, l, j, k);
          for (int m = 0; m < n; ++m) s += t.Gamma(m, i, k) * t.Gamma(l, j, m) - t.Gamma(m, j, k) * t.Gamma(l, i, m);
          t.Riemann(i, j, k, l) = s;
        }
    }
  Tensor4<Scalar> low(n);  // low(i,j,k,l) = g(R(∂i,∂j)∂k, ∂l)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Scalar s(0);
          for (int p = 0; p < n; ++p) s += t.g(l, p) * t.Riemann(i, j, k, p);
          low(i, j, k, l) = s;
        }

  const Mat E = orthonormal_frame<Scalar>(t.g);
  t.Ricci = Mat::Zero(n, n);
  t.RicciDirect = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Scalar sf(0), sd(0);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          Scalar ee(0);
          for (int j = 0; j < n; ++j) ee += E(p, j) * E(q, j);
          sf += ee * low(a, p, b, q);
          sd += t.ginv(p, q) * low(a, p, b, q);
        }
      t.Ricci(a, b) = sf;
      t.RicciDirect(a, b) = sd;
    }
  t.scalar = (t.ginv.cwiseProduct(t.Ricci)).sum();
  return t;
}

template <class Scalar>
Curvature<Scalar> curvature(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x, const FDConfig& fd = {}) {
  ChartMetric<Scalar> c = chart;
  c.phi = nullptr;
  auto t = point_tensors(c, x, fd, true);
  return {std::move(t.Riemann), std::move(t.Ricci), std::move(t.RicciDirect), t.scalar};
}

template <class Scalar>
PotentialDerivatives<Scalar> potential_derivatives(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x,
                                                   const FDConfig& fd = {}) {
  auto t = point_tensors(chart, x, fd, false);
  return {std::move(t.dphi), std::move(t.grad), std::move(t.Hess), t.Y, t.Q, t.phi};
}

template <class Scalar>
struct GeodesicPath {
  std::vector<Scalar> s;
  std::vector<VecX<Scalar>> x, xdot;
  bool left_domain = false;
  Scalar drift = 0;  // max | |xdot|_g - 1 |
};

template <class Scalar>
GeodesicPath<Scalar> geodesic(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x0, const VecX<Scalar>& w0,
                              Scalar s_max, const FDConfig& fd = {}, int steps = 4096) {
  using Vec = VecX<Scalar>;
  const int n = chart.n;
  GeodesicPath<Scalar> path;
  auto speed = [&](const Vec& x, const Vec& v) { return std::sqrt(v.dot(chart.g(x) * v)); };
  Vec x = x0, v = w0 / speed(x0, w0);
  auto accel = [&](const Vec& y, const Vec& u) {
    const Tensor3<Scalar> G = connection_coefficients(chart, y, fd);
    Vec acc = Vec::Zero(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc(k) -= G(k, i, j) * u(i) * u(j);
    return acc;
  };
  const Scalar ds = s_max / Scalar(steps);
  auto record = [&](Scalar s) {
    path.s.push_back(s);
    path.x.push_back(x);
    path.xdot.push_back(v);
    path.drift = std::max<Scalar>(path.drift, std::abs(speed(x, v) - Scalar(1)));
  };
  record(0);
  try {
    for (int step = 1; step <= steps; ++step) {
      const Vec k1x = v, k1v = accel(x, v);
      const Vec k2x = v + ds / 2 * k1v, k2v = accel(x + ds / 2 * k1x, k2x);
      const Vec k3x = v + ds / 2 * k2v, k3v = accel(x + ds / 2 * k2x, k3x);
      const Vec k4x = v + ds * k3v, k4v = accel(x + ds * k3x, k4x);
      x += ds / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
      v += ds / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      if (chart.domain && !chart.domain(x)) {
        path.left_domain = true;
        break;
      }
      record(ds * step);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::StencilOutOfDomain) throw;
    path.left_domain = true;
  }
  return path;
}

template <class Scalar>
struct KahlerResiduals {
  Scalar hermitian = 0;  // relative to max|g|
  Scalar domega = 0;     // relative to max|∂g|
  Scalar nablaJ = 0;     // relative to max|Γ|
};

template <class Scalar>
KahlerResiduals<Scalar> kahler_residuals(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x,
                                         const FDConfig& fd = {}) {
  using Mat = MatX<Scalar>;
  const int n = chart.n;
  const auto jet = detail::fd_jet<Scalar, Mat>(chart, chart.g, x, fd, false);
  const Mat& g = jet.f;
  const Mat& J = chart.J;
  KahlerResiduals<Scalar> r;
  const Scalar gs = detail::max_abs<Scalar>(g);
  r.hermitian = detail::max_abs<Scalar>(Mat(J.transpose() * g * J - g)) / gs;

  std::vector<Mat> domega(n);
  Scalar dgs(0);
  for (int k = 0; k < n; ++k) {
    domega[k] = J.transpose() * jet.d1[k];
    dgs = std::max(dgs, detail::max_abs<Scalar>(jet.d1[k]));
  }
  dgs = std::max(dgs, gs / chart.scale_at(x) * Scalar(1e-3));
  Scalar dw(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // ω antisymmetrized before differentiating
        auto om = [&](int p, int a, int b) { return (domega[p](a, b) - domega[p](b, a)) / Scalar(2); };
        dw = std::max<Scalar>(dw, std::abs(om(i, j, k) + om(j, k, i) + om(k, i, j)));
      }
  r.domega = dw / dgs;

  const Tensor3<Scalar> G = detail::christoffel<Scalar>(detail::inverse_metric<Scalar>(g), jet.d1);
  Scalar nj(0);
  for (int k = 0; k < n; ++k) {
    Mat Gk(n, n);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) Gk(i, l) = G(i, k, l);
    nj = std::max(nj, detail::max_abs<Scalar>(Mat(Gk * J - J * Gk)));
  }
  r.nablaJ = nj / std::max(G.max_abs(), Scalar(1) / chart.scale_at(x) * Scalar(1e-3));
  return r;
}

template <class Scalar>
struct KillingResiduals {
  Scalar sym_nabla_u = 0;     // |L_u g| relative to its largest term
  Scalar hermitian_hess = 0;  // relative to max|Hess|
};

template <class Scalar>
KillingResiduals<Scalar> killing_residual(const ChartMetric<Scalar>& chart, const VecX<Scalar>& x,
                                          const FDConfig& fd = {}) {
  using Mat = MatX<Scalar>;
  using Vec = VecX<Scalar>;
  const int n = chart.n;
  const auto gj = detail::fd_jet<Scalar, Mat>(chart, chart.g, x, fd, false);
  const auto pj = detail::fd_jet<Scalar, Scalar>(chart, chart.phi, x, fd, true);
  const Mat ginv = detail::inverse_metric<Scalar>(gj.f);
  Vec dphi(n);
  Mat ddphi(n, n);
  for (int i = 0; i < n; ++i) {
    dphi(i) = pj.d1[i];
    for (int j = 0; j < n; ++j) ddphi(i, j) = pj.d2[i * n + j];
  }
  const Mat& J = chart.J;
  const Vec u = J * ginv * dphi;
  Mat du(n, n);  // du(k,i) = ∂_i u^k
  for (int i = 0; i < n; ++i) du.col(i) = J * (-ginv * gj.d1[i] * ginv * dphi + ginv * ddphi.col(i));
  Mat t1 = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) t1 += u(k) * gj.d1[k];
  const Mat t2 = gj.f * du;
  const Mat lie = t1 + t2 + t2.transpose();
  KillingResiduals<Scalar> r;
  const Scalar scale = std::max(detail::max_abs<Scalar>(t1), detail::max_abs<Scalar>(t2));
  r.sym_nabla_u = scale > 0 ? detail::max_abs<Scalar>(lie) / scale : Scalar(0);

  const Tensor3<Scalar> G = detail::christoffel<Scalar>(ginv, gj.d1);
  Mat H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar s = ddphi(i, j);
      for (int k = 0; k < n; ++k) s -= G(k, i, j) * dphi(k);
      H(i, j) = s;
    }
  const Scalar hs = detail::max_abs<Scalar>(H);
  r.hermitian_hess = hs > 0 ? detail::max_abs<Scalar>(Mat(J.transpose() * H + H * J)) / hs : Scalar(0);
  return r;
}

// g / phi^2 with the same J and phi
template <class Scalar>
ChartMetric<Scalar> conformal_chart(const ChartMetric<Scalar>& chart) {
  ChartMetric<Scalar> c = chart;
  auto g = chart.g;
  auto phi = chart.phi;
  c.g = [g, phi](const VecX<Scalar>& x) -> MatX<Scalar> {
    const Scalar p = phi(x);
    return g(x) / (p * p);
  };
  c.meta.model = chart.meta.model + "/conformal";
  return c;
}

template <class Scalar>
MatX<Scalar> standard_J(int n) {
  MatX<Scalar> J = MatX<Scalar>::Zero(n, n);
  for (int k = 0; k + 1 < n; k += 2) {
    J(k + 1, k) = 1;
    J(k, k + 1) = -1;
  }
  return J;
}

template <class Scalar = double>
ChartMetric<Scalar> euclidean_chart(int n, std::function<Scalar(const VecX<Scalar>&)> phi = nullptr) {
  ChartMetric<Scalar> c;
  c.n = n;
  c.domain = [](const VecX<Scalar>&) { return true; };
  c.g = [n](const VecX<Scalar>&) -> MatX<Scalar> { return MatX<Scalar>::Identity(n, n); };
  c.J = standard_J<Scalar>(n);
  c.phi = std::move(phi);
  c.meta.model = "euclidean";
  c.meta.m = n / 2;
  return c;
}

}  // namespace skrp
