#ifndef QLM_SURFACE_HPP
#define QLM_SURFACE_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qlm/errors.hpp"
#include "qlm/grid.hpp"
#include "qlm/spacetime.hpp"

namespace qlm {

// High-order centered finite differences used to differentiate pointwise
// frame constructions (which are smooth but have no global closed form).
namespace fd {

template <class F>
auto deriv1(F&& f, double h) {
  using T = std::decay_t<decltype(f(0))>;
  T r = (4.0 / 5.0) * (f(1) - f(-1));
  r += (-1.0 / 5.0) * (f(2) - f(-2));
  r += (4.0 / 105.0) * (f(3) - f(-3));
  r += (-1.0 / 280.0) * (f(4) - f(-4));
  return T(r / h);
}

template <class F>
auto deriv2(F&& f, double h) {
  using T = std::decay_t<decltype(f(0))>;
  T r = (-205.0 / 72.0) * f(0);
  r += (8.0 / 5.0) * (f(1) + f(-1));
  r += (-1.0 / 5.0) * (f(2) + f(-2));
  r += (8.0 / 315.0) * (f(3) + f(-3));
  r += (-1.0 / 560.0) * (f(4) + f(-4));
  return T(r / (h * h));
}

/// Step size for theta differencing, shrunk near the coordinate poles so the
/// 4-wide stencil stays inside (0, pi).
inline double theta_step(double th) {
  return std::min({2.5e-3, th / 5.0, (kPi - th) / 5.0});
}

}  // namespace fd

/// Natural cubic spline through (x_i, y_i); supplies value and two
/// derivatives for profile surfaces imported from sampled data.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const int n = (int)x_.size();
    if (n < 3 || y_.size() != x_.size())
      throw ParameterError("surface-geometry", "spline needs >= 3 samples");
    for (int i = 1; i < n; ++i)
      if (x_[i] <= x_[i - 1])
        throw ParameterError("surface-geometry", "spline abscissae must increase");
    // tridiagonal solve for second derivatives, natural end conditions
    std::vector<double> u(n, 0.0);
    m_.assign(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
      const double p = sig * m_[i - 1] + 2.0;
      m_[i] = (sig - 1.0) / p;
      u[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) -
             (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
      u[i] = (6.0 * u[i] / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (int i = n - 2; i >= 1; --i) m_[i] = m_[i] * m_[i + 1] + u[i];
    m_[0] = m_[n - 1] = 0.0;
  }

  std::array<double, 3> eval(double x) const {
    const int n = (int)x_.size();
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (x_[mid] > x ? hi : lo) = mid;
    }
    const double h = x_[hi] - x_[lo];
    const double a = (x_[hi] - x) / h, b = (x - x_[lo]) / h;
    const double v = a * y_[lo] + b * y_[hi] +
                     ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
    const double d = (y_[hi] - y_[lo]) / h +
                     ((3.0 * b * b - 1.0) * m_[hi] - (3.0 * a * a - 1.0) * m_[lo]) * h / 6.0;
    const double dd = a * m_[lo] + b * m_[hi];
    return {v, d, dd};
  }

 private:
  std::vector<double> x_, y_;
  std::vector<double> m_;
};

/// Parametric immersion of a 2-sphere-topology surface with closed-form
/// first and second parameter derivatives.
struct SurfaceMap {
  std::string name;
  std::map<std::string, double> params;
  bool axisymmetric = true;
  std::function<Vec4(double, double)> pos;                   // X(theta, phi)
  std::function<std::array<Vec4, 2>(double, double)> d1;     // dX/dth, dX/dph
  std::function<std::array<Vec4, 3>(double, double)> d2;     // thth, thph, phph
};

namespace detail {

// Axisymmetric profile (t(theta), R(theta)); each function returns value and
// first/second theta derivatives.
using ThetaProfile = std::function<std::array<double, 3>(double)>;

inline SurfaceMap make_profile_map(const std::string& chart, ThetaProfile tf,
                                   ThetaProfile rf) {
  SurfaceMap m;
  m.axisymmetric = true;
  if (chart == "spherical") {
    m.pos = [tf, rf](double th, double ph) {
      return Vec4(tf(th)[0], rf(th)[0], th, ph);
    };
    m.d1 = [tf, rf](double th, double) {
      return std::array<Vec4, 2>{Vec4(tf(th)[1], rf(th)[1], 1.0, 0.0),
                                 Vec4(0.0, 0.0, 0.0, 1.0)};
    };
    m.d2 = [tf, rf](double th, double) {
      return std::array<Vec4, 3>{Vec4(tf(th)[2], rf(th)[2], 0.0, 0.0), Vec4::Zero(),
                                 Vec4::Zero()};
    };
  } else if (chart == "cartesian") {
    m.pos = [tf, rf](double th, double ph) {
      const double R = rf(th)[0], s = std::sin(th), c = std::cos(th);
      return Vec4(tf(th)[0], R * s * std::cos(ph), R * s * std::sin(ph), R * c);
    };
    m.d1 = [tf, rf](double th, double ph) {
      auto [R, Rp, Rpp] = rf(th);
      (void)Rpp;
      const double s = std::sin(th), c = std::cos(th);
      const double cp = std::cos(ph), sp = std::sin(ph);
      const double mer = Rp * s + R * c;  // d(R sin th)/dth
      return std::array<Vec4, 2>{Vec4(tf(th)[1], mer * cp, mer * sp, Rp * c - R * s),
                                 Vec4(0.0, -R * s * sp, R * s * cp, 0.0)};
    };
    m.d2 = [tf, rf](double th, double ph) {
      auto [R, Rp, Rpp] = rf(th);
      const double s = std::sin(th), c = std::cos(th);
      const double cp = std::cos(ph), sp = std::sin(ph);
      const double mer = Rp * s + R * c;
      const double mer_p = Rpp * s + 2.0 * Rp * c - R * s;
      return std::array<Vec4, 3>{
          Vec4(tf(th)[2], mer_p * cp, mer_p * sp, Rpp * c - 2.0 * Rp * s - R * c),
          Vec4(0.0, -mer * sp, mer * cp, 0.0),
          Vec4(0.0, -R * s * cp, -R * s * sp, 0.0)};
    };
  } else {
    throw ParameterError("surface-geometry", "unknown chart kind: " + chart);
  }
  return m;
}

// Sphere of radius r with t = v*x tilt: non-axisymmetric test surface.
inline SurfaceMap make_tilted_x_map(const std::string& chart, double r, double v) {
  ThetaProfile zero = [](double) { return std::array<double, 3>{0, 0, 0}; };
  ThetaProfile rad = [r](double) { return std::array<double, 3>{r, 0, 0}; };
  SurfaceMap m = make_profile_map(chart, zero, rad);
  m.axisymmetric = false;
  auto base_pos = m.pos;
  auto base_d1 = m.d1;
  auto base_d2 = m.d2;
  m.pos = [=](double th, double ph) {
    Vec4 X = base_pos(th, ph);
    X[0] = v * r * std::sin(th) * std::cos(ph);
    return X;
  };
  m.d1 = [=](double th, double ph) {
    auto d = base_d1(th, ph);
    d[0][0] = v * r * std::cos(th) * std::cos(ph);
    d[1][0] = -v * r * std::sin(th) * std::sin(ph);
    return d;
  };
  m.d2 = [=](double th, double ph) {
    auto d = base_d2(th, ph);
    d[0][0] = -v * r * std::sin(th) * std::cos(ph);
    d[1][0] = -v * r * std::cos(th) * std::sin(ph);
    d[2][0] = -v * r * std::sin(th) * std::cos(ph);
    return d;
  };
  return m;
}

}  // namespace detail

/// Surface catalog.  Profiles are given in the chart of the target spacetime
/// ("spherical" or "cartesian").
inline SurfaceMap surface_lookup(const std::string& name,
                                 const std::map<std::string, double>& params,
                                 const std::string& chart) {
  using detail::get_param;
  const double r = get_param(params, "r", 1.0);
  if (r <= 0.0) throw ParameterError("surface-geometry", name + ": radius must be positive");
  auto p2_profile = [](double amp) {
    return detail::ThetaProfile([amp](double th) {
      const double c = std::cos(th), s = std::sin(th);
      return std::array<double, 3>{amp * 0.5 * (3.0 * c * c - 1.0), -3.0 * amp * s * c,
                                   -3.0 * amp * (c * c - s * s)};
    });
  };
  detail::ThetaProfile zero = [](double) { return std::array<double, 3>{0, 0, 0}; };
  detail::ThetaProfile rad = [r](double) { return std::array<double, 3>{r, 0, 0}; };

  SurfaceMap m;
  if (name == "sphere") {
    m = detail::make_profile_map(chart, zero, rad);
  } else if (name == "wiggly-sphere" || name == "oblate") {
    const double eps = (name == "oblate") ? 0.2 : get_param(params, "eps", 0.1);
    detail::ThetaProfile rf = [r, p = p2_profile(eps)](double th) {
      auto [v, d, dd] = p(th);
      return std::array<double, 3>{r * (1.0 + v), r * d, r * dd};
    };
    m = detail::make_profile_map(chart, zero, rf);
  } else if (name == "tilted-sphere") {
    const double v = get_param(params, "v", 0.3);
    if (std::abs(v) >= 1.0)
      throw ParameterError("surface-geometry", "tilted-sphere: need |v| < 1");
    detail::ThetaProfile tf = [r, v](double th) {
      return std::array<double, 3>{v * r * std::cos(th), -v * r * std::sin(th),
                                   -v * r * std::cos(th)};
    };
    m = detail::make_profile_map(chart, tf, rad);
  } else if (name == "tilted-sphere-x") {
    const double v = get_param(params, "v", 0.3);
    if (std::abs(v) >= 1.0)
      throw ParameterError("surface-geometry", "tilted-sphere-x: need |v| < 1");
    m = detail::make_tilted_x_map(chart, r, v);
  } else if (name == "time-wiggled") {
    const double eps = get_param(params, "eps", 0.1);
    m = detail::make_profile_map(chart, p2_profile(eps), rad);
  } else {
    throw ParameterError("surface-geometry", "unknown surface name: " + name);
  }
  m.name = name;
  m.params = params;
  return m;
}

/// Custom axisymmetric surface from sampled columns (theta, r, t).
inline SurfaceMap make_sampled_profile_surface(const std::vector<double>& theta,
                                               const std::vector<double>& rvals,
                                               const std::vector<double>& tvals,
                                               const std::string& chart) {
  auto rs = std::make_shared<CubicSpline>(theta, rvals);
  auto ts = std::make_shared<CubicSpline>(theta, tvals);
  SurfaceMap m = detail::make_profile_map(
      chart, [ts](double th) { return ts->eval(th); },
      [rs](double th) { return rs->eval(th); });
  m.name = "profile-csv";
  return m;
}

/// All pointwise geometric data of the immersed surface at one parameter
/// value: frame, induced metric, and extrinsic curvature scalars.
struct PointGeometry {
  double th = 0, ph = 0;
  Vec4 X;
  Vec4 t_th, t_ph;                   // coordinate tangents
  Eigen::Matrix2d sigma, sigma_inv;  // induced metric in (theta, phi)
  double sqrt_sigma = 0;
  std::array<Vec4, 4> e;  // e0 timelike future, e1 outward, e2, e3 tangent
  std::array<double, 2> c2{}, c3{};  // e2 = c2[0] d_th + c2[1] d_ph, same for e3
  Vec4 shape_trace;  // sigma^{ij} (dd_ij X + Gamma(t_i, t_j)), ambient vector
  double kappa0 = 0, kappa1 = 0, normH = 0;
  Vec4 H, Hperp;
  Met4 g;
};

/// kappa(v) = -g(shape_trace, v): trace over the surface of the second
/// fundamental form in normal direction v (gives +2/r for the outward normal
/// of a round sphere).
inline double kappa_of(const PointGeometry& p, const Vec4& v) {
  return -p.shape_trace.dot(p.g * v);
}

struct FrameConnection {
  // om[a][b][c] = g(e_b, D_{e_{a+2}} e_c), a in {0,1} for directions e2, e3
  double om[2][4][4] = {};
};

struct MeanCurvatureFrame {
  Vec4 hperp, hhat;  // H_perp/|H| (timelike future), H/|H| (outward)
  double lambda = 0;       // boost from the slice frame
  std::array<double, 2> twist{};  // g(hhat, D_a hperp) along e2, e3
};

/// Discretized spacelike 2-surface with slice-adapted orthonormal frame and
/// extrinsic geometry; all per-node quantities come from the pointwise
/// construction `point`, so they can be differentiated by finite differences
/// at any parameter value.
class Surface {
 public:
  Surface(const SpacetimeModel& model, SurfaceMap map, int L,
          Vec4 slice_hint = Vec4(1, 0, 0, 0))
      : model_(model),
        map_(std::move(map)),
        L_(L),
        grid_(SphereGrid::for_band_limit(L)),
        hint_(slice_hint) {
    if (L < 4) throw ParameterError("surface-geometry", "band limit must be >= 4");
    if (map_.axisymmetric) check_axisymmetry();
    nodes_.reserve(grid_.size());
    for (int i = 0; i < grid_.n_theta(); ++i)
      for (int k = 0; k < grid_.n_phi(); ++k)
        nodes_.push_back(point(grid_.theta(i), grid_.phi(k)));
    area_ = grid_.integrate([&](int idx) {
      return nodes_[idx].sqrt_sigma / std::sin(grid_.theta(idx / grid_.n_phi()));
    });
  }

  const SpacetimeModel& model() const { return model_; }
  const SurfaceMap& map() const { return map_; }
  const SphereGrid& grid() const { return grid_; }
  int band_limit() const { return L_; }
  const std::vector<PointGeometry>& nodes() const { return nodes_; }
  double area() const { return area_; }

  /// Area element relative to the solid-angle measure at grid node (i,k).
  double area_density(int i) const {
    return nodes_[grid_.index(i, 0)].sqrt_sigma / std::sin(grid_.theta(i));
  }

  PointGeometry point(double th, double ph) const {
    PointGeometry p;
    p.th = th;
    p.ph = ph;
    p.X = map_.pos(th, ph);
    auto t = map_.d1(th, ph);
    p.t_th = t[0];
    p.t_ph = t[1];
    p.g = model_.metric(p.X);
    p.sigma(0, 0) = p.t_th.dot(p.g * p.t_th);
    p.sigma(0, 1) = p.sigma(1, 0) = p.t_th.dot(p.g * p.t_ph);
    p.sigma(1, 1) = p.t_ph.dot(p.g * p.t_ph);
    const double det = p.sigma.determinant();
    if (p.sigma(0, 0) <= 0.0 || det <= 0.0)
      throw GeometryError("surface-geometry",
                          "induced metric not positive definite (non-spacelike node)");
    p.sigma_inv = p.sigma.inverse();
    p.sqrt_sigma = std::sqrt(det);

    const Met4 ginv = p.g.inverse();
    // e0: normalized slice normal from the hint covector, tangential parts
    // projected out
    Vec4 u = -(ginv * hint_);
    if (u.dot(p.g * u) >= 0.0)
      throw FrameError("surface-geometry", "slice normal hint is not timelike");
    u = project_out_tangent(p, u);
    const double uu = u.dot(p.g * u);
    if (uu >= -1e-14)
      throw FrameError("surface-geometry", "slice normal degenerates on the surface");
    p.e[0] = u / std::sqrt(-uu);
    if (p.e[0][0] < 0.0) p.e[0] = -p.e[0];

    // e1: outward candidate orthogonalized against e0 and the tangents
    Vec4 w = outward_candidate(p);
    w += w.dot(p.g * p.e[0]) * p.e[0];
    w = project_out_tangent(p, w);
    const double ww = w.dot(p.g * w);
    if (ww <= 1e-14)
      throw FrameError("surface-geometry", "outward normal candidate degenerates");
    p.e[1] = w / std::sqrt(ww);

    // tangential frame: Gram-Schmidt on (d_th, d_ph)
    const double n2 = std::sqrt(p.sigma(0, 0));
    p.c2 = {1.0 / n2, 0.0};
    p.e[2] = p.t_th / n2;
    const double q = p.sigma(0, 1) / p.sigma(0, 0);
    const double n3 = std::sqrt(det / p.sigma(0, 0));
    p.c3 = {-q / n3, 1.0 / n3};
    p.e[3] = (p.t_ph - q * p.t_th) / n3;

    // extrinsic curvature trace vector
    const Christoffel gam = model_.christoffel(p.X);
    auto dd = map_.d2(th, ph);
    const Vec4* tt[2] = {&p.t_th, &p.t_ph};
    p.shape_trace.setZero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Vec4 term = dd[i + j];  // indices (0,0)->0, (0,1)/(1,0)->1, (1,1)->2
        for (int a = 0; a < 4; ++a)
          term[a] += tt[i]->transpose() * gam[a] * (*tt[j]);
        p.shape_trace += p.sigma_inv(i, j) * term;
      }
    p.kappa0 = kappa_of(p, p.e[0]);
    p.kappa1 = kappa_of(p, p.e[1]);
    p.normH = std::sqrt(std::abs(p.kappa1 * p.kappa1 - p.kappa0 * p.kappa0));
    p.H = p.kappa1 * p.e[1] - p.kappa0 * p.e[0];
    p.Hperp = p.kappa1 * p.e[0] - p.kappa0 * p.e[1];
    return p;
  }

  /// Covariant derivative of a pointwise ambient-vector field along the
  /// tangential frame direction e_{2+a}, by finite differences of the field's
  /// parameter dependence plus the Christoffel correction.
  template <class F>
  Vec4 tangential_cov_deriv(F&& field, double th, double ph, int a) const {
    const PointGeometry p = point(th, ph);
    return tangential_cov_deriv_at(std::forward<F>(field), p, a);
  }

  template <class F>
  Vec4 tangential_cov_deriv_at(F&& field, const PointGeometry& p, int a) const {
    const double hth = fd::theta_step(p.th), hph = 2.5e-3;
    const Vec4 dth = fd::deriv1([&](int i) { return field(p.th + i * hth, p.ph); }, hth);
    const Vec4 dph = fd::deriv1([&](int i) { return field(p.th, p.ph + i * hph); }, hph);
    const auto& c = (a == 0) ? p.c2 : p.c3;
    Vec4 d = c[0] * dth + c[1] * dph;
    const Christoffel gam = model_.christoffel(p.X);
    const Vec4 dir = p.e[2 + a];
    const Vec4 val = field(p.th, p.ph);
    for (int mu = 0; mu < 4; ++mu) d[mu] += dir.transpose() * gam[mu] * val;
    return d;
  }

  FrameConnection connection(double th, double ph) const {
    const PointGeometry p = point(th, ph);
    return connection_at(p);
  }

  FrameConnection connection_at(const PointGeometry& p) const {
    FrameConnection con;
    const double hth = fd::theta_step(p.th), hph = 2.5e-3;
    std::array<Vec4, 4> dth, dph;
    for (int c = 0; c < 4; ++c) {
      dth[c] = fd::deriv1([&](int i) { return point(p.th + i * hth, p.ph).e[c]; }, hth);
      dph[c] = fd::deriv1([&](int i) { return point(p.th, p.ph + i * hph).e[c]; }, hph);
    }
    const Christoffel gam = model_.christoffel(p.X);
    for (int a = 0; a < 2; ++a) {
      const auto& cf = (a == 0) ? p.c2 : p.c3;
      const Vec4 dir = p.e[2 + a];
      for (int c = 0; c < 4; ++c) {
        Vec4 d = cf[0] * dth[c] + cf[1] * dph[c];
        for (int mu = 0; mu < 4; ++mu) d[mu] += dir.transpose() * gam[mu] * p.e[c];
        for (int b = 0; b < 4; ++b) con.om[a][b][c] = p.e[b].dot(p.g * d);
      }
    }
    return con;
  }

  const std::vector<FrameConnection>& connections() const {
    if (connections_.empty()) {
      connections_.reserve(nodes_.size());
      for (const auto& n : nodes_) connections_.push_back(connection_at(n));
    }
    return connections_;
  }

  MeanCurvatureFrame mc_frame(double th, double ph) const {
    return mc_frame_at(point(th, ph));
  }

  MeanCurvatureFrame mc_frame_at(const PointGeometry& p) const {
    MeanCurvatureFrame mc = mc_vectors(p);
    for (int a = 0; a < 2; ++a) {
      const Vec4 d = tangential_cov_deriv_at(
          [&](double t, double f) { return mc_vectors(point(t, f)).hperp; }, p, a);
      mc.twist[a] = mc.hhat.dot(p.g * d);
    }
    return mc;
  }

  /// Per-node mean-curvature frames and twist; fails if |H| drops below the
  /// convexity threshold anywhere.
  const std::vector<MeanCurvatureFrame>& mean_curvature_data() const {
    if (mc_.empty()) {
      mc_.reserve(nodes_.size());
      for (const auto& n : nodes_) mc_.push_back(mc_frame_at(n));
    }
    return mc_;
  }

  double convexity_threshold() const { return tau_H_; }

  double gaussian_curvature(double th, double ph) const {
    // Brioschi formula; E, F, G and their derivatives from the closed-form
    // pullback, differentiated numerically.
    const double hth = fd::theta_step(th), hph = 2.5e-3;
    auto comp = [&](double t, double f, int which) {
      const Vec4 X = map_.pos(t, f);
      auto tv = map_.d1(t, f);
      const Met4 g = model_.metric(X);
      if (which == 0) return tv[0].dot(g * tv[0]);
      if (which == 1) return tv[0].dot(g * tv[1]);
      return tv[1].dot(g * tv[1]);
    };
    const double E = comp(th, ph, 0), F = comp(th, ph, 1), G = comp(th, ph, 2);
    auto du = [&](int w) {
      return fd::deriv1([&](int i) { return comp(th + i * hth, ph, w); }, hth);
    };
    auto dv = [&](int w) {
      return fd::deriv1([&](int i) { return comp(th, ph + i * hph, w); }, hph);
    };
    const double Eu = du(0), Ev = dv(0), Fu = du(1), Fv = dv(1), Gu = du(2), Gv = dv(2);
    const double Evv = fd::deriv2([&](int i) { return comp(th, ph + i * hph, 0); }, hph);
    const double Guu = fd::deriv2([&](int i) { return comp(th + i * hth, ph, 2); }, hth);
    const double Fuv = fd::deriv1(
        [&](int i) {
          return fd::deriv1([&](int j) { return comp(th + i * hth, ph + j * hph, 1); },
                            hph);
        },
        hth);
    Eigen::Matrix3d M1, M2;
    M1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,  //
        Fv - 0.5 * Gu, E, F,                                      //
        0.5 * Gv, F, G;
    M2 << 0.0, 0.5 * Ev, 0.5 * Gu,  //
        0.5 * Ev, E, F,             //
        0.5 * Gu, F, G;
    const double det = E * G - F * F;
    return (M1.determinant() - M2.determinant()) / (det * det);
  }

  const std::vector<double>& gaussian_curvatures() const {
    if (kg_.empty()) {
      kg_.reserve(nodes_.size());
      for (const auto& n : nodes_) kg_.push_back(gaussian_curvature(n.th, n.ph));
    }
    return kg_;
  }

  double gauss_bonnet_residual() const {
    const auto& kg = gaussian_curvatures();
    const double total = grid_.integrate([&](int idx) {
      return kg[idx] * nodes_[idx].sqrt_sigma / std::sin(nodes_[idx].th);
    });
    return std::abs(total - 4.0 * kPi);
  }

  /// Induced metric alone, cheaper than `point` (no frame or connection).
  Eigen::Matrix2d induced_metric(double th, double ph) const {
    const Vec4 X = map_.pos(th, ph);
    auto t = map_.d1(th, ph);
    const Met4 g = model_.metric(X);
    Eigen::Matrix2d s;
    s(0, 0) = t[0].dot(g * t[0]);
    s(0, 1) = s(1, 0) = t[0].dot(g * t[1]);
    s(1, 1) = t[1].dot(g * t[1]);
    return s;
  }

  /// Largest phi-variation of the induced metric over probe points; used as
  /// the axisymmetry guard for the embedding route.
  double axisymmetry_deviation() const {
    double dev = 0.0;
    for (int i = 0; i < grid_.n_theta(); i += std::max(1, grid_.n_theta() / 8)) {
      const double th = grid_.theta(i);
      const Eigen::Matrix2d a = induced_metric(th, 0.0);
      for (double ph : {1.1, 2.9, 4.4})
        dev = std::max(dev, (a - induced_metric(th, ph)).cwiseAbs().maxCoeff());
    }
    return dev;
  }

 private:
  Vec4 project_out_tangent(const PointGeometry& p, const Vec4& v) const {
    const Vec4* tt[2] = {&p.t_th, &p.t_ph};
    Vec4 out = v;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out -= p.sigma_inv(i, j) * v.dot(p.g * (*tt[i])) * (*tt[j]);
    return out;
  }

  Vec4 outward_candidate(const PointGeometry& p) const {
    if (model_.chart == "spherical") return Vec4(0, 1, 0, 0);
    Vec4 w(0, p.X[1], p.X[2], p.X[3]);
    const double n = w.norm();
    if (n < 1e-12)
      throw FrameError("surface-geometry", "outward direction undefined at origin");
    return w / n;
  }

  MeanCurvatureFrame mc_vectors(const PointGeometry& p) const {
    if (p.normH < tau_H_ || p.kappa1 * p.kappa1 <= p.kappa0 * p.kappa0)
      throw NonConvexError("surface-geometry",
                           "|H| below convexity threshold; mean-curvature frame undefined");
    MeanCurvatureFrame mc;
    mc.hhat = p.H / p.normH;
    mc.hperp = p.Hperp / p.normH;
    mc.lambda = std::atanh(p.kappa0 / p.kappa1);
    return mc;
  }

  void check_axisymmetry() const {
    for (double th : {0.4, 1.3, 2.6}) {
      const Eigen::Matrix2d s0 = induced_metric(th, 0.7);
      const Eigen::Matrix2d s1 = induced_metric(th, 3.9);
      if ((s0 - s1).cwiseAbs().maxCoeff() > 1e-10)
        throw NotAxisymmetricError("surface-geometry",
                                   map_.name + ": map flagged axisymmetric but induced "
                                               "metric varies with phi");
    }
  }

  const SpacetimeModel& model_;
  SurfaceMap map_;
  int L_;
  SphereGrid grid_;
  Vec4 hint_;  // slice covector (index-down)
  double tau_H_ = 1e-8;
  std::vector<PointGeometry> nodes_;
  double area_ = 0.0;
  mutable std::vector<FrameConnection> connections_;
  mutable std::vector<MeanCurvatureFrame> mc_;
  mutable std::vector<double> kg_;
};

/// Recomputes the extrinsic data in a frame boosted by the given rapidity and
/// returns the largest deviation of H, Hperp and |H| from the unboosted
/// values; these are frame-independent geometric objects.
inline double verify_frame_invariance(const Surface& surf, double rapidity) {
  const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
  double dev = 0.0;
  for (const auto& p : surf.nodes()) {
    const Vec4 e0b = ch * p.e[0] + sh * p.e[1];
    const Vec4 e1b = sh * p.e[0] + ch * p.e[1];
    const double k0b = kappa_of(p, e0b);
    const double k1b = kappa_of(p, e1b);
    const Vec4 Hb = k1b * e1b - k0b * e0b;
    const Vec4 Hpb = k1b * e0b - k0b * e1b;
    const double nb = std::sqrt(std::abs(k1b * k1b - k0b * k0b));
    dev = std::max(dev, (Hb - p.H).cwiseAbs().maxCoeff());
    dev = std::max(dev, (Hpb - p.Hperp).cwiseAbs().maxCoeff());
    dev = std::max(dev, std::abs(nb - p.normH));
  }
  return dev;
}

}  // namespace qlm

#endif
