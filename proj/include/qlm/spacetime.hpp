#ifndef QLM_SPACETIME_HPP
#define QLM_SPACETIME_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "qlm/errors.hpp"
#include "qlm/grid.hpp"

namespace qlm {

using Vec4 = Eigen::Vector4d;
using Met4 = Eigen::Matrix4d;
using DMet4 = std::array<Met4, 4>;                  // [c] = d_c g_ab
using DDMet4 = std::array<std::array<Met4, 4>, 4>;  // [c][d] = d_c d_d g_ab
using Christoffel = std::array<Met4, 4>;            // [a](b,c) = Gamma^a_bc
using DChristoffel = std::array<Christoffel, 4>;    // [e] = d_e Gamma

struct Event {
  Vec4 coords;
  std::string chart;
};

/// Analytic spacetime geometry: metric and its first two coordinate
/// derivatives in closed form; connection and curvature are assembled
/// exactly from them.  Geometric units G = c = 1.
struct SpacetimeModel {
  std::string name;
  std::string chart = "spherical";  // "spherical" (t,r,theta,phi) or "cartesian"
  std::map<std::string, double> params;
  bool vacuum = false;

  std::function<Met4(const Vec4&)> metric_closed;
  std::function<DMet4(const Vec4&)> dmetric_closed;
  std::function<DDMet4(const Vec4&)> ddmetric_closed;
  std::function<bool(const Vec4&)> in_domain;
  // Set for entries whose Ricci is a documented closed form (weak-field
  // linearization); vacuum entries return zero; otherwise assembled.
  std::function<Met4(const Vec4&)> ricci_closed;

  // Coordinate box for random sampling in consistency checks.
  std::array<std::pair<double, double>, 4> sample_box;

  Met4 metric(const Vec4& x) const {
    require_domain(x);
    return metric_closed(x);
  }

  Christoffel christoffel(const Vec4& x) const {
    require_domain(x);
    const Met4 g = metric_closed(x);
    const DMet4 dg = dmetric_closed(x);
    const Met4 ginv = g.inverse();
    Christoffel gam;
    for (int a = 0; a < 4; ++a) {
      gam[a].setZero();
      for (int b = 0; b < 4; ++b)
        for (int c = b; c < 4; ++c) {
          double s = 0.0;
          for (int d = 0; d < 4; ++d)
            s += ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
          gam[a](b, c) = 0.5 * s;
          gam[a](c, b) = gam[a](b, c);
        }
    }
    return gam;
  }

  DChristoffel dchristoffel(const Vec4& x) const {
    require_domain(x);
    const Met4 g = metric_closed(x);
    const DMet4 dg = dmetric_closed(x);
    const DDMet4 ddg = ddmetric_closed(x);
    const Met4 ginv = g.inverse();
    DMet4 dginv;  // d_e g^{ab} = -g^{ac} (d_e g_cd) g^{db}
    for (int e = 0; e < 4; ++e) dginv[e] = -ginv * dg[e] * ginv;
    DChristoffel dgam;
    for (int e = 0; e < 4; ++e)
      for (int a = 0; a < 4; ++a) {
        dgam[e][a].setZero();
        for (int b = 0; b < 4; ++b)
          for (int c = b; c < 4; ++c) {
            double s = 0.0;
            for (int d = 0; d < 4; ++d) {
              s += dginv[e](a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
              s += ginv(a, d) * (ddg[e][b](d, c) + ddg[e][c](d, b) - ddg[e][d](b, c));
            }
            dgam[e][a](b, c) = 0.5 * s;
            dgam[e][a](c, b) = dgam[e][a](b, c);
          }
      }
    return dgam;
  }

  /// Ricci assembled from the connection; no vacuum shortcut.
  Met4 ricci_assembled(const Vec4& x) const {
    const Christoffel gam = christoffel(x);
    const DChristoffel dgam = dchristoffel(x);
    Met4 ric;
    ric.setZero();
    for (int b = 0; b < 4; ++b)
      for (int d = b; d < 4; ++d) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) {
          s += dgam[c][c](b, d) - dgam[b][c](c, d);
          for (int e = 0; e < 4; ++e)
            s += gam[c](c, e) * gam[e](b, d) - gam[c](d, e) * gam[e](c, b);
        }
        ric(b, d) = s;
        ric(d, b) = s;
      }
    return ric;
  }

  Met4 ricci(const Vec4& x) const {
    require_domain(x);
    if (vacuum) return Met4::Zero();
    if (ricci_closed) return ricci_closed(x);
    return ricci_assembled(x);
  }

  double scalar_curvature(const Vec4& x) const {
    if (vacuum) return 0.0;
    const Met4 ginv = metric(x).inverse();
    return (ginv * ricci(x)).trace();
  }

  /// 8 pi T_ab = Ric_ab - (1/2) g_ab R, by construction.
  Met4 stress_energy(const Vec4& x) const {
    if (vacuum) return Met4::Zero();
    const Met4 g = metric(x);
    return (ricci(x) - 0.5 * g * scalar_curvature(x)) / (8.0 * kPi);
  }

  void require_domain(const Vec4& x) const {
    if (!in_domain(x))
      throw DomainError("spacetime-catalog",
                        name + ": coordinates outside chart validity domain");
  }
};

namespace detail {

inline double get_param(const std::map<std::string, double>& p, const std::string& key,
                        double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline SpacetimeModel make_minkowski_cartesian() {
  SpacetimeModel m;
  m.name = "minkowski-cartesian";
  m.chart = "cartesian";
  m.vacuum = true;
  m.metric_closed = [](const Vec4&) {
    return Met4(Eigen::Vector4d(-1, 1, 1, 1).asDiagonal());
  };
  m.dmetric_closed = [](const Vec4&) {
    DMet4 d;
    for (auto& g : d) g.setZero();
    return d;
  };
  m.ddmetric_closed = [](const Vec4&) {
    DDMet4 d;
    for (auto& row : d)
      for (auto& g : row) g.setZero();
    return d;
  };
  m.in_domain = [](const Vec4&) { return true; };
  m.sample_box = {{{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}};
  return m;
}

// Diagonal metric in (t, r, theta, phi) with g_tt = -a(r), g_rr = b(r),
// g_thth = c(r), g_phph = c(r) sin^2(theta).  Covers the spherical charts.
struct RadialProfiles {
  // value, first and second radial derivative of a, b, c
  std::function<std::array<double, 3>(double)> a, b, c;
};

inline SpacetimeModel make_spherical_chart(const RadialProfiles& prof) {
  SpacetimeModel m;
  auto eval = [prof](const Vec4& x) {
    return std::array<std::array<double, 3>, 3>{prof.a(x[1]), prof.b(x[1]), prof.c(x[1])};
  };
  m.metric_closed = [eval](const Vec4& x) {
    auto [A, B, C] = eval(x);
    const double s = std::sin(x[2]);
    return Met4(Eigen::Vector4d(-A[0], B[0], C[0], C[0] * s * s).asDiagonal());
  };
  m.dmetric_closed = [eval](const Vec4& x) {
    auto [A, B, C] = eval(x);
    const double s = std::sin(x[2]), cth = std::cos(x[2]);
    DMet4 d;
    for (auto& g : d) g.setZero();
    d[1](0, 0) = -A[1];
    d[1](1, 1) = B[1];
    d[1](2, 2) = C[1];
    d[1](3, 3) = C[1] * s * s;
    d[2](3, 3) = C[0] * 2.0 * s * cth;
    return d;
  };
  m.ddmetric_closed = [eval](const Vec4& x) {
    auto [A, B, C] = eval(x);
    const double s = std::sin(x[2]), cth = std::cos(x[2]);
    DDMet4 d;
    for (auto& row : d)
      for (auto& g : row) g.setZero();
    d[1][1](0, 0) = -A[2];
    d[1][1](1, 1) = B[2];
    d[1][1](2, 2) = C[2];
    d[1][1](3, 3) = C[2] * s * s;
    d[1][2](3, 3) = C[1] * 2.0 * s * cth;
    d[2][1](3, 3) = d[1][2](3, 3);
    d[2][2](3, 3) = C[0] * 2.0 * (cth * cth - s * s);
    return d;
  };
  return m;
}

inline SpacetimeModel make_minkowski_spherical() {
  RadialProfiles prof;
  prof.a = [](double) { return std::array<double, 3>{1.0, 0.0, 0.0}; };
  prof.b = [](double) { return std::array<double, 3>{1.0, 0.0, 0.0}; };
  prof.c = [](double r) { return std::array<double, 3>{r * r, 2.0 * r, 2.0}; };
  SpacetimeModel m = make_spherical_chart(prof);
  m.name = "minkowski-spherical";
  m.vacuum = true;
  m.in_domain = [](const Vec4& x) { return x[1] > 0.0 && x[2] > 0.0 && x[2] < kPi; };
  m.sample_box = {{{-1, 1}, {0.5, 20}, {0.3, kPi - 0.3}, {0, 2 * kPi}}};
  return m;
}

inline SpacetimeModel make_schwarzschild(double M) {
  RadialProfiles prof;
  prof.a = [M](double r) {
    return std::array<double, 3>{1.0 - 2.0 * M / r, 2.0 * M / (r * r), -4.0 * M / (r * r * r)};
  };
  prof.b = [M](double r) {
    const double f = 1.0 - 2.0 * M / r;
    const double df = 2.0 * M / (r * r);
    const double ddf = -4.0 * M / (r * r * r);
    return std::array<double, 3>{1.0 / f, -df / (f * f),
                                 (2.0 * df * df - f * ddf) / (f * f * f)};
  };
  prof.c = [](double r) { return std::array<double, 3>{r * r, 2.0 * r, 2.0}; };
  SpacetimeModel m = make_spherical_chart(prof);
  m.name = "schwarzschild";
  m.vacuum = true;
  m.params["M"] = M;
  const double rmin = 2.0 * M * (1.0 + 1e-10);
  m.in_domain = [rmin](const Vec4& x) {
    return x[1] >= rmin && x[2] > 0.0 && x[2] < kPi;
  };
  m.sample_box = {{{-1, 1}, {3.0 * M, 50.0 * M}, {0.3, kPi - 0.3}, {0, 2 * kPi}}};
  return m;
}

inline SpacetimeModel make_schwarzschild_isotropic(double M) {
  RadialProfiles prof;
  // g_tt = -((1 - M/2r)/(1 + M/2r))^2, spatial conformal factor (1 + M/2r)^4.
  prof.a = [M](double r) {
    const double u = M / (2.0 * r), du = -M / (2.0 * r * r), ddu = M / (r * r * r);
    const double B = 1.0 + u;
    const double f = (1.0 - u) / B;
    const double fp = -2.0 * du / (B * B);
    const double fpp = -2.0 * ddu / (B * B) + 4.0 * du * du / (B * B * B);
    return std::array<double, 3>{f * f, 2.0 * f * fp, 2.0 * fp * fp + 2.0 * f * fpp};
  };
  auto conf = [M](double r) {
    const double u = M / (2.0 * r), du = -M / (2.0 * r * r), ddu = M / (r * r * r);
    const double B = 1.0 + u;
    const double c = B * B * B * B;
    const double cp = 4.0 * B * B * B * du;
    const double cpp = 12.0 * B * B * du * du + 4.0 * B * B * B * ddu;
    return std::array<double, 3>{c, cp, cpp};
  };
  prof.b = conf;
  prof.c = [conf](double r) {
    auto [c, cp, cpp] = conf(r);
    return std::array<double, 3>{c * r * r, cp * r * r + 2.0 * c * r,
                                 cpp * r * r + 4.0 * cp * r + 2.0 * c};
  };
  SpacetimeModel m = make_spherical_chart(prof);
  m.name = "schwarzschild-isotropic";
  m.vacuum = true;
  m.params["M"] = M;
  const double rmin = 0.5 * M * (1.0 + 1e-10);
  m.in_domain = [rmin](const Vec4& x) {
    return x[1] > rmin && x[2] > 0.0 && x[2] < kPi;
  };
  m.sample_box = {{{-1, 1}, {2.0 * M, 40.0 * M}, {0.3, kPi - 0.3}, {0, 2 * kPi}}};
  return m;
}

// Weak field g = eta + eps h with h_ab = 2 q(r) diag(1,1,1,1) in Cartesian
// coordinates and q = erf(r/a)/r, a smoothed monopole.  Ricci is the
// linearized expression, truncation error O(eps^2).
inline SpacetimeModel make_weak_field(double eps, double a) {
  struct Q {
    double a;
    // q, q'/r-safe derivatives
    std::array<double, 3> operator()(double r) const {
      const double E0 = std::erf(r / a);
      const double E1 = (2.0 / std::sqrt(kPi)) * std::exp(-r * r / (a * a));
      const double q = E0 / r;
      const double qp = E1 / (a * r) - E0 / (r * r);
      const double qpp = -2.0 * E1 / (a * a * a) - 2.0 * E1 / (a * r * r) + 2.0 * E0 / (r * r * r);
      return {q, qp, qpp};
    }
  };
  Q qf{a};
  SpacetimeModel m;
  m.name = "weak-field";
  m.chart = "cartesian";
  m.params["eps"] = eps;
  m.params["a"] = a;
  auto radius = [](const Vec4& x) {
    return std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  };
  m.metric_closed = [qf, eps, radius](const Vec4& x) {
    const double q = qf(radius(x))[0];
    Met4 g = Eigen::Vector4d(-1, 1, 1, 1).asDiagonal();
    for (int i = 0; i < 4; ++i) g(i, i) += eps * 2.0 * q;
    return g;
  };
  m.dmetric_closed = [qf, eps, radius](const Vec4& x) {
    const double r = radius(x);
    const double qp = qf(r)[1];
    DMet4 d;
    for (auto& g : d) g.setZero();
    for (int c = 1; c < 4; ++c) {
      const double dq = qp * x[c] / r;
      for (int i = 0; i < 4; ++i) d[c](i, i) = eps * 2.0 * dq;
    }
    return d;
  };
  m.ddmetric_closed = [qf, eps, radius](const Vec4& x) {
    const double r = radius(x);
    auto [q, qp, qpp] = qf(r);
    (void)q;
    DDMet4 d;
    for (auto& row : d)
      for (auto& g : row) g.setZero();
    for (int c = 1; c < 4; ++c)
      for (int e = 1; e < 4; ++e) {
        const double del = (c == e) ? 1.0 : 0.0;
        const double ddq = qpp * x[c] * x[e] / (r * r) +
                           qp * (del / r - x[c] * x[e] / (r * r * r));
        for (int i = 0; i < 4; ++i) d[c][e](i, i) = eps * 2.0 * ddq;
      }
    return d;
  };
  m.ricci_closed = [qf, eps, radius](const Vec4& x) {
    const double r = radius(x);
    auto [q, qp, qpp] = qf(r);
    (void)q;
    // Ric^(1)_ab = -(1/2) lap(2 eps q) diag(1,1,1,1)
    const double lap = eps * 2.0 * (qpp + 2.0 * qp / r);
    Met4 ric = Met4::Zero();
    for (int i = 0; i < 4; ++i) ric(i, i) = -0.5 * lap;
    return ric;
  };
  m.in_domain = [a, radius](const Vec4& x) { return radius(x) > 0.05 * a; };
  m.sample_box = {{{-1, 1}, {0.3, 3.0}, {0.3, 3.0}, {0.3, 3.0}}};
  return m;
}

}  // namespace detail

/// Catalog dispatch by name and named parameters.
inline SpacetimeModel catalog_lookup(const std::string& name,
                                     const std::map<std::string, double>& params = {}) {
  using detail::get_param;
  if (name == "minkowski-cartesian") return detail::make_minkowski_cartesian();
  if (name == "minkowski-spherical") return detail::make_minkowski_spherical();
  if (name == "schwarzschild" || name == "schwarzschild-isotropic") {
    const double M = get_param(params, "M", 1.0);
    if (M <= 0.0)
      throw ParameterError("spacetime-catalog", name + ": mass parameter M must be positive");
    return name == "schwarzschild" ? detail::make_schwarzschild(M)
                                   : detail::make_schwarzschild_isotropic(M);
  }
  if (name == "weak-field") {
    const double eps = get_param(params, "eps", 1e-3);
    const double a = get_param(params, "a", 1.0);
    if (a <= 0.0) throw ParameterError("spacetime-catalog", "weak-field: a must be positive");
    return detail::make_weak_field(eps, a);
  }
  throw ParameterError("spacetime-catalog", "unknown spacetime name: " + name);
}

/// Max relative deviation between the closed-form connection and 4th-order
/// centered finite differences of the metric, and between the assembled Ricci
/// and finite differences of the connection, over random sample points.
inline double connection_consistency_check(const SpacetimeModel& model, int samples,
                                           unsigned seed = 12345) {
  if (samples < 1) throw ParameterError("spacetime-catalog", "samples must be >= 1");
  std::mt19937 rng(seed);
  auto draw = [&](int c) {
    std::uniform_real_distribution<double> dist(model.sample_box[c].first,
                                                model.sample_box[c].second);
    return dist(rng);
  };
  const double h = 1e-3;
  double max_rel = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec4 x;
    for (int c = 0; c < 4; ++c) x[c] = draw(c);
    model.require_domain(x);

    // 4th-order centered derivative of the metric.
    DMet4 dg_fd;
    double scale = model.metric_closed(x).cwiseAbs().maxCoeff();
    for (int c = 0; c < 4; ++c) {
      auto at = [&](double step) {
        Vec4 y = x;
        y[c] += step;
        return model.metric_closed(y);
      };
      dg_fd[c] = (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
    }
    const DMet4 dg = model.dmetric_closed(x);
    for (int c = 0; c < 4; ++c) {
      const double dev = (dg_fd[c] - dg[c]).cwiseAbs().maxCoeff();
      max_rel = std::max(max_rel, dev / std::max(1.0, scale));
    }

    // Ricci vs finite differences of the connection.
    Met4 ric_fd = Met4::Zero();
    const Christoffel gam = model.christoffel(x);
    DChristoffel dgam_fd;
    for (int e = 0; e < 4; ++e) {
      auto at = [&](double step) {
        Vec4 y = x;
        y[e] += step;
        return model.christoffel(y);
      };
      const Christoffel m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
      for (int a = 0; a < 4; ++a)
        dgam_fd[e][a] = (m2[a] - 8.0 * m1[a] + 8.0 * p1[a] - p2[a]) / (12.0 * h);
    }
    for (int b = 0; b < 4; ++b)
      for (int d = 0; d < 4; ++d) {
        double v = 0.0;
        for (int c = 0; c < 4; ++c) {
          v += dgam_fd[c][c](b, d) - dgam_fd[b][c](c, d);
          for (int e = 0; e < 4; ++e)
            v += gam[c](c, e) * gam[e](b, d) - gam[c](d, e) * gam[e](c, b);
        }
        ric_fd(b, d) = v;
      }
    const double dev = (ric_fd - model.ricci(x)).cwiseAbs().maxCoeff();
    max_rel = std::max(max_rel, dev / std::max(1.0, scale));
  }
  return max_rel;
}

}  // namespace qlm

#endif
