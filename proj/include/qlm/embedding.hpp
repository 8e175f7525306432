#ifndef QLM_EMBEDDING_HPP
#define QLM_EMBEDDING_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "qlm/errors.hpp"
#include "qlm/grid.hpp"
#include "qlm/surface.hpp"

namespace qlm {

/// Axisymmetric 2-metric f(theta) dtheta^2 + g(theta) dphi^2, evaluable at
/// any interior theta (pointwise closures so it can be differentiated).
struct AxisymmetricMetricProfile {
  std::function<double(double)> f, g;
  std::vector<double> theta;  // quadrature nodes of the source grid
};

/// Pulls the induced metric of an axisymmetric surface back to a profile.
inline AxisymmetricMetricProfile extract_axisymmetric_profile(const Surface& surf) {
  if (!surf.map().axisymmetric || surf.axisymmetry_deviation() > 1e-10)
    throw NotAxisymmetricError("weyl-embedding",
                               "induced metric varies with phi; axisymmetric embedding "
                               "route unavailable");
  AxisymmetricMetricProfile prof;
  const Surface* s = &surf;
  prof.f = [s](double th) { return s->induced_metric(th, 0.0)(0, 0); };
  prof.g = [s](double th) { return s->induced_metric(th, 0.0)(1, 1); };
  prof.theta = surf.grid().thetas();
  return prof;
}

/// Isometric embedding of a positive-curvature axisymmetric 2-metric into a
/// Euclidean hyperplane as a surface of revolution:
///   rho = sqrt(g),  z' = sqrt(f - rho'^2),  z(0) = 0, z increasing.
/// Supplies the Euclidean principal curvatures and mean curvature (sum
/// convention: round sphere of radius r gives 2/r).
class AxisymmetricEmbedding {
 public:
  explicit AxisymmetricEmbedding(AxisymmetricMetricProfile prof)
      : prof_(std::move(prof)) {
    // guards at the source nodes plus near-pole probes
    std::vector<double> probe = prof_.theta;
    probe.push_back(1e-3);
    probe.push_back(kPi - 1e-3);
    for (double th : probe) {
      if (intrinsic_curvature(th) <= 0.0)
        throw ConvexityError("weyl-embedding",
                             "Gaussian curvature not positive; Weyl embedding "
                             "hypothesis violated");
      margin_check(th);
    }
    pole_regularity_check();
  }

  const AxisymmetricMetricProfile& profile() const { return prof_; }

  double rho(double th) const { return std::sqrt(prof_.g(th)); }
  double drho(double th) const {
    const double h = fd::theta_step(th);
    return fd::deriv1([&](int i) { return rho(th + i * h); }, h);
  }
  double ddrho(double th) const {
    const double h = fd::theta_step(th);
    return fd::deriv2([&](int i) { return rho(th + i * h); }, h);
  }

  double zprime(double th) const {
    const double f = prof_.f(th);
    const double rp = drho(th);
    const double arg = f - rp * rp;
    if (arg <= 1e-12 * f)
      throw NonEmbeddableError("weyl-embedding",
                               "f - rho'^2 not positive; surface-of-revolution "
                               "embedding does not exist");
    return std::sqrt(arg);
  }

  double zsecond(double th) const {
    const double h = fd::theta_step(th);
    const double fp = fd::deriv1([&](int i) { return prof_.f(th + i * h); }, h);
    return (fp - 2.0 * drho(th) * ddrho(th)) / (2.0 * zprime(th));
  }

  /// Height by quadrature in u = cos(theta); the integrand z'/sin(theta) is
  /// smooth through the poles.
  double z(double th) const {
    const double u = std::cos(th);
    if (u >= 1.0) return 0.0;
    const Quadrature1D q = gauss_legendre(40, u, 1.0);
    double acc = 0.0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
      const double t = std::acos(q.nodes[i]);
      acc += q.weights[i] * zprime(t) / std::sin(t);
    }
    return acc;
  }

  double kappa_meridian(double th) const {
    const double f = prof_.f(th);
    return (drho(th) * zsecond(th) - zprime(th) * ddrho(th)) / (f * std::sqrt(f));
  }
  double kappa_parallel(double th) const {
    return zprime(th) / (rho(th) * std::sqrt(prof_.f(th)));
  }
  double hflat(double th) const { return kappa_meridian(th) + kappa_parallel(th); }

  /// Gaussian curvature of the input metric (intrinsic, theta-only form).
  double intrinsic_curvature(double th) const {
    const double h = fd::theta_step(th);
    auto ratio = [&](double t) {
      const double hh = fd::theta_step(t);
      const double gp = fd::deriv1([&](int i) { return prof_.g(t + i * hh); }, hh);
      return gp / std::sqrt(prof_.f(t) * prof_.g(t));
    };
    const double d = fd::deriv1([&](int i) { return ratio(th + i * h); }, h);
    return -d / (2.0 * std::sqrt(prof_.f(th) * prof_.g(th)));
  }

  /// Largest relative reconstruction error of |rho'^2 + z'^2 - f|/f and
  /// |rho^2 - g|/g over the profile nodes, with z differentiated
  /// independently of its defining quadrature.
  double metric_residual() const {
    double dev = 0.0;
    for (double th : prof_.theta) {
      const double h = std::min(1e-4, fd::theta_step(th));
      const double zp = fd::deriv1([&](int i) { return z(th + i * h); }, h);
      const double rp = drho(th);
      const double f = prof_.f(th), g = prof_.g(th);
      dev = std::max(dev, std::abs(rp * rp + zp * zp - f) / f);
      dev = std::max(dev, std::abs(rho(th) * rho(th) - g) / g);
    }
    return dev;
  }

 private:
  void margin_check(double th) const { (void)zprime(th); }

  void pole_regularity_check() const {
    for (double th : {1e-4, kPi - 1e-4}) {
      const double ratio = std::abs(drho(th)) / std::sqrt(prof_.f(th));
      if (std::abs(ratio - 1.0) > 1e-6)
        throw NonEmbeddableError("weyl-embedding",
                                 "conical defect at a pole: |rho'|/sqrt(f) does not "
                                 "approach 1");
    }
  }

  AxisymmetricMetricProfile prof_;
};

}  // namespace qlm

#endif
