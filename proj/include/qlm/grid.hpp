#ifndef QLM_GRID_HPP
#define QLM_GRID_HPP

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "qlm/errors.hpp"

namespace qlm {

inline constexpr double kPi = std::numbers::pi;

struct Quadrature1D {
  std::vector<double> nodes;    // ascending in x
  std::vector<double> weights;  // for integration dx over [a,b]
};

/// Gauss-Legendre nodes and weights on [-1,1], Newton iteration on P_n.
/// Exact for polynomials of degree 2n-1.
inline Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw ParameterError("grid", "gauss_legendre: n must be >= 1");
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi-type initial guess for the i-th root (descending), then Newton.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.nodes[n - 1 - i] = x;
    q.nodes[i] = -x;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

inline Quadrature1D gauss_legendre(int n, double a, double b) {
  Quadrature1D q = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

/// Product grid for the 2-sphere: Gauss-Legendre in cos(theta) crossed with
/// uniform phi.  Poles are excluded (interior Gauss nodes only).
class SphereGrid {
 public:
  SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
    if (n_theta < 2 || n_phi < 4)
      throw ParameterError("grid", "SphereGrid: need n_theta >= 2, n_phi >= 4");
    Quadrature1D gl = gauss_legendre(n_theta);
    theta_.resize(n_theta);
    wtheta_.resize(n_theta);
    // Gauss nodes ascend in u = cos(theta); store theta ascending instead.
    for (int i = 0; i < n_theta; ++i) {
      theta_[i] = std::acos(gl.nodes[n_theta - 1 - i]);
      wtheta_[i] = gl.weights[n_theta - 1 - i];
    }
    phi_.resize(n_phi);
    for (int k = 0; k < n_phi; ++k) phi_[k] = 2.0 * kPi * k / n_phi;
    wphi_ = 2.0 * kPi / n_phi;
  }

  /// Grid sized for spherical-harmonic band limit L: exact analysis/synthesis
  /// round trip for band-limited data.
  static SphereGrid for_band_limit(int L) { return SphereGrid(L + 1, 2 * L + 2); }

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }
  int index(int i, int k) const { return i * n_phi_ + k; }
  double theta(int i) const { return theta_[i]; }
  double phi(int k) const { return phi_[k]; }
  /// Quadrature weight for the measure sin(theta) dtheta dphi at node (i,k).
  double solid_angle_weight(int i) const { return wtheta_[i] * wphi_; }
  const std::vector<double>& thetas() const { return theta_; }

  /// Integral of a node-indexed density against sin(theta) dtheta dphi.
  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (int i = 0; i < n_theta_; ++i) {
      double partial = 0.0;
      for (int k = 0; k < n_phi_; ++k) partial += f(index(i, k));
      sum += partial * wtheta_[i];
    }
    return sum * wphi_;
  }

 private:
  int n_theta_, n_phi_;
  std::vector<double> theta_, wtheta_, phi_;
  double wphi_;
};

/// Worker-count cap for parameter sweeps, from QLM_THREADS (>=1).
inline int worker_count() {
  if (const char* env = std::getenv("QLM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 4;
}

}  // namespace qlm

#endif
