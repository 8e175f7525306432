#ifndef QLM_SWSH_HPP
#define QLM_SWSH_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "qlm/errors.hpp"
#include "qlm/grid.hpp"

namespace qlm {

using cplx = std::complex<double>;

// Spin-weighted spherical harmonic conventions used throughout:
//   sYlm(theta,phi) = i^{2s} sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{i m phi}
// with the Wigner d-matrix in the standard (Wikipedia/Wigner) convention.
// Then on the unit round sphere
//   eth    sYlm = +sqrt((l-s)(l+s+1)) (s+1)Ylm
//   ethbar sYlm = -sqrt((l+s)(l-s+1)) (s-1)Ylm
// where eth = -[d/dtheta - s cot(theta) + (i/sin theta) d/dphi].
// Half-integer spin weights carry half-integer (l, m); such fields are
// anti-periodic in phi and are handled by a phase shift in the transforms.

namespace wigner {

// Seed value d^j_{j,m}(theta) = sqrt((2j)!/((j+m)!(j-m)!)) c^{j+m} (-s)^{j-m}
// with c = cos(theta/2), s = sin(theta/2).  Arguments are doubled indices.
inline double seed_top(int j2, int m2, double theta) {
  const double j = 0.5 * j2, m = 0.5 * m2;
  const double lc = std::log(std::cos(0.5 * theta));
  const double ls = std::log(std::sin(0.5 * theta));
  const double logmag = 0.5 * (std::lgamma(2.0 * j + 1.0) - std::lgamma(j + m + 1.0) -
                               std::lgamma(j - m + 1.0)) +
                        (j + m) * lc + (j - m) * ls;
  const double sign = (((j2 - m2) / 2) % 2 != 0) ? -1.0 : 1.0;
  return sign * std::exp(logmag);
}

/// d^{l0}_{m,n}(theta) at l0 = max(|m|,|n|), via the extreme-index closed
/// forms and Wigner symmetries.  Doubled indices.
inline double seed(int m2, int n2, double theta) {
  const int j2 = std::max(std::abs(m2), std::abs(n2));
  if (m2 == j2) return seed_top(j2, n2, theta);
  if (n2 == j2) {  // d_{m,j} = (-1)^{j-m} d_{j,m}
    const double sign = (((j2 - m2) / 2) % 2 != 0) ? -1.0 : 1.0;
    return sign * seed_top(j2, m2, theta);
  }
  if (n2 == -j2) return seed_top(j2, -m2, theta);  // d_{m,-j} = d_{j,-m}
  // m2 == -j2: d_{-j,n} = (-1)^{j+n} d_{j,-n}
  const double sign = (((j2 + n2) / 2) % 2 != 0) ? -1.0 : 1.0;
  return sign * seed_top(j2, -n2, theta);
}

/// Column of d^l_{m,n}(theta) for l from max(|m|,|n|) to l_max inclusive,
/// by stable upward three-term recurrence.  Doubled indices.
inline void column(int m2, int n2, int lmax2, double theta, std::vector<double>& out) {
  const int l02 = std::max(std::abs(m2), std::abs(n2));
  out.clear();
  if (lmax2 < l02) return;
  const double x = std::cos(theta);
  const double m = 0.5 * m2, n = 0.5 * n2;
  out.reserve((lmax2 - l02) / 2 + 1);
  double dm1 = 0.0;          // d^{l-1}
  double d0 = seed(m2, n2, theta);
  out.push_back(d0);
  for (int l2 = l02; l2 + 2 <= lmax2; l2 += 2) {
    double dp;
    if (l2 == 0) {
      dp = x;  // the l=0 -> 1 step only arises for m = n = 0
    } else {
      const double l = 0.5 * l2;
      const double lp = l + 1.0;
      const double c0 = (2.0 * l + 1.0) * (l * lp * x - m * n);
      const double cm = lp * std::sqrt((l * l - m * m) * (l * l - n * n));
      const double cp = l * std::sqrt((lp * lp - m * m) * (lp * lp - n * n));
      dp = (c0 * d0 - cm * dm1) / cp;
    }
    dm1 = d0;
    d0 = dp;
    out.push_back(d0);
  }
}

}  // namespace wigner

/// Spin-weighted spherical harmonic analysis/synthesis on a SphereGrid,
/// for one spin weight s (integer or half-integer) and band limit L.
/// Coefficients are stored per (l, m) with l from max(|s|,|m|) to
/// l_max = L + (1/2 if s is half-integer else 0).
class SwshTransform {
 public:
  SwshTransform(const SphereGrid& grid, double spin, int L)
      : grid_(grid), L_(L), s2_(doubled(spin)) {
    if (L < 1) throw ParameterError("boundary-dirac", "band limit must be >= 1");
    lmax2_ = 2 * L + (half_integer() ? 1 : 0);
    if (std::abs(s2_) > lmax2_)
      throw ResolutionError("boundary-dirac", "band limit too small for spin weight");
    if (grid.n_theta() < L + 1 || grid.n_phi() < 2 * L + 2)
      throw ResolutionError("boundary-dirac", "grid under-resolves the band limit");
    build_tables();
  }

  double spin() const { return 0.5 * s2_; }
  int band_limit() const { return L_; }
  const SphereGrid& grid() const { return grid_; }
  int n_m() const { return lmax2_ + 1; }  // m = -lmax .. lmax in integer steps
  int n_l(int mi) const { return (int)ltab_[mi].size(); }
  double m_value(int mi) const { return 0.5 * (2 * mi - lmax2_); }
  double l_value(int mi, int li) const { return 0.5 * (lmin2(mi) + 2 * li); }
  int n_coeff() const { return (int)offsets_.back(); }
  int coeff_index(int mi, int li) const { return (int)offsets_[mi] + li; }

  std::vector<cplx> analyze(const std::vector<cplx>& values) const {
    const int nth = grid_.n_theta(), nph = grid_.n_phi();
    std::vector<cplx> fm(nth * n_m());
    // phi transform: f_m(theta_i) = (1/Nphi) sum_j f(theta_i,phi_j) e^{-im phi_j}
    for (int i = 0; i < nth; ++i)
      for (int mi = 0; mi < n_m(); ++mi) {
        const double m = m_value(mi);
        cplx acc = 0.0;
        for (int j = 0; j < nph; ++j)
          acc += values[grid_.index(i, j)] *
                 std::polar(1.0, -m * grid_.phi(j));
        fm[i * n_m() + mi] = acc / double(nph);
      }
    std::vector<cplx> a(n_coeff(), cplx(0.0));
    const cplx phase = std::conj(spin_phase());
    for (int mi = 0; mi < n_m(); ++mi)
      for (int li = 0; li < n_l(mi); ++li) {
        cplx acc = 0.0;
        for (int i = 0; i < nth; ++i)
          acc += fm[i * n_m() + mi] * wtheta_norm(i) * dtab_[mi][i * n_l(mi) + li];
        a[coeff_index(mi, li)] = 2.0 * kPi * acc * norm(mi, li) * phase;
      }
    return a;
  }

  std::vector<cplx> synthesize(const std::vector<cplx>& coeffs) const {
    const int nth = grid_.n_theta(), nph = grid_.n_phi();
    std::vector<cplx> hm(nth * n_m(), cplx(0.0));
    for (int mi = 0; mi < n_m(); ++mi)
      for (int i = 0; i < nth; ++i) {
        cplx acc = 0.0;
        for (int li = 0; li < n_l(mi); ++li)
          acc += coeffs[coeff_index(mi, li)] * norm(mi, li) * dtab_[mi][i * n_l(mi) + li];
        hm[i * n_m() + mi] = acc;
      }
    std::vector<cplx> values(grid_.size(), cplx(0.0));
    const cplx phase = spin_phase();
    for (int i = 0; i < nth; ++i)
      for (int j = 0; j < nph; ++j) {
        cplx acc = 0.0;
        for (int mi = 0; mi < n_m(); ++mi)
          acc += hm[i * n_m() + mi] * std::polar(1.0, m_value(mi) * grid_.phi(j));
        values[grid_.index(i, j)] = acc * phase;
      }
    return values;
  }

 private:
  static int doubled(double v) {
    const int d = (int)std::lround(2.0 * v);
    if (std::abs(2.0 * v - d) > 1e-12)
      throw ParameterError("boundary-dirac", "spin weight must be a half-integer");
    return d;
  }
  bool half_integer() const { return (s2_ & 1) != 0; }
  int lmin2(int mi) const {
    const int m2 = 2 * mi - lmax2_;
    return std::max(std::abs(m2), std::abs(s2_));
  }
  cplx spin_phase() const {  // i^{2s}
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((s2_ % 4) + 4) % 4];
  }
  double norm(int mi, int li) const {
    return std::sqrt((2.0 * l_value(mi, li) + 1.0) / (4.0 * kPi));
  }
  double wtheta_norm(int i) const { return grid_.solid_angle_weight(i) * grid_.n_phi() / (2.0 * kPi); }

  void build_tables() {
    const int nth = grid_.n_theta();
    dtab_.resize(n_m());
    ltab_.resize(n_m());
    offsets_.assign(1, 0);
    std::vector<double> col;
    for (int mi = 0; mi < n_m(); ++mi) {
      const int m2 = 2 * mi - lmax2_;
      const int nl = (lmax2_ - lmin2(mi)) / 2 + 1;
      ltab_[mi].resize(nl);
      dtab_[mi].assign(nth * nl, 0.0);
      for (int i = 0; i < nth; ++i) {
        wigner::column(m2, -s2_, lmax2_, grid_.theta(i), col);
        for (int li = 0; li < nl; ++li) dtab_[mi][i * nl + li] = col[li];
      }
      for (int li = 0; li < nl; ++li) ltab_[mi][li] = 0.5 * (lmin2(mi) + 2 * li);
      offsets_.push_back(offsets_.back() + nl);
    }
  }

  const SphereGrid& grid_;
  int L_;
  int s2_;
  int lmax2_;
  std::vector<std::vector<double>> dtab_;  // per m: [theta_i * n_l + l_idx]
  std::vector<std::vector<double>> ltab_;
  std::vector<size_t> offsets_;
};

/// Grid samples of one spin-weighted scalar.
struct SpinWeightedField {
  double spin = 0.0;
  int L = 0;
  std::vector<cplx> values;
};

enum class EthDirection { Raise, Lower };

/// Covariant edth on the unit round sphere, spectrally: analysis, multiply by
/// the raising/lowering eigenvalue, synthesize at spin s +/- 1.
inline SpinWeightedField eth_apply(const SphereGrid& grid, const SpinWeightedField& f,
                                   EthDirection dir) {
  const double s = f.spin;
  const double s_out = s + (dir == EthDirection::Raise ? 1.0 : -1.0);
  SwshTransform in(grid, s, f.L);
  SwshTransform out(grid, s_out, f.L);
  std::vector<cplx> a = in.analyze(f.values);
  std::vector<cplx> b(out.n_coeff(), cplx(0.0));
  for (int mi = 0; mi < out.n_m(); ++mi)
    for (int li = 0; li < out.n_l(mi); ++li) {
      const double l = out.l_value(mi, li);
      const double m = out.m_value(mi);
      // locate (l, m) in the input table
      const double lmin_in = std::max(std::abs(m), std::abs(s));
      if (l < lmin_in - 0.25) continue;
      const int mi_in = mi;  // same m ordering for same lmax
      const int li_in = (int)std::lround(l - lmin_in);
      if (li_in < 0 || li_in >= in.n_l(mi_in)) continue;
      const double factor = (dir == EthDirection::Raise)
                                ? std::sqrt((l - s) * (l + s + 1.0))
                                : -std::sqrt((l + s) * (l - s + 1.0));
      b[out.coeff_index(mi, li)] = factor * a[in.coeff_index(mi_in, li_in)];
    }
  SpinWeightedField g;
  g.spin = s_out;
  g.L = f.L;
  g.values = out.synthesize(b);
  return g;
}

/// Spectral coordinate derivatives of a spin-weighted field on the grid:
/// d/dtheta = -(eth + ethbar)/2 pointwise; d/dphi by the Fourier factor.
inline void spectral_gradient(const SphereGrid& grid, const SpinWeightedField& f,
                              std::vector<cplx>& dtheta, std::vector<cplx>& dphi) {
  SpinWeightedField up = eth_apply(grid, f, EthDirection::Raise);
  SpinWeightedField dn = eth_apply(grid, f, EthDirection::Lower);
  dtheta.resize(grid.size());
  for (int idx = 0; idx < grid.size(); ++idx)
    dtheta[idx] = -0.5 * (up.values[idx] + dn.values[idx]);
  // phi derivative via the half-integer-aware Fourier transform
  SwshTransform t(grid, f.spin, f.L);
  std::vector<cplx> a = t.analyze(f.values);
  for (int mi = 0; mi < t.n_m(); ++mi)
    for (int li = 0; li < t.n_l(mi); ++li)
      a[t.coeff_index(mi, li)] *= cplx(0.0, t.m_value(mi));
  dphi = t.synthesize(a);
}

}  // namespace qlm

#endif
