#ifndef QLM_BOUNDARY_HPP
#define QLM_BOUNDARY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "qlm/errors.hpp"
#include "qlm/grid.hpp"
#include "qlm/spinor.hpp"
#include "qlm/surface.hpp"
#include "qlm/swsh.hpp"

namespace qlm {

/// Adapted-frame spinor components on a sphere grid.  Under a rotation of the
/// tangential dyad the components pick up half-angle phases, so they are
/// spin-weight +-1/2 fields in alternating order.
struct SpinorGridField {
  int L = 0;
  std::array<std::vector<Cplx>, 4> comp;

  static constexpr std::array<double, 4> spin_weight = {-0.5, 0.5, -0.5, 0.5};

  CVec4 at(int idx) const {
    CVec4 v;
    for (int c = 0; c < 4; ++c) v[c] = comp[c][idx];
    return v;
  }
  void set(int idx, const CVec4& v) {
    for (int c = 0; c < 4; ++c) comp[c][idx] = v[c];
  }
  void resize(int L_, int n) {
    L = L_;
    for (auto& v : comp) v.assign(n, Cplx(0.0));
  }
};

/// Sample a pointwise spinor-valued function onto the surface grid.
template <class F>
SpinorGridField sample_spinor_field(const SphereGrid& grid, int L, F&& fn) {
  SpinorGridField f;
  f.resize(L, grid.size());
  for (int i = 0; i < grid.n_theta(); ++i)
    for (int k = 0; k < grid.n_phi(); ++k) {
      const CVec4 v = fn(grid.theta(i), grid.phi(k));
      f.set(grid.index(i, k), v);
    }
  return f;
}

enum class FrameKind { Slice, MeanCurvature };
enum class BoundaryOp {
  FullDirac,      // gamma^abar (d + full spin connection): Dirac operator of S in M
  IntrinsicFlux,  // g1 gamma^abar (d + intrinsic connection): b-Dslash
  CovariantFlux,  // b-Dslash + twist term: covariant edth-flux operator
};

/// Per-node boundary operator assembly in a chosen normal frame.  For
/// FrameKind::MeanCurvature the connection and twist are those of the boosted
/// frame (e0 = Hperp-hat, e1 = H-hat), and spinor components are understood
/// in that frame; CovariantFlux is then the hatted operator.
class BoundaryOperators {
 public:
  BoundaryOperators(const Surface& surf, const GammaRep& G, FrameKind kind)
      : surf_(surf), G_(G), kind_(kind), grid_(surf.grid()) {
    const auto& pts = surf.nodes();
    const auto& conn = surf.connections();
    nodes_.resize(pts.size());
    const bool mc = (kind == FrameKind::MeanCurvature);
    const std::vector<MeanCurvatureFrame>* mcd =
        mc ? &surf.mean_curvature_data() : nullptr;
    for (size_t n = 0; n < pts.size(); ++n) {
      Node& nd = nodes_[n];
      const PointGeometry& p = pts[n];
      nd.c2 = p.c2;
      nd.c3 = p.c3;
      // extrinsic curvature traces in this frame: the boost to the
      // mean-curvature frame sends (kappa0, kappa1) -> (0, |H|)
      nd.kappa0 = mc ? 0.0 : p.kappa0;
      nd.kappa1 = mc ? p.normH : p.kappa1;
      nd.normH = p.normH;
      if (!mc) {
        nd.conn = conn[n];
        // twist of the slice frame: g(e1, D_a e0)
        nd.twist = {conn[n].om[0][1][0], conn[n].om[1][1][0]};
      } else {
        const MeanCurvatureFrame& f = (*mcd)[n];
        nd.twist = {f.twist[0], f.twist[1]};
        // rapidity of the (e0,e1) -> (hperp,hhat) boost: hhat has a -kappa0
        // component along e0, so it is minus the stored frame parameter
        nd.conn = boosted_connection(p, conn[n], -f.lambda);
      }
    }
  }

  const Surface& surface() const { return surf_; }
  const GammaRep& gamma() const { return G_; }
  FrameKind kind() const { return kind_; }

  /// Boost rapidity from the slice frame to this operator frame at a node.
  double lambda_at(int idx) const {
    const PointGeometry& p = surf_.nodes()[idx];
    return (kind_ == FrameKind::MeanCurvature) ? -std::atanh(p.kappa0 / p.kappa1)
                                               : 0.0;
  }

  /// Spin lift of the slice -> operator-frame boost at a node: components in
  /// this frame are U psi_slice.  Identity for the slice frame.
  CMat4 boost_lift(int idx) const {
    const double h = 0.5 * lambda_at(idx);
    return CMat4(std::cosh(h) * CMat4::Identity() -
                 std::sinh(h) * (G_.g[0] * G_.g[1]));
  }

  SpinorGridField apply(BoundaryOp op, const SpinorGridField& psi) const {
    if ((int)psi.comp[0].size() != grid_.size())
      throw FrameError("boundary-dirac", "spinor field does not match the grid");
    // spectral theta/phi derivatives per component
    std::array<std::vector<Cplx>, 4> dth, dph;
    for (int c = 0; c < 4; ++c) {
      SpinWeightedField f{SpinorGridField::spin_weight[c], psi.L, psi.comp[c]};
      spectral_gradient(grid_, f, dth[c], dph[c]);
    }

    SpinorGridField out;
    out.resize(psi.L, grid_.size());
    for (int idx = 0; idx < grid_.size(); ++idx) {
      const Node& nd = nodes_[idx];
      const CVec4 v = psi.at(idx);
      CVec4 res = CVec4::Zero();
      for (int a = 0; a < 2; ++a) {
        const auto& cf = (a == 0) ? nd.c2 : nd.c3;
        CVec4 d;
        for (int c = 0; c < 4; ++c)
          d[c] = cf[0] * dth[c][idx] + cf[1] * dph[c][idx];
        d += connection_term(op, nd, a) * v;
        if (op == BoundaryOp::FullDirac)
          res += G_.g[2 + a] * d;
        else
          res += G_.g[1] * G_.g[2 + a] * d;
      }
      out.set(idx, res);
    }
    return out;
  }

  /// Tangential flux density F = psi^dag (flux op) psi + c.c.; the covariant
  /// variant includes the twist term of the frame.
  std::vector<double> flux_density(const SpinorGridField& psi, bool covariant) const {
    const SpinorGridField im =
        apply(covariant ? BoundaryOp::CovariantFlux : BoundaryOp::IntrinsicFlux, psi);
    std::vector<double> f(grid_.size());
    for (int idx = 0; idx < grid_.size(); ++idx)
      f[idx] = 2.0 * (psi.at(idx).adjoint() * im.at(idx))(0, 0).real();
    return f;
  }

  /// Integral of a pointwise density over the surface measure dS.
  double integrate_density(const std::vector<double>& d) const {
    return grid_.integrate([&](int idx) {
      return d[idx] * surf_.area_density(idx / grid_.n_phi());
    });
  }

  /// Sen-Witten surface term: density psi^dag (hatted flux op) psi + c.c.
  /// + |H| |psi|^2; requires the mean-curvature frame.
  std::vector<double> senwitten_density(const SpinorGridField& psi) const {
    require_mc("senwitten_density");
    std::vector<double> d = flux_density(psi, true);
    for (int idx = 0; idx < grid_.size(); ++idx)
      d[idx] += nodes_[idx].normH * psi.at(idx).squaredNorm();
    return d;
  }

  /// Chiral decomposition of the Sen-Witten surface term:
  ///   2 psi+^dag (flux op) psi-  + c.c. + |H| (|psi+|^2 + |psi-|^2).
  std::vector<double> chiral_density(const SpinorGridField& psi) const {
    require_mc("chiral_density");
    const CMat4 Pp = G_.chiral_projector(+1), Pm = G_.chiral_projector(-1);
    SpinorGridField minus;
    minus.resize(psi.L, grid_.size());
    for (int idx = 0; idx < grid_.size(); ++idx) minus.set(idx, Pm * psi.at(idx));
    const SpinorGridField im = apply(BoundaryOp::CovariantFlux, minus);
    std::vector<double> d(grid_.size());
    for (int idx = 0; idx < grid_.size(); ++idx) {
      const CVec4 v = psi.at(idx);
      const CVec4 vp = Pp * v, vm = Pm * v;
      d[idx] = 4.0 * (vp.adjoint() * im.at(idx))(0, 0).real() +
               nodes_[idx].normH * (vp.squaredNorm() + vm.squaredNorm());
    }
    return d;
  }

  double kappa_perp_at(int idx) const { return nodes_[idx].normH / std::sqrt(2.0); }
  double normH_at(int idx) const { return nodes_[idx].normH; }
  double kappa0_at(int idx) const { return nodes_[idx].kappa0; }
  double kappa1_at(int idx) const { return nodes_[idx].kappa1; }
  std::array<double, 2> twist_at(int idx) const { return nodes_[idx].twist; }

 private:
  struct Node {
    std::array<double, 2> c2{}, c3{};
    FrameConnection conn;
    std::array<double, 2> twist{};
    double kappa0 = 0, kappa1 = 0, normH = 0;
  };

  void require_mc(const char* what) const {
    if (kind_ != FrameKind::MeanCurvature)
      throw FrameError("boundary-dirac",
                       std::string(what) + " needs the mean-curvature frame");
  }

  CMat4 connection_term(BoundaryOp op, const Node& nd, int a) const {
    if (op == BoundaryOp::FullDirac) return spinor_connection(G_, nd.conn, a);
    // intrinsic part: only the tangential-dyad rotation
    FrameConnection intr{};
    intr.om[a][2][3] = nd.conn.om[a][2][3];
    intr.om[a][3][2] = nd.conn.om[a][3][2];
    CMat4 M = spinor_connection(G_, intr, a);
    if (op == BoundaryOp::CovariantFlux)
      M -= 0.5 * nd.twist[a] * G_.g[1] * G_.g[0];
    return M;
  }

  /// Connection of the frame boosted by rapidity lambda in the (e0, e1)
  /// plane, with lambda varying over the surface.
  FrameConnection boosted_connection(const PointGeometry& p,
                                     const FrameConnection& om, double lam) const {
    Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
    Eigen::Matrix4d dL = Eigen::Matrix4d::Zero();
    const double ch = std::cosh(lam), sh = std::sinh(lam);
    L(0, 0) = L(1, 1) = ch;
    L(0, 1) = L(1, 0) = sh;
    dL(0, 0) = dL(1, 1) = sh;
    dL(0, 1) = dL(1, 0) = ch;
    const Eigen::Vector4d eta(-1, 1, 1, 1);

    // tangential derivatives of the boost rapidity
    std::array<double, 2> dlam{};
    {
      auto lam_fn = [&](double t, double q) {
        const PointGeometry pg = surf_.point(t, q);
        return -std::atanh(pg.kappa0 / pg.kappa1);
      };
      const double hth = fd::theta_step(p.th), hph = 2.5e-3;
      const double lth =
          fd::deriv1([&](int i) { return lam_fn(p.th + i * hth, p.ph); }, hth);
      const double lph =
          fd::deriv1([&](int i) { return lam_fn(p.th, p.ph + i * hph); }, hph);
      dlam[0] = p.c2[0] * lth + p.c2[1] * lph;
      dlam[1] = p.c3[0] * lth + p.c3[1] * lph;
    }

    FrameConnection out{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          double s = 0.0;
          for (int pq = 0; pq < 4; ++pq)
            for (int q = 0; q < 4; ++q)
              s += L(b, pq) * L(c, q) * om.om[a][pq][q];
          for (int q = 0; q < 4; ++q) s += dlam[a] * dL(c, q) * L(b, q) * eta[q];
          out.om[a][b][c] = s;
        }
    return out;
  }

  const Surface& surf_;
  GammaRep G_;
  FrameKind kind_;
  const SphereGrid& grid_;
  std::vector<Node> nodes_;
};

/// Geometric edth on a general induced metric: eth f = -(D_2 + i D_3) f,
/// ethbar f = -(D_2 - i D_3) f with D_a f = d_a f - i s A_a f and
/// A_a = om[a][2][3] the tangential-dyad connection.  Reduces to the spectral
/// operator on the round sphere.
inline std::vector<Cplx> geometric_eth(const Surface& surf, const SpinWeightedField& f,
                                       EthDirection dir) {
  const SphereGrid& grid = surf.grid();
  std::vector<Cplx> dth, dph;
  spectral_gradient(grid, f, dth, dph);
  const auto& conn = surf.connections();
  const auto& pts = surf.nodes();
  const double sgn = (dir == EthDirection::Raise) ? 1.0 : -1.0;
  std::vector<Cplx> out(grid.size());
  for (int idx = 0; idx < grid.size(); ++idx) {
    const PointGeometry& p = pts[idx];
    const Cplx d2 = p.c2[0] * dth[idx] + p.c2[1] * dph[idx];
    const Cplx d3 = p.c3[0] * dth[idx] + p.c3[1] * dph[idx];
    const Cplx A2 = conn[idx].om[0][2][3], A3 = conn[idx].om[1][2][3];
    const Cplx cov2 = d2 - kI * f.spin * A2 * f.values[idx];
    const Cplx cov3 = d3 - kI * f.spin * A3 * f.values[idx];
    out[idx] = -(cov2 + sgn * kI * cov3);
  }
  return out;
}

/// The tangential flux operator acts block-diagonally on the 2-spinor pieces:
/// with A = lambda0 (weight +1/2), B = lambda1 (weight -1/2) and
/// P = mu0 (weight -1/2), Q = mu1 (weight +1/2),
///   (b-Dslash psi) corresponds to (A,B) -> -(ethbar A, eth B) crossed, so the
/// boundary Witten equation b-Dslash psi = -1/2 |H| psi reads
///   eth B + 1/2 |H| A = 0,   ethbar A - 1/2 |H| B = 0
/// (and the mirrored system for P, Q).
struct TwoSpinorFields {
  SpinWeightedField A{0.5, 0, {}}, B{-0.5, 0, {}};  // lambda components
  SpinWeightedField P{-0.5, 0, {}}, Q{0.5, 0, {}};  // mu components
};

inline TwoSpinorFields two_spinor_fields(const SpinorGridField& psi) {
  TwoSpinorFields f;
  const int n = (int)psi.comp[0].size();
  for (auto* p : {&f.A, &f.B, &f.P, &f.Q}) {
    p->L = psi.L;
    p->values.resize(n);
  }
  for (int idx = 0; idx < n; ++idx) {
    const TwoSpinorSplit s = two_spinor_split(psi.at(idx));
    f.A.values[idx] = s.lambda[0];
    f.B.values[idx] = s.lambda[1];
    f.P.values[idx] = s.mu[0];
    f.Q.values[idx] = s.mu[1];
  }
  return f;
}

/// Residuals of the 2-spinor boundary Witten system for the lambda piece,
/// with the per-node curvature coefficient kappa = 1/2 |H| (or the embedded
/// Euclidean value 1/2 H_flat).
struct NpWittenResidual {
  std::vector<Cplx> first, second;
  double sup = 0.0;
};

inline NpWittenResidual boundary_witten_np(const Surface& surf,
                                           const SpinorGridField& psi,
                                           const std::vector<double>& kappa) {
  const TwoSpinorFields f = two_spinor_fields(psi);
  const std::vector<Cplx> ethB = geometric_eth(surf, f.B, EthDirection::Raise);
  const std::vector<Cplx> ethbA = geometric_eth(surf, f.A, EthDirection::Lower);
  NpWittenResidual r;
  const int n = (int)f.A.values.size();
  r.first.resize(n);
  r.second.resize(n);
  for (int idx = 0; idx < n; ++idx) {
    r.first[idx] = ethB[idx] + kappa[idx] * f.A.values[idx];
    r.second[idx] = ethbA[idx] - kappa[idx] * f.B.values[idx];
    r.sup = std::max({r.sup, std::abs(r.first[idx]), std::abs(r.second[idx])});
  }
  return r;
}

/// Sen-Witten surface density assembled purely from 2-spinor data:
///   { conj(A) eth-hat B - conj(B) ethbar-hat A
///     + conj(P) ethbar-hat Q - conj(Q) eth-hat P + c.c.
///     + |H| (|A|^2 + |B|^2 + |P|^2 + |Q|^2) } / sqrt(2)
/// where the hatted eth carries the twist of the mean-curvature frame as a
/// U(1) potential.  Pointwise equal to the 4-spinor Sen-Witten density.
inline std::vector<double> senwitten_density_2spinor(const Surface& surf,
                                                     const SpinorGridField& psi) {
  const SphereGrid& grid = surf.grid();
  const TwoSpinorFields f = two_spinor_fields(psi);
  const std::vector<Cplx> ethB = geometric_eth(surf, f.B, EthDirection::Raise);
  const std::vector<Cplx> ethbA = geometric_eth(surf, f.A, EthDirection::Lower);
  const std::vector<Cplx> ethbQ = geometric_eth(surf, f.Q, EthDirection::Lower);
  const std::vector<Cplx> ethP = geometric_eth(surf, f.P, EthDirection::Raise);
  const auto& mcd = surf.mean_curvature_data();
  const auto& pts = surf.nodes();
  std::vector<double> d(grid.size());
  for (int idx = 0; idx < grid.size(); ++idx) {
    const Cplx w(mcd[idx].twist[0], mcd[idx].twist[1]);  // w2 + i w3
    const Cplx A = f.A.values[idx], B = f.B.values[idx];
    const Cplx P = f.P.values[idx], Q = f.Q.values[idx];
    const Cplx hB = ethB[idx] - 0.5 * w * B;              // comp with +w coupling
    const Cplx hA = ethbA[idx] + 0.5 * std::conj(w) * A;  // comp with -w coupling
    const Cplx hQ = ethbQ[idx] - 0.5 * std::conj(w) * Q;
    const Cplx hP = ethP[idx] + 0.5 * w * P;
    const double flux = 2.0 * (std::conj(A) * hB).real() -
                        2.0 * (std::conj(B) * hA).real() +
                        2.0 * (std::conj(P) * hQ).real() -
                        2.0 * (std::conj(Q) * hP).real();
    const double norm2 = std::norm(A) + std::norm(B) + std::norm(P) + std::norm(Q);
    d[idx] = (flux + pts[idx].normH * norm2) / std::sqrt(2.0);
  }
  return d;
}

/// Random band-limited spinor field (for operator identity tests).
template <class Rng>
SpinorGridField random_spinor_field(const SphereGrid& grid, int L, int Lband, Rng& rng) {
  std::normal_distribution<double> nd;
  SpinorGridField f;
  f.resize(L, grid.size());
  for (int c = 0; c < 4; ++c) {
    SwshTransform t(grid, SpinorGridField::spin_weight[c], L);
    std::vector<Cplx> a(t.n_coeff(), Cplx(0.0));
    for (int mi = 0; mi < t.n_m(); ++mi)
      for (int li = 0; li < t.n_l(mi); ++li) {
        const double l = t.l_value(mi, li);
        if (l <= Lband) a[t.coeff_index(mi, li)] = Cplx(nd(rng), nd(rng));
      }
    f.comp[c] = t.synthesize(a);
  }
  return f;
}

}  // namespace qlm

#endif
