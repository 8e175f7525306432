#ifndef QLM_SPINOR_HPP
#define QLM_SPINOR_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>

#include "qlm/embedding.hpp"
#include "qlm/errors.hpp"
#include "qlm/surface.hpp"

namespace qlm {

using CMat4 = Eigen::Matrix4cd;
using CVec4 = Eigen::Vector4cd;
using CMat2 = Eigen::Matrix2cd;
using CVec2 = Eigen::Vector2cd;
using Cplx = std::complex<double>;

inline constexpr Cplx kI{0.0, 1.0};

/// Fixed 4x4 Dirac matrices for signature (-+++): gamma0 anti-hermitian,
/// gamma1..gamma3 hermitian,  {ga, gb} = 2 eta_ab.
/// In this representation gamma1*gamma0 = diag(1,1,-1,-1) (chirality split by
/// upper/lower pairs) and i*gamma0 swaps the pairs (its eigenspinors are
/// (u, -u) and (u, u)).
struct GammaRep {
  std::array<CMat4, 4> g;
  CMat4 gamma5;  // i g0 g1 g2 g3; hermitian, squares to +1

  static GammaRep standard() {
    GammaRep r;
    CMat2 id = CMat2::Identity();
    CMat2 s1, s2, s3;
    s1 << 0, 1, 1, 0;
    s2 << 0, -kI, kI, 0;
    s3 << 1, 0, 0, -1;
    auto kron = [](const CMat2& a, const CMat2& b) {
      CMat4 m;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
      return m;
    };
    r.g[0] = kI * kron(s1, id);
    r.g[1] = kron(s2, id);
    r.g[2] = kron(s3, s1);
    r.g[3] = kron(s3, s2);
    r.gamma5 = kI * r.g[0] * r.g[1] * r.g[2] * r.g[3];
    return r;
  }

  /// Same algebra conjugated by a fixed unitary; for convention-leakage tests.
  GammaRep conjugated(const CMat4& U) const {
    GammaRep r;
    const CMat4 Ui = U.adjoint();
    for (int a = 0; a < 4; ++a) r.g[a] = U * g[a] * Ui;
    r.gamma5 = U * gamma5 * Ui;
    return r;
  }

  /// gamma with frame index raised by eta: gamma^0 = -gamma_0, gamma^i = gamma_i.
  CMat4 up(int a) const { return a == 0 ? CMat4(-g[0]) : g[a]; }

  CMat4 sigma_ab(int a, int b) const { return 0.5 * (g[a] * g[b] - g[b] * g[a]); }

  /// Chiral projectors 0.5(1 +- g1 g0) of the normal-space boost plane.
  CMat4 chiral_projector(int sign) const {
    return 0.5 * (CMat4::Identity() + double(sign) * g[1] * g[0]);
  }
  /// SU(2) projectors 0.5(1 +- i g0).
  CMat4 su2_projector(int sign) const {
    return 0.5 * (CMat4::Identity() + double(sign) * kI * g[0]);
  }

  /// Max deviation of {ga, gb} from 2 diag(-1,1,1,1) and of the hermiticity
  /// pattern; zero for any valid representation.
  double clifford_residual() const {
    double dev = 0.0;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const double eta = (a == b) ? (a == 0 ? -1.0 : 1.0) : 0.0;
        CMat4 ac = g[a] * g[b] + g[b] * g[a] - 2.0 * eta * CMat4::Identity();
        dev = std::max(dev, ac.cwiseAbs().maxCoeff());
      }
      const CMat4 h = (a == 0) ? CMat4(g[0] + g[0].adjoint())
                               : CMat4(g[a] - g[a].adjoint());
      dev = std::max(dev, h.cwiseAbs().maxCoeff());
    }
    return dev;
  }
};

/// Future-pointing Dirac current in frame components:
///   xi^a = psi^dag g0 gamma^a psi,   xi^0 = |psi|^2.
inline Vec4 dirac_current(const GammaRep& G, const CVec4& psi) {
  Vec4 xi;
  for (int a = 0; a < 4; ++a)
    xi[a] = (psi.adjoint() * G.g[0] * G.up(a) * psi)(0, 0).real();
  return xi;
}

/// Minkowski frame inner product eta_ab u^a v^b (complex-bilinear).
template <class VA, class VB>
auto frame_dot(const VA& u, const VB& v) {
  return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
}

/// Spin lift of the frame rotation/boost in the (a, b) plane:
///   exp(-(angle/2) ga gb),
/// so that U gamma(v) U^-1 = gamma(R v) for R rotating e_a toward e_b.
inline CMat4 rotation_lift(const GammaRep& G, int a, int b, double angle) {
  const CMat4 Q = G.g[a] * G.g[b];
  const double q2 = (Q * Q)(0, 0).real();  // +1 boost plane, -1 rotation plane
  if (q2 < 0.0)
    return std::cos(0.5 * angle) * CMat4::Identity() - std::sin(0.5 * angle) * Q;
  return std::cosh(0.5 * angle) * CMat4::Identity() - std::sinh(0.5 * angle) * Q;
}

/// Spinor connection term: with omega_{a bc} = g(e_b, D_a e_c) this is
///   M_a = 1/4 omega_a^{bc} gamma_b gamma_c,
/// and frame components of a covariantly constant spinor obey
///   d_a psi + M_a psi = 0.
inline CMat4 spinor_connection(const GammaRep& G, const FrameConnection& om, int a) {
  CMat4 M = CMat4::Zero();
  for (int b = 0; b < 4; ++b) {
    for (int c = 0; c < 4; ++c) {
      const double up = (b == 0 ? -1.0 : 1.0) * (c == 0 ? -1.0 : 1.0);
      M += 0.25 * up * om.om[a][b][c] * G.g[b] * G.g[c];
    }
  }
  return M;
}

/// The constant spinor of the Euclidean embedding hyperplane, aligned so its
/// Dirac current is the unit time normal, expressed per node in the adapted
/// frame (e0 = t-hat, e1 = outward normal, e2 = theta-hat, e3 = phi-hat) of
/// the embedded surface of revolution.
class AlignedParallelSpinor {
 public:
  AlignedParallelSpinor(const GammaRep& G, const AxisymmetricEmbedding& emb)
      : G_(G), emb_(&emb) {
    psi_glob_ << 1.0, 0.0, -1.0, 0.0;
    psi_glob_ /= std::sqrt(2.0);
  }

  /// Cartesian-frame value: eigenspinor of i g0 with xi = (1,0,0,0).
  const CVec4& global_value() const { return psi_glob_; }

  /// Meridian tilt: the outward normal is (cos a cos ph, cos a sin ph, -sin a)
  /// with sin a = rho'/sqrt(f), cos a = z'/sqrt(f).
  double alpha(double th) const {
    return std::atan2(emb_->drho(th), emb_->zprime(th));
  }

  /// Spin lift of the rotation taking the fixed Cartesian triad to the local
  /// (normal, theta-hat, phi-hat) triad.
  CMat4 frame_rotation_lift(double th, double ph) const {
    // ambient axes are carried by (g1, g3, g2) = (x, y, z); the frame is the
    // proper rotation R_z(ph) R_y(alpha) in these axes
    const CMat4 Uy = rotation_lift(G_, 2, 1, alpha(th));  // x toward -z plane
    const CMat4 Uz = rotation_lift(G_, 1, 3, ph);         // x toward y plane
    return Uz * Uy;
  }

  /// Components in the local adapted frame.
  CVec4 frame_value(double th, double ph) const {
    return frame_rotation_lift(th, ph).adjoint() * psi_glob_;
  }

 private:
  GammaRep G_;
  const AxisymmetricEmbedding* emb_;
  CVec4 psi_glob_;
};

/// Frame connection of the embedded surface of revolution, in the same
/// adapted frame as AlignedParallelSpinor (flat ambient space, so e0 is
/// constant); index a = 2, 3 labels the unit tangent directions.
inline FrameConnection embedded_frame_connection(const AxisymmetricEmbedding& emb,
                                                 double th) {
  // d_th n = -a' e2, d_th e2 = a' n, d_ph n = cos(a) e3,
  // d_ph e2 = sin(a) e3, d_ph e3 = -cos(a) n - sin(a) e2
  FrameConnection fc{};
  const double f = emb.profile().f(th);
  const double rp = emb.drho(th), zp = emb.zprime(th);
  const double ca = zp / std::sqrt(f), sa = rp / std::sqrt(f);
  const double h = fd::theta_step(th);
  const double ap = fd::deriv1(
      [&](int i) {
        const double t = th + i * h;
        return std::atan2(emb.drho(t), emb.zprime(t));
      },
      h);
  const double inv_sf = 1.0 / std::sqrt(f);
  const double inv_rho = 1.0 / emb.rho(th);
  // om[a][b][c] = g(e_b, D_a e_c) along the unit tangents, matching the
  // Surface convention
  fc.om[0][1][2] = ap * inv_sf;
  fc.om[0][2][1] = -ap * inv_sf;
  fc.om[1][1][3] = -ca * inv_rho;
  fc.om[1][3][1] = ca * inv_rho;
  fc.om[1][2][3] = -sa * inv_rho;
  fc.om[1][3][2] = sa * inv_rho;
  return fc;
}

/// Mean-curvature spin basis: o = (1,0), iota = (0,1) in the adapted frame,
/// with the soldering fixed so that
///   l+ = iota iobar = (Hperp-hat + H-hat)/sqrt(2),  l- = o obar,
///   m  = pair(iota, o) = (e2 + i e3)/sqrt(2).
struct SpinBasis {
  CVec2 o, i;
  Vec4 hperp, hhat;          // ambient frame legs
  Vec4 e2, e3;               // tangential legs
  CVec4 lplus, lminus, m, mbar;  // ambient null frame
};

/// epsilon contraction o_A iota^A (normalization is +1 for the standard pair)
inline Cplx eps_contract(const CVec2& a, const CVec2& b) {
  return a[0] * b[1] - a[1] * b[0];
}

/// Null vector of a single 2-spinor, frame components (e0, e1, e2, e3).
inline Vec4 null_vector_of(const CVec2& k) {
  const double n0 = std::norm(k[0]), n1 = std::norm(k[1]);
  const Cplx cr = k[0] * std::conj(k[1]);
  return Vec4(n0 + n1, n1 - n0, 2.0 * cr.real(), 2.0 * cr.imag()) / std::sqrt(2.0);
}

/// Complex frame vector of a 2-spinor pair (second argument conjugated).
inline CVec4 pair_vector(const CVec2& k, const CVec2& l) {
  const Cplx a = k[0] * std::conj(l[0]), b = k[1] * std::conj(l[1]);
  const Cplx c = k[0] * std::conj(l[1]), d = k[1] * std::conj(l[0]);
  CVec4 v;
  v << a + b, b - a, c + d, -kI * (c - d);
  return v / std::sqrt(2.0);
}

inline SpinBasis spin_basis_from_frame(const Surface& surf, const PointGeometry& p) {
  const MeanCurvatureFrame f = surf.mc_frame_at(p);
  SpinBasis sb;
  sb.o << 1.0, 0.0;
  sb.i << 0.0, 1.0;
  sb.hperp = f.hperp;
  sb.hhat = f.hhat;
  sb.e2 = p.e[2];
  sb.e3 = p.e[3];
  const double r2 = std::sqrt(2.0);
  sb.lplus = ((f.hperp + f.hhat) / r2).cast<Cplx>();
  sb.lminus = ((f.hperp - f.hhat) / r2).cast<Cplx>();
  sb.m = (p.e[2].cast<Cplx>() + kI * p.e[3].cast<Cplx>()) / r2;
  sb.mbar = sb.m.conjugate();
  return sb;
}

/// Newman-Penrose scalars of the mean-curvature null frame, from covariant
/// derivatives of the null legs along m, mbar.
struct NPScalars {
  Cplx rho, mu, beta, betap;
  double kappa_perp;
};

inline NPScalars np_scalars(const Surface& surf, double th, double ph) {
  const PointGeometry p = surf.point(th, ph);
  const MeanCurvatureFrame f0 = surf.mc_frame_at(p);
  const double r2 = std::sqrt(2.0);

  auto lp_field = [&](double t, double q) {
    const PointGeometry pg = surf.point(t, q);
    const MeanCurvatureFrame f = surf.mc_frame_at(pg);
    return Vec4((f.hperp + f.hhat) / r2);
  };
  auto lm_field = [&](double t, double q) {
    const PointGeometry pg = surf.point(t, q);
    const MeanCurvatureFrame f = surf.mc_frame_at(pg);
    return Vec4((f.hperp - f.hhat) / r2);
  };

  std::array<CVec4, 2> dlp, dlm;  // tangential covariant derivatives
  for (int a = 0; a < 2; ++a) {
    dlp[a] = surf.tangential_cov_deriv_at(lp_field, p, a).cast<Cplx>();
    dlm[a] = surf.tangential_cov_deriv_at(lm_field, p, a).cast<Cplx>();
  }
  const CVec4 dm_lp = (dlp[0] + kI * dlp[1]) / r2;
  const CVec4 dmb_lp = (dlp[0] - kI * dlp[1]) / r2;
  const CVec4 dm_lm = (dlm[0] + kI * dlm[1]) / r2;
  const CVec4 dmb_lm = (dlm[0] - kI * dlm[1]) / r2;

  const Met4 g = p.g;
  const CVec4 m = (p.e[2].cast<Cplx>() + kI * p.e[3].cast<Cplx>()) / r2;
  const CVec4 mb = m.conjugate();
  const CVec4 lp = ((f0.hperp + f0.hhat) / r2).cast<Cplx>();
  const CVec4 lm = ((f0.hperp - f0.hhat) / r2).cast<Cplx>();
  auto dot = [&g](const CVec4& u, const CVec4& v) {
    Cplx s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += u[i] * g(i, j) * v[j];
    return s;
  };

  NPScalars np;
  np.rho = 2.0 * dot(m, dmb_lp);
  np.mu = -2.0 * dot(mb, dm_lm);
  np.beta = 0.5 * dot(lm, dm_lp);
  np.betap = 0.5 * dot(lp, dmb_lm);
  np.kappa_perp = p.normH / r2;
  return np;
}

/// 2-spinor pieces (lambda_A, mu^{A'}) of a Dirac 4-spinor in the adapted
/// frame; dictionary fixed so that
///   dirac_current(psi) = null_vector_of(lambda) + null_vector_of(conj(mu))
/// and the Majorana condition mu = conj(lambda) matches psi = g2 psi*.
struct TwoSpinorSplit {
  CVec2 lambda, mu;
};

inline TwoSpinorSplit two_spinor_split(const CVec4& psi) {
  const double c = std::pow(2.0, 0.25);
  TwoSpinorSplit s;
  s.lambda << c * psi[1], -kI * c * psi[2];
  s.mu << c * psi[0], -kI * c * psi[3];
  return s;
}

inline CVec4 two_spinor_assemble(const TwoSpinorSplit& s) {
  const double c = std::pow(2.0, -0.25);
  CVec4 psi;
  psi << c * s.mu[0], c * s.lambda[0], kI * c * s.lambda[1], kI * c * s.mu[1];
  return psi;
}

/// Antilinear Majorana conjugation psi -> g2 psi* (g2 is the real spatial
/// gamma in the standard representation; B Bbar = 1).
inline CVec4 majorana_conjugate(const GammaRep& G, const CVec4& psi) {
  return G.g[2] * psi.conjugate();
}

inline bool majorana_check(const GammaRep& G, const CVec4& psi, double tol = 1e-12) {
  return (psi - majorana_conjugate(G, psi)).norm() <= tol * std::max(1.0, psi.norm());
}

}  // namespace qlm

#endif
