#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "qlm/spinor.hpp"

using namespace qlm;
using Catch::Approx;

namespace {

std::mt19937 rng(42);

CVec4 random_spinor() {
  std::normal_distribution<double> nd;
  CVec4 v;
  for (int i = 0; i < 4; ++i) v[i] = Cplx(nd(rng), nd(rng));
  return v;
}

CMat4 random_unitary() {
  std::normal_distribution<double> nd;
  CMat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = Cplx(nd(rng), nd(rng));
  return Eigen::HouseholderQR<CMat4>(a).householderQ();
}

}  // namespace

TEST_CASE("gamma algebra invariants", "[spinor]") {
  GammaRep G = GammaRep::standard();
  CHECK(G.clifford_residual() == 0.0);

  CHECK((G.g[0] * G.g[0] + G.g[0] * G.g[0] + 2.0 * CMat4::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((G.g[1] * G.g[2] + G.g[2] * G.g[1]).cwiseAbs().maxCoeff() == 0.0);

  CHECK((G.gamma5 - G.gamma5.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((G.gamma5 * G.gamma5 - CMat4::Identity()).cwiseAbs().maxCoeff() == 0.0);
  for (int a = 0; a < 4; ++a)
    CHECK((G.gamma5 * G.g[a] + G.g[a] * G.gamma5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("chiral projector algebra is matrix-exact", "[spinor]") {
  GammaRep G = GammaRep::standard();
  const CMat4 Pp = G.chiral_projector(+1), Pm = G.chiral_projector(-1);

  CHECK((Pp * Pp - Pp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pm * Pm - Pm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp * Pm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp - Pp.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp + Pm - CMat4::Identity()).cwiseAbs().maxCoeff() == 0.0);

  // swap rules across the normal-plane gammas, commute with tangential ones
  CHECK((Pp * G.g[1] - G.g[1] * Pm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp * G.g[0] - G.g[0] * Pm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp * G.g[2] - G.g[2] * Pp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp * G.g[3] - G.g[3] * Pp).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("SU(2) projector algebra is matrix-exact", "[spinor]") {
  GammaRep G = GammaRep::standard();
  const CMat4 Pp = G.su2_projector(+1), Pm = G.su2_projector(-1);

  CHECK((Pp * Pp - Pp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp * Pm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((Pp * G.g[0] - G.g[0] * Pp).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 1; i < 4; ++i)
    CHECK((Pp * G.g[i] - G.g[i] * Pm).cwiseAbs().maxCoeff() == 0.0);

  const CVec4 psi = random_spinor();
  CHECK((Pp * psi + Pm * psi - psi).norm() < 1e-15 * psi.norm());
}

TEST_CASE("Dirac current basics", "[spinor]") {
  GammaRep G = GammaRep::standard();

  for (int k = 0; k < 5; ++k) {
    const CVec4 psi = random_spinor();
    const Vec4 xi = dirac_current(G, psi);
    CHECK(xi[0] == Approx(psi.squaredNorm()).epsilon(1e-13));
    CHECK(frame_dot(xi, xi) < 0.0);  // timelike

    const Cplx c(0.3, -1.2);
    const Vec4 xic = dirac_current(G, CVec4(c * psi));
    CHECK((xic - std::norm(c) * xi).norm() < 1e-12 * xi.norm());
  }

  // SU(2)-projected spinor: purely time-directed current
  const CVec4 chi = G.su2_projector(+1) * random_spinor();
  const Vec4 xi = dirac_current(G, chi);
  CHECK(std::abs(xi[1]) < 1e-12 * xi[0]);
  CHECK(std::abs(xi[2]) < 1e-12 * xi[0]);
  CHECK(std::abs(xi[3]) < 1e-12 * xi[0]);
}

TEST_CASE("spin lifts implement frame rotations and boosts on the current",
          "[spinor]") {
  GammaRep G = GammaRep::standard();
  const CVec4 psi = random_spinor();
  const Vec4 xi = dirac_current(G, psi);

  const double b = 0.8;
  // rotation e2 -> e3 plane
  {
    const CMat4 U = rotation_lift(G, 2, 3, b);
    CHECK((U * U.adjoint() - CMat4::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    const Vec4 xr = dirac_current(G, CVec4(U * psi));
    CHECK(xr[0] == Approx(xi[0]).margin(1e-12));
    CHECK(xr[1] == Approx(xi[1]).margin(1e-12));
    CHECK(xr[2] == Approx(std::cos(b) * xi[2] - std::sin(b) * xi[3]).margin(1e-12));
    CHECK(xr[3] == Approx(std::sin(b) * xi[2] + std::cos(b) * xi[3]).margin(1e-12));
  }
  // boost in the e0-e1 plane
  {
    const CMat4 U = rotation_lift(G, 0, 1, b);
    const Vec4 xr = dirac_current(G, CVec4(U * psi));
    CHECK(xr[0] == Approx(std::cosh(b) * xi[0] - std::sinh(b) * xi[1]).margin(1e-11));
    CHECK(xr[1] == Approx(std::cosh(b) * xi[1] - std::sinh(b) * xi[0]).margin(1e-11));
    CHECK(xr[2] == Approx(xi[2]).margin(1e-12));
    CHECK(xr[3] == Approx(xi[3]).margin(1e-12));
    // boosted current keeps its Minkowski norm
    CHECK(frame_dot(xr, xr) == Approx(frame_dot(xi, xi)).epsilon(1e-12));
  }
}

TEST_CASE("representation independence under unitary conjugation", "[spinor]") {
  GammaRep G = GammaRep::standard();
  const CMat4 U = random_unitary();
  GammaRep H = G.conjugated(U);

  CHECK(H.clifford_residual() < 1e-13);
  for (int k = 0; k < 3; ++k) {
    const CVec4 psi = random_spinor();
    const Vec4 a = dirac_current(G, psi);
    const Vec4 b = dirac_current(H, CVec4(U * psi));
    CHECK((a - b).norm() < 1e-12 * a.norm());
  }
  // projector ranks are representation-invariant
  for (int s : {-1, 1}) {
    CHECK(H.chiral_projector(s).trace().real() == Approx(2.0).margin(1e-12));
    CHECK(H.su2_projector(s).trace().real() == Approx(2.0).margin(1e-12));
  }
}

TEST_CASE("aligned parallel spinor on the embedded sphere", "[spinor]") {
  GammaRep G = GammaRep::standard();
  auto model = catalog_lookup("minkowski-spherical", {});
  Surface surf(model, surface_lookup("sphere", {{"r", 1.0}}, model.chart), 8);
  AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));
  AlignedParallelSpinor aps(G, emb);

  const Vec4 xi0 = dirac_current(G, aps.global_value());
  CHECK((xi0 - Vec4(1, 0, 0, 0)).norm() < 1e-14);
  CHECK((G.su2_projector(+1) * aps.global_value() - aps.global_value()).norm() <
        1e-14);

  for (double th : {0.4, 1.3, 2.2}) {
    for (double ph : {0.0, 1.9, 4.7}) {
      const CVec4 psi = aps.frame_value(th, ph);
      CHECK(psi.norm() == Approx(1.0).margin(1e-13));

      const Vec4 xi = dirac_current(G, psi);
      CHECK(xi[0] == Approx(1.0).margin(1e-12));
      CHECK(std::abs(xi[1]) < 1e-12);  // no outward-normal component
      CHECK(std::abs(xi[2]) < 1e-12);  // no tangential flux
      CHECK(std::abs(xi[3]) < 1e-12);

      // chiral halves carry equal norm 1/sqrt(2)
      const double np = (G.chiral_projector(+1) * psi).norm();
      const double nm = (G.chiral_projector(-1) * psi).norm();
      CHECK(np == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
      CHECK(nm == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
      CHECK(np * np - nm * nm == Approx(-xi[1]).margin(1e-12));
    }
  }
}

TEST_CASE("aligned spinor is covariantly constant (transport oracle)", "[spinor]") {
  GammaRep G = GammaRep::standard();
  auto model = catalog_lookup("minkowski-spherical", {});
  for (const char* name : {"sphere", "oblate"}) {
    Surface surf(model, surface_lookup(name, {{"r", 1.0}}, model.chart), 16);
    AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));
    AlignedParallelSpinor aps(G, emb);

    for (double th : {0.5, 1.4, 2.5}) {
      const double ph = 0.9;
      const FrameConnection fc = embedded_frame_connection(emb, th);
      const double h = 1e-4;

      const CVec4 dth =
          fd::deriv1([&](int i) { return CVec4(aps.frame_value(th + i * h, ph)); },
                     h) /
          std::sqrt(emb.profile().f(th));
      const CVec4 dph =
          fd::deriv1([&](int i) { return CVec4(aps.frame_value(th, ph + i * h)); },
                     h) /
          emb.rho(th);

      const CVec4 psi = aps.frame_value(th, ph);
      CHECK((dth + spinor_connection(G, fc, 0) * psi).norm() < 1e-8);
      CHECK((dph + spinor_connection(G, fc, 1) * psi).norm() < 1e-8);
    }
  }
}

TEST_CASE("embedded frame connection matches the surface connection", "[spinor]") {
  auto model = catalog_lookup("minkowski-spherical", {});
  Surface surf(model, surface_lookup("sphere", {{"r", 2.0}}, model.chart), 8);
  AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));

  const double th = 1.2;
  const FrameConnection a = embedded_frame_connection(emb, th);
  const FrameConnection b = surf.connection_at(surf.point(th, 0.0));
  for (int d = 0; d < 2; ++d)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(a.om[d][i][j] == Approx(b.om[d][i][j]).margin(1e-7));
}

TEST_CASE("mean-curvature spin basis", "[spinor]") {
  auto model = catalog_lookup("schwarzschild", {{"M", 1.0}});
  Surface surf(model, surface_lookup("sphere", {{"r", 10.0}}, model.chart), 8);
  const PointGeometry p = surf.point(1.0, 0.5);
  const SpinBasis sb = spin_basis_from_frame(surf, p);

  CHECK(std::abs(eps_contract(sb.o, sb.i) - 1.0) < 1e-14);

  // frame-component reconstructions from the 2-spinors
  const double r2 = std::sqrt(2.0);
  CHECK((null_vector_of(sb.i) - Vec4(1, 1, 0, 0) / r2).norm() < 1e-14);
  CHECK((null_vector_of(sb.o) - Vec4(1, -1, 0, 0) / r2).norm() < 1e-14);
  CVec4 mf;
  mf << 0.0, 0.0, 1.0 / r2, kI / r2;
  CHECK((pair_vector(sb.i, sb.o) - mf).norm() < 1e-14);

  // ambient null frame built on the surface
  const Met4 g = p.g;
  auto dot = [&g](const CVec4& u, const CVec4& v) {
    Cplx s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += u[i] * g(i, j) * v[j];
    return s;
  };
  CHECK(std::abs(dot(sb.lplus, sb.lplus)) < 1e-10);
  CHECK(std::abs(dot(sb.lminus, sb.lminus)) < 1e-10);
  CHECK(std::abs(dot(sb.lplus, sb.lminus) + 1.0) < 1e-10);
  CHECK(std::abs(dot(sb.m, sb.m)) < 1e-10);
  CHECK(std::abs(dot(sb.m, sb.mbar) - 1.0) < 1e-10);
  CHECK(std::abs(dot(sb.m, sb.hperp.cast<Cplx>())) < 1e-10);
  CHECK(std::abs(dot(sb.m, sb.hhat.cast<Cplx>())) < 1e-10);
}

TEST_CASE("NP scalars of the mean-curvature frame", "[spinor]") {
  // convergence/divergence equality on a Schwarzschild sphere
  {
    auto model = catalog_lookup("schwarzschild", {{"M", 1.0}});
    Surface surf(model, surface_lookup("sphere", {{"r", 10.0}}, model.chart), 8);
    const NPScalars np = np_scalars(surf, 1.1, 0.4);
    const double expected = 0.17888543819998318 / std::sqrt(2.0);
    CHECK(np.kappa_perp == Approx(expected).margin(1e-12));
    CHECK(np.rho.real() == Approx(expected).margin(1e-8));
    CHECK(np.mu.real() == Approx(expected).margin(1e-8));
    CHECK(std::abs(np.rho.imag()) < 1e-8);
    CHECK(std::abs(np.mu.imag()) < 1e-8);
    CHECK(std::abs(np.beta) < 1e-8);  // twist-free frame
  }
  // twist-free unit sphere: beta vanishes
  {
    auto model = catalog_lookup("minkowski-spherical", {});
    Surface surf(model, surface_lookup("sphere", {{"r", 1.0}}, model.chart), 8);
    const NPScalars np = np_scalars(surf, 0.9, 0.0);
    CHECK(std::abs(np.beta) < 1e-10);
    CHECK(np.rho.real() == Approx(std::sqrt(2.0)).margin(1e-9));
    CHECK(np.mu.real() == Approx(std::sqrt(2.0)).margin(1e-9));
  }
  // twisted frame on a tilted sphere: beta = -pi_m/2, beta' = +pi_mbar/2
  {
    auto model = catalog_lookup("minkowski-spherical", {});
    Surface surf(model,
                 surface_lookup("tilted-sphere", {{"r", 1.0}, {"v", 0.4}}, model.chart),
                 16);
    for (double th : {0.7, 1.8}) {
      const PointGeometry p = surf.point(th, 0.0);
      const MeanCurvatureFrame f = surf.mc_frame_at(p);
      const Cplx pim = (f.twist[0] + kI * f.twist[1]) / std::sqrt(2.0);
      const NPScalars np = np_scalars(surf, th, 0.0);
      CHECK(std::abs(np.beta + 0.5 * pim) < 1e-8);
      CHECK(std::abs(np.betap - 0.5 * std::conj(pim)) < 1e-8);
      CHECK(np.rho.real() == Approx(np.kappa_perp).margin(1e-8));
      CHECK(np.mu.real() == Approx(np.kappa_perp).margin(1e-8));
    }
  }
}

TEST_CASE("two-spinor split, currents, Majorana condition", "[spinor]") {
  GammaRep G = GammaRep::standard();

  for (int k = 0; k < 6; ++k) {
    const CVec4 psi = random_spinor();
    const TwoSpinorSplit s = two_spinor_split(psi);

    CHECK((two_spinor_assemble(s) - psi).norm() < 1e-14 * psi.norm());

    const Vec4 xi = dirac_current(G, psi);
    const Vec4 rec =
        null_vector_of(s.lambda) + null_vector_of(CVec2(s.mu.conjugate()));
    CHECK((xi - rec).norm() < 1e-10 * xi.norm());
    CHECK(frame_dot(xi, xi) < 0.0);
  }

  // Majorana spinors: mu = conj(lambda), current is null
  for (int k = 0; k < 4; ++k) {
    const CVec4 seed = random_spinor();
    const CVec4 pm = seed + majorana_conjugate(G, seed);
    CHECK(majorana_check(G, pm));
    const TwoSpinorSplit s = two_spinor_split(pm);
    CHECK((s.mu - s.lambda.conjugate()).norm() < 1e-12 * pm.norm());

    const Vec4 xi = dirac_current(G, pm);
    CHECK(std::abs(frame_dot(xi, xi)) < 1e-10 * xi[0] * xi[0]);
  }
  CHECK_FALSE(majorana_check(G, CVec4(random_spinor())));
}
