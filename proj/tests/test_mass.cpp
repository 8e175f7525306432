#include <cmath>
#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "qlm/mass.hpp"

using namespace qlm;

namespace {

double schwarzschild_mass_oracle(double M, double r) {
  return r * (1.0 - std::sqrt(1.0 - 2.0 * M / r));
}

}  // namespace

TEST_CASE("mean curvature mass matches the Schwarzschild closed form") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});

  for (double r : {10.0, 20.0, 50.0, 100.0}) {
    const MassReport m = mean_curvature_mass(
        schw, surface_lookup("sphere", {{"r", r}}, schw.chart), 32, false);
    const double oracle = schwarzschild_mass_oracle(1.0, r);
    CAPTURE(r, m.E, oracle);
    CHECK(std::abs(m.E - oracle) / oracle < 1e-7);
    // areal spheres: M_irr = r/2 exactly
    CHECK(m.m_irr == Catch::Approx(0.5 * r).margin(1e-10));
  }

  // the value at r = 10 to full stated precision, plus resolution independence
  const MassReport m10 = mean_curvature_mass(
      schw, surface_lookup("sphere", {{"r", 10.0}}, schw.chart), 32, true);
  CHECK(m10.E == Catch::Approx(1.0557280900).margin(1e-8));
  REQUIRE(m10.convergence.size() >= 3);
  for (auto [L, E] : m10.convergence) {
    CAPTURE(L);
    CHECK(E == Catch::Approx(schwarzschild_mass_oracle(1.0, 10.0)).margin(1e-8));
  }
}

TEST_CASE("surfaces in a flat hyperplane carry zero mass") {
  auto mink = catalog_lookup("minkowski-spherical", {});
  for (double r : {1.0, 3.0}) {
    const MassReport m = mean_curvature_mass(
        mink, surface_lookup("sphere", {{"r", r}}, mink.chart), 16, false);
    CHECK(std::abs(m.E) < 1e-10);
  }
  const MassReport w = mean_curvature_mass(
      mink, surface_lookup("wiggly-sphere", {{"eps", 0.1}}, mink.chart), 24, false);
  CHECK(std::abs(w.E) < 1e-8);
}

TEST_CASE("time-dependent wiggles raise the mass at second order") {
  auto mink = catalog_lookup("minkowski-spherical", {});
  const MassReport big = mean_curvature_mass(
      mink, surface_lookup("time-wiggled", {{"r", 1.0}, {"eps", 0.2}}, mink.chart),
      16, false);
  const MassReport small = mean_curvature_mass(
      mink, surface_lookup("time-wiggled", {{"r", 1.0}, {"eps", 0.1}}, mink.chart),
      16, false);
  CHECK(big.E > 1e-10);
  CHECK(small.E > 1e-10);
  // halving eps should quarter the mass
  const double ratio = big.E / small.E;
  CAPTURE(big.E, small.E, ratio);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.8);
}

TEST_CASE("mass is nonnegative on convex catalog surfaces") {
  struct Case {
    const char* spacetime;
    std::map<std::string, double> sp;
    const char* surface;
    std::map<std::string, double> sf;
  };
  const Case cases[] = {
      {"schwarzschild", {{"M", 1.0}}, "sphere", {{"r", 3.0}}},
      {"schwarzschild-isotropic", {{"M", 1.0}}, "sphere", {{"r", 5.0}}},
      {"schwarzschild", {{"M", 1.0}}, "tilted-sphere", {{"r", 10.0}, {"v", 0.3}}},
      {"minkowski-spherical", {}, "oblate", {{"eps", 0.1}}},
      {"weak-field", {{"eps", 0.01}, {"a", 1.0}}, "sphere", {{"r", 5.0}}},
  };
  for (const Case& c : cases) {
    auto model = catalog_lookup(c.spacetime, c.sp);
    const MassReport m = mean_curvature_mass(
        model, surface_lookup(c.surface, c.sf, model.chart), 16, false);
    CAPTURE(c.spacetime, c.surface, m.E);
    CHECK(m.E > -1e-8);
  }
}

TEST_CASE("surfaces at or inside the horizon are rejected") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  auto iso = catalog_lookup("schwarzschild-isotropic", {{"M", 1.0}});
  CHECK_THROWS_AS(
      mean_curvature_mass(schw, surface_lookup("sphere", {{"r", 2.0}}, schw.chart), 8),
      NonConvexError);
  CHECK_THROWS_AS(
      mean_curvature_mass(schw, surface_lookup("sphere", {{"r", 1.5}}, schw.chart), 8),
      NonConvexError);
  CHECK_THROWS_AS(
      mean_curvature_mass(iso, surface_lookup("sphere", {{"r", 0.4}}, iso.chart), 8),
      NonConvexError);
  try {
    mean_curvature_mass(schw, surface_lookup("sphere", {{"r", 2.0}}, schw.chart), 8);
    FAIL("expected NonConvexError");
  } catch (const NonConvexError& e) {
    CHECK(std::string(e.what()).find("non-convex") != std::string::npos);
  }
}

TEST_CASE("mass approaches twice the irreducible mass at the horizon") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  const HorizonReport h = horizon_bound_check(schw, 16);
  REQUIRE(h.radii.size() == 3);
  for (size_t i = 0; i < h.radii.size(); ++i) {
    CAPTURE(h.radii[i], h.E[i]);
    const double oracle = schwarzschild_mass_oracle(1.0, h.radii[i]);
    CHECK(std::abs(h.E[i] - oracle) / oracle < 1e-7);
    // areal radius: 2 M_irr = r exactly
    CHECK(h.two_m_irr[i] == Catch::Approx(h.radii[i]).margin(1e-10));
  }
  CHECK(h.margin < 1e-3);
  CHECK(h.extrapolated == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("aligned-spinor surface integral reproduces the mass") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  auto mink = catalog_lookup("minkowski-spherical", {});

  const Theorem1Report th = theorem1_check(
      schw, surface_lookup("sphere", {{"r", 10.0}}, schw.chart), 32);
  CAPTURE(th.E, th.surface_integral, th.residual);
  CHECK(th.surface_integral == Catch::Approx(-26.5333254).margin(1e-4));
  CHECK(th.residual < 1e-6 * std::max(1.0, 8.0 * kPi * th.E));

  const Theorem1Report tm = theorem1_check(
      mink, surface_lookup("sphere", {{"r", 1.0}}, mink.chart), 16);
  CHECK(std::abs(tm.E) < 1e-10);
  CHECK(std::abs(tm.surface_integral) < 1e-9);

  const Theorem1Report tw = theorem1_check(
      mink, surface_lookup("wiggly-sphere", {{"eps", 0.1}}, mink.chart), 24);
  CHECK(std::abs(tw.E) < 1e-8);
  CHECK(tw.residual < 1e-8);

  // spectral convergence of the residual on a non-round surface
  double res[3];
  const int bands[3] = {8, 12, 16};
  for (int i = 0; i < 3; ++i)
    res[i] = theorem1_check(mink, surface_lookup("oblate", {{"eps", 0.1}}, mink.chart),
                            bands[i])
                 .residual;
  CAPTURE(res[0], res[1], res[2]);
  CHECK(res[1] < res[0]);
  CHECK(res[2] < res[1]);
  CHECK(res[2] < 1e-3 * res[0]);
  CHECK(res[2] < 1e-8);
}

TEST_CASE("Hamiltonian pairing difference equals eight pi times the mass") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  auto mink = catalog_lookup("minkowski-spherical", {});

  const PairingReport ps = hamiltonian_pairing(
      schw, surface_lookup("sphere", {{"r", 10.0}}, schw.chart), 32);
  CHECK(ps.pointwise_residual < 1e-10);
  CHECK(ps.difference / (8.0 * kPi) ==
        Catch::Approx(schwarzschild_mass_oracle(1.0, 10.0)).margin(1e-8));

  const PairingReport pm = hamiltonian_pairing(
      mink, surface_lookup("sphere", {{"r", 2.0}}, mink.chart), 16);
  CHECK(pm.pointwise_residual < 1e-10);
  CHECK(std::abs(pm.difference) < 1e-9);

  struct Case {
    const SpacetimeModel* model;
    const char* surface;
    std::map<std::string, double> sf;
  };
  const Case cases[] = {
      {&mink, "oblate", {{"eps", 0.1}}},
      {&mink, "wiggly-sphere", {{"eps", 0.1}}},
      {&schw, "tilted-sphere", {{"r", 10.0}, {"v", 0.3}}},
  };
  for (const Case& c : cases) {
    auto map = surface_lookup(c.surface, c.sf, c.model->chart);
    const PairingReport pa = hamiltonian_pairing(*c.model, map, 16);
    const MassReport m = mean_curvature_mass(*c.model, map, 16, false);
    CAPTURE(c.surface, pa.difference / (8.0 * kPi), m.E);
    CHECK(pa.pointwise_residual < 1e-10);
    CHECK(pa.difference / (8.0 * kPi) == Catch::Approx(m.E).margin(1e-8));
  }
}

TEST_CASE("chiral decomposition of the mass") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  GammaRep G = GammaRep::standard();
  const int L = 32;
  Surface surf(schw, surface_lookup("sphere", {{"r", 10.0}}, schw.chart), L);
  AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));
  AlignedParallelSpinor aps(G, emb);
  SpinorGridField phi = sample_spinor_field(
      surf.grid(), L, [&](double th, double ph) { return aps.frame_value(th, ph); });
  const CMat4 Pp = G.chiral_projector(+1);
  SpinorGridField psip;
  psip.resize(L, surf.grid().size());
  for (int i = 0; i < surf.grid().size(); ++i) psip.set(i, CVec4(Pp * phi.at(i)));

  SECTION("equal chiral halves give back the mean curvature mass") {
    const ChiralMassReport ch = chiral_mass(surf, emb, G, psip, phi);
    const double E = schwarzschild_mass_oracle(1.0, 10.0);
    CHECK(ch.Etilde == Catch::Approx(E).margin(1e-8));
    CHECK(std::abs(ch.twist_integral) < 1e-10);
    // |psi+|^2 = 1/2 collapses the defect integrand to the bare mass defect
    CHECK(ch.lemma5_integral / (8.0 * kPi) == Catch::Approx(E).margin(1e-8));
    CHECK(ch.bound_lhs >= ch.bound_rhs - 1e-10);
  }

  SECTION("vanishing positive-chirality part isolates the curvature term") {
    SpinorGridField zero;
    zero.resize(L, surf.grid().size());
    const ChiralMassReport ch = chiral_mass(surf, emb, G, zero, phi);
    const MassReport m = mean_curvature_mass(
        schw, surface_lookup("sphere", {{"r", 10.0}}, schw.chart), L, false);
    CHECK(8.0 * kPi * ch.Etilde == Catch::Approx(-0.5 * m.int_H).margin(1e-8));
  }

  SECTION("inputs with the wrong chirality are rejected") {
    CHECK_THROWS_AS(chiral_mass(surf, emb, G, phi, phi), FlagError);
  }
}

TEST_CASE("chiral mass with twist agrees with the covariant flux integral") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  GammaRep G = GammaRep::standard();
  const int L = 16;
  Surface surf(schw,
               surface_lookup("tilted-sphere", {{"r", 10.0}, {"v", 0.3}}, schw.chart),
               L);
  AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));
  AlignedParallelSpinor aps(G, emb);
  SpinorGridField phi = sample_spinor_field(
      surf.grid(), L, [&](double th, double ph) { return aps.frame_value(th, ph); });
  std::mt19937 rng(21);
  SpinorGridField rnd = random_spinor_field(surf.grid(), L, 5, rng);
  const CMat4 Pp = G.chiral_projector(+1), Pm = G.chiral_projector(-1);
  SpinorGridField psip, mixed;
  psip.resize(L, surf.grid().size());
  mixed.resize(L, surf.grid().size());
  for (int i = 0; i < surf.grid().size(); ++i) {
    psip.set(i, CVec4(Pp * rnd.at(i)));
    mixed.set(i, CVec4(Pp * rnd.at(i) + Pm * phi.at(i)));
  }
  const ChiralMassReport ch = chiral_mass(surf, emb, G, psip, phi);
  BoundaryOperators mcop(surf, G, FrameKind::MeanCurvature);
  const double sw = mcop.integrate_density(mcop.chiral_density(mixed));
  CAPTURE(8.0 * kPi * ch.Etilde, sw, ch.twist_integral);
  CHECK(std::abs(8.0 * kPi * ch.Etilde + sw) <
        1e-8 * std::max(1.0, std::abs(sw)));
}

TEST_CASE("large-sphere sweep recovers the ADM mass") {
  auto schw = catalog_lookup("schwarzschild", {{"M", 1.0}});
  const AdmSweepReport adm = adm_limit_sweep(schw, {10.0, 20.0, 50.0, 100.0}, 32);
  CAPTURE(adm.fitted_mass, adm.fitted_coeff);
  CHECK(adm.fitted_mass == Catch::Approx(1.0).margin(1e-4));
  for (size_t i = 0; i < adm.radii.size(); ++i) {
    const double oracle = schwarzschild_mass_oracle(1.0, adm.radii[i]);
    CHECK(std::abs(adm.E[i] - oracle) / oracle < 1e-7);
  }

  auto mink = catalog_lookup("minkowski-spherical", {});
  const AdmSweepReport flat = adm_limit_sweep(mink, {1.0, 2.0, 4.0}, 16);
  for (double E : flat.E) CHECK(std::abs(E) < 1e-10);
  CHECK(std::abs(flat.fitted_mass) < 1e-9);
}
