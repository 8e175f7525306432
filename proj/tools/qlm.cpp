#include <cmath>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "qlm/config.hpp"
#include "qlm/mass.hpp"
#include "qlm/output.hpp"

namespace {

using namespace qlm;

const char* kUsage = R"(usage: qlm <task> [flags]

tasks:
  mass        quasilocal mean-curvature mass of one surface
  embed       axisymmetric isometric embedding profile (csv: theta,f,g,rho,z,H_flat)
  sweep       mass over a radius list with large-sphere fit (csv: r,E)
  np-scalars  Newman-Penrose scalars of the mean-curvature spin frame
              (csv: theta,phi,re_rho,im_rho,re_mu,im_mu,re_beta,im_beta,
               re_betap,im_betap,kappa_perp)
  verify      identity suites; nonzero exit on any violated tolerance
              (csv: name,value,tolerance,pass)

flags:
  --spacetime NAME   catalog spacetime (default minkowski-spherical)
  --M VALUE          mass parameter of the spacetime
  --surface NAME     catalog surface (default sphere)
  --r VALUE[,V2...]  surface radius; a comma list sets the sweep radii
  --eps VALUE        surface/spacetime deformation parameter
  --v VALUE          boost parameter of tilted surfaces
  --L N              band limit (>= 8, default 32)
  --Ntheta N         minimum theta nodes (raises L if needed)
  --Nphi N           minimum phi nodes (raises L if needed)
  --format json|csv  output format (default json)
  --out PATH         write output to PATH instead of stdout
  --config PATH      TOML config file; flags override it
  --suite NAME       verify: theorem1|pairing|chiral|np|horizon|frame|all
  --dump PATH        verify: write the spinor surface density as csv
  --tol KEY=VALUE    override a named verification tolerance

mass csv columns: L,E (resolution table).  QLM_THREADS caps sweep workers.
)";

void add_provenance(JsonObject& o, const RunConfig& cfg, int Leff) {
  o.field("task", cfg.task);
  o.field("spacetime", cfg.spacetime);
  o.field("spacetime_params", cfg.spacetime_params);
  o.field("surface", cfg.surface);
  o.field("surface_params", cfg.surface_params);
  o.field("L", Leff);
  o.field("tolerances", cfg.tolerances);
}

std::string run_mass(const RunConfig& cfg) {
  const int Leff = cfg.effective_band_limit();
  auto model = catalog_lookup(cfg.spacetime, cfg.spacetime_params);
  auto map = surface_lookup(cfg.surface, cfg.surface_params, model.chart);
  const MassReport m = mean_curvature_mass(model, map, Leff, true);
  if (cfg.format == "csv") {
    std::vector<std::vector<double>> rows;
    for (auto [L, E] : m.convergence) rows.push_back({double(L), E});
    return render_csv({"L", "E"}, rows);
  }
  JsonObject o;
  add_provenance(o, cfg, Leff);
  o.field("E", m.E);
  o.field("A", m.area);
  o.field("M_irr", m.m_irr);
  o.field("int_H", m.int_H);
  o.field("int_H_flat", m.int_Hflat);
  JsonArray conv;
  for (auto [L, E] : m.convergence) {
    JsonObject c;
    c.field("L", L);
    c.field("E", E);
    conv.push(c);
  }
  o.raw("convergence", conv.str());
  return o.str();
}

std::string run_embed(const RunConfig& cfg) {
  const int Leff = cfg.effective_band_limit();
  auto model = catalog_lookup(cfg.spacetime, cfg.spacetime_params);
  Surface surf(model, surface_lookup(cfg.surface, cfg.surface_params, model.chart),
               Leff);
  AxisymmetricMetricProfile prof = extract_axisymmetric_profile(surf);
  AxisymmetricEmbedding emb(prof);
  std::vector<std::vector<double>> rows;
  for (double th : prof.theta)
    rows.push_back({th, prof.f(th), prof.g(th), emb.rho(th), emb.z(th), emb.hflat(th)});
  if (cfg.format == "csv")
    return render_csv({"theta", "f", "g", "rho", "z", "H_flat"}, rows);
  JsonObject o;
  add_provenance(o, cfg, Leff);
  o.field("A", surf.area());
  JsonArray arr;
  for (const auto& r : rows) {
    JsonObject p;
    p.field("theta", r[0]).field("f", r[1]).field("g", r[2]);
    p.field("rho", r[3]).field("z", r[4]).field("H_flat", r[5]);
    arr.push(p);
  }
  o.raw("profile", arr.str());
  return o.str();
}

std::string run_sweep(const RunConfig& cfg) {
  const int Leff = cfg.effective_band_limit();
  auto model = catalog_lookup(cfg.spacetime, cfg.spacetime_params);
  std::vector<double> radii = cfg.radii;
  if (radii.empty()) radii = {10.0, 20.0, 50.0, 100.0};
  const AdmSweepReport adm = adm_limit_sweep(model, radii, Leff);
  if (cfg.format == "csv") {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < adm.radii.size(); ++i)
      rows.push_back({adm.radii[i], adm.E[i]});
    return render_csv({"r", "E"}, rows);
  }
  JsonObject o;
  add_provenance(o, cfg, Leff);
  JsonArray rs, es;
  for (double r : adm.radii) rs.push(r);
  for (double e : adm.E) es.push(e);
  o.raw("r", rs.str());
  o.raw("E", es.str());
  o.field("fitted_mass", adm.fitted_mass);
  o.field("fitted_coeff", adm.fitted_coeff);
  return o.str();
}

std::string run_np_scalars(const RunConfig& cfg) {
  const int Leff = cfg.effective_band_limit();
  auto model = catalog_lookup(cfg.spacetime, cfg.spacetime_params);
  Surface surf(model, surface_lookup(cfg.surface, cfg.surface_params, model.chart),
               Leff);
  const SphereGrid& grid = surf.grid();
  std::vector<std::vector<double>> rows;
  double sup_rho = 0, sup_mu = 0, sup_imag = 0;
  for (int i = 0; i < grid.n_theta(); ++i) {
    for (int k = 0; k < grid.n_phi(); ++k) {
      const double th = grid.theta(i), ph = grid.phi(k);
      const NPScalars np = np_scalars(surf, th, ph);
      rows.push_back({th, ph, np.rho.real(), np.rho.imag(), np.mu.real(),
                      np.mu.imag(), np.beta.real(), np.beta.imag(),
                      np.betap.real(), np.betap.imag(), np.kappa_perp});
      sup_rho = std::max(sup_rho, std::abs(np.rho.real() - np.kappa_perp));
      sup_mu = std::max(sup_mu, std::abs(np.mu.real() - np.kappa_perp));
      sup_imag = std::max(sup_imag,
                          std::max(std::abs(np.rho.imag()), std::abs(np.mu.imag())));
    }
  }
  if (cfg.format == "csv")
    return render_csv({"theta", "phi", "re_rho", "im_rho", "re_mu", "im_mu",
                       "re_beta", "im_beta", "re_betap", "im_betap", "kappa_perp"},
                      rows);
  JsonObject o;
  add_provenance(o, cfg, Leff);
  o.field("n_points", static_cast<int>(rows.size()));
  o.field("sup_rho_minus_kappa_perp", sup_rho);
  o.field("sup_mu_minus_kappa_perp", sup_mu);
  o.field("sup_imag_rho_mu", sup_imag);
  return o.str();
}

struct Check {
  std::string name;
  double value, tol;
  bool pass;
};

int run_verify(const RunConfig& cfg, std::string& text) {
  const int Leff = cfg.effective_band_limit();
  auto model = catalog_lookup(cfg.spacetime, cfg.spacetime_params);
  auto map = surface_lookup(cfg.surface, cfg.surface_params, model.chart);
  const bool all = cfg.suite == "all";
  auto wants = [&](const char* s) { return all || cfg.suite == s; };
  if (!all && cfg.suite != "theorem1" && cfg.suite != "pairing" &&
      cfg.suite != "chiral" && cfg.suite != "np" && cfg.suite != "horizon" &&
      cfg.suite != "frame")
    throw ConfigError("cli", "unknown verify suite: " + cfg.suite);

  std::vector<Check> checks;
  auto add = [&](const std::string& name, double value, double fallback_tol) {
    const double tol = cfg.tolerance(name, fallback_tol);
    checks.push_back({name, value, tol, value <= tol});
  };

  const MassReport mass = mean_curvature_mass(model, map, Leff, false);

  if (wants("theorem1")) {
    const Theorem1Report th = theorem1_check(model, map, Leff);
    add("theorem1_residual", th.residual,
        1e-6 * std::max(1.0, 8.0 * kPi * std::abs(th.E)));
    if (!cfg.dump.empty()) {
      Surface surf(model, map, Leff);
      AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));
      GammaRep G = GammaRep::standard();
      AlignedParallelSpinor aps(G, emb);
      SpinorGridField psi = sample_spinor_field(
          surf.grid(), Leff,
          [&](double th2, double ph) { return aps.frame_value(th2, ph); });
      BoundaryOperators mcop(surf, G, FrameKind::MeanCurvature);
      const std::vector<double> d = mcop.senwitten_density(psi);
      const SphereGrid& grid = surf.grid();
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < grid.n_theta(); ++i)
        for (int k = 0; k < grid.n_phi(); ++k)
          rows.push_back({grid.theta(i), grid.phi(k), d[grid.index(i, k)]});
      emit(cfg.dump, render_csv({"theta", "phi", "density"}, rows));
    }
  }
  if (wants("pairing")) {
    const PairingReport pa = hamiltonian_pairing(model, map, Leff);
    add("pairing_pointwise", pa.pointwise_residual, 1e-10);
    add("pairing_difference", std::abs(pa.difference / (8.0 * kPi) - mass.E), 1e-8);
  }
  if (wants("chiral")) {
    Surface surf(model, map, Leff);
    AxisymmetricEmbedding emb(extract_axisymmetric_profile(surf));
    GammaRep G = GammaRep::standard();
    AlignedParallelSpinor aps(G, emb);
    SpinorGridField phi = sample_spinor_field(
        surf.grid(), Leff, [&](double th, double ph) { return aps.frame_value(th, ph); });
    const CMat4 Pp = G.chiral_projector(+1);
    SpinorGridField psip;
    psip.resize(Leff, surf.grid().size());
    for (int i = 0; i < surf.grid().size(); ++i) psip.set(i, CVec4(Pp * phi.at(i)));
    const ChiralMassReport ch = chiral_mass(surf, emb, G, psip, phi);
    add("chiral_mass_defect", std::abs(ch.Etilde - mass.E), 1e-8);
    add("chiral_twist_term", std::abs(ch.twist_integral), 1e-10);
  }
  if (wants("np")) {
    Surface surf(model, map, Leff);
    const SphereGrid& grid = surf.grid();
    double sup = 0;
    for (int i = 0; i < grid.n_theta(); ++i)
      for (int k = 0; k < grid.n_phi(); ++k) {
        const NPScalars np = np_scalars(surf, grid.theta(i), grid.phi(k));
        sup = std::max({sup, std::abs(np.rho.real() - np.kappa_perp),
                        std::abs(np.mu.real() - np.kappa_perp),
                        std::abs(np.rho.imag()), std::abs(np.mu.imag())});
      }
    add("np_shear_free_convergence", sup, 1e-8);
  }
  if (wants("horizon")) {
    if (horizon_radius(model) > 0.0) {
      const HorizonReport h = horizon_bound_check(model, std::min(Leff, 16));
      add("horizon_margin", h.margin, 1e-3);
    } else if (!all) {
      throw ConfigError("cli", "horizon suite requires a spacetime with a horizon");
    }
  }
  if (wants("frame")) {
    Surface surf(model, map, Leff);
    GammaRep G = GammaRep::standard();
    std::mt19937 rng(7);
    SpinorGridField psi = random_spinor_field(surf.grid(), Leff,
                                              std::min(Leff / 2, 6), rng);
    BoundaryOperators slice(surf, G, FrameKind::Slice);
    BoundaryOperators mc(surf, G, FrameKind::MeanCurvature);
    SpinorGridField psim;
    psim.resize(Leff, surf.grid().size());
    for (int i = 0; i < surf.grid().size(); ++i)
      psim.set(i, CVec4(mc.boost_lift(i) * psi.at(i)));
    const std::vector<double> fm = mc.flux_density(psim, true);
    const std::vector<double> fs = slice.flux_density(psi, true);
    double sup = 0;
    for (size_t i = 0; i < fm.size(); ++i)
      sup = std::max(sup, std::abs(fm[i] - fs[i]));
    add("frame_flux_invariance", sup, 1e-6);
  }

  bool passed = true;
  for (const Check& c : checks) passed = passed && c.pass;
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "name,value,tolerance,pass\n";
    for (const Check& c : checks)
      os << c.name << "," << format_number(c.value) << "," << format_number(c.tol)
         << "," << (c.pass ? 1 : 0) << "\n";
    text = os.str();
  } else {
    JsonObject o;
    add_provenance(o, cfg, Leff);
    o.field("suite", cfg.suite);
    JsonArray arr;
    for (const Check& c : checks) {
      JsonObject co;
      co.field("name", c.name);
      co.field("value", c.value);
      co.field("tolerance", c.tol);
      co.field("pass", c.pass);
      arr.push(co);
    }
    o.raw("checks", arr.str());
    o.field("passed", passed);
    text = o.str();
  }
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "help") {
      std::cout << kUsage;
      return args.empty() ? 1 : 0;
    }
    const std::string task = args[0];
    args.erase(args.begin());

    // --config is resolved first so remaining flags override the file
    qlm::RunConfig cfg;
    for (size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size())
          throw qlm::ConfigError("cli", "--config requires a value");
        cfg = qlm::parse_config_file(args[i + 1]);
        args.erase(args.begin() + i, args.begin() + i + 2);
        break;
      }
    }
    qlm::apply_flags(cfg, args);
    cfg.task = task;
    cfg.validate();

    std::string text;
    int status = 0;
    if (task == "mass") text = run_mass(cfg);
    else if (task == "embed") text = run_embed(cfg);
    else if (task == "sweep") text = run_sweep(cfg);
    else if (task == "np-scalars") text = run_np_scalars(cfg);
    else if (task == "verify") status = run_verify(cfg, text);
    else throw qlm::ConfigError("cli", "unknown task: " + task);
    qlm::emit(cfg.out, text);
    return status;
  } catch (const qlm::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "[cli] " << e.what() << "\n";
    return 1;
  }
}
