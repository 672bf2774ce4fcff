// epat: command-line front end for simulation, reconstruction and checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "epat/epat.hpp"

namespace {

constexpr int exit_not_converged = 3;

struct Common {
  std::string medium = "constant:1";
  std::string lambda = "full:1";
  std::string gamma = "none";
  double cfl = 0.5;
  std::string pgm;

  epat::RunSetup setup() const {
    epat::RunSetup s;
    s.medium = epat::MediumSpec::parse(medium);
    s.lambda = epat::BoundaryProfile::parse(lambda);
    s.gamma = epat::BoundaryProfile::parse(gamma);
    s.cfl = cfl;
    return s;
  }
};

void add_medium(CLI::App *sub, Common &c) {
  sub->add_option("--medium", c.medium,
                  "constant:c | gradient:c0,c1[,deg] | lens:c0,amp,sigma[,x,y] | random:cmin,cmax,seed, "
                  "optionally ';q=value'")
      ->capture_default_str();
}
void add_boundary(CLI::App *sub, Common &c) {
  sub->add_option("--lambda", c.lambda, "impedance: full:v | faces:right,top:v | arc:face,s0,s1:v | none, joined by '+'")
      ->capture_default_str();
  sub->add_option("--gamma", c.gamma, "additional observed arcs, same syntax")->capture_default_str();
}

void maybe_pgm(const std::string &path, const epat::ScalarField &f) {
  if (!path.empty()) epat::io::save_pgm(path, f);
}

int cmd_make_phantom(const std::string &spec, int n, double lx, double ly, const std::string &out,
                     const std::string &pgm) {
  const auto g = epat::Grid2D::covering(n, n, lx, ly);
  const auto f = epat::make_phantom(epat::PhantomSpec::parse(spec, g), g);
  epat::io::save_field(out, f);
  maybe_pgm(pgm, f);
  std::printf("wrote %s (%dx%d, max %.6g)\n", out.c_str(), g.nx, g.ny, f.max());
  return 0;
}

int cmd_simulate(const Common &c, const std::string &phantom, double tau, const std::string &out,
                 double noise, std::uint64_t seed, int fine) {
  const auto u0 = epat::io::load_field(phantom);
  const epat::RunSetup setup = c.setup();
  const auto cfg = setup.config(u0.grid(), tau);
  epat::BoundaryTrace d;
  if (fine > 1) {
    const auto fcfg = setup.refined(cfg, fine);
    d = epat::measure_refined(epat::interpolate(u0, fcfg.grid()), cfg, fcfg);
  } else {
    d = epat::measure(u0, cfg);
  }
  d = epat::add_noise(d, {noise, seed});
  epat::io::save_trace(out, d);
  std::printf("wrote %s (nt=%d, dt=%.6g, tau=%.6g, nodes=%zu)\n", out.c_str(), d.nt(), d.times().dt,
              d.times().tau(), d.n_nodes());
  return 0;
}

int cmd_reconstruct(const Common &c, const std::string &method, const std::string &data,
                    const std::string &out, const std::string &history, double tol, int max_iter,
                    const std::string &truth, double tau_hat, bool lambda_given) {
  const auto d = epat::io::load_trace(data);
  const epat::BoundarySpec &bnd = d.boundary();
  if (lambda_given) {
    const auto expect = epat::BoundarySpec::from_profiles(bnd.grid(), epat::BoundaryProfile::parse(c.lambda),
                                                          epat::BoundaryProfile::parse(c.gamma));
    if (!(expect == bnd)) throw epat::ContractError("--lambda/--gamma disagree with the data file's boundary table");
  }
  epat::RunSetup setup = c.setup();
  const epat::WaveRunConfig cfg(setup.medium.sample(bnd.grid()), d.boundary_ptr(), d.times(), c.cfl);
  if (tau_hat > 0.0 && cfg.tau() < tau_hat)
    std::fprintf(stderr, "warning: tau = %.4g is below the ray estimate %.4g\n", cfg.tau(), tau_hat);

  epat::ReconReport rep;
  if (method == "cg") {
    epat::CGOptions o;
    o.rel_tol = tol;
    o.max_iters = max_iter;
    rep = epat::reconstruct_cg(d, cfg, o);
  } else {
    epat::NeumannOptions o;
    o.rel_tol = tol;
    o.max_terms = max_iter;
    rep = epat::reconstruct_neumann(d, cfg, o);
  }
  for (const auto &w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  epat::io::save_field(out, rep.estimate);
  maybe_pgm(c.pgm, rep.estimate);
  if (!history.empty()) {
    std::ofstream os(history);
    if (!os) throw epat::FormatError("cannot write '" + history + "'");
    epat::io::CsvWriter csv(os, {"iter", "residual_or_update", "ratio"});
    for (std::size_t k = 0; k < rep.history.size(); ++k) {
      const double ratio = (method == "neumann" && k >= 1 && k - 1 < rep.ratios.size())
                               ? rep.ratios[k - 1]
                               : (k >= 1 && rep.history[k - 1] > 0.0 ? rep.history[k] / rep.history[k - 1]
                                                                     : std::nan(""));
      csv.row(static_cast<long>(k), rep.history[k], ratio);
    }
  }
  std::printf("method=%s iterations=%d converged=%d rate=%.6g\n", method.c_str(), rep.iterations,
              rep.converged ? 1 : 0, rep.rate);
  if (!truth.empty()) {
    const auto u0 = epat::io::load_field(truth);
    epat::require_same_grid(u0.grid(), rep.estimate.grid(), "truth");
    const double err = epat::norm_omega(rep.estimate - u0, cfg.med) / epat::norm_omega(u0, cfg.med);
    std::printf("relative_error=%.6g\n", err);
  }
  return rep.converged ? 0 : exit_not_converged;
}

int cmd_gcc(const Common &c, int n, const std::string &report, int points, int dirs, double t_max,
            double ds, const std::string &fan_kind, double half_angle) {
  const auto g = epat::Grid2D::covering(n, n);
  const epat::RunSetup setup = c.setup();
  const auto bnd = setup.boundary(g);
  epat::DirectionFan fan;
  fan.kind = fan_kind == "horizontal" ? epat::DirectionFan::Kind::horizontal
             : fan_kind == "vertical" ? epat::DirectionFan::Kind::vertical
                                      : epat::DirectionFan::Kind::uniform;
  fan.half_angle_deg = half_angle;
  const auto rep = epat::estimate_tau(setup.medium.on(g), *bnd, points, dirs, t_max, ds, fan);
  if (!report.empty()) {
    std::ofstream os(report);
    if (!os) throw epat::FormatError("cannot write '" + report + "'");
    epat::io::write_ray_report(os, rep);
  }
  epat::io::write_ray_summary(std::cout, rep.summary);
  return 0;
}

int cmd_adjoint_check(const Common &c, int n, double tau, const std::string &mode, int trials,
                      std::uint64_t seed, const std::string &report) {
  const auto g = epat::Grid2D::covering(n, n);
  const auto cfg = c.setup().config(g, tau);
  const auto rep = epat::adjoint_check(cfg, trials, seed);
  std::ofstream file;
  if (!report.empty()) {
    file.open(report);
    if (!file) throw epat::FormatError("cannot write '" + report + "'");
  }
  std::ostream &os = report.empty() ? std::cout : file;
  epat::io::CsvWriter csv(os, {"trial", "mode", "defect"});
  for (const auto &row : rep.rows) {
    const std::string name = epat::mode_name(row.mode);
    if (mode != "both" && name != mode) continue;
    csv.row(row.trial, name, row.defect);
  }
  if (mode != "pde") std::fprintf(stderr, "max_exact_defect=%.3e\n", rep.max_exact);
  if (mode != "exact") std::fprintf(stderr, "max_pde_defect=%.3e\n", rep.max_pde);
  if (mode != "pde" && rep.max_exact > 1e-10) return 2;
  return 0;
}

int cmd_energy_check(const Common &c, const std::string &phantom, double tau, const std::string &out) {
  const auto u0 = epat::io::load_field(phantom);
  const auto cfg = c.setup().config(u0.grid(), tau);
  epat::ForwardOptions opts;
  opts.record_diagnostics = true;
  const auto tr = epat::forward_solve(u0, cfg, opts);
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw epat::FormatError("cannot write '" + out + "'");
  }
  std::ostream &os = out.empty() ? std::cout : file;
  epat::io::CsvWriter csv(os, {"step", "time", "energy", "conserved"});
  double worst_rise = 0.0;
  const auto &e = tr.discrete_energy;
  for (std::size_t k = 0; k < e.size(); ++k) {
    csv.row(static_cast<long>(k), (k + 0.5) * cfg.dt(), e[k], tr.conserved[k]);
    if (k > 0) worst_rise = std::max(worst_rise, e[k] - e[k - 1]);
  }
  const double e0 = e.empty() ? 0.0 : e.front();
  std::fprintf(stderr, "initial_energy=%.9g final_energy=%.9g max_step_increase=%.3e\n",
               epat::energy(epat::CauchyPair::lift(u0), cfg.med), epat::energy(tr.final_state, cfg.med),
               worst_rise);
  return worst_rise > 1e-12 * std::max(1.0, e0) ? 2 : 0;
}

int cmd_info(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw epat::FormatError("cannot open '" + path + "'");
  std::string line;
  std::getline(is, line);
  is.clear();
  is.seekg(0);
  if (line.find("\"EPF1\"") != std::string::npos) {
    const auto f = epat::io::read_field(is, path);
    const auto &g = f.grid();
    std::printf("format=EPF1\nnx=%d\nny=%d\nhx=%.17g\nhy=%.17g\norigin_x=%.17g\norigin_y=%.17g\nmin=%.9g\nmax=%.9g\n",
                g.nx, g.ny, g.hx, g.hy, g.x0, g.y0, f.min(), f.max());
    return 0;
  }
  if (line.find("\"EPT1\"") != std::string::npos) {
    const auto d = epat::io::read_trace(is, path);
    const auto &bnd = d.boundary();
    const auto &g = bnd.grid();
    std::size_t n_gamma = 0;
    double lmin = 0.0, lmax = 0.0;
    for (std::size_t b = 0; b < bnd.size(); ++b) {
      n_gamma += bnd.in_gamma(b) ? 1 : 0;
      lmin = b == 0 ? bnd.lambda(b) : std::min(lmin, bnd.lambda(b));
      lmax = std::max(lmax, bnd.lambda(b));
    }
    std::printf("format=EPT1\nnt=%d\ndt=%.17g\ntau=%.17g\nn_boundary_nodes=%zu\nn_observed=%zu\n"
                "lambda_min=%.9g\nlambda_max=%.9g\nnx=%d\nny=%d\nhx=%.17g\nhy=%.17g\nrms=%.9g\n",
                d.nt(), d.times().dt, d.times().tau(), bnd.size(), n_gamma, lmin, lmax, g.nx, g.ny, g.hx,
                g.hy, epat::trace_rms(d));
    return 0;
  }
  throw epat::FormatError(path + ": not an EPF1 or EPT1 file");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Impedance-enclosure photoacoustic reconstruction toolkit"};
  app.require_subcommand(1);
  Common common;

  auto *mk = app.add_subcommand("make-phantom", "sample a phantom onto a grid");
  std::string ph_spec, ph_out;
  int ph_n = 65;
  double ph_lx = 1.0, ph_ly = 1.0;
  mk->add_option("--spec", ph_spec, "gauss:x,y,sigma,amp;... | disk:... | sdisk:...[@w] | random:kind,count,seed")
      ->required();
  mk->add_option("--n", ph_n, "nodes per axis")->capture_default_str();
  mk->add_option("--lx", ph_lx)->capture_default_str();
  mk->add_option("--ly", ph_ly)->capture_default_str();
  mk->add_option("--out", ph_out)->required();
  mk->add_option("--pgm", common.pgm, "also write a PGM image");

  auto *sim = app.add_subcommand("simulate", "generate boundary data for a phantom");
  std::string sim_phantom, sim_out;
  double sim_tau = 0.0, sim_noise = 0.0;
  std::uint64_t sim_seed = 0;
  int sim_fine = 2;
  sim->add_option("--phantom", sim_phantom)->required()->check(CLI::ExistingFile);
  add_medium(sim, common);
  add_boundary(sim, common);
  sim->add_option("--tau", sim_tau)->required();
  sim->add_option("--out", sim_out)->required();
  sim->add_option("--noise", sim_noise, "Gaussian noise level relative to trace RMS")->capture_default_str();
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--fine-factor", sim_fine, "generate on a grid refined by this factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--cfl", common.cfl)->capture_default_str();

  auto *rec = app.add_subcommand("reconstruct", "recover the initial pressure from data");
  std::string rec_method, rec_data, rec_out, rec_hist, rec_truth;
  double rec_tol = 1e-8, rec_tau_hat = 0.0;
  int rec_max = 0;
  rec->add_option("method", rec_method)->required()->check(CLI::IsMember({"cg", "neumann"}));
  rec->add_option("--data", rec_data)->required()->check(CLI::ExistingFile);
  add_medium(rec, common);
  auto *rec_lambda = rec->add_option("--lambda", common.lambda, "must agree with the data file when given");
  rec->add_option("--gamma", common.gamma);
  rec->add_option("--out", rec_out)->required();
  rec->add_option("--history", rec_hist, "CSV of per-iteration residuals or updates");
  rec->add_option("--tol", rec_tol)->capture_default_str();
  rec->add_option("--max-iter", rec_max, "default 200 (cg) or 100 (neumann)");
  rec->add_option("--truth", rec_truth, "reference field; prints the relative error");
  rec->add_option("--tau-hat", rec_tau_hat, "warn when the data window is shorter than this");
  rec->add_option("--cfl", common.cfl)->capture_default_str();
  rec->add_option("--pgm", common.pgm, "also write a PGM image");

  auto *gcc = app.add_subcommand("gcc", "ray-tracing probe of the observation geometry");
  std::string gcc_report, gcc_fan = "uniform";
  int gcc_n = 65, gcc_points = 16, gcc_dirs = 32;
  double gcc_tmax = 10.0, gcc_ds = 1e-3, gcc_half = 10.0;
  add_medium(gcc, common);
  gcc->add_option("--gamma-spec", common.lambda, "observed set, same syntax as --lambda")->required();
  gcc->add_option("--n", gcc_n, "boundary resolution (nodes per axis)")->capture_default_str();
  gcc->add_option("--report", gcc_report, "per-ray CSV");
  gcc->add_option("--points", gcc_points, "start lattice is points x points")->capture_default_str();
  gcc->add_option("--dirs", gcc_dirs)->capture_default_str();
  gcc->add_option("--t-max", gcc_tmax)->capture_default_str();
  gcc->add_option("--ds", gcc_ds)->capture_default_str();
  gcc->add_option("--fan", gcc_fan)->check(CLI::IsMember({"uniform", "horizontal", "vertical"}))->capture_default_str();
  gcc->add_option("--half-angle", gcc_half, "sector half-width in degrees")->capture_default_str();

  auto *adj = app.add_subcommand("adjoint-check", "pairing test of the control operator and its adjoint");
  std::string adj_mode = "both", adj_report;
  int adj_trials = 5, adj_n = 16;
  double adj_tau = 1.0;
  std::uint64_t adj_seed = 1;
  adj->add_option("--mode", adj_mode)->check(CLI::IsMember({"exact", "pde", "both"}))->capture_default_str();
  adj->add_option("--trials", adj_trials)->capture_default_str();
  adj->add_option("--seed", adj_seed)->capture_default_str();
  adj->add_option("--n", adj_n)->capture_default_str();
  adj->add_option("--tau", adj_tau)->capture_default_str();
  adj->add_option("--report", adj_report, "CSV output (default stdout)");
  add_medium(adj, common);
  add_boundary(adj, common);

  auto *en = app.add_subcommand("energy-check", "discrete energy along a forward solve");
  std::string en_phantom, en_out;
  double en_tau = 1.0;
  en->add_option("--phantom", en_phantom)->required()->check(CLI::ExistingFile);
  add_medium(en, common);
  add_boundary(en, common);
  en->add_option("--tau", en_tau)->capture_default_str();
  en->add_option("--out", en_out, "CSV output (default stdout)");

  auto *info = app.add_subcommand("info", "print the header of an EPF1 or EPT1 file");
  std::string info_path;
  info->add_option("file", info_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*mk) return cmd_make_phantom(ph_spec, ph_n, ph_lx, ph_ly, ph_out, common.pgm);
    if (*sim) return cmd_simulate(common, sim_phantom, sim_tau, sim_out, sim_noise, sim_seed, sim_fine);
    if (*rec) {
      const int max_iter = rec_max > 0 ? rec_max : (rec_method == "cg" ? 200 : 100);
      return cmd_reconstruct(common, rec_method, rec_data, rec_out, rec_hist, rec_tol, max_iter, rec_truth,
                             rec_tau_hat, rec_lambda->count() > 0);
    }
    if (*gcc) return cmd_gcc(common, gcc_n, gcc_report, gcc_points, gcc_dirs, gcc_tmax, gcc_ds, gcc_fan, gcc_half);
    if (*adj) return cmd_adjoint_check(common, adj_n, adj_tau, adj_mode, adj_trials, adj_seed, adj_report);
    if (*en) return cmd_energy_check(common, en_phantom, en_tau, en_out);
    if (*info) return cmd_info(info_path);
  } catch (const epat::Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
