// spinmesh: experiment harness for spin-network state transfer.
//
// Subcommands: certify, fig2, fig3, avg-fidelity, zeta, selftest.
// Exit codes: 0 success, 1 certification/validation failure, 2 usage error,
// 3 numeric error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spinmesh/bath.hpp"
#include "spinmesh/errors.hpp"
#include "spinmesh/manybody.hpp"
#include "spinmesh/qudit.hpp"
#include "spinmesh/spectral.hpp"
#include "spinmesh/topology.hpp"

namespace {

using namespace spinmesh;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot open output file: " + path);
      stream = &file;
    }
  }
  std::ostream& out() { return *stream; }
};

struct TopologyOptions {
  std::string shape = "hypercube";  // hypercube | engineered | uniform | custom
  int theta = 1;
  int folds = 3;
  int n_sites = 8;
  double kappa = 1.0;
  double g0 = 1.0;
  double S0 = 0.5;
  std::string matrix_file;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--shape", shape, "hypercube | engineered | uniform | custom")
        ->check(CLI::IsMember({"hypercube", "engineered", "uniform", "custom"}));
    cmd->add_option("--theta", theta, "hypercube block (1 or 2)");
    cmd->add_option("--g", folds, "hypercube fold count");
    cmd->add_option("--N0", n_sites, "chain site count");
    cmd->add_option("--kappa", kappa, "hypercube/uniform coupling strength");
    cmd->add_option("--g0", g0, "engineered-chain coupling parameter");
    cmd->add_option("--S0", S0, "channel spin magnitude (half-integer)");
    cmd->add_option("--matrix", matrix_file, "custom adjacency file");
  }

  NetworkSpec spec() const {
    NetworkSpec s;
    s.theta = theta;
    s.folds = folds;
    s.n_sites = n_sites;
    s.kappa = kappa;
    s.g0 = g0;
    s.S0 = S0;
    if (shape == "hypercube") {
      s.kind = NetworkKind::Hypercube;
    } else if (shape == "engineered") {
      s.kind = NetworkKind::EngineeredChain;
    } else if (shape == "uniform") {
      s.kind = NetworkKind::UniformChain;
    } else {
      s.kind = NetworkKind::Custom;
      s.custom_adjacency = read_coupling_matrix_file(matrix_file).entries;
    }
    return s;
  }

  std::string label() const {
    if (shape == "hypercube") {
      return "hypercube_t" + std::to_string(theta) + "g" + std::to_string(folds);
    }
    if (shape == "custom") return "custom";
    return shape + "_chain_N" + std::to_string(n_sites);
  }

  double closed_form_time() const {
    if (shape == "hypercube") return optimal_time_hypercube(theta, S0, kappa);
    if (shape == "engineered") return optimal_time_chain(S0, g0);
    // No closed-form transfer time exists; probe with the engineered formula.
    return optimal_time_chain(S0, kappa);
  }

  double expected_phase() const {
    if (shape == "hypercube") return hypercube_swap_phase(theta, folds);
    return chain_swap_phase(n_sites);
  }

  void echo(std::ostream& os) const {
    os << "# shape=" << shape;
    if (shape == "hypercube") {
      os << " theta=" << theta << " g=" << folds << " kappa=" << fmt(kappa);
    } else if (shape == "engineered") {
      os << " N0=" << n_sites << " g0=" << fmt(g0);
    } else if (shape == "uniform") {
      os << " N0=" << n_sites << " kappa=" << fmt(kappa);
    } else {
      os << " matrix=" << matrix_file;
    }
    os << " S0=" << fmt(S0) << "\n";
  }
};

int run_certify(const TopologyOptions& topo, double time_override,
                int pair_override, double tol_modulus, double tol_phase,
                const std::string& out_path) {
  NetworkSpec spec = topo.spec();
  CouplingMatrix k = spec.coupling_matrix();
  SpectralForm form = diagonalize(k);
  const double t =
      time_override > 0 ? time_override : topo.closed_form_time();
  Propagator u = propagator(form, spec.S0, t);

  std::vector<std::pair<int, int>> pairs;
  if (pair_override > 0) {
    pairs.emplace_back(pair_override, k.sites() + 1 - pair_override);
  } else {
    pairs = antipodal_pairs(spec);
  }

  Output output(out_path);
  auto& os = output.out();
  topo.echo(os);
  os << "# time=" << fmt(t) << " tol_modulus=" << fmt(tol_modulus)
     << " tol_phase=" << fmt(tol_phase) << "\n";
  os << "m,mbar,modulus,phase,residual,leakage,phase_deviation\n";
  bool ok = true;
  const double expected = topo.expected_phase();
  for (auto pair : pairs) {
    SwapCertificate cert = certify_swap(u, pair, expected);
    os << cert.m << ',' << cert.mbar << ',' << fmt(cert.amplitude_modulus)
       << ',' << fmt(cert.phase) << ',' << fmt(cert.residual) << ','
       << fmt(cert.leakage) << ',' << fmt(*cert.phase_deviation) << "\n";
    if (cert.residual > tol_modulus || *cert.phase_deviation > tol_phase) {
      ok = false;
    }
  }
  os << "# certified=" << (ok ? "yes" : "no") << "\n";
  return ok ? 0 : 1;
}

void write_estimate_rows(std::ostream& os, const std::string& label, int d,
                         double S0, double t, const ExactAverageResult& r) {
  os << label << ',' << d << ',' << fmt(S0) << ',' << fmt(t) << ','
     << fmt(r.corrected.mean) << ',' << fmt(r.corrected.std_error) << ','
     << r.corrected.n_samples << ',' << r.corrected.seed << ",1\n";
  os << label << ',' << d << ',' << fmt(S0) << ',' << fmt(t) << ','
     << fmt(r.uncorrected.mean) << ',' << fmt(r.uncorrected.std_error) << ','
     << r.uncorrected.n_samples << ',' << r.uncorrected.seed << ",0\n";
}

int run_fig2(TopologyOptions topo, std::vector<int> d_list, double s0_min,
             double s0_max, double s0_step, std::int64_t samples,
             std::uint64_t seed, int threads, const std::string& out_path) {
  Output output(out_path);
  auto& os = output.out();
  os << "# fig2 samples=" << samples << " seed=" << seed << " S0_grid=["
     << fmt(s0_min) << ':' << fmt(s0_max) << ':' << fmt(s0_step) << "]\n";
  topo.echo(os);
  os << "topology,d,S0,t,mean_F,std_err,n_samples,seed,gauge_corrected\n";
  for (int d : d_list) {
    for (double S0 = s0_min; S0 <= s0_max + 1e-9; S0 += s0_step) {
      if (2.0 * S0 + 1e-9 < d - 1) continue;  // level nu needs n_u = nu
      topo.S0 = S0;
      NetworkSpec spec = topo.spec();
      const double t = topo.closed_form_time();
      ExactAverageResult r =
          average_fidelity_exact(spec, d, t, samples, seed, threads);
      write_estimate_rows(os, topo.label(), d, S0, t, r);
    }
  }
  return 0;
}

int run_fig3(char panel, const Fig3Config& config, const std::string& out_path) {
  std::vector<Fig3Row> rows = fig3_sweep(panel, config);
  Output output(out_path);
  auto& os = output.out();
  os << "# fig3 panel=" << panel << " S0=" << fmt(config.S0)
     << " S=" << fmt(config.S) << " J=" << fmt(config.J)
     << " lattice=" << (config.lattice == Lattice::SimpleCubic ? "sc" : "bcc")
     << " grid_points=" << config.grid_points << "\n";
  if (panel == 'b') {
    os << "# J0=" << fmt(config.panel_b_J0) << " (panel default)\n";
  }
  if (panel == 'c') {
    os << "# T=" << fmt(config.fixed_T_over_TN) << "*T_N (panel default)\n";
  }
  os << "panel,d,sweep_var,sweep_value,S0,tau_prime,tau_c,avg_F\n";
  for (const auto& row : rows) {
    os << row.panel << ',' << row.d << ',' << row.sweep_var << ','
       << fmt(row.sweep_value) << ',' << fmt(row.S0) << ','
       << fmt(row.tau_prime) << ',' << fmt(row.tau_c) << ','
       << fmt(row.avg_fidelity) << "\n";
  }
  return 0;
}

int run_avg_fidelity(TopologyOptions topo, int d, double time_override,
                     std::int64_t samples, std::uint64_t seed, int threads,
                     const std::string& out_path) {
  NetworkSpec spec = topo.spec();
  const double t = time_override > 0 ? time_override : topo.closed_form_time();
  ExactAverageResult r = average_fidelity_exact(spec, d, t, samples, seed, threads);
  Output output(out_path);
  auto& os = output.out();
  topo.echo(os);
  os << "# d=" << d << " time=" << fmt(t) << " samples=" << samples
     << " seed=" << seed << "\n";
  os << "topology,d,S0,t,mean_F,std_err,n_samples,seed,gauge_corrected\n";
  write_estimate_rows(os, topo.label(), d, topo.S0, t, r);
  return 0;
}

int run_zeta(const std::string& lattice_name, int resolution,
             const std::string& out_path) {
  Lattice lattice =
      lattice_name == "sc" ? Lattice::SimpleCubic : Lattice::BodyCenteredCubic;
  double recomputed = zeta_recompute(lattice, resolution);
  double stored = zeta(lattice);
  Output output(out_path);
  auto& os = output.out();
  os << "# zeta lattice=" << lattice_name << " resolution=" << resolution << "\n";
  os << "lattice,resolution,recomputed,stored,abs_diff\n";
  os << lattice_name << ',' << resolution << ',' << fmt(recomputed) << ','
     << fmt(stored) << ',' << fmt(std::abs(recomputed - stored)) << "\n";
  return 0;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  {  // cube swap certification
    NetworkSpec spec;
    spec.kind = NetworkKind::Hypercube;
    spec.theta = 1;
    spec.folds = 3;
    Propagator u = propagator(diagonalize(spec.coupling_matrix()), spec.S0,
                              optimal_time_hypercube(1, spec.S0, spec.kappa));
    bool ok = true;
    for (auto pair : antipodal_pairs(spec)) {
      SwapCertificate cert = certify_swap(u, pair, hypercube_swap_phase(1, 3));
      ok = ok && cert.residual < 1e-10 && *cert.phase_deviation < 1e-8;
    }
    check("cube swap certificate", ok);
  }
  {  // engineered chain mirror swap
    NetworkSpec spec;
    spec.kind = NetworkKind::EngineeredChain;
    spec.n_sites = 8;
    Propagator u = propagator(diagonalize(spec.coupling_matrix()), spec.S0,
                              optimal_time_chain(spec.S0, spec.g0));
    SwapCertificate cert = certify_swap(u, {1, 8}, chain_swap_phase(8));
    check("engineered chain mirror swap",
          cert.residual < 1e-10 && *cert.phase_deviation < 1e-8);
  }
  {  // sampler normalization
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
      QuditState s = sample_uniform(4, 7, i);
      ok = ok && std::abs(s.amplitudes.squaredNorm() - 1.0) < 1e-12;
    }
    check("uniform sampler normalization", ok);
  }
  {  // closed-form dephased average vs Monte Carlo
    BathParams p;
    p.J0 = 500.0;
    p.T = 0.05 * neel_temperature(p);
    DephasingModel model = make_dephasing_model(p, std::numbers::pi / 2, 3);
    Eigen::MatrixXd dmat =
        decoherence_matrix(model, DecoherenceMode::ThermodynamicLimit);
    double closed = average_fidelity_dephased(3, dmat);
    MonteCarloEstimate mc = average(
        [&](const QuditState& s) { return fidelity_dephased(s, dmat); }, 3,
        20000, 11);
    check("dephased average closed form vs MC",
          std::abs(mc.mean - closed) < 3.0 * mc.std_error + 1e-12);
  }
  std::cout << (failures == 0 ? "selftest OK\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-network state transfer toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file");

  std::string out_path;
  std::uint64_t seed = 1;
  std::int64_t samples = 20000;
  int threads = 0;
  std::string format = "csv";
  app.add_option("--out", out_path, "output path ('-' for stdout)")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
  app.add_option("--threads", threads, "worker cap (0 = SPINMESH_THREADS/auto)");

  // certify
  auto* certify = app.add_subcommand("certify", "certify swap at the closed-form time");
  TopologyOptions certify_topo;
  certify_topo.add_to(certify);
  double certify_time = -1.0;
  int certify_pair = -1;
  double tol_modulus = kDefaultModulusTol, tol_phase = kDefaultPhaseTol;
  certify->add_option("--time", certify_time, "override evolution time");
  certify->add_option("--pair", certify_pair, "certify a single sender site m");
  certify->add_option("--tol-modulus", tol_modulus, "residual tolerance");
  certify->add_option("--tol-phase", tol_phase, "phase tolerance (rad)");

  // fig2
  auto* fig2 = app.add_subcommand("fig2", "average exact fidelity vs S0");
  TopologyOptions fig2_topo;
  fig2_topo.add_to(fig2);
  std::vector<int> fig2_d = {3, 4, 5};
  double s0_min = 1.5, s0_max = 10.0, s0_step = 0.5;
  fig2->add_option("--d", fig2_d, "qudit dimensions");
  fig2->add_option("--S0-min", s0_min);
  fig2->add_option("--S0-max", s0_max);
  fig2->add_option("--S0-step", s0_step);
  fig2->add_option("--samples", samples, "MC samples per point");

  // fig3
  auto* fig3 = app.add_subcommand("fig3", "dephased average fidelity sweeps");
  std::string panel = "a";
  Fig3Config f3;
  std::string lattice_name = "sc";
  fig3->add_option("--panel", panel)->check(CLI::IsMember({"a", "b", "c"}))->required();
  fig3->add_option("--d", f3.d_list, "qudit dimensions");
  fig3->add_option("--grid-points", f3.grid_points);
  fig3->add_option("--S0", f3.S0, "channel spin entering tau'");
  fig3->add_option("--S", f3.S, "bath spin magnitude");
  fig3->add_option("--J", f3.J, "bath exchange energy");
  fig3->add_option("--g0", f3.fixed_g0, "fixed g0/J (panels a, b)");
  fig3->add_option("--J0", f3.fixed_J0, "fixed J0/J (panel c)");
  fig3->add_option("--J0-b", f3.panel_b_J0, "fixed J0/J for panel b");
  fig3->add_option("--T-over-TN", f3.fixed_T_over_TN, "fixed T/T_N (panels a, c)");
  fig3->add_option("--J0-max", f3.J0_max, "panel a sweep upper end");
  fig3->add_option("--T-min", f3.T_over_TN_min);
  fig3->add_option("--T-max", f3.T_over_TN_max);
  fig3->add_option("--g0-min", f3.g0_min);
  fig3->add_option("--g0-max", f3.g0_max);
  fig3->add_option("--lattice", lattice_name)->check(CLI::IsMember({"sc", "bcc"}));

  // avg-fidelity
  auto* avg = app.add_subcommand("avg-fidelity", "exact MC average at one point");
  TopologyOptions avg_topo;
  avg_topo.add_to(avg);
  int avg_d = 3;
  double avg_time = -1.0;
  avg->add_option("--d", avg_d, "qudit dimension");
  avg->add_option("--time", avg_time, "override evolution time");
  avg->add_option("--samples", samples, "MC samples");

  // zeta
  auto* zeta_cmd = app.add_subcommand("zeta", "recompute the Brillouin-zone constant");
  std::string zeta_lattice = "sc";
  int zeta_resolution = 128;
  zeta_cmd->add_option("--lattice", zeta_lattice)->check(CLI::IsMember({"sc", "bcc"}));
  zeta_cmd->add_option("--resolution", zeta_resolution, "per-axis grid points (>= 32)");

  // selftest
  app.add_subcommand("selftest", "run quick internal checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (certify->parsed()) {
      return run_certify(certify_topo, certify_time, certify_pair, tol_modulus,
                         tol_phase, out_path);
    }
    if (fig2->parsed()) {
      return run_fig2(fig2_topo, fig2_d, s0_min, s0_max, s0_step, samples, seed,
                      threads, out_path);
    }
    if (fig3->parsed()) {
      f3.lattice = lattice_name == "sc" ? Lattice::SimpleCubic
                                        : Lattice::BodyCenteredCubic;
      return run_fig3(panel[0], f3, out_path);
    }
    if (avg->parsed()) {
      return run_avg_fidelity(avg_topo, avg_d, avg_time, samples, seed, threads,
                              out_path);
    }
    if (zeta_cmd->parsed()) {
      return run_zeta(zeta_lattice, zeta_resolution, out_path);
    }
    return run_selftest();
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
