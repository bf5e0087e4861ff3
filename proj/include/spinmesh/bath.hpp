#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "spinmesh/qudit.hpp"

namespace spinmesh {

enum class Lattice { SimpleCubic, BodyCenteredCubic };

int coordination(Lattice lattice);  // 6 for sc, 8 for bcc

/// Antiferromagnetic bath parameters, k_B = hbar = 1.
struct BathParams {
  double J = 1.0;   // exchange energy > 0
  double J0 = 0.0;  // channel-bath coupling
  double S = 0.5;   // bath spin magnitude, half-integer > 0
  double T = 0.0;   // temperature, energy units
  Lattice lattice = Lattice::SimpleCubic;

  int z0() const { return coordination(lattice); }
  /// Throws std::invalid_argument outside the spin-wave validity window
  /// T <= 0.1 * T_N or for nonpositive parameters.
  void validate() const;
};

/// Structure factor gamma_k for scaled wave vector u = k*l (components in
/// [-pi, pi] cover the zone used here).
double structure_factor(const Eigen::Vector3d& k_scaled, Lattice lattice);

/// Exact magnon dispersion z0*J*S*sqrt(1 - gamma^2).
double dispersion_exact(const Eigen::Vector3d& k_scaled, const BathParams& p);

/// Linearized dispersion sqrt(2*z0)*J*S*x with x = k*l; used in all
/// finite-temperature integrals.
double dispersion_linear(double x, const BathParams& p);

/// Stored Brillouin-zone constants zeta = <(1-gamma_k)^-1>.
double zeta(Lattice lattice);  // 1.51638 (sc), 1.39320 (bcc)

/// Recomputes zeta by midpoint integration over the zone at the given
/// per-axis resolution, Richardson-extrapolated against the half grid.
double zeta_recompute(Lattice lattice, int resolution);

/// Neel temperature z0*J*S*(S+1) / (3*zeta).
double neel_temperature(const BathParams& p);

/// Thermodynamic-limit constant pi^2 T^3 / (12 z0 sqrt(2 z0) J^3 S^3).
double xi0(const BathParams& p);

/// f_pm(phi) = int_0^inf x^2 ln[(1 - e^{+-i phi} e^{-w/T}) / (1 - e^{-w/T})] dx
/// with w = sqrt(2 z0) J S x; adaptive quadrature at relative tolerance 1e-9,
/// principal log branch.  Returns {f_plus, f_minus}.
std::pair<std::complex<double>, std::complex<double>> f_pm_quadrature(
    double phi, const BathParams& p);

struct DephasingModel {
  BathParams params;
  double tau_prime = 0.0;  // transfer time
  int d = 2;               // qudit dimension
  double xi0_value = 0.0;
  double tau_c = 0.0;      // pi / (J0 sqrt(xi0))
};

DephasingModel make_dephasing_model(const BathParams& params, double tau_prime,
                                    int d);

enum class DecoherenceMode { ThermodynamicLimit, FiniteN };

/// D_{nu,nu'} in (0, 1].  Thermodynamic limit: exp(-(dnu)^2 tau'^2 / tau_c^2).
/// FiniteN: phi = dnu J0 tau' / sqrt(N), then
/// exp(-(xi_+ + xi_-) (dnu)^2 J0^2 tau'^2 / (2 pi^2)) with xi_pm = f_pm/phi^2.
double decoherence_factor(int nu, int nu_prime, const DephasingModel& model,
                          DecoherenceMode mode, double n_bath = 0.0);

Eigen::MatrixXd decoherence_matrix(const DephasingModel& model,
                                   DecoherenceMode mode, double n_bath = 0.0);

/// F = sum_{nu,nu'} |C_nu|^2 |C_nu'|^2 D_{nu,nu'}.
double fidelity_dephased(const QuditState& state, const Eigen::MatrixXd& dmat);

/// Closed form <F> = (2d + sum_{nu != nu'} D_{nu,nu'}) / (d (d+1)).
double average_fidelity_dephased(int d, const Eigen::MatrixXd& dmat);

struct Fig3Row {
  char panel = 'a';
  int d = 3;
  std::string sweep_var;
  double sweep_value = 0.0;
  double S0 = 0.5;
  double tau_prime = 0.0;
  double tau_c = 0.0;
  double avg_fidelity = 0.0;
};

struct Fig3Config {
  std::vector<int> d_list = {3, 5};
  int grid_points = 101;
  double S0 = 0.5;      // enters only through tau' = pi/(4 S0 g0)
  double J = 1.0;
  double S = 0.5;
  // per-panel fixed values and sweep ranges (units of J / T_N)
  double fixed_g0 = 1.0;        // panels a, b
  double fixed_J0 = 5000.0;     // panel c
  double panel_b_J0 = 1000.0;   // panel b default, echoed in the output
  double fixed_T_over_TN = 0.05;  // panels a, c
  double J0_max = 1e4;            // panel a sweep [0, J0_max]
  double T_over_TN_min = 0.01, T_over_TN_max = 0.1;  // panel b
  double g0_min = 0.5, g0_max = 10.0;                // panel c
  Lattice lattice = Lattice::SimpleCubic;
};

std::vector<Fig3Row> fig3_sweep(char panel, const Fig3Config& config);

}  // namespace spinmesh
