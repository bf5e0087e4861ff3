#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>

#include "spinmesh/topology.hpp"

namespace spinmesh {

/// Eigendecomposition of a coupling matrix: Lambda = Q K Q^T with the rows
/// of Q indexed by mode q and eigenvalues ascending.
struct SpectralForm {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd q;  // orthogonal, rows are eigenvectors
};

SpectralForm diagonalize(const CouplingMatrix& k);

/// Free single-magnon propagator U = e^{i 2 S0 K t}; unitary and symmetric.
struct Propagator {
  double time = 0.0;
  Eigen::MatrixXcd matrix;
};

Propagator propagator(const SpectralForm& form, double S0, double t);

/// Swap time for a theta-block hypercube: pi / (2^(1+1/theta) S0 kappa).
/// Independent of the fold count.
double optimal_time_hypercube(int theta, double S0, double kappa);

/// Mirror-swap time of the engineered chain with K_{u,u+1} = g0 sqrt(u(N0-u)):
/// pi / (4 S0 g0), independent of N0.
double optimal_time_chain(double S0, double g0);

/// Per-magnon swap phase of a (theta, g) hypercube at the swap time:
/// arg(i^(theta*g)), in (-pi, pi].
double hypercube_swap_phase(int theta, int folds);

/// Per-magnon mirror-swap phase of the engineered chain: arg(i^(N0-1)).
double chain_swap_phase(int n_sites);

struct SwapCertificate {
  int m = 0, mbar = 0;                  // 1-based pair
  double amplitude_modulus = 0.0;       // |U_{mbar,m}|
  double phase = 0.0;                   // arg U_{mbar,m}
  double residual = 0.0;                // 1 - |U_{mbar,m}|
  double leakage = 0.0;                 // sum_{u != mbar} |U_{u,m}|^2
  std::optional<double> phase_deviation;  // vs expected phase, mod 2*pi
};

SwapCertificate certify_swap(const Propagator& u, std::pair<int, int> pair,
                             std::optional<double> expected_phase = {});

/// Default certification tolerances; configurable at the call sites.
inline constexpr double kDefaultModulusTol = 1e-8;
inline constexpr double kDefaultPhaseTol = 1e-6;

}  // namespace spinmesh
