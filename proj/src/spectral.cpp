#include "spinmesh/spectral.hpp"

#include <cmath>
#include <numbers>

#include "spinmesh/errors.hpp"

namespace spinmesh {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace

SpectralForm diagonalize(const CouplingMatrix& k) {
  k.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.entries);
  if (solver.info() != Eigen::Success) {
    std::string echo = "symmetric eigensolver failed on matrix:\n";
    for (int i = 0; i < k.sites(); ++i) {
      for (int j = 0; j < k.sites(); ++j) {
        echo += std::to_string(k.entries(i, j)) + (j + 1 < k.sites() ? " " : "\n");
      }
    }
    throw NumericError(echo);
  }
  // Rows of Q indexed by mode: Lambda = Q K Q^T.
  return SpectralForm{solver.eigenvalues(), solver.eigenvectors().transpose()};
}

Propagator propagator(const SpectralForm& form, double S0, double t) {
  const int n = static_cast<int>(form.eigenvalues.size());
  Eigen::VectorXcd phases(n);
  for (int q = 0; q < n; ++q) {
    phases(q) = std::polar(1.0, 2.0 * S0 * form.eigenvalues(q) * t);
  }
  Eigen::MatrixXcd u = form.q.transpose() * phases.asDiagonal() * form.q;
  return Propagator{t, std::move(u)};
}

double optimal_time_hypercube(int theta, double S0, double kappa) {
  if (theta != 1 && theta != 2) throw std::domain_error("theta must be 1 or 2");
  if (S0 <= 0 || kappa <= 0) throw std::invalid_argument("S0, kappa must be > 0");
  return kPi / (std::pow(2.0, 1.0 + 1.0 / theta) * S0 * kappa);
}

double optimal_time_chain(double S0, double g0) {
  if (S0 <= 0 || g0 <= 0) throw std::invalid_argument("S0, g0 must be > 0");
  // With K_{u,u+1} = g0 sqrt(u(N0-u)) the single-magnon matrix is 2*g0 times
  // the spin-L x-component, so the mirror rotation completes at pi/(4 S0 g0).
  return kPi / (4.0 * S0 * g0);
}

double hypercube_swap_phase(int theta, int folds) {
  return wrap_angle(0.5 * kPi * theta * folds);
}

double chain_swap_phase(int n_sites) {
  return wrap_angle(0.5 * kPi * (n_sites - 1));
}

SwapCertificate certify_swap(const Propagator& u, std::pair<int, int> pair,
                             std::optional<double> expected_phase) {
  const int n = static_cast<int>(u.matrix.rows());
  const auto [m, mbar] = pair;
  if (m < 1 || m > n || mbar < 1 || mbar > n) {
    throw std::invalid_argument("pair indices must be in 1..N0");
  }
  SwapCertificate cert;
  cert.m = m;
  cert.mbar = mbar;
  const std::complex<double> amp = u.matrix(mbar - 1, m - 1);
  cert.amplitude_modulus = std::abs(amp);
  cert.phase = std::arg(amp);
  cert.residual = 1.0 - cert.amplitude_modulus;
  double leak = 0.0;
  for (int v = 0; v < n; ++v) {
    if (v != mbar - 1) leak += std::norm(u.matrix(v, m - 1));
  }
  cert.leakage = leak;
  if (expected_phase) {
    cert.phase_deviation = std::abs(wrap_angle(cert.phase - *expected_phase));
  }
  return cert;
}

}  // namespace spinmesh
