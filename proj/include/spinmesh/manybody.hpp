#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "spinmesh/qudit.hpp"
#include "spinmesh/spectral.hpp"
#include "spinmesh/topology.hpp"

namespace spinmesh {

inline constexpr std::size_t kDefaultBasisCap = 5'000'000;

/// Occupation basis of a fixed-magnon-number block: all vectors
/// (n_1..n_N0) with sum n and 0 <= n_u <= 2*S0, lexicographic order.
struct SectorBasis {
  int n_sites = 0;
  int total = 0;  // magnon number n
  int cap = 0;    // 2*S0 per site
  std::vector<std::vector<int>> states;
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return states.size(); }
  int find(const std::vector<int>& occ) const;  // -1 if absent
  static std::string key(const std::vector<int>& occ);
};

SectorBasis build_sector_basis(int n_sites, int total, double S0,
                               std::size_t size_cap = kDefaultBasisCap);

/// Number of bounded compositions of `total` into `n_sites` parts <= cap.
std::uint64_t bounded_composition_count(int n_sites, int total, int cap);

/// Exact XX Hamiltonian block: hop (n_u, n_v) -> (n_u+1, n_v-1) with weight
/// K_uv * sqrt((n_u+1)(2S0-n_u) n_v (2S0-n_v+1)); zero diagonal.
Eigen::MatrixXd build_sector_hamiltonian(const CouplingMatrix& k, double S0,
                                         const SectorBasis& basis);

/// Cached eigendecomposition of one sector block.  evolve applies phases
/// e^{+i E t}, the convention under which the n=1 sector reproduces the
/// single-magnon propagator e^{i 2 S0 K t} column-for-column.
class SectorEvolution {
 public:
  SectorEvolution() = default;
  explicit SectorEvolution(const Eigen::MatrixXd& hamiltonian);

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& amplitudes, double t) const;
  const Eigen::VectorXd& energies() const { return energies_; }

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;  // columns are eigenvectors
};

/// Reduced d x d density matrix of the receiver site from evolved sector
/// amplitude vectors (already weighted by the input amplitudes C_nu).
/// Entry (a, b) sums over sector pairs (nu, nu') with nu - a = nu' - b and
/// identical environment occupation.
Eigen::MatrixXcd receiver_density_matrix(
    const std::vector<Eigen::VectorXcd>& sector_amplitudes,
    const std::vector<const SectorBasis*>& bases, int receiver, int d);

/// Local level-dependent rotation: rho[a,b] *= e^{-i (a-b) phase}.
Eigen::MatrixXcd gauge_correct(const Eigen::MatrixXcd& rho, double phase);

/// <phi| rho |phi>, clamped real part.
double fidelity(const Eigen::MatrixXcd& rho, const QuditState& target);

/// Precomputed channel for one (network, d, S0, t): evolved unit columns per
/// sector and the bilinear transfer blocks M^(nu,nu') such that
/// rho = sum C_nu conj(C_nu') M^(nu,nu').  Shared read-only across samples.
class TransferChannel {
 public:
  TransferChannel(const NetworkSpec& spec, int d, double t,
                  std::size_t basis_cap = kDefaultBasisCap);

  Eigen::MatrixXcd density_matrix(const QuditState& input) const;
  /// Fidelity of `input` through the channel; gauge-corrected when
  /// `gauge_phase` is nonzero.
  double fidelity_of(const QuditState& input, double gauge_phase) const;

  int sender() const { return sender_; }
  int receiver() const { return receiver_; }
  /// Per-magnon swap phase of the ideal free-boson limit for this network.
  double ideal_gauge_phase() const { return ideal_phase_; }

 private:
  int d_;
  int sender_, receiver_;  // 1-based
  double ideal_phase_;
  // blocks_[nu*d + nu'] is the d x d matrix M^(nu,nu').
  std::vector<Eigen::MatrixXcd> blocks_;
};

struct ExactAverageResult {
  MonteCarloEstimate corrected;
  MonteCarloEstimate uncorrected;
};

/// Monte Carlo average of the exact transfer fidelity over uniform inputs,
/// with and without the gauge correction.
ExactAverageResult average_fidelity_exact(const NetworkSpec& spec, int d,
                                          double t, std::int64_t n_samples,
                                          std::uint64_t seed, int threads = 0);

}  // namespace spinmesh
