#include "spinmesh/manybody.hpp"

#include <cmath>
#include <complex>
#include <thread>

#include "spinmesh/errors.hpp"

namespace spinmesh {

namespace {

int magnon_cap(double S0) {
  double twice = 2.0 * S0;
  int cap = static_cast<int>(std::llround(twice));
  if (cap < 1 || std::abs(twice - cap) > 1e-9) {
    throw std::invalid_argument("S0 must be a positive half-integer");
  }
  return cap;
}

using EnvMap = std::unordered_map<std::string, std::complex<double>>;

// Environment-resolved amplitudes: maps[a] holds, for each occupation of the
// sites other than `receiver`, the amplitude of the basis state with
// receiver occupation a.
std::vector<EnvMap> environment_maps(const SectorBasis& basis,
                                     const Eigen::VectorXcd& amplitudes,
                                     int receiver) {
  std::vector<EnvMap> maps(basis.total + 1);
  std::string env;
  env.resize(basis.n_sites - 1);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& occ = basis.states[i];
    int a = occ[receiver];
    int pos = 0;
    for (int u = 0; u < basis.n_sites; ++u) {
      if (u != receiver) env[pos++] = static_cast<char>(occ[u]);
    }
    maps[a][env] = amplitudes(static_cast<Eigen::Index>(i));
  }
  return maps;
}

std::complex<double> env_inner(const EnvMap& lhs, const EnvMap& rhs) {
  std::complex<double> sum = 0.0;
  const EnvMap& small = lhs.size() <= rhs.size() ? lhs : rhs;
  const EnvMap& large = lhs.size() <= rhs.size() ? rhs : lhs;
  for (const auto& [env, amp] : small) {
    auto it = large.find(env);
    if (it == large.end()) continue;
    if (&small == &lhs) {
      sum += amp * std::conj(it->second);
    } else {
      sum += it->second * std::conj(amp);
    }
  }
  return sum;
}

}  // namespace

std::string SectorBasis::key(const std::vector<int>& occ) {
  std::string k(occ.size(), '\0');
  for (std::size_t i = 0; i < occ.size(); ++i) k[i] = static_cast<char>(occ[i]);
  return k;
}

int SectorBasis::find(const std::vector<int>& occ) const {
  auto it = index.find(key(occ));
  return it == index.end() ? -1 : it->second;
}

std::uint64_t bounded_composition_count(int n_sites, int total, int cap) {
  // dp[t] = compositions of t seen so far; one site added per pass.
  std::vector<std::uint64_t> dp(total + 1, 0);
  dp[0] = 1;
  for (int s = 0; s < n_sites; ++s) {
    std::vector<std::uint64_t> next(total + 1, 0);
    for (int t = 0; t <= total; ++t) {
      if (!dp[t]) continue;
      for (int k = 0; k <= cap && t + k <= total; ++k) next[t + k] += dp[t];
    }
    dp.swap(next);
  }
  return dp[total];
}

SectorBasis build_sector_basis(int n_sites, int total, double S0,
                               std::size_t size_cap) {
  if (n_sites < 1 || total < 0) {
    throw std::invalid_argument("need n_sites >= 1 and magnon number >= 0");
  }
  const int cap = magnon_cap(S0);
  const std::uint64_t count = bounded_composition_count(n_sites, total, cap);
  if (count > size_cap) {
    throw SizeError("sector basis of " + std::to_string(count) +
                    " states exceeds the cap of " + std::to_string(size_cap));
  }
  SectorBasis basis;
  basis.n_sites = n_sites;
  basis.total = total;
  basis.cap = cap;
  basis.states.reserve(count);

  std::vector<int> occ(n_sites, 0);
  // Lexicographic enumeration by direct recursion on the site index.
  auto rec = [&](auto&& self, int site, int remaining) -> void {
    if (site == n_sites) {
      if (remaining == 0) basis.states.push_back(occ);
      return;
    }
    int tail_room = (n_sites - site - 1) * cap;
    for (int k = std::max(0, remaining - tail_room);
         k <= std::min(cap, remaining); ++k) {
      occ[site] = k;
      self(self, site + 1, remaining - k);
    }
    occ[site] = 0;
  };
  rec(rec, 0, total);

  basis.index.reserve(basis.states.size());
  for (std::size_t i = 0; i < basis.states.size(); ++i) {
    basis.index.emplace(SectorBasis::key(basis.states[i]), static_cast<int>(i));
  }
  return basis;
}

Eigen::MatrixXd build_sector_hamiltonian(const CouplingMatrix& k, double S0,
                                         const SectorBasis& basis) {
  k.validate();
  if (k.sites() != basis.n_sites) {
    throw std::invalid_argument("basis and coupling matrix disagree on N0");
  }
  const int cap = magnon_cap(S0);
  if (cap != basis.cap) {
    throw std::invalid_argument("basis was built for a different S0");
  }
  const int n = k.sites();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<int> hopped;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& occ = basis.states[i];
    for (int u = 0; u < n; ++u) {
      if (occ[u] >= cap) continue;
      for (int v = 0; v < n; ++v) {
        if (v == u || occ[v] == 0 || k.entries(u, v) == 0.0) continue;
        hopped = occ;
        ++hopped[u];
        --hopped[v];
        int j = basis.find(hopped);
        // Exact ladder coefficients of the untruncated HP bosons.
        double w = std::sqrt(static_cast<double>(occ[u] + 1) * (cap - occ[u]) *
                             occ[v] * (cap - occ[v] + 1));
        h(j, static_cast<Eigen::Index>(i)) += k.entries(u, v) * w;
      }
    }
  }
  return h;
}

SectorEvolution::SectorEvolution(const Eigen::MatrixXd& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sector eigensolver failed (dim " +
                       std::to_string(hamiltonian.rows()) + ")");
  }
  energies_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::VectorXcd SectorEvolution::evolve(const Eigen::VectorXcd& amplitudes,
                                         double t) const {
  Eigen::VectorXcd modal = vectors_.adjoint() * amplitudes;
  for (Eigen::Index q = 0; q < modal.size(); ++q) {
    modal(q) *= std::polar(1.0, energies_(q) * t);
  }
  return vectors_ * modal;
}

Eigen::MatrixXcd receiver_density_matrix(
    const std::vector<Eigen::VectorXcd>& sector_amplitudes,
    const std::vector<const SectorBasis*>& bases, int receiver, int d) {
  if (static_cast<int>(sector_amplitudes.size()) != d ||
      static_cast<int>(bases.size()) != d) {
    throw std::logic_error("need one amplitude vector and basis per level");
  }
  std::vector<std::vector<EnvMap>> maps(d);
  for (int nu = 0; nu < d; ++nu) {
    if (sector_amplitudes[nu].size() !=
        static_cast<Eigen::Index>(bases[nu]->size())) {
      throw std::logic_error("amplitude vector does not match its basis");
    }
    maps[nu] = environment_maps(*bases[nu], sector_amplitudes[nu], receiver - 1);
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int nu = a; nu < d; ++nu) {
        int nup = nu - a + b;
        if (nup < b || nup >= d) continue;
        rho(a, b) += env_inner(maps[nu][a], maps[nup][b]);
      }
    }
  }
  return rho;
}

Eigen::MatrixXcd gauge_correct(const Eigen::MatrixXcd& rho, double phase) {
  Eigen::MatrixXcd out = rho;
  for (Eigen::Index a = 0; a < rho.rows(); ++a) {
    for (Eigen::Index b = 0; b < rho.cols(); ++b) {
      out(a, b) *= std::polar(1.0, -static_cast<double>(a - b) * phase);
    }
  }
  return out;
}

double fidelity(const Eigen::MatrixXcd& rho, const QuditState& target) {
  if (rho.rows() != target.dim()) {
    throw std::invalid_argument("density matrix / state dimension mismatch");
  }
  std::complex<double> f = target.amplitudes.adjoint() * rho * target.amplitudes;
  return f.real();
}

TransferChannel::TransferChannel(const NetworkSpec& spec, int d, double t,
                                 std::size_t basis_cap)
    : d_(d) {
  spec.validate();
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (d - 1 > magnon_cap(spec.S0)) {
    throw std::invalid_argument("need d-1 <= 2*S0 so every sent level exists");
  }
  const CouplingMatrix k = spec.coupling_matrix();
  const int n0 = k.sites();
  sender_ = 1;
  receiver_ = n0;
  switch (spec.kind) {
    case NetworkKind::Hypercube:
      ideal_phase_ = hypercube_swap_phase(spec.theta, spec.folds);
      break;
    case NetworkKind::UniformChain:
    case NetworkKind::EngineeredChain:
      ideal_phase_ = chain_swap_phase(n0);
      break;
    case NetworkKind::Custom:
      ideal_phase_ = 0.0;
      break;
  }

  // One eigendecomposition per magnon sector, reused for every sample.
  std::vector<SectorBasis> bases(d);
  std::vector<std::vector<EnvMap>> maps(d);
  for (int nu = 0; nu < d; ++nu) {
    bases[nu] = build_sector_basis(n0, nu, spec.S0, basis_cap);
    Eigen::VectorXcd column;
    if (nu == 0) {
      column = Eigen::VectorXcd::Ones(1);
    } else {
      SectorEvolution evolution(build_sector_hamiltonian(k, spec.S0, bases[nu]));
      std::vector<int> occ(n0, 0);
      occ[sender_ - 1] = nu;
      Eigen::VectorXcd init =
          Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bases[nu].size()));
      init(bases[nu].find(occ)) = 1.0;
      column = evolution.evolve(init, t);
    }
    maps[nu] = environment_maps(bases[nu], column, receiver_ - 1);
  }

  blocks_.assign(static_cast<std::size_t>(d) * d,
                 Eigen::MatrixXcd::Zero(d, d));
  for (int nu = 0; nu < d; ++nu) {
    for (int nup = 0; nup < d; ++nup) {
      Eigen::MatrixXcd& block = blocks_[static_cast<std::size_t>(nu) * d + nup];
      for (int a = 0; a <= nu; ++a) {
        int b = nup - nu + a;
        if (b < 0 || b > nup) continue;
        block(a, b) = env_inner(maps[nu][a], maps[nup][b]);
      }
    }
  }
}

Eigen::MatrixXcd TransferChannel::density_matrix(const QuditState& input) const {
  if (input.dim() != d_) {
    throw std::invalid_argument("input dimension does not match the channel");
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d_, d_);
  for (int nu = 0; nu < d_; ++nu) {
    for (int nup = 0; nup < d_; ++nup) {
      std::complex<double> w =
          input.amplitudes(nu) * std::conj(input.amplitudes(nup));
      rho += w * blocks_[static_cast<std::size_t>(nu) * d_ + nup];
    }
  }
  return rho;
}

double TransferChannel::fidelity_of(const QuditState& input,
                                    double gauge_phase) const {
  Eigen::MatrixXcd rho = density_matrix(input);
  if (gauge_phase != 0.0) rho = gauge_correct(rho, gauge_phase);
  return fidelity(rho, input);
}

ExactAverageResult average_fidelity_exact(const NetworkSpec& spec, int d,
                                          double t, std::int64_t n_samples,
                                          std::uint64_t seed, int threads) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const TransferChannel channel(spec, d, t);
  const double phase = channel.ideal_gauge_phase();

  std::vector<double> corrected(static_cast<std::size_t>(n_samples));
  std::vector<double> uncorrected(static_cast<std::size_t>(n_samples));
  const int workers = std::min<std::int64_t>(resolve_thread_count(threads), n_samples);
  auto run_block = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      QuditState state = sample_uniform(d, seed, static_cast<std::uint64_t>(i));
      Eigen::MatrixXcd rho = channel.density_matrix(state);
      uncorrected[static_cast<std::size_t>(i)] = fidelity(rho, state);
      corrected[static_cast<std::size_t>(i)] =
          fidelity(gauge_correct(rho, phase), state);
    }
  };
  if (workers <= 1) {
    run_block(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n_samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::int64_t lo = w * chunk;
      std::int64_t hi = std::min<std::int64_t>(lo + chunk, n_samples);
      if (lo >= hi) break;
      pool.emplace_back(run_block, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  auto reduce = [&](const std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n_samples);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double se = n_samples > 1 ? std::sqrt(ss / (n_samples - 1)) /
                                    std::sqrt(static_cast<double>(n_samples))
                              : 0.0;
    return MonteCarloEstimate{mean, se, n_samples, seed};
  };
  return ExactAverageResult{reduce(corrected), reduce(uncorrected)};
}

}  // namespace spinmesh
