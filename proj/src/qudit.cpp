#include "spinmesh/qudit.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace spinmesh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

void QuditState::validate(double tol) const {
  if (dim() < 2) throw std::invalid_argument("qudit dimension must be >= 2");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > tol) {
    throw std::invalid_argument("qudit state must be normalized");
  }
}

QuditState hurwitz_to_state(const HurwitzAngles& angles) {
  const int d = angles.dim();
  if (d < 2 || angles.azimuthal.size() != angles.polar.size()) {
    throw std::invalid_argument("need d-1 polar and d-1 azimuthal angles, d >= 2");
  }
  for (double t : angles.polar) {
    if (t < 0.0 || t > kPi / 2.0 + 1e-12) {
      throw std::domain_error("polar angles must lie in [0, pi/2]");
    }
  }
  for (double x : angles.azimuthal) {
    if (x < 0.0 || x >= 2.0 * kPi + 1e-12) {
      throw std::domain_error("azimuthal angles must lie in [0, 2*pi)");
    }
  }
  // polar[p-1] = theta_p, azimuthal[p-1] = chi_p.
  auto theta = [&](int p) { return angles.polar[p - 1]; };
  auto chi = [&](int p) { return angles.azimuthal[p - 1]; };

  Eigen::VectorXcd c(d);
  c(0) = std::cos(theta(d - 1));
  double sines = 1.0;  // running product sin(theta_{d-1}) ... sin(theta_{d-k})
  for (int k = 1; k <= d - 2; ++k) {
    sines *= std::sin(theta(d - k));
    c(k) = sines * std::cos(theta(d - 1 - k)) * std::polar(1.0, chi(d - k));
  }
  sines *= std::sin(theta(1));
  c(d - 1) = sines * std::polar(1.0, chi(1));
  return QuditState{std::move(c)};
}

double total_volume(int d) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  return std::pow(kPi, d - 1) / (d - 1);
}

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index)
    : state_(seed + (index + 1) * kGolden) {
  // Re-seed the counter with its own hash so the draw sequences of nearby
  // indices do not overlap; consecutive raw counters would otherwise share
  // all but one of their draws.
  state_ = splitmix64(state_);
}

std::uint64_t SampleStream::next_u64() { return splitmix64(state_); }

double SampleStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

QuditState sample_uniform(int d, std::uint64_t seed, std::uint64_t index) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  SampleStream stream(seed, index);
  HurwitzAngles angles;
  angles.polar.resize(d - 1);
  angles.azimuthal.resize(d - 1);
  for (int p = 1; p <= d - 1; ++p) {
    double u = stream.next_uniform();
    angles.polar[p - 1] = std::asin(std::pow(u, 1.0 / (2.0 * p)));
    angles.azimuthal[p - 1] = 2.0 * kPi * stream.next_uniform();
  }
  return hurwitz_to_state(angles);
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPINMESH_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

MonteCarloEstimate average(const std::function<double(const QuditState&)>& f,
                           int d, std::int64_t n_samples, std::uint64_t seed,
                           int threads) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(n_samples));
  const int workers = std::min<std::int64_t>(resolve_thread_count(threads), n_samples);

  auto run_block = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      values[static_cast<std::size_t>(i)] =
          f(sample_uniform(d, seed, static_cast<std::uint64_t>(i)));
    }
  };
  if (workers <= 1) {
    run_block(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (n_samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::int64_t lo = w * chunk;
      std::int64_t hi = std::min<std::int64_t>(lo + chunk, n_samples);
      if (lo >= hi) break;
      pool.emplace_back(run_block, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  // Fixed-order reduction keeps the result independent of the worker count.
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_samples);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double stderr_ = 0.0;
  if (n_samples > 1) {
    stderr_ = std::sqrt(ss / (n_samples - 1)) / std::sqrt((double)n_samples);
  }
  return MonteCarloEstimate{mean, stderr_, n_samples, seed};
}

}  // namespace spinmesh
