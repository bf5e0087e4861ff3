#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace spinmesh {

/// Pure d-level state; sum |C_nu|^2 = 1 within 1e-12.
struct QuditState {
  Eigen::VectorXcd amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }
  void validate(double tol = 1e-12) const;
};

/// d-1 polar angles in [0, pi/2] and d-1 azimuthal angles in [0, 2*pi);
/// polar[p-1] holds angle index p = 1..d-1.
struct HurwitzAngles {
  std::vector<double> polar;
  std::vector<double> azimuthal;

  int dim() const { return static_cast<int>(polar.size()) + 1; }
};

/// Amplitudes (cos t_{d-1}, sin t_{d-1} cos t_{d-2} e^{i x_{d-1}}, ...,
/// prod sin t_i e^{i x_1}), k-th tuple entry assigned to level nu = k-1.
QuditState hurwitz_to_state(const HurwitzAngles& angles);

/// Total volume of the pure-state manifold: pi^(d-1) / (d-1).
double total_volume(int d);

/// Counter-based uniform stream: the draw sequence for sample `index` is a
/// pure function of (seed, index), so any partitioning of samples across
/// workers reproduces the serial stream.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index);
  std::uint64_t next_u64();
  double next_uniform();  // [0, 1)

 private:
  std::uint64_t state_;
};

/// Draws a state from the uniform (Hurwitz volume) measure by inverse-CDF:
/// theta_p = asin(u^(1/(2p))), chi_p uniform on [0, 2*pi).
QuditState sample_uniform(int d, std::uint64_t seed, std::uint64_t index);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Worker count resolution: explicit argument > SPINMESH_THREADS env var >
/// hardware concurrency.  Results are independent of the worker count.
int resolve_thread_count(int requested = 0);

/// Mean and standard error of f over uniform samples.  Deterministic for
/// fixed (seed, n_samples) under any thread count.
MonteCarloEstimate average(const std::function<double(const QuditState&)>& f,
                           int d, std::int64_t n_samples, std::uint64_t seed,
                           int threads = 0);

}  // namespace spinmesh
