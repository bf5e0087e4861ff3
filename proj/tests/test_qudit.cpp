#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spinmesh/qudit.hpp"

using namespace spinmesh;

namespace {
constexpr double kPi = std::numbers::pi;

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double dmax = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    double fa = double(i) / a.size();
    double fb = double(j) / b.size();
    dmax = std::max(dmax, std::abs(fa - fb));
  }
  return dmax;
}
}  // namespace

TEST_CASE("hurwitz parametrization, d = 2") {
  HurwitzAngles a;
  a.polar = {kPi / 4.0};
  a.azimuthal = {kPi / 2.0};
  QuditState s = hurwitz_to_state(a);
  REQUIRE(s.dim() == 2);
  CHECK(std::abs(s.amplitudes(0) - std::complex<double>(1.0 / std::sqrt(2.0))) <
        1e-14);
  CHECK(std::abs(s.amplitudes(1) -
                 std::complex<double>(0.0, 1.0 / std::sqrt(2.0))) < 1e-14);

  a.polar = {0.0};
  a.azimuthal = {1.0};
  s = hurwitz_to_state(a);
  CHECK(std::abs(s.amplitudes(0) - 1.0) < 1e-15);
  CHECK(std::abs(s.amplitudes(1)) < 1e-15);
}

TEST_CASE("hurwitz parametrization, d = 3") {
  HurwitzAngles a;
  a.polar = {kPi / 3.0, kPi / 6.0};  // theta_1, theta_2
  a.azimuthal = {0.7, 1.9};
  QuditState s = hurwitz_to_state(a);
  REQUIRE(s.dim() == 3);
  // level 0 carries cos(theta_2), level 2 the full sine product with chi_1
  CHECK(std::abs(s.amplitudes(0) - std::cos(kPi / 6.0)) < 1e-14);
  std::complex<double> l1 =
      std::sin(kPi / 6.0) * std::cos(kPi / 3.0) * std::polar(1.0, 1.9);
  std::complex<double> l2 =
      std::sin(kPi / 6.0) * std::sin(kPi / 3.0) * std::polar(1.0, 0.7);
  CHECK(std::abs(s.amplitudes(1) - l1) < 1e-14);
  CHECK(std::abs(s.amplitudes(2) - l2) < 1e-14);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("sampled states are normalized") {
  for (int d : {2, 3, 5}) {
    for (std::uint64_t i = 0; i < 10000; ++i) {
      QuditState s = sample_uniform(d, 99, i);
      CHECK_NOTHROW(s.validate());
    }
  }
}

TEST_CASE("manifold volume") {
  CHECK(total_volume(2) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(total_volume(3) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-15));
  CHECK(total_volume(5) ==
        doctest::Approx(std::pow(kPi, 4) / 4.0).epsilon(1e-15));
}

TEST_CASE("sample stream is a pure function of (seed, index)") {
  SampleStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 16; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CHECK(SampleStream(42, 7).next_u64() != c.next_u64());
  CHECK(SampleStream(42, 7).next_u64() != d.next_u64());
  SampleStream u(1, 1);
  for (int i = 0; i < 1000; ++i) {
    double x = u.next_uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("measure moments") {
  const std::int64_t n = 100000;
  for (int d : {2, 3, 4, 5}) {
    // second moment per level: 1/d
    for (int nu : {0, d - 1}) {
      MonteCarloEstimate m2 = average(
          [nu](const QuditState& s) { return std::norm(s.amplitudes(nu)); }, d,
          n, 17);
      CHECK(std::abs(m2.mean - 1.0 / d) < 3.0 * m2.std_error);
    }
    // fourth moment: 2 / (d (d+1))
    MonteCarloEstimate m4 = average(
        [](const QuditState& s) {
          double p = std::norm(s.amplitudes(0));
          return p * p;
        },
        d, n, 18);
    CHECK(std::abs(m4.mean - 2.0 / (d * (d + 1.0))) < 3.0 * m4.std_error);
    // cross moment: 1 / (d (d+1))
    if (d > 1) {
      MonteCarloEstimate mc = average(
          [d](const QuditState& s) {
            return std::norm(s.amplitudes(0)) *
                   std::norm(s.amplitudes(d - 1));
          },
          d, n, 23);
      CHECK(std::abs(mc.mean - 1.0 / (d * (d + 1.0))) < 3.0 * mc.std_error);
    }
  }
}

TEST_CASE("d = 2 level population is uniform") {
  // For d = 2 the excited-level weight sin^2(theta_1) is uniform on [0, 1].
  const int n = 20000;
  std::vector<double> pop(n);
  for (int i = 0; i < n; ++i) {
    pop[i] = std::norm(sample_uniform(2, 5, i).amplitudes(1));
  }
  std::sort(pop.begin(), pop.end());
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    dmax = std::max(dmax, std::abs((i + 1.0) / n - pop[i]));
    dmax = std::max(dmax, std::abs(double(i) / n - pop[i]));
  }
  CHECK(dmax < 1.63 / std::sqrt(double(n)));  // 1% one-sample critical value
}

TEST_CASE("matches normalized complex Gaussian vectors") {
  // Independent construction of the uniform measure: normalize a vector of
  // i.i.d. complex Gaussians, then compare level-0 weights by a two-sample
  // Kolmogorov-Smirnov test at the 1% level.
  for (int d : {3, 5}) {
    const int n = 10000;
    std::vector<double> hurwitz(n), gauss(n);
    for (int i = 0; i < n; ++i) {
      hurwitz[i] = std::norm(sample_uniform(d, 31, i).amplitudes(0));
    }
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      double total = 0.0, first = 0.0;
      for (int k = 0; k < d; ++k) {
        double re = normal(rng), im = normal(rng);
        double w = re * re + im * im;
        if (k == 0) first = w;
        total += w;
      }
      gauss[i] = first / total;
    }
    double dmax = ks_two_sample(hurwitz, gauss);
    double critical = 1.628 * std::sqrt(2.0 / double(n));
    CHECK(dmax < critical);
  }
}

TEST_CASE("average") {
  MonteCarloEstimate one =
      average([](const QuditState&) { return 1.0; }, 3, 5000, 7);
  CHECK(one.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(one.std_error == doctest::Approx(0.0));
  CHECK(one.n_samples == 5000);

  MonteCarloEstimate norm = average(
      [](const QuditState& s) { return s.amplitudes.squaredNorm(); }, 4, 2000,
      7);
  CHECK(norm.mean == doctest::Approx(1.0).epsilon(1e-12));

  MonteCarloEstimate quartic = average(
      [](const QuditState& s) {
        double p = std::norm(s.amplitudes(0));
        return p * p;
      },
      3, 200000, 11);
  CHECK(std::abs(quartic.mean - 1.0 / 6.0) < 3.0 * quartic.std_error);
}

TEST_CASE("average is deterministic across thread counts") {
  auto f = [](const QuditState& s) { return std::norm(s.amplitudes(1)); };
  MonteCarloEstimate serial = average(f, 4, 9973, 123, 1);
  for (int threads : {2, 3, 8}) {
    MonteCarloEstimate parallel = average(f, 4, 9973, 123, threads);
    CHECK(parallel.mean == serial.mean);
    CHECK(parallel.std_error == serial.std_error);
  }
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_thread_count(5) == 5);
  CHECK(resolve_thread_count(0) >= 1);
}
