#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "spinmesh/bath.hpp"

using namespace spinmesh;

namespace {
constexpr double kPi = std::numbers::pi;

BathParams cold_params(double J0) {
  BathParams p;
  p.J = 1.0;
  p.S = 0.5;
  p.J0 = J0;
  p.T = 0.05 * neel_temperature(p);
  return p;
}
}  // namespace

TEST_CASE("coordination numbers") {
  CHECK(coordination(Lattice::SimpleCubic) == 6);
  CHECK(coordination(Lattice::BodyCenteredCubic) == 8);
}

TEST_CASE("structure factor") {
  Eigen::Vector3d zero(0, 0, 0);
  CHECK(structure_factor(zero, Lattice::SimpleCubic) == 1.0);
  CHECK(structure_factor(zero, Lattice::BodyCenteredCubic) == 1.0);
  Eigen::Vector3d corner(kPi, kPi, kPi);
  CHECK(structure_factor(corner, Lattice::SimpleCubic) ==
        doctest::Approx(-1.0));
  CHECK(structure_factor(corner, Lattice::BodyCenteredCubic) ==
        doctest::Approx(0.0));
}

TEST_CASE("linear dispersion is the small-k limit of the exact one") {
  for (Lattice lattice : {Lattice::SimpleCubic, Lattice::BodyCenteredCubic}) {
    BathParams p;
    p.J = 1.3;
    p.S = 1.0;
    p.T = 0.01;
    p.lattice = lattice;
    Eigen::Vector3d dir = Eigen::Vector3d(1, 2, 2).normalized();
    for (double x : {1e-2, 1e-3}) {
      double exact = dispersion_exact(x * dir, p);
      double linear = dispersion_linear(x, p);
      CHECK(exact / linear == doctest::Approx(1.0).epsilon(10 * x * x));
    }
  }
  BathParams p;
  CHECK_THROWS_AS(dispersion_linear(-1.0, p), std::domain_error);
}

TEST_CASE("zone constants") {
  CHECK(zeta(Lattice::SimpleCubic) == 1.51638);
  CHECK(zeta(Lattice::BodyCenteredCubic) == 1.39320);
  for (Lattice lattice : {Lattice::SimpleCubic, Lattice::BodyCenteredCubic}) {
    double coarse = zeta_recompute(lattice, 64);
    double fine = zeta_recompute(lattice, 128);
    CHECK(std::abs(coarse - zeta(lattice)) < 5e-3);
    CHECK(std::abs(fine - zeta(lattice)) < 1e-3);
  }
  CHECK_THROWS_AS(zeta_recompute(Lattice::SimpleCubic, 8),
                  std::invalid_argument);
}

TEST_CASE("ordering temperature") {
  BathParams p;  // sc, J = 1, S = 1/2
  CHECK(neel_temperature(p) == doctest::Approx(0.98919).epsilon(1e-5));
}

TEST_CASE("parameter validation") {
  BathParams p = cold_params(10.0);
  CHECK_NOTHROW(p.validate());
  p.T = 0.11 * neel_temperature(p);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = cold_params(10.0);
  p.S = 0.6;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = cold_params(-1.0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("xi0") {
  BathParams p;
  p.J = 1.0;
  p.S = 1.0;
  p.T = 1.0;  // z0 = 6: pi^2 / (72 sqrt(12))
  CHECK(xi0(p) == doctest::Approx(0.0395710).epsilon(1e-4));
  // cubic growth in temperature
  BathParams q = p;
  q.T = 2.0;
  CHECK(xi0(q) / xi0(p) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("log-integral quadrature") {
  BathParams p = cold_params(100.0);
  auto [zp, zm] = f_pm_quadrature(0.0, p);
  CHECK(std::abs(zp) == 0.0);
  CHECK(std::abs(zm) == 0.0);

  auto [fp, fm] = f_pm_quadrature(0.3, p);
  // the two branches are complex conjugates
  CHECK(std::abs(fp - std::conj(fm)) < 1e-12 * std::abs(fp));
  // flipping the sign of phi swaps them
  auto [gp, gm] = f_pm_quadrature(-0.3, p);
  CHECK(std::abs(gp - fm) < 1e-12 * std::abs(fm));
  CHECK(std::abs(gm - fp) < 1e-12 * std::abs(fp));

  // small-phi limit: (f_+ + f_-) / phi^2 -> 2 * xi0
  double phi = 1e-3;
  auto [sp, sm] = f_pm_quadrature(phi, p);
  double xi_sum = (sp + sm).real() / (phi * phi);
  CHECK(xi_sum == doctest::Approx(2.0 * xi0(p)).epsilon(1e-3));
}

TEST_CASE("dephasing model assembly") {
  BathParams p = cold_params(1000.0);
  DephasingModel model = make_dephasing_model(p, 0.5, 3);
  CHECK(model.xi0_value == doctest::Approx(xi0(p)).epsilon(1e-15));
  CHECK(model.tau_c ==
        doctest::Approx(kPi / (p.J0 * std::sqrt(xi0(p)))).epsilon(1e-14));
  BathParams free = cold_params(0.0);
  CHECK(std::isinf(make_dephasing_model(free, 0.5, 3).tau_c));
  CHECK_THROWS_AS(make_dephasing_model(p, -1.0, 3), std::invalid_argument);
}

TEST_CASE("decoherence matrix structure") {
  DephasingModel model = make_dephasing_model(cold_params(2000.0), 0.5, 4);
  Eigen::MatrixXd dmat =
      decoherence_matrix(model, DecoherenceMode::ThermodynamicLimit);
  CHECK((dmat - dmat.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(dmat(i, i) == 1.0);
  CHECK(dmat.minCoeff() > 0.0);
  CHECK(dmat.maxCoeff() <= 1.0);
  // Gaussian in the level distance: ln D_{0,2} = 4 ln D_{0,1}
  CHECK(std::log(dmat(0, 2)) / std::log(dmat(0, 1)) ==
        doctest::Approx(4.0).epsilon(1e-10));
  CHECK(std::log(dmat(0, 3)) / std::log(dmat(0, 1)) ==
        doctest::Approx(9.0).epsilon(1e-10));
}

TEST_CASE("decoherence worsens with T, J0, and transfer time") {
  auto d01 = [](const BathParams& p, double tau) {
    DephasingModel m = make_dephasing_model(p, tau, 2);
    return decoherence_factor(1, 0, m, DecoherenceMode::ThermodynamicLimit);
  };
  BathParams base = cold_params(1000.0);
  BathParams hot = base;
  hot.T = 0.09 * neel_temperature(base);
  BathParams strong = base;
  strong.J0 = 2000.0;
  CHECK(d01(hot, 0.5) < d01(base, 0.5));
  CHECK(d01(strong, 0.5) < d01(base, 0.5));
  CHECK(d01(base, 1.0) < d01(base, 0.5));
}

TEST_CASE("finite bath converges to the thermodynamic limit") {
  DephasingModel model = make_dephasing_model(cold_params(1000.0), 0.5, 2);
  double thermo =
      decoherence_factor(1, 0, model, DecoherenceMode::ThermodynamicLimit);
  CHECK(thermo > 0.1);
  CHECK(thermo < 0.9);
  double prev = 1.0;
  for (double n : {1e8, 1e10, 1e12}) {
    double finite =
        decoherence_factor(1, 0, model, DecoherenceMode::FiniteN, n);
    double deviation = std::abs(finite - thermo) / thermo;
    CHECK(deviation < prev);
    prev = deviation;
  }
  CHECK(prev < 5e-3);
  CHECK_THROWS_AS(
      decoherence_factor(1, 0, model, DecoherenceMode::FiniteN, 0.0),
      std::invalid_argument);
}

TEST_CASE("dephased fidelity") {
  Eigen::MatrixXd dmat(2, 2);
  dmat << 1.0, 0.6, 0.6, 1.0;
  QuditState even{Eigen::Vector2cd(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0))};
  CHECK(fidelity_dephased(even, dmat) == doctest::Approx(0.8).epsilon(1e-14));
  QuditState basis{Eigen::Vector2cd(1.0, 0.0)};
  CHECK(fidelity_dephased(basis, dmat) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(average_fidelity_dephased(2, dmat) ==
        doctest::Approx((2.0 + 0.6) / 3.0).epsilon(1e-14));
}

TEST_CASE("closed-form average matches Monte Carlo") {
  DephasingModel base = make_dephasing_model(cold_params(1500.0), 0.5, 2);
  for (int d : {3, 5}) {
    DephasingModel model = base;
    model.d = d;
    Eigen::MatrixXd dmat =
        decoherence_matrix(model, DecoherenceMode::ThermodynamicLimit);
    double closed = average_fidelity_dephased(d, dmat);
    MonteCarloEstimate mc = average(
        [&](const QuditState& s) { return fidelity_dephased(s, dmat); }, d,
        50000, 3);
    CHECK(std::abs(mc.mean - closed) < 3.0 * mc.std_error);
  }
}

TEST_CASE("higher dimension dephases faster") {
  DephasingModel m3 = make_dephasing_model(cold_params(1500.0), 0.5, 3);
  DephasingModel m5 = make_dephasing_model(cold_params(1500.0), 0.5, 5);
  double f3 = average_fidelity_dephased(
      3, decoherence_matrix(m3, DecoherenceMode::ThermodynamicLimit));
  double f5 = average_fidelity_dephased(
      5, decoherence_matrix(m5, DecoherenceMode::ThermodynamicLimit));
  CHECK(f5 < f3);
}

TEST_CASE("sweep panels") {
  Fig3Config config;
  config.grid_points = 11;
  // moderate couplings keep every grid point away from the 2/(d+1) floor,
  // where consecutive values become indistinguishable at double precision
  config.J0_max = 2000.0;
  config.panel_b_J0 = 200.0;
  config.fixed_J0 = 500.0;

  auto rows_a = fig3_sweep('a', config);
  REQUIRE(rows_a.size() == 22);
  for (std::size_t i = 1; i < 11; ++i) {
    CHECK(rows_a[i].avg_fidelity <= rows_a[i - 1].avg_fidelity + 1e-14);
  }
  CHECK(rows_a[0].avg_fidelity == doctest::Approx(1.0).epsilon(1e-12));
  // d = 5 curve sits below d = 3 pointwise (rows 11.. hold d = 5)
  for (std::size_t i = 1; i < 11; ++i) {
    CHECK(rows_a[11 + i].avg_fidelity < rows_a[i].avg_fidelity);
  }

  auto rows_b = fig3_sweep('b', config);
  for (std::size_t i = 1; i < 11; ++i) {
    CHECK(rows_b[i].avg_fidelity < rows_b[i - 1].avg_fidelity);
  }

  // faster transfer (larger g0) leaves less time to dephase; the bath
  // correlation time itself does not move
  auto rows_c = fig3_sweep('c', config);
  for (std::size_t i = 1; i < 11; ++i) {
    CHECK(rows_c[i].avg_fidelity > rows_c[i - 1].avg_fidelity);
    CHECK(rows_c[i].tau_c == rows_c[0].tau_c);
    CHECK(rows_c[i].tau_prime < rows_c[i - 1].tau_prime);
  }

  CHECK_THROWS_AS(fig3_sweep('d', config), std::invalid_argument);
}
