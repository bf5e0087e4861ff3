#include "spinmesh/bath.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "spinmesh/errors.hpp"
#include "spinmesh/spectral.hpp"

namespace spinmesh {

namespace {

constexpr double kPi = std::numbers::pi;

struct LogIntegrand {
  double phi;    // signed; sign selects f_plus / f_minus
  double scale;  // sqrt(2 z0) J S / T
  bool imag;
};

double integrand(double x, void* raw) {
  const auto& p = *static_cast<const LogIntegrand*>(raw);
  const double z = std::exp(-p.scale * x);
  const std::complex<double> num = 1.0 - std::polar(z, p.phi);
  const std::complex<double> w = std::log(num / (1.0 - z));
  return x * x * (p.imag ? w.imag() : w.real());
}

double integrate(LogIntegrand p, double upper) {
  static const int kOnce = [] {
    gsl_set_error_handler_off();
    return 0;
  }();
  (void)kOnce;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(512);
  gsl_function f{&integrand, &p};
  double result = 0.0, abserr = 0.0;
  int status = gsl_integration_qag(&f, 0.0, upper, 1e-30, 1e-9, 512,
                                   GSL_INTEG_GAUSS31, ws, &result, &abserr);
  gsl_integration_workspace_free(ws);
  if (status != GSL_SUCCESS && status != GSL_EROUND) {
    throw NumericError("bath quadrature failed: " +
                       std::string(gsl_strerror(status)));
  }
  return result;
}

}  // namespace

int coordination(Lattice lattice) {
  return lattice == Lattice::SimpleCubic ? 6 : 8;
}

void BathParams::validate() const {
  if (J <= 0) throw std::invalid_argument("exchange J must be > 0");
  if (S <= 0 || std::abs(2 * S - std::round(2 * S)) > 1e-9) {
    throw std::invalid_argument("bath spin S must be a positive half-integer");
  }
  if (T <= 0) throw std::invalid_argument("temperature must be > 0");
  if (J0 < 0) throw std::invalid_argument("coupling J0 must be >= 0");
  // Spin-wave treatment is only trusted well below the ordering temperature.
  if (T > 0.1 * neel_temperature(*this) * (1 + 1e-12)) {
    throw std::invalid_argument("temperature exceeds the 0.1*T_N validity window");
  }
}

double structure_factor(const Eigen::Vector3d& k, Lattice lattice) {
  if (lattice == Lattice::SimpleCubic) {
    return (std::cos(k.x()) + std::cos(k.y()) + std::cos(k.z())) / 3.0;
  }
  return std::cos(k.x() / 2.0) * std::cos(k.y() / 2.0) * std::cos(k.z() / 2.0);
}

double dispersion_exact(const Eigen::Vector3d& k, const BathParams& p) {
  double gamma = structure_factor(k, p.lattice);
  return p.z0() * p.J * p.S * std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
}

double dispersion_linear(double x, const BathParams& p) {
  if (x < 0) throw std::domain_error("scaled wave number must be >= 0");
  return std::sqrt(2.0 * p.z0()) * p.J * p.S * x;
}

double zeta(Lattice lattice) {
  return lattice == Lattice::SimpleCubic ? 1.51638 : 1.39320;
}

namespace {

double zeta_midpoint(Lattice lattice, int m) {
  const double h = 2.0 * kPi / m;
  std::vector<double> c(m);
  for (int i = 0; i < m; ++i) c[i] = std::cos(-kPi + (i + 0.5) * h);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        double gamma = lattice == Lattice::SimpleCubic
                           ? (c[i] + c[j] + c[k]) / 3.0
                           : c[i] * c[j] * c[k];
        sum += 1.0 / (1.0 - gamma);
      }
    }
  }
  return sum / (static_cast<double>(m) * m * m);
}

}  // namespace

double zeta_recompute(Lattice lattice, int resolution) {
  if (resolution < 32) throw std::invalid_argument("resolution must be >= 32");
  if (resolution % 2) ++resolution;
  // Midpoint error is O(h) from the integrable 1/k^2 points; one Richardson
  // step against the half grid removes it.
  double coarse = zeta_midpoint(lattice, resolution / 2);
  double fine = zeta_midpoint(lattice, resolution);
  return 2.0 * fine - coarse;
}

double neel_temperature(const BathParams& p) {
  return p.z0() * p.J * p.S * (p.S + 1.0) / (3.0 * zeta(p.lattice));
}

double xi0(const BathParams& p) {
  const double z0 = p.z0();
  const double js = p.J * p.S;
  return kPi * kPi * p.T * p.T * p.T /
         (12.0 * z0 * std::sqrt(2.0 * z0) * js * js * js);
}

std::pair<std::complex<double>, std::complex<double>> f_pm_quadrature(
    double phi, const BathParams& p) {
  if (p.T <= 0) throw std::invalid_argument("temperature must be > 0");
  if (phi == 0.0) return {0.0, 0.0};
  const double scale = std::sqrt(2.0 * p.z0()) * p.J * p.S / p.T;
  // e^{-w/T} < 1e-16 beyond the cutoff; the integrand is dead there.
  const double upper = 16.0 * std::log(10.0) / scale;
  auto one = [&](double sign) {
    double re = integrate(LogIntegrand{sign * phi, scale, false}, upper);
    double im = integrate(LogIntegrand{sign * phi, scale, true}, upper);
    return std::complex<double>(re, im);
  };
  return {one(+1.0), one(-1.0)};
}

DephasingModel make_dephasing_model(const BathParams& params, double tau_prime,
                                    int d) {
  params.validate();
  if (tau_prime <= 0) throw std::invalid_argument("tau' must be > 0");
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  DephasingModel model;
  model.params = params;
  model.tau_prime = tau_prime;
  model.d = d;
  model.xi0_value = xi0(params);
  model.tau_c = params.J0 > 0
                    ? kPi / (params.J0 * std::sqrt(model.xi0_value))
                    : std::numeric_limits<double>::infinity();
  return model;
}

double decoherence_factor(int nu, int nu_prime, const DephasingModel& model,
                          DecoherenceMode mode, double n_bath) {
  const double dnu = nu - nu_prime;
  if (dnu == 0.0) return 1.0;
  const BathParams& p = model.params;
  if (mode == DecoherenceMode::ThermodynamicLimit) {
    double exponent = dnu * dnu * model.tau_prime * model.tau_prime * p.J0 *
                      p.J0 * model.xi0_value / (kPi * kPi);
    return std::exp(-exponent);
  }
  if (n_bath < 1) throw std::invalid_argument("FiniteN mode needs N >= 1");
  const double phi = dnu * p.J0 * model.tau_prime / std::sqrt(n_bath);
  auto [fp, fm] = f_pm_quadrature(phi, p);
  const double xi_sum = (fp + fm).real() / (phi * phi);
  double exponent = xi_sum * dnu * dnu * p.J0 * p.J0 * model.tau_prime *
                    model.tau_prime / (2.0 * kPi * kPi);
  return std::exp(-exponent);
}

Eigen::MatrixXd decoherence_matrix(const DephasingModel& model,
                                   DecoherenceMode mode, double n_bath) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(model.d, model.d);
  for (int nu = 0; nu < model.d; ++nu) {
    for (int nup = 0; nup < nu; ++nup) {
      double value = decoherence_factor(nu, nup, model, mode, n_bath);
      d(nu, nup) = d(nup, nu) = value;
    }
  }
  return d;
}

double fidelity_dephased(const QuditState& state, const Eigen::MatrixXd& dmat) {
  state.validate(1e-9);
  const int d = state.dim();
  if (dmat.rows() != d || dmat.cols() != d) {
    throw std::invalid_argument("decoherence matrix dimension mismatch");
  }
  double f = 0.0;
  for (int nu = 0; nu < d; ++nu) {
    for (int nup = 0; nup < d; ++nup) {
      f += std::norm(state.amplitudes(nu)) * std::norm(state.amplitudes(nup)) *
           dmat(nu, nup);
    }
  }
  return f;
}

double average_fidelity_dephased(int d, const Eigen::MatrixXd& dmat) {
  if (d < 2 || dmat.rows() != d || dmat.cols() != d) {
    throw std::invalid_argument("decoherence matrix dimension mismatch");
  }
  double off = 0.0;
  for (int nu = 0; nu < d; ++nu) {
    for (int nup = 0; nup < d; ++nup) {
      if (nu != nup) off += dmat(nu, nup);
    }
  }
  return (2.0 * d + off) / (static_cast<double>(d) * (d + 1));
}

std::vector<Fig3Row> fig3_sweep(char panel, const Fig3Config& config) {
  if (panel != 'a' && panel != 'b' && panel != 'c') {
    throw std::invalid_argument("panel must be a, b, or c");
  }
  if (config.grid_points < 2) throw std::invalid_argument("need >= 2 grid points");
  std::vector<Fig3Row> rows;
  const int n = config.grid_points;
  for (int d : config.d_list) {
    for (int i = 0; i < n; ++i) {
      const double frac = static_cast<double>(i) / (n - 1);
      BathParams p;
      p.J = config.J;
      p.S = config.S;
      p.lattice = config.lattice;
      double g0 = config.fixed_g0;
      double sweep_value = 0.0;
      std::string var;
      switch (panel) {
        case 'a':
          p.J0 = frac * config.J0_max * config.J;
          p.T = config.fixed_T_over_TN * neel_temperature(p);
          sweep_value = p.J0;
          var = "J0";
          break;
        case 'b': {
          p.J0 = config.panel_b_J0 * config.J;
          double t_over =
              config.T_over_TN_min +
              frac * (config.T_over_TN_max - config.T_over_TN_min);
          p.T = t_over * neel_temperature(p);
          sweep_value = t_over;
          var = "T_over_TN";
          break;
        }
        case 'c':
          p.J0 = config.fixed_J0 * config.J;
          p.T = config.fixed_T_over_TN * neel_temperature(p);
          g0 = config.g0_min + frac * (config.g0_max - config.g0_min);
          sweep_value = g0;
          var = "g0";
          break;
      }
      const double tau_prime = optimal_time_chain(config.S0, g0 * config.J);
      DephasingModel model = make_dephasing_model(p, tau_prime, d);
      Eigen::MatrixXd dmat =
          decoherence_matrix(model, DecoherenceMode::ThermodynamicLimit);
      Fig3Row row;
      row.panel = panel;
      row.d = d;
      row.sweep_var = var;
      row.sweep_value = sweep_value;
      row.S0 = config.S0;
      row.tau_prime = tau_prime;
      row.tau_c = model.tau_c;
      row.avg_fidelity = average_fidelity_dephased(d, dmat);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace spinmesh
