#include "spinmesh/topology.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace spinmesh {

namespace {

bool is_positive_half_integer(double s) {
  double twice = 2.0 * s;
  return s > 0 && std::abs(twice - std::round(twice)) < 1e-9;
}

}  // namespace

void CouplingMatrix::validate(double tol) const {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw std::invalid_argument("coupling matrix must be square and nonempty");
  }
  for (int i = 0; i < entries.rows(); ++i) {
    if (std::abs(entries(i, i)) > tol) {
      throw std::invalid_argument("coupling matrix must have zero diagonal");
    }
    for (int j = 0; j < entries.cols(); ++j) {
      if (entries(i, j) < -tol) {
        throw std::invalid_argument("coupling matrix entries must be nonnegative");
      }
      if (std::abs(entries(i, j) - entries(j, i)) > tol) {
        throw std::invalid_argument("coupling matrix must be symmetric");
      }
    }
  }
}

int NetworkSpec::sites() const {
  if (kind == NetworkKind::Hypercube) {
    int n = 1;
    for (int j = 0; j < folds; ++j) n *= theta + 1;
    return n;
  }
  if (kind == NetworkKind::Custom) {
    return static_cast<int>(custom_adjacency.rows());
  }
  return n_sites;
}

void NetworkSpec::validate() const {
  if (!is_positive_half_integer(S0)) {
    throw std::invalid_argument("S0 must be a positive half-integer");
  }
  switch (kind) {
    case NetworkKind::Hypercube:
      if (theta != 1 && theta != 2) throw std::domain_error("theta must be 1 or 2");
      if (folds < 1) throw std::invalid_argument("fold count must be >= 1");
      if (kappa <= 0) throw std::invalid_argument("kappa must be > 0");
      break;
    case NetworkKind::UniformChain:
      if (n_sites < 2) throw std::invalid_argument("chain needs N0 >= 2");
      if (kappa <= 0) throw std::invalid_argument("kappa must be > 0");
      break;
    case NetworkKind::EngineeredChain:
      if (n_sites < 2) throw std::invalid_argument("chain needs N0 >= 2");
      if (g0 <= 0) throw std::invalid_argument("g0 must be > 0");
      break;
    case NetworkKind::Custom:
      CouplingMatrix{custom_adjacency}.validate();
      break;
  }
}

CouplingMatrix NetworkSpec::coupling_matrix(int site_cap) const {
  validate();
  switch (kind) {
    case NetworkKind::Hypercube:
      return scale(cartesian_power(path_adjacency(theta), folds, site_cap), kappa);
    case NetworkKind::UniformChain:
      return scale(uniform_chain(n_sites), kappa);
    case NetworkKind::EngineeredChain:
      return engineered_chain(n_sites, g0);
    case NetworkKind::Custom:
      return CouplingMatrix{custom_adjacency};
  }
  throw std::logic_error("unreachable");
}

CouplingMatrix path_adjacency(int theta) {
  if (theta != 1 && theta != 2) {
    throw std::domain_error("path block selector theta must be 1 or 2");
  }
  return uniform_chain(theta + 1);
}

CouplingMatrix uniform_chain(int n_sites) {
  if (n_sites < 2) throw std::invalid_argument("chain needs N0 >= 2");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_sites, n_sites);
  for (int u = 0; u + 1 < n_sites; ++u) {
    a(u, u + 1) = a(u + 1, u) = 1.0;
  }
  return CouplingMatrix{a};
}

CouplingMatrix cartesian_power(const CouplingMatrix& block, int folds,
                               int site_cap) {
  block.validate();
  if (folds < 1) throw std::invalid_argument("fold count must be >= 1");
  const int b = block.sites();
  double dim = std::pow(static_cast<double>(b), folds);
  if (dim > site_cap) {
    throw SizeError("cartesian_power would produce " + std::to_string(dim) +
                    " sites, above the cap of " + std::to_string(site_cap));
  }
  const int n = static_cast<int>(std::llround(dim));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  // Kronecker sum; factor j = 0 is the most significant digit.
  int inner = n / b;  // weight of factor j's digit
  for (int j = 0; j < folds; ++j) {
    for (int v = 0; v < n; ++v) {
      int digit = (v / inner) % b;
      for (int w = 0; w < b; ++w) {
        if (block.entries(digit, w) == 0.0) continue;
        int u = v + (w - digit) * inner;
        a(u, v) += block.entries(digit, w);
      }
    }
    inner /= b;
  }
  return CouplingMatrix{a};
}

CouplingMatrix engineered_chain(int n_sites, double g0) {
  if (n_sites < 2) throw std::invalid_argument("chain needs N0 >= 2");
  if (g0 <= 0) throw std::invalid_argument("g0 must be > 0");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_sites, n_sites);
  for (int u = 1; u < n_sites; ++u) {  // 1-based bond index
    double w = g0 * std::sqrt(static_cast<double>(u) * (n_sites - u));
    k(u - 1, u) = k(u, u - 1) = w;
  }
  return CouplingMatrix{k};
}

CouplingMatrix scale(const CouplingMatrix& adjacency, double kappa) {
  if (kappa <= 0) throw std::invalid_argument("kappa must be > 0");
  return CouplingMatrix{kappa * adjacency.entries};
}

std::vector<std::pair<int, int>> antipodal_pairs(const NetworkSpec& spec) {
  spec.validate();
  if (spec.kind == NetworkKind::Custom) {
    throw std::invalid_argument(
        "antipodal pairs are undefined for custom topologies; designate pairs "
        "explicitly");
  }
  // Under the digit-string hypercube ordering, reflecting every coordinate
  // digit lands on index N0+1-m, the same rule as the chain mirror.
  const int n = spec.sites();
  std::vector<std::pair<int, int>> pairs;
  for (int m = 1; m <= n + 1 - m; ++m) {
    pairs.emplace_back(m, n + 1 - m);
  }
  return pairs;
}

CouplingMatrix read_coupling_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool edge_list = true;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> vals;
    double x;
    while (ls >> x) vals.push_back(x);
    if (vals.empty()) continue;
    if (!line.empty() && line[0] == '#') continue;
    rows.push_back(std::move(vals));
    if (rows.back().size() != 3) edge_list = false;
  }
  if (rows.empty()) throw std::invalid_argument("empty matrix input");

  // A square block of numbers is a dense matrix; otherwise "u v w" lines.
  if (rows.size() == rows[0].size()) edge_list = false;
  Eigen::MatrixXd k;
  if (edge_list) {
    int n = 0;
    for (const auto& r : rows) {
      n = std::max({n, static_cast<int>(r[0]), static_cast<int>(r[1])});
    }
    k = Eigen::MatrixXd::Zero(n, n);
    for (const auto& r : rows) {
      int u = static_cast<int>(r[0]) - 1, v = static_cast<int>(r[1]) - 1;
      if (u < 0 || v < 0) throw std::invalid_argument("edge list sites are 1-based");
      k(u, v) = k(v, u) = r[2];
    }
  } else {
    const std::size_t n = rows.size();
    k.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        throw std::invalid_argument("dense matrix rows must all have length " +
                                    std::to_string(n));
      }
      for (std::size_t j = 0; j < n; ++j) k(i, j) = rows[i][j];
    }
  }
  CouplingMatrix out{std::move(k)};
  out.validate();
  return out;
}

CouplingMatrix read_coupling_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
  return read_coupling_matrix(in);
}

void write_coupling_matrix(const CouplingMatrix& k, std::ostream& out) {
  for (int i = 0; i < k.sites(); ++i) {
    for (int j = 0; j < k.sites(); ++j) {
      if (j) out << ' ';
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", k.entries(i, j));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace spinmesh
