#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spinmesh/errors.hpp"

namespace spinmesh {

inline constexpr int kDefaultSiteCap = 4096;

/// Real symmetric coupling matrix K of an XX spin network.
/// Invariants: symmetric, zero diagonal, nonnegative entries.
struct CouplingMatrix {
  Eigen::MatrixXd entries;

  int sites() const { return static_cast<int>(entries.rows()); }

  /// Throws std::invalid_argument if the invariants are violated.
  void validate(double tol = 1e-12) const;
};

enum class NetworkKind { Hypercube, UniformChain, EngineeredChain, Custom };

/// Declarative description of a network; site indices are 1-based externally.
struct NetworkSpec {
  NetworkKind kind = NetworkKind::Hypercube;
  int theta = 1;       // hypercube block selector, 1 -> 2-path, 2 -> 3-path
  int folds = 1;       // hypercube fold count g
  int n_sites = 2;     // chains / custom
  double kappa = 1.0;  // Hypercube / UniformChain coupling strength
  double g0 = 1.0;     // EngineeredChain coupling parameter
  double S0 = 0.5;     // spin magnitude, positive half-integer
  Eigen::MatrixXd custom_adjacency;  // Custom only

  int sites() const;
  CouplingMatrix coupling_matrix(int site_cap = kDefaultSiteCap) const;
  void validate() const;
};

/// Unit-weight adjacency of the (theta+1)-site path, theta in {1,2}.
CouplingMatrix path_adjacency(int theta);

/// g-fold Cartesian power: sum_j I^j (x) A (x) I^(g-j-1).
/// Vertex index is the base-(theta+1) digit string of coordinates,
/// most-significant digit = factor j=0.
CouplingMatrix cartesian_power(const CouplingMatrix& block, int folds,
                               int site_cap = kDefaultSiteCap);

/// Unit-weight path adjacency on n_sites sites.
CouplingMatrix uniform_chain(int n_sites);

/// Mirror-symmetric chain with K_{u,u+1} = g0*sqrt(u*(N0-u)), u = 1..N0-1.
CouplingMatrix engineered_chain(int n_sites, double g0);

/// Entrywise multiplication by kappa > 0.
CouplingMatrix scale(const CouplingMatrix& adjacency, double kappa);

/// Antipodal / mirror pairs (m, N0+1-m), 1-based, m <= mbar.  For odd site
/// counts the central self-paired site is included.  Custom topologies are
/// unsupported: the caller must designate pairs.
std::vector<std::pair<int, int>> antipodal_pairs(const NetworkSpec& spec);

/// Reads a dense whitespace/comma-separated matrix or an edge list
/// ("u v weight" lines, 1-based).  Lines starting with '#' are skipped.
CouplingMatrix read_coupling_matrix(std::istream& in);
CouplingMatrix read_coupling_matrix_file(const std::string& path);

/// Dense text serialization, one row per line.
void write_coupling_matrix(const CouplingMatrix& k, std::ostream& out);

}  // namespace spinmesh
