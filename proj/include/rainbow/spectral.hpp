#pragma once

#include "rainbow/error.hpp"
#include "rainbow/expander.hpp"
#include "rainbow/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rainbow {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kDenseMaxN = 4096;

/// M = D A (row-stochastic) and N = D^{1/2} A D^{1/2}, where D = diag(1/d(v)).
template <typename Scalar = double>
struct WalkMatrices {
  Matrix<Scalar> transition;
  Matrix<Scalar> normalized;
  Vector<Scalar> degrees;
};

template <typename Scalar = double>
Matrix<Scalar> adjacency_matrix(const Graph& g) {
  if (g.num_vertices() > kDenseMaxN)
    throw Error(ErrorKind::TooLarge, "dense matrices are capped at " + std::to_string(kDenseMaxN) + " vertices");
  Matrix<Scalar> a = Matrix<Scalar>::Zero(g.num_vertices(), g.num_vertices());
  for (const Edge& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = Scalar(1);
  return a;
}

template <typename Scalar = double>
WalkMatrices<Scalar> walk_matrices(const Graph& g) {
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (g.degree(v) == 0) throw Error(ErrorKind::IsolatedVertex, "vertex " + std::to_string(v) + " is isolated");
  const Matrix<Scalar> a = adjacency_matrix<Scalar>(g);
  WalkMatrices<Scalar> w;
  w.degrees.resize(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) w.degrees(v) = Scalar(g.degree(v));
  const Vector<Scalar> inv = w.degrees.cwiseInverse();
  const Vector<Scalar> inv_sqrt = inv.cwiseSqrt();
  w.transition = inv.asDiagonal() * a;
  w.normalized = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  return w;
}

/// Eigenvalues of N, descending.
template <typename Scalar = double>
Vector<Scalar> normalized_eigenvalues(const Graph& g) {
  const WalkMatrices<Scalar> w = walk_matrices<Scalar>(g);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(w.normalized, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigensolverFailure, "symmetric eigensolver did not converge");
  return solver.eigenvalues().reverse();
}

struct SecondEigenpair {
  double lambda2 = 0;
  std::vector<double> vector;  // eigenvector of N
  bool approximate = false;    // from deflated power iteration
};

/// Dense solve up to `dense_max` vertices, deflated power iteration above.
SecondEigenpair second_eigenpair(const Graph& g, std::uint64_t seed = 0, int dense_max = 1024);

/// Vertices ordered by the second eigenvector of N scaled by D^{1/2}.
std::vector<Vertex> sweep_order(const Graph& g, const SecondEigenpair& pair);

struct ConductanceResult {
  bool exact = false;
  double value = 0;  // exact Phi_G, or the best cut found
  double lower = 0;  // 1 - lambda_2 always bounds Phi_G from below
  double upper = 0;
  std::vector<Vertex> minimizer;  // exact minimizer or best sweep set
};

/// Phi(S) = e(S, S^c) 2m / (vol S vol S^c).
double conductance_of(const Graph& g, std::span<const Vertex> s);

/// Exact Phi_G by Gray-code enumeration up to `exact_max_n` vertices (only
/// sets avoiding the last vertex, as Phi(S) = Phi(S^c)); otherwise the
/// bracket [1 - lambda_2, min(best sweep cut, sqrt(8 (1 - lambda_2)))].
ConductanceResult conductance(const Graph& g, int exact_max_n = 22);

struct SpectrumSummary {
  std::vector<double> eigenvalues;  // descending
  double lambda2 = 0;
  ConductanceResult conductance;
};

SpectrumSummary spectrum(const Graph& g, int exact_max_n = 22);

/// (1 - Phi_G^2 / 8) - lambda_2; throws BoundViolated below -1e-9.
double check_eigen_conductance_bound(const Graph& g);

/// Phi_G - eta / 3 for an exactly certified expander; throws BoundViolated.
double check_expander_conductance(const Graph& g, const ExpanderParams& p);

struct MixingReport {
  int k = 0;
  double base = 0;            // lambda_2, or 0 on two vertices
  double max_deviation = 0;   // over entries with matching parity
  double min_margin = 0;      // min of bound + 1e-8 - deviation
  double max_parity_entry = 0;
  Vertex worst_row = 0;
  Vertex worst_col = 0;
};

/// Deviation of M^k from its bipartite limit.  Throws BoundViolated when an
/// entry exceeds sqrt(d(u)/d(v)) base^k + 1e-8 or a parity-zero entry is
/// above 1e-12.
template <typename Scalar>
MixingReport mixing_deviation_of(const Graph& g, const Matrix<Scalar>& mk, int k, double base);

template <typename Scalar = double>
MixingReport mixing_deviation(const Graph& g, int k);

/// Reports for k = 1..k_max from successive products.
std::vector<MixingReport> mixing_profile(const Graph& g, int k_max);

/// min over x, y in X of sqrt(n)(1 - eta^2/72)^k + 1e-8 - |P[x,y]/sum_z P[x,z] - d(y)/e(G)|.
double mixing_rate_check(const Graph& g, const ExpanderParams& p, int k);

// ---------------------------------------------------------------------------

namespace detail {
double mixing_base(const Graph& g);
std::vector<char> side_x(const Graph& g);
}  // namespace detail

template <typename Scalar>
MixingReport mixing_deviation_of(const Graph& g, const Matrix<Scalar>& mk, int k, double base) {
  const std::vector<char> in_x = detail::side_x(g);
  const double two_m = 2.0 * g.num_edges();
  MixingReport rep;
  rep.k = k;
  rep.base = base;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double decay = std::pow(base, k);
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    for (Vertex u = 0; u < g.num_vertices(); ++u) {
      const double entry = static_cast<double>(mk(v, u));
      const int parity = (k + in_x[static_cast<std::size_t>(v)] + in_x[static_cast<std::size_t>(u)]) % 2;
      if (parity == 1) {
        rep.max_parity_entry = std::max(rep.max_parity_entry, std::abs(entry));
        continue;
      }
      const double dev = std::abs(entry - 2.0 * g.degree(u) / two_m);
      const double bound = std::sqrt(static_cast<double>(g.degree(u)) / g.degree(v)) * decay;
      const double margin = bound + 1e-8 - dev;
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.worst_row = v;
        rep.worst_col = u;
      }
      rep.min_margin = std::min(rep.min_margin, margin);
    }
  if (rep.min_margin < 0)
    throw Error(ErrorKind::BoundViolated, "M^" + std::to_string(k) + " deviates beyond the spectral bound");
  if (rep.max_parity_entry > 1e-12)
    throw Error(ErrorKind::BoundViolated, "M^" + std::to_string(k) + " has a nonzero wrong-parity entry");
  return rep;
}

template <typename Scalar>
MixingReport mixing_deviation(const Graph& g, int k) {
  if (k < 1) throw Error(ErrorKind::PreconditionViolated, "k must be at least 1");
  const WalkMatrices<Scalar> w = walk_matrices<Scalar>(g);
  Matrix<Scalar> result = Matrix<Scalar>::Identity(g.num_vertices(), g.num_vertices());
  Matrix<Scalar> base = w.transition;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return mixing_deviation_of<Scalar>(g, result, k, detail::mixing_base(g));
}

}  // namespace rainbow
