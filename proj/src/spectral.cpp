#include "rainbow/spectral.hpp"

#include "rainbow/seed.hpp"
#include "rainbow/walkcount.hpp"

#include <algorithm>
#include <numeric>

namespace rainbow {

namespace {

void require_connected(const Graph& g) {
  if (g.num_vertices() < 2) throw Error(ErrorKind::PreconditionViolated, "need at least two vertices");
  if (!is_connected(g)) throw Error(ErrorKind::Disconnected, "graph is disconnected");
}

// y = N x using the adjacency lists.
void apply_normalized(const Graph& g, const std::vector<double>& inv_sqrt, const Eigen::VectorXd& x,
                      Eigen::VectorXd& y) {
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    double s = 0;
    for (Vertex u : g.neighbours(v)) s += x(u) * inv_sqrt[static_cast<std::size_t>(u)];
    y(v) = s * inv_sqrt[static_cast<std::size_t>(v)];
  }
}

}  // namespace

namespace detail {

std::vector<char> side_x(const Graph& g) { return bipartition(g).in_x; }

double mixing_base(const Graph& g) {
  bipartition(g);  // connected and bipartite, or throw
  if (g.num_vertices() <= 2) return 0.0;
  // Middle eigenvalues lie in [-lambda_2, lambda_2] by the bipartite pairing.
  return std::max(0.0, normalized_eigenvalues<double>(g)(1));
}

}  // namespace detail

SecondEigenpair second_eigenpair(const Graph& g, std::uint64_t seed, int dense_max) {
  require_connected(g);
  const int n = g.num_vertices();
  SecondEigenpair out;
  if (n <= dense_max) {
    const WalkMatrices<double> w = walk_matrices<double>(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w.normalized);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::EigensolverFailure, "symmetric eigensolver did not converge");
    out.lambda2 = solver.eigenvalues()(n - 2);
    const Eigen::VectorXd v = solver.eigenvectors().col(n - 2);
    out.vector.assign(v.data(), v.data() + n);
    return out;
  }
  // Power iteration on (I + N) / 2 with the top eigenvector sqrt(d) projected out.
  out.approximate = true;
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  Eigen::VectorXd top(n);
  for (Vertex v = 0; v < n; ++v) {
    inv_sqrt[static_cast<std::size_t>(v)] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
    top(v) = std::sqrt(static_cast<double>(g.degree(v)));
  }
  top.normalize();
  Rng rng(derive_seed(seed, "power-iteration"));
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) x(i) = gauss(rng);
  x -= top.dot(x) * top;
  x.normalize();
  for (int it = 0; it < 3000; ++it) {
    apply_normalized(g, inv_sqrt, x, y);
    y = 0.5 * (x + y);
    y -= top.dot(y) * top;
    y.normalize();
    const double change = (y - x).norm();
    x.swap(y);
    if (change < 1e-10) break;
  }
  apply_normalized(g, inv_sqrt, x, y);
  out.lambda2 = x.dot(y);
  out.vector.assign(x.data(), x.data() + n);
  return out;
}

std::vector<Vertex> sweep_order(const Graph& g, const SecondEigenpair& pair) {
  std::vector<double> f(pair.vector.size());
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    f[static_cast<std::size_t>(v)] = pair.vector[static_cast<std::size_t>(v)] / std::sqrt(std::max(1, g.degree(v)));
  std::vector<Vertex> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return f[static_cast<std::size_t>(a)] < f[static_cast<std::size_t>(b)]; });
  return order;
}

double conductance_of(const Graph& g, std::span<const Vertex> s) {
  const CutDensity cd = cut_and_density(g, s);
  const double two_m = 2.0 * g.num_edges();
  const double vol = static_cast<double>(2 * cd.inside + cd.crossing);
  return static_cast<double>(cd.crossing) * two_m / (vol * (two_m - vol));
}

ConductanceResult conductance(const Graph& g, int exact_max_n) {
  require_connected(g);
  const int n = g.num_vertices();
  const double two_m = 2.0 * g.num_edges();
  ConductanceResult res;
  if (n <= exact_max_n && n <= 30) {
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
    for (const Edge& e : g.edges()) {
      adj[static_cast<std::size_t>(e.u)] |= 1u << e.v;
      adj[static_cast<std::size_t>(e.v)] |= 1u << e.u;
    }
    std::uint32_t mask = 0, best_mask = 0;
    std::int64_t inside = 0, vol = 0;
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t count = 1u << (n - 1);
    for (std::uint32_t i = 1; i < count; ++i) {
      const int bit = __builtin_ctz(i);
      const std::uint32_t b = 1u << bit;
      const std::int64_t links = __builtin_popcount(adj[static_cast<std::size_t>(bit)] & mask);
      if (mask & b) {
        mask &= ~b;
        inside -= links;
        vol -= g.degree(bit);
      } else {
        inside += links;
        vol += g.degree(bit);
        mask |= b;
      }
      const double cut = static_cast<double>(vol - 2 * inside);
      const double phi = cut * two_m / (static_cast<double>(vol) * (two_m - static_cast<double>(vol)));
      if (phi < best) {
        best = phi;
        best_mask = mask;
      }
    }
    res.exact = true;
    res.value = res.lower = res.upper = best;
    for (Vertex v = 0; v < n; ++v)
      if (best_mask >> v & 1) res.minimizer.push_back(v);
    return res;
  }
  const SecondEigenpair pair = second_eigenpair(g, 0, kDenseMaxN);
  const std::vector<Vertex> order = sweep_order(g, pair);
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  std::int64_t vol = 0, cut = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_len = 0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const Vertex v = order[i];
    int links = 0;
    for (Vertex u : g.neighbours(v)) links += in[static_cast<std::size_t>(u)];
    in[static_cast<std::size_t>(v)] = 1;
    vol += g.degree(v);
    cut += g.degree(v) - 2 * links;
    const double phi = static_cast<double>(cut) * two_m / (static_cast<double>(vol) * (two_m - static_cast<double>(vol)));
    if (phi < best) {
      best = phi;
      best_len = i + 1;
    }
  }
  res.exact = false;
  res.value = best;
  res.minimizer.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_len));
  std::sort(res.minimizer.begin(), res.minimizer.end());
  const double gap = std::max(0.0, 1.0 - pair.lambda2);
  // Phi(S) is the Rayleigh quotient of the degree-centred indicator of S, so
  // 1 - lambda_2 bounds it from below; the eigenvalue bound caps it above.
  res.lower = pair.approximate ? 0.0 : gap;
  res.upper = std::min(best, pair.approximate ? best : std::sqrt(8.0 * gap));
  return res;
}

SpectrumSummary spectrum(const Graph& g, int exact_max_n) {
  require_connected(g);
  SpectrumSummary s;
  const Eigen::VectorXd ev = normalized_eigenvalues<double>(g);
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  s.lambda2 = s.eigenvalues[1];
  s.conductance = conductance(g, exact_max_n);
  return s;
}

double check_eigen_conductance_bound(const Graph& g) {
  if (g.num_vertices() > 22) throw Error(ErrorKind::TooLarge, "exact conductance needs at most 22 vertices");
  const ConductanceResult c = conductance(g, 22);
  const double lambda2 = normalized_eigenvalues<double>(g)(1);
  const double margin = 1.0 - c.value * c.value / 8.0 - lambda2;
  if (margin < -1e-9)
    throw Error(ErrorKind::BoundViolated, "lambda_2 exceeds 1 - Phi^2/8 by " + std::to_string(-margin));
  return margin;
}

double check_expander_conductance(const Graph& g, const ExpanderParams& p) {
  const ExpanderCertificate cert = verify_expander(g, p);
  if (!cert.passed || cert.evidence != Evidence::ExactSubsetCheck)
    throw Error(ErrorKind::PreconditionViolated, "graph is not an exactly certified expander for these parameters");
  const ConductanceResult c = conductance(g, 22);
  const double margin = c.value - p.eta / 3.0;
  if (margin < -1e-9)
    throw Error(ErrorKind::BoundViolated, "conductance below eta/3 by " + std::to_string(-margin));
  return margin;
}

std::vector<MixingReport> mixing_profile(const Graph& g, int k_max) {
  const WalkMatrices<double> w = walk_matrices<double>(g);
  const double base = detail::mixing_base(g);
  std::vector<MixingReport> out;
  Eigen::MatrixXd power = w.transition;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) power = power * w.transition;
    out.push_back(mixing_deviation_of<double>(g, power, k, base));
  }
  return out;
}

double mixing_rate_check(const Graph& g, const ExpanderParams& p, int k) {
  if (k % 2) throw Error(ErrorKind::PreconditionViolated, "k must be even");
  const Bipartition bip = bipartition(g);
  const ExpanderCertificate cert = verify_expander(g, p);
  if (!cert.passed || cert.evidence != Evidence::ExactSubsetCheck)
    throw Error(ErrorKind::PreconditionViolated, "graph is not an exactly certified expander for these parameters");
  const WalkTable t = count_paths(g, k);
  const double bound =
      std::sqrt(static_cast<double>(g.num_vertices())) * std::pow(1.0 - p.eta * p.eta / 72.0, k) + 1e-8;
  double margin = std::numeric_limits<double>::infinity();
  for (Vertex x : bip.x) {
    BigInt row = 0;
    for (Vertex z : bip.x) row += t.paths(x, z);
    for (Vertex y : bip.x) {
      const double lhs = std::abs(ratio(t.paths(x, y), row) - static_cast<double>(g.degree(y)) / g.num_edges());
      margin = std::min(margin, bound - lhs);
    }
  }
  if (margin < 0) throw Error(ErrorKind::BoundViolated, "walk distribution deviates beyond the mixing bound");
  return margin;
}

}  // namespace rainbow
