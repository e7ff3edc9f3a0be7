#include "rainbow/params.hpp"

#include "rainbow/error.hpp"
#include "rainbow/expander.hpp"

#include <algorithm>
#include <cmath>

namespace rainbow {

namespace {

double pairs_of(int m) { return m * (m - 1) / 2.0; }

int scaled_spares(double base, double scale) {
  return std::max(2, static_cast<int>(std::ceil(scale * base - 1e-9)));
}

}  // namespace

int desk_blowup_s(int m, int r, int k, double scale) { return scaled_spares(pairs_of(m) * r * k, scale); }

ParamSheet param_calculator(int n, double eps, int m, int r, double scale) {
  if (n < 2) throw Error(ErrorKind::PreconditionViolated, "parameter sheet needs n >= 2");
  if (m < 2 || r < 1) throw Error(ErrorKind::PreconditionViolated, "need m >= 2 and r >= 1");
  if (!(eps > 0 && eps <= 0.5)) throw Error(ErrorKind::PreconditionViolated, "eps must lie in (0, 1/2]");
  if (!(scale > 0)) throw Error(ErrorKind::PreconditionViolated, "scale must be positive");
  ParamSheet p;
  p.n = n;
  p.eps = eps;
  p.m = m;
  p.r = r;
  p.log_n = log2n(n);
  p.eta = eps / (2 * p.log_n);
  p.ell = std::ceil(4 * p.log_n / p.eta);
  const double kmin = 512 * p.log_n / (p.eta * p.eta);
  p.k = 2 * std::ceil(kmin / 2 - 1e-9);
  p.L = std::ceil(1024 * p.log_n / (p.eta * p.eta));
  p.s = 2 * pairs_of(m) * p.k;
  p.s_blowup = pairs_of(m) * r * p.k;
  p.p = 8.0 * m;
  p.q = 256 * p.ell;
  p.edge_threshold = n * std::pow(p.log_n, 60);
  p.blowup_edge_threshold = std::pow(n, 2.0 - 1.0 / r) * std::pow(p.log_n, 60.0 / r);
  p.max_pairs = n * (n - 1) / 2.0;
  p.feasible = p.edge_threshold <= p.max_pairs;
  p.blowup_feasible = p.blowup_edge_threshold <= p.max_pairs;

  p.desk.eps = eps;
  p.desk.scale = scale;
  p.desk.L = 2 * (p.desk.ell + 1) + p.desk.k;
  p.desk.s = scaled_spares(2 * pairs_of(m) * p.desk.k, scale);
  return p;
}

nlohmann::json to_json(const SearchParams& p) {
  return {{"k", p.k},
          {"s", p.s},
          {"ell", p.ell},
          {"q", p.q},
          {"L", p.L},
          {"eps", p.eps},
          {"relaxed", p.relaxed},
          {"max_rounds", p.max_rounds},
          {"max_connect_pairs", p.max_connect_pairs},
          {"max_greedy_starts", p.max_greedy_starts},
          {"exact_max_n", p.exact_max_n},
          {"pair_mode", p.pairs.mode == PairMode::Exact        ? "exact"
                        : p.pairs.mode == PairMode::MonteCarlo ? "monte-carlo"
                                                               : "auto"},
          {"pair_budget", p.pairs.budget},
          {"pair_samples", p.pairs.samples},
          {"scale", p.scale}};
}

nlohmann::json to_json(const ParamSheet& s) {
  return {{"n", s.n},
          {"eps", s.eps},
          {"m", s.m},
          {"r", s.r},
          {"asymptotic",
           {{"log_n", s.log_n},
            {"eta", s.eta},
            {"ell", s.ell},
            {"k", s.k},
            {"L", s.L},
            {"s", s.s},
            {"s_blowup", s.s_blowup},
            {"p", s.p},
            {"q", s.q},
            {"edge_threshold", s.edge_threshold},
            {"blowup_edge_threshold", s.blowup_edge_threshold},
            {"max_pairs", s.max_pairs},
            {"feasible", s.feasible},
            {"blowup_feasible", s.blowup_feasible}}},
          {"used", to_json(s.desk)}};
}

}  // namespace rainbow
