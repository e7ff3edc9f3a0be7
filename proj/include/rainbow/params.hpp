#pragma once

#include "rainbow/walkcount.hpp"

#include <json.hpp>

#include <cstdint>

namespace rainbow {

/// Knobs of the subdivision searches.  The defaults are the desk-scale
/// values; `param_calculator` reports them next to the asymptotic ones.
struct SearchParams {
  int k = 2;      // connector walk length (even)
  int s = 3;      // spare connectors per pair, good-pair level 1/s^2
  int ell = 2;    // reach depth: reach paths have length <= ell + 1
  int q = 4;      // colour-usage cap n/q on reach paths
  int L = 8;      // connector length bound, >= 2(ell + 1) + k
  double eps = 0.5;
  bool relaxed = true;
  int max_rounds = 200;         // theta-sampler rounds per connector
  int max_connect_pairs = 400;  // (u, v) candidates tried per rooted connector
  int max_greedy_starts = 64;   // restarts of the greedy Turan step
  int exact_max_n = 18;
  PairOptions pairs;
  double scale = 0.25;
};

struct ParamSheet {
  int n = 0;
  double eps = 0.5;
  int m = 2;
  int r = 1;

  // Asymptotic values.
  double log_n = 1;
  double eta = 0;
  double ell = 0;
  double k = 0;       // smallest even >= 2^9 log n / eta^2
  double L = 0;
  double s = 0;       // 2 C(m,2) k
  double s_blowup = 0;  // C(m,2) r k
  double p = 0;       // 8m
  double q = 0;       // 256 ell
  double edge_threshold = 0;         // n (log n)^60
  double blowup_edge_threshold = 0;  // n^{2-1/r} (log n)^{60/r}
  double max_pairs = 0;              // C(n,2)
  bool feasible = false;             // edge_threshold <= C(n,2)
  bool blowup_feasible = false;

  SearchParams desk;  // the values actually used
};

/// Pure function of (n, eps, m, r); `scale` multiplies the spare count s of
/// the desk values: s = max(2, ceil(scale * 2 C(m,2) k_desk)).
ParamSheet param_calculator(int n, double eps, int m, int r = 1, double scale = 0.25);

/// Desk s for the blow-up search, max(2, ceil(scale * C(m,2) r k_desk)).
int desk_blowup_s(int m, int r, int k, double scale);

nlohmann::json to_json(const SearchParams& p);
nlohmann::json to_json(const ParamSheet& sheet);

}  // namespace rainbow
