#pragma once

#include <cstdint>
#include <vector>

#include "sbss/mat.hpp"
#include "sbss/rng.hpp"
#include "sbss/starlet.hpp"

namespace sbss {

struct GmcaConfig {
  int n_iters = 100;
  double k_start = 30.0;  // first-iteration threshold multiplier
  double k_final = 3.0;   // last-iteration multiplier, reached linearly
  double ridge_rel = 1e-12;
  std::uint64_t rng_seed = 0;  // stream for redrawing collapsed mixing columns

  void validate() const;
  // Linear multiplier schedule; a single iteration uses k_final outright.
  double kAt(int iteration) const;
};

// Shared solver output: final factors plus per-iteration diagnostics.
struct SolveResult {
  Mat a;
  Mat s;
  std::vector<double> objective_trace;
  std::vector<Mat> threshold_history;  // n_sources x n_scales per iteration
  Mat final_lambdas;                   // n_sources x n_scales
  int iterations = 0;
  bool converged = false;
  int degenerate_redraws = 0;
};

struct GmcaSStep {
  Mat s;
  Mat thresholds;  // n_sources x n_scales, the applied per-plane values
};

// Least-squares source estimate followed by per-scale soft thresholding at
// k_current * MAD of each detail plane; the coarse plane passes through.
GmcaSStep gmcaUpdateS(const Mat& x, const Mat& a, double k_current, const Geometry& geom,
                      double ridge_rel);

// Least-squares mixing update, columns scaled to unit norm. Collapsed
// columns are redrawn from the rng stream and normalized.
Mat gmcaUpdateA(const Mat& x, const Mat& s, double ridge_rel, Rng& rng, int* redraw_count);

SolveResult runGmca(const Mat& x, const GmcaConfig& cfg, const Geometry& geom, const Mat& a0);

}  // namespace sbss
