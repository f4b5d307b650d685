#pragma once

#include <optional>

#include "sbss/gmca.hpp"
#include "sbss/mat.hpp"
#include "sbss/starlet.hpp"

namespace sbss {

enum class ThresholdMode {
  RecomputeMad,  // k * MAD of the current gradient-step details, every iteration
  Frozen,        // fixed penalty levels, threshold = step * lambda * weight
};

struct PalmConfig {
  int n_iters = 2000;
  double gamma = 0.9;  // step factor relative to the Lipschitz bound
  double k_mad = 3.0;
  ThresholdMode threshold_mode = ThresholdMode::RecomputeMad;
  Mat frozen_lambdas;          // n_sources x n_scales, required in Frozen mode
  std::optional<Mat> weights;  // n_sources x detailCount, in (0, 1]; empty = ones
  // In RecomputeMad mode, fraction of the budget after which the last
  // computed levels are frozen; 0 keeps recomputing to the end.
  double burn_in_fraction = 0.0;
  double tol_objective = 1e-8;  // early-stop test, active only while frozen
  int stop_window = 10;         // consecutive small changes required to stop

  void validate(Index n_sources, const Geometry& geom) const;
};

struct PalmSStep {
  Mat s;
  Mat thresholds;  // applied per-plane base values (before reweighting), n x n_scales
  Mat lambdas;     // equivalent penalty levels (thresholds / step), n x n_scales
  double step = 0.0;
};

// Proximal gradient step in S: gradient of the fidelity with step
// gamma / ||A||_2^2, then per-scale soft thresholding of the detail planes
// of the gradient iterate and additive rebuild. The thresholds are
// step * lambda * weight in Frozen mode and k_mad times the plane MAD in
// RecomputeMad mode. Note the rebuild makes this an approximation of the
// proximal map (the transform is redundant), not the exact prox.
PalmSStep palmStepS(const Mat& x, const Mat& a, const Mat& s, const PalmConfig& cfg,
                    const Geometry& geom);

// Projected gradient step in A with step gamma / ||S||_2^2, columns mapped
// back onto the unit ball.
Mat palmStepA(const Mat& x, const Mat& a, const Mat& s, const PalmConfig& cfg);

// Reweighting factors from a reference source estimate:
// eps / (eps + |coefficient| / row max magnitude), 1 where a row is all zero.
Mat computeReweighting(const Mat& s_ref, double epsilon, const Geometry& geom);

// Alternates S and A steps for cfg.n_iters (0 returns the inputs untouched).
// The trace records fidelity plus the weighted detail l1 at the levels of
// each iteration. With zero levels the trace cannot increase (both blocks
// are plain projected gradient steps at safe step sizes); with nonzero
// frozen levels the inexact S prox can produce small transient rises even
// though the trend is downward.
SolveResult runPalm(const Mat& x, const PalmConfig& cfg, const Geometry& geom, const Mat& a0,
                    const Mat& s0);

}  // namespace sbss
