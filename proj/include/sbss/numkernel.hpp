#pragma once

#include <span>
#include <vector>

#include "sbss/mat.hpp"

namespace sbss {

// Median absolute deviation: median(|v - median(v)|). Even-length medians
// average the two central elements.
double mad(std::span<const double> v);
double mad(const Vec& v);

// MAD of each row.
Vec madRows(const Mat& m);

// Entrywise soft threshold: sign(m) * max(|m| - t, 0). Thresholds must be
// nonnegative and the same shape as m.
Mat softThreshold(const Mat& m, const Mat& thresholds);
double softThresholdScalar(double x, double t);

// Rescales any column with squared norm > 1 back onto the unit ball.
Mat projectColumnsBall(const Mat& a);

struct ColumnNormalization {
  Mat matrix;
  Vec scales;  // original column norms (1 for all-zero columns)
  std::vector<Index> degenerate_columns;
};

// Scales every column to unit norm; all-zero columns are left in place and
// reported as degenerate.
ColumnNormalization normalizeColumnsSphere(const Mat& a);

struct SpectralNormResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  Vec top_vector;  // iteration vector, reusable as a warm start
};

// Largest singular value by power iteration on the smaller Gram side. Starts
// from the all-ones vector (or warm_start when it has the right length) and
// stops when the relative change of the estimate drops below tol. Runs
// deterministically; a stalled start vector falls back to canonical basis
// vectors.
SpectralNormResult spectralNorm(const Mat& m, double tol = 1e-12, int max_iters = 10000,
                                const Vec* warm_start = nullptr);

// Moore-Penrose pseudo-inverse through the smaller-side Gram matrix, with
// ridge * I added to the Gram before inversion. ridge = 0 requires full rank.
Mat pseudoInverse(const Mat& m, double ridge = 0.0);

// Ridge chosen relative to the largest Gram diagonal entry; the variant the
// solvers use on possibly ill-conditioned iterates.
Mat pseudoInverseAuto(const Mat& m, double ridge_rel = 1e-12);

}  // namespace sbss
