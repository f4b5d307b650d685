#pragma once

#include "sbss/mat.hpp"
#include "sbss/starlet.hpp"

namespace sbss {

// Sparsity penalty description: one multiplier per source plus entrywise
// reweighting factors over the flattened detail planes (scale-major,
// row-major pixels inside each scale).
struct Penalty {
  double k_mad = 3.0;
  Vec lambdas;   // one nonnegative multiplier per source
  Mat weights;   // n_sources x geom.detailCount(), entries in (0, 1]
  int n_scales = 0;

  void validate(Index n_sources, const Geometry& geom) const;
  static Penalty uniform(Index n_sources, const Geometry& geom, double k_mad, double lambda);
};

// 0.5 * ||X - A S||_F^2
double dataFidelity(const Mat& x, const Mat& a, const Mat& s);

// sum_i lambda_i * sum_j weights_ij * |detail coefficient j of source i|
double sparsityPenalty(const Mat& s, const Penalty& penalty, const Geometry& geom);

// Same penalty with a per-(source, scale) multiplier matrix
// (n_sources x n_scales); weights = nullptr means all ones. This is the
// granularity the solvers track internally.
double weightedDetailL1(const Mat& s, const Mat& lambda_scales, const Mat* weights,
                        const Geometry& geom);

struct ObjectiveValue {
  double value = 0.0;
  double fidelity = 0.0;
  double penalty = 0.0;
  bool feasible = false;  // every mixing column inside the unit ball
};

ObjectiveValue fullObjective(const Mat& x, const Mat& a, const Mat& s, const Penalty& penalty,
                             const Geometry& geom);

// Gradient of the fidelity term in S: A^T (A S - X).
Mat gradS(const Mat& x, const Mat& a, const Mat& s);

// Gradient of the fidelity term in A: (A S - X) S^T.
Mat gradA(const Mat& x, const Mat& a, const Mat& s);

}  // namespace sbss
