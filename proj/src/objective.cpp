#include "sbss/objective.hpp"

#include <cmath>

namespace sbss {

void Penalty::validate(Index n_sources, const Geometry& geom) const {
  if (lambdas.size() != n_sources) throw SolverError("penalty: lambdas length mismatch");
  if ((lambdas.array() < 0.0).any()) throw SolverError("penalty: negative lambda");
  if (n_scales != geom.n_scales) throw SolverError("penalty: n_scales mismatch");
  if (weights.rows() != n_sources || weights.cols() != geom.detailCount())
    throw SolverError("penalty: weights shape mismatch");
  if ((weights.array() <= 0.0).any() || (weights.array() > 1.0).any())
    throw SolverError("penalty: weights must lie in (0, 1]");
}

Penalty Penalty::uniform(Index n_sources, const Geometry& geom, double k_mad, double lambda) {
  Penalty p;
  p.k_mad = k_mad;
  p.lambdas = Vec::Constant(n_sources, lambda);
  p.weights = Mat::Ones(n_sources, geom.detailCount());
  p.n_scales = geom.n_scales;
  return p;
}

static void checkFactorShapes(const Mat& x, const Mat& a, const Mat& s) {
  if (a.rows() != x.rows()) throw SolverError("objective: A row count does not match X");
  if (a.cols() != s.rows()) throw SolverError("objective: A columns do not match S rows");
  if (s.cols() != x.cols()) throw SolverError("objective: S column count does not match X");
}

double dataFidelity(const Mat& x, const Mat& a, const Mat& s) {
  checkFactorShapes(x, a, s);
  // Extended-precision accumulation keeps the value within an ulp or two of
  // the exact sum, so descent checks on traces are not drowned in rounding.
  Mat r = x - a * s;
  const double* p = r.data();
  long double acc = 0.0L;
  for (Index k = 0; k < r.size(); ++k) acc += static_cast<long double>(p[k]) * p[k];
  return static_cast<double>(0.5L * acc);
}

double weightedDetailL1(const Mat& s, const Mat& lambda_scales, const Mat* weights,
                        const Geometry& geom) {
  geom.validate();
  geom.requireSourceShape(s, "weightedDetailL1");
  if (lambda_scales.rows() != s.rows() || lambda_scales.cols() != geom.n_scales)
    throw SolverError("weightedDetailL1: lambda matrix shape mismatch");
  if (weights != nullptr &&
      (weights->rows() != s.rows() || weights->cols() != geom.detailCount()))
    throw SolverError("weightedDetailL1: weights shape mismatch");

  const int wh = geom.pixels();
  long double total = 0.0L;
  Vec row(s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    row = s.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    for (int sc = 0; sc < geom.n_scales; ++sc) {
      const Vec& d = pyr.details[sc];
      long double acc = 0.0L;
      if (weights == nullptr) {
        for (Index p = 0; p < d.size(); ++p) acc += std::abs(static_cast<long double>(d[p]));
      } else {
        for (int p = 0; p < wh; ++p)
          acc += static_cast<long double>((*weights)(i, static_cast<Index>(sc) * wh + p)) * std::abs(d[p]);
      }
      total += static_cast<long double>(lambda_scales(i, sc)) * acc;
    }
  }
  return static_cast<double>(total);
}

double sparsityPenalty(const Mat& s, const Penalty& penalty, const Geometry& geom) {
  penalty.validate(s.rows(), geom);
  Mat lambda_scales = penalty.lambdas.replicate(1, geom.n_scales);
  return weightedDetailL1(s, lambda_scales, &penalty.weights, geom);
}

ObjectiveValue fullObjective(const Mat& x, const Mat& a, const Mat& s, const Penalty& penalty,
                             const Geometry& geom) {
  ObjectiveValue v;
  v.fidelity = dataFidelity(x, a, s);
  v.penalty = sparsityPenalty(s, penalty, geom);
  v.value = v.fidelity + v.penalty;
  v.feasible = true;
  for (Index j = 0; j < a.cols(); ++j)
    if (a.col(j).squaredNorm() > 1.0 + 1e-9) v.feasible = false;
  return v;
}

Mat gradS(const Mat& x, const Mat& a, const Mat& s) {
  checkFactorShapes(x, a, s);
  return a.transpose() * (a * s - x);
}

Mat gradA(const Mat& x, const Mat& a, const Mat& s) {
  checkFactorShapes(x, a, s);
  return (a * s - x) * s.transpose();
}

}  // namespace sbss
