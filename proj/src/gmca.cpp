#include "sbss/gmca.hpp"

#include <cmath>
#include <string>

#include "sbss/numkernel.hpp"
#include "sbss/objective.hpp"

namespace sbss {

void GmcaConfig::validate() const {
  if (n_iters < 1) throw SolverError("gmca: n_iters must be >= 1");
  if (k_final < 0.0) throw SolverError("gmca: k_final must be nonnegative");
  if (k_start < k_final) throw SolverError("gmca: k_start must be >= k_final");
  if (ridge_rel < 0.0) throw SolverError("gmca: ridge_rel must be nonnegative");
}

double GmcaConfig::kAt(int iteration) const {
  if (n_iters <= 1) return k_final;
  double t = static_cast<double>(iteration) / static_cast<double>(n_iters - 1);
  return k_start + (k_final - k_start) * t;
}

GmcaSStep gmcaUpdateS(const Mat& x, const Mat& a, double k_current, const Geometry& geom,
                      double ridge_rel) {
  geom.validate();
  geom.requireSourceShape(x, "gmcaUpdateS");
  if (a.rows() != x.rows()) throw SolverError("gmcaUpdateS: A row count does not match X");
  if (k_current < 0.0) throw SolverError("gmcaUpdateS: negative threshold multiplier");
  if (a.isZero(0.0)) throw SolverError("gmcaUpdateS: zero mixing iterate");

  Mat s_ls = pseudoInverseAuto(a, ridge_rel) * x;

  GmcaSStep out;
  out.s.resize(s_ls.rows(), s_ls.cols());
  out.thresholds.resize(s_ls.rows(), geom.n_scales);
  Vec row(s_ls.cols());
  for (Index i = 0; i < s_ls.rows(); ++i) {
    row = s_ls.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    for (int sc = 0; sc < geom.n_scales; ++sc) {
      Vec& d = pyr.details[sc];
      double tau = k_current * mad(d);
      out.thresholds(i, sc) = tau;
      for (Index p = 0; p < d.size(); ++p) d[p] = softThresholdScalar(d[p], tau);
    }
    out.s.row(i) = starletInverse(pyr);
  }
  return out;
}

namespace {

// Two unit columns with |cosine| above this ceiling describe the same
// direction: the iterate is effectively rank-deficient even though neither
// column is zero, and alternating least squares cannot pull such a pair
// apart again (the pair locks onto the shared coarse plane).  A condition
// number of 10 puts legitimate mixings at |cosine| ~ 0.97, safely below.
constexpr double kCollinearCeil = 0.995;

void redrawColumn(Mat& a, Index j, Rng& rng, int* redraw_count) {
  Vec fresh = rng.normalVec(a.rows());
  double nrm = fresh.norm();
  while (nrm == 0.0) {
    fresh = rng.normalVec(a.rows());
    nrm = fresh.norm();
  }
  a.col(j) = fresh / nrm;
  if (redraw_count != nullptr) ++*redraw_count;
}

}  // namespace

Mat gmcaUpdateA(const Mat& x, const Mat& s, double ridge_rel, Rng& rng, int* redraw_count) {
  if (s.cols() != x.cols()) throw SolverError("gmcaUpdateA: S column count does not match X");
  if (s.isZero(0.0)) throw SolverError("gmcaUpdateA: separation collapsed, S is zero");

  Mat a = x * pseudoInverseAuto(s, ridge_rel);
  ColumnNormalization norm = normalizeColumnsSphere(a);
  for (Index j : norm.degenerate_columns) redrawColumn(norm.matrix, j, rng, redraw_count);

  // Duplicate directions are degenerate too; replace the later twin so the
  // thresholded S step can re-seed a genuinely distinct source.
  for (Index j = 1; j < norm.matrix.cols(); ++j) {
    bool clean = false;
    int attempts = 0;
    while (!clean && attempts < 64) {
      clean = true;
      for (Index i = 0; i < j; ++i) {
        double c = std::abs((norm.matrix.col(i).transpose() * norm.matrix.col(j)).value());
        if (c > kCollinearCeil) {
          redrawColumn(norm.matrix, j, rng, redraw_count);
          clean = false;
          ++attempts;
          break;
        }
      }
    }
  }
  return norm.matrix;
}

SolveResult runGmca(const Mat& x, const GmcaConfig& cfg, const Geometry& geom, const Mat& a0) {
  cfg.validate();
  geom.validate();
  geom.requireSourceShape(x, "runGmca");
  if (a0.rows() != x.rows()) throw SolverError("runGmca: A0 row count does not match X");
  if (a0.cols() > a0.rows()) throw SolverError("runGmca: more sources than observations");
  requireFinite(x, "runGmca: X");
  requireFinite(a0, "runGmca: A0");

  Rng rng(deriveSeed(cfg.rng_seed, 0x67636d63ull));  // column redraw stream

  SolveResult res;
  res.a = a0;
  res.objective_trace.reserve(cfg.n_iters);
  res.threshold_history.reserve(cfg.n_iters);
  for (int it = 0; it < cfg.n_iters; ++it) {
    try {
      GmcaSStep step = gmcaUpdateS(x, res.a, cfg.kAt(it), geom, cfg.ridge_rel);
      res.s = std::move(step.s);
      res.threshold_history.push_back(std::move(step.thresholds));
      res.a = gmcaUpdateA(x, res.s, cfg.ridge_rel, rng, &res.degenerate_redraws);
    } catch (const SolverError& e) {
      throw SolverError("gmca iteration " + std::to_string(it) + ": " + e.what());
    }
    res.objective_trace.push_back(dataFidelity(x, res.a, res.s));
    res.iterations = it + 1;
  }
  res.final_lambdas = res.threshold_history.back();
  res.converged = true;
  return res;
}

}  // namespace sbss
