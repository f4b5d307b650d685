#include "sbss/palm.hpp"

#include <cmath>
#include <string>

#include "sbss/numkernel.hpp"
#include "sbss/objective.hpp"

namespace sbss {

void PalmConfig::validate(Index n_sources, const Geometry& geom) const {
  if (n_iters < 0) throw SolverError("palm: n_iters must be nonnegative");
  if (gamma <= 0.0 || gamma > 1.0) throw SolverError("palm: gamma must lie in (0, 1]");
  if (k_mad < 0.0) throw SolverError("palm: k_mad must be nonnegative");
  if (burn_in_fraction < 0.0 || burn_in_fraction > 1.0)
    throw SolverError("palm: burn_in_fraction must lie in [0, 1]");
  if (tol_objective < 0.0) throw SolverError("palm: tol_objective must be nonnegative");
  if (stop_window < 1) throw SolverError("palm: stop_window must be >= 1");
  if (threshold_mode == ThresholdMode::Frozen) {
    if (frozen_lambdas.rows() != n_sources || frozen_lambdas.cols() != geom.n_scales)
      throw SolverError("palm: frozen_lambdas must be n_sources x n_scales");
    if ((frozen_lambdas.array() < 0.0).any())
      throw SolverError("palm: frozen_lambdas must be nonnegative");
  }
  if (weights.has_value()) {
    if (weights->rows() != n_sources || weights->cols() != geom.detailCount())
      throw SolverError("palm: weights shape mismatch");
    if ((weights->array() <= 0.0).any() || (weights->array() > 1.0).any())
      throw SolverError("palm: weights must lie in (0, 1]");
  }
}

namespace {

double lipschitzStep(const Mat& m, double gamma, const char* what, Vec* warm) {
  SpectralNormResult sn = spectralNorm(m, 1e-12, 10000, warm);
  if (warm != nullptr) *warm = sn.top_vector;
  if (sn.value == 0.0) throw SolverError(std::string("palm: zero ") + what + " iterate");
  return gamma / (sn.value * sn.value);
}

// lambdas_in selects the mode: null means recompute levels from the MAD of
// each detail plane of the gradient iterate, non-null means apply the given
// frozen levels scaled by the step.
PalmSStep stepSImpl(const Mat& x, const Mat& a, const Mat& s, const PalmConfig& cfg,
                    const Geometry& geom, const Mat* lambdas_in, Vec* warm) {
  geom.requireSourceShape(s, "palmStepS");
  if (a.rows() != x.rows() || a.cols() != s.rows() || s.cols() != x.cols())
    throw SolverError("palmStepS: factor shape mismatch");

  const bool frozen = lambdas_in != nullptr;
  const int wh = geom.pixels();

  PalmSStep out;
  out.step = lipschitzStep(a, cfg.gamma, "mixing", warm);
  Mat g = s - out.step * (a.transpose() * (a * s - x)).eval();

  out.s.resize(s.rows(), s.cols());
  out.thresholds.resize(s.rows(), geom.n_scales);
  out.lambdas.resize(s.rows(), geom.n_scales);
  Vec row(s.cols());
  for (Index i = 0; i < s.rows(); ++i) {
    row = g.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    for (int sc = 0; sc < geom.n_scales; ++sc) {
      Vec& d = pyr.details[sc];
      double tau = frozen ? out.step * (*lambdas_in)(i, sc) : cfg.k_mad * mad(d);
      out.thresholds(i, sc) = tau;
      out.lambdas(i, sc) = frozen ? (*lambdas_in)(i, sc) : tau / out.step;
      if (cfg.weights.has_value()) {
        for (Index p = 0; p < d.size(); ++p)
          d[p] = softThresholdScalar(d[p], tau * (*cfg.weights)(i, static_cast<Index>(sc) * wh + p));
      } else {
        for (Index p = 0; p < d.size(); ++p) d[p] = softThresholdScalar(d[p], tau);
      }
    }
    out.s.row(i) = starletInverse(pyr);
  }
  return out;
}

}  // namespace

PalmSStep palmStepS(const Mat& x, const Mat& a, const Mat& s, const PalmConfig& cfg,
                    const Geometry& geom) {
  geom.validate();
  cfg.validate(a.cols(), geom);
  const Mat* lambdas =
      cfg.threshold_mode == ThresholdMode::Frozen ? &cfg.frozen_lambdas : nullptr;
  return stepSImpl(x, a, s, cfg, geom, lambdas, nullptr);
}

Mat palmStepA(const Mat& x, const Mat& a, const Mat& s, const PalmConfig& cfg) {
  if (a.rows() != x.rows() || a.cols() != s.rows() || s.cols() != x.cols())
    throw SolverError("palmStepA: factor shape mismatch");
  if (cfg.gamma <= 0.0 || cfg.gamma > 1.0) throw SolverError("palm: gamma must lie in (0, 1]");
  double step = lipschitzStep(s, cfg.gamma, "source", nullptr);
  return projectColumnsBall(a - step * ((a * s - x) * s.transpose()).eval());
}

Mat computeReweighting(const Mat& s_ref, double epsilon, const Geometry& geom) {
  if (epsilon <= 0.0) throw SolverError("computeReweighting: epsilon must be positive");
  geom.validate();
  geom.requireSourceShape(s_ref, "computeReweighting");

  const int wh = geom.pixels();
  Mat w(s_ref.rows(), geom.detailCount());
  Vec row(s_ref.cols());
  for (Index i = 0; i < s_ref.rows(); ++i) {
    row = s_ref.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    double peak = 0.0;
    for (const Vec& d : pyr.details) peak = std::max(peak, d.cwiseAbs().maxCoeff());
    if (peak == 0.0) {
      w.row(i).setOnes();
      continue;
    }
    for (int sc = 0; sc < geom.n_scales; ++sc) {
      const Vec& d = pyr.details[sc];
      for (Index p = 0; p < d.size(); ++p)
        w(i, static_cast<Index>(sc) * wh + p) = epsilon / (epsilon + std::abs(d[p]) / peak);
    }
  }
  return w;
}

SolveResult runPalm(const Mat& x, const PalmConfig& cfg, const Geometry& geom, const Mat& a0,
                    const Mat& s0) {
  geom.validate();
  geom.requireSourceShape(x, "runPalm");
  geom.requireSourceShape(s0, "runPalm");
  cfg.validate(a0.cols(), geom);
  if (a0.rows() != x.rows() || a0.cols() != s0.rows())
    throw SolverError("runPalm: initialization shape mismatch");
  requireFinite(x, "runPalm: X");
  requireFinite(a0, "runPalm: A0");
  requireFinite(s0, "runPalm: S0");

  SolveResult res;
  res.a = a0;
  res.s = s0;

  bool frozen = cfg.threshold_mode == ThresholdMode::Frozen;
  Mat lambdas = frozen ? cfg.frozen_lambdas : Mat::Zero(a0.cols(), geom.n_scales);
  int freeze_at = -1;
  if (!frozen && cfg.burn_in_fraction > 0.0)
    freeze_at = static_cast<int>(std::ceil(cfg.burn_in_fraction * cfg.n_iters));

  const Mat* weights = cfg.weights.has_value() ? &*cfg.weights : nullptr;
  Vec warm_a, warm_s;
  double prev_obj = 0.0;
  int stable = 0;

  res.objective_trace.reserve(cfg.n_iters);
  res.threshold_history.reserve(cfg.n_iters);
  for (int it = 0; it < cfg.n_iters; ++it) {
    // Freezing needs at least one recomputed set of levels behind it.
    if (freeze_at >= 0 && it >= freeze_at && it >= 1) frozen = true;
    try {
      PalmSStep step =
          stepSImpl(x, res.a, res.s, cfg, geom, frozen ? &lambdas : nullptr, &warm_a);
      res.s = std::move(step.s);
      if (!frozen) lambdas = std::move(step.lambdas);
      res.threshold_history.push_back(std::move(step.thresholds));
      double step_a = lipschitzStep(res.s, cfg.gamma, "source", &warm_s);
      res.a = projectColumnsBall(res.a - step_a * ((res.a * res.s - x) * res.s.transpose()).eval());
    } catch (const SolverError& e) {
      throw SolverError("palm iteration " + std::to_string(it) + ": " + e.what());
    }
    double obj = dataFidelity(x, res.a, res.s) + weightedDetailL1(res.s, lambdas, weights, geom);
    res.objective_trace.push_back(obj);
    res.iterations = it + 1;

    if (frozen && it > 0 && cfg.tol_objective > 0.0) {
      double scale = std::max(std::abs(obj), 1e-300);
      if (std::abs(obj - prev_obj) <= cfg.tol_objective * scale)
        ++stable;
      else
        stable = 0;
      if (stable >= cfg.stop_window) {
        res.converged = true;
        prev_obj = obj;
        break;
      }
    }
    prev_obj = obj;
  }
  res.final_lambdas = std::move(lambdas);
  return res;
}

}  // namespace sbss
