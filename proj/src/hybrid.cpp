#include "sbss/hybrid.hpp"

#include "sbss/numkernel.hpp"

namespace sbss {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974ull;
constexpr std::uint64_t kWarmupStream = 0x77617263ull;

}  // namespace

std::string modeName(SolveMode mode) {
  switch (mode) {
    case SolveMode::TwoStep: return "two-step";
    case SolveMode::GmcaOnly: return "gmca";
    case SolveMode::PalmMadRandomInit: return "palm";
  }
  throw SolverError("modeName: unknown mode");
}

SolveMode modeFromName(const std::string& name) {
  if (name == "two-step") return SolveMode::TwoStep;
  if (name == "gmca") return SolveMode::GmcaOnly;
  if (name == "palm") return SolveMode::PalmMadRandomInit;
  throw ParseError("unknown mode '" + name + "' (expected two-step, gmca, or palm)");
}

void TwoStepConfig::validate(const Geometry& geom) const {
  if (n_sources < 1) throw SolverError("two-step: n_sources must be >= 1");
  if (epsilon <= 0.0) throw SolverError("two-step: epsilon must be positive");
  gmca.validate();
  // Refinement lambdas and weights are produced internally, so only the
  // scalar knobs are checked here.
  PalmConfig probe = palm;
  probe.threshold_mode = ThresholdMode::RecomputeMad;
  probe.weights.reset();
  probe.validate(n_sources, geom);
}

Mat drawInitialMixing(Index m_obs, Index n_sources, std::uint64_t rng_seed) {
  if (n_sources < 1 || m_obs < n_sources)
    throw SolverError("drawInitialMixing: need 1 <= n_sources <= m_obs");
  Rng rng(deriveSeed(rng_seed, kInitStream));
  Mat a0 = rng.normalMat(m_obs, n_sources);
  ColumnNormalization norm = normalizeColumnsSphere(a0);
  while (!norm.degenerate_columns.empty()) {
    for (Index j : norm.degenerate_columns) norm.matrix.col(j) = rng.normalVec(m_obs);
    norm = normalizeColumnsSphere(norm.matrix);
  }
  return norm.matrix;
}

namespace {

// Penalty levels for the refinement: project the warm-up residual back into
// source space and take k * MAD of each detail plane, scale by scale.
Mat residualLambdaSeed(const Mat& x, const SolveResult& warmup, double k_mad,
                       double ridge_rel, const Geometry& geom) {
  Mat residual = x - warmup.a * warmup.s;
  Mat projected = pseudoInverseAuto(warmup.a, ridge_rel) * residual;
  Mat lambdas(projected.rows(), geom.n_scales);
  Vec row(projected.cols());
  for (Index i = 0; i < projected.rows(); ++i) {
    row = projected.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    for (int sc = 0; sc < geom.n_scales; ++sc) lambdas(i, sc) = k_mad * mad(pyr.details[sc]);
  }
  return lambdas;
}

GmcaConfig seededGmca(const TwoStepConfig& cfg) {
  GmcaConfig g = cfg.gmca;
  g.rng_seed = deriveSeed(cfg.rng_seed, kWarmupStream);
  return g;
}

}  // namespace

TwoStepResult runTwoStep(const Mat& x, const TwoStepConfig& cfg, const Geometry& geom) {
  geom.validate();
  geom.requireSourceShape(x, "runTwoStep");
  cfg.validate(geom);

  Mat a0 = drawInitialMixing(x.rows(), cfg.n_sources, cfg.rng_seed);

  TwoStepResult res;
  res.warmup = runGmca(x, seededGmca(cfg), geom, a0);

  res.weights = cfg.use_reweighting
                    ? computeReweighting(res.warmup.s, cfg.epsilon, geom)
                    : Mat::Ones(cfg.n_sources, geom.detailCount());

  if (cfg.palm.n_iters == 0) {
    // Refinement disabled: the warm-up output is the final answer.
    res.lambda_seed = res.warmup.final_lambdas;
    res.refinement.a = res.warmup.a;
    res.refinement.s = res.warmup.s;
    res.refinement.final_lambdas = res.lambda_seed;
    return res;
  }

  res.lambda_seed = residualLambdaSeed(x, res.warmup, cfg.palm.k_mad, cfg.gmca.ridge_rel, geom);

  PalmConfig refine = cfg.palm;
  refine.weights = res.weights;
  if (refine.threshold_mode == ThresholdMode::Frozen) {
    refine.frozen_lambdas = res.lambda_seed;
  }
  res.refinement = runPalm(x, refine, geom, res.warmup.a, res.warmup.s);
  return res;
}

ModeResult runMode(const Mat& x, SolveMode mode, const TwoStepConfig& cfg, const Geometry& geom) {
  geom.validate();
  geom.requireSourceShape(x, "runMode");
  cfg.validate(geom);

  ModeResult out;
  out.mode = mode;
  switch (mode) {
    case SolveMode::TwoStep: {
      out.two_step = runTwoStep(x, cfg, geom);
      out.a = out.two_step->a();
      out.s = out.two_step->s();
      break;
    }
    case SolveMode::GmcaOnly: {
      Mat a0 = drawInitialMixing(x.rows(), cfg.n_sources, cfg.rng_seed);
      out.single = runGmca(x, seededGmca(cfg), geom, a0);
      out.a = out.single->a;
      out.s = out.single->s;
      break;
    }
    case SolveMode::PalmMadRandomInit: {
      Mat a0 = drawInitialMixing(x.rows(), cfg.n_sources, cfg.rng_seed);
      Mat s0 = pseudoInverseAuto(a0, cfg.gmca.ridge_rel) * x;
      PalmConfig palm = cfg.palm;
      palm.threshold_mode = ThresholdMode::RecomputeMad;
      palm.burn_in_fraction = 0.0;  // MAD levels for the whole budget
      palm.weights.reset();
      out.single = runPalm(x, palm, geom, a0, s0);
      out.a = out.single->a;
      out.s = out.single->s;
      break;
    }
  }
  return out;
}

}  // namespace sbss
