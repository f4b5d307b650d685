#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "sbss/datagen.hpp"
#include "sbss/numkernel.hpp"
#include "sbss/objective.hpp"
#include "sbss/palm.hpp"

using namespace sbss;

namespace {

SeparationProblem smallProblem(std::uint64_t seed, double snr) {
  SyntheticSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.snr_db = snr;
  spec.rng_seed = seed;
  return genProblem(spec);
}

}  // namespace

TEST_CASE("source step with zero frozen levels is a fixed point at the optimum") {
  SeparationProblem pr = smallProblem(3, std::numeric_limits<double>::infinity());

  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Zero(2, 3);
  PalmSStep step = palmStepS(pr.x, pr.a_true, pr.s_true, cfg, pr.spec.geometry());
  // Zero gradient, zero threshold: only transform round-trip error remains.
  CHECK((step.s - pr.s_true).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(step.step > 0.0);
}

TEST_CASE("huge frozen levels wipe every detail plane") {
  SeparationProblem pr = smallProblem(4, 20.0);
  Geometry geom = pr.spec.geometry();

  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Constant(2, 3, 1e12);
  PalmSStep step = palmStepS(pr.x, pr.a_true, pr.s_true, cfg, geom);

  // Every detail coefficient of the gradient iterate saturates to zero, so
  // the rebuilt source is just its coarse plane.
  Mat g = pr.s_true - step.step * gradS(pr.x, pr.a_true, pr.s_true);
  for (Index i = 0; i < 2; ++i) {
    Vec row = g.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    CHECK((Vec(step.s.row(i)) - pyr.coarse).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("recomputed levels match a by-hand gradient iterate") {
  SeparationProblem pr = smallProblem(5, 20.0);
  Geometry geom = pr.spec.geometry();

  PalmConfig cfg;  // RecomputeMad
  Rng rng(50);
  Mat a = pr.a_true + 0.05 * rng.normalMat(2, 2);
  Mat s = pseudoInverseAuto(a, 1e-12) * pr.x;
  PalmSStep step = palmStepS(pr.x, a, s, cfg, geom);

  double sn = spectralNorm(a).value;
  CHECK(step.step == doctest::Approx(cfg.gamma / (sn * sn)).epsilon(1e-10));

  Mat g = s - step.step * gradS(pr.x, a, s);
  for (Index i = 0; i < 2; ++i) {
    Vec row = g.row(i);
    StarletPyramid pyr = starletForward(row, geom.width, geom.height, geom.n_scales);
    for (int sc = 0; sc < geom.n_scales; ++sc) {
      double tau = cfg.k_mad * mad(pyr.details[sc]);
      CHECK(step.thresholds(i, sc) == doctest::Approx(tau).epsilon(1e-10));
      CHECK(step.lambdas(i, sc) == doctest::Approx(tau / step.step).epsilon(1e-10));
    }
  }
}

TEST_CASE("frozen levels scale with the step size") {
  SeparationProblem pr = smallProblem(6, 20.0);
  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Constant(2, 3, 0.8);
  PalmSStep step = palmStepS(pr.x, pr.a_true, pr.s_true, cfg, pr.spec.geometry());

  double sn = spectralNorm(pr.a_true).value;
  CHECK(step.step == doctest::Approx(cfg.gamma / (sn * sn)).epsilon(1e-10));
  for (Index i = 0; i < 2; ++i)
    for (int sc = 0; sc < 3; ++sc) {
      CHECK(step.thresholds(i, sc) == doctest::Approx(step.step * 0.8).epsilon(1e-12));
      CHECK(step.lambdas(i, sc) == 0.8);
    }
}

TEST_CASE("source step refuses a zero mixing iterate") {
  SeparationProblem pr = smallProblem(7, 20.0);
  PalmConfig cfg;
  Mat zero_a = Mat::Zero(2, 2);
  CHECK_THROWS_AS(palmStepS(pr.x, zero_a, pr.s_true, cfg, pr.spec.geometry()), SolverError);
}

TEST_CASE("one frozen source step descends the frozen objective") {
  SeparationProblem pr = smallProblem(8, 20.0);
  Geometry geom = pr.spec.geometry();

  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Constant(2, 3, 0.5);
  Rng rng(80);
  Mat a = pr.a_true;
  Mat s = pr.s_true + 0.1 * rng.normalMat(2, geom.pixels());

  PalmSStep step = palmStepS(pr.x, a, s, cfg, geom);
  double before = dataFidelity(pr.x, a, s) + weightedDetailL1(s, cfg.frozen_lambdas, nullptr, geom);
  double after =
      dataFidelity(pr.x, a, step.s) + weightedDetailL1(step.s, cfg.frozen_lambdas, nullptr, geom);
  CHECK(after <= before + 1e-12);
}

TEST_CASE("mixing step is a fixed point at a feasible optimum") {
  SeparationProblem pr = smallProblem(9, std::numeric_limits<double>::infinity());
  PalmConfig cfg;
  Mat a2 = palmStepA(pr.x, pr.a_true, pr.s_true, cfg);
  CHECK((a2 - pr.a_true).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mixing step projects oversized columns back onto the ball") {
  SeparationProblem pr = smallProblem(10, 20.0);
  PalmConfig cfg;
  Rng rng(100);
  Mat a = 0.2 * rng.normalMat(2, 2);  // far from the data fit, big gradient pull
  Mat a2 = palmStepA(pr.x, a, pr.s_true, cfg);
  for (Index j = 0; j < 2; ++j) CHECK(a2.col(j).norm() <= 1.0 + 1e-12);
}

TEST_CASE("mixing step descends the fidelity") {
  SeparationProblem pr = smallProblem(11, 20.0);
  PalmConfig cfg;
  Rng rng(110);
  Mat a = pr.a_true + 0.2 * rng.normalMat(2, 2);
  a = projectColumnsBall(a);
  Mat a2 = palmStepA(pr.x, a, pr.s_true, cfg);
  CHECK(dataFidelity(pr.x, a2, pr.s_true) <= dataFidelity(pr.x, a, pr.s_true) + 1e-12);
  CHECK_THROWS_AS(palmStepA(pr.x, a, Mat::Zero(2, pr.s_true.cols()), cfg), SolverError);
}

TEST_CASE("zero-level frozen trace never increases") {
  SeparationProblem pr = smallProblem(12, 20.0);

  // With zero levels the trace is just the fidelity and both blocks are
  // plain (projected) gradient steps at safe step sizes, so it cannot go up.
  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Zero(2, 3);
  cfg.n_iters = 60;
  cfg.tol_objective = 0.0;  // run the full budget
  Rng rng(120);
  Mat a0 = projectColumnsBall(pr.a_true + 0.1 * rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;

  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  REQUIRE(res.objective_trace.size() == 60);
  for (size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-12);
}

TEST_CASE("frozen trace trends down with bounded transient rises") {
  SeparationProblem pr = smallProblem(12, 20.0);

  // With positive levels the S update thresholds in the redundant transform
  // domain and rebuilds, which only approximates the proximal map, so the
  // trace is not monotone: once the iterate nears the floor, small transient
  // rises appear before the trend resumes downward. Pin that shape so a
  // change in either direction is visible.
  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Constant(2, 3, 0.4);
  cfg.n_iters = 60;
  cfg.tol_objective = 0.0;
  Rng rng(120);
  Mat a0 = projectColumnsBall(pr.a_true + 0.1 * rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;

  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  REQUIRE(res.objective_trace.size() == 60);
  double max_rise = 0.0;
  for (size_t i = 1; i < res.objective_trace.size(); ++i)
    max_rise = std::max(max_rise, res.objective_trace[i] - res.objective_trace[i - 1]);
  CHECK(max_rise > 0.0);
  CHECK(max_rise < 1.0);
  CHECK(res.objective_trace.back() < res.objective_trace.front());
}

TEST_CASE("noiseless truth with zero levels is stationary") {
  SeparationProblem pr = smallProblem(13, std::numeric_limits<double>::infinity());

  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Zero(2, 3);
  cfg.n_iters = 5;
  cfg.tol_objective = 0.0;
  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), pr.a_true, pr.s_true);
  CHECK((res.a - pr.a_true).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((res.s - pr.s_true).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("every mixing iterate stays feasible") {
  SeparationProblem pr = smallProblem(14, 10.0);
  PalmConfig cfg;
  cfg.n_iters = 30;
  Rng rng(140);
  Mat a0 = projectColumnsBall(rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;
  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  for (Index j = 0; j < res.a.cols(); ++j) CHECK(res.a.col(j).norm() <= 1.0 + 1e-9);
}

TEST_CASE("frozen mode can stop early on a flat objective") {
  SeparationProblem pr = smallProblem(15, 40.0);

  // Positive held levels give the objective a positive limit, so the
  // relative-change test has something to settle against.
  PalmConfig cfg;
  cfg.threshold_mode = ThresholdMode::Frozen;
  cfg.frozen_lambdas = Mat::Constant(2, 3, 0.4);
  cfg.n_iters = 2000;
  cfg.tol_objective = 1e-6;
  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), pr.a_true, pr.s_true);
  CHECK(res.converged);
  CHECK(res.iterations < 2000);
}

TEST_CASE("recompute mode runs its whole budget") {
  SeparationProblem pr = smallProblem(16, 20.0);
  PalmConfig cfg;  // RecomputeMad, no burn-in
  cfg.n_iters = 25;
  cfg.tol_objective = 1e-2;  // would trip instantly if the stop test were active
  Rng rng(160);
  Mat a0 = projectColumnsBall(rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;
  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  CHECK(res.iterations == 25);
  CHECK(!res.converged);
}

TEST_CASE("burn-in freezes the recomputed levels midway") {
  SeparationProblem pr = smallProblem(17, 20.0);
  Geometry geom = pr.spec.geometry();

  PalmConfig cfg;
  cfg.n_iters = 8;
  cfg.burn_in_fraction = 0.5;
  cfg.tol_objective = 0.0;
  Rng rng(170);
  Mat a0 = projectColumnsBall(rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;
  SolveResult hybrid = runPalm(pr.x, cfg, geom, a0, s0);

  // By-hand replay: 4 recompute iterations, then frozen at the last levels.
  PalmConfig rec = cfg;
  rec.burn_in_fraction = 0.0;
  rec.n_iters = 4;
  SolveResult head = runPalm(pr.x, rec, geom, a0, s0);

  PalmConfig froz = cfg;
  froz.threshold_mode = ThresholdMode::Frozen;
  froz.frozen_lambdas = head.final_lambdas;
  froz.burn_in_fraction = 0.0;
  froz.n_iters = 4;
  SolveResult tail = runPalm(pr.x, froz, geom, head.a, head.s);

  CHECK((hybrid.a - tail.a).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((hybrid.s - tail.s).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((hybrid.final_lambdas - tail.final_lambdas).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero-iteration budget returns the inputs untouched") {
  SeparationProblem pr = smallProblem(18, 20.0);
  PalmConfig cfg;
  cfg.n_iters = 0;
  Rng rng(180);
  Mat a0 = projectColumnsBall(rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;
  SolveResult res = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  CHECK((res.a - a0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((res.s - s0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.iterations == 0);
}

TEST_CASE("runPalm is deterministic") {
  SeparationProblem pr = smallProblem(19, 15.0);
  PalmConfig cfg;
  cfg.n_iters = 12;
  Rng rng(190);
  Mat a0 = projectColumnsBall(rng.normalMat(2, 2));
  Mat s0 = pseudoInverseAuto(a0, 1e-12) * pr.x;
  SolveResult r1 = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  SolveResult r2 = runPalm(pr.x, cfg, pr.spec.geometry(), a0, s0);
  CHECK((r1.a - r2.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r1.s - r2.s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reweighting follows eps / (eps + ratio)") {
  Geometry geom{8, 8, 1};
  Mat s(1, geom.pixels());
  s.setZero();
  // Build a source whose detail plane has a known max; easiest is to probe
  // the weights of an arbitrary seeded source directly against the formula.
  Rng rng(200);
  s.row(0) = rng.normalVec(geom.pixels());

  double eps = 1e-3;
  Mat w = computeReweighting(s, eps, geom);
  Vec row = s.row(0);
  StarletPyramid pyr = starletForward(row, 8, 8, 1);
  double peak = pyr.details[0].cwiseAbs().maxCoeff();
  for (Index p = 0; p < pyr.details[0].size(); ++p) {
    double ratio = std::abs(pyr.details[0][p]) / peak;
    CHECK(w(0, p) == doctest::Approx(eps / (eps + ratio)).epsilon(1e-12));
    CHECK(w(0, p) > 0.0);
    CHECK(w(0, p) <= 1.0);
  }

  // Extremes: an exactly-zero coefficient gets weight 1, the peak
  // coefficient gets eps / (eps + 1).
  Index argmax = 0;
  pyr.details[0].cwiseAbs().maxCoeff(&argmax);
  CHECK(w(0, argmax) == doctest::Approx(eps / (eps + 1.0)).epsilon(1e-12));
}

TEST_CASE("reweighting of a half-peak coefficient is about 2e-3") {
  CHECK(1e-3 / (1e-3 + 0.5) == doctest::Approx(1.996e-3).epsilon(1e-3));
}

TEST_CASE("reweighting is strictly decreasing in coefficient size") {
  Geometry geom{8, 8, 2};
  Rng rng(210);
  Mat s(1, geom.pixels());
  s.row(0) = rng.normalVec(geom.pixels());
  Mat w = computeReweighting(s, 1e-3, geom);

  Vec row = s.row(0);
  StarletPyramid pyr = starletForward(row, 8, 8, 2);
  int wh = geom.pixels();
  for (int sc = 0; sc < 2; ++sc)
    for (Index p = 1; p < wh; ++p) {
      double a = std::abs(pyr.details[sc][p - 1]);
      double b = std::abs(pyr.details[sc][p]);
      double wa = w(0, sc * wh + p - 1);
      double wb = w(0, sc * wh + p);
      if (a < b) CHECK(wa > wb);
      if (a > b) CHECK(wa < wb);
    }
}

TEST_CASE("reweighting of an all-zero row is all ones") {
  Geometry geom{8, 8, 2};
  Mat s = Mat::Zero(2, geom.pixels());
  Rng rng(220);
  s.row(0) = rng.normalVec(geom.pixels());
  Mat w = computeReweighting(s, 1e-3, geom);
  CHECK(w.row(1).minCoeff() == 1.0);
  CHECK(w.row(1).maxCoeff() == 1.0);
  CHECK_THROWS_AS(computeReweighting(s, 0.0, geom), SolverError);
}

TEST_CASE("config validation rejects malformed settings") {
  Geometry geom{8, 8, 2};
  PalmConfig cfg;
  CHECK_NOTHROW(cfg.validate(2, geom));

  PalmConfig gamma = cfg;
  gamma.gamma = 0.0;
  CHECK_THROWS_AS(gamma.validate(2, geom), SolverError);
  gamma.gamma = 1.5;
  CHECK_THROWS_AS(gamma.validate(2, geom), SolverError);

  PalmConfig froz = cfg;
  froz.threshold_mode = ThresholdMode::Frozen;
  CHECK_THROWS_AS(froz.validate(2, geom), SolverError);  // missing lambdas
  froz.frozen_lambdas = Mat::Constant(2, 2, -1.0);
  CHECK_THROWS_AS(froz.validate(2, geom), SolverError);
  froz.frozen_lambdas = Mat::Zero(2, 2);
  CHECK_NOTHROW(froz.validate(2, geom));

  PalmConfig wcfg = cfg;
  wcfg.weights = Mat::Zero(2, geom.detailCount());  // zero weight is outside (0, 1]
  CHECK_THROWS_AS(wcfg.validate(2, geom), SolverError);
  wcfg.weights = Mat::Ones(2, geom.detailCount());
  CHECK_NOTHROW(wcfg.validate(2, geom));

  PalmConfig burn = cfg;
  burn.burn_in_fraction = 1.5;
  CHECK_THROWS_AS(burn.validate(2, geom), SolverError);
}
