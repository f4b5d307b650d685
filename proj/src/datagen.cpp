#include "sbss/datagen.hpp"

#include <cmath>
#include <limits>

#include "sbss/metrics.hpp"
#include "sbss/numkernel.hpp"
#include "sbss/rng.hpp"

namespace sbss {

namespace {

constexpr std::uint64_t kSourceStream = 0x736f7572ull;
constexpr std::uint64_t kMixingStream = 0x6d697869ull;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973ull;
constexpr double kCoarseAmplitude = 0.1;

double conditionNumber(const Mat& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  double smallest = sv[sv.size() - 1];
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smallest;
}

}  // namespace

std::uint64_t sourceSeed(std::uint64_t base) { return deriveSeed(base, kSourceStream); }
std::uint64_t mixingSeed(std::uint64_t base) { return deriveSeed(base, kMixingStream); }
std::uint64_t noiseSeed(std::uint64_t base) { return deriveSeed(base, kNoiseStream); }

void SyntheticSpec::validate() const {
  geometry().validate();
  if (n_sources < 1) throw SolverError("synthetic spec: n_sources must be >= 1");
  if (observations() < n_sources)
    throw SolverError("synthetic spec: need at least as many observations as sources");
  if (sparsity_rate <= 0.0 || sparsity_rate > 1.0)
    throw SolverError("synthetic spec: sparsity_rate must lie in (0, 1]");
  if (condition_number < 1.0)
    throw SolverError("synthetic spec: condition_number must be >= 1");
  if (std::isnan(snr_db)) throw SolverError("synthetic spec: snr_db is NaN");
}

SourceGen genSources(const SyntheticSpec& spec) {
  spec.validate();
  const Geometry geom = spec.geometry();
  const int wh = geom.pixels();

  SourceGen out;
  out.s.resize(spec.n_sources, wh);
  out.planted.reserve(spec.n_sources);

  const std::uint64_t base = sourceSeed(spec.rng_seed);
  for (int i = 0; i < spec.n_sources; ++i) {
    Rng rng(deriveSeed(base, static_cast<std::uint64_t>(i)));
    StarletPyramid planted;
    planted.width = geom.width;
    planted.height = geom.height;
    for (int sc = 0; sc < geom.n_scales; ++sc) {
      const double amplitude = std::ldexp(10.0, -sc);
      Vec plane = Vec::Zero(wh);
      for (int p = 0; p < wh; ++p) {
        if (rng.uniform() < spec.sparsity_rate) plane[p] = amplitude * rng.normal();
      }
      planted.details.push_back(std::move(plane));
    }
    // Smooth low-amplitude background: the coarse plane of a white field.
    Vec white = rng.normalVec(wh);
    StarletPyramid smooth = starletForward(white, geom.width, geom.height, geom.n_scales);
    planted.coarse = kCoarseAmplitude * smooth.coarse;

    out.s.row(i) = starletInverse(planted);
    out.planted.push_back(std::move(planted));
  }
  return out;
}

MixingGen genMixing(const SyntheticSpec& spec) {
  spec.validate();
  const int m = spec.observations();
  const int n = spec.n_sources;

  Rng rng(mixingSeed(spec.rng_seed));
  Mat g = rng.normalMat(m, n);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int k = static_cast<int>(svd.singularValues().size());
  Vec ramp(k);
  for (int i = 0; i < k; ++i) {
    double t = k > 1 ? static_cast<double>(i) / static_cast<double>(k - 1) : 0.0;
    ramp[i] = std::pow(spec.condition_number, -t);
  }
  Mat shaped = svd.matrixU() * ramp.asDiagonal() * svd.matrixV().transpose();

  MixingGen out;
  out.cond_pre = conditionNumber(shaped);
  ColumnNormalization norm = normalizeColumnsSphere(shaped);
  if (!norm.degenerate_columns.empty())
    throw SolverError("genMixing: degenerate column after shaping");
  out.a = std::move(norm.matrix);
  out.cond_post = conditionNumber(out.a);
  return out;
}

NoiseGen addNoise(const Mat& x_clean, double snr_db, std::uint64_t seed) {
  requireNonEmpty(x_clean, "addNoise");
  requireFinite(x_clean, "addNoise");
  if (std::isnan(snr_db)) throw SolverError("addNoise: snr_db is NaN");

  NoiseGen out;
  if (std::isinf(snr_db) && snr_db > 0.0) {
    out.x_noisy = x_clean;
    out.n = Mat::Zero(x_clean.rows(), x_clean.cols());
    out.snr_achieved = std::numeric_limits<double>::infinity();
    return out;
  }
  double signal_norm = x_clean.norm();
  if (signal_norm == 0.0) throw SolverError("addNoise: zero signal");

  Rng rng(deriveSeed(seed, kNoiseStream));
  Mat raw = rng.normalMat(x_clean.rows(), x_clean.cols());
  double raw_norm = raw.norm();
  double scale = signal_norm / raw_norm * std::pow(10.0, -snr_db / 20.0);
  out.n = scale * raw;
  out.x_noisy = x_clean + out.n;
  out.snr_achieved = snrDb(x_clean, out.n);
  return out;
}

SeparationProblem genProblem(const SyntheticSpec& spec) {
  spec.validate();

  SeparationProblem problem;
  problem.spec = spec;

  SourceGen sources = genSources(spec);
  MixingGen mixing = genMixing(spec);
  problem.s_true = std::move(sources.s);
  problem.a_true = std::move(mixing.a);
  problem.cond_pre = mixing.cond_pre;
  problem.cond_post = mixing.cond_post;

  Mat x_clean = problem.a_true * problem.s_true;
  NoiseGen noisy = addNoise(x_clean, spec.snr_db, noiseSeed(spec.rng_seed));
  problem.x = std::move(noisy.x_noisy);
  // Stored so that X - A S reproduces it bit for bit.
  problem.n = problem.x - x_clean;
  problem.snr_achieved = noisy.snr_achieved;
  return problem;
}

}  // namespace sbss
