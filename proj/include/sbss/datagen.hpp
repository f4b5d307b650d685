#pragma once

#include <cstdint>
#include <vector>

#include "sbss/mat.hpp"
#include "sbss/starlet.hpp"

namespace sbss {

struct SyntheticSpec {
  int n_sources = 2;
  int width = 128;
  int height = 128;
  int m_obs = 0;  // 0 means one observation per source
  double sparsity_rate = 0.02;
  double condition_number = 10.0;
  double snr_db = 20.0;  // +inf means noiseless
  int n_scales = 3;
  std::uint64_t rng_seed = 0;

  int observations() const { return m_obs > 0 ? m_obs : n_sources; }
  Geometry geometry() const { return Geometry{width, height, n_scales}; }
  void validate() const;
};

struct SourceGen {
  Mat s;                                // n_sources x pixels
  std::vector<StarletPyramid> planted;  // sparse coefficient sets the rows were built from
};

// Each source is synthesized from Bernoulli(sparsity_rate) detail planes with
// per-scale amplitude 10 * 2^-scale times a standard normal draw, plus a
// low-amplitude smooth coarse plane.
SourceGen genSources(const SyntheticSpec& spec);

struct MixingGen {
  Mat a;  // observations x n_sources, unit columns
  double cond_pre = 0.0;   // condition number before column normalization
  double cond_post = 0.0;  // condition number after
};

// Random Gaussian matrix with its singular values replaced by a geometric
// ramp from 1 down to 1 / condition_number, then unit-normalized columns.
MixingGen genMixing(const SyntheticSpec& spec);

struct NoiseGen {
  Mat x_noisy;
  Mat n;
  double snr_achieved = 0.0;
};

// Gaussian noise scaled so that 10 log10(||X||^2 / ||N||^2) hits the target
// exactly; +inf target returns zero noise.
NoiseGen addNoise(const Mat& x_clean, double snr_db, std::uint64_t seed);

struct SeparationProblem {
  Mat x;
  Mat a_true;
  Mat s_true;
  Mat n;
  SyntheticSpec spec;
  double snr_achieved = 0.0;
  double cond_pre = 0.0;
  double cond_post = 0.0;
};

// Full instance with sub-streams for sources, mixing, and noise derived
// independently from spec.rng_seed.
SeparationProblem genProblem(const SyntheticSpec& spec);

// Seed helpers shared with the benchmark harness so it can freeze the scene
// while varying noise per run.
std::uint64_t sourceSeed(std::uint64_t base);
std::uint64_t mixingSeed(std::uint64_t base);
std::uint64_t noiseSeed(std::uint64_t base);

}  // namespace sbss
