#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sbss/gmca.hpp"
#include "sbss/palm.hpp"

namespace sbss {

enum class SolveMode {
  TwoStep,            // warm-up then refinement with carried-over levels
  GmcaOnly,           // warm-up stage alone
  PalmMadRandomInit,  // refinement alone from a random start, MAD levels throughout
};

std::string modeName(SolveMode mode);
SolveMode modeFromName(const std::string& name);

struct TwoStepConfig {
  int n_sources = 2;
  GmcaConfig gmca;
  PalmConfig palm;
  double epsilon = 1e-3;       // reweighting sharpness
  bool use_reweighting = true;
  std::uint64_t rng_seed = 0;  // drives initialization and the warm-up redraw stream

  // The refinement default recomputes MAD levels over the first half of its
  // budget, then freezes.
  TwoStepConfig() { palm.burn_in_fraction = 0.5; }

  void validate(const Geometry& geom) const;
};

struct TwoStepResult {
  SolveResult warmup;
  SolveResult refinement;
  Mat weights;      // reweighting handed to the refinement
  Mat lambda_seed;  // n_sources x n_scales penalty levels handed to the refinement
  const Mat& a() const { return refinement.a; }
  const Mat& s() const { return refinement.s; }
};

// Random normalized start, then the warm-up stage, then refinement
// initialized from the warm-up output with penalty levels taken from the
// warm-up residual projected back through the current mixing estimate.
TwoStepResult runTwoStep(const Mat& x, const TwoStepConfig& cfg, const Geometry& geom);

struct ModeResult {
  SolveMode mode = SolveMode::TwoStep;
  Mat a;
  Mat s;
  std::optional<TwoStepResult> two_step;  // set for TwoStep
  std::optional<SolveResult> single;      // set for the single-stage modes
};

// All three modes share the initialization stream, so at a fixed seed they
// start from the same random mixing matrix.
ModeResult runMode(const Mat& x, SolveMode mode, const TwoStepConfig& cfg, const Geometry& geom);

// The deterministic random start used by every mode.
Mat drawInitialMixing(Index m_obs, Index n_sources, std::uint64_t rng_seed);

}  // namespace sbss
