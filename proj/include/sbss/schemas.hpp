#pragma once

#include "sbss/bench.hpp"
#include "sbss/config.hpp"
#include "sbss/datagen.hpp"
#include "sbss/hybrid.hpp"

namespace sbss {

// Schema for `generate` spec files.
SyntheticSpec loadSyntheticSpec(KeyValueConfig& cfg);

struct SolverSetup {
  Geometry geom;
  TwoStepConfig cfg;
};

// Schema for `solve` config files.
SolverSetup loadSolverSetup(KeyValueConfig& cfg);

// Schema for `benchmark` spec files (scene, solver knobs, sweep axes).
BenchmarkSpec loadBenchmarkSpec(KeyValueConfig& cfg);

}  // namespace sbss
