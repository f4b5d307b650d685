#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbss/datagen.hpp"
#include "sbss/hybrid.hpp"

namespace sbss {

struct BenchmarkSpec {
  std::vector<SolveMode> modes = {SolveMode::TwoStep, SolveMode::GmcaOnly,
                                  SolveMode::PalmMadRandomInit};
  std::vector<double> snr_list = {10.0, 15.0, 20.0};
  int n_inits = 10;
  std::uint64_t base_seed = 0;
  SyntheticSpec problem;   // scene template; snr_db and rng_seed are driven per run
  TwoStepConfig solver;    // solver template; rng_seed is driven per run

  void validate() const;
};

struct RunRecord {
  std::string mode;
  double snr_db = 0.0;
  int init_index = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t solver_seed = 0;
  double c_a_db = 0.0;
  bool capped = false;
  int warmup_iterations = 0;
  int refine_iterations = 0;
  double runtime_seconds = 0.0;
  std::string error;  // empty on success
};

struct SummaryRow {
  std::string mode;
  double snr_db = 0.0;
  double mean_c_a_db = 0.0;
  double std_c_a_db = 0.0;
  int runs = 0;
  int failed = 0;
};

struct BenchmarkResult {
  std::vector<RunRecord> records;  // canonical order: (mode, snr, init)
  std::vector<SummaryRow> summary;
};

// Runs every (mode, snr, init) combination over a scene that is fixed by
// base_seed: sources and mixing are shared by all runs, one noise
// realization per SNR level is shared across modes and inits, and the solver
// seed varies only with the init index. The sweep therefore measures
// initialization sensitivity on a fixed observation. Tasks may execute on
// `workers` threads; the output is independent of the scheduling.
BenchmarkResult runBenchmark(const BenchmarkSpec& spec, int workers);

// One JSON object per line, canonical field order. with_runtime = false
// leaves out the wall-time field, giving a byte-stable view.
std::string recordsToJsonl(const std::vector<RunRecord>& records, bool with_runtime);

// Fixed-width mean +- std table per (mode, snr); byte-stable for a fixed
// base_seed.
std::string formatSummaryTable(const BenchmarkResult& result);

}  // namespace sbss
