#include "sbss/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "sbss/metrics.hpp"

namespace sbss {

namespace {

constexpr std::uint64_t kSceneStream = 0x7363656eull;
constexpr std::uint64_t kNoiseBase = 0x626e6f69ull;
constexpr std::uint64_t kSolverBase = 0x62736f6cull;

struct Task {
  SolveMode mode;
  double snr_db;
  int init_index;
  int snr_index;
};

}  // namespace

void BenchmarkSpec::validate() const {
  if (modes.empty()) throw SolverError("benchmark: no modes");
  if (snr_list.empty()) throw SolverError("benchmark: no snr values");
  if (n_inits < 1) throw SolverError("benchmark: n_inits must be >= 1");
  SyntheticSpec probe = problem;
  probe.snr_db = snr_list.front();
  probe.validate();
  solver.validate(problem.geometry());
}

BenchmarkResult runBenchmark(const BenchmarkSpec& spec, int workers) {
  spec.validate();
  if (workers < 1) throw SolverError("benchmark: workers must be >= 1");

  // Scene fixed for the whole sweep.
  SyntheticSpec scene = spec.problem;
  scene.rng_seed = deriveSeed(spec.base_seed, kSceneStream);
  SourceGen sources = genSources(scene);
  MixingGen mixing = genMixing(scene);
  const Mat x_clean = mixing.a * sources.s;
  const Geometry geom = scene.geometry();

  // Canonical task order: mode name, then snr, then init.
  std::vector<SolveMode> modes = spec.modes;
  std::sort(modes.begin(), modes.end(),
            [](SolveMode a, SolveMode b) { return modeName(a) < modeName(b); });
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  std::vector<double> snrs = spec.snr_list;
  std::sort(snrs.begin(), snrs.end());
  snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());

  std::vector<Task> tasks;
  for (SolveMode mode : modes)
    for (size_t si = 0; si < snrs.size(); ++si)
      for (int init = 0; init < spec.n_inits; ++init)
        tasks.push_back(Task{mode, snrs[si], init, static_cast<int>(si)});

  std::vector<RunRecord> records(tasks.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const Task& task = tasks[idx];
      RunRecord& rec = records[idx];
      rec.mode = modeName(task.mode);
      rec.snr_db = task.snr_db;
      rec.init_index = task.init_index;
      // One noise realization per SNR level, shared by every mode and init:
      // the sweep averages over solver initializations on a fixed observation,
      // so the reported std measures init sensitivity alone.
      rec.noise_seed = deriveSeed(deriveSeed(spec.base_seed, kNoiseBase),
                                  static_cast<std::uint64_t>(task.snr_index));
      rec.solver_seed = deriveSeed(deriveSeed(spec.base_seed, kSolverBase),
                                   static_cast<std::uint64_t>(task.init_index));
      auto start = std::chrono::steady_clock::now();
      try {
        NoiseGen noisy = addNoise(x_clean, task.snr_db, rec.noise_seed);
        TwoStepConfig cfg = spec.solver;
        cfg.rng_seed = rec.solver_seed;
        ModeResult result = runMode(noisy.x_noisy, task.mode, cfg, geom);
        AlignmentReport report = mixingCriterion(result.a, mixing.a);
        rec.c_a_db = report.c_a_db;
        rec.capped = report.capped;
        if (result.two_step.has_value()) {
          rec.warmup_iterations = result.two_step->warmup.iterations;
          rec.refine_iterations = result.two_step->refinement.iterations;
        } else if (task.mode == SolveMode::GmcaOnly) {
          rec.warmup_iterations = result.single->iterations;
        } else {
          rec.refine_iterations = result.single->iterations;
        }
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  if (workers == 1 || tasks.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    int count = std::min<int>(workers, static_cast<int>(tasks.size()));
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  BenchmarkResult out;
  out.records = std::move(records);

  for (SolveMode mode : modes) {
    for (double snr : snrs) {
      SummaryRow row;
      row.mode = modeName(mode);
      row.snr_db = snr;
      double sum = 0.0;
      std::vector<double> values;
      for (const RunRecord& rec : out.records) {
        if (rec.mode != row.mode || rec.snr_db != snr) continue;
        ++row.runs;
        if (!rec.error.empty()) {
          ++row.failed;
          continue;
        }
        values.push_back(rec.c_a_db);
        sum += rec.c_a_db;
      }
      if (!values.empty()) {
        row.mean_c_a_db = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
          double acc = 0.0;
          for (double v : values) acc += (v - row.mean_c_a_db) * (v - row.mean_c_a_db);
          row.std_c_a_db = std::sqrt(acc / static_cast<double>(values.size() - 1));
        }
      }
      out.summary.push_back(row);
    }
  }
  return out;
}

std::string recordsToJsonl(const std::vector<RunRecord>& records, bool with_runtime) {
  std::string out;
  for (const RunRecord& rec : records) {
    nlohmann::ordered_json j;
    j["mode"] = rec.mode;
    j["snr_db"] = rec.snr_db;
    j["init"] = rec.init_index;
    j["noise_seed"] = rec.noise_seed;
    j["solver_seed"] = rec.solver_seed;
    j["c_a_db"] = rec.c_a_db;
    j["capped"] = rec.capped;
    j["warmup_iterations"] = rec.warmup_iterations;
    j["refine_iterations"] = rec.refine_iterations;
    if (with_runtime) j["runtime_seconds"] = rec.runtime_seconds;
    j["error"] = rec.error;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string formatSummaryTable(const BenchmarkResult& result) {
  std::string out = "mode       snr_db          c_a_db   runs  failed\n";
  char line[128];
  for (const SummaryRow& row : result.summary) {
    std::snprintf(line, sizeof(line), "%-9s %7.2f  %7.2f +- %-5.2f  %5d  %6d\n", row.mode.c_str(),
                  row.snr_db, row.mean_c_a_db, row.std_c_a_db, row.runs, row.failed);
    out += line;
  }
  return out;
}

}  // namespace sbss
