#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbss/bench.hpp"
#include "sbss/datagen.hpp"
#include "sbss/hybrid.hpp"
#include "sbss/matfile.hpp"
#include "sbss/metrics.hpp"
#include "sbss/schemas.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json matToJson(const sbss::Mat& m) {
  ordered_json rows = ordered_json::array();
  for (sbss::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (sbss::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void writeText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw sbss::IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw sbss::IoError("short write to '" + path.string() + "'");
}

void ensureOutDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw sbss::IoError("cannot create output directory '" + dir.string() + "'");
}

int defaultWorkers() {
  if (const char* env = std::getenv("SBSS_WORKERS"); env != nullptr) {
    try {
      int parsed = std::stoi(env);
      if (parsed >= 1) return parsed;
    } catch (const std::exception&) {
    }
    throw sbss::ParseError("SBSS_WORKERS must be a positive integer");
  }
  return 1;
}

ordered_json solverConfigJson(const sbss::TwoStepConfig& cfg) {
  ordered_json j;
  j["n_sources"] = cfg.n_sources;
  j["seed"] = cfg.rng_seed;
  j["gmca"]["n_iters"] = cfg.gmca.n_iters;
  j["gmca"]["k_start"] = cfg.gmca.k_start;
  j["gmca"]["k_final"] = cfg.gmca.k_final;
  j["gmca"]["ridge_rel"] = cfg.gmca.ridge_rel;
  j["palm"]["n_iters"] = cfg.palm.n_iters;
  j["palm"]["gamma"] = cfg.palm.gamma;
  j["palm"]["k_mad"] = cfg.palm.k_mad;
  j["palm"]["threshold_mode"] =
      cfg.palm.threshold_mode == sbss::ThresholdMode::Frozen ? "frozen" : "recompute";
  j["palm"]["burn_in_fraction"] = cfg.palm.burn_in_fraction;
  j["palm"]["tol_objective"] = cfg.palm.tol_objective;
  j["epsilon"] = cfg.epsilon;
  j["use_reweighting"] = cfg.use_reweighting;
  return j;
}

ordered_json stageJson(const sbss::SolveResult& result) {
  ordered_json j;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["degenerate_redraws"] = result.degenerate_redraws;
  j["objective_trace"] = result.objective_trace;
  j["final_lambdas"] = matToJson(result.final_lambdas);
  ordered_json history = ordered_json::array();
  for (const sbss::Mat& t : result.threshold_history) history.push_back(matToJson(t));
  j["threshold_history"] = std::move(history);
  return j;
}

int cmdGenerate(const fs::path& spec_path, const fs::path& out_dir,
                std::optional<std::uint64_t> seed) {
  sbss::KeyValueConfig cfg = sbss::KeyValueConfig::parseFile(spec_path);
  sbss::SyntheticSpec spec = sbss::loadSyntheticSpec(cfg);
  if (seed.has_value()) spec.rng_seed = *seed;

  sbss::SeparationProblem problem = sbss::genProblem(spec);
  ensureOutDir(out_dir);
  sbss::writeMatFile(out_dir / "X.mat", problem.x);
  sbss::writeMatFile(out_dir / "A_true.mat", problem.a_true);
  sbss::writeMatFile(out_dir / "S_true.mat", problem.s_true);
  sbss::writeMatFile(out_dir / "N.mat", problem.n);

  ordered_json meta;
  meta["n_sources"] = spec.n_sources;
  meta["m_obs"] = spec.observations();
  meta["width"] = spec.width;
  meta["height"] = spec.height;
  meta["n_scales"] = spec.n_scales;
  meta["sparsity_rate"] = spec.sparsity_rate;
  meta["condition_number"] = spec.condition_number;
  meta["snr_db_target"] = std::isinf(spec.snr_db) ? ordered_json("inf") : ordered_json(spec.snr_db);
  meta["snr_db_achieved"] =
      std::isinf(problem.snr_achieved) ? ordered_json("inf") : ordered_json(problem.snr_achieved);
  meta["condition_pre_normalization"] = problem.cond_pre;
  meta["condition_post_normalization"] = problem.cond_post;
  meta["seed"] = spec.rng_seed;
  writeText(out_dir / "meta.json", meta.dump(2) + "\n");

  std::cout << "wrote " << spec.observations() << "x" << spec.geometry().pixels()
            << " observations to " << (out_dir / "X.mat").string() << "\n";
  return 0;
}

int cmdSolve(const fs::path& x_path, const fs::path& config_path, const std::string& mode_name,
             const fs::path& out_dir, std::optional<std::uint64_t> seed) {
  sbss::SolveMode mode = sbss::modeFromName(mode_name);
  sbss::Mat x = sbss::readMatFile(x_path);
  sbss::KeyValueConfig cfg_file = sbss::KeyValueConfig::parseFile(config_path);
  sbss::SolverSetup setup = sbss::loadSolverSetup(cfg_file);
  if (seed.has_value()) setup.cfg.rng_seed = *seed;

  auto start = std::chrono::steady_clock::now();
  sbss::ModeResult result = sbss::runMode(x, mode, setup.cfg, setup.geom);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ensureOutDir(out_dir);
  sbss::writeMatFile(out_dir / "A_est.mat", result.a);
  sbss::writeMatFile(out_dir / "S_est.mat", result.s);

  ordered_json report;
  report["mode"] = sbss::modeName(mode);
  report["config"] = solverConfigJson(setup.cfg);
  report["geometry"] = {{"width", setup.geom.width},
                        {"height", setup.geom.height},
                        {"n_scales", setup.geom.n_scales}};
  report["wall_seconds"] = wall;
  if (result.two_step.has_value()) {
    report["warmup"] = stageJson(result.two_step->warmup);
    report["refinement"] = stageJson(result.two_step->refinement);
    report["lambda_seed"] = matToJson(result.two_step->lambda_seed);
    report["iterations"] =
        result.two_step->warmup.iterations + result.two_step->refinement.iterations;
  } else {
    report[mode == sbss::SolveMode::GmcaOnly ? "warmup" : "refinement"] =
        stageJson(*result.single);
    report["iterations"] = result.single->iterations;
  }
  writeText(out_dir / "report.json", report.dump(2) + "\n");

  std::cout << sbss::modeName(mode) << " solve finished in " << wall << " s, outputs in "
            << out_dir.string() << "\n";
  return 0;
}

int cmdEvaluate(const fs::path& est_path, const fs::path& true_path,
                const std::optional<fs::path>& out_path) {
  sbss::Mat a_est = sbss::readMatFile(est_path);
  sbss::Mat a_true = sbss::readMatFile(true_path);
  sbss::AlignmentReport report = sbss::mixingCriterion(a_est, a_true);

  ordered_json j;
  j["c_a_db"] = report.c_a_db;
  j["capped"] = report.capped;
  j["permutation"] = report.permutation;
  ordered_json signs = ordered_json::array();
  for (sbss::Index i = 0; i < report.signs.size(); ++i) signs.push_back(report.signs[i]);
  j["signs"] = std::move(signs);
  if (out_path.has_value()) writeText(*out_path, j.dump(2) + "\n");

  std::cout << "c_a_db = " << report.c_a_db << (report.capped ? " (capped)" : "") << "\n";
  std::cout << "permutation =";
  for (int p : report.permutation) std::cout << " " << p;
  std::cout << "\n";
  return 0;
}

int cmdBenchmark(const fs::path& spec_path, int workers, const fs::path& out_dir) {
  sbss::KeyValueConfig cfg = sbss::KeyValueConfig::parseFile(spec_path);
  sbss::BenchmarkSpec spec = sbss::loadBenchmarkSpec(cfg);

  sbss::BenchmarkResult result = sbss::runBenchmark(spec, workers);
  std::string table = sbss::formatSummaryTable(result);

  ensureOutDir(out_dir);
  writeText(out_dir / "records.jsonl", sbss::recordsToJsonl(result.records, true));
  writeText(out_dir / "table.txt", table);

  ordered_json meta;
  ordered_json modes = ordered_json::array();
  for (sbss::SolveMode m : spec.modes) modes.push_back(sbss::modeName(m));
  meta["modes"] = std::move(modes);
  meta["snr_list"] = spec.snr_list;
  meta["n_inits"] = spec.n_inits;
  meta["base_seed"] = spec.base_seed;
  meta["workers"] = workers;
  meta["solver"] = solverConfigJson(spec.solver);
  writeText(out_dir / "meta.json", meta.dump(2) + "\n");

  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse blind source separation toolkit"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  CLI::App* gen = app.add_subcommand("generate", "synthesize a separation problem");
  gen->add_option("--spec", spec_path, "problem spec file")->required();
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--seed", seed, "override the seed from the spec file");

  std::string x_path;
  std::string solve_config;
  std::string mode_name = "two-step";
  std::string solve_out = "out";
  std::optional<std::uint64_t> solve_seed;
  CLI::App* solve = app.add_subcommand("solve", "estimate mixing and sources from observations");
  solve->add_option("--x", x_path, "observations MatFile")->required();
  solve->add_option("--config", solve_config, "solver config file")->required();
  solve->add_option("--mode", mode_name, "two-step, gmca, or palm");
  solve->add_option("--out", solve_out, "output directory");
  solve->add_option("--seed", solve_seed, "override the config seed");

  std::string est_path;
  std::string true_path;
  std::string eval_out;
  CLI::App* eval = app.add_subcommand("evaluate", "score an estimated mixing matrix");
  eval->add_option("--est", est_path, "estimated mixing MatFile")->required();
  eval->add_option("--true", true_path, "reference mixing MatFile")->required();
  eval->add_option("--out", eval_out, "optional json report path");

  std::string bench_spec;
  std::string bench_out = "bench";
  int workers = -1;
  CLI::App* bench = app.add_subcommand("benchmark", "run a full mode x snr x init sweep");
  bench->add_option("--spec", bench_spec, "benchmark spec file")->required();
  bench->add_option("--workers", workers, "worker threads (default: SBSS_WORKERS or 1)");
  bench->add_option("--out", bench_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmdGenerate(spec_path, out_dir, seed);
    if (solve->parsed()) return cmdSolve(x_path, solve_config, mode_name, solve_out, solve_seed);
    if (eval->parsed()) {
      std::optional<fs::path> out;
      if (!eval_out.empty()) out = eval_out;
      return cmdEvaluate(est_path, true_path, out);
    }
    if (bench->parsed()) {
      if (workers < 0) workers = defaultWorkers();
      return cmdBenchmark(bench_spec, workers, bench_out);
    }
  } catch (const sbss::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sbss::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
