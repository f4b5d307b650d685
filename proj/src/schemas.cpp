#include "sbss/schemas.hpp"

namespace sbss {

namespace {

void loadGeometry(KeyValueConfig& cfg, int& width, int& height, int& n_scales) {
  width = cfg.getInt("width", 128);
  height = cfg.getInt("height", 128);
  n_scales = cfg.getInt("n_scales", 3);
}

void loadSolverKnobs(KeyValueConfig& cfg, TwoStepConfig& out) {
  out.gmca.n_iters = cfg.getInt("gmca.n_iters", out.gmca.n_iters);
  out.gmca.k_start = cfg.getReal("gmca.k_start", out.gmca.k_start);
  out.gmca.k_final = cfg.getReal("gmca.k_final", out.gmca.k_final);
  out.gmca.ridge_rel = cfg.getReal("gmca.ridge_rel", out.gmca.ridge_rel);
  out.palm.n_iters = cfg.getInt("palm.n_iters", out.palm.n_iters);
  out.palm.gamma = cfg.getReal("palm.gamma", out.palm.gamma);
  out.palm.k_mad = cfg.getReal("palm.k_mad", out.palm.k_mad);
  std::string mode = cfg.getString("palm.threshold_mode", "recompute");
  if (mode == "recompute")
    out.palm.threshold_mode = ThresholdMode::RecomputeMad;
  else if (mode == "frozen")
    out.palm.threshold_mode = ThresholdMode::Frozen;
  else
    throw ParseError("field 'palm.threshold_mode' expects recompute or frozen, got '" + mode + "'");
  out.palm.burn_in_fraction = cfg.getReal("palm.burn_in_fraction", out.palm.burn_in_fraction);
  out.palm.tol_objective = cfg.getReal("palm.tol_objective", out.palm.tol_objective);
  out.epsilon = cfg.getReal("epsilon", out.epsilon);
  out.use_reweighting = cfg.getBool("use_reweighting", out.use_reweighting);
}

}  // namespace

SyntheticSpec loadSyntheticSpec(KeyValueConfig& cfg) {
  SyntheticSpec spec;
  spec.n_sources = cfg.getInt("n_sources", spec.n_sources);
  loadGeometry(cfg, spec.width, spec.height, spec.n_scales);
  spec.m_obs = cfg.getInt("m_obs", spec.m_obs);
  spec.sparsity_rate = cfg.getReal("sparsity_rate", spec.sparsity_rate);
  spec.condition_number = cfg.getReal("condition_number", spec.condition_number);
  spec.snr_db = cfg.getReal("snr_db", spec.snr_db);
  spec.rng_seed = cfg.getSeed("seed", spec.rng_seed);
  cfg.finish();
  return spec;
}

SolverSetup loadSolverSetup(KeyValueConfig& cfg) {
  SolverSetup setup;
  setup.cfg.n_sources = cfg.getInt("n_sources", setup.cfg.n_sources);
  loadGeometry(cfg, setup.geom.width, setup.geom.height, setup.geom.n_scales);
  setup.cfg.rng_seed = cfg.getSeed("seed", setup.cfg.rng_seed);
  loadSolverKnobs(cfg, setup.cfg);
  cfg.finish();
  return setup;
}

BenchmarkSpec loadBenchmarkSpec(KeyValueConfig& cfg) {
  BenchmarkSpec spec;
  std::vector<std::string> mode_names;
  for (SolveMode m : spec.modes) mode_names.push_back(modeName(m));
  mode_names = cfg.getStringList("modes", mode_names);
  spec.modes.clear();
  for (const std::string& name : mode_names) spec.modes.push_back(modeFromName(name));

  spec.snr_list = cfg.getRealList("snr_list", spec.snr_list);
  spec.n_inits = cfg.getInt("n_inits", spec.n_inits);
  spec.base_seed = cfg.getSeed("base_seed", spec.base_seed);

  spec.problem.n_sources = cfg.getInt("n_sources", spec.problem.n_sources);
  loadGeometry(cfg, spec.problem.width, spec.problem.height, spec.problem.n_scales);
  spec.problem.m_obs = cfg.getInt("m_obs", spec.problem.m_obs);
  spec.problem.sparsity_rate = cfg.getReal("sparsity_rate", spec.problem.sparsity_rate);
  spec.problem.condition_number = cfg.getReal("condition_number", spec.problem.condition_number);

  spec.solver.n_sources = spec.problem.n_sources;
  loadSolverKnobs(cfg, spec.solver);
  cfg.finish();
  return spec;
}

}  // namespace sbss
