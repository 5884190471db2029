// Experiment runner: train/ablate/compare plus the analysis subcommands.
// Output is run directories and tidy CSVs; figures are external tooling's job.
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsnn/experiment.hpp"

namespace {

using namespace hsnn;

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "override [run] seed")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out", f.out_dir, "override output directory");
  cmd->add_option("--threads", f.threads, "override worker thread count")
      ->check(CLI::PositiveNumber);
}

// Precedence for the output directory: --out, then HSNN_OUT_DIR, then config.
ExperimentConfig load_config(const CommonFlags& f) {
  ExperimentConfig cfg = ExperimentConfig::from_file(f.config_path);
  if (f.seed_set) cfg.seed = f.seed;
  if (f.threads > 0) cfg.threads = f.threads;
  if (!f.out_dir.empty()) {
    cfg.out_dir = f.out_dir;
  } else if (const char* env = std::getenv("HSNN_OUT_DIR"); env && *env) {
    cfg.out_dir = env;
  }
  cfg.validate();
  return cfg;
}

std::string out_or(const std::string& flag_value, const std::string& fallback) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("HSNN_OUT_DIR"); env && *env) return env;
  return fallback;
}

int cmd_train(const CommonFlags& f) {
  ExperimentConfig cfg = load_config(f);
  TrainResult res = run_train(cfg, &std::cout);
  std::cout << "run " << res.run_dir << "\nfinal_eval " << res.final_eval
            << "\nwall_time_s " << res.wall_time_s << "\n";
  return 0;
}

int cmd_ablate(const CommonFlags& f, const std::vector<std::string>& mask_names) {
  ExperimentConfig cfg = load_config(f);
  std::vector<TrainableMask> masks;
  if (mask_names.empty()) {
    masks = all_property_masks();
  } else {
    for (const auto& name : mask_names) masks.push_back(mask_from_string(name));
  }
  auto rows = run_ablate(cfg, masks, &std::cout);
  std::cout << "wrote " << cfg.out_dir << "/ablation.csv (" << rows.size()
            << " masks)\n";
  return 0;
}

int cmd_compare(const CommonFlags& f, int population, int iterations) {
  ExperimentConfig cfg = load_config(f);
  auto series = run_compare(cfg, population, iterations, &std::cout);
  std::cout << "wrote " << cfg.out_dir << "/compare.csv (" << series.size()
            << " series)\n";
  return 0;
}

int cmd_fitdist(const std::string& input, const std::string& out_dir) {
  std::string out_csv = out_or(out_dir, ".") + "/fit.csv";
  FitdistReport rep = run_fitdist(input, out_csv);
  std::cout << rep.to_csv() << "wrote " << out_csv << "\n";
  return 0;
}

int cmd_shapley(const std::string& input, double v_empty, const std::string& out_dir) {
  std::string out_csv = out_or(out_dir, ".") + "/shapley.csv";
  ShapleyReport rep = run_shapley(input, v_empty, out_csv);
  std::cout << rep.to_csv() << "wrote " << out_csv << "\n";
  return 0;
}

int cmd_stats(const std::string& run_dir, int sample) {
  FiringStats stats = run_stats(run_dir, sample);
  std::cout << "wrote " << run_dir << "/firing.csv (" << stats.neuron_ids.size()
            << " neurons x " << stats.freq.cols() << " classes)\n";
  return 0;
}

int cmd_gradcheck(int cases, std::uint64_t seed) {
  GradcheckReport rep = run_gradcheck(cases, seed, &std::cout);
  std::cout << "cases " << rep.cases << "\nmax_rel_err " << rep.max_rel_err
            << "\ncontraction_violations " << rep.contraction_violations
            << "\nmax_detached_jacobian " << rep.max_detached_jacobian << "\n"
            << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiking-network experiment runner"};
  app.require_subcommand(1);

  CommonFlags train_f, ablate_f, compare_f;
  std::vector<std::string> mask_names;
  int population = 128, iterations = 30;
  std::string fit_input, shap_input, stats_run, fit_out, shap_out;
  double v_empty = 0.0;
  int stats_sample = 32, gc_cases = 200;
  std::uint64_t gc_seed = 1;

  add_common(app.add_subcommand("train", "one training run"), train_f);

  auto* ablate = app.add_subcommand("ablate", "one run per trainability mask");
  add_common(ablate, ablate_f);
  ablate->add_option("--masks", mask_names,
                     "masks like tau_m+v_th (default: all 15 subsets)");

  auto* compare = app.add_subcommand("compare", "cart-pole ES-vs-BPTT grid");
  add_common(compare, compare_f);
  compare->add_option("--population", population, "episodes per iteration")
      ->check(CLI::PositiveNumber);
  compare->add_option("--iterations", iterations, "iterations per cell")
      ->check(CLI::PositiveNumber);

  auto* fitdist = app.add_subcommand("fitdist", "fit gamma/lognormal to tau_m samples");
  fitdist->add_option("input", fit_input, "sample CSV or genome.csv")
      ->required()
      ->check(CLI::ExistingFile);
  fitdist->add_option("--out", fit_out, "output directory (default .)");

  auto* shapley = app.add_subcommand("shapley", "property attribution from ablation.csv");
  shapley->add_option("input", shap_input, "ablation CSV")
      ->required()
      ->check(CLI::ExistingFile);
  shapley->add_option("--v-empty", v_empty, "value of the empty coalition");
  shapley->add_option("--out", shap_out, "output directory (default .)");

  auto* stats = app.add_subcommand("stats", "firing-rate matrix of a classify run");
  stats->add_option("run_dir", stats_run, "finished run directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats->add_option("--sample", stats_sample, "neurons to sample")
      ->check(CLI::PositiveNumber);

  auto* gradcheck = app.add_subcommand("gradcheck", "gradient oracle suite");
  gradcheck->add_option("--cases", gc_cases, "random cases")->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", gc_seed, "case-generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("train")) return cmd_train(train_f);
    if (app.got_subcommand("ablate")) return cmd_ablate(ablate_f, mask_names);
    if (app.got_subcommand("compare")) return cmd_compare(compare_f, population, iterations);
    if (app.got_subcommand("fitdist")) return cmd_fitdist(fit_input, fit_out);
    if (app.got_subcommand("shapley")) return cmd_shapley(shap_input, v_empty, shap_out);
    if (app.got_subcommand("stats")) return cmd_stats(stats_run, stats_sample);
    if (app.got_subcommand("gradcheck")) return cmd_gradcheck(gc_cases, gc_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
