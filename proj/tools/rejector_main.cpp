// rejector: generate finite rejection tasks, sweep thresholds, compare the
// marginal and joint rejectors, emit risk-coverage curves, and run the
// self-verification suite.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rejection/generate.hpp"
#include "rejection/losses.hpp"
#include "rejection/oracle.hpp"
#include "rejection/rejectors.hpp"
#include "rejection/sweep.hpp"
#include "rejection/task.hpp"
#include "rejection/task_io.hpp"
#include "rejection/verify.hpp"

namespace {

struct CommonFlags {
  std::string task_path;
  std::string loss = "log";
  double lambda = 2.0;
  std::string rejector = "marginal";
  double cost = 0.1;
  std::string tau_grid = "auto";
  std::string out_path;
};

std::vector<double> load_tau_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open tau grid file: " + path);
  }
  std::vector<double> grid;
  double value = 0.0;
  while (in >> value) grid.push_back(value);
  if (grid.empty()) {
    throw std::invalid_argument("tau grid file is empty: " + path);
  }
  return grid;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::invalid_argument("cannot write: " + out_path);
  }
  out << text;
}

rejection::RatioKind ratio_kind_from_flag(const std::string& flag) {
  if (flag == "marginal") return rejection::RatioKind::marginal;
  if (flag == "joint") return rejection::RatioKind::joint;
  throw std::invalid_argument(
      "sweep supports --rejector marginal|joint (use curve for the others)");
}

int run_gen(const rejection::TaskGenSpec& spec, const std::string& out_path) {
  rejection::FiniteTask task = rejection::generate_task(spec);
  emit(out_path, rejection::task_to_string(task));
  return 0;
}

int run_sweep(const CommonFlags& flags, const std::string& mask_out) {
  using namespace rejection;
  const FiniteTask task = read_task_file(flags.task_path);
  const LossKind kind = loss_kind_from_flag(flags.loss);
  const Temperature lambda(flags.lambda);
  const RatioKind ratio_kind = ratio_kind_from_flag(flags.rejector);

  const DensityRatioRejector rejector = ratio_kind == RatioKind::marginal
                                            ? marginal_ratio(kind, task, lambda)
                                            : joint_ratio(kind, task, lambda);
  const std::vector<double> grid = flags.tau_grid == "auto"
                                       ? auto_tau_grid(rejector.scores)
                                       : load_tau_grid(flags.tau_grid);

  const SweepResult result = sweep(task, kind, lambda, ratio_kind, grid);
  emit(flags.out_path, sweep_to_csv(result));

  if (!mask_out.empty()) {
    std::vector<RejectionRecord> records;
    for (double tau : grid) {
      RejectionRecord record;
      record.kind = flags.rejector;
      record.lambda = flags.lambda;
      record.tau = tau;
      record.kappa = rejector.kappa_for(tau);
      record.normalizer = rejector.normalizer;
      record.mask = threshold_reject(rejector, Threshold::ratio(tau));
      records.push_back(std::move(record));
    }
    write_rejection_records(mask_out, records);
  }
  return 0;
}

int run_compare(const CommonFlags& flags) {
  using namespace rejection;
  const FiniteTask task = read_task_file(flags.task_path);
  const LossKind kind = loss_kind_from_flag(flags.loss);
  const Temperature lambda(flags.lambda);

  std::vector<double> grid;
  if (flags.tau_grid == "auto") {
    const DensityRatioRejector joint = joint_ratio(kind, task, lambda);
    grid = auto_tau_grid(joint.scores);
  } else {
    grid = load_tau_grid(flags.tau_grid);
  }
  const AgreementReport report = compare_rejectors(task, kind, lambda, grid);
  emit(flags.out_path, agreement_to_csv(report));
  return report.containment_violations == 0 &&
                 report.divergence_violations == 0
             ? 0
             : 1;
}

int run_curve(const CommonFlags& flags) {
  using namespace rejection;
  const FiniteTask task = read_task_file(flags.task_path);
  const LossKind kind = loss_kind_from_flag(flags.loss);
  const RejectorFamily family = rejector_family_from_flag(flags.rejector);
  std::optional<Temperature> lambda;
  if (family != RejectorFamily::chow) {
    lambda.emplace(flags.lambda);
  }
  emit(flags.out_path,
       curve_to_csv(risk_coverage_curve(task, kind, lambda, family)));
  return 0;
}

int run_verify(std::uint64_t seed, int trials, const std::string& out_path) {
  using namespace rejection;
  VerifyOptions options;
  options.seed = seed;
  options.n_trials = trials;
  const SuiteReport report = run_verification_suite(options);
  std::cout << report_to_lines(report);
  if (!out_path.empty()) {
    emit(out_path, report_to_json(report));
  }
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "density-ratio rejection toolkit: finite tasks, threshold sweeps, "
      "rejector comparisons, and a self-verification suite"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file mirroring the flags; "
                                 "command-line flags take precedence");

  rejection::TaskGenSpec gen_spec;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic task file");
  gen->add_option("--n-inputs", gen_spec.n_inputs, "Number of inputs |X|")
      ->check(CLI::PositiveNumber);
  gen->add_option("--n-labels", gen_spec.n_labels, "Number of labels L >= 2");
  gen->add_option("--marginal-conc", gen_spec.marginal_concentration,
                  "Dirichlet concentration of the marginal");
  gen->add_option("--posterior-conc", gen_spec.posterior_concentration,
                  "Dirichlet concentration of each posterior row");
  gen->add_option("--model-noise", gen_spec.model_noise,
                  "Logit perturbation scale (0 = perfect model)");
  gen->add_option("--seed", gen_spec.seed, "PRNG seed");
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  CommonFlags sweep_flags;
  std::string sweep_mask_out;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Threshold sweep of a density-ratio rejector");
  sweep_cmd->add_option("--task", sweep_flags.task_path, "Task file")
      ->required();
  sweep_cmd->add_option("--loss", sweep_flags.loss,
                        "zero-one | log | modified-log");
  sweep_cmd->add_option("--lambda", sweep_flags.lambda, "Temperature > 0");
  sweep_cmd->add_option("--rejector", sweep_flags.rejector,
                        "marginal | joint");
  sweep_cmd->add_option("--tau-grid", sweep_flags.tau_grid,
                        "auto | path to a file of ascending taus");
  sweep_cmd->add_option("--out", sweep_flags.out_path, "CSV output path");
  sweep_cmd->add_option("--mask-out", sweep_mask_out,
                        "Also write per-tau rejection records (JSON)");

  CommonFlags compare_flags;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Agreement report between marginal and joint rejectors");
  compare_cmd->add_option("--task", compare_flags.task_path, "Task file")
      ->required();
  compare_cmd->add_option("--loss", compare_flags.loss,
                          "zero-one | log | modified-log");
  compare_cmd->add_option("--lambda", compare_flags.lambda, "Temperature > 0");
  compare_cmd->add_option("--tau-grid", compare_flags.tau_grid,
                          "auto | path to a file of ascending taus");
  compare_cmd->add_option("--out", compare_flags.out_path, "CSV output path");

  CommonFlags curve_flags;
  CLI::App* curve_cmd =
      app.add_subcommand("curve", "Risk-coverage curve for one rejector");
  curve_cmd->add_option("--task", curve_flags.task_path, "Task file")
      ->required();
  curve_cmd->add_option("--loss", curve_flags.loss,
                        "zero-one | log | modified-log");
  curve_cmd->add_option("--lambda", curve_flags.lambda,
                        "Temperature (ignored for chow)");
  curve_cmd->add_option("--rejector", curve_flags.rejector,
                        "chow | marginal | joint | bhatta | kl");
  curve_cmd->add_option("--out", curve_flags.out_path, "CSV output path");

  std::uint64_t verify_seed = 7;
  int verify_trials = 1000;
  std::string verify_out;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the self-verification suite");
  verify_cmd->add_option("--seed", verify_seed, "Suite seed");
  verify_cmd->add_option("--trials", verify_trials,
                         "Trial budget (default 1000)");
  verify_cmd->add_option("--out", verify_out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_spec, gen_out);
    if (sweep_cmd->parsed()) return run_sweep(sweep_flags, sweep_mask_out);
    if (compare_cmd->parsed()) return run_compare(compare_flags);
    if (curve_cmd->parsed()) return run_curve(curve_flags);
    if (verify_cmd->parsed()) {
      return run_verify(verify_seed, verify_trials, verify_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
