#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jointgraph/commands.hpp"
#include "jointgraph/errors.hpp"

namespace cli = jointgraph::cli;

namespace {

void add_fit_flags(CLI::App* app, cli::FitParams& p, std::string& scale, std::string& lambda0_text) {
  app->add_option("-M,--components", p.M, "Principal components per variable")->check(CLI::PositiveNumber);
  app->add_option("--lambda0", lambda0_text, "Penalty of the unit-weight initial fit (default: lambda)");
  app->add_option("--steps", p.steps, "LLA reweighting steps")->check(CLI::PositiveNumber);
  app->add_option("--rho-admm", p.admm.b, "ADMM augmented-Lagrangian constant b");
  app->add_option("--tol-primal", p.admm.tol_primal, "ADMM primal tolerance");
  app->add_option("--tol-dual", p.admm.tol_dual, "ADMM dual tolerance");
  app->add_option("--max-iter", p.admm.max_iter, "ADMM iteration limit");
  app->add_flag("--adaptive-b", p.admm.adaptive_b, "Balance residuals by rescaling b");
  app->add_option("--weight-cap", p.weight_cap, "Clip for finite LLA weights");
  app->add_option("--score-scale", scale, "Score scaling: l2 or grid_unit")
      ->check(CLI::IsMember({"l2", "grid_unit"}));
}

void finish_fit_flags(cli::FitParams& p, const std::string& scale, const std::string& lambda0_text) {
  p.scale = scale == "grid_unit" ? jointgraph::ScoreScale::kGridUnit : jointgraph::ScoreScale::kL2;
  if (!lambda0_text.empty()) {
    try {
      p.lambda0 = std::stod(lambda0_text);
    } catch (const std::exception&) {
      throw jointgraph::ConfigError("--lambda0 must be a number");
    }
  }
  p.admm.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint estimation of functional graphical models"};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);

  cli::SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic multi-group dataset");
  sim_cmd->add_option("config", sim.config, "Simulation config JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("-o,--out", sim.out, "Output directory")->required();

  cli::FitOptions fit;
  std::string fit_method = "jfggm", fit_scale = "l2", fit_lambda0;
  double fit_lambda = 0.0, fit_target = 0.0;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate graphs from curve data");
  fit_cmd->add_option("dataset", fit.dataset, "Dataset directory (curves.csv, grid.json)");
  fit_cmd->add_option("--curves", fit.curves, "Long-format curve CSV");
  fit_cmd->add_option("--grid-info", fit.grid, "Grid metadata JSON");
  fit_cmd->add_option("-m,--method", fit_method, "jfggm or fglasso");
  auto* lambda_opt = fit_cmd->add_option("-l,--lambda", fit_lambda, "Single penalty");
  fit_cmd->add_option("--lambdas", fit.lambdas, "Explicit penalty list")->delimiter(',');
  fit_cmd->add_flag("--grid", fit.default_grid, "Use the default 100-point penalty grid");
  auto* target_opt = fit_cmd->add_option("--target-sparsity", fit_target, "Search lambda for this mean edge density");
  fit_cmd->add_option("-j,--jobs", fit.jobs, "Parallel work items")->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--strict", fit.strict, "Fail (exit 3) if any solve did not converge");
  fit_cmd->add_flag("--matrices", fit.matrices, "Write Omega and Z for every lambda of a sweep");
  fit_cmd->add_option("-o,--out", fit.out, "Output directory")->required();
  add_fit_flags(fit_cmd, fit.params, fit_scale, fit_lambda0);

  cli::EvaluateOptions ev;
  std::vector<std::string> ev_methods;
  std::string ev_scale = "l2", ev_lambda0;
  auto* ev_cmd = app.add_subcommand("evaluate", "ROC curves and AUC against ground truth");
  ev_cmd->add_option("dataset", ev.dataset, "Dataset directory with ground_truth.json")->required();
  ev_cmd->add_option("-e,--estimates", ev.estimates, "estimates.json files from fit sweeps");
  ev_cmd->add_option("-m,--method", ev_methods, "Fit these methods over the grid instead")->delimiter(',');
  ev_cmd->add_option("-r,--replicates", ev.replicates, "Replicates (regenerated from config.json)");
  ev_cmd->add_option("--lambdas", ev.grid, "Penalty grid (default: 100-point grid)")->delimiter(',');
  ev_cmd->add_option("-j,--jobs", ev.jobs, "Parallel work items")->check(CLI::PositiveNumber);
  ev_cmd->add_option("-o,--out", ev.out, "Output directory")->required();
  add_fit_flags(ev_cmd, ev.params, ev_scale, ev_lambda0);

  cli::ReproduceOptions rep;
  std::string rep_scale = "l2", rep_lambda0;
  auto* rep_cmd = app.add_subcommand("reproduce", "Run one benchmark scenario end to end");
  rep_cmd->add_option("scenario", rep.scenario, "p,n,rho with p in {80,100}, n in {100,200}, rho in {0,0.5,1}")
      ->required();
  rep_cmd->add_option("-s,--scale", rep.scale, "Factor applied to p, in (0, 1]");
  rep_cmd->add_option("-r,--replicates", rep.replicates, "Replicates");
  rep_cmd->add_option("--seed", rep.seed, "Base seed (JOINTGRAPH_SEED overrides)");
  rep_cmd->add_option("-j,--jobs", rep.jobs, "Parallel work items")->check(CLI::PositiveNumber);
  rep_cmd->add_option("-o,--out", rep.out, "Output directory")->required();
  add_fit_flags(rep_cmd, rep.params, rep_scale, rep_lambda0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*sim_cmd) return cli::cmd_simulate(sim, std::cerr);

    if (*fit_cmd) {
      if (fit.dataset.empty() && (fit.curves.empty() || fit.grid.empty())) {
        std::cerr << "error: give a dataset directory or both --curves and --grid-info\n";
        return cli::kExitUsage;
      }
      fit.method = cli::parse_method(fit_method);
      if (*lambda_opt) fit.lambda = fit_lambda;
      if (*target_opt) fit.target_sparsity = fit_target;
      finish_fit_flags(fit.params, fit_scale, fit_lambda0);
      return cli::cmd_fit(fit, std::cerr);
    }

    if (*ev_cmd) {
      for (const auto& m : ev_methods) ev.methods.push_back(cli::parse_method(m));
      finish_fit_flags(ev.params, ev_scale, ev_lambda0);
      return cli::cmd_evaluate(ev, std::cerr);
    }

    if (*rep_cmd) {
      finish_fit_flags(rep.params, rep_scale, rep_lambda0);
      return cli::cmd_reproduce(rep, std::cout);
    }
  } catch (const jointgraph::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitFailure;
  }
  return cli::kExitUsage;
}
