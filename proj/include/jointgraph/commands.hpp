#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "jointgraph/evaluate.hpp"
#include "jointgraph/fpca.hpp"
#include "jointgraph/jfggm.hpp"
#include "jointgraph/solver.hpp"

namespace jointgraph::cli {

namespace fs = std::filesystem;

enum class Method { kJfggm, kFglasso };

Method parse_method(const std::string& name);
std::string method_name(Method m);

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

struct FitParams {
  int M = 3;
  std::optional<double> lambda0;  // initializer penalty; defaults to lambda
  int steps = 1;
  AdmmSettings admm;
  ScoreScale scale = ScoreScale::kL2;
  double weight_cap = kDefaultWeightCap;
};

/// FPCA on every panel with the same M.
JointProblem problem_from_panels(const std::vector<CurvePanel>& panels, int M,
                                 ScoreScale scale = ScoreScale::kL2);

/// Fits one lambda with the given method.
JointEstimate fit_method(const JointProblem& problem, Method method, double lambda,
                         const FitParams& params);

/// Fits every lambda of `grid`, up to `jobs` in parallel. When both methods
/// are requested the unit-weight initial fit is shared. Without
/// `keep_matrices` the returned fits carry only diagnostics and edges.
struct SweepResult {
  std::vector<double> lambdas;
  std::vector<JointEstimate> fglasso;  // empty unless requested
  std::vector<JointEstimate> jfggm;    // empty unless requested
};
SweepResult sweep(const JointProblem& problem, const std::vector<Method>& methods,
                  std::span<const double> grid, const FitParams& params, int jobs,
                  bool keep_matrices = false);

/// Mean over groups of |E_k| / C(p, 2).
double mean_density(const std::vector<EdgeSet>& edge_sets, int p);

struct SparsitySearch {
  double lambda = 0.0;
  double density = 0.0;
  int evaluations = 0;
  bool bisection_hit = false;  // false when the fallback grid scan picked lambda
  JointEstimate estimate;
};

/// Bisection on lambda until the mean density is within `tolerance` of
/// `target`; falls back to a grid scan if the density is not monotone.
SparsitySearch search_target_sparsity(const JointProblem& problem, Method method, double target,
                                      const FitParams& params, double tolerance = 0.002);

/// Seed from the JOINTGRAPH_SEED environment variable, if set.
std::optional<std::uint64_t> env_seed();

struct SimulateOptions {
  fs::path config;
  fs::path out;
};

struct FitOptions {
  fs::path dataset;  // directory with curves.csv and grid.json
  fs::path curves;   // explicit files override the dataset directory
  fs::path grid;
  Method method = Method::kJfggm;
  std::optional<double> lambda;
  std::vector<double> lambdas;  // explicit list
  bool default_grid = false;
  std::optional<double> target_sparsity;
  FitParams params;
  int jobs = 1;
  bool strict = false;
  bool matrices = false;  // write Omega/Z for multi-lambda fits as well
  fs::path out;
};

struct EvaluateOptions {
  fs::path dataset;                 // needs ground_truth.json
  std::vector<fs::path> estimates;  // precomputed sweeps, one per method
  std::vector<Method> methods;      // or fit these over the grid
  int replicates = 1;
  std::vector<double> grid;  // empty: the default 100-point grid
  FitParams params;
  int jobs = 1;
  fs::path out;
};

struct ReproduceOptions {
  std::string scenario;  // "p,n,rho", e.g. "80,100,0"
  double scale = 1.0;
  int replicates = 5;
  std::uint64_t seed = 1;
  FitParams params;
  int jobs = 1;
  fs::path out;
};

struct Scenario {
  int p = 0;
  int n = 0;
  double rho = 0.0;
};
/// Throws ConfigError for ids outside {80,100} x {100,200} x {0,0.5,1}.
Scenario parse_scenario(const std::string& id);

int cmd_simulate(const SimulateOptions& opts, std::ostream& log);
int cmd_fit(const FitOptions& opts, std::ostream& log);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& log);
int cmd_reproduce(const ReproduceOptions& opts, std::ostream& log);

std::string version();

}  // namespace jointgraph::cli
