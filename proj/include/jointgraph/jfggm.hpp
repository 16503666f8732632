#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jointgraph/blocknorm.hpp"
#include "jointgraph/edges.hpp"
#include "jointgraph/solver.hpp"

namespace jointgraph {

/// Per-group score covariances sharing p and M.
struct JointProblem {
  std::vector<BlockMatrix> sigmas;

  int K() const { return static_cast<int>(sigmas.size()); }
  int p() const { return sigmas.empty() ? 0 : sigmas.front().p(); }
  int M() const { return sigmas.empty() ? 0 : sigmas.front().block_size(); }

  void validate() const;
};

struct JointEstimate {
  std::vector<SolveResult> fits;
  WeightMatrix weights;  // tau used in the last refit
  double lambda = 0.0;
  double lambda0 = 0.0;
  std::vector<EdgeSet> edge_sets;
  EdgeSet common_edges;
};

/// Default clip for finite weights.
inline constexpr double kDefaultWeightCap = 1e12;

/// Separate unit-weight fits, one per group.
std::vector<SolveResult> initial_fit(const JointProblem& problem, double lambda0,
                                     const AdmmSettings& settings = {});

/// tau_jl = 0.5 * (sum_k ||Z^(k)_jl||_F)^{-1/2}, +inf where the sum is 0,
/// finite values clipped at `cap`.
WeightMatrix compute_weights(const std::vector<SolveResult>& fits, double cap = kDefaultWeightCap);

/// One weighted solve per group with common weights.
std::vector<SolveResult> weighted_fit(const JointProblem& problem, const WeightMatrix& tau,
                                      double lambda, const AdmmSettings& settings = {});

/// LLA iterations starting from an existing initial fit.
JointEstimate refine(const JointProblem& problem, std::vector<SolveResult> initial, double lambda0,
                     double lambda, int steps = 1, const AdmmSettings& settings = {},
                     double cap = kDefaultWeightCap);

/// initial_fit at lambda0, then `steps` reweighted solves at lambda.
JointEstimate fit(const JointProblem& problem, double lambda0, double lambda, int steps = 1,
                  const AdmmSettings& settings = {}, double cap = kDefaultWeightCap);

/// Packs separate unit-weight fits as an estimate (the per-group baseline).
JointEstimate separate_fit(const JointProblem& problem, double lambda,
                           const AdmmSettings& settings = {});

// Objectives over the hierarchical and square-root parameterisations. The
// likelihood part is sum_k [tr(S_k Omega_k) - log det Omega_k]; Omega_k is
// rebuilt from (theta, Gamma) as Omega_jj = Gamma_jj, Omega_jl = theta_jl Gamma_jl.
// Throws NumericError if a rebuilt Omega is not positive definite.

/// lambda1 sum_{j!=l} theta_jl + lambda2 sum_{j!=l} sum_k ||Gamma_jl||_F
double objective_q1(const std::vector<BlockMatrix>& sigmas, const Eigen::MatrixXd& theta,
                    const std::vector<BlockMatrix>& gammas, double lambda1, double lambda2);

/// sum_{j!=l} theta_jl + lambda sum_{j!=l} sum_k ||Gamma_jl||_F
double objective_q2(const std::vector<BlockMatrix>& sigmas, const Eigen::MatrixXd& theta,
                    const std::vector<BlockMatrix>& gammas, double lambda);

/// lambda sum_{j!=l} (sum_k ||Omega_jl||_F)^{1/2}; here lambda plays the role of 2 sqrt(lambda1 lambda2).
double objective_q3(const std::vector<BlockMatrix>& sigmas, const std::vector<BlockMatrix>& omegas,
                    double lambda);

/// sum_k [tr(S_k Omega_k) - log det Omega_k].
double negative_log_likelihood(const std::vector<BlockMatrix>& sigmas,
                               const std::vector<BlockMatrix>& omegas);

/// Omega_k from (theta, Gamma_k).
BlockMatrix compose_omega(const Eigen::MatrixXd& theta, const BlockMatrix& gamma);

}  // namespace jointgraph
