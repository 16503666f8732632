#include "jointgraph/jfggm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "jointgraph/errors.hpp"

namespace jointgraph {

void JointProblem::validate() const {
  if (sigmas.empty()) throw InputError("joint problem needs at least one group");
  for (const auto& s : sigmas) {
    if (s.p() != p() || s.block_size() != M()) {
      throw InputError("joint problem groups disagree on p or M");
    }
  }
}

std::vector<SolveResult> initial_fit(const JointProblem& problem, double lambda0,
                                     const AdmmSettings& settings) {
  problem.validate();
  if (!(lambda0 >= 0)) throw InputError("lambda0 must be >= 0");
  return weighted_fit(problem, WeightMatrix::unit(problem.p()), lambda0, settings);
}

WeightMatrix compute_weights(const std::vector<SolveResult>& fits, double cap) {
  if (fits.empty()) throw InputError("compute_weights: no initial estimates");
  if (!(cap > 0)) throw InputError("compute_weights: cap must be positive");
  const int p = fits.front().z.p();
  const int m = fits.front().z.block_size();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(p, p);
  for (const auto& f : fits) {
    if (f.z.p() != p || f.z.block_size() != m) throw InputError("compute_weights: shape mismatch");
    mass += f.z.block_frobenius_grid();
  }
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) {
    for (int l = j + 1; l < p; ++l) {
      // Symmetric by construction; Z is symmetrised in the solver.
      const double total = 0.5 * (mass(j, l) + mass(l, j));
      const double t = total == 0.0 ? std::numeric_limits<double>::infinity()
                                    : std::min(cap, 0.5 / std::sqrt(total));
      tau(j, l) = t;
      tau(l, j) = t;
    }
  }
  return WeightMatrix(std::move(tau));
}

std::vector<SolveResult> weighted_fit(const JointProblem& problem, const WeightMatrix& tau,
                                      double lambda, const AdmmSettings& settings) {
  problem.validate();
  std::vector<SolveResult> out;
  out.reserve(problem.sigmas.size());
  for (const auto& s : problem.sigmas) out.push_back(admm_solve(s, tau, lambda, settings));
  return out;
}

namespace {

void collect_edges(JointEstimate& est) {
  est.edge_sets.clear();
  for (const auto& f : est.fits) est.edge_sets.push_back(extract_edges(f));
  est.common_edges = intersect(est.edge_sets);
}

}  // namespace

JointEstimate refine(const JointProblem& problem, std::vector<SolveResult> initial, double lambda0,
                     double lambda, int steps, const AdmmSettings& settings, double cap) {
  problem.validate();
  if (steps < 1) throw ConfigError("LLA needs at least one step");
  if (!(lambda >= 0)) throw InputError("lambda must be >= 0");
  if (static_cast<int>(initial.size()) != problem.K()) {
    throw InputError("initial estimate count does not match K");
  }
  JointEstimate est;
  est.lambda = lambda;
  est.lambda0 = lambda0;
  est.fits = std::move(initial);
  for (int t = 0; t < steps; ++t) {
    est.weights = compute_weights(est.fits, cap);
    est.fits = weighted_fit(problem, est.weights, lambda, settings);
  }
  collect_edges(est);
  return est;
}

JointEstimate fit(const JointProblem& problem, double lambda0, double lambda, int steps,
                  const AdmmSettings& settings, double cap) {
  return refine(problem, initial_fit(problem, lambda0, settings), lambda0, lambda, steps,
                settings, cap);
}

JointEstimate separate_fit(const JointProblem& problem, double lambda,
                           const AdmmSettings& settings) {
  JointEstimate est;
  est.lambda = lambda;
  est.lambda0 = lambda;
  est.weights = WeightMatrix::unit(problem.p());
  est.fits = initial_fit(problem, lambda, settings);
  collect_edges(est);
  return est;
}

namespace {

double log_det_pd(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError("matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void check_theta(const Eigen::MatrixXd& theta, int p) {
  if (theta.rows() != p || theta.cols() != p) throw InputError("theta must be p x p");
  for (int j = 0; j < p; ++j) {
    if (theta(j, j) != 1.0) throw InputError("theta must have unit diagonal");
    for (int l = 0; l < p; ++l) {
      if (theta(j, l) != theta(l, j)) throw InputError("theta must be symmetric");
      if (j != l && theta(j, l) < 0) throw InputError("theta must be nonnegative");
    }
  }
}

// sum_{j != l} sum_k ||A^(k)_jl||_F
double offdiag_block_mass(const std::vector<BlockMatrix>& mats) {
  double total = 0.0;
  for (const auto& a : mats) {
    const Eigen::MatrixXd grid = a.block_frobenius_grid();
    total += grid.sum() - grid.diagonal().sum();
  }
  return total;
}

}  // namespace

double negative_log_likelihood(const std::vector<BlockMatrix>& sigmas,
                               const std::vector<BlockMatrix>& omegas) {
  if (sigmas.size() != omegas.size()) throw InputError("sigma/omega count mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    if (sigmas[k].dim() != omegas[k].dim()) throw InputError("sigma/omega shape mismatch");
    total += (sigmas[k].data().cwiseProduct(omegas[k].data().transpose())).sum() -
             log_det_pd(omegas[k].data());
  }
  return total;
}

BlockMatrix compose_omega(const Eigen::MatrixXd& theta, const BlockMatrix& gamma) {
  const int p = gamma.p();
  const int m = gamma.block_size();
  check_theta(theta, p);
  Eigen::MatrixXd omega = gamma.data();
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < p; ++l)
      if (j != l) omega.block(j * m, l * m, m, m) *= theta(j, l);
  return BlockMatrix(std::move(omega), p, m);
}

double objective_q1(const std::vector<BlockMatrix>& sigmas, const Eigen::MatrixXd& theta,
                    const std::vector<BlockMatrix>& gammas, double lambda1, double lambda2) {
  std::vector<BlockMatrix> omegas;
  for (const auto& g : gammas) omegas.push_back(compose_omega(theta, g));
  const double theta_mass = theta.sum() - theta.diagonal().sum();
  return negative_log_likelihood(sigmas, omegas) + lambda1 * theta_mass +
         lambda2 * offdiag_block_mass(gammas);
}

double objective_q2(const std::vector<BlockMatrix>& sigmas, const Eigen::MatrixXd& theta,
                    const std::vector<BlockMatrix>& gammas, double lambda) {
  return objective_q1(sigmas, theta, gammas, 1.0, lambda);
}

double objective_q3(const std::vector<BlockMatrix>& sigmas, const std::vector<BlockMatrix>& omegas,
                    double lambda) {
  if (omegas.empty()) throw InputError("objective_q3: no groups");
  const int p = omegas.front().p();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(p, p);
  for (const auto& o : omegas) {
    if (o.p() != p) throw InputError("objective_q3: groups disagree on p");
    mass += o.block_frobenius_grid();
  }
  double penalty = 0.0;
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < p; ++l)
      if (j != l) penalty += std::sqrt(mass(j, l));
  return negative_log_likelihood(sigmas, omegas) + lambda * penalty;
}

}  // namespace jointgraph
