#pragma once

#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "jointgraph/blocknorm.hpp"
#include "jointgraph/edges.hpp"

namespace jointgraph {

/// Symmetric p x p penalty weights tau_jl >= 0 with zero diagonal.
/// +infinity forces block (j, l) to zero whenever lambda > 0.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(Eigen::MatrixXd tau);

  /// tau_jl = 1 off the diagonal (plain blockwise group lasso).
  static WeightMatrix unit(int p);

  int p() const { return static_cast<int>(tau_.rows()); }
  double operator()(int j, int l) const { return tau_(j, l); }  // 0-based
  const Eigen::MatrixXd& values() const { return tau_; }

 private:
  Eigen::MatrixXd tau_;
};

struct AdmmSettings {
  double b = 1.0;  // augmented-Lagrangian constant
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  int max_iter = 500;
  // Residual balancing of b (doubling/halving when one residual exceeds the
  // other tenfold), stopped after max_adaptations changes.
  bool adaptive_b = false;
  int max_adaptations = 100;

  void validate() const;
};

struct SolveResult {
  BlockMatrix omega;  // primal iterate, positive definite
  BlockMatrix z;      // dual (thresholded) iterate, symmetric
  BlockMatrix v;      // multiplier
  int iterations = 0;
  double primal_residual = 0.0;  // ||Omega - Z||_F
  double dual_residual = 0.0;    // b ||Z_t - Z_{t-1}||_F
  bool converged = false;
  double final_b = 0.0;  // b at exit; differs from settings.b only with adaptive_b
};

/// Optional starting point; the default is Z = 1 1', V = 0.
struct AdmmStart {
  Eigen::MatrixXd z;
  Eigen::MatrixXd v;
};

/// Effective threshold lambda * tau with the conventions lambda * inf = inf
/// for lambda > 0 and 0 (unpenalised) for lambda == 0.
inline double scaled_penalty(double lambda, double tau) {
  if (lambda == 0.0) return 0.0;
  return lambda * tau;
}

/// Omega-update: eigendecompose Z - (S + V)/b = Y diag(d) Y' and return
/// Y diag((d + sqrt(d^2 + 4/b)) / 2) Y'.
Eigen::MatrixXd omega_update(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z,
                             const Eigen::MatrixXd& v, double b);

/// Z-update: diagonal blocks copy Omega + V/b, off-diagonal blocks are
/// group soft-thresholded at lambda * tau_jl / b.
Eigen::MatrixXd z_update(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& v,
                         const WeightMatrix& tau, double lambda, double b, int block_size);

/// Minimises tr(S Omega) - log det Omega + lambda sum_{j != l} tau_jl ||Omega_jl||_F
/// by ADMM. Non-convergence is reported through `converged`, not thrown.
SolveResult admm_solve(const BlockMatrix& s, const WeightMatrix& tau, double lambda,
                       const AdmmSettings& settings = {},
                       const std::optional<AdmmStart>& start = std::nullopt);

/// Blockwise max of the stationarity residual S - Omega^{-1} + lambda (T (x) 11') o G.
///
/// The support is read from `z`. On blocks where Z_jl != 0 the subgradient G_jl
/// is Z_jl / ||Z_jl||_F; on zero blocks it is the element of the unit
/// Frobenius ball that minimises the residual, so those blocks contribute
/// max(0, ||(S - Omega^{-1})_jl||_F - lambda tau_jl). Diagonal blocks have G = 0.
double kkt_residual(const BlockMatrix& s, const BlockMatrix& omega, const BlockMatrix& z,
                    const WeightMatrix& tau, double lambda);

/// Edges (j, l), j < l, 1-based, whose Z block is not exactly zero.
EdgeSet extract_edges(const SolveResult& result);
EdgeSet extract_edges(const BlockMatrix& z);

}  // namespace jointgraph
