#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jointgraph/blocknorm.hpp"
#include "jointgraph/edges.hpp"
#include "jointgraph/fpca.hpp"
#include "jointgraph/rng.hpp"

namespace jointgraph {

struct SimConfig {
  int p = 20;
  int n = 100;
  int K = 3;
  int M = 3;
  int nu = 100;
  double s = 0.05;       // common-edge fraction of C(p, 2)
  double rho = 0.0;      // individual-to-common edge ratio
  double sigma2 = 0.05;  // noise variance
  double t_start = 0.0;
  double t_end = 1.0;
  std::string basis = "trig";  // "trig" = {1, sin t, cos t}, "fourier" = L2-orthonormal Fourier
  std::uint64_t seed = 1;
  double delta = 0.01;  // strict-dominance margin in the precision normalisation

  int common_count() const;      // round(s * C(p, 2))
  int individual_count() const;  // round(rho * common_count())

  /// Throws ConfigError for infeasible or out-of-range settings.
  void validate() const;
};

struct GroundTruth {
  EdgeSet common;                   // A
  std::vector<EdgeSet> individual;  // B^(k)
  std::vector<EdgeSet> full;        // E^(k) = A u B^(k)
  std::vector<BlockMatrix> omegas;  // Omega^(k)
};

struct EdgeSets {
  EdgeSet common;
  std::vector<EdgeSet> individual;
};

/// Samples A and pairwise-disjoint B^(k), all disjoint from A.
EdgeSets generate_edge_sets(const SimConfig& config, Rng& rng);

/// Blocks a_jl I_M on the edges, I_M on the diagonal, symmetrised and
/// normalised to unit diagonal with strict diagonal dominance:
///   omega_rs = b_rs / ((1 + delta) * max(R_r, R_s)),  R_r = sum_{q != r} |b_rq|.
BlockMatrix build_precision_matrix(const EdgeSet& edges, int p, int M, Rng& rng,
                                   double delta = 0.01);

/// Basis functions evaluated on a grid: returns nu x M.
using BasisFunction = std::function<double(double)>;
std::vector<BasisFunction> make_basis(const std::string& name, int M, double t_start,
                                      double t_end);
Eigen::MatrixXd evaluate_basis(const std::vector<BasisFunction>& basis, double t_start,
                               double t_end, int nu);

struct SimulatedGroup {
  CurvePanel panel;
  ScoreMatrix true_scores;
};

/// Scores a_i ~ N(0, Omega^{-1}) and curves h_ij(t) = a_ij' phi(t) + eps,
/// eps ~ N(0, sigma2). Throws InputError if Omega is not positive definite.
SimulatedGroup generate_curves(const BlockMatrix& omega, const Eigen::MatrixXd& basis_values,
                               int n, double sigma2, double t_start, double t_end,
                               Rng& score_rng, Rng& noise_rng);

struct SimulatedDataset {
  SimConfig config;
  GroundTruth truth;
  std::vector<SimulatedGroup> groups;
};

/// Full generator. `replicate` selects the substream family, so
/// (config, replicate) determines the output bit for bit.
SimulatedDataset simulate(const SimConfig& config, std::uint32_t replicate = 0);

}  // namespace jointgraph
