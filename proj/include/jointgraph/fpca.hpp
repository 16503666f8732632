#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jointgraph/blocknorm.hpp"

namespace jointgraph {

/// Curves of one subpopulation sampled on a shared, equally spaced grid.
///
/// `values[j]` is the n x nu matrix G_j whose row i holds curve g_ij at the
/// grid points t_1 < ... < t_nu. Variables are 0-based here.
struct CurvePanel {
  std::vector<Eigen::MatrixXd> values;
  double t_start = 0.0;
  double t_end = 1.0;
  std::string group_id;

  int n() const { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
  int p() const { return static_cast<int>(values.size()); }
  int nu() const { return values.empty() ? 0 : static_cast<int>(values.front().cols()); }

  /// Grid gap w = (t_end - t_start) / (nu - 1).
  double gap() const;

  /// Throws ConfigError unless every variable has the same n x nu shape,
  /// nu >= 2 and the gap is positive.
  void validate() const;
};

struct FpcaBasis {
  Eigen::MatrixXd eigenvalues;                // p x M, nonincreasing in each row
  std::vector<Eigen::MatrixXd> eigenfunctions;  // per variable: nu x M, orthonormal columns
  double w = 0.0;
  // Variables whose covariance had fewer than M positive eigenvalues; the
  // trailing eigenvectors there are an arbitrary orthonormal completion.
  std::vector<int> rank_deficient;

  int p() const { return static_cast<int>(eigenfunctions.size()); }
  int components() const { return static_cast<int>(eigenvalues.cols()); }
  int nu() const { return eigenfunctions.empty() ? 0 : static_cast<int>(eigenfunctions.front().rows()); }
};

struct EigenPairs {
  Eigen::VectorXd values;   // M values of w * K, nonincreasing
  Eigen::MatrixXd vectors;  // nu x M, unit Euclidean norm, first nonzero entry positive
};

/// How scores are scaled from the unit eigenvectors u.
///   kL2:       phi = u / sqrt(w) is L2-normalised on the interval, so
///              a = w * sum_q g(t_q) phi(t_q) = sqrt(w) * <g, u> and
///              Var(a_m) equals the returned eigenvalue w * u'Ku.
///   kGridUnit: phi = u taken literally, a = w * <g, u>.
enum class ScoreScale { kL2, kGridUnit };

/// n x (p*M) scores, column (j*M + m) holds component m of variable j.
struct ScoreMatrix {
  Eigen::MatrixXd scores;
  int p = 0;
  int M = 0;
};

/// Subtracts the across-subject mean at every (variable, time) point.
CurvePanel center(const CurvePanel& panel);

/// K_j = n^{-1} G_j' G_j for the 0-based variable j.
Eigen::MatrixXd covariance_matrix(const CurvePanel& panel, int j);

/// Top-M eigenpairs of w*K. Eigenvalues below zero (round-off) are clamped to 0.
EigenPairs eigenpairs(const Eigen::MatrixXd& k, double w, int M);

/// Per-variable eigenpairs of a centered panel.
FpcaBasis estimate_basis(const CurvePanel& centered, int M);

ScoreMatrix compute_scores(const CurvePanel& centered, const FpcaBasis& basis,
                           ScoreScale scale = ScoreScale::kL2);

/// Sigma = n^{-1} sum_i a_i a_i' as a p x p grid of M x M blocks.
BlockMatrix score_covariance(const ScoreMatrix& scores);

/// center -> estimate_basis -> compute_scores -> score_covariance.
BlockMatrix estimate_sigma(const CurvePanel& panel, int M, ScoreScale scale = ScoreScale::kL2);

}  // namespace jointgraph
