#include "jointgraph/fpca.hpp"

#include <cmath>
#include <string>

#include "jointgraph/errors.hpp"

namespace jointgraph {

double CurvePanel::gap() const { return (t_end - t_start) / static_cast<double>(nu() - 1); }

void CurvePanel::validate() const {
  if (values.empty()) throw ConfigError("curve panel has no variables");
  const auto rows = values.front().rows();
  const auto cols = values.front().cols();
  for (const auto& g : values) {
    if (g.rows() != rows || g.cols() != cols) {
      throw ConfigError("curve panel variables have inconsistent shapes");
    }
  }
  if (rows < 1) throw ConfigError("curve panel needs at least one subject");
  if (cols < 2) throw ConfigError("curve panel needs at least two time points");
  if (!(t_end > t_start)) throw ConfigError("curve grid must have t_end > t_start");
}

CurvePanel center(const CurvePanel& panel) {
  panel.validate();
  CurvePanel out = panel;
  for (auto& g : out.values) {
    const Eigen::RowVectorXd mean = g.colwise().mean();
    g.rowwise() -= mean;
  }
  return out;
}

Eigen::MatrixXd covariance_matrix(const CurvePanel& panel, int j) {
  if (j < 0 || j >= panel.p()) {
    throw IndexError("variable index " + std::to_string(j) + " outside 0.." +
                     std::to_string(panel.p() - 1));
  }
  const Eigen::MatrixXd& g = panel.values[j];
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(g.cols(), g.cols());
  k.selfadjointView<Eigen::Lower>().rankUpdate(g.transpose());
  k = k.selfadjointView<Eigen::Lower>();
  return k / static_cast<double>(g.rows());
}

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  // Coordinates below this are round-off, not a sign carrier.
  constexpr double kZero = 1e-10;
  for (Eigen::Index q = 0; q < v.size(); ++q) {
    if (std::abs(v(q)) > kZero) {
      if (v(q) < 0) v = -v;
      return;
    }
  }
}

}  // namespace

EigenPairs eigenpairs(const Eigen::MatrixXd& k, double w, int M) {
  if (k.rows() != k.cols()) throw InputError("eigenpairs: covariance must be square");
  if (M < 1 || M > k.rows()) {
    throw ConfigError("eigenpairs: M = " + std::to_string(M) + " must lie in 1.." +
                      std::to_string(k.rows()));
  }
  if (!(w > 0)) throw ConfigError("eigenpairs: grid gap must be positive");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  if (es.info() != Eigen::Success) throw NumericError("eigenpairs: eigensolver failed");

  // Eigen returns ascending order.
  const Eigen::Index nu = k.rows();
  EigenPairs out;
  out.values.resize(M);
  out.vectors.resize(nu, M);
  for (int m = 0; m < M; ++m) {
    const Eigen::Index src = nu - 1 - m;
    out.values(m) = std::max(0.0, w * es.eigenvalues()(src));
    out.vectors.col(m) = es.eigenvectors().col(src);
    fix_sign(out.vectors.col(m));
  }
  return out;
}

FpcaBasis estimate_basis(const CurvePanel& centered, int M) {
  centered.validate();
  FpcaBasis basis;
  basis.w = centered.gap();
  basis.eigenvalues.resize(centered.p(), M);
  basis.eigenfunctions.reserve(centered.p());
  for (int j = 0; j < centered.p(); ++j) {
    const Eigen::MatrixXd k = covariance_matrix(centered, j);
    EigenPairs pairs = eigenpairs(k, basis.w, M);
    // Relative cut for "numerically zero" eigenvalues of a PSD matrix.
    const double floor = 1e-12 * std::max(1.0, pairs.values(0));
    if (pairs.values(M - 1) <= floor) basis.rank_deficient.push_back(j);
    basis.eigenvalues.row(j) = pairs.values.transpose();
    basis.eigenfunctions.push_back(std::move(pairs.vectors));
  }
  return basis;
}

ScoreMatrix compute_scores(const CurvePanel& centered, const FpcaBasis& basis, ScoreScale scale) {
  centered.validate();
  if (basis.p() != centered.p()) throw ConfigError("compute_scores: variable count mismatch");
  if (basis.nu() != centered.nu()) throw ConfigError("compute_scores: grid length mismatch");
  const double w = centered.gap();
  if (std::abs(w - basis.w) > 1e-12 * std::max(1.0, std::abs(w))) {
    throw ConfigError("compute_scores: grid gap mismatch");
  }
  const int M = basis.components();
  const double factor = scale == ScoreScale::kL2 ? std::sqrt(w) : w;

  ScoreMatrix out;
  out.p = centered.p();
  out.M = M;
  out.scores.resize(centered.n(), static_cast<Eigen::Index>(out.p) * M);
  for (int j = 0; j < out.p; ++j) {
    out.scores.middleCols(static_cast<Eigen::Index>(j) * M, M) =
        factor * centered.values[j] * basis.eigenfunctions[j];
  }
  return out;
}

BlockMatrix score_covariance(const ScoreMatrix& scores) {
  const Eigen::Index n = scores.scores.rows();
  if (n < 1) throw InputError("score_covariance: no subjects");
  const Eigen::Index d = scores.scores.cols();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  sigma.selfadjointView<Eigen::Lower>().rankUpdate(scores.scores.transpose());
  sigma = sigma.selfadjointView<Eigen::Lower>();
  sigma /= static_cast<double>(n);
  return BlockMatrix(std::move(sigma), scores.p, scores.M);
}

BlockMatrix estimate_sigma(const CurvePanel& panel, int M, ScoreScale scale) {
  const CurvePanel centered = center(panel);
  const FpcaBasis basis = estimate_basis(centered, M);
  return score_covariance(compute_scores(centered, basis, scale));
}

}  // namespace jointgraph
