#include "jointgraph/solver.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "jointgraph/errors.hpp"

namespace jointgraph {

WeightMatrix::WeightMatrix(Eigen::MatrixXd tau) : tau_(std::move(tau)) {
  if (tau_.rows() != tau_.cols()) throw InputError("weight matrix must be square");
  for (Eigen::Index j = 0; j < tau_.rows(); ++j) {
    for (Eigen::Index l = 0; l < tau_.cols(); ++l) {
      const double t = tau_(j, l);
      if (std::isnan(t) || t < 0) throw InputError("weights must be nonnegative");
      if (t != tau_(l, j)) throw InputError("weight matrix must be symmetric");
    }
    if (tau_(j, j) != 0.0) throw InputError("weight matrix diagonal must be zero");
  }
}

WeightMatrix WeightMatrix::unit(int p) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Ones(p, p);
  t.diagonal().setZero();
  return WeightMatrix(std::move(t));
}

void AdmmSettings::validate() const {
  if (!(b > 0) || !std::isfinite(b)) throw ConfigError("ADMM constant b must be positive");
  if (!(tol_primal > 0) || !(tol_dual > 0)) throw ConfigError("ADMM tolerances must be positive");
  if (max_iter < 1) throw ConfigError("ADMM max_iter must be at least 1");
}

Eigen::MatrixXd omega_update(const Eigen::MatrixXd& s, const Eigen::MatrixXd& z,
                             const Eigen::MatrixXd& v, double b) {
  const Eigen::MatrixXd target = z - (s + v) / b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(target);
  if (es.info() != Eigen::Success) throw NumericError("omega_update: eigensolver failed");
  const Eigen::ArrayXd d = es.eigenvalues().array();
  const Eigen::VectorXd mapped = (0.5 * (d + (d.square() + 4.0 / b).sqrt())).matrix();
  assert(mapped.minCoeff() > 0.0);
  return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd z_update(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& v,
                         const WeightMatrix& tau, double lambda, double b, int block_size) {
  const int m = block_size;
  const int p = tau.p();
  Eigen::MatrixXd z = omega + v / b;
  for (int j = 0; j < p; ++j) {
    for (int l = j + 1; l < p; ++l) {
      const double threshold = scaled_penalty(lambda, tau(j, l)) / b;
      if (threshold == 0.0) continue;
      auto upper = z.block(j * m, l * m, m, m);
      auto lower = z.block(l * m, j * m, m, m);
      const double nu = upper.norm();
      const double nl = lower.norm();
      // inf threshold or a block already at zero gives an exact zero block.
      const double su = (std::isinf(threshold) || nu <= threshold) ? 0.0 : 1.0 - threshold / nu;
      const double sl = (std::isinf(threshold) || nl <= threshold) ? 0.0 : 1.0 - threshold / nl;
      if (su == 0.0) upper.setZero(); else upper *= su;
      if (sl == 0.0) lower.setZero(); else lower *= sl;
    }
  }
  return z;
}

namespace {

void validate_problem(const BlockMatrix& s, const WeightMatrix& tau, double lambda) {
  if (tau.p() != s.p()) throw InputError("weight matrix size does not match S");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw InputError("lambda must be finite and >= 0");
  const Eigen::MatrixXd& a = s.data();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InputError("S must be symmetric");
  }
  if (!(a.diagonal().minCoeff() > 0)) throw InputError("S must have a strictly positive diagonal");
}

}  // namespace

SolveResult admm_solve(const BlockMatrix& s, const WeightMatrix& tau, double lambda,
                       const AdmmSettings& settings, const std::optional<AdmmStart>& start) {
  settings.validate();
  validate_problem(s, tau, lambda);

  const int p = s.p();
  const int m = s.block_size();
  const Eigen::Index d = s.dim();
  double b = settings.b;
  int adaptations = 0;
  const Eigen::MatrixXd sym = 0.5 * (s.data() + s.data().transpose());

  Eigen::MatrixXd z = Eigen::MatrixXd::Ones(d, d);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  if (start) {
    if (start->z.rows() != d || start->z.cols() != d || start->v.rows() != d ||
        start->v.cols() != d) {
      throw InputError("ADMM start has the wrong shape");
    }
    z = start->z;
    v = start->v;
  }

  SolveResult result;
  Eigen::MatrixXd omega;
  for (int it = 1; it <= settings.max_iter; ++it) {
    omega = omega_update(sym, z, v, b);
    Eigen::MatrixXd z_next = z_update(omega, v, tau, lambda, b, m);
    z_next = 0.5 * (z_next + z_next.transpose()).eval();
    v += b * (omega - z_next);

    result.primal_residual = (omega - z_next).norm();
    result.dual_residual = b * (z_next - z).norm();
    z = std::move(z_next);
    result.iterations = it;

    if (result.primal_residual <= settings.tol_primal * (1.0 + z.norm()) &&
        result.dual_residual <= settings.tol_dual * (1.0 + v.norm())) {
      result.converged = true;
      break;
    }
    if (settings.adaptive_b && adaptations < settings.max_adaptations) {
      // Residual balancing; V is unscaled, so it carries over unchanged.
      constexpr double kImbalance = 10.0, kFactor = 2.0;
      if (result.primal_residual > kImbalance * result.dual_residual) {
        b *= kFactor;
        ++adaptations;
      } else if (result.dual_residual > kImbalance * result.primal_residual) {
        b /= kFactor;
        ++adaptations;
      }
    }
  }
  result.final_b = b;

  result.omega = BlockMatrix(std::move(omega), p, m);
  result.z = BlockMatrix(std::move(z), p, m);
  result.v = BlockMatrix(std::move(v), p, m);
  return result;
}

double kkt_residual(const BlockMatrix& s, const BlockMatrix& omega, const BlockMatrix& z,
                    const WeightMatrix& tau, double lambda) {
  if (omega.p() != s.p() || z.p() != s.p() || omega.block_size() != s.block_size() ||
      z.block_size() != s.block_size()) {
    throw InputError("kkt_residual: shape mismatch");
  }
  if (tau.p() != s.p()) throw InputError("kkt_residual: weight matrix size mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(omega.data());
  if (llt.info() != Eigen::Success) throw NumericError("kkt_residual: Omega is not positive definite");
  const Eigen::Index d = s.dim();
  const Eigen::MatrixXd grad = s.data() - llt.solve(Eigen::MatrixXd::Identity(d, d));

  const int p = s.p();
  const int m = s.block_size();
  double worst = 0.0;
  for (int j = 0; j < p; ++j) {
    for (int l = 0; l < p; ++l) {
      const auto g = grad.block(j * m, l * m, m, m);
      double r = 0.0;
      if (j == l) {
        r = g.norm();
      } else {
        const double pen = scaled_penalty(lambda, tau(j, l));
        const auto zb = z.data().block(j * m, l * m, m, m);
        const double zn = zb.norm();
        if (zn > 0.0) {
          r = (g + (pen / zn) * zb).norm();
        } else if (!std::isinf(pen)) {
          r = std::max(0.0, g.norm() - pen);
        }
      }
      worst = std::max(worst, r);
    }
  }
  return worst;
}

EdgeSet extract_edges(const BlockMatrix& z) {
  EdgeSet edges;
  const int p = z.p();
  const int m = z.block_size();
  for (int j = 0; j < p; ++j) {
    for (int l = j + 1; l < p; ++l) {
      const bool upper = (z.data().block(j * m, l * m, m, m).array() != 0.0).any();
      const bool lower = (z.data().block(l * m, j * m, m, m).array() != 0.0).any();
      if (upper || lower) edges.insert({j + 1, l + 1});
    }
  }
  return edges;
}

EdgeSet extract_edges(const SolveResult& result) { return extract_edges(result.z); }

}  // namespace jointgraph
