// Shared helpers for the test programs: random instances and small oracles
// that do not go through the library code they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jointgraph/blocknorm.hpp"
#include "jointgraph/fpca.hpp"
#include "jointgraph/solver.hpp"

namespace testsupport {

using Eigen::MatrixXd;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double unif(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  double normal() { return std::normal_distribution<double>()(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin(double p = 0.5) { return unif() < p; }

  MatrixXd matrix(int r, int c, double scale = 1.0) {
    MatrixXd a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = scale * normal();
    return a;
  }

  // Wishart-like sample covariance plus a ridge; condition number stays modest.
  MatrixXd spd(int d, double ridge = 0.2) {
    const MatrixXd x = matrix(2 * d + 3, d);
    MatrixXd s = x.transpose() * x / static_cast<double>(x.rows());
    s.diagonal().array() += ridge;
    return 0.5 * (s + s.transpose());
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Block norms by explicit loops over entries.
// Tolerances well below the accuracy the checks ask for.
inline jointgraph::AdmmSettings tight() {
  jointgraph::AdmmSettings s;
  s.tol_primal = 1e-10;
  s.tol_dual = 1e-10;
  s.max_iter = 20000;
  return s;
}

// Symmetric nonnegative weights with a zero diagonal; some pairs unpenalised.
inline MatrixXd random_weights(Gen& g, int p, double zero_prob = 0.1) {
  MatrixXd t = MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j)
    for (int l = j + 1; l < p; ++l) t(j, l) = t(l, j) = g.coin(zero_prob) ? 0.0 : g.unif(0.0, 2.0);
  return t;
}

inline double block_fro(const MatrixXd& a, int rb, int cb, int i, int j) {
  double acc = 0.0;
  for (int r = 0; r < rb; ++r)
    for (int c = 0; c < cb; ++c) {
      const double v = a(i * rb + r, j * cb + c);
      acc += v * v;
    }
  return std::sqrt(acc);
}

inline double loop_norm_inf(const MatrixXd& a, int rb, int cb) {
  double best = 0.0;
  for (int i = 0; i < a.rows() / rb; ++i) {
    double row = 0.0;
    for (int j = 0; j < a.cols() / cb; ++j) row += block_fro(a, rb, cb, i, j);
    best = std::max(best, row);
  }
  return best;
}

inline double loop_norm_max(const MatrixXd& a, int rb, int cb) {
  double best = 0.0;
  for (int i = 0; i < a.rows() / rb; ++i)
    for (int j = 0; j < a.cols() / cb; ++j) best = std::max(best, block_fro(a, rb, cb, i, j));
  return best;
}

inline double loop_norm_one(const MatrixXd& a, int rb, int cb) {
  double best = 0.0;
  for (int j = 0; j < a.cols() / cb; ++j) {
    double col = 0.0;
    for (int i = 0; i < a.rows() / rb; ++i) col += block_fro(a, rb, cb, i, j);
    best = std::max(best, col);
  }
  return best;
}

// log det through a hand-written Cholesky; +inf when a pivot is not positive.
inline double logdet_pd(MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    double d = a(k, k);
    for (int q = 0; q < k; ++q) d -= a(k, q) * a(k, q);
    if (!(d > 0)) return std::numeric_limits<double>::infinity();
    const double lkk = std::sqrt(d);
    a(k, k) = lkk;
    for (int i = k + 1; i < n; ++i) {
      double v = a(i, k);
      for (int q = 0; q < k; ++q) v -= a(i, q) * a(k, q);
      a(i, k) = v / lkk;
    }
    acc += 2.0 * std::log(lkk);
  }
  return acc;
}

// Penalised objective tr(S W) - log det W + lambda sum_{j != l} tau_jl ||W_jl||_F.
inline double penalised_objective(const MatrixXd& s, const MatrixXd& w, const MatrixXd& tau,
                                  double lambda, int M) {
  const double ld = logdet_pd(w);
  if (std::isinf(ld)) return std::numeric_limits<double>::infinity();
  double tr = 0.0;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j) tr += s(i, j) * w(j, i);
  double pen = 0.0;
  const int p = static_cast<int>(tau.rows());
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < p; ++l)
      if (j != l && lambda > 0) pen += tau(j, l) * block_fro(w, M, M, j, l);
  return tr - ld + lambda * pen;
}

// Brute-force minimiser of the 2 x 2 (p = 2, M = 1) problem over
// W = [[a, c], [c, b]]: a 3-D grid around the current best point, shrunk
// after every round.
inline MatrixXd brute_force_2x2(const MatrixXd& s, double lambda, double tau12) {
  MatrixXd tau = MatrixXd::Zero(2, 2);
  tau(0, 1) = tau(1, 0) = tau12;
  auto f = [&](double a, double b, double c) {
    MatrixXd w(2, 2);
    w << a, c, c, b;
    if (!(a > 0 && b > 0 && a * b - c * c > 0)) return std::numeric_limits<double>::infinity();
    return penalised_objective(s, w, tau, lambda, 1);
  };
  double a = 1.0 / s(0, 0), b = 1.0 / s(1, 1), c = 0.0;
  double best = f(a, b, c);
  double radius = std::max(a, b);
  constexpr int kHalf = 6;  // 13 points per axis
  for (int round = 0; round < 70; ++round) {
    double ba = a, bb = b, bc = c;
    const double h = radius / kHalf;
    for (int i = -kHalf; i <= kHalf; ++i)
      for (int j = -kHalf; j <= kHalf; ++j)
        for (int k = -kHalf; k <= kHalf; ++k) {
          // Keep c = 0 exactly reachable so the kink is sampled.
          const double cc = (k == 0) ? c : c + k * h;
          const double v = f(a + i * h, b + j * h, cc);
          if (v < best) {
            best = v;
            ba = a + i * h;
            bb = b + j * h;
            bc = cc;
          }
        }
    const double v0 = f(ba, bb, 0.0);
    if (v0 <= best) {
      best = v0;
      bc = 0.0;
    }
    a = ba;
    b = bb;
    c = bc;
    radius *= 0.6;
  }
  MatrixXd w(2, 2);
  w << a, c, c, b;
  return w;
}

// Closed form for the same 2 x 2 problem from the stationarity conditions:
// the inverse keeps S's diagonal and soft-thresholds the off-diagonal at
// lambda * tau.
inline MatrixXd closed_form_2x2(const MatrixXd& s, double lambda, double tau12) {
  const double t = lambda * tau12;
  MatrixXd inv(2, 2);
  const double off = std::abs(s(0, 1)) <= t ? 0.0 : s(0, 1) - std::copysign(t, s(0, 1));
  inv << s(0, 0), off, off, s(1, 1);
  const double det = inv(0, 0) * inv(1, 1) - off * off;
  MatrixXd w(2, 2);
  w << inv(1, 1) / det, -off / det, -off / det, inv(0, 0) / det;
  return w;
}

// Hand-rolled property runner: calls body(gen, trial) for every trial with
// its own seed, so a failure message can name the seed.
inline void for_trials(int trials, std::uint64_t base_seed,
                       const std::function<void(Gen&, int)>& body) {
  for (int t = 0; t < trials; ++t) {
    Gen g(base_seed * 1000003ULL + static_cast<std::uint64_t>(t));
    body(g, t);
  }
}

// Noiseless curves g_ij(t_q) = sum_m a_ijm phi_m(t_q) from {1, sin, cos} on
// [0, 1] made orthonormal on the grid (w Phi'Phi = I). Component m has
// variance sd[m]^2 for every variable; truth(i, j*M + m) = a_ijm.
// With `uncorrelated` the Gaussian scores are rotated so that their sample
// covariance is exactly diag(sd^2); otherwise they are left as drawn, and the
// sample eigenbasis is off by O(n^{-1/2}).
struct RecoveryData {
  jointgraph::CurvePanel panel;
  MatrixXd truth;
  MatrixXd phi;  // nu x M
};

inline RecoveryData recovery_panel(Gen& g, int n, int p, int nu, const std::vector<double>& sd,
                                   bool uncorrelated = true) {
  const int M = static_cast<int>(sd.size());
  const double w = 1.0 / (nu - 1);
  MatrixXd raw(nu, 3);
  for (int q = 0; q < nu; ++q) {
    const double t = q * w;
    raw(q, 0) = 1.0;
    raw(q, 1) = std::sin(t);
    raw(q, 2) = std::cos(t);
  }
  // Gram-Schmidt in the weighted inner product.
  MatrixXd phi(nu, M);
  for (int m = 0; m < M; ++m) {
    Eigen::VectorXd v = raw.col(m);
    for (int r = 0; r < m; ++r) v -= (w * phi.col(r).dot(v)) * phi.col(r);
    phi.col(m) = v / std::sqrt(w * v.squaredNorm());
  }
  RecoveryData out;
  out.phi = phi;
  out.truth.resize(n, p * M);
  out.panel.t_start = 0.0;
  out.panel.t_end = 1.0;
  for (int j = 0; j < p; ++j) {
    MatrixXd a(n, M);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < M; ++m) a(i, m) = sd[m] * g.normal();
    if (uncorrelated) {
      a.rowwise() -= a.colwise().mean();
      const MatrixXd q = a.householderQr().householderQ() * MatrixXd::Identity(n, M);
      for (int m = 0; m < M; ++m) a.col(m) = std::sqrt(static_cast<double>(n)) * sd[m] * q.col(m);
    }
    out.truth.middleCols(j * M, M) = a;
    out.panel.values.push_back(a * phi.transpose());
  }
  return out;
}

inline double correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  return xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
}

struct Tuple {
  std::vector<jointgraph::BlockMatrix> sigmas;
  std::vector<jointgraph::BlockMatrix> omegas;
  MatrixXd theta;
  std::vector<jointgraph::BlockMatrix> gammas;
};

// Random PD Omegas sharing a random set of zero blocks, a random positive
// theta on the nonzero pairs and Gamma = Omega / theta blockwise.
inline Tuple random_tuple(Gen& g) {
  const int p = g.integer(2, 5), m = g.integer(1, 3), K = g.integer(1, 3);
  const int d = p * m;
  MatrixXd zero_pair = MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j)
    for (int l = j + 1; l < p; ++l) zero_pair(j, l) = zero_pair(l, j) = g.coin(0.3) ? 1.0 : 0.0;
  Tuple t;
  t.theta = MatrixXd::Identity(p, p);
  for (int j = 0; j < p; ++j)
    for (int l = j + 1; l < p; ++l) t.theta(j, l) = t.theta(l, j) = zero_pair(j, l) ? 0.0 : g.unif(0.2, 3.0);
  for (int k = 0; k < K; ++k) {
    t.sigmas.emplace_back(g.spd(d, 0.1), p, m);
    MatrixXd o = g.matrix(d, d, 0.3);
    o = 0.5 * (o + o.transpose()).eval();
    for (int j = 0; j < p; ++j)
      for (int l = 0; l < p; ++l)
        if (zero_pair(j, l) != 0.0) o.block(j * m, l * m, m, m).setZero();
    o.diagonal().array() += o.cwiseAbs().rowwise().sum().array() + 0.5;  // dominant, PD
    t.omegas.emplace_back(o, p, m);
    MatrixXd gm = o;
    for (int j = 0; j < p; ++j)
      for (int l = 0; l < p; ++l)
        if (j != l && t.theta(j, l) > 0) gm.block(j * m, l * m, m, m) /= t.theta(j, l);
    t.gammas.emplace_back(gm, p, m);
  }
  return t;
}

// Off-diagonal rescaling (theta * a, Gamma / a); diagonal entries stay put.
inline void rescale(MatrixXd& theta, std::vector<jointgraph::BlockMatrix>& gammas, double a) {
  const int p = static_cast<int>(theta.rows());
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < p; ++l)
      if (j != l) theta(j, l) *= a;
  for (auto& gm : gammas) {
    const int m = gm.block_size();
    for (int j = 0; j < p; ++j)
      for (int l = 0; l < p; ++l)
        if (j != l) gm.data().block(j * m, l * m, m, m) /= a;
  }
}


// theta_jl = (lambda sum_k ||Omega_jl||_F)^{1/2} off the diagonal, 1 on it,
// and Gamma = Omega / theta blockwise (zero where theta is zero).
inline std::pair<MatrixXd, std::vector<jointgraph::BlockMatrix>> optimal_split(
    const std::vector<jointgraph::BlockMatrix>& omegas, double lambda) {
  const int p = omegas[0].p(), m = omegas[0].block_size();
  MatrixXd theta = MatrixXd::Identity(p, p);
  std::vector<jointgraph::BlockMatrix> gammas = omegas;
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < p; ++l) {
      if (j == l) continue;
      double mass = 0.0;
      for (const auto& o : omegas) mass += o.block_frobenius(std::min(j, l) + 1, std::max(j, l) + 1);
      theta(j, l) = std::sqrt(lambda * mass);
      for (auto& gm : gammas) {
        auto blk = gm.data().block(j * m, l * m, m, m);
        if (theta(j, l) > 0) blk /= theta(j, l); else blk.setZero();
      }
    }
  return {theta, gammas};
}

}  // namespace testsupport
