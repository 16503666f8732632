#include "jointgraph/simulate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "jointgraph/errors.hpp"

namespace jointgraph {

int SimConfig::common_count() const {
  return static_cast<int>(std::lround(s * static_cast<double>(pair_count(p))));
}

int SimConfig::individual_count() const {
  return static_cast<int>(std::lround(rho * static_cast<double>(common_count())));
}

void SimConfig::validate() const {
  if (p < 2) throw ConfigError("simulation needs p >= 2");
  if (n < 1) throw ConfigError("simulation needs n >= 1");
  if (K < 1) throw ConfigError("simulation needs K >= 1");
  if (M < 1) throw ConfigError("simulation needs M >= 1");
  if (nu < 2) throw ConfigError("simulation needs nu >= 2");
  if (M > nu) throw ConfigError("simulation needs M <= nu");
  if (!(s > 0 && s < 1)) throw ConfigError("s must lie in (0, 1)");
  if (!(rho >= 0 && rho <= 1)) throw ConfigError("rho must lie in [0, 1]");
  if (!(sigma2 >= 0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be >= 0");
  if (!(t_end > t_start)) throw ConfigError("t_end must exceed t_start");
  if (!(delta > 0)) throw ConfigError("delta must be positive");
  if (common_count() < 1) {
    throw ConfigError("s * C(p,2) rounds to zero common edges");
  }
  const long long need =
      common_count() + static_cast<long long>(K) * static_cast<long long>(individual_count());
  if (need > pair_count(p)) {
    throw ConfigError("infeasible edge budget: need " + std::to_string(need) + " of " +
                      std::to_string(pair_count(p)) + " pairs");
  }
  if (basis != "trig" && basis != "trig_orth" && basis != "fourier") {
    throw ConfigError("unknown basis '" + basis + "'");
  }
  if ((basis == "trig" || basis == "trig_orth") && M > 3) {
    throw ConfigError("the trig basis has only 3 functions");
  }
}

EdgeSets generate_edge_sets(const SimConfig& config, Rng& rng) {
  config.validate();
  std::vector<Edge> pool;
  pool.reserve(static_cast<std::size_t>(pair_count(config.p)));
  for (int j = 1; j <= config.p; ++j)
    for (int l = j + 1; l <= config.p; ++l) pool.push_back({j, l});

  // Partial Fisher-Yates: pool[0, used) is the sample drawn so far.
  std::size_t used = 0;
  auto draw = [&](int count) {
    EdgeSet out;
    for (int c = 0; c < count; ++c, ++used) {
      const std::size_t pick = used + rng.below(pool.size() - used);
      std::swap(pool[used], pool[pick]);
      out.insert(pool[used]);
    }
    return out;
  };

  EdgeSets sets;
  sets.common = draw(config.common_count());
  for (int k = 0; k < config.K; ++k) sets.individual.push_back(draw(config.individual_count()));
  return sets;
}

BlockMatrix build_precision_matrix(const EdgeSet& edges, int p, int M, Rng& rng, double delta) {
  const int d = p * M;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
  for (const auto& [j, l] : edges) {
    if (j < 1 || l > p || j >= l) throw InputError("edge outside the upper triangle of 1..p");
    const double weight = rng.uniform();
    a.block((j - 1) * M, (l - 1) * M, M, M) = weight * Eigen::MatrixXd::Identity(M, M);
  }
  const Eigen::MatrixXd b = 0.5 * (a + a.transpose());

  Eigen::VectorXd row_mass(d);
  for (int r = 0; r < d; ++r) row_mass(r) = b.row(r).cwiseAbs().sum() - std::abs(b(r, r));

  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      if (r == c || b(r, c) == 0.0) continue;
      // Both rows are nonzero here because b(r, c) != 0.
      omega(r, c) = b(r, c) / ((1.0 + delta) * std::max(row_mass(r), row_mass(c)));
    }
  }
  return BlockMatrix(std::move(omega), p, M);
}

std::vector<BasisFunction> make_basis(const std::string& name, int M, double t_start,
                                      double t_end) {
  std::vector<BasisFunction> out;
  if (name == "trig" || name == "trig_orth") {
    if (M > 3) throw ConfigError("the trig basis has only 3 functions");
    const std::vector<BasisFunction> all = {[](double) { return 1.0; },
                                            [](double t) { return std::sin(t); },
                                            [](double t) { return std::cos(t); }};
    out.assign(all.begin(), all.begin() + M);
  } else if (name == "fourier") {
    const double len = t_end - t_start;
    for (int m = 0; m < M; ++m) {
      if (m == 0) {
        out.push_back([len](double) { return 1.0 / std::sqrt(len); });
        continue;
      }
      const int freq = (m + 1) / 2;
      const bool use_sin = (m % 2) == 1;
      out.push_back([=](double t) {
        const double x = 2.0 * std::numbers::pi * freq * (t - t_start) / len;
        return std::sqrt(2.0 / len) * (use_sin ? std::sin(x) : std::cos(x));
      });
    }
  } else {
    throw ConfigError("unknown basis '" + name + "'");
  }
  return out;
}

Eigen::MatrixXd evaluate_basis(const std::vector<BasisFunction>& basis, double t_start,
                               double t_end, int nu) {
  Eigen::MatrixXd values(nu, static_cast<Eigen::Index>(basis.size()));
  const double w = (t_end - t_start) / (nu - 1);
  for (int q = 0; q < nu; ++q) {
    const double t = t_start + q * w;
    for (std::size_t m = 0; m < basis.size(); ++m) values(q, static_cast<Eigen::Index>(m)) = basis[m](t);
  }
  return values;
}

namespace {

// Columns rescaled so that w * Phi' Phi = I on the grid.
Eigen::MatrixXd orthonormalize_on_grid(const Eigen::MatrixXd& values, double w) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(std::sqrt(w) * values);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(values.rows(), values.cols());
  // Keep the orientation of the original functions.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(values.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index m = 0; m < values.cols(); ++m)
    if (r(m, m) < 0) q.col(m) = -q.col(m);
  return q / std::sqrt(w);
}

}  // namespace

SimulatedGroup generate_curves(const BlockMatrix& omega, const Eigen::MatrixXd& basis_values,
                               int n, double sigma2, double t_start, double t_end,
                               Rng& score_rng, Rng& noise_rng) {
  const int p = omega.p();
  const int M = omega.block_size();
  if (basis_values.cols() != M) throw InputError("basis size does not match block size");
  const Eigen::Index d = omega.dim();
  const Eigen::Index nu = basis_values.rows();

  Eigen::LLT<Eigen::MatrixXd> llt(omega.data());
  if (llt.info() != Eigen::Success) throw InputError("precision matrix is not positive definite");

  // a = L^{-T} z has covariance (L L')^{-1} = Omega^{-1}.
  Eigen::MatrixXd z(d, n);
  for (int i = 0; i < n; ++i)
    for (Eigen::Index r = 0; r < d; ++r) z(r, i) = score_rng.normal();
  const Eigen::MatrixXd a = llt.matrixU().solve(z);

  SimulatedGroup out;
  out.true_scores.p = p;
  out.true_scores.M = M;
  out.true_scores.scores = a.transpose();
  out.panel.t_start = t_start;
  out.panel.t_end = t_end;
  out.panel.values.reserve(p);

  const double sd = std::sqrt(sigma2);
  for (int j = 0; j < p; ++j) {
    Eigen::MatrixXd g = out.true_scores.scores.middleCols(static_cast<Eigen::Index>(j) * M, M) *
                        basis_values.transpose();
    if (sd > 0) {
      for (int i = 0; i < n; ++i)
        for (Eigen::Index q = 0; q < nu; ++q) g(i, q) += sd * noise_rng.normal();
    }
    out.panel.values.push_back(std::move(g));
  }
  return out;
}

SimulatedDataset simulate(const SimConfig& config, std::uint32_t replicate) {
  config.validate();
  SimulatedDataset out;
  out.config = config;

  Rng edge_rng = Rng::substream(config.seed, kStreamEdges, 0, replicate);
  EdgeSets sets = generate_edge_sets(config, edge_rng);
  out.truth.common = sets.common;
  out.truth.individual = sets.individual;

  Eigen::MatrixXd basis =
      evaluate_basis(make_basis(config.basis, config.M, config.t_start, config.t_end),
                     config.t_start, config.t_end, config.nu);
  if (config.basis == "trig_orth") {
    basis = orthonormalize_on_grid(basis, (config.t_end - config.t_start) / (config.nu - 1));
  }

  for (int k = 0; k < config.K; ++k) {
    EdgeSet full = sets.common;
    full.insert(sets.individual[k].begin(), sets.individual[k].end());
    out.truth.full.push_back(full);

    const auto group = static_cast<std::uint32_t>(k);
    Rng weight_rng = Rng::substream(config.seed, kStreamWeights, group, replicate);
    out.truth.omegas.push_back(build_precision_matrix(full, config.p, config.M, weight_rng, config.delta));

    Rng score_rng = Rng::substream(config.seed, kStreamScores, group, replicate);
    Rng noise_rng = Rng::substream(config.seed, kStreamNoise, group, replicate);
    SimulatedGroup g = generate_curves(out.truth.omegas.back(), basis, config.n, config.sigma2,
                                       config.t_start, config.t_end, score_rng, noise_rng);
    g.panel.group_id = std::to_string(k + 1);
    out.groups.push_back(std::move(g));
  }
  return out;
}

}  // namespace jointgraph
