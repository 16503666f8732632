#include <doctest.h>

#include "jointgraph/errors.hpp"
#include "jointgraph/evaluate.hpp"
#include "jointgraph/fpca.hpp"
#include "jointgraph/jfggm.hpp"
#include "jointgraph/rng.hpp"
#include "jointgraph/simulate.hpp"
#include "support.hpp"

using namespace jointgraph;
using Eigen::MatrixXd;

namespace {

SimConfig small_config(int p, double s, double rho, int K, int M = 3) {
  SimConfig c;
  c.p = p;
  c.s = s;
  c.rho = rho;
  c.K = K;
  c.M = M;
  return c;
}

bool block_nonzero(const BlockMatrix& a, int j, int l) { return a.block_frobenius(j, l) != 0.0; }

}  // namespace

TEST_CASE("rng draws") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    (void)c.next_u64();
  }
  CHECK(Rng(7).next_u64() != Rng(8).next_u64());

  Rng r(9);
  double sum = 0.0, sq = 0.0;
  std::vector<int> hist(7, 0);
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const double u = r.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    ++hist[r.below(7)];
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / kN) < 0.01);
  CHECK(std::abs(sq / kN - 1.0) < 0.02);
  for (int h : hist) CHECK(std::abs(h - kN / 7.0) < 5 * std::sqrt(kN / 7.0));
  CHECK(r.below(1) == 0);

  Rng s1 = Rng::substream(1, kStreamScores, 0, 0);
  Rng s2 = Rng::substream(1, kStreamScores, 0, 0);
  Rng s3 = Rng::substream(1, kStreamScores, 1, 0);
  Rng s4 = Rng::substream(1, kStreamNoise, 0, 0);
  const auto v1 = s1.next_u64();
  CHECK(v1 == s2.next_u64());
  CHECK(v1 != s3.next_u64());
  CHECK(v1 != s4.next_u64());
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(SimConfig{}.validate());
  CHECK_THROWS_AS(small_config(4, 0.01, 0, 3).validate(), ConfigError);  // rounds to no edges
  CHECK_THROWS_AS(small_config(5, 0.5, 1.0, 3).validate(), ConfigError);  // 5 + 15 > 10 pairs
  CHECK_THROWS_AS(small_config(10, 1.0, 0, 3).validate(), ConfigError);
  CHECK_THROWS_AS(small_config(10, 0.1, 1.5, 3).validate(), ConfigError);
  CHECK_THROWS_AS(small_config(10, 0.1, 0, 0).validate(), ConfigError);
  CHECK_THROWS_AS(small_config(10, 0.1, 0, 3, 4).validate(), ConfigError);  // trig has 3 functions
  SimConfig c;
  c.basis = "wavelet";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.sigma2 = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("edge set sizes") {
  SimConfig c = small_config(80, 0.05, 0.0, 3);
  CHECK(c.common_count() == 158);
  Rng rng(1);
  const EdgeSets sets = generate_edge_sets(c, rng);
  CHECK(sets.common.size() == 158);
  for (const auto& b : sets.individual) CHECK(b.empty());

  c.rho = 0.5;
  CHECK(c.individual_count() == 79);
}

TEST_CASE("edge set constraints over many seeds") {
  const SimConfig c = small_config(10, 0.2, 0.5, 3);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const EdgeSets sets = generate_edge_sets(c, rng);
    REQUIRE(sets.common.size() == 9);
    REQUIRE(sets.individual.size() == 3);
    for (const auto& e : sets.common) REQUIRE((e.first >= 1 && e.first < e.second && e.second <= 10));
    for (std::size_t k = 0; k < 3; ++k) {
      REQUIRE(sets.individual[k].size() == 5);
      for (const auto& e : sets.individual[k]) {
        REQUIRE(sets.common.count(e) == 0);
        for (std::size_t k2 = 0; k2 < 3; ++k2)
          if (k2 != k) REQUIRE(sets.individual[k2].count(e) == 0);
      }
    }
    REQUIRE(intersect(sets.individual).empty());
  }
}

TEST_CASE("precision matrix construction") {
  Rng rng(3);
  const BlockMatrix id = build_precision_matrix({}, 4, 2, rng);
  CHECK(id.data() == MatrixXd::Identity(8, 8));

  // A single edge: the normalised entry is 1/(1 + delta), which keeps it PD.
  const BlockMatrix one = build_precision_matrix({{1, 2}}, 2, 1, rng, 0.01);
  CHECK(one.data()(0, 1) == doctest::Approx(1.0 / 1.01));
  CHECK(one.data()(1, 0) == one.data()(0, 1));
  CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(one.data()).eigenvalues().minCoeff() > 0.0);

  CHECK_THROWS_AS(build_precision_matrix({{2, 2}}, 3, 1, rng), InputError);
  CHECK_THROWS_AS(build_precision_matrix({{1, 4}}, 3, 1, rng), InputError);
}

TEST_CASE("precision matrices are PD, dominant and carry the exact support") {
  const SimConfig c = small_config(10, 0.1, 1.0, 3, 2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng erng(seed), wrng(seed + 1000);
    const EdgeSets sets = generate_edge_sets(c, erng);
    for (int k = 0; k < 3; ++k) {
      EdgeSet full = sets.common;
      full.insert(sets.individual[k].begin(), sets.individual[k].end());
      const BlockMatrix o = build_precision_matrix(full, c.p, c.M, wrng);
      const MatrixXd& a = o.data();
      REQUIRE((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
      REQUIRE((a.diagonal().array() == 1.0).all());
      for (int r = 0; r < a.rows(); ++r) REQUIRE(a.row(r).cwiseAbs().sum() - 1.0 < 1.0);
      REQUIRE(Eigen::SelfAdjointEigenSolver<MatrixXd>(a).eigenvalues().minCoeff() > 0.0);
      for (int j = 1; j <= c.p; ++j)
        for (int l = j + 1; l <= c.p; ++l) {
          REQUIRE(block_nonzero(o, j, l) == (full.count({j, l}) == 1));
          const MatrixXd blk = o.block(j, l);
          REQUIRE((blk - blk(0, 0) * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
  }
}

TEST_CASE("curve synthesis") {
  SUBCASE("identity precision gives unit score covariance") {
    const int n = 10000;
    Rng sr(1), nr(2);
    const MatrixXd basis = evaluate_basis(make_basis("trig", 3, 0, 1), 0, 1, 20);
    const SimulatedGroup g = generate_curves(BlockMatrix::identity(2, 3), basis, n, 0.0, 0, 1, sr, nr);
    const MatrixXd& a = g.true_scores.scores;
    const MatrixXd cov = a.transpose() * a / n;
    CHECK((cov - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 3.0 / std::sqrt(n));
    // noiseless curves are exactly the basis expansion
    CHECK((g.panel.values[1] - a.middleCols(3, 3) * basis.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("constant basis gives constant curves") {
    Rng sr(3), nr(4);
    const MatrixXd basis = evaluate_basis(make_basis("trig", 1, 0, 1), 0, 1, 15);
    const SimulatedGroup g = generate_curves(BlockMatrix::identity(3, 1), basis, 5, 0.0, 0, 1, sr, nr);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 5; ++i)
        for (int q = 0; q < 15; ++q) CHECK(g.panel.values[j](i, q) == g.true_scores.scores(i, j));
  }
  SUBCASE("noise has the configured variance") {
    Rng sr(5), nr(6);
    const MatrixXd basis = evaluate_basis(make_basis("trig", 1, 0, 1), 0, 1, 200);
    const SimulatedGroup g = generate_curves(BlockMatrix::identity(1, 1), basis, 200, 0.05, 0, 1, sr, nr);
    const MatrixXd resid = g.panel.values[0].colwise() - g.true_scores.scores.col(0);
    CHECK(resid.squaredNorm() / resid.size() == doctest::Approx(0.05).epsilon(0.05));
  }
  SUBCASE("non-PD precision is rejected") {
    Rng sr(1), nr(2);
    MatrixXd bad = MatrixXd::Identity(2, 2);
    bad(0, 1) = bad(1, 0) = 1.5;
    CHECK_THROWS_AS(generate_curves(BlockMatrix(bad, 2, 1), MatrixXd::Ones(5, 1), 3, 0.0, 0, 1, sr, nr),
                    InputError);
  }
}

TEST_CASE("bases") {
  const MatrixXd trig = evaluate_basis(make_basis("trig", 3, 0, 1), 0, 1, 11);
  CHECK(trig(10, 1) == doctest::Approx(std::sin(1.0)));
  CHECK(trig(0, 2) == doctest::Approx(1.0));
  const int nu = 2001;
  const MatrixXd f = evaluate_basis(make_basis("fourier", 5, 0, 2), 0, 2, nu);
  // Trapezoid rule on [0, 2] of the Gram matrix: close to the identity.
  const double w = 2.0 / (nu - 1);
  MatrixXd gram = w * f.transpose() * f;
  gram -= 0.5 * w * (f.row(0).transpose() * f.row(0) + f.row(nu - 1).transpose() * f.row(nu - 1));
  CHECK((gram - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK_THROWS_AS(make_basis("trig", 4, 0, 1), ConfigError);
}

TEST_CASE("grid-orthonormal basis option") {
  SimConfig c = small_config(4, 0.5, 0.0, 1);
  c.basis = "trig_orth";
  c.sigma2 = 0.0;
  c.n = 30;
  const SimulatedDataset ds = simulate(c);
  const CurvePanel& p = ds.groups[0].panel;
  const double w = p.gap();
  const MatrixXd raw = evaluate_basis(make_basis("trig", 3, 0, 1), 0, 1, c.nu);
  const MatrixXd a = ds.groups[0].true_scores.scores.middleCols(0, 3);
  const MatrixXd g = p.values[0];
  // Solve g = a Phi' for Phi in the least-squares sense and check orthonormality.
  const MatrixXd phi = (a.colPivHouseholderQr().solve(g)).transpose();
  CHECK((w * phi.transpose() * phi - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  // Same span as the raw trig functions.
  const MatrixXd proj = raw * raw.colPivHouseholderQr().solve(phi);
  CHECK((proj - phi).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("simulate is deterministic and consistent") {
  SimConfig c = small_config(8, 0.2, 0.5, 2);
  c.n = 20;
  c.nu = 12;
  const SimulatedDataset a = simulate(c, 0), b = simulate(c, 0), other = simulate(c, 1);
  CHECK(a.truth.full == b.truth.full);
  for (int k = 0; k < 2; ++k) {
    CHECK(a.truth.omegas[k].data() == b.truth.omegas[k].data());
    for (int j = 0; j < c.p; ++j) CHECK(a.groups[k].panel.values[j] == b.groups[k].panel.values[j]);
    EdgeSet full = a.truth.common;
    full.insert(a.truth.individual[k].begin(), a.truth.individual[k].end());
    CHECK(a.truth.full[k] == full);
    CHECK(a.groups[k].panel.group_id == std::to_string(k + 1));
    CHECK(a.groups[k].panel.n() == 20);
    CHECK(a.groups[k].panel.nu() == 12);
  }
  CHECK(a.groups[0].panel.values[0] != other.groups[0].panel.values[0]);

  c.rho = 0.0;
  const SimulatedDataset same = simulate(c);
  CHECK(same.truth.full[0] == same.truth.full[1]);
}

TEST_CASE("end-to-end recovery beats chance") {
  SimConfig c = small_config(10, 0.1, 0.0, 3);
  c.seed = 11;
  const SimulatedDataset ds = simulate(c);
  JointProblem pr;
  for (const auto& g : ds.groups) pr.sigmas.push_back(estimate_sigma(g.panel, 3));
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.15 * i);
  const RocCurve curve = roc(
      {ds.truth.full}, c.p, [&](int, double lambda) { return fit(pr, lambda, lambda).edge_sets; }, grid);
  CHECK(curve.auc > 0.5);
}
