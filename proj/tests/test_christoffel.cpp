#include "support.hpp"

#include <cmath>
#include <random>

using namespace pellsos;
using namespace pellsos::testing;

namespace {
MomentMatrix<double> matrix_from(const Eigen::MatrixXd& e, int n, int t) {
  return {monomial_basis(n, t), from_eigen(e)};
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = z(rng);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(k, k);
}

// v^T M^{-1} v expanded directly from an explicit inverse.
Poly<double> direct_inverse_poly(const MomentMatrix<double>& m) {
  const Eigen::MatrixXd inv = to_eigen(m.entries).inverse();
  Poly<double> p(m.basis.front().dim());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      p.add_term(m.basis[i] + m.basis[j], inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  return p;
}
}  // namespace

TEST(ChristoffelInverse, Examples) {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  g(0, 0) = 1.0;
  g.bottomRightCorner<2, 2>() << 2.0, 0.5, 0.5, 1.0;
  const auto p = christoffel_inverse_poly(matrix_from(g, 2, 1));
  const Eigen::Matrix2d si = g.bottomRightCorner<2, 2>().inverse();
  Poly<double> expected = Poly<double>::constant(2, 1.0);
  expected.add_term(mi({2, 0}), si(0, 0));
  expected.add_term(mi({1, 1}), 2.0 * si(0, 1));
  expected.add_term(mi({0, 2}), si(1, 1));
  EXPECT_LE(max_abs_diff(p, expected), 1e-12);

  const auto iv = moment_sequence<Rational>(MeasureModel::interval(), 2);
  EXPECT_EQ(christoffel_inverse_poly(moment_matrix(iv, 1)), poly(1, {{{0}, "1"}, {{2}, "2"}}));

  const auto id = christoffel_inverse_poly(matrix_from(Eigen::Matrix3d::Identity(), 2, 1));
  EXPECT_LE(max_abs_diff(id, poly(2, {{{0, 0}, "1"}, {{2, 0}, "1"}, {{0, 2}, "1"}}).cast<double>()), 0.0);
}

TEST(ChristoffelInverse, SingularNamesPivot) {
  Eigen::Matrix2d m;
  m << 1.0, 1.0, 1.0, 1.0;
  try {
    christoffel_inverse_poly(matrix_from(m, 1, 1), "M_1(g)");
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.label(), "M_1(g)");
    EXPECT_EQ(e.pivot(), 1u);
    EXPECT_NE(std::string(e.what()).find("M_1(g)"), std::string::npos);
  }
  MomentSequence<Rational> bad(1, 2);
  bad[mi({0})] = Rational(1);
  bad[mi({2})] = Rational(-1);
  EXPECT_THROW(christoffel_inverse_poly(moment_matrix(bad, 1)), NotPositiveDefinite);
}

TEST(Orthonormal, IntervalMatchesChebyshev) {
  const auto phi = moment_sequence<double>(MeasureModel::interval(), 4);
  const auto b = orthonormal_basis(moment_matrix(phi, 2));
  const double r2 = std::sqrt(2.0);
  EXPECT_LE(max_abs_diff(b.polys[0], Poly<double>::constant(1, 1.0)), 1e-14);
  EXPECT_LE(max_abs_diff(b.polys[1], chebyshev(ChebyshevKind::first, 1).cast<double>() * r2), 1e-14);
  EXPECT_LE(max_abs_diff(b.polys[2], chebyshev(ChebyshevKind::first, 2).cast<double>() * r2), 1e-14);

  const auto g = poly(1, {{{0}, "1"}, {{2}, "-1"}});
  const auto bg = orthonormal_basis(localizing_matrix(phi, g, 1));
  EXPECT_LE(max_abs_diff(bg.polys[0], chebyshev(ChebyshevKind::second, 0).cast<double>() * r2), 1e-14);
  EXPECT_LE(max_abs_diff(bg.polys[1], chebyshev(ChebyshevKind::second, 1).cast<double>() * r2), 1e-14);
}

TEST(Orthonormal, IdentityGivesMonomials) {
  const auto b = orthonormal_basis(matrix_from(Eigen::MatrixXd::Identity(6, 6), 2, 2));
  for (std::size_t i = 0; i < b.basis.size(); ++i) EXPECT_EQ(b.polys[i], Poly<double>::monomial(b.basis[i]));
}

TEST(ChristoffelEval, Interval) {
  const auto m = moment_matrix(moment_sequence<double>(MeasureModel::interval(), 2), 1);
  const std::vector<double> zero{0.0}, one{1.0};
  EXPECT_NEAR(christoffel_eval(m, zero), 1.0, 1e-15);
  EXPECT_NEAR(christoffel_eval(m, one), 3.0, 1e-15);
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd a = random_spd(rng, 6);
  const std::vector<double> origin{0.0, 0.0};
  EXPECT_NEAR(christoffel_eval(matrix_from(a, 2, 2), origin), a.inverse()(0, 0), 1e-12);
}

TEST(Pstar, ConstantOneOnEquilibriumModels) {
  for (int t = 1; t <= 8; ++t) {
    const auto p = pstar_density(interval_set().set, moment_sequence<Rational>(MeasureModel::interval(), 2 * t), t);
    EXPECT_EQ(p, Poly<Rational>::constant(1, Rational(1))) << "t=" << t;
  }
  EXPECT_EQ(pstar_density(ball2d_set().set, moment_sequence<Rational>(MeasureModel::ball2d(), 2), 1),
            Poly<Rational>::constant(2, Rational(1)));
  EXPECT_EQ(pstar_density(simplex2d_set().set, moment_sequence<Rational>(MeasureModel::simplex2d(), 2), 1),
            Poly<Rational>::constant(2, Rational(1)));
}

TEST(WeakProbe, IntervalAndNormalization) {
  const auto x2 = poly(1, {{{2}, "1"}});
  for (double v : weak_convergence_probe(interval_set().set, MeasureModel::interval(), x2, {1, 2, 3, 4}))
    EXPECT_NEAR(v, 0.5, 1e-14);
  const auto one = Poly<Rational>::constant(2, Rational(1));
  for (double v : weak_convergence_probe(box2d_set().set, MeasureModel::box(2), one, {1, 2, 3}))
    EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(WeakProbe, TvScreenAgainstSolverLimitCandidate) {
  const auto tv = tvscreen_set().set;
  const auto ref = solve_set(tv, 6).phi;
  const auto x2 = poly(2, {{{2, 0}, "1"}});
  const auto probe = weak_convergence_probe(tv, ref, x2, {2, 3});
  const double target = riesz_apply(ref, x2);
  for (double v : probe) EXPECT_NEAR(v, target, 5e-2);
  EXPECT_LT(std::abs(probe[1] - probe[0]) / probe[0], 0.10);
}

TEST(ChristoffelProperty, CholeskyMatchesDirectInverse) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = matrix_from(random_spd(rng, 6), 2, 2);
    const auto p = christoffel_inverse_poly(m);
    EXPECT_LE(max_abs_diff(p, direct_inverse_poly(m)), 1e-10);
    const auto b = orthonormal_basis(m);
    Poly<double> sum(2);
    for (const auto& pa : b.polys) sum += pa * pa;
    EXPECT_LE(max_abs_diff(sum, p), 1e-10);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
      const std::vector<double> x{u(rng), u(rng)};
      EXPECT_NEAR(christoffel_eval(m, x), p.eval(std::span<const double>(x)), 1e-10 * std::max(1.0, p.eval(std::span<const double>(x))));
    }
  }
}

TEST(ChristoffelProperty, SumOfSquaresNonnegative) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto p = christoffel_inverse_poly(moment_matrix(moment_sequence<double>(MeasureModel::simplex2d(), 6), 3));
  for (int k = 0; k < 1000; ++k) {
    const std::vector<double> x{u(rng), u(rng)};
    EXPECT_GE(p.eval(std::span<const double>(x)), 0.0);
  }
}

TEST(ChristoffelProperty, TraceIdentityAndGram) {
  for (const auto& model : {MeasureModel::ball2d(), MeasureModel::simplex2d(), MeasureModel::box(2)})
    for (int t = 1; t <= 3; ++t) {
      const auto phi = moment_sequence<double>(model, 2 * t);
      const auto m = moment_matrix(phi, t);
      EXPECT_NEAR(riesz_apply(phi, christoffel_inverse_poly(m)), static_cast<double>(m.size()), 1e-10);
      const auto b = orthonormal_basis(m);
      const Eigen::MatrixXd gram = to_eigen(gram_matrix(phi, b.polys));
      EXPECT_LE((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-9);
    }
}
