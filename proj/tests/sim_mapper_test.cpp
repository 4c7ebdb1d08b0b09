#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "vfsl/rng.hpp"
#include "vfsl/sim_mapper.hpp"

namespace vfsl {
namespace {

SimilarityMatrix sims(std::vector<std::vector<float>> rows) {
  SimilarityMatrix s;
  s.matrix = DenseMatrix::from_rows(rows);
  return s;
}

LabelVector labels(std::vector<std::uint32_t> l, std::size_t classes) {
  return LabelVector{std::move(l), classes};
}

oracle::Dense to_dense(const DenseMatrix& m) {
  oracle::Dense d(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) d.v[i] = m.data()[i];
  return d;
}

oracle::Dense to_dense(const MatrixD& m) {
  oracle::Dense d(m.rows(), m.cols());
  std::copy(m.values().begin(), m.values().end(), d.v.begin());
  return d;
}

// Random instance with every class present.
struct Instance {
  SimilarityMatrix l;
  LabelVector y;
};

Instance random_instance(Rng& rng, std::size_t max_n, std::size_t max_k, std::size_t max_c) {
  const std::size_t c = 1 + rng.below(max_c);
  const std::size_t n = c + rng.below(max_n - c + 1);
  const std::size_t k = 1 + rng.below(max_k);
  Instance inst;
  inst.l.matrix = DenseMatrix(n, k);
  for (std::size_t i = 0; i < inst.l.matrix.size(); ++i) {
    inst.l.matrix.data()[i] = static_cast<float>(2.0 * rng.uniform() - 1.0);
  }
  inst.y.num_classes = c;
  for (std::size_t j = 0; j < n; ++j) {
    inst.y.labels.push_back(static_cast<std::uint32_t>(j < c ? j : rng.below(c)));
  }
  return inst;
}

TEST(OneHot, Examples) {
  EXPECT_EQ(one_hot(labels({0, 1, 1}, 2)), MatrixD::from_rows({{1, 0}, {0, 1}, {0, 1}}));
  EXPECT_EQ(one_hot(labels({2}, 3)), MatrixD::from_rows({{0, 0, 1}}));
  EXPECT_EQ(one_hot(labels({0}, 1)), MatrixD::from_rows({{1}}));
}

TEST(Fit, IdentityInterpolatesAtZeroLambda) {
  const auto model = fit(sims({{1, 0}, {0, 1}}), labels({0, 1}, 2), {0.0});
  EXPECT_EQ(model.weights, MatrixD::identity(2));
  EXPECT_EQ(model.jitter_applied, 0.0);
}

TEST(Fit, IdentityHalvesAtUnitLambda) {
  const auto model = fit(sims({{1, 0}, {0, 1}}), labels({0, 1}, 2), {1.0});
  // Exact once rounded to the stored float precision.
  EXPECT_EQ(cast<float>(model.weights), DenseMatrix::from_rows({{0.5f, 0.0f}, {0.0f, 0.5f}}));
}

// Expected values computed with oracle::ridge_gradient_descent (gradient norm
// 1.5e-9 after 33 iterations); they also equal the hand solution
// [[3.2, -1], [0.1, 2.1]] / 3.41.
TEST(Fit, MatchesGradientDescentOracleOnSmallCase) {
  const auto l = sims({{1, 0}, {0, 1}, {1, 1}});
  const auto model = fit(l, labels({0, 1, 0}, 2), {0.1});
  const double expected[2][2] = {{0.938416423, -0.293255132}, {0.029325513, 0.615835777}};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(model.weights(r, c), expected[r][c], 1e-4);
  }

  const auto s = score(model, sims({{1, 0}}));
  EXPECT_NEAR(s.matrix(0, 0), 0.938416423, 1e-4);
  EXPECT_NEAR(s.matrix(0, 1), -0.293255132, 1e-4);
}

TEST(Fit, Errors) {
  try {
    fit(sims({{1, 0}}), labels({0, 1}, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  try {
    fit(sims({{1, 0}, {0, 1}}), labels({0, 0}, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyClass);
  }
  try {
    fit(sims({{1, 0}}), labels({0}, 1), {-1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Fit, ZeroMatrixAtZeroLambdaIsSingular) {
  try {
    fit(sims({{0, 0}, {0, 0}}), labels({0, 1}, 2), {0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(Fit, RankDeficientAtZeroLambdaRecoversWithJitter) {
  // Duplicate columns: L^T L is singular, the jittered retry succeeds.
  const auto model = fit(sims({{1, 1}, {0.5f, 0.5f}, {0.2f, 0.2f}}), labels({0, 1, 0}, 2), {0.0});
  EXPECT_GT(model.jitter_applied, 0.0);
  for (double w : model.weights.values()) EXPECT_TRUE(std::isfinite(w));
}

TEST(Fit, RankDeficientWithoutJitterIsSingular) {
  SolverConfig config{0.0, 0.0};
  try {
    fit(sims({{1, 1}, {0.5f, 0.5f}}), labels({0, 1}, 2), config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(Fit, PromptNamesCarriedIntoModel) {
  auto l = sims({{1, 0}, {0, 1}});
  l.prompt_names = std::vector<std::string>{"cat", "dog"};
  const auto model = fit(l, labels({0, 1}, 2));
  EXPECT_EQ(model.prompt_names, l.prompt_names);
  EXPECT_EQ(model.num_classes, 2u);
  EXPECT_EQ(model.lambda, 1.0);
}

TEST(Score, Examples) {
  MappingModel m;
  m.weights = MatrixD::identity(2);
  m.num_classes = 2;
  const auto s = score(m, sims({{0.2f, 0.9f}}));
  EXPECT_NEAR(s.matrix(0, 0), 0.2, 1e-7);
  EXPECT_NEAR(s.matrix(0, 1), 0.9, 1e-7);
  EXPECT_EQ(score(m, sims({{0, 0}})).matrix, MatrixD::from_rows({{0, 0}}));
  try {
    score(m, sims({{1, 2, 3}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Predict, ArgmaxWithLowestIndexTieBreak) {
  EXPECT_EQ(predict(ScoreMatrix{MatrixD::from_rows({{0.1, 0.9}})}).labels,
            std::vector<std::uint32_t>{1});
  EXPECT_EQ(predict(ScoreMatrix{MatrixD::from_rows({{0.5, 0.5}})}).labels,
            std::vector<std::uint32_t>{0});
  EXPECT_EQ(predict(ScoreMatrix{MatrixD::from_rows({{3, 1, 2}, {0, 0, 1}})}).labels,
            (std::vector<std::uint32_t>{0, 2}));
}

TEST(FitProperty, OracleEquivalenceAndStationarity) {
  Rng rng(99);
  const double lambdas[] = {0.01, 0.1, 1.0, 10.0};
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(rng, 24, 12, 5);
    const double lambda = lambdas[trial % 4];
    const auto model = fit(inst.l, inst.y, {lambda});

    const auto l = to_dense(inst.l.matrix);
    const auto y = oracle::one_hot(inst.y.labels, inst.y.num_classes);
    const auto gd = oracle::ridge_gradient_descent(l, y, lambda);
    ASSERT_LT(gd.gradient_norm, 1e-8);
    for (std::size_t i = 0; i < gd.w.v.size(); ++i) {
      ASSERT_NEAR(model.weights.data()[i], gd.w.v[i], 1e-4) << "trial " << trial;
    }

    const auto w = to_dense(model.weights);
    const auto residual = oracle::ridge_half_gradient(l, y, w, lambda);
    const auto lty = oracle::ridge_half_gradient(l, y, oracle::Dense(w.rows, w.cols), 0.0);
    EXPECT_LT(oracle::max_abs(residual), 1e-5 * std::max(1.0, oracle::max_abs(lty)));
  }
}

TEST(FitProperty, RegularizationShrinksWeights) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng, 30, 10, 4);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.001, 0.01, 0.1, 1.0, 10.0, 100.0}) {
      const auto w = to_dense(fit(inst.l, inst.y, {lambda}).weights);
      const double norm = oracle::frobenius(w);
      EXPECT_LE(norm, previous * (1.0 + 1e-12));
      previous = norm;
    }
  }
}

TEST(FitProperty, PositiveRowScalingKeepsPrediction) {
  Rng rng(8);
  const auto inst = random_instance(rng, 30, 10, 4);
  const auto model = fit(inst.l, inst.y);
  for (std::size_t i = 0; i < inst.l.rows(); ++i) {
    SimilarityMatrix row;
    row.matrix = DenseMatrix(1, inst.l.cols());
    for (std::size_t k = 0; k < inst.l.cols(); ++k) row.matrix(0, k) = inst.l.matrix(i, k);
    const auto base = score(model, row);
    const double factor = 0.25 + 4.0 * rng.uniform();
    SimilarityMatrix scaled = row;
    for (std::size_t k = 0; k < scaled.cols(); ++k) {
      scaled.matrix(0, k) = static_cast<float>(scaled.matrix(0, k) * factor);
    }
    const auto s = score(model, scaled);
    for (std::size_t c = 0; c < s.matrix.cols(); ++c) {
      // Scaling happens in float, so compare against the rounded input.
      EXPECT_NEAR(s.matrix(0, c), factor * base.matrix(0, c), 1e-5);
    }
    EXPECT_EQ(predict(s).labels, predict(base).labels);
  }
}

TEST(FitProperty, PromptPermutationEquivariance) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(rng, 30, 12, 4);
    const std::size_t k = inst.l.cols();
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    SimilarityMatrix permuted = inst.l;
    for (std::size_t i = 0; i < inst.l.rows(); ++i) {
      for (std::size_t j = 0; j < k; ++j) permuted.matrix(i, j) = inst.l.matrix(i, perm[j]);
    }
    const auto a = fit(inst.l, inst.y);
    const auto b = fit(permuted, inst.y);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t c = 0; c < inst.y.num_classes; ++c) {
        EXPECT_NEAR(b.weights(j, c), a.weights(perm[j], c), 1e-9);
      }
    }
    EXPECT_EQ(predict(score(a, inst.l)).labels, predict(score(b, permuted)).labels);
  }
}

TEST(Accuracy, Fraction) {
  EXPECT_DOUBLE_EQ(top1_accuracy(labels({0, 1, 1, 0}, 2), labels({0, 1, 0, 0}, 2)), 0.75);
}

}  // namespace
}  // namespace vfsl
