#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kernel_oracles.hpp"
#include "t2s/error.hpp"
#include "t2s/kernels.hpp"

namespace t2s::kernels {
namespace {

using testing::Grid;

Grid to_grid(const Matrix<double>& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

TEST(ColumnEnhance, WorkedExample) {
  RowVector<double> t(2);
  t << 1, 0;
  Matrix<double> c(2, 2);
  c << 1, 0, 0, 1;
  const auto w = AttentionWeights<double>::identity(2, 1);
  const Matrix<double> a = attention_weights<double>(t, c, w);
  EXPECT_NEAR(a(0, 0), 0.6698, 1e-4);
  EXPECT_NEAR(a(0, 1), 0.3302, 1e-4);
  const RowVector<double> out = column_enhance<double>(t, c, w);
  EXPECT_NEAR(out(0), 0.9810, 1e-4);
  EXPECT_NEAR(out(1), 0.1940, 1e-4);
}

TEST(ColumnEnhance, SingleKeyIsSelection) {
  RowVector<double> t(4);
  t << 1, 2, -1, 0.5;
  const Matrix<double> c = t;
  const RowVector<double> out = column_enhance<double>(t, c, AttentionWeights<double>::identity(4, 2));
  EXPECT_LT((out - t / t.norm()).norm(), 1e-12);
}

TEST(ColumnEnhance, Errors) {
  RowVector<double> t(2);
  t << 1, 0;
  EXPECT_THROW(column_enhance<double>(t, Matrix<double>(0, 2), AttentionWeights<double>::identity(2, 1)),
               ShapeError);
  EXPECT_THROW(column_enhance<double>(t, Matrix<double>::Ones(2, 3), AttentionWeights<double>::identity(2, 1)),
               ShapeError);
  EXPECT_THROW(AttentionWeights<double>::identity(3, 2), ShapeError);
}

TEST(ColumnEnhance, ZeroRowIsGuarded) {
  RowVector<double> t = RowVector<double>::Zero(2);
  auto w = AttentionWeights<double>::identity(2, 1);
  w.output.setZero();
  const RowVector<double> out = column_enhance<double>(t, Matrix<double>::Ones(1, 2), w);
  EXPECT_TRUE(out.allFinite());
  EXPECT_EQ(out.norm(), 0.0);
}

TEST(ColumnEnhance, MatchesNaiveReference) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  std::uniform_int_distribution<int> pick(1, 4);
  auto random = [&](Eigen::Index r, Eigen::Index c) {
    Matrix<double> m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index h = pick(rng), d = h * pick(rng), k = pick(rng);
    AttentionWeights<double> w;
    std::vector<Grid> wq, wk, wv;
    for (Eigen::Index j = 0; j < h; ++j) {
      w.query.push_back(random(d, d / h));
      w.key.push_back(random(d, d / h));
      w.value.push_back(random(d, d / h));
      wq.push_back(to_grid(w.query.back()));
      wk.push_back(to_grid(w.key.back()));
      wv.push_back(to_grid(w.value.back()));
    }
    w.output = random(d, d);
    const RowVector<double> t = random(1, d);
    const Matrix<double> c = random(k, d);
    const RowVector<double> got = column_enhance<double>(t, c, w);
    const auto want = testing::naive_column_enhance(to_grid(t)[0], to_grid(c), wq, wk, wv, to_grid(w.output));
    for (Eigen::Index j = 0; j < d; ++j) EXPECT_NEAR(got(j), want[j], 1e-9);
    EXPECT_NEAR(got.norm(), 1.0, 1e-9);
    const Matrix<double> a = attention_weights<double>(t, c, w);
    for (Eigen::Index j = 0; j < h; ++j) EXPECT_NEAR(a.row(j).sum(), 1.0, 1e-12);
  }
}

TEST(ClassifyHead, ZeroWeightsAreUniform) {
  HeadWeights<double> w{Matrix<double>::Zero(3, 2), RowVector<double>::Zero(2), Matrix<double>::Zero(2, 2),
                        RowVector<double>::Zero(2)};
  const auto p = classify_head<double>(RowVector<double>::Ones(3), w);
  EXPECT_DOUBLE_EQ(p.p0, 0.5);
  EXPECT_DOUBLE_EQ(p.p1, 0.5);
}

TEST(ClassifyHead, BiasOnly) {
  HeadWeights<double> w{Matrix<double>::Zero(3, 2), RowVector<double>::Zero(2), Matrix<double>::Zero(2, 2),
                        RowVector<double>::Zero(2)};
  w.b2 << 0, 10;
  const auto p = classify_head<double>(RowVector<double>::Ones(3), w);
  EXPECT_NEAR(p.p1, 1.0 / (1.0 + std::exp(-10.0)), 1e-15);
  EXPECT_NEAR(p.p0 + p.p1, 1.0, 1e-12);
}

TEST(ClassifyHead, ShapeMismatch) {
  HeadWeights<double> w{Matrix<double>::Zero(3, 2), RowVector<double>::Zero(2), Matrix<double>::Zero(2, 2),
                        RowVector<double>::Zero(2)};
  EXPECT_THROW(classify_head<double>(RowVector<double>::Ones(4), w), ShapeError);
}

TEST(FocalLoss, ClosedForms) {
  const FocalParams defaults{2.0, 0.75};
  EXPECT_EQ(focal_loss(1.0, 1, defaults), 0.0);
  EXPECT_NEAR(focal_loss(0.5, 1, defaults), 0.75 * 0.25 * std::log(2.0), 1e-12);
  EXPECT_NEAR(focal_loss(0.5, 1, defaults), 0.129966, 1e-6);
  EXPECT_NEAR(focal_loss(0.3, 0, FocalParams{0.0, 0.5}), -0.5 * std::log(0.7), 1e-15);
  EXPECT_NEAR(focal_loss(0.2, 0, defaults), -0.25 * 0.04 * std::log(0.8), 1e-15);
}

TEST(FocalLoss, DomainErrors) {
  EXPECT_THROW(focal_loss(0.0, 1, FocalParams{}), DomainError);
  EXPECT_THROW(focal_loss(1.0, 0, FocalParams{}), DomainError);
  EXPECT_THROW(focal_loss(0.5, 2, FocalParams{}), DomainError);
  EXPECT_THROW(focal_loss(0.5, 1, FocalParams{-1.0, 0.5}), DomainError);
  EXPECT_THROW(focal_loss(0.5, 1, FocalParams{2.0, 1.5}), DomainError);
}

TEST(FocalLoss, DecreasingInPt) {
  const FocalParams defaults{2.0, 0.75};
  double prev = focal_loss(0.01, 1, defaults);
  for (double p = 0.02; p < 1.0; p += 0.01) {
    const double cur = focal_loss(p, 1, defaults);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(MultitaskLoss, Examples) {
  const FocalParams defaults{2.0, 0.75};
  EXPECT_NEAR(multitask_loss<double>({0.5}, {1}, {{0.5, 0.5}}, {{1, 1}}, defaults), 0.259931, 1e-6);
  EXPECT_EQ(multitask_loss<double>({1.0, 0.0}, {1, 0}, {{1.0}, {0.0, 1.0}}, {{1}, {0, 1}}, defaults), 0.0);
  EXPECT_THROW(multitask_loss<double>({0.5}, {1}, {{0.5}}, {{1, 1}}, defaults), ShapeError);
}

TEST(MultitaskLoss, MatchesDoubleLoop) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::uniform_int_distribution<int> tables(1, 5), cols(0, 6);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> tp;
    std::vector<int> tl;
    Grid cp;
    std::vector<std::vector<int>> cl;
    for (int i = 0, n = tables(rng); i < n; ++i) {
      tp.push_back(u(rng));
      tl.push_back(coin(rng));
      cp.emplace_back();
      cl.emplace_back();
      for (int k = 0, m = cols(rng); k < m; ++k) {
        cp.back().push_back(u(rng));
        cl.back().push_back(coin(rng));
      }
    }
    EXPECT_NEAR(multitask_loss(tp, tl, cp, cl, FocalParams{2.0, 0.75}),
                testing::naive_multitask(tp, tl, cp, cl, 2.0, 0.75), 1e-12);
  }
}

TEST(RocAuc, Examples) {
  EXPECT_DOUBLE_EQ(roc_auc<double>({1, 0, 0}, {0.9, 0.8, 0.1}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc<double>({1, 0}, {0.4, 0.4}), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc<double>({1, 0, 1, 0}, {0.8, 0.7, 0.3, 0.2}), 0.75);
  EXPECT_THROW(roc_auc<double>({1, 1}, {0.1, 0.2}), DomainError);
  EXPECT_THROW(roc_auc<double>({1, 0}, {0.1}), ShapeError);
}

TEST(RocAuc, MatchesPairCountingAndNegation) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> len(2, 40), level(0, 20);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> y(static_cast<std::size_t>(len(rng)));
    std::vector<double> s(y.size()), neg(y.size()), mono(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = i < 2 ? static_cast<int>(i) : coin(rng);
      s[i] = level(rng) / 20.0;
      neg[i] = -s[i];
      mono[i] = std::exp(5 * s[i]) + 3;
    }
    const double a = roc_auc(y, s);
    EXPECT_NEAR(a, testing::pair_count_auc(y, s), 1e-12);
    EXPECT_NEAR(a, roc_auc(y, mono), 1e-12);
    EXPECT_NEAR(a + roc_auc(y, neg), 1.0, 1e-12);  // holds with ties too
  }
}

}  // namespace
}  // namespace t2s::kernels
