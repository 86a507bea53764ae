#include "krpd/jacobi.hpp"
#include "krpd/kernels.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace krpd;
using krpd::testing::gaussian_cloud;

TEST(KernelEval, RbfValues) {
  const std::vector<double> a{0, 0}, b{1, 0}, c{10, 10};
  const auto k = KernelSpec::rbf(1.0);
  EXPECT_DOUBLE_EQ(kernel_eval(k, a, a), 1.0);
  EXPECT_NEAR(kernel_eval(k, a, b), std::exp(-1.0), 1e-15);
  EXPECT_GT(kernel_eval(k, a, c), 0.0);
  EXPECT_NEAR(kernel_eval(k, a, c), std::exp(-200.0), 1e-300);
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::linear(), b, c), 10.0);
}

TEST(KernelEval, RejectsBadInput) {
  EXPECT_THROW(KernelSpec::rbf(0.0), std::invalid_argument);
  EXPECT_THROW(KernelSpec::rbf(-1.0), std::invalid_argument);
  const std::vector<double> a{0, 0}, b{1};
  EXPECT_THROW(kernel_eval(KernelSpec::rbf(1.0), a, b), DataError);
}

TEST(KernelFamily, NamesRoundTrip) {
  EXPECT_EQ(parse_kernel_family("rbf"), KernelFamily::Rbf);
  EXPECT_EQ(parse_kernel_family("linear"), KernelFamily::Linear);
  EXPECT_FALSE(parse_kernel_family("poly"));
}

TEST(Gram, SinglePoint) {
  RowMatrix x(1, 3);
  x << 1, 2, 3;
  const GramModel g = fit_gram(KernelSpec::rbf(0.5), x);
  EXPECT_EQ(g.gram().rows(), 1);
  EXPECT_DOUBLE_EQ(g.gram()(0, 0), 1.0);
  EXPECT_NEAR(g.centered_gram()(0, 0), 0.0, 1e-15);
}

TEST(Gram, MatchesPairwiseFormula) {
  const RowMatrix x = gaussian_cloud(40, 3, 1);
  const double gamma = 0.7;
  const GramModel g = fit_gram(KernelSpec::rbf(gamma), x);
  for (Eigen::Index i = 0; i < 40; ++i) {
    for (Eigen::Index j = 0; j < 40; ++j) {
      const double oracle = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      ASSERT_NEAR(g.gram()(i, j), oracle, 1e-14);
    }
    ASSERT_DOUBLE_EQ(g.gram()(i, i), 1.0);
  }
  EXPECT_EQ(g.gram(), g.gram().transpose());
}

TEST(Gram, CenteringMatchesProjectorFormula) {
  const RowMatrix x = gaussian_cloud(30, 2, 2);
  const GramModel g = fit_gram(KernelSpec::rbf(0.3), x);
  const Eigen::Index n = 30;
  const Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  const Matrix oracle = h * g.gram() * h;
  EXPECT_LE((g.centered_gram() - oracle).cwiseAbs().maxCoeff(), 1e-13);
}

class CenteredGramProperties : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(CenteredGramProperties, RowSumsIdempotencePsd) {
  const auto [n, gamma] = GetParam();
  const RowMatrix x = gaussian_cloud(n, 2, static_cast<std::uint64_t>(n), 1.5);
  const GramModel g = fit_gram(KernelSpec::rbf(gamma), x);
  const Matrix kc = g.centered_gram();

  EXPECT_LE(kc.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9 * n);
  EXPECT_LE(kc.colwise().sum().cwiseAbs().maxCoeff(), 1e-9 * n);

  // centring the centred matrix changes nothing
  const GramModel again(g.spec(), g.train_features(), kc, kc.rowwise().mean(), kc.mean());
  EXPECT_LE((again.centered_gram() - kc).cwiseAbs().maxCoeff(), 1e-12);

  const Vector ev = jacobi_eigen(kc).values;
  EXPECT_GE(ev.minCoeff(), -1e-8);
  EXPECT_LE((kc - kc.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Sizes, CenteredGramProperties,
                         ::testing::Combine(::testing::Values(5, 40, 120), ::testing::Values(1e-3, 0.25, 5.0)));

TEST(CrossGram, TrainingQueriesReproduceCenteredGram) {
  const RowMatrix x = gaussian_cloud(25, 3, 3);
  const GramModel g = fit_gram(KernelSpec::rbf(0.4), x);
  EXPECT_LE((g.cross_gram(x) - g.gram()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((g.cross_gram_centered(x) - g.centered_gram()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(CrossGram, OutOfSampleCenteringUsesTrainingStatistics) {
  const RowMatrix x = gaussian_cloud(20, 2, 4);
  const RowMatrix q = gaussian_cloud(7, 2, 5, 3.0);
  const GramModel g = fit_gram(KernelSpec::rbf(0.6), x);
  const Matrix kq = g.cross_gram(q);
  const Matrix kc = g.center_cross(kq);
  const Vector self = g.centered_self_kernel(q, kq);
  const Eigen::Index n = 20;
  // Explicit feature-space oracle with the linear kernel: centring == subtracting the training mean.
  const GramModel lin = fit_gram(KernelSpec::linear(), x);
  const Eigen::RowVectorXd mu = x.colwise().mean();
  const Matrix lin_c = lin.cross_gram_centered(q);
  for (Eigen::Index m = 0; m < q.rows(); ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      ASSERT_NEAR(lin_c(m, i), (q.row(m) - mu).dot(x.row(i) - mu), 1e-12);
    }
    // RBF: direct formula
    double oracle_self = 1.0 - 2.0 * kq.row(m).mean() + g.gram().mean();
    ASSERT_NEAR(self(m), oracle_self, 1e-14);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double oracle = kq(m, i) - kq.row(m).mean() - g.gram().row(i).mean() + g.gram().mean();
      ASSERT_NEAR(kc(m, i), oracle, 1e-14);
    }
  }
  EXPECT_THROW(g.cross_gram(RowMatrix::Zero(2, 3)), DataError);
}
