#include "krpd/datasets.hpp"
#include "krpd/depth.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace krpd;
using krpd::testing::gaussian_cloud;

TEST(Median, Examples) {
  EXPECT_DOUBLE_EQ(median(std::vector<double>{3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{7}), 7.0);
  EXPECT_THROW(median(std::vector<double>{}), std::invalid_argument);
  const std::vector<double> v{1, 2, 3, 4, 100};
  EXPECT_DOUBLE_EQ(mad(v), 1.0);
  EXPECT_DOUBLE_EQ(mad(std::vector<double>{-1, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(mad(std::vector<double>{5, 5, 5}), 0.0);
}

TEST(Median, MatchesSortOracle) {
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = std::floor(10.0 * rng.uniform());  // ties are common
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    const double oracle = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    ASSERT_DOUBLE_EQ(median(v), oracle);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(v[i] - oracle);
    std::sort(dev.begin(), dev.end());
    ASSERT_DOUBLE_EQ(mad(v), n % 2 ? dev[n / 2] : 0.5 * (dev[n / 2 - 1] + dev[n / 2]));
  }
}

TEST(Directions, UnitNormDeterministicAndIsotropic) {
  const DirectionSet a = sample_directions(5, 4000, 3);
  const DirectionSet b = sample_directions(5, 4000, 3);
  EXPECT_EQ(a.directions, b.directions);
  EXPECT_NE(sample_directions(5, 4000, 4).directions, a.directions);
  for (Eigen::Index l = 0; l < a.count(); ++l) ASSERT_NEAR(a.directions.row(l).norm(), 1.0, 1e-12);
  EXPECT_LT(a.directions.colwise().mean().norm(), 0.05);
  EXPECT_THROW(sample_directions(0, 3, 0), std::invalid_argument);
}

TEST(Directions, SmallerSampleIsAPrefix) {
  const DirectionSet big = sample_directions(3, 500, 9);
  const DirectionSet small = sample_directions(3, 120, 9);
  EXPECT_EQ(small.directions, big.directions.topRows(120));
}

TEST(Rpd, OneDimensionalExample) {
  RowMatrix x(3, 1);
  x << -1, 0, 1;
  const DepthScorer s = fit_rpd(x, 10, 0);
  RowMatrix q(3, 1);
  q << 0, 2, -3;
  const Vector o = s.outlyingness(q);
  EXPECT_NEAR(o(0), 0.0, 1e-15);
  EXPECT_NEAR(o(1), 2.0, 1e-15);
  EXPECT_NEAR(o(2), 3.0, 1e-15);
  const Vector d = depth(s, q);
  EXPECT_NEAR(d(0), 1.0, 1e-15);
  EXPECT_NEAR(d(1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(outlier_score(s, q)(2), -0.25, 1e-15);
}

TEST(Rpd, DegenerateAndTinyInputs) {
  EXPECT_THROW(fit_rpd(RowMatrix::Ones(10, 2), 50, 0), NumericalError);
  EXPECT_THROW(fit_rpd(RowMatrix::Ones(1, 2), 50, 0), DataError);
  const DepthScorer s = fit_rpd(gaussian_cloud(10, 2, 1), 5, 0);
  EXPECT_THROW(s.outlyingness(RowMatrix::Zero(1, 3)), DataError);
}

TEST(Rpd, InactiveDirectionsAreIgnored) {
  RowMatrix u(2, 2);
  u << 1, 0, 0, 1;
  Vector med(2), spread(2);
  med << 0, 0;
  spread << 1, 1e-30;
  const DepthScorer s(DirectionSet{u, 0}, med, spread, {true, false}, std::monostate{}, 2);
  RowMatrix q(1, 2);
  q << 2, 5;
  EXPECT_DOUBLE_EQ(s.outlyingness(q)(0), 2.0);
  EXPECT_EQ(s.n_active(), 1);
  EXPECT_DOUBLE_EQ(mad_threshold(0.5), 1e-12);
  EXPECT_DOUBLE_EQ(mad_threshold(1e4), 1e-8);
}

TEST(Rpd, AllDirectionsActiveForGenericCloud) {
  EXPECT_EQ(fit_rpd(gaussian_cloud(30, 2, 3), 200, 5).n_active(), 200);
}

TEST(Rpd, MatchesNaiveRecomputation) {
  const RowMatrix x = gaussian_cloud(50, 3, 2);
  const RowMatrix q = gaussian_cloud(20, 3, 3, 2.5);
  const DepthScorer s = fit_rpd(x, 64, 17);
  const RowMatrix& u = s.directions().directions;
  for (Eigen::Index m = 0; m < q.rows(); ++m) {
    double oracle = 0.0;
    for (Eigen::Index l = 0; l < u.rows(); ++l) {
      std::vector<double> p(50);
      for (Eigen::Index i = 0; i < 50; ++i) p[static_cast<std::size_t>(i)] = u.row(l).dot(x.row(i));
      const double med = median(p);
      const double spread = mad(p, med);
      oracle = std::max(oracle, std::abs(u.row(l).dot(q.row(m)) - med) / spread);
    }
    ASSERT_NEAR(s.outlyingness(q)(m), oracle, 1e-10 * std::max(1.0, oracle));
  }
}

TEST(Rpd, AffineInvarianceWithFixedDirections) {
  const RowMatrix x = gaussian_cloud(60, 2, 4);
  const RowMatrix q = gaussian_cloud(15, 2, 5, 3.0);
  const Eigen::RowVector2d shift(10.0, -4.0);
  for (double scale : {0.01, 3.0, 250.0}) {
    const DepthScorer a = fit_rpd(x, 100, 6);
    const DepthScorer b = fit_rpd(RowMatrix((scale * x).rowwise() + shift), 100, 6);
    ASSERT_EQ(a.directions().directions, b.directions().directions);
    const Vector oa = a.outlyingness(q);
    const Vector ob = b.outlyingness(RowMatrix((scale * q).rowwise() + shift));
    EXPECT_LE((oa - ob).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, oa.maxCoeff())) << "scale " << scale;
  }
}

TEST(Rpd, DepthRangeAndMonotoneInDirectionCount) {
  const RowMatrix x = gaussian_cloud(80, 3, 7);
  const RowMatrix q = gaussian_cloud(40, 3, 8, 2.0);
  Vector previous = Vector::Zero(40);
  for (Eigen::Index l : {1, 5, 50, 300}) {
    const DepthScorer s = fit_rpd(x, l, 21);
    const Vector o = s.outlyingness(q);
    const Vector d = depth(s, q);
    for (Eigen::Index m = 0; m < 40; ++m) {
      ASSERT_GE(o(m), previous(m));
      ASSERT_GT(d(m), 0.0);
      ASSERT_LE(d(m), 1.0);
    }
    previous = o;
  }
}

TEST(Rpd, DeterministicForFixedSeed) {
  const RowMatrix x = gaussian_cloud(30, 2, 9);
  EXPECT_EQ(fit_rpd(x, 40, 3).outlyingness(x), fit_rpd(x, 40, 3).outlyingness(x));
  EXPECT_NE(fit_rpd(x, 40, 3).outlyingness(x), fit_rpd(x, 40, 4).outlyingness(x));
}

TEST(Krpd, EqualsRpdOnKpcaCoordinates) {
  const RowMatrix x = gaussian_cloud(50, 2, 10);
  const RowMatrix q = gaussian_cloud(12, 2, 11, 3.0);
  const KernelSpec spec = KernelSpec::rbf(0.4);
  const DepthScorer k = fit_krpd(x, spec, 8, 200, 33);
  const KpcaModel kpca = fit_kpca(fit_gram(spec, x), 8);
  const DepthScorer r = fit_rpd(RowMatrix(kpca.train_embedding()), 200, 33);
  EXPECT_EQ(k.medians(), r.medians());
  EXPECT_EQ(k.mads(), r.mads());
  EXPECT_EQ(k.outlyingness(q), r.outlyingness(RowMatrix(kpca.transform(q))));
  EXPECT_EQ(k.space_dim(), 8);
  EXPECT_EQ(k.input_dim(), 2);
}

TEST(Krpd, RffVariantEqualsRpdOnFeatures) {
  const RowMatrix x = gaussian_cloud(40, 2, 12);
  const DepthScorer k = fit_krpd_rff(x, 0.5, 30, 100, 8);
  ASSERT_NE(k.rff(), nullptr);
  const RowMatrix z = rff_transform(*k.rff(), x);
  const DepthScorer r = fit_rpd(z, 100, 8);
  EXPECT_EQ(k.outlyingness(x), r.outlyingness(z));
}

TEST(Krpd, SeparatesUnimodalOutliers) {
  const DataCloud c = generate_toy(ToyKind::Unimodal, 1);
  const DepthScorer s = fit_krpd(c, KernelSpec::rbf(0.25), 100, 1000, 0);
  const Vector score = outlier_score(s, c.features());
  double in = 0, out = 0;
  for (Eigen::Index i = 0; i < 400; ++i) (i < 300 ? in : out) += score(i);
  EXPECT_GT(out / 100.0, in / 300.0);
}

TEST(Krpd, DuplicateCloudFails) {
  EXPECT_THROW(fit_krpd(RowMatrix::Ones(8, 2), KernelSpec::rbf(1.0), 3, 10, 0), NumericalError);
}
