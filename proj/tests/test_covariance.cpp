#include "test_util.hpp"

using mcca::Matrix;
using mcca::PairedDataset;
using mcca::Vector;

namespace {

PairedDataset random_pair(mcca::Index n, std::uint64_t seed) {
  const Matrix z = testutil::random_matrix(2, n, seed);
  Matrix x = testutil::random_matrix(3, n, seed + 100);
  Matrix y = testutil::random_matrix(2, n, seed + 200);
  x.topRows(2) += z;
  y += z;
  x.array() += 2.0;
  return {x, y, {}, {}, {}};
}

void expect_same(const mcca::ComponentCovariances& a, const mcca::ComponentCovariances& b, double tol) {
  EXPECT_LE(testutil::max_abs(a.mu_x - b.mu_x), tol);
  EXPECT_LE(testutil::max_abs(a.mu_y - b.mu_y), tol);
  EXPECT_LE(testutil::max_abs(a.cxx - b.cxx), tol);
  EXPECT_LE(testutil::max_abs(a.cyy - b.cyy), tol);
  EXPECT_LE(testutil::max_abs(a.cxy - b.cxy), tol);
}

}  // namespace

TEST(WeightedStats, HandExample) {
  Matrix x(1, 3), y(1, 3);
  x << 1, 2, 3;
  y << 2, 4, 6;
  const auto s = mcca::weighted_stats({x, y, {}, {}, {}}, Vector::Ones(3), 0.0, 0.0);
  EXPECT_NEAR(s.cxy(0, 0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.cxx(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.cyy(0, 0), 8.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.mu_x(0), 2.0, 1e-15);
  EXPECT_EQ(s.weight_sum, 3.0);
}

TEST(WeightedStats, UniformWeightsMatchPlainCovariance) {
  const PairedDataset d = random_pair(50, 1);
  const auto s = mcca::weighted_stats(d, Vector::Ones(50), 0.0, 0.0);
  const Matrix xc = d.x.colwise() - d.x.rowwise().mean();
  const Matrix yc = d.y.colwise() - d.y.rowwise().mean();
  EXPECT_LE(testutil::max_abs(s.cxx - xc * xc.transpose() / 50.0), 1e-12);
  EXPECT_LE(testutil::max_abs(s.cxy - xc * yc.transpose() / 50.0), 1e-12);
  EXPECT_LE(testutil::max_abs(s.cyy - yc * yc.transpose() / 50.0), 1e-12);
}

TEST(WeightedStats, OneHotWeightGivesPointAndRidge) {
  const PairedDataset d = random_pair(10, 2);
  Vector a = Vector::Zero(10);
  a(4) = 1.0;
  const auto s = mcca::weighted_stats(d, a, 0.5, 0.25);
  EXPECT_TRUE(s.mu_x == d.x.col(4));
  EXPECT_TRUE(s.mu_y == d.y.col(4));
  EXPECT_LE(testutil::max_abs(s.cxx - 0.5 * Matrix::Identity(3, 3)), 0.0);
  EXPECT_LE(testutil::max_abs(s.cyy - 0.25 * Matrix::Identity(2, 2)), 0.0);
  EXPECT_LE(testutil::max_abs(s.cxy), 0.0);
}

TEST(WeightedStats, RidgeOnAutoCovariancesOnly) {
  const PairedDataset d = random_pair(30, 3);
  const auto plain = mcca::weighted_stats(d, Vector::Ones(30), 0.0, 0.0);
  const auto ridge = mcca::weighted_stats(d, Vector::Ones(30), 0.1, 0.2);
  EXPECT_LE(testutil::max_abs(ridge.cxx - plain.cxx - 0.1 * Matrix::Identity(3, 3)), 1e-15);
  EXPECT_LE(testutil::max_abs(ridge.cyy - plain.cyy - 0.2 * Matrix::Identity(2, 2)), 1e-15);
  EXPECT_TRUE(ridge.cxy == plain.cxy);
  EXPECT_GE(mcca::sym_eig(ridge.cxx).eigenvalues.minCoeff(), 0.1 - 1e-8);
  EXPECT_LE(testutil::max_abs(ridge.cxx - ridge.cxx.transpose()), 1e-10);
}

TEST(WeightedStats, ScaleInvariantInWeights) {
  const PairedDataset d = random_pair(40, 4);
  Vector a = (testutil::random_matrix(40, 1, 5).col(0).array().abs()).matrix();
  a(3) = 0.0;
  expect_same(mcca::weighted_stats(d, a, 0.01, 0.02), mcca::weighted_stats(d, 7.5 * a, 0.01, 0.02), 1e-12);
}

TEST(WeightedStats, DuplicationWithHalvedWeights) {
  const PairedDataset d = random_pair(25, 6);
  const Vector a = testutil::random_matrix(25, 1, 7).col(0).array().abs().matrix();
  PairedDataset dup{Matrix(3, 50), Matrix(2, 50), {}, {}, {}};
  dup.x << d.x, d.x;
  dup.y << d.y, d.y;
  Vector a2(50);
  a2 << 0.5 * a, 0.5 * a;
  expect_same(mcca::weighted_stats(d, a, 0.0, 0.0), mcca::weighted_stats(dup, a2, 0.0, 0.0), 1e-12);
}

TEST(WeightedStats, SwappedViewsTransposeCross) {
  const PairedDataset d = random_pair(20, 8);
  const Vector a = Vector::Ones(20);
  const auto xy = mcca::weighted_stats(d, a, 0.0, 0.0);
  const auto yx = mcca::weighted_stats({d.y, d.x, {}, {}, {}}, a, 0.0, 0.0);
  EXPECT_LE(testutil::max_abs(xy.cxy - yx.cxy.transpose()), 1e-15);
}

TEST(WeightedStats, Errors) {
  const PairedDataset d = random_pair(5, 9);
  const std::string msg = testutil::error_message_of([&] { mcca::weighted_stats(d, Vector::Zero(5), 0, 0); });
  EXPECT_NE(msg.find("empty component"), std::string::npos);
  Vector neg = Vector::Ones(5);
  neg(0) = -1;
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::weighted_stats(d, neg, 0, 0); }), mcca::ErrorKind::Usage);
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::weighted_stats(d, Vector::Ones(4), 0, 0); }),
            mcca::ErrorKind::Usage);
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::weighted_stats(d, Vector::Ones(5), -1, 0); }),
            mcca::ErrorKind::Usage);
}

TEST(Hyperparameters, Validation) {
  mcca::Hyperparameters h;
  h.validate();
  h.k = 0;
  EXPECT_EQ(testutil::error_kind_of([&] { h.validate(); }), mcca::ErrorKind::Usage);
  h.k = 3;
  const PairedDataset d = random_pair(10, 10);  // d_y = 2
  EXPECT_EQ(testutil::error_kind_of([&] { h.validate_for(d); }), mcca::ErrorKind::Usage);
  h.k = 2;
  h.w_x = -0.1;
  EXPECT_EQ(testutil::error_kind_of([&] { h.validate(); }), mcca::ErrorKind::Usage);
  h.w_x = 0;
  h.r_components = 0;
  EXPECT_EQ(testutil::error_kind_of([&] { h.validate(); }), mcca::ErrorKind::Usage);
}
