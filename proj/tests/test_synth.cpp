#include "oracles.hpp"
#include "test_util.hpp"

using mcca::Matrix;
using mcca::SynthSpec;
using mcca::Vector;

namespace {

mcca::CcaModel fit_on(const mcca::PairedDataset& d, const Vector& weights, int k) {
  return mcca::fit_cca(mcca::weighted_stats(d, weights, 0.0, 0.0), k);
}

Vector group_weights(const std::vector<int>& groups, int g) {
  Vector w = Vector::Zero(static_cast<mcca::Index>(groups.size()));
  for (std::size_t i = 0; i < groups.size(); ++i) w(static_cast<mcca::Index>(i)) = groups[i] == g ? 1.0 : 0.0;
  return w;
}

SynthSpec base_spec() {
  SynthSpec s;
  s.r_components = 2;
  s.d_x = 6;
  s.d_y = 5;
  s.k_true = 2;
  s.n_per_component = 10000;
  s.seed = 3;
  return s;
}

}  // namespace

TEST(Synth, ShapesAndGroups) {
  SynthSpec s = base_spec();
  s.n_per_component = 100;
  s.r_components = 3;
  const auto sd = mcca::generate(s);
  EXPECT_EQ(sd.data.x.rows(), 6);
  EXPECT_EQ(sd.data.y.rows(), 5);
  EXPECT_EQ(sd.data.size(), 300);
  EXPECT_EQ(*sd.data.group_count, 3);
  sd.data.validate();
  std::vector<int> counts(3, 0);
  for (int g : *sd.data.groups) ++counts[static_cast<std::size_t>(g)];
  EXPECT_EQ(counts, (std::vector<int>{100, 100, 100}));
  EXPECT_EQ(sd.truth.latent.cols(), 300);
  for (const auto& a : sd.truth.a) EXPECT_LE(testutil::max_abs(a.transpose() * a - Matrix::Identity(2, 2)), 1e-12);
  EXPECT_FALSE(sd.data.labels.has_value());
}

TEST(Synth, ZeroCorrelation) {
  SynthSpec s = base_spec();
  s.rho = {0.0};
  const auto sd = mcca::generate(s);
  for (int g = 0; g < 2; ++g) {
    EXPECT_LE(fit_on(sd.data, group_weights(*sd.data.groups, g), 1).correlations(0), 0.1);
  }
}

TEST(Synth, CancellationConstruction) {
  SynthSpec s = base_spec();
  s.rho = {0.9, 0.9};
  s.cancel = true;
  s.mean_separation = 0.0;
  const auto sd = mcca::generate(s);
  EXPECT_TRUE(sd.truth.signs[1] == -sd.truth.signs[0]);
  EXPECT_TRUE(sd.truth.a[0] == sd.truth.a[1]);
  EXPECT_LE(fit_on(sd.data, Vector::Ones(sd.data.size()), 1).correlations(0), 0.3);
  for (int g = 0; g < 2; ++g) {
    EXPECT_GE(fit_on(sd.data, group_weights(*sd.data.groups, g), 1).correlations(0), 0.85);
  }
}

TEST(Synth, IdenticalComponentsPoolCleanly) {
  SynthSpec s = base_spec();
  s.rho = {0.7};
  s.mean_separation = 0.0;
  s.shared_directions = true;
  const auto sd = mcca::generate(s);
  const double shared = fit_on(sd.data, Vector::Ones(sd.data.size()), 1).correlations(0);
  EXPECT_NEAR(shared, 0.7, 0.05);
  for (int g = 0; g < 2; ++g) {
    EXPECT_NEAR(fit_on(sd.data, group_weights(*sd.data.groups, g), 1).correlations(0), 0.7, 0.05);
  }
  EXPECT_TRUE(sd.truth.a[0] == sd.truth.a[1]);
  EXPECT_TRUE(sd.truth.signs[0] == sd.truth.signs[1]);

  // Component-specific directions dilute the pooled correlation instead.
  s.shared_directions = false;
  const auto distinct = mcca::generate(s);
  EXPECT_LT(fit_on(distinct.data, Vector::Ones(distinct.data.size()), 1).correlations(0), shared - 0.1);
}

TEST(Synth, OracleRecoversEachRho) {
  SynthSpec s = base_spec();
  s.rho = {0.9, 0.5};
  s.mean_separation = 5.0;
  const auto sd = mcca::generate(s);
  mcca::Hyperparameters h;
  h.k = 2;
  h.r_components = 2;
  const auto [model, report] = mcca::fit_mcca(sd.data, mcca::Assignment::from_labels(*sd.data.groups, 2), h);
  for (std::size_t r = 0; r < 2; ++r) {
    const auto& c = model.components[r].correlations;
    for (mcca::Index j = 0; j < 2; ++j) EXPECT_NEAR(c(j), s.rho[r], 0.05);
  }
}

TEST(Synth, WithinComponentCovarianceIsIdentity) {
  SynthSpec s = base_spec();
  s.rho = {0.6};
  s.mean_separation = 12.0;
  const auto sd = mcca::generate(s);
  const auto stats = mcca::weighted_stats(sd.data, group_weights(*sd.data.groups, 1), 0, 0);
  EXPECT_LE(testutil::max_abs(stats.cxx - Matrix::Identity(6, 6)), 0.06);
  EXPECT_LE((stats.mu_x - sd.truth.means_x.col(1)).norm(), 0.1);
  EXPECT_NEAR((sd.truth.means_x.col(0) - sd.truth.means_x.col(1)).norm(), 12.0, 1e-12);
}

TEST(Synth, NativeInitMatchesTruthWhenSeparated) {
  SynthSpec s = base_spec();
  s.n_per_component = 1000;
  s.mean_separation = 10.0;
  const auto sd = mcca::generate(s);
  mcca::Hyperparameters h;
  h.k = 2;
  h.r_components = 2;
  const auto a = mcca::init_assignments(sd.data, h, mcca::InitSpace::Native);
  EXPECT_GE(oracle::agreement(a.labels(), *sd.data.groups, 2), 0.99);
}

TEST(Synth, Deterministic) {
  SynthSpec s = base_spec();
  s.n_per_component = 200;
  s.label_bins = 3;
  const auto a = mcca::generate(s);
  const auto b = mcca::generate(s);
  EXPECT_TRUE(a.data.x == b.data.x);
  EXPECT_TRUE(a.data.y == b.data.y);
  EXPECT_EQ(*a.data.groups, *b.data.groups);
  EXPECT_EQ(*a.data.labels, *b.data.labels);
  s.seed = 4;
  EXPECT_FALSE(mcca::generate(s).data.x == a.data.x);
}

TEST(Synth, LabelBinsAreBalanced) {
  SynthSpec s = base_spec();
  s.n_per_component = 3000;
  s.label_bins = 4;
  const auto sd = mcca::generate(s);
  std::vector<int> counts(4, 0);
  for (int l : *sd.data.labels) ++counts[static_cast<std::size_t>(l)];
  for (int c : counts) EXPECT_NEAR(c, 1500, 150);
  const auto cuts = mcca::detail::normal_cut_points(4);
  EXPECT_NEAR(cuts[1], 0.0, 1e-12);
  EXPECT_NEAR(cuts[2], 0.6744897501960817, 1e-9);
}

TEST(Synth, InvalidSpecs) {
  auto kind = [](SynthSpec s) { return testutil::error_kind_of([&] { mcca::generate(s); }); };
  SynthSpec s = base_spec();
  s.rho = {1.0};
  EXPECT_EQ(kind(s), mcca::ErrorKind::Usage);
  s = base_spec();
  s.rho = {0.5, 0.5, 0.5};
  EXPECT_EQ(kind(s), mcca::ErrorKind::Usage);
  s = base_spec();
  s.k_true = 6;
  EXPECT_EQ(kind(s), mcca::ErrorKind::Usage);
  s = base_spec();
  s.n_per_component = 2;
  EXPECT_EQ(kind(s), mcca::ErrorKind::Usage);
  s = base_spec();
  s.mean_separation = -1;
  EXPECT_EQ(kind(s), mcca::ErrorKind::Usage);
}
