#ifndef MCCA_SYNTH_HPP
#define MCCA_SYNTH_HPP

// Two-view Gaussian mixtures with known per-component canonical structure.
//
// Within component r, with latent z ~ N(0, I_k) and orthonormal A_r, B_r:
//   x = A_r (sqrt(rho) z + sqrt(1 - rho) e_x) + (I - A_r A_r^T) g_x + m^X_r
//   y = B_r (s_r * sqrt(rho) z + sqrt(1 - rho) e_y) + (I - B_r B_r^T) g_y + m^Y_r
// so each view has identity within-component covariance and the canonical
// correlations along the k latent directions are exactly rho_r. In cancel
// mode all components share A and B and s_r alternates sign, which drives the
// pooled cross-covariance along those directions to zero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mcca/dataset.hpp"
#include "mcca/error.hpp"
#include "mcca/numerics.hpp"
#include "mcca/random.hpp"

namespace mcca {

struct SynthSpec {
  int r_components = 2;
  int d_x = 10;
  int d_y = 10;
  int k_true = 2;
  std::vector<double> rho{0.9};  // one value per component, or one shared value
  double mean_separation = 10.0;  // pairwise mean distance, in within-component std units
  int n_per_component = 1000;
  bool cancel = false;
  bool shared_directions = false;  // implied by cancel
  int label_bins = 0;  // > 0: emit labels binning the first latent coordinate
  std::uint64_t seed = 0;

  double rho_for(int r) const { return rho.size() == 1 ? rho.front() : rho[static_cast<std::size_t>(r)]; }

  void validate() const {
    if (r_components < 1) throw usage_error("synth: r_components must be >= 1");
    if (k_true < 1) throw usage_error("synth: k_true must be >= 1");
    if (k_true > std::min(d_x, d_y)) throw usage_error("synth: k_true exceeds min(d_x, d_y)");
    if (n_per_component < k_true + 1) throw usage_error("synth: n_per_component must be >= k_true + 1");
    if (rho.size() != 1 && rho.size() != static_cast<std::size_t>(r_components)) {
      throw usage_error("synth: rho needs 1 or r_components values");
    }
    for (double v : rho)
      if (!(v >= 0.0 && v < 1.0)) throw usage_error("synth: rho values must lie in [0, 1)");
    if (!(mean_separation >= 0.0) || !std::isfinite(mean_separation)) {
      throw usage_error("synth: mean_separation must be finite and >= 0");
    }
    if (label_bins < 0) throw usage_error("synth: label_bins must be >= 0");
  }
};

struct GroundTruth {
  std::vector<Matrix> a;      // d_x x k_true per component
  std::vector<Matrix> b;      // d_y x k_true per component
  std::vector<Vector> signs;  // s_r, k_true entries of +-1
  std::vector<double> rho;
  Matrix means_x;  // d_x x R
  Matrix means_y;  // d_y x R
  Matrix latent;   // k_true x N, z of every point (dataset column order)
};

struct SynthData {
  PairedDataset data;  // groups = generating component
  GroundTruth truth;
};

namespace detail {

inline Matrix component_means(int dim, int r_count, double separation, Rng& rng) {
  if (r_count == 1 || separation == 0.0) return Matrix::Zero(dim, r_count);
  Matrix dirs;
  if (r_count <= dim) {
    dirs = random_orthonormal(dim, r_count, rng);
  } else {
    dirs = gaussian_matrix(dim, r_count, rng);
    dirs.colwise().normalize();
  }
  // Orthonormal directions scaled by s / sqrt(2) are pairwise s apart.
  return dirs * (separation / std::sqrt(2.0));
}

// Cut points splitting N(0, 1) into `bins` equal-probability bins.
inline std::vector<double> normal_cut_points(int bins) {
  std::vector<double> cuts;
  for (int t = 1; t < bins; ++t) {
    const double p = static_cast<double>(t) / bins;
    double lo = -10.0;
    double hi = 10.0;
    for (int it = 0; it < 100; ++it) {  // bisection on the normal CDF
      const double mid = 0.5 * (lo + hi);
      if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid; else hi = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  return cuts;
}

}  // namespace detail

inline SynthData generate(const SynthSpec& spec) {
  spec.validate();
  const int r_count = spec.r_components;
  const Index k = spec.k_true;
  const Index n = spec.n_per_component;
  const Index total = n * r_count;

  SynthData out;
  GroundTruth& truth = out.truth;

  Rng shared_rng(derive_seed(spec.seed, stream_id("shared_directions")));
  const Matrix shared_a = random_orthonormal(spec.d_x, k, shared_rng);
  const Matrix shared_b = random_orthonormal(spec.d_y, k, shared_rng);
  Rng mean_rng(derive_seed(spec.seed, stream_id("means")));
  truth.means_x = detail::component_means(spec.d_x, r_count, spec.mean_separation, mean_rng);
  truth.means_y = detail::component_means(spec.d_y, r_count, spec.mean_separation, mean_rng);

  Matrix x(spec.d_x, total);
  Matrix y(spec.d_y, total);
  Matrix latent(k, total);
  std::vector<int> groups(static_cast<std::size_t>(total));

  for (int r = 0; r < r_count; ++r) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(r)));
    Matrix a = shared_a;
    Matrix b = shared_b;
    if (!spec.cancel && !spec.shared_directions) {
      a = random_orthonormal(spec.d_x, k, rng);
      b = random_orthonormal(spec.d_y, k, rng);
    }
    Vector s = Vector::Ones(k);
    if (spec.cancel && r % 2 == 1) s = -s;
    const double rho = spec.rho_for(r);

    const Matrix z = gaussian_matrix(k, n, rng);
    const Matrix ex = gaussian_matrix(k, n, rng);
    const Matrix ey = gaussian_matrix(k, n, rng);
    const Matrix gx = gaussian_matrix(spec.d_x, n, rng);
    const Matrix gy = gaussian_matrix(spec.d_y, n, rng);

    const Matrix lat_x = std::sqrt(rho) * z + std::sqrt(1.0 - rho) * ex;
    const Matrix lat_y = std::sqrt(rho) * (s.asDiagonal() * z) + std::sqrt(1.0 - rho) * ey;
    Matrix xr = a * lat_x + gx - a * (a.transpose() * gx);
    Matrix yr = b * lat_y + gy - b * (b.transpose() * gy);
    xr.colwise() += truth.means_x.col(r);
    yr.colwise() += truth.means_y.col(r);

    x.middleCols(r * n, n) = xr;
    y.middleCols(r * n, n) = yr;
    latent.middleCols(r * n, n) = z;
    std::fill(groups.begin() + r * n, groups.begin() + (r + 1) * n, r);

    truth.a.push_back(std::move(a));
    truth.b.push_back(std::move(b));
    truth.signs.push_back(std::move(s));
    truth.rho.push_back(rho);
  }

  // Interleave components with a seeded permutation.
  std::vector<Index> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng shuffle_rng(derive_seed(spec.seed, stream_id("shuffle")));
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(shuffle_rng)]);
  }

  PairedDataset& data = out.data;
  data.x.resize(spec.d_x, total);
  data.y.resize(spec.d_y, total);
  truth.latent.resize(k, total);
  std::vector<int> shuffled_groups(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) {
    const Index src = perm[static_cast<std::size_t>(i)];
    data.x.col(i) = x.col(src);
    data.y.col(i) = y.col(src);
    truth.latent.col(i) = latent.col(src);
    shuffled_groups[static_cast<std::size_t>(i)] = groups[static_cast<std::size_t>(src)];
  }
  data.groups = std::move(shuffled_groups);
  data.group_count = r_count;

  if (spec.label_bins > 0) {
    const std::vector<double> cuts = detail::normal_cut_points(spec.label_bins);
    std::vector<int> labels(static_cast<std::size_t>(total));
    for (Index i = 0; i < total; ++i) {
      const double z = truth.latent(0, i);
      labels[static_cast<std::size_t>(i)] = static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), z) - cuts.begin());
    }
    data.labels = std::move(labels);
  }
  return out;
}

}  // namespace mcca

#endif  // MCCA_SYNTH_HPP
