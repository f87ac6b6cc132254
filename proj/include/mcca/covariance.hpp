#ifndef MCCA_COVARIANCE_HPP
#define MCCA_COVARIANCE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mcca/dataset.hpp"
#include "mcca/error.hpp"
#include "mcca/numerics.hpp"

namespace mcca {

struct Hyperparameters {
  int k = 1;             // projection dimension
  int r_components = 1;  // number of mixture components R
  double w_x = 0.0;      // ridge on the X auto-covariance
  double w_y = 0.0;      // ridge on the Y auto-covariance
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw usage_error("k must be >= 1");
    if (r_components < 1) throw usage_error("number of components must be >= 1");
    if (!(w_x >= 0.0) || !(w_y >= 0.0) || !std::isfinite(w_x) || !std::isfinite(w_y)) {
      throw usage_error("ridge regularizers must be finite and >= 0");
    }
  }

  void validate_for(const PairedDataset& data) const {
    validate();
    if (k > std::min(data.dim_x(), data.dim_y())) {
      throw usage_error("k=" + std::to_string(k) + " exceeds min(d_X, d_Y)=" +
                        std::to_string(std::min(data.dim_x(), data.dim_y())));
    }
  }
};

/// Weighted first and second moments of one mixture component. cxx and cyy
/// already include the ridge terms; cxy never does.
struct ComponentCovariances {
  Vector mu_x;
  Vector mu_y;
  Matrix cxx;
  Matrix cyy;
  Matrix cxy;
  double weight_sum = 0.0;
  double w_x = 0.0;
  double w_y = 0.0;
};

/// Weighted means and (cross-)covariances with 1 / sum(alpha) normalization,
/// then w_x I and w_y I added to the auto-covariances. Only points with
/// positive weight take part, in index order.
inline ComponentCovariances weighted_stats(const PairedDataset& data, const Eigen::Ref<const Vector>& alpha,
                                           double w_x, double w_y) {
  if (alpha.size() != data.size()) {
    throw usage_error("weight vector length " + std::to_string(alpha.size()) + " != dataset size " +
                      std::to_string(data.size()));
  }
  if (!(w_x >= 0.0) || !(w_y >= 0.0)) throw usage_error("ridge regularizers must be >= 0");
  std::vector<Index> support;
  double total = 0.0;
  for (Index i = 0; i < alpha.size(); ++i) {
    const double a = alpha(i);
    if (!std::isfinite(a) || a < 0.0) throw usage_error("weights must be finite and nonnegative");
    if (a > 0.0) {
      support.push_back(i);
      total += a;
    }
  }
  if (support.empty() || !(total > 0.0)) throw data_error("empty component: all weights are zero");

  const auto m = static_cast<Index>(support.size());
  Matrix xs(data.dim_x(), m);
  Matrix ys(data.dim_y(), m);
  Vector a(m);
  for (Index j = 0; j < m; ++j) {
    xs.col(j) = data.x.col(support[static_cast<std::size_t>(j)]);
    ys.col(j) = data.y.col(support[static_cast<std::size_t>(j)]);
    a(j) = alpha(support[static_cast<std::size_t>(j)]);
  }

  ComponentCovariances out;
  out.weight_sum = total;
  out.w_x = w_x;
  out.w_y = w_y;
  out.mu_x = (xs * a) / total;
  out.mu_y = (ys * a) / total;
  xs.colwise() -= out.mu_x;
  ys.colwise() -= out.mu_y;

  const Matrix xw = xs * a.asDiagonal();
  out.cxx = (xw * xs.transpose()) / total;
  out.cxy = (xw * ys.transpose()) / total;
  out.cyy = (ys * a.asDiagonal() * ys.transpose()) / total;
  out.cxx = 0.5 * (out.cxx + out.cxx.transpose());
  out.cyy = 0.5 * (out.cyy + out.cyy.transpose());
  out.cxx.diagonal().array() += w_x;
  out.cyy.diagonal().array() += w_y;
  return out;
}

}  // namespace mcca

#endif  // MCCA_COVARIANCE_HPP
