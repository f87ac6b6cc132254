#ifndef MCCA_CCA_HPP
#define MCCA_CCA_HPP

#include <string>

#include "mcca/covariance.hpp"
#include "mcca/error.hpp"
#include "mcca/numerics.hpp"

namespace mcca {

enum class View { X, Y };

/// One linear CCA solution: projections u (d_X x k) and v (d_Y x k) with
/// u^T cxx u = v^T cyy v = I_k for the regularized covariances fitted on.
struct CcaModel {
  Matrix u;
  Matrix v;
  Vector center_x;
  Vector center_y;
  Vector correlations;  // descending
  Hyperparameters hyper;

  int k() const { return static_cast<int>(u.cols()); }
  const Matrix& projection(View view) const { return view == View::X ? u : v; }
  const Vector& center(View view) const { return view == View::X ? center_x : center_y; }
};

/// Solves CCA from covariance statistics: the top-k singular pairs of
/// T = cxx^{-1/2} cxy cyy^{-1/2}, mapped back through the inverse square roots.
inline CcaModel fit_cca(const ComponentCovariances& stats, int k, double eig_floor = kDefaultEigFloor) {
  const Index dx = stats.cxx.rows();
  const Index dy = stats.cyy.rows();
  if (k < 1 || k > std::min(dx, dy)) {
    throw usage_error("fit_cca: k=" + std::to_string(k) + " outside [1, min(d_X, d_Y)=" +
                      std::to_string(std::min(dx, dy)) + "]");
  }
  if (stats.cxy.rows() != dx || stats.cxy.cols() != dy) throw usage_error("fit_cca: cross-covariance shape mismatch");
  if (!stats.cxx.allFinite() || !stats.cyy.allFinite() || !stats.cxy.allFinite()) {
    throw numerical_error("fit_cca: covariance statistics are not finite (overflow?)");
  }

  const Matrix kx = inv_sqrt_psd(stats.cxx, eig_floor);
  const Matrix ky = inv_sqrt_psd(stats.cyy, eig_floor);
  const Matrix t = kx * stats.cxy * ky;
  if (!t.allFinite()) throw numerical_error("fit_cca: whitened cross-covariance is not finite");
  const SvdResult svd = svd_truncated(t, k);

  CcaModel model;
  model.u = kx * svd.u;
  model.v = ky * svd.v;
  model.correlations = svd.singular_values;
  model.center_x = stats.mu_x;
  model.center_y = stats.mu_y;
  model.hyper.k = k;
  model.hyper.r_components = 1;
  model.hyper.w_x = stats.w_x;
  model.hyper.w_y = stats.w_y;
  return model;
}

/// tr(u^T cxy v).
inline double cca_objective(const Matrix& u, const Matrix& v, const Matrix& cxy) {
  if (u.rows() != cxy.rows() || v.rows() != cxy.cols() || u.cols() != v.cols()) {
    throw usage_error("cca_objective: shape mismatch");
  }
  return (u.transpose() * cxy * v).trace();
}

/// k x M projection of the columns of `points`, optionally centered first.
inline Matrix project(const CcaModel& model, View view, const Matrix& points, bool centered) {
  const Matrix& w = model.projection(view);
  if (points.rows() != w.rows()) {
    throw data_error("project: point dimension " + std::to_string(points.rows()) + " != model dimension " +
                     std::to_string(w.rows()));
  }
  if (!centered) return w.transpose() * points;
  return w.transpose() * (points.colwise() - model.center(view));
}

}  // namespace mcca

#endif  // MCCA_CCA_HPP
