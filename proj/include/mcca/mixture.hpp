#ifndef MCCA_MIXTURE_HPP
#define MCCA_MIXTURE_HPP

// Mixture of CCA models: one (U_r, V_r) pair per component, fitted on hard
// point-to-component assignments, plus the single-view assignment rule used
// at test time.
//
// Training is a single pass: initialize the assignments by k-means (either on
// a global CCA projection or on the stacked native features), then solve each
// component's CCA exactly on its own points. The sum of per-component trace
// objectives tr(U_r^T C^XY_r V_r) is the quantity being maximized.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcca/cca.hpp"
#include "mcca/clustering.hpp"
#include "mcca/covariance.hpp"
#include "mcca/dataset.hpp"
#include "mcca/error.hpp"
#include "mcca/numerics.hpp"
#include "mcca/parallel.hpp"
#include "mcca/random.hpp"

namespace mcca {

/// N x R responsibilities; rows are one-hot throughout this library.
struct Assignment {
  Matrix alpha;

  Index size() const { return alpha.rows(); }
  int components() const { return static_cast<int>(alpha.cols()); }

  static Assignment from_labels(const std::vector<int>& labels, int r) {
    if (r < 1) throw usage_error("assignment needs at least one component");
    Assignment a;
    a.alpha = Matrix::Zero(static_cast<Index>(labels.size()), r);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= r) {
        throw data_error("component id " + std::to_string(labels[i]) + " at point " + std::to_string(i) +
                         " outside [0, " + std::to_string(r) + ")");
      }
      a.alpha(static_cast<Index>(i), labels[i]) = 1.0;
    }
    return a;
  }

  static Assignment single(Index n) { return from_labels(std::vector<int>(static_cast<std::size_t>(n), 0), 1); }

  /// Argmax component per point (lowest index on ties).
  std::vector<int> labels() const {
    std::vector<int> out(static_cast<std::size_t>(alpha.rows()), 0);
    for (Index i = 0; i < alpha.rows(); ++i) {
      Index best = 0;
      alpha.row(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
  }

  void validate(Index n) const {
    if (alpha.rows() != n) {
      throw data_error("assignment has " + std::to_string(alpha.rows()) + " rows for " + std::to_string(n) + " points");
    }
    for (Index i = 0; i < alpha.rows(); ++i) {
      if ((alpha.row(i).array() < 0.0).any() || !alpha.row(i).allFinite()) {
        throw data_error("assignment row " + std::to_string(i) + " has invalid weights");
      }
      if (std::abs(alpha.row(i).sum() - 1.0) > 1e-12) {
        throw data_error("assignment row " + std::to_string(i) + " does not sum to 1");
      }
    }
  }
};

enum class InitSpace { CcaProjection, Native };

inline std::string to_string(InitSpace space) {
  return space == InitSpace::CcaProjection ? "cca_projection" : "native";
}

enum class EmbeddingMode { Projection, Concatenation };

inline std::string to_string(EmbeddingMode mode) {
  return mode == EmbeddingMode::Projection ? "projection" : "concatenation";
}

struct MccaModel {
  std::vector<CcaModel> components;
  Vector pi;  // mixing fractions, sum to 1
  Hyperparameters hyper;
  bool centered = true;  // default for embeddings
  std::string init_space = "cca_projection";

  int r() const { return static_cast<int>(components.size()); }
  int k() const { return components.empty() ? 0 : components.front().k(); }
  Index dim(View view) const { return components.front().projection(view).rows(); }
};

struct TrainingReport {
  double objective = 0.0;
  std::vector<Vector> per_component_correlations;
  std::vector<Index> component_sizes;
  std::string init_space;
  std::vector<std::string> warnings;
};

struct AssignOptions {
  bool use_log_prior = true;  // subtract log(pi_r) from the score
};

/// Sum over components of tr(U_r^T C^XY_r V_r), with C^XY_r recomputed from
/// the data and alpha.
inline double mcca_objective(const std::vector<CcaModel>& models, const Assignment& alpha, const PairedDataset& data) {
  if (static_cast<int>(models.size()) != alpha.components()) {
    throw usage_error("mcca_objective: " + std::to_string(models.size()) + " models for " +
                      std::to_string(alpha.components()) + " assignment columns");
  }
  alpha.validate(data.size());
  double total = 0.0;
  for (std::size_t r = 0; r < models.size(); ++r) {
    const auto stats = weighted_stats(data, alpha.alpha.col(static_cast<Index>(r)), 0.0, 0.0);
    total += cca_objective(models[r].u, models[r].v, stats.cxy);
  }
  return total;
}

/// Hard initial assignments by k-means, either on [U^T(x - mu_x); V^T(y - mu_y)]
/// from one global CCA, or on the stacked raw views [x; y].
inline Assignment init_assignments(const PairedDataset& data, const Hyperparameters& hyper, InitSpace space) {
  data.validate();
  hyper.validate_for(data);
  if (data.size() < hyper.r_components) {
    throw usage_error("cannot form " + std::to_string(hyper.r_components) + " components from " +
                      std::to_string(data.size()) + " points");
  }
  if (hyper.r_components == 1) return Assignment::single(data.size());

  Matrix features;
  if (space == InitSpace::CcaProjection) {
    const Vector uniform = Vector::Ones(data.size());
    const CcaModel global = fit_cca(weighted_stats(data, uniform, hyper.w_x, hyper.w_y), hyper.k);
    features.resize(2 * hyper.k, data.size());
    features.topRows(hyper.k) = project(global, View::X, data.x, true);
    features.bottomRows(hyper.k) = project(global, View::Y, data.y, true);
  } else {
    features.resize(data.dim_x() + data.dim_y(), data.size());
    features.topRows(data.dim_x()) = data.x;
    features.bottomRows(data.dim_y()) = data.y;
  }
  const auto km = kmeans_fit(features, hyper.r_components, derive_seed(hyper.seed, stream_id("init_assignments")));
  return Assignment::from_labels(km.assignments, hyper.r_components);
}

/// Solves every component's CCA given alpha. Each solve is the global optimum
/// of that component's term of the objective.
inline std::pair<MccaModel, TrainingReport> fit_mcca(const PairedDataset& data, const Assignment& alpha,
                                                     const Hyperparameters& hyper) {
  data.validate();
  hyper.validate_for(data);
  alpha.validate(data.size());
  if (alpha.components() != hyper.r_components) {
    throw usage_error("assignment has " + std::to_string(alpha.components()) + " components, expected " +
                      std::to_string(hyper.r_components));
  }
  const auto r_count = static_cast<std::size_t>(hyper.r_components);

  TrainingReport report;
  report.init_space = "provided";
  report.component_sizes.resize(r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    const auto col = alpha.alpha.col(static_cast<Index>(r));
    const Index members = (col.array() > 0.0).count();
    report.component_sizes[r] = members;
    if (members == 0) throw data_error("empty component " + std::to_string(r));
    if (members < hyper.k) {
      report.warnings.push_back("component " + std::to_string(r) + " has " + std::to_string(members) +
                                " points, fewer than k=" + std::to_string(hyper.k));
    }
  }

  MccaModel model;
  model.hyper = hyper;
  model.components.resize(r_count);
  std::vector<double> objectives(r_count, 0.0);
  parallel_for(r_count, [&](std::size_t r) {
    const auto stats = weighted_stats(data, alpha.alpha.col(static_cast<Index>(r)), hyper.w_x, hyper.w_y);
    CcaModel cca = fit_cca(stats, hyper.k);
    cca.hyper = hyper;
    objectives[r] = cca_objective(cca.u, cca.v, stats.cxy);
    model.components[r] = std::move(cca);
  });

  model.pi = alpha.alpha.colwise().sum().transpose() / static_cast<double>(data.size());
  for (std::size_t r = 0; r < r_count; ++r) {
    report.objective += objectives[r];
    report.per_component_correlations.push_back(model.components[r].correlations);
  }
  return {std::move(model), std::move(report)};
}

/// init_assignments followed by fit_mcca.
inline std::pair<MccaModel, TrainingReport> train_mcca(const PairedDataset& data, const Hyperparameters& hyper,
                                                       InitSpace space) {
  const Assignment alpha = init_assignments(data, hyper, space);
  auto [model, report] = fit_mcca(data, alpha, hyper);
  model.init_space = to_string(space);
  report.init_space = to_string(space);
  return {std::move(model), std::move(report)};
}

/// argmin_r ||W_r^T (p - mu_r)||^2 - log(pi_r) over components with pi_r > 0,
/// where W is U (view X) or V (view Y). Ties go to the lowest index.
inline int assign_point(const MccaModel& model, View view, const Eigen::Ref<const Vector>& point,
                        const AssignOptions& options = {}) {
  if (model.components.empty()) throw usage_error("model has no components");
  if (point.size() != model.dim(view)) {
    throw data_error("point dimension " + std::to_string(point.size()) + " != model dimension " +
                     std::to_string(model.dim(view)));
  }
  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int r = 0; r < model.r(); ++r) {
    const double pi = model.pi(r);
    if (!(pi > 0.0)) continue;
    const CcaModel& c = model.components[static_cast<std::size_t>(r)];
    double score = (c.projection(view).transpose() * (point - c.center(view))).squaredNorm();
    if (options.use_log_prior) score -= std::log(pi);
    if (best < 0 || score < best_score) {
      best = r;
      best_score = score;
    }
  }
  if (best < 0) throw usage_error("model has no component with positive mixing weight");
  return best;
}

inline int assign_x(const MccaModel& model, const Eigen::Ref<const Vector>& x, const AssignOptions& options = {}) {
  return assign_point(model, View::X, x, options);
}

inline int assign_y(const MccaModel& model, const Eigen::Ref<const Vector>& y, const AssignOptions& options = {}) {
  return assign_point(model, View::Y, y, options);
}

inline std::vector<int> assign_all(const MccaModel& model, View view, const Matrix& points,
                                   const AssignOptions& options = {}) {
  std::vector<int> out(static_cast<std::size_t>(points.cols()));
  for (Index i = 0; i < points.cols(); ++i) out[static_cast<std::size_t>(i)] = assign_point(model, view, points.col(i), options);
  return out;
}

/// Embeds the columns of `points`.
///  projection:    k x M, U_{r_i}^T (p_i - c), r_i from `components` when
///                 given (oracle) or from the assignment rule otherwise;
///  concatenation: Rk x M, stacking U_r^T (p_i - c_r) for r = 0..R-1.
/// c is the component mean when `centered`, zero otherwise.
inline Matrix embed(const MccaModel& model, View view, const Matrix& points, EmbeddingMode mode, bool centered,
                    const std::vector<int>* components = nullptr, const AssignOptions& options = {}) {
  if (model.components.empty()) throw usage_error("model has no components");
  if (points.rows() != model.dim(view)) {
    throw data_error("point dimension " + std::to_string(points.rows()) + " != model dimension " +
                     std::to_string(model.dim(view)));
  }
  const Index k = model.k();
  const Index m = points.cols();
  if (mode == EmbeddingMode::Concatenation) {
    Matrix out(k * model.r(), m);
    for (int r = 0; r < model.r(); ++r) {
      out.middleRows(r * k, k) = project(model.components[static_cast<std::size_t>(r)], view, points, centered);
    }
    return out;
  }

  std::vector<int> chosen;
  if (components != nullptr) {
    if (components->size() != static_cast<std::size_t>(m)) {
      throw data_error("oracle assignment length " + std::to_string(components->size()) + " != " + std::to_string(m));
    }
    for (int c : *components) {
      if (c < 0 || c >= model.r()) throw data_error("oracle component id " + std::to_string(c) + " out of range");
    }
    chosen = *components;
  } else {
    chosen = assign_all(model, view, points, options);
  }
  // Same projection call as concatenation mode, so both agree bit for bit.
  Matrix out(k, m);
  for (int r = 0; r < model.r(); ++r) {
    if (std::find(chosen.begin(), chosen.end(), r) == chosen.end()) continue;
    const Matrix all = project(model.components[static_cast<std::size_t>(r)], view, points, centered);
    for (Index i = 0; i < m; ++i) {
      if (chosen[static_cast<std::size_t>(i)] == r) out.col(i) = all.col(i);
    }
  }
  return out;
}

struct PerplexityMatrix {
  Matrix rows;                   // L x R, row-normalized
  std::vector<bool> empty_rows;  // labels with no points (row left at zero)
};

/// Row l, column r: fraction of points with label l assigned to component r.
/// Labels are ids in [0, L) with L = max label + 1 unless given explicitly.
inline PerplexityMatrix perplexity_matrix(const MccaModel& model, const Matrix& x, const std::vector<int>& labels,
                                          const AssignOptions& options = {}, std::optional<int> label_count = {}) {
  if (labels.size() != static_cast<std::size_t>(x.cols())) throw data_error("labels length does not match points");
  if (labels.empty()) throw data_error("no labels");
  int l_count = 0;
  for (int l : labels) {
    if (l < 0) throw data_error("negative label id " + std::to_string(l));
    l_count = std::max(l_count, l + 1);
  }
  if (label_count) {
    if (*label_count < l_count) throw data_error("label id exceeds label count");
    l_count = *label_count;
  }
  const std::vector<int> assigned = assign_all(model, View::X, x, options);
  PerplexityMatrix out;
  out.rows = Matrix::Zero(l_count, model.r());
  for (std::size_t i = 0; i < labels.size(); ++i) out.rows(labels[i], assigned[i]) += 1.0;
  out.empty_rows.assign(static_cast<std::size_t>(l_count), false);
  for (Index l = 0; l < l_count; ++l) {
    const double total = out.rows.row(l).sum();
    if (total > 0.0) {
      out.rows.row(l) /= total;
    } else {
      out.empty_rows[static_cast<std::size_t>(l)] = true;
    }
  }
  return out;
}

inline PerplexityMatrix perplexity_matrix(const MccaModel& model, const PairedDataset& data,
                                          const AssignOptions& options = {}) {
  if (!data.labels) throw data_error("perplexity matrix needs labels");
  return perplexity_matrix(model, data.x, *data.labels, options);
}

}  // namespace mcca

#endif  // MCCA_MIXTURE_HPP
