#ifndef MCCA_DATASET_HPP
#define MCCA_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcca/error.hpp"
#include "mcca/numerics.hpp"

namespace mcca {

/// Two aligned views. Data points are columns: x is d_X x N, y is d_Y x N.
struct PairedDataset {
  Matrix x;
  Matrix y;
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<int>> groups;
  std::optional<int> group_count;

  Index size() const { return x.cols(); }
  Index dim_x() const { return x.rows(); }
  Index dim_y() const { return y.rows(); }

  /// Throws a data error if any invariant is violated.
  void validate() const {
    if (x.cols() < 1) throw data_error("dataset has no points");
    if (x.cols() != y.cols()) {
      throw data_error("view size mismatch: x has " + std::to_string(x.cols()) + " points, y has " +
                       std::to_string(y.cols()));
    }
    if (!x.allFinite() || !y.allFinite()) throw data_error("dataset contains non-finite values");
    const auto n = static_cast<std::size_t>(x.cols());
    if (labels && labels->size() != n) {
      throw data_error("labels length " + std::to_string(labels->size()) + " != " + std::to_string(n));
    }
    if (groups) {
      if (groups->size() != n) {
        throw data_error("groups length " + std::to_string(groups->size()) + " != " + std::to_string(n));
      }
      if (!group_count || *group_count < 1) throw data_error("groups given without a positive group_count");
      for (int g : *groups) {
        if (g < 0 || g >= *group_count) {
          throw data_error("group id " + std::to_string(g) + " outside [0, " + std::to_string(*group_count) + ")");
        }
      }
    }
  }
};

inline constexpr double kVarianceFloor = 1e-8;

/// Mean/std per feature for one standardization group.
struct ViewMoments {
  Vector mean;
  Vector stddev;  // 1 where the variance fell below the floor
};

struct GroupMoments {
  ViewMoments x;
  ViewMoments y;
};

struct StandardizationStats {
  /// Keyed by group id; a single entry with key 0 when no grouping was used.
  std::map<int, GroupMoments> groups;
  bool grouped = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline ViewMoments view_moments(const Matrix& view, const std::vector<Index>& cols, int group,
                                std::vector<std::string>& warnings, const char* view_name) {
  ViewMoments m;
  const auto n = static_cast<double>(cols.size());
  m.mean = Vector::Zero(view.rows());
  for (Index c : cols) m.mean += view.col(c);
  m.mean /= n;
  Vector var = Vector::Zero(view.rows());
  for (Index c : cols) var += (view.col(c) - m.mean).cwiseAbs2();
  var /= n;
  m.stddev.resize(view.rows());
  for (Index f = 0; f < view.rows(); ++f) {
    if (var(f) < kVarianceFloor) {
      m.stddev(f) = 1.0;
      warnings.push_back(std::string("group ") + std::to_string(group) + ", view " + view_name +
                         ", feature " + std::to_string(f) + ": variance below floor, centered only");
    } else {
      m.stddev(f) = std::sqrt(var(f));
    }
  }
  return m;
}

inline void apply_moments(Matrix& view, const std::vector<Index>& cols, const ViewMoments& m) {
  for (Index c : cols) view.col(c) = (view.col(c) - m.mean).cwiseQuotient(m.stddev);
}

inline std::map<int, std::vector<Index>> partition(Index n, const std::vector<int>* key) {
  std::map<int, std::vector<Index>> parts;
  for (Index i = 0; i < n; ++i) parts[key ? (*key)[static_cast<std::size_t>(i)] : 0].push_back(i);
  return parts;
}

}  // namespace detail

/// Applies previously computed stats (e.g. to held-out data). Every group in
/// `group_key` must have stats.
inline PairedDataset apply_standardization(const PairedDataset& data, const StandardizationStats& stats,
                                           const std::vector<int>* group_key = nullptr) {
  if (stats.grouped && group_key == nullptr) throw usage_error("stats are per-group but no group key given");
  if (group_key && group_key->size() != static_cast<std::size_t>(data.size())) {
    throw data_error("group key length does not match dataset size");
  }
  PairedDataset out = data;
  for (const auto& [g, cols] : detail::partition(data.size(), stats.grouped ? group_key : nullptr)) {
    const auto it = stats.groups.find(g);
    if (it == stats.groups.end()) throw data_error("no standardization stats for group " + std::to_string(g));
    if (it->second.x.mean.size() != data.dim_x() || it->second.y.mean.size() != data.dim_y()) {
      throw data_error("standardization stats dimension mismatch");
    }
    detail::apply_moments(out.x, cols, it->second.x);
    detail::apply_moments(out.y, cols, it->second.y);
  }
  return out;
}

/// Zero mean, unit (population) variance per feature, per group when a key is
/// given. Features with variance below 1e-8 are centered but not scaled.
inline std::pair<PairedDataset, StandardizationStats> standardize(const PairedDataset& data,
                                                                   const std::vector<int>* group_key = nullptr) {
  data.validate();
  if (group_key && group_key->size() != static_cast<std::size_t>(data.size())) {
    throw data_error("group key length does not match dataset size");
  }
  StandardizationStats stats;
  stats.grouped = group_key != nullptr;
  for (const auto& [g, cols] : detail::partition(data.size(), group_key)) {
    GroupMoments gm;
    gm.x = detail::view_moments(data.x, cols, g, stats.warnings, "x");
    gm.y = detail::view_moments(data.y, cols, g, stats.warnings, "y");
    stats.groups.emplace(g, std::move(gm));
  }
  PairedDataset out = apply_standardization(data, stats, group_key);
  return {std::move(out), std::move(stats)};
}

/// Stacks each frame with its w/2 neighbours on either side; frames beyond the
/// sequence edge are replicated from the nearest edge frame.
inline Matrix stack_context(const Matrix& frames, int window) {
  if (window < 1 || window % 2 == 0) {
    throw usage_error("stack_context: window must be odd and positive, got " + std::to_string(window));
  }
  if (frames.cols() < 1) throw data_error("stack_context: no frames");
  const Index d = frames.rows();
  const Index t_count = frames.cols();
  const Index half = window / 2;
  Matrix out(d * window, t_count);
  for (Index t = 0; t < t_count; ++t) {
    for (Index o = -half; o <= half; ++o) {
      const Index src = std::clamp<Index>(t + o, 0, t_count - 1);
      out.block((o + half) * d, t, d, 1) = frames.col(src);
    }
  }
  return out;
}

}  // namespace mcca

#endif  // MCCA_DATASET_HPP
