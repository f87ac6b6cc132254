#ifndef MCCA_CLUSTERING_HPP
#define MCCA_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mcca/error.hpp"
#include "mcca/numerics.hpp"
#include "mcca/random.hpp"

namespace mcca {

struct KMeansOptions {
  int max_iter = 300;
  /// Convergence threshold on total centroid movement, relative to the RMS
  /// distance of the points from their mean.
  double tol = 1e-6;
};

struct KMeansModel {
  Matrix centroids;  // d x r
  double inertia = 0.0;
  int iterations_run = 0;
  bool converged = false;
  std::vector<double> inertia_history;  // after each assignment step
};

struct KMeansResult {
  KMeansModel model;
  std::vector<int> assignments;
};

namespace detail {

inline double nearest_centroid(const Matrix& points, Index i, const Matrix& centroids, int& best) {
  double best_d = std::numeric_limits<double>::infinity();
  best = 0;
  for (Index j = 0; j < centroids.cols(); ++j) {
    const double d = (points.col(i) - centroids.col(j)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best_d;
}

inline Matrix kmeans_plus_plus(const Matrix& points, int r, Rng& rng) {
  const Index n = points.cols();
  Matrix centroids(points.rows(), r);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::uniform_int_distribution<Index> first(0, n - 1);
  Index pick = first(rng);
  chosen[static_cast<std::size_t>(pick)] = true;
  centroids.col(0) = points.col(pick);

  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (points.col(i) - centroids.col(0)).squaredNorm();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < r; ++c) {
    const double total = d2.sum();
    pick = -1;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // round-off at the top of the range
        for (Index i = n - 1; i >= 0; --i) {
          if (d2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining mass is zero (duplicate points): first unchosen index.
      for (Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    centroids.col(c) = points.col(pick);
    for (Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (points.col(i) - centroids.col(c)).squaredNorm());
  }
  return centroids;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeding. Clusters that go empty are
/// re-seeded at the point farthest from its current centroid.
inline KMeansResult kmeans_fit(const Matrix& points, int r, std::uint64_t seed, const KMeansOptions& options = {}) {
  const Index n = points.cols();
  if (r < 1) throw usage_error("kmeans: number of clusters must be >= 1");
  if (n < r) {
    throw usage_error("kmeans: " + std::to_string(n) + " points cannot form " + std::to_string(r) + " clusters");
  }
  if (options.max_iter < 1) throw usage_error("kmeans: max_iter must be >= 1");

  Rng rng(seed);
  KMeansResult result;
  KMeansModel& model = result.model;
  model.centroids = detail::kmeans_plus_plus(points, r, rng);

  const Vector mean = points.rowwise().mean();
  const double spread = std::sqrt((points.colwise() - mean).squaredNorm() / static_cast<double>(n));

  std::vector<int>& assign = result.assignments;
  assign.assign(static_cast<std::size_t>(n), 0);
  Vector d2(n);

  auto assignment_step = [&]() {
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      d2(i) = detail::nearest_centroid(points, i, model.centroids, assign[static_cast<std::size_t>(i)]);
      inertia += d2(i);
    }
    return inertia;
  };

  for (int iter = 0; iter < options.max_iter; ++iter) {
    double inertia = assignment_step();

    std::vector<Index> counts(static_cast<std::size_t>(r), 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < r; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || d2(i) > d2(far)) far = i;
      }
      if (far < 0) break;  // cannot happen while n >= r
      --counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      model.centroids.col(c) = points.col(far);
      inertia -= d2(far);
      d2(far) = 0.0;
    }
    model.inertia_history.push_back(inertia);

    Matrix updated = Matrix::Zero(points.rows(), r);
    for (Index i = 0; i < n; ++i) updated.col(assign[static_cast<std::size_t>(i)]) += points.col(i);
    for (int c = 0; c < r; ++c) updated.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    const double movement = std::sqrt((updated - model.centroids).squaredNorm());
    model.centroids = std::move(updated);
    model.iterations_run = iter + 1;
    if (movement <= options.tol * spread) {
      model.converged = true;
      break;
    }
  }

  // Final assignment against the final centroids. If that would empty a
  // cluster, keep the previous (non-empty) partition instead.
  const std::vector<int> previous = assign;
  model.inertia = assignment_step();
  std::vector<Index> counts(static_cast<std::size_t>(r), 0);
  for (int a : assign) ++counts[static_cast<std::size_t>(a)];
  if (std::find(counts.begin(), counts.end(), Index{0}) != counts.end()) {
    assign = previous;
    model.inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      model.inertia += (points.col(i) - model.centroids.col(assign[static_cast<std::size_t>(i)])).squaredNorm();
    }
  }
  model.inertia_history.push_back(model.inertia);
  return result;
}

}  // namespace mcca

#endif  // MCCA_CLUSTERING_HPP
