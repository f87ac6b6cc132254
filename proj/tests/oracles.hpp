#ifndef MCCA_TEST_ORACLES_HPP
#define MCCA_TEST_ORACLES_HPP

// Independent reference implementations used to check the library: plain
// loops, explicit sorts and exhaustive searches, sharing no code with it.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Best correlation for 2-D views with k=1 by scanning u over a grid of angles
// in [0, pi); for each u the optimal v has the closed form
// corr(u)^2 = (u' Cxy Cyy^-1 Cyx u) / (u' Cxx u).
inline double cca_angle_grid(const Eigen::Matrix2d& cxx, const Eigen::Matrix2d& cyy, const Eigen::Matrix2d& cxy,
                             int steps) {
  const Eigen::Matrix2d m = cxy * cyy.inverse() * cxy.transpose();
  double best = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = std::numbers::pi * i / steps;
    const Eigen::Vector2d u(std::cos(t), std::sin(t));
    const double num = u.dot(m * u);
    const double den = u.dot(cxx * u);
    if (den > 0.0) best = std::max(best, std::sqrt(std::max(0.0, num / den)));
  }
  return best;
}

// Ranks items by descending score, ties to the lower index, by insertion sort.
inline std::vector<int> ranking(const std::vector<double>& s) {
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    auto pos = order.begin();
    while (pos != order.end() && (s[static_cast<std::size_t>(*pos)] > s[static_cast<std::size_t>(i)] ||
                                  s[static_cast<std::size_t>(*pos)] == s[static_cast<std::size_t>(i)])) {
      ++pos;
    }
    order.insert(pos, i);
  }
  return order;
}

inline double recall(const std::vector<double>& s, const std::set<int>& rel, int cutoff) {
  const std::vector<int> order = ranking(s);
  int hits = 0;
  for (int i = 0; i < cutoff && i < static_cast<int>(order.size()); ++i) hits += rel.count(order[static_cast<std::size_t>(i)]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

inline double reciprocal_rank(const std::vector<double>& s, const std::set<int>& rel) {
  const std::vector<int> order = ranking(s);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (rel.count(order[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

// O(n^2) pair counting: wins + ties / 2 over all positive/negative pairs.
inline double auc(const std::vector<double>& s, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return 100.0 * wins / pairs;
}

// Fraction of points whose cluster id maps to the true id under the best
// one-to-one relabeling, by trying every permutation.
inline double agreement(const std::vector<int>& found, const std::vector<int>& truth, int r) {
  std::vector<int> perm(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < found.size(); ++i) hits += perm[static_cast<std::size_t>(found[i])] == truth[i] ? 1 : 0;
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(found.size());
}

}  // namespace oracle

#endif  // MCCA_TEST_ORACLES_HPP
