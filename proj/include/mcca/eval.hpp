#ifndef MCCA_EVAL_HPP
#define MCCA_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mcca/error.hpp"
#include "mcca/numerics.hpp"

namespace mcca {

// ---------------------------------------------------------------------------
// k-nearest-neighbour classification

enum class Distance { L2, Cosine };

inline std::string to_string(Distance d) { return d == Distance::L2 ? "l2" : "cosine"; }

struct KnnConfig {
  Distance metric = Distance::L2;
  int neighbors = 1;
  bool append_raw = false;  // consumed by callers that own the raw features
};

struct KnnResult {
  std::vector<int> predictions;
  double accuracy = 0.0;  // percent; 0 when no test labels are given
};

namespace detail {

inline Matrix unit_columns(const Matrix& m) {
  Matrix out = m;
  for (Index j = 0; j < out.cols(); ++j) {
    const double n = out.col(j).norm();
    if (n > 0.0) out.col(j) /= n;
  }
  return out;
}

}  // namespace detail

/// Exact brute-force kNN. Neighbours are ordered by (distance, train index).
/// The vote goes to the most frequent label; among tied labels, the one whose
/// closest neighbour is nearest wins.
inline KnnResult knn_classify(const Matrix& train, const std::vector<int>& train_labels, const Matrix& test,
                              const KnnConfig& config, const std::vector<int>* test_labels = nullptr) {
  const Index n_train = train.cols();
  if (n_train == 0) throw data_error("knn: empty train set");
  if (train_labels.size() != static_cast<std::size_t>(n_train)) throw data_error("knn: train label count mismatch");
  if (config.neighbors < 1) throw usage_error("knn: neighbors must be >= 1");
  if (config.neighbors > n_train) {
    throw usage_error("knn: neighbors=" + std::to_string(config.neighbors) + " exceeds train size " +
                      std::to_string(n_train));
  }
  if (test.rows() != train.rows()) throw data_error("knn: train/test dimension mismatch");
  if (test_labels && test_labels->size() != static_cast<std::size_t>(test.cols())) {
    throw data_error("knn: test label count mismatch");
  }

  const bool cosine = config.metric == Distance::Cosine;
  const Matrix ref = cosine ? detail::unit_columns(train) : train;
  const Matrix qry = cosine ? detail::unit_columns(test) : test;
  const auto k = static_cast<std::size_t>(config.neighbors);

  KnnResult out;
  out.predictions.resize(static_cast<std::size_t>(test.cols()));
  std::vector<Index> order(static_cast<std::size_t>(n_train));
  Vector dist(n_train);
  for (Index q = 0; q < qry.cols(); ++q) {
    if (cosine) {
      dist = (1.0 - (ref.transpose() * qry.col(q)).array()).matrix();
    } else {
      dist = (ref.colwise() - qry.col(q)).colwise().squaredNorm().transpose();
    }
    std::iota(order.begin(), order.end(), Index{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](Index a, Index b) { return dist(a) < dist(b) || (dist(a) == dist(b) && a < b); });

    // label -> (votes, rank of its nearest neighbour)
    std::map<int, std::pair<int, std::size_t>> votes;
    for (std::size_t rank = 0; rank < k; ++rank) {
      const int label = train_labels[static_cast<std::size_t>(order[rank])];
      auto [it, inserted] = votes.try_emplace(label, 0, rank);
      ++it->second.first;
    }
    int best_label = 0;
    int best_votes = -1;
    std::size_t best_rank = 0;
    for (const auto& [label, v] : votes) {
      if (v.first > best_votes || (v.first == best_votes && v.second < best_rank)) {
        best_label = label;
        best_votes = v.first;
        best_rank = v.second;
      }
    }
    out.predictions[static_cast<std::size_t>(q)] = best_label;
  }

  if (test_labels && !test_labels->empty()) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_labels->size(); ++i) correct += out.predictions[i] == (*test_labels)[i];
    out.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(test_labels->size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Representation blending

/// Per-block divisors for scale_and_concat, fitted on a reference set and
/// reusable on held-out data.
struct ConcatScaling {
  double norm_a = 1.0;
  double norm_b = 1.0;
};

inline double mean_column_norm(const Matrix& m) {
  if (m.cols() == 0) return 0.0;
  return m.colwise().norm().sum() / static_cast<double>(m.cols());
}

inline ConcatScaling fit_concat_scaling(const Matrix& ref_a, const Matrix& ref_b) {
  ConcatScaling s{mean_column_norm(ref_a), mean_column_norm(ref_b)};
  if (!(s.norm_a > 0.0) || !(s.norm_b > 0.0)) throw data_error("scale_and_concat: block with zero average norm");
  return s;
}

inline Matrix scale_and_concat(const Matrix& rep_a, const Matrix& rep_b, const ConcatScaling& scaling) {
  if (rep_a.cols() != rep_b.cols()) throw data_error("scale_and_concat: column count mismatch");
  if (!(scaling.norm_a > 0.0) || !(scaling.norm_b > 0.0)) throw data_error("scale_and_concat: zero scaling");
  Matrix out(rep_a.rows() + rep_b.rows(), rep_a.cols());
  out.topRows(rep_a.rows()) = rep_a / scaling.norm_a;
  out.bottomRows(rep_b.rows()) = rep_b / scaling.norm_b;
  return out;
}

/// Divides each block by its own mean column norm, then stacks them.
inline Matrix scale_and_concat(const Matrix& rep_a, const Matrix& rep_b) {
  if (rep_a.cols() != rep_b.cols()) throw data_error("scale_and_concat: column count mismatch");
  return scale_and_concat(rep_a, rep_b, fit_concat_scaling(rep_a, rep_b));
}

// ---------------------------------------------------------------------------
// Retrieval

/// Queries and items are columns. relevance[q] lists the relevant item
/// indices of query q.
struct RetrievalTask {
  Matrix queries;
  Matrix items;
  std::vector<std::vector<int>> relevance;

  void validate() const {
    if (queries.cols() == 0 || items.cols() == 0) throw data_error("retrieval task needs queries and items");
    if (queries.rows() != items.rows()) throw data_error("query/item dimension mismatch");
    if (relevance.size() != static_cast<std::size_t>(queries.cols())) {
      throw data_error("relevance lists (" + std::to_string(relevance.size()) + ") != queries (" +
                       std::to_string(queries.cols()) + ")");
    }
    for (std::size_t q = 0; q < relevance.size(); ++q) {
      if (relevance[q].empty()) throw data_error("query " + std::to_string(q) + " has no relevant items");
      for (int j : relevance[q]) {
        if (j < 0 || j >= items.cols()) throw data_error("query " + std::to_string(q) + ": relevant index out of range");
      }
    }
  }
};

/// Query vector = mean of its seed items' embeddings.
inline Matrix build_query_reps(const Matrix& item_embeddings, const std::vector<std::vector<int>>& seeds) {
  Matrix out(item_embeddings.rows(), static_cast<Index>(seeds.size()));
  for (std::size_t q = 0; q < seeds.size(); ++q) {
    if (seeds[q].empty()) throw data_error("query " + std::to_string(q) + " has an empty seed list");
    Vector acc = Vector::Zero(item_embeddings.rows());
    for (int j : seeds[q]) {
      if (j < 0 || j >= item_embeddings.cols()) throw data_error("query " + std::to_string(q) + ": seed index out of range");
      acc += item_embeddings.col(j);
    }
    out.col(static_cast<Index>(q)) = acc / static_cast<double>(seeds[q].size());
  }
  return out;
}

/// Queries and items each centered on their own set mean.
inline RetrievalTask center_reps(RetrievalTask task) {
  if (task.queries.cols() == 0 || task.items.cols() == 0) throw data_error("center_reps: empty query or item set");
  const Vector qm = task.queries.rowwise().mean();
  const Vector im = task.items.rowwise().mean();
  task.queries.colwise() -= qm;
  task.items.colwise() -= im;
  return task;
}

/// (1 + cos(h_i, u_j)) / 2 for every query/item pair. A zero-norm vector
/// scores 0.5 against everything; each one is reported in `warnings`.
inline Matrix score_pairs(const RetrievalTask& task, std::vector<std::string>* warnings = nullptr) {
  if (task.queries.rows() != task.items.rows()) throw data_error("query/item dimension mismatch");
  const Vector qn = task.queries.colwise().norm().transpose();
  const Vector in = task.items.colwise().norm().transpose();
  Matrix scores = task.queries.transpose() * task.items;
  for (Index i = 0; i < scores.rows(); ++i) {
    for (Index j = 0; j < scores.cols(); ++j) {
      if (qn(i) == 0.0 || in(j) == 0.0) {
        scores(i, j) = 0.5;
      } else {
        const double c = std::clamp(scores(i, j) / (qn(i) * in(j)), -1.0, 1.0);
        scores(i, j) = 0.5 * (1.0 + c);
      }
    }
  }
  if (warnings) {
    for (Index i = 0; i < qn.size(); ++i)
      if (qn(i) == 0.0) warnings->push_back("query " + std::to_string(i) + " has zero norm; scored 0.5");
    for (Index j = 0; j < in.size(); ++j)
      if (in(j) == 0.0) warnings->push_back("item " + std::to_string(j) + " has zero norm; scored 0.5");
  }
  return scores;
}

/// Item indices by descending score, ties by ascending index.
inline std::vector<Index> rank_items(const Eigen::Ref<const Vector>& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) > scores(b); });
  return order;
}

namespace detail {

inline void check_metric_inputs(const Matrix& scores, const std::vector<std::vector<int>>& relevance) {
  if (relevance.size() != static_cast<std::size_t>(scores.rows())) throw data_error("relevance/score row mismatch");
  if (scores.rows() == 0) throw data_error("no queries");
  for (std::size_t q = 0; q < relevance.size(); ++q) {
    if (relevance[q].empty()) throw data_error("query " + std::to_string(q) + " has no relevant items");
    for (int j : relevance[q])
      if (j < 0 || j >= scores.cols()) throw data_error("query " + std::to_string(q) + ": relevant index out of range");
  }
}

inline std::vector<bool> relevant_mask(const std::vector<int>& relevant, Index items) {
  std::vector<bool> mask(static_cast<std::size_t>(items), false);
  for (int j : relevant) mask[static_cast<std::size_t>(j)] = true;
  return mask;
}

}  // namespace detail

/// Mean over queries of |top-cutoff ∩ relevant| / |relevant|, in percent.
/// `scores` is queries x items.
inline double recall_at_k(const Matrix& scores, const std::vector<std::vector<int>>& relevance, int cutoff) {
  if (cutoff < 1) throw usage_error("recall cutoff must be >= 1");
  detail::check_metric_inputs(scores, relevance);
  double total = 0.0;
  for (Index q = 0; q < scores.rows(); ++q) {
    const auto& rel = relevance[static_cast<std::size_t>(q)];
    const auto mask = detail::relevant_mask(rel, scores.cols());
    const std::size_t relevant_count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    const auto order = rank_items(scores.row(q).transpose());
    const std::size_t top = std::min(order.size(), static_cast<std::size_t>(cutoff));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < top; ++i) hits += mask[static_cast<std::size_t>(order[i])];
    total += static_cast<double>(hits) / static_cast<double>(relevant_count);
  }
  return 100.0 * total / static_cast<double>(scores.rows());
}

/// Mean over queries of 1 / (1-based rank of the best-ranked relevant item).
inline double mean_reciprocal_rank(const Matrix& scores, const std::vector<std::vector<int>>& relevance) {
  detail::check_metric_inputs(scores, relevance);
  double total = 0.0;
  for (Index q = 0; q < scores.rows(); ++q) {
    const auto mask = detail::relevant_mask(relevance[static_cast<std::size_t>(q)], scores.cols());
    const auto order = rank_items(scores.row(q).transpose());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (mask[static_cast<std::size_t>(order[i])]) {
        total += 1.0 / static_cast<double>(i + 1);
        break;
      }
    }
  }
  return total / static_cast<double>(scores.rows());
}

/// Mann-Whitney AUC with midranks for ties, in percent.
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw data_error("roc_auc: score/label length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] != 0) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw data_error("roc_auc: needs at least one positive and one negative");
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return 100.0 * u / (p * static_cast<double>(negatives));
}

/// Per-query AUC (relevant items positive, the rest negative), macro-averaged.
inline double roc_auc(const Matrix& scores, const std::vector<std::vector<int>>& relevance) {
  detail::check_metric_inputs(scores, relevance);
  double total = 0.0;
  std::vector<double> row(static_cast<std::size_t>(scores.cols()));
  std::vector<int> labels(static_cast<std::size_t>(scores.cols()));
  for (Index q = 0; q < scores.rows(); ++q) {
    const auto mask = detail::relevant_mask(relevance[static_cast<std::size_t>(q)], scores.cols());
    for (Index j = 0; j < scores.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = scores(q, j);
      labels[static_cast<std::size_t>(j)] = mask[static_cast<std::size_t>(j)] ? 1 : 0;
    }
    total += roc_auc(std::span<const double>(row), std::span<const int>(labels));
  }
  return total / static_cast<double>(scores.rows());
}

struct RetrievalMetrics {
  double recall = 0.0;  // percent
  double mrr = 0.0;     // fraction
  double roc_auc = 0.0; // percent
};

/// Query reps from seeds, separate centering, cosine scoring, then metrics.
inline RetrievalMetrics evaluate_retrieval(const Matrix& item_embeddings, const std::vector<std::vector<int>>& seeds,
                                           const std::vector<std::vector<int>>& relevance, int cutoff,
                                           bool center = true, std::vector<std::string>* warnings = nullptr) {
  RetrievalTask task{build_query_reps(item_embeddings, seeds), item_embeddings, relevance};
  task.validate();
  if (center) task = center_reps(std::move(task));
  const Matrix scores = score_pairs(task, warnings);
  return {recall_at_k(scores, relevance, cutoff), mean_reciprocal_rank(scores, relevance), roc_auc(scores, relevance)};
}

}  // namespace mcca

#endif  // MCCA_EVAL_HPP
