#ifndef MCCA_COMMANDS_HPP
#define MCCA_COMMANDS_HPP

// The operations behind each `mcca` subcommand. Every command takes a fully
// populated config struct, writes its artifacts and returns what it computed
// so callers (the CLI, tests) can inspect results without re-reading files.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "mcca/archive.hpp"
#include "mcca/dataset.hpp"
#include "mcca/error.hpp"
#include "mcca/eval.hpp"
#include "mcca/matrix_io.hpp"
#include "mcca/mixture.hpp"
#include "mcca/parallel.hpp"
#include "mcca/synth.hpp"

namespace mcca::cli {

namespace fs = std::filesystem;

inline std::string format_double(double v) {
  std::string s;
  detail::append_double(s, v);
  return s;
}

inline std::string matrix_extension(MatrixFormat f) { return f == MatrixFormat::Csv ? ".csv" : ".mxb"; }

// ---------------------------------------------------------------------------
// synth

struct SynthConfig {
  SynthSpec spec;
  fs::path out_dir;
  MatrixFormat format = MatrixFormat::Binary;
};

inline SynthData cmd_synth(const SynthConfig& cfg, std::ostream& log) {
  SynthData out = generate(cfg.spec);
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw data_error("cannot create " + cfg.out_dir.string() + ": " + ec.message());

  const std::string ext = matrix_extension(cfg.format);
  write_points(cfg.out_dir / ("x" + ext), out.data.x);
  write_points(cfg.out_dir / ("y" + ext), out.data.y);
  write_ids(cfg.out_dir / "groups.csv", *out.data.groups);
  if (out.data.labels) write_ids(cfg.out_dir / "labels.csv", *out.data.labels);

  const SynthSpec& s = cfg.spec;
  nlohmann::ordered_json meta;
  meta["r_components"] = s.r_components;
  meta["d_x"] = s.d_x;
  meta["d_y"] = s.d_y;
  meta["k_true"] = s.k_true;
  meta["rho"] = out.truth.rho;
  meta["mean_separation"] = s.mean_separation;
  meta["n_per_component"] = s.n_per_component;
  meta["cancel"] = s.cancel;
  meta["label_bins"] = s.label_bins;
  meta["seed"] = s.seed;
  nlohmann::ordered_json signs = nlohmann::ordered_json::array();
  for (const Vector& sv : out.truth.signs) signs.push_back(std::vector<double>(sv.data(), sv.data() + sv.size()));
  meta["signs"] = signs;
  meta["shared_directions"] = s.cancel || s.shared_directions;
  detail::write_file(cfg.out_dir / "truth.json", meta.dump(2) + "\n");
  for (int r = 0; r < s.r_components; ++r) {
    write_matrix(cfg.out_dir / ("a_" + std::to_string(r) + ".mxb"), out.truth.a[static_cast<std::size_t>(r)],
                 MatrixFormat::Binary);
    write_matrix(cfg.out_dir / ("b_" + std::to_string(r) + ".mxb"), out.truth.b[static_cast<std::size_t>(r)],
                 MatrixFormat::Binary);
  }
  log << "synth: wrote " << out.data.size() << " points (" << s.r_components << " components) to "
      << cfg.out_dir.string() << "\n";
  return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainConfig {
  fs::path x;
  fs::path y;
  Hyperparameters hyper;
  InitSpace init = InitSpace::CcaProjection;
  std::optional<fs::path> oracle;  // groups file; bypasses k-means
  bool centered = true;
  fs::path model_dir;
};

inline PairedDataset load_paired(const fs::path& x, const fs::path& y) {
  PairedDataset data{load_points(x), load_points(y), {}, {}, {}};
  data.validate();
  return data;
}

inline void write_report(const fs::path& dir, const TrainingReport& report, const MccaModel& model) {
  std::string csv = "component,size,pi";
  for (int j = 0; j < model.k(); ++j) csv += ",corr_" + std::to_string(j + 1);
  csv += "\n";
  for (int r = 0; r < model.r(); ++r) {
    csv += std::to_string(r) + "," + std::to_string(report.component_sizes[static_cast<std::size_t>(r)]) + "," +
           format_double(model.pi(r));
    const Vector& c = report.per_component_correlations[static_cast<std::size_t>(r)];
    for (Index j = 0; j < c.size(); ++j) csv += "," + format_double(c(j));
    csv += "\n";
  }
  detail::write_file(dir / "report.csv", csv);

  std::string txt;
  txt += "init: " + report.init_space + "\n";
  txt += "components: " + std::to_string(model.r()) + ", k: " + std::to_string(model.k()) + "\n";
  txt += "w_x: " + format_double(model.hyper.w_x) + ", w_y: " + format_double(model.hyper.w_y) + "\n";
  txt += "objective: " + format_double(report.objective) + "\n";
  for (int r = 0; r < model.r(); ++r) {
    txt += "component " + std::to_string(r) + ": size " +
           std::to_string(report.component_sizes[static_cast<std::size_t>(r)]) + ", top correlation " +
           format_double(report.per_component_correlations[static_cast<std::size_t>(r)](0)) + "\n";
  }
  for (const auto& w : report.warnings) txt += "warning: " + w + "\n";
  detail::write_file(dir / "summary.txt", txt);
}

struct TrainResult {
  MccaModel model;
  TrainingReport report;
};

inline TrainResult train_from_data(const PairedDataset& data, const Hyperparameters& hyper, InitSpace init,
                                   const std::vector<int>* oracle, bool centered) {
  TrainResult out;
  if (oracle != nullptr) {
    if (oracle->size() != static_cast<std::size_t>(data.size())) {
      throw data_error("oracle groups length " + std::to_string(oracle->size()) + " != " + std::to_string(data.size()));
    }
    const Assignment alpha = Assignment::from_labels(*oracle, hyper.r_components);
    std::tie(out.model, out.report) = fit_mcca(data, alpha, hyper);
    out.model.init_space = "oracle";
    out.report.init_space = "oracle";
  } else {
    std::tie(out.model, out.report) = train_mcca(data, hyper, init);
  }
  out.model.centered = centered;
  return out;
}

inline TrainResult cmd_train(const TrainConfig& cfg, std::ostream& log) {
  const PairedDataset data = load_paired(cfg.x, cfg.y);
  std::optional<std::vector<int>> oracle;
  if (cfg.oracle) oracle = load_ids(*cfg.oracle);
  TrainResult out = train_from_data(data, cfg.hyper, cfg.init, oracle ? &*oracle : nullptr, cfg.centered);
  save_model(cfg.model_dir, out.model);
  write_report(cfg.model_dir, out.report, out.model);
  log << "train: R=" << out.model.r() << " k=" << out.model.k() << " init=" << out.report.init_space
      << " objective=" << format_double(out.report.objective) << "\n";
  for (const auto& w : out.report.warnings) log << "warning: " << w << "\n";
  return out;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedConfig {
  fs::path model_dir;
  fs::path input;
  View view = View::X;
  EmbeddingMode mode = EmbeddingMode::Concatenation;
  std::optional<bool> centered;  // defaults to the archive's flag
  std::optional<fs::path> oracle_assign;
  bool use_log_prior = true;
  fs::path out;
  std::optional<fs::path> assign_out;  // projection mode only
};

struct EmbedResult {
  Matrix embedding;          // (k or Rk) x M
  std::vector<int> assigned;  // projection mode
};

inline EmbedResult cmd_embed(const EmbedConfig& cfg, std::ostream& log) {
  const MccaModel model = load_model(cfg.model_dir);
  const Matrix points = load_points(cfg.input);
  const bool centered = cfg.centered.value_or(model.centered);
  const AssignOptions options{cfg.use_log_prior};

  EmbedResult out;
  if (cfg.mode == EmbeddingMode::Projection) {
    if (cfg.oracle_assign) {
      out.assigned = load_ids(*cfg.oracle_assign);
    } else {
      out.assigned = assign_all(model, cfg.view, points, options);
    }
    out.embedding = embed(model, cfg.view, points, cfg.mode, centered, &out.assigned, options);
    if (cfg.assign_out) write_ids(*cfg.assign_out, out.assigned);
  } else {
    out.embedding = embed(model, cfg.view, points, cfg.mode, centered);
  }
  write_points(cfg.out, out.embedding);
  log << "embed: " << points.cols() << " points -> " << out.embedding.rows() << " dims (" << to_string(cfg.mode)
      << ")\n";
  return out;
}

// ---------------------------------------------------------------------------
// eval-knn

struct EvalKnnConfig {
  fs::path train_emb;
  fs::path train_labels;
  fs::path test_emb;
  fs::path test_labels;
  std::vector<Distance> metrics{Distance::L2};
  std::vector<int> neighbors{1};
  std::vector<bool> append_raw{false};
  std::optional<fs::path> train_raw;
  std::optional<fs::path> test_raw;
  fs::path out;
};

struct KnnRow {
  Distance metric;
  int neighbors;
  bool append_raw;
  double accuracy;
};

/// Runs every (metric, neighbors, append_raw) combination. Raw features are
/// blended with the embedding through scale_and_concat, with the scaling
/// fitted on the training set.
inline std::vector<KnnRow> knn_grid(const Matrix& train, const std::vector<int>& train_labels, const Matrix& test,
                                    const std::vector<int>& test_labels, const std::vector<Distance>& metrics,
                                    const std::vector<int>& neighbors, const std::vector<bool>& append_raw,
                                    const Matrix* train_raw, const Matrix* test_raw) {
  if (test.cols() == 0) throw data_error("empty test set");
  std::vector<KnnRow> rows;
  for (bool raw : append_raw) {
    Matrix tr = train;
    Matrix te = test;
    if (raw) {
      if (train_raw == nullptr || test_raw == nullptr) throw usage_error("append_raw needs raw train and test features");
      const ConcatScaling scaling = fit_concat_scaling(train, *train_raw);
      tr = scale_and_concat(train, *train_raw, scaling);
      te = scale_and_concat(test, *test_raw, scaling);
    }
    for (Distance metric : metrics) {
      for (int nb : neighbors) {
        const KnnResult r = knn_classify(tr, train_labels, te, KnnConfig{metric, nb, raw}, &test_labels);
        rows.push_back({metric, nb, raw, r.accuracy});
      }
    }
  }
  return rows;
}

inline std::vector<KnnRow> cmd_eval_knn(const EvalKnnConfig& cfg, std::ostream& log) {
  const Matrix train = load_points(cfg.train_emb);
  const Matrix test = load_points(cfg.test_emb);
  const auto train_labels = load_ids(cfg.train_labels);
  const auto test_labels = load_ids(cfg.test_labels);
  if (train_labels.size() != static_cast<std::size_t>(train.cols())) throw data_error("train label count mismatch");
  if (test_labels.size() != static_cast<std::size_t>(test.cols())) throw data_error("test label count mismatch");
  std::optional<Matrix> train_raw;
  std::optional<Matrix> test_raw;
  if (cfg.train_raw) train_raw = load_points(*cfg.train_raw);
  if (cfg.test_raw) test_raw = load_points(*cfg.test_raw);

  const auto rows = knn_grid(train, train_labels, test, test_labels, cfg.metrics, cfg.neighbors, cfg.append_raw,
                             train_raw ? &*train_raw : nullptr, test_raw ? &*test_raw : nullptr);
  std::string csv = "metric,neighbors,append_raw,accuracy\n";
  for (const auto& r : rows) {
    csv += to_string(r.metric) + "," + std::to_string(r.neighbors) + "," + (r.append_raw ? "1" : "0") + "," +
           format_double(r.accuracy) + "\n";
  }
  detail::write_file(cfg.out, csv);
  log << "eval-knn: " << rows.size() << " configurations written to " << cfg.out.string() << "\n";
  return rows;
}

// ---------------------------------------------------------------------------
// eval-retrieval

struct EvalRetrievalConfig {
  fs::path items;  // item embeddings, one item per row
  fs::path seeds;  // per query: comma-separated seed item indices
  fs::path relevance;
  std::vector<int> cutoffs{1000};
  bool center = true;
  std::vector<bool> append_raw{false};
  std::optional<fs::path> items_raw;
  fs::path out;
};

struct RetrievalRow {
  int cutoff;
  bool append_raw;
  RetrievalMetrics metrics;
};

inline std::vector<RetrievalRow> cmd_eval_retrieval(const EvalRetrievalConfig& cfg, std::ostream& log) {
  const Matrix items = load_points(cfg.items);
  const auto seeds = load_index_lists(cfg.seeds);
  const auto relevance = load_index_lists(cfg.relevance);
  std::optional<Matrix> raw;
  if (cfg.items_raw) raw = load_points(*cfg.items_raw);

  std::vector<RetrievalRow> rows;
  std::vector<std::string> warnings;
  for (bool append : cfg.append_raw) {
    Matrix reps = items;
    if (append) {
      if (!raw) throw usage_error("append_raw needs raw item features");
      reps = scale_and_concat(items, *raw);
    }
    for (int cutoff : cfg.cutoffs) {
      rows.push_back({cutoff, append, evaluate_retrieval(reps, seeds, relevance, cutoff, cfg.center, &warnings)});
    }
  }
  std::string csv = "cutoff,append_raw,recall,mrr,roc_auc\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.cutoff) + "," + (r.append_raw ? "1" : "0") + "," + format_double(r.metrics.recall) + "," +
           format_double(r.metrics.mrr) + "," + format_double(r.metrics.roc_auc) + "\n";
  }
  detail::write_file(cfg.out, csv);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  log << "eval-retrieval: " << rows.size() << " configurations written to " << cfg.out.string() << "\n";
  return rows;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepConfig {
  fs::path train_x;
  fs::path train_y;
  fs::path train_labels;
  fs::path dev_x;
  fs::path dev_labels;
  std::optional<fs::path> oracle;  // training groups; forces R = group count
  std::vector<int> r_grid{1};
  std::vector<int> k_grid{1};
  std::vector<double> wx_grid{0.001};
  std::vector<double> wy_grid{0.001};
  std::vector<EmbeddingMode> modes{EmbeddingMode::Concatenation};
  std::vector<Distance> metrics{Distance::L2};
  std::vector<int> neighbors{1};
  InitSpace init = InitSpace::CcaProjection;
  bool centered = true;
  std::uint64_t seed = 0;
  fs::path out;
};

struct SweepRow {
  int r;
  int k;
  double w_x;
  double w_y;
  EmbeddingMode mode;
  Distance metric;
  int neighbors;
  double dev_accuracy = 0.0;
  std::string status = "ok";

  auto key() const { return std::make_tuple(r, k, w_x, w_y, to_string(mode), to_string(metric), neighbors); }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<std::size_t> best;  // index into rows
};

inline SweepResult run_sweep(const PairedDataset& train, const std::vector<int>& train_labels, const Matrix& dev_x,
                             const std::vector<int>& dev_labels, const std::vector<int>* oracle,
                             const SweepConfig& cfg) {
  if (train_labels.size() != static_cast<std::size_t>(train.size())) throw data_error("train label count mismatch");
  if (dev_labels.size() != static_cast<std::size_t>(dev_x.cols())) throw data_error("dev label count mismatch");
  if (cfg.r_grid.empty() || cfg.k_grid.empty() || cfg.wx_grid.empty() || cfg.wy_grid.empty() || cfg.modes.empty() ||
      cfg.metrics.empty() || cfg.neighbors.empty()) {
    throw usage_error("sweep: every grid needs at least one value");
  }

  struct TrainPoint {
    int r;
    int k;
    double w_x;
    double w_y;
  };
  std::vector<TrainPoint> points;
  for (int r : cfg.r_grid)
    for (int k : cfg.k_grid)
      for (double wx : cfg.wx_grid)
        for (double wy : cfg.wy_grid) points.push_back({r, k, wx, wy});

  const std::size_t per_point = cfg.modes.size() * cfg.metrics.size() * cfg.neighbors.size();
  SweepResult result;
  result.rows.resize(points.size() * per_point);

  parallel_for(points.size(), [&](std::size_t p) {
    const TrainPoint& tp = points[p];
    std::size_t row = p * per_point;
    auto fill = [&](EmbeddingMode mode, Distance metric, int nb) -> SweepRow& {
      SweepRow& s = result.rows[row++];
      s.r = tp.r;
      s.k = tp.k;
      s.w_x = tp.w_x;
      s.w_y = tp.w_y;
      s.mode = mode;
      s.metric = metric;
      s.neighbors = nb;
      return s;
    };

    std::optional<MccaModel> model;
    std::string failure;
    try {
      Hyperparameters hyper{tp.k, tp.r, tp.w_x, tp.w_y, cfg.seed};
      model = train_from_data(train, hyper, cfg.init, oracle, cfg.centered).model;
    } catch (const std::exception& e) {
      failure = std::string("train failed: ") + e.what();
    }
    for (EmbeddingMode mode : cfg.modes) {
      std::optional<Matrix> tr;
      std::optional<Matrix> dv;
      std::string embed_failure = failure;
      if (model) {
        try {
          tr = embed(*model, View::X, train.x, mode, model->centered);
          dv = embed(*model, View::X, dev_x, mode, model->centered);
        } catch (const std::exception& e) {
          embed_failure = std::string("embed failed: ") + e.what();
        }
      }
      for (Distance metric : cfg.metrics) {
        for (int nb : cfg.neighbors) {
          SweepRow& s = fill(mode, metric, nb);
          if (!embed_failure.empty()) {
            s.status = embed_failure;
            continue;
          }
          try {
            s.dev_accuracy = knn_classify(*tr, train_labels, *dv, KnnConfig{metric, nb, false}, &dev_labels).accuracy;
          } catch (const std::exception& e) {
            s.status = std::string("eval failed: ") + e.what();
          }
        }
      }
    }
  });

  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const SweepRow& s = result.rows[i];
    if (s.status != "ok") continue;
    if (!result.best) {
      result.best = i;
      continue;
    }
    const SweepRow& b = result.rows[*result.best];
    if (s.dev_accuracy > b.dev_accuracy || (s.dev_accuracy == b.dev_accuracy && s.key() < b.key())) result.best = i;
  }
  return result;
}

inline std::string csv_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  return s;
}

inline SweepResult cmd_sweep(const SweepConfig& cfg, std::ostream& log) {
  const PairedDataset train = load_paired(cfg.train_x, cfg.train_y);
  const auto train_labels = load_ids(cfg.train_labels);
  const Matrix dev_x = load_points(cfg.dev_x);
  const auto dev_labels = load_ids(cfg.dev_labels);
  std::optional<std::vector<int>> oracle;
  SweepConfig effective = cfg;
  if (cfg.oracle) {
    oracle = load_ids(*cfg.oracle);
    int groups = 0;
    for (int g : *oracle) groups = std::max(groups, g + 1);
    effective.r_grid = {groups};
  }
  const SweepResult result = run_sweep(train, train_labels, dev_x, dev_labels, oracle ? &*oracle : nullptr, effective);

  auto line = [](const std::string& tag, const SweepRow& s) {
    return tag + "," + std::to_string(s.r) + "," + std::to_string(s.k) + "," + format_double(s.w_x) + "," +
           format_double(s.w_y) + "," + to_string(s.mode) + "," + to_string(s.metric) + "," +
           std::to_string(s.neighbors) + "," + format_double(s.dev_accuracy) + "," + csv_field(s.status) + "\n";
  };
  std::string csv = "row,R,k,w_x,w_y,mode,metric,neighbors,dev_accuracy,status\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) csv += line(std::to_string(i), result.rows[i]);
  if (result.best) csv += line("best", result.rows[*result.best]);
  detail::write_file(cfg.out, csv);

  log << "sweep: " << result.rows.size() << " rows";
  if (result.best) {
    const SweepRow& b = result.rows[*result.best];
    log << ", best dev accuracy " << format_double(b.dev_accuracy) << " at R=" << b.r << " k=" << b.k
        << " w_x=" << format_double(b.w_x) << " w_y=" << format_double(b.w_y) << " " << to_string(b.mode) << " "
        << to_string(b.metric) << " neighbors=" << b.neighbors;
  } else {
    log << ", no successful rows";
  }
  log << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// perplexity

struct PerplexityConfig {
  fs::path model_dir;
  fs::path x;
  fs::path labels;
  bool use_log_prior = true;
  fs::path out;
};

inline PerplexityMatrix cmd_perplexity(const PerplexityConfig& cfg, std::ostream& log) {
  const MccaModel model = load_model(cfg.model_dir);
  const Matrix x = load_points(cfg.x);
  const auto labels = load_ids(cfg.labels);
  const PerplexityMatrix pm = perplexity_matrix(model, x, labels, AssignOptions{cfg.use_log_prior});
  std::string csv = "label";
  for (int r = 0; r < model.r(); ++r) csv += ",component_" + std::to_string(r);
  csv += ",empty\n";
  for (Index l = 0; l < pm.rows.rows(); ++l) {
    csv += std::to_string(l);
    for (Index r = 0; r < pm.rows.cols(); ++r) csv += "," + format_double(pm.rows(l, r));
    csv += pm.empty_rows[static_cast<std::size_t>(l)] ? ",1\n" : ",0\n";
  }
  detail::write_file(cfg.out, csv);
  log << "perplexity: " << pm.rows.rows() << " labels x " << pm.rows.cols() << " components written to "
      << cfg.out.string() << "\n";
  return pm;
}

}  // namespace mcca::cli

#endif  // MCCA_COMMANDS_HPP
