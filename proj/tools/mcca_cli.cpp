// mcca: command-line driver for mixture-of-CCA training, embedding and
// evaluation. Run `mcca --help` or `mcca <command> --help` for options.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
// failure.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mcca/commands.hpp"

namespace {

using mcca::Distance;
using mcca::EmbeddingMode;
using mcca::InitSpace;
using mcca::MatrixFormat;
using mcca::View;

const std::map<std::string, InitSpace> kInitSpaces{{"cca", InitSpace::CcaProjection},
                                                   {"cca_projection", InitSpace::CcaProjection},
                                                   {"native", InitSpace::Native}};
const std::map<std::string, EmbeddingMode> kModes{{"projection", EmbeddingMode::Projection},
                                                  {"concatenation", EmbeddingMode::Concatenation}};
const std::map<std::string, Distance> kMetrics{{"l2", Distance::L2}, {"cosine", Distance::Cosine}};
const std::map<std::string, View> kViews{{"x", View::X}, {"y", View::Y}};
const std::map<std::string, MatrixFormat> kFormats{{"csv", MatrixFormat::Csv}, {"binary", MatrixFormat::Binary}};

template <class T>
CLI::CheckedTransformer choice(const std::map<std::string, T>& m) {
  return CLI::CheckedTransformer(m, CLI::ignore_case);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture-of-CCA representation learning"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "TOML/INI config file; command-line flags override its values");
  app.require_subcommand(1);

  namespace cli = mcca::cli;

  // synth
  cli::SynthConfig synth;
  auto* sub_synth = app.add_subcommand("synth", "Generate a synthetic two-view mixture dataset");
  sub_synth->add_option("--out", synth.out_dir, "Output directory")->required();
  sub_synth->add_option("--components,-R", synth.spec.r_components, "Number of mixture components");
  sub_synth->add_option("--dx", synth.spec.d_x, "Dimension of view X");
  sub_synth->add_option("--dy", synth.spec.d_y, "Dimension of view Y");
  sub_synth->add_option("--k-true", synth.spec.k_true, "Correlated directions per component");
  sub_synth->add_option("--rho", synth.spec.rho, "Canonical correlation per component (one value = shared)")
      ->expected(1, -1);
  sub_synth->add_option("--separation", synth.spec.mean_separation, "Distance between component means");
  sub_synth->add_option("--n", synth.spec.n_per_component, "Points per component");
  sub_synth->add_flag("--cancel", synth.spec.cancel, "Share directions and alternate correlation signs");
  sub_synth->add_flag("--shared-directions", synth.spec.shared_directions,
                      "Use the same A and B in every component (implied by --cancel)");
  sub_synth->add_option("--label-bins", synth.spec.label_bins, "Emit labels.csv by binning the first latent");
  sub_synth->add_option("--seed", synth.spec.seed, "Random seed");
  sub_synth->add_option("--format", synth.format, "Matrix format: csv or binary")->transform(choice(kFormats));

  // train
  cli::TrainConfig train;
  std::string train_oracle;
  bool train_uncentered = false;
  auto* sub_train = app.add_subcommand("train", "Fit an MCCA model (k-means init, then per-component CCA)");
  sub_train->add_option("--x", train.x, "View X points file")->required()->check(CLI::ExistingFile);
  sub_train->add_option("--y", train.y, "View Y points file")->required()->check(CLI::ExistingFile);
  sub_train->add_option("--model", train.model_dir, "Output model directory")->required();
  sub_train->add_option("--components,-R", train.hyper.r_components, "Number of mixture components");
  sub_train->add_option("--k", train.hyper.k, "Projection dimension");
  sub_train->add_option("--wx", train.hyper.w_x, "Ridge on the X covariance");
  sub_train->add_option("--wy", train.hyper.w_y, "Ridge on the Y covariance");
  sub_train->add_option("--seed", train.hyper.seed, "Random seed");
  sub_train->add_option("--init", train.init, "Clustering space for initialization: cca or native")
      ->transform(choice(kInitSpaces));
  sub_train->add_option("--oracle", train_oracle, "Groups file giving each point's component (skips k-means)")
      ->check(CLI::ExistingFile);
  sub_train->add_flag("--uncentered", train_uncentered, "Store uncentered projection as the embedding default");

  // embed
  cli::EmbedConfig embed;
  std::string embed_oracle;
  std::string embed_assign_out;
  bool embed_centered = false;
  bool embed_uncentered = false;
  bool embed_no_prior = false;
  auto* sub_embed = app.add_subcommand("embed", "Embed points with a trained model");
  sub_embed->add_option("--model", embed.model_dir, "Model directory")->required()->check(CLI::ExistingDirectory);
  sub_embed->add_option("--input", embed.input, "Points file")->required()->check(CLI::ExistingFile);
  sub_embed->add_option("--out", embed.out, "Output embedding file")->required();
  sub_embed->add_option("--view", embed.view, "Which view the points belong to: x or y")->transform(choice(kViews));
  sub_embed->add_option("--mode", embed.mode, "projection or concatenation")->transform(choice(kModes));
  sub_embed->add_option("--oracle-assign", embed_oracle, "Component id per point (projection mode)")
      ->check(CLI::ExistingFile);
  sub_embed->add_option("--assign-out", embed_assign_out, "Write inferred component ids (projection mode)");
  auto* centered_flag = sub_embed->add_flag("--centered", embed_centered, "Subtract component means");
  sub_embed->add_flag("--uncentered", embed_uncentered, "Do not subtract component means")->excludes(centered_flag);
  sub_embed->add_flag("--no-log-prior", embed_no_prior, "Drop the -log(pi) term from the assignment rule");

  // eval-knn
  cli::EvalKnnConfig knn;
  std::string knn_train_raw;
  std::string knn_test_raw;
  bool knn_append_raw = false;
  auto* sub_knn = app.add_subcommand("eval-knn", "kNN classification accuracy over a grid of settings");
  sub_knn->add_option("--train", knn.train_emb, "Train embeddings")->required()->check(CLI::ExistingFile);
  sub_knn->add_option("--train-labels", knn.train_labels, "Train labels")->required()->check(CLI::ExistingFile);
  sub_knn->add_option("--test", knn.test_emb, "Test embeddings")->required()->check(CLI::ExistingFile);
  sub_knn->add_option("--test-labels", knn.test_labels, "Test labels")->required()->check(CLI::ExistingFile);
  sub_knn->add_option("--metric", knn.metrics, "l2 and/or cosine")->transform(choice(kMetrics))->expected(1, -1);
  sub_knn->add_option("--neighbors", knn.neighbors, "Neighbour counts")->expected(1, -1);
  sub_knn->add_option("--train-raw", knn_train_raw, "Raw train features for appending")->check(CLI::ExistingFile);
  sub_knn->add_option("--test-raw", knn_test_raw, "Raw test features for appending")->check(CLI::ExistingFile);
  sub_knn->add_flag("--append-raw", knn_append_raw, "Also evaluate with raw features appended");
  sub_knn->add_option("--out", knn.out, "Metrics CSV")->required();

  // eval-retrieval
  cli::EvalRetrievalConfig ret;
  std::string ret_raw;
  bool ret_append_raw = false;
  bool ret_no_center = false;
  auto* sub_ret = app.add_subcommand("eval-retrieval", "Recall@K, MRR and ROC-AUC for seed-based retrieval");
  sub_ret->add_option("--items", ret.items, "Item embeddings")->required()->check(CLI::ExistingFile);
  sub_ret->add_option("--seeds", ret.seeds, "Seed item indices per query")->required()->check(CLI::ExistingFile);
  sub_ret->add_option("--relevance", ret.relevance, "Relevant item indices per query")
      ->required()
      ->check(CLI::ExistingFile);
  sub_ret->add_option("--cutoff", ret.cutoffs, "Recall cutoffs")->expected(1, -1);
  sub_ret->add_option("--items-raw", ret_raw, "Raw item features for appending")->check(CLI::ExistingFile);
  sub_ret->add_flag("--append-raw", ret_append_raw, "Also evaluate with raw features appended");
  sub_ret->add_flag("--no-center", ret_no_center, "Skip mean-centering of query and item representations");
  sub_ret->add_option("--out", ret.out, "Metrics CSV")->required();

  // sweep
  cli::SweepConfig sweep;
  std::string sweep_oracle;
  bool sweep_uncentered = false;
  auto* sub_sweep = app.add_subcommand("sweep", "Train and evaluate every hyperparameter grid point");
  sub_sweep->add_option("--train-x", sweep.train_x, "Train view X")->required()->check(CLI::ExistingFile);
  sub_sweep->add_option("--train-y", sweep.train_y, "Train view Y")->required()->check(CLI::ExistingFile);
  sub_sweep->add_option("--train-labels", sweep.train_labels, "Train labels")->required()->check(CLI::ExistingFile);
  sub_sweep->add_option("--dev-x", sweep.dev_x, "Dev view X")->required()->check(CLI::ExistingFile);
  sub_sweep->add_option("--dev-labels", sweep.dev_labels, "Dev labels")->required()->check(CLI::ExistingFile);
  sub_sweep->add_option("--oracle", sweep_oracle, "Train groups file (oracle assignments)")->check(CLI::ExistingFile);
  sub_sweep->add_option("--components,-R", sweep.r_grid, "Grid over R")->expected(1, -1);
  sub_sweep->add_option("--k", sweep.k_grid, "Grid over k")->expected(1, -1);
  sub_sweep->add_option("--wx", sweep.wx_grid, "Grid over w_x")->expected(1, -1);
  sub_sweep->add_option("--wy", sweep.wy_grid, "Grid over w_y")->expected(1, -1);
  sub_sweep->add_option("--mode", sweep.modes, "Embedding modes")->transform(choice(kModes))->expected(1, -1);
  sub_sweep->add_option("--metric", sweep.metrics, "kNN distances")->transform(choice(kMetrics))->expected(1, -1);
  sub_sweep->add_option("--neighbors", sweep.neighbors, "kNN neighbour counts")->expected(1, -1);
  sub_sweep->add_option("--init", sweep.init, "cca or native")->transform(choice(kInitSpaces));
  sub_sweep->add_option("--seed", sweep.seed, "Random seed");
  sub_sweep->add_flag("--uncentered", sweep_uncentered, "Use uncentered embeddings");
  sub_sweep->add_option("--out", sweep.out, "Leaderboard CSV")->required();

  // perplexity
  cli::PerplexityConfig perp;
  bool perp_no_prior = false;
  auto* sub_perp = app.add_subcommand("perplexity", "Label-by-component assignment frequencies");
  sub_perp->add_option("--model", perp.model_dir, "Model directory")->required()->check(CLI::ExistingDirectory);
  sub_perp->add_option("--x", perp.x, "View X points")->required()->check(CLI::ExistingFile);
  sub_perp->add_option("--labels", perp.labels, "Labels")->required()->check(CLI::ExistingFile);
  sub_perp->add_flag("--no-log-prior", perp_no_prior, "Drop the -log(pi) term from the assignment rule");
  sub_perp->add_option("--out", perp.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(mcca::ErrorKind::Usage);
  }

  try {
    std::ostream& log = std::cout;
    if (*sub_synth) {
      cli::cmd_synth(synth, log);
    } else if (*sub_train) {
      if (!train_oracle.empty()) train.oracle = train_oracle;
      train.centered = !train_uncentered;
      cli::cmd_train(train, log);
    } else if (*sub_embed) {
      if (!embed_oracle.empty()) embed.oracle_assign = embed_oracle;
      if (!embed_assign_out.empty()) embed.assign_out = embed_assign_out;
      if (embed_centered) embed.centered = true;
      if (embed_uncentered) embed.centered = false;
      embed.use_log_prior = !embed_no_prior;
      cli::cmd_embed(embed, log);
    } else if (*sub_knn) {
      if (!knn_train_raw.empty()) knn.train_raw = knn_train_raw;
      if (!knn_test_raw.empty()) knn.test_raw = knn_test_raw;
      if (knn_append_raw) knn.append_raw = {false, true};
      cli::cmd_eval_knn(knn, log);
    } else if (*sub_ret) {
      if (!ret_raw.empty()) ret.items_raw = ret_raw;
      if (ret_append_raw) ret.append_raw = {false, true};
      ret.center = !ret_no_center;
      cli::cmd_eval_retrieval(ret, log);
    } else if (*sub_sweep) {
      if (!sweep_oracle.empty()) sweep.oracle = sweep_oracle;
      sweep.centered = !sweep_uncentered;
      cli::cmd_sweep(sweep, log);
    } else if (*sub_perp) {
      perp.use_log_prior = !perp_no_prior;
      cli::cmd_perplexity(perp, log);
    }
  } catch (const mcca::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(mcca::ErrorKind::Numerical);
  }
  return 0;
}
