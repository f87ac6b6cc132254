#ifndef MCCA_ARCHIVE_HPP
#define MCCA_ARCHIVE_HPP

// Model archive: a directory holding metadata.json plus one binary matrix
// file per U_r, V_r, mu^X_r, mu^Y_r and the canonical correlations.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mcca/error.hpp"
#include "mcca/matrix_io.hpp"
#include "mcca/mixture.hpp"

namespace mcca {

inline constexpr int kArchiveVersion = 1;

namespace detail {

inline std::string component_file(const char* stem, int r) { return std::string(stem) + "_" + std::to_string(r) + ".mxb"; }

inline Matrix as_column(const Vector& v) { return v; }

}  // namespace detail

inline void save_model(const std::filesystem::path& dir, const MccaModel& model) {
  if (model.components.empty()) throw usage_error("save_model: model has no components");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw data_error("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json meta;
  meta["format"] = "mcca-model";
  meta["version"] = kArchiveVersion;
  meta["R"] = model.r();
  meta["k"] = model.k();
  meta["d_x"] = model.dim(View::X);
  meta["d_y"] = model.dim(View::Y);
  meta["w_x"] = model.hyper.w_x;
  meta["w_y"] = model.hyper.w_y;
  meta["seed"] = model.hyper.seed;
  meta["init_space"] = model.init_space;
  meta["centered"] = model.centered;
  meta["pi"] = std::vector<double>(model.pi.data(), model.pi.data() + model.pi.size());
  detail::write_file(dir / "metadata.json", meta.dump(2) + "\n");

  for (int r = 0; r < model.r(); ++r) {
    const CcaModel& c = model.components[static_cast<std::size_t>(r)];
    write_matrix(dir / detail::component_file("u", r), c.u, MatrixFormat::Binary);
    write_matrix(dir / detail::component_file("v", r), c.v, MatrixFormat::Binary);
    write_matrix(dir / detail::component_file("mu_x", r), detail::as_column(c.center_x), MatrixFormat::Binary);
    write_matrix(dir / detail::component_file("mu_y", r), detail::as_column(c.center_y), MatrixFormat::Binary);
    write_matrix(dir / detail::component_file("corr", r), detail::as_column(c.correlations), MatrixFormat::Binary);
  }
}

inline MccaModel load_model(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(detail::read_file(dir / "metadata.json"));
  } catch (const nlohmann::json::exception& e) {
    throw data_error(dir.string() + "/metadata.json: " + e.what());
  }
  try {
    if (meta.at("format") != "mcca-model") throw data_error("not an mcca model archive");
    if (meta.at("version").get<int>() != kArchiveVersion) {
      throw data_error("unsupported archive version " + meta.at("version").dump());
    }
    MccaModel model;
    const int r_count = meta.at("R").get<int>();
    const int k = meta.at("k").get<int>();
    const auto d_x = meta.at("d_x").get<Index>();
    const auto d_y = meta.at("d_y").get<Index>();
    model.hyper.r_components = r_count;
    model.hyper.k = k;
    model.hyper.w_x = meta.at("w_x").get<double>();
    model.hyper.w_y = meta.at("w_y").get<double>();
    model.hyper.seed = meta.at("seed").get<std::uint64_t>();
    model.init_space = meta.at("init_space").get<std::string>();
    model.centered = meta.at("centered").get<bool>();
    const auto pi = meta.at("pi").get<std::vector<double>>();
    if (r_count < 1 || k < 1 || pi.size() != static_cast<std::size_t>(r_count)) {
      throw data_error("inconsistent archive metadata");
    }
    model.pi = Eigen::Map<const Vector>(pi.data(), static_cast<Index>(pi.size()));

    for (int r = 0; r < r_count; ++r) {
      CcaModel c;
      c.u = load_matrix(dir / detail::component_file("u", r), MatrixFormat::Binary);
      c.v = load_matrix(dir / detail::component_file("v", r), MatrixFormat::Binary);
      c.center_x = load_matrix(dir / detail::component_file("mu_x", r), MatrixFormat::Binary).col(0);
      c.center_y = load_matrix(dir / detail::component_file("mu_y", r), MatrixFormat::Binary).col(0);
      c.correlations = load_matrix(dir / detail::component_file("corr", r), MatrixFormat::Binary).col(0);
      if (c.u.rows() != d_x || c.u.cols() != k || c.v.rows() != d_y || c.v.cols() != k ||
          c.center_x.size() != d_x || c.center_y.size() != d_y || c.correlations.size() != k) {
        throw data_error("component " + std::to_string(r) + " matrices do not match metadata shapes");
      }
      c.hyper = model.hyper;
      model.components.push_back(std::move(c));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(dir.string() + "/metadata.json: " + e.what());
  }
}

}  // namespace mcca

#endif  // MCCA_ARCHIVE_HPP
