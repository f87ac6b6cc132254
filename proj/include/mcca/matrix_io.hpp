#ifndef MCCA_MATRIX_IO_HPP
#define MCCA_MATRIX_IO_HPP

// Matrix and id-list file formats.
//
// CSV:    no header, comma separated, one data point per ROW. Files therefore
//         hold N x d; load_points()/write_points() transpose to and from the
//         d x N in-memory orientation.
// Binary: "MXB1", rows (u64 LE), cols (u64 LE), then rows*cols IEEE-754
//         doubles (LE) in row-major order. Points are rows here as well.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcca/error.hpp"
#include "mcca/numerics.hpp"

namespace mcca {

enum class MatrixFormat { Csv, Binary };

inline constexpr std::array<char, 4> kBinaryMagic = {'M', 'X', 'B', '1'};

/// ".csv"/".txt" -> Csv, anything else -> Binary.
inline MatrixFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv" || ext == ".txt") return MatrixFormat::Csv;
  return MatrixFormat::Binary;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw data_error("read failure on " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw data_error("write failure on " + path.string());
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  // Drop trailing blank lines.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
}

inline double parse_double(std::string_view field, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw data_error("parse error at " + location(row, col) + ": '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw data_error("non-finite value at " + location(row, col));
  }
  return value;
}

inline void append_double(std::string& out, double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  out.append(buf.data(), res.ptr);
}

template <class T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> b{};
    std::memcpy(b.data(), &value, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&value, b.data(), sizeof(T));
  }
  return value;
}

template <class T>
void put_le(std::string& out, T value) {
  value = to_little_endian(value);
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.append(raw, sizeof(T));
}

template <class T>
T get_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return to_little_endian(value);
}

inline Matrix parse_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw data_error("no rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());
  std::size_t cols = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto fields = split_fields(lines[r]);
    if (r == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw data_error("non-rectangular data: row " + std::to_string(r + 1) + " has " +
                       std::to_string(fields.size()) + " columns, expected " + std::to_string(cols));
    }
    std::vector<double> values(cols);
    for (std::size_t c = 0; c < cols; ++c) values[c] = parse_double(fields[c], r, c);
    rows.push_back(std::move(values));
  }
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return m;
}

inline Matrix parse_binary(std::string_view bytes) {
  constexpr std::size_t header = 4 + 2 * sizeof(std::uint64_t);
  if (bytes.size() < header) {
    if (bytes.empty()) throw data_error("no rows");
    throw data_error("truncated header");
  }
  if (std::memcmp(bytes.data(), kBinaryMagic.data(), kBinaryMagic.size()) != 0) {
    throw data_error("bad magic bytes (expected MXB1)");
  }
  const auto rows = get_le<std::uint64_t>(bytes.data() + 4);
  const auto cols = get_le<std::uint64_t>(bytes.data() + 12);
  if (rows == 0) throw data_error("no rows");
  const std::size_t payload = bytes.size() - header;
  if (cols != 0 && rows > payload / sizeof(double) / cols) throw data_error("truncated payload");
  const std::uint64_t count = rows * cols;
  if (payload < count * sizeof(double)) throw data_error("truncated payload");
  if (payload > count * sizeof(double)) throw data_error("trailing bytes after payload");

  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  const char* p = bytes.data() + header;
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      const double v = get_le<double>(p);
      p += sizeof(double);
      if (!std::isfinite(v)) throw data_error("non-finite value at " + location(r, c));
      m(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
  }
  return m;
}

}  // namespace detail

/// Reads the matrix exactly as laid out in the file (file rows -> matrix rows).
inline Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string bytes = detail::read_file(path);
  try {
    return format == MatrixFormat::Csv ? detail::parse_csv(bytes) : detail::parse_binary(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

inline Matrix load_matrix(const std::filesystem::path& path) {
  return load_matrix(path, format_from_path(path));
}

inline std::string encode_matrix(const Matrix& m, MatrixFormat format) {
  std::string out;
  if (format == MatrixFormat::Csv) {
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) {
        if (c > 0) out.push_back(',');
        detail::append_double(out, m(r, c));
      }
      out.push_back('\n');
    }
    return out;
  }
  out.reserve(20 + static_cast<std::size_t>(m.size()) * sizeof(double));
  out.append(kBinaryMagic.data(), kBinaryMagic.size());
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) detail::put_le<double>(out, m(r, c));
  return out;
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  detail::write_file(path, encode_matrix(m, format));
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_matrix(path, m, format_from_path(path));
}

/// d x N view of a points file (points stored as rows on disk).
inline Matrix load_points(const std::filesystem::path& path) {
  return load_matrix(path).transpose();
}

inline void write_points(const std::filesystem::path& path, const Matrix& points) {
  write_matrix(path, points.transpose());
}

/// One integer per line (labels, groups, assignments).
inline std::vector<int> load_ids(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw data_error(path.string() + ": no rows");
  std::vector<int> ids;
  ids.reserve(lines.size());
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const std::string_view field = detail::trim(lines[r]);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw data_error(path.string() + ": parse error at " + detail::location(r, 0) + ": '" +
                       std::string(field) + "'");
    }
    ids.push_back(value);
  }
  return ids;
}

inline void write_ids(const std::filesystem::path& path, const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) {
    out += std::to_string(id);
    out.push_back('\n');
  }
  detail::write_file(path, out);
}

/// One comma-separated list of non-negative indices per line (query seed
/// lists, relevance lists). Blank lines are empty lists.
inline std::vector<std::vector<int>> load_index_lists(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw data_error(path.string() + ": no rows");
  std::vector<std::vector<int>> lists(lines.size());
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (detail::trim(lines[r]).empty()) continue;
    const auto fields = detail::split_fields(lines[r]);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      int value = -1;
      const auto [ptr, ec] = std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), value);
      if (fields[c].empty() || ec != std::errc() || ptr != fields[c].data() + fields[c].size() || value < 0) {
        throw data_error(path.string() + ": bad index at " + detail::location(r, c));
      }
      lists[r].push_back(value);
    }
  }
  return lists;
}

}  // namespace mcca

#endif  // MCCA_MATRIX_IO_HPP
