#include <cstring>
#include <limits>

#include "test_util.hpp"

using mcca::ErrorKind;
using mcca::Matrix;
using mcca::MatrixFormat;
using testutil::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) { mcca::detail::write_file(p, s); }

std::string binary_header(std::uint64_t rows, std::uint64_t cols) {
  std::string out = "MXB1";
  for (std::uint64_t v : {rows, cols}) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  }
  return out;
}

}  // namespace

TEST(MatrixIo, CsvParsesRowsAsWritten) {
  TempDir dir;
  write_text(dir / "m.csv", "1.0,2.0\n3.0,4.0");
  const Matrix m = mcca::load_matrix(dir / "m.csv", MatrixFormat::Csv);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(0, 1), 2.0);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_EQ(m(1, 1), 4.0);
}

TEST(MatrixIo, CsvPointsAreTransposedOnLoad) {
  TempDir dir;
  write_text(dir / "p.csv", "1,2,3\n4,5,6\n");
  const Matrix p = mcca::load_points(dir / "p.csv");
  ASSERT_EQ(p.rows(), 3);
  ASSERT_EQ(p.cols(), 2);
  EXPECT_EQ(p(2, 1), 6.0);
}

TEST(MatrixIo, EmptyFileHasNoRows) {
  TempDir dir;
  write_text(dir / "e.csv", "");
  const std::string msg = testutil::error_message_of([&] { mcca::load_matrix(dir / "e.csv", MatrixFormat::Csv); });
  EXPECT_NE(msg.find("no rows"), std::string::npos) << msg;
  write_text(dir / "e.mxb", "");
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::load_matrix(dir / "e.mxb", MatrixFormat::Binary); }),
            ErrorKind::Data);
}

TEST(MatrixIo, CsvErrorsCarryLocation) {
  TempDir dir;
  write_text(dir / "bad.csv", "1,2\n3,abc\n");
  std::string msg = testutil::error_message_of([&] { mcca::load_matrix(dir / "bad.csv"); });
  EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;

  write_text(dir / "ragged.csv", "1,2\n3\n");
  msg = testutil::error_message_of([&] { mcca::load_matrix(dir / "ragged.csv"); });
  EXPECT_NE(msg.find("non-rectangular"), std::string::npos) << msg;

  write_text(dir / "nan.csv", "1,nan\n");
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::load_matrix(dir / "nan.csv"); }), ErrorKind::Data);
  write_text(dir / "inf.csv", "inf,1\n");
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::load_matrix(dir / "inf.csv"); }), ErrorKind::Data);
}

TEST(MatrixIo, MissingFileIsDataError) {
  TempDir dir;
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::load_matrix(dir / "missing.csv"); }), ErrorKind::Data);
}

TEST(MatrixIo, BinaryTruncatedPayload) {
  TempDir dir;
  std::string bytes = binary_header(2, 3);
  bytes.append(5 * 8, '\0');
  write_text(dir / "t.mxb", bytes);
  const std::string msg = testutil::error_message_of([&] { mcca::load_matrix(dir / "t.mxb"); });
  EXPECT_NE(msg.find("truncated payload"), std::string::npos) << msg;
}

TEST(MatrixIo, BinaryHeaderChecks) {
  TempDir dir;
  write_text(dir / "h.mxb", "MXB1\x02");
  EXPECT_NE(testutil::error_message_of([&] { mcca::load_matrix(dir / "h.mxb"); }).find("truncated header"),
            std::string::npos);
  std::string bad = binary_header(1, 1);
  bad[3] = '2';
  bad.append(8, '\0');
  write_text(dir / "m.mxb", bad);
  EXPECT_NE(testutil::error_message_of([&] { mcca::load_matrix(dir / "m.mxb"); }).find("magic"), std::string::npos);
  std::string extra = binary_header(1, 1);
  extra.append(9, '\0');
  write_text(dir / "x.mxb", extra);
  EXPECT_NE(testutil::error_message_of([&] { mcca::load_matrix(dir / "x.mxb"); }).find("trailing"),
            std::string::npos);
}

TEST(MatrixIo, BinaryLayoutIsRowMajorLittleEndian) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const std::string bytes = mcca::encode_matrix(m, MatrixFormat::Binary);
  ASSERT_EQ(bytes.size(), 4u + 16u + 32u);
  EXPECT_EQ(bytes.substr(0, 4), "MXB1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2u);
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 20 + 8, 8);  // host is little-endian in CI
  EXPECT_EQ(second, 2.0);
}

TEST(MatrixIo, BinaryRoundTripIsBitExact) {
  TempDir dir;
  Matrix m = testutil::random_matrix(7, 5, 11);
  m(0, 0) = -0.0;
  m(1, 1) = 1e-308;
  m(2, 2) = std::numeric_limits<double>::max();
  mcca::write_matrix(dir / "a.mxb", m, MatrixFormat::Binary);
  const std::string first = mcca::detail::read_file(dir / "a.mxb");
  const Matrix back = mcca::load_matrix(dir / "a.mxb", MatrixFormat::Binary);
  mcca::write_matrix(dir / "b.mxb", back, MatrixFormat::Binary);
  EXPECT_EQ(first, mcca::detail::read_file(dir / "b.mxb"));
  EXPECT_EQ(0, std::memcmp(m.data(), back.data(), sizeof(double) * static_cast<std::size_t>(m.size())));
}

TEST(MatrixIo, CsvRoundTripIsExact) {
  TempDir dir;
  const Matrix m = testutil::random_matrix(4, 6, 12);
  mcca::write_points(dir / "p.csv", m);
  const Matrix back = mcca::load_points(dir / "p.csv");
  EXPECT_TRUE(back == m);
}

TEST(MatrixIo, IdsAndIndexLists) {
  TempDir dir;
  mcca::write_ids(dir / "ids.csv", {3, 0, -1, 7});
  EXPECT_EQ(mcca::load_ids(dir / "ids.csv"), (std::vector<int>{3, 0, -1, 7}));
  write_text(dir / "lists.csv", "0,1,2\n5\n");
  const auto lists = mcca::load_index_lists(dir / "lists.csv");
  ASSERT_EQ(lists.size(), 2u);
  EXPECT_EQ(lists[0], (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(lists[1], (std::vector<int>{5}));
  write_text(dir / "bad_ids.csv", "1\nx\n");
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::load_ids(dir / "bad_ids.csv"); }), ErrorKind::Data);
}

TEST(PairedDataset, ValidateRejectsBrokenInvariants) {
  mcca::PairedDataset d{Matrix::Ones(2, 3), Matrix::Ones(1, 2), {}, {}, {}};
  EXPECT_EQ(testutil::error_kind_of([&] { d.validate(); }), ErrorKind::Data);
  d.y = Matrix::Ones(1, 3);
  d.validate();
  d.labels = std::vector<int>{0, 1};
  EXPECT_EQ(testutil::error_kind_of([&] { d.validate(); }), ErrorKind::Data);
  d.labels.reset();
  d.groups = std::vector<int>{0, 1, 2};
  d.group_count = 2;
  EXPECT_EQ(testutil::error_kind_of([&] { d.validate(); }), ErrorKind::Data);
  d.group_count = 3;
  d.validate();
  d.x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(testutil::error_kind_of([&] { d.validate(); }), ErrorKind::Data);
}

TEST(Standardize, TwoPointGlobal) {
  Matrix x(1, 2);
  x << 1, 3;
  const auto [out, stats] = mcca::standardize({x, x, {}, {}, {}});
  EXPECT_DOUBLE_EQ(out.x(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(out.x(0, 1), 1.0);
  EXPECT_FALSE(stats.grouped);
}

TEST(Standardize, ConstantFeatureIsCenteredAndFloored) {
  Matrix x(1, 3);
  x << 5, 5, 5;
  const auto [out, stats] = mcca::standardize({x, x, {}, {}, {}});
  EXPECT_TRUE(out.x.isZero(0.0));
  EXPECT_EQ(stats.groups.at(0).x.stddev(0), 1.0);
  EXPECT_FALSE(stats.warnings.empty());
}

TEST(Standardize, PerGroup) {
  Matrix x(1, 4);
  x << 0, 2, 10, 14;
  const std::vector<int> key{0, 0, 1, 1};
  const auto [out, stats] = mcca::standardize({x, x, {}, {}, {}}, &key);
  EXPECT_DOUBLE_EQ(out.x(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(out.x(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(out.x(0, 2), -1.0);
  EXPECT_DOUBLE_EQ(out.x(0, 3), 1.0);
  EXPECT_TRUE(stats.grouped);
  EXPECT_EQ(stats.groups.size(), 2u);
}

TEST(Standardize, SinglePointGroupWarns) {
  Matrix x(1, 3);
  x << 1, 2, 7;
  const std::vector<int> key{0, 0, 1};
  const auto [out, stats] = mcca::standardize({x, x, {}, {}, {}}, &key);
  EXPECT_EQ(out.x(0, 2), 0.0);
  EXPECT_FALSE(stats.warnings.empty());
}

TEST(Standardize, StatsReapplyAndIdempotence) {
  const Matrix x = testutil::random_matrix(5, 40, 1) * 3.0;
  const Matrix y = testutil::random_matrix(3, 40, 2).array() + 4.0;
  std::vector<int> key(40);
  for (int i = 0; i < 40; ++i) key[static_cast<std::size_t>(i)] = i % 3;
  const mcca::PairedDataset data{x, y, {}, {}, {}};
  const auto [once, stats] = mcca::standardize(data, &key);
  const mcca::PairedDataset again = mcca::apply_standardization(data, stats, &key);
  EXPECT_LE(testutil::max_abs(again.x - once.x), 1e-12);
  EXPECT_LE(testutil::max_abs(again.y - once.y), 1e-12);
  const auto [twice, stats2] = mcca::standardize(once, &key);
  EXPECT_LE(testutil::max_abs(twice.x - once.x), 1e-12);
  EXPECT_LE(testutil::max_abs(twice.y - once.y), 1e-12);
}

TEST(Standardize, MissingGroupStats) {
  const Matrix x = testutil::random_matrix(2, 4, 3);
  const std::vector<int> key{0, 0, 1, 1};
  const auto [out, stats] = mcca::standardize({x, x, {}, {}, {}}, &key);
  const std::vector<int> other{0, 0, 2, 2};
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::apply_standardization({x, x, {}, {}, {}}, stats, &other); }),
            ErrorKind::Data);
}

TEST(StackContext, IdentityWindow) {
  const Matrix f = testutil::random_matrix(3, 5, 4);
  EXPECT_TRUE(mcca::stack_context(f, 1) == f);
}

TEST(StackContext, EdgeReplication) {
  Matrix f(1, 3);
  f << 1, 2, 3;
  Matrix expect(3, 3);
  expect << 1, 1, 2,
            1, 2, 3,
            2, 3, 3;
  EXPECT_TRUE(mcca::stack_context(f, 3) == expect);
}

TEST(StackContext, SingleFrame) {
  Matrix f(2, 1);
  f << 4, 5;
  Matrix expect(6, 1);
  expect << 4, 5, 4, 5, 4, 5;
  EXPECT_TRUE(mcca::stack_context(f, 3) == expect);
}

TEST(StackContext, ShapeAndWindowChecks) {
  const Matrix f = testutil::random_matrix(4, 9, 5);
  const Matrix s = mcca::stack_context(f, 7);
  EXPECT_EQ(s.rows(), 28);
  EXPECT_EQ(s.cols(), 9);
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::stack_context(f, 4); }), ErrorKind::Usage);
  EXPECT_EQ(testutil::error_kind_of([&] { mcca::stack_context(f, 0); }), ErrorKind::Usage);
}
