#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "tlscond/error.hpp"
#include "tlscond/matrix_market.hpp"

namespace tlscond {
namespace {

DenseMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in, "mem.mtx");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

TEST(MatrixMarket, ArrayIdentity) {
  const DenseMatrix m = parse("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n");
  EXPECT_EQ(m, DenseMatrix::Identity(2, 2));
}

TEST(MatrixMarket, ArrayIsColumnMajorWithComments) {
  const DenseMatrix m = parse(
      "%%MatrixMarket matrix array real general\n% comment\n\n2 3\n1 2\n3 4\r\n5 6\n");
  DenseMatrix want(2, 3);
  want << 1, 3, 5, 2, 4, 6;
  EXPECT_EQ(m, want);
}

TEST(MatrixMarket, CoordinateExpandsToDense) {
  const DenseMatrix m =
      parse("%%MatrixMarket matrix coordinate real general\n3 2 3\n1 1 1.5\n3 2 -2\n2 1 4e-1\n");
  DenseMatrix want(3, 2);
  want << 1.5, 0, 0.4, 0, 0, -2;
  EXPECT_EQ(m, want);
}

TEST(MatrixMarket, IntegerFieldAndCaseInsensitiveBanner) {
  const DenseMatrix m = parse("%%MatrixMarket MATRIX Coordinate Integer General\n1 2 1\n1 2 7\n");
  EXPECT_EQ(m(0, 1), 7.0);
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(MatrixMarket, Errors) {
  EXPECT_NE(parse_error("%%MatrixMarket matrix array complex general\n1 1\n1 0\n").find(
                "mem.mtx:1"),
            std::string::npos);
  EXPECT_NE(parse_error("%%MatrixMarket matrix array real symmetric\n1 1\n1\n").find("symmetry"),
            std::string::npos);
  EXPECT_NE(parse_error("hello\n").find("banner"), std::string::npos);
  EXPECT_NE(parse_error("").find("empty"), std::string::npos);
  EXPECT_NE(parse_error("%%MatrixMarket matrix array real general\n2 2\n1\n2\nx\n1\n").find(
                "mem.mtx:5"),
            std::string::npos);
  parse_error("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
  parse_error("%%MatrixMarket matrix array real general\n1 1\n1\n2\n");
  parse_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  parse_error("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
  parse_error("%%MatrixMarket matrix array real general\n-1 2\n");
  parse_error("%%MatrixMarket matrix array real general\n100000 100000\n");
  parse_error("%%MatrixMarket matrix array real general\n1 1\nnan\n");
}

TEST(ReadVector, MatrixMarketAndPlain) {
  std::istringstream mm("%%MatrixMarket matrix array real general\n3 1\n1\n2\n3\n");
  DenseVector want(3);
  want << 1, 2, 3;
  EXPECT_EQ(read_vector(mm, "b.mtx"), want);
  std::istringstream plain("# rhs\n1 2\n\n  3\n");
  EXPECT_EQ(read_vector(plain, "b.txt"), want);

  std::istringstream wide("%%MatrixMarket matrix array real general\n1 2\n1\n2\n");
  EXPECT_THROW(read_vector(wide, "w.mtx"), Error);
  std::istringstream bad("1 2\nthree\n");
  try {
    read_vector(bad, "b.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("b.txt:2"), std::string::npos);
  }
  std::istringstream empty("");
  EXPECT_THROW(read_vector(empty, "e.txt"), Error);
}

TEST(MatrixMarket, MissingFile) {
  try {
    read_matrix_market("/nonexistent/dir/a.mtx");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/a.mtx"), std::string::npos);
  }
}

TEST(MatrixMarket, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix m(1 + trial % 5, 1 + trial % 3);
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = std::ldexp(normal(rng), expo(rng) / 10);
    m(0, 0) = std::numeric_limits<double>::denorm_min();
    std::ostringstream out;
    write_matrix_market(out, m);
    std::istringstream in(out.str());
    EXPECT_EQ(read_matrix_market(in, "rt"), m);
  }
}

}  // namespace
}  // namespace tlscond
