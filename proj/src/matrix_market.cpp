#include "tlscond/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

// Matrices past this many entries are refused rather than allocated.
constexpr long long kMaxEntries = 1LL << 31;

class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  /// Next line that is neither blank nor a '%' comment.
  bool next_data(std::string& line) {
    while (next(line)) {
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '%') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, name_ + ":" + std::to_string(line_no_) + ": " + msg);
  }

  const std::string& name() const noexcept { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  long long line_no_ = 0;
};

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_double(std::string_view tok, double& v) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

bool parse_index(std::string_view tok, long long& v) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

double value_or_fail(const LineReader& r, std::string_view tok) {
  double v = 0.0;
  if (!parse_double(tok, v)) r.fail("invalid number '" + std::string(tok) + "'");
  if (!std::isfinite(v)) r.fail("non-finite value '" + std::string(tok) + "'");
  return v;
}

struct Header {
  bool coordinate = false;
};

Header parse_banner(LineReader& r, const std::string& banner) {
  const auto tok = split(banner);
  if (tok.size() != 5 || lower(tok[0]) != "%%matrixmarket") {
    r.fail("expected '%%MatrixMarket matrix <format> <field> <symmetry>' banner");
  }
  if (lower(tok[1]) != "matrix") r.fail("unsupported object '" + std::string(tok[1]) + "'");
  const std::string format = lower(tok[2]);
  if (format != "array" && format != "coordinate") {
    r.fail("unsupported format '" + std::string(tok[2]) + "'");
  }
  const std::string field = lower(tok[3]);
  if (field != "real" && field != "integer" && field != "double") {
    r.fail("unsupported field '" + std::string(tok[3]) + "' (need real)");
  }
  if (lower(tok[4]) != "general") {
    r.fail("unsupported symmetry '" + std::string(tok[4]) + "' (need general)");
  }
  return {format == "coordinate"};
}

DenseMatrix read_body(LineReader& r, const Header& h) {
  std::string line;
  if (!r.next_data(line)) r.fail("missing size line");
  const auto size = split(line);
  long long rows = 0, cols = 0, nnz = 0;
  const std::size_t want = h.coordinate ? 3 : 2;
  if (size.size() != want || !parse_index(size[0], rows) || !parse_index(size[1], cols) ||
      (h.coordinate && !parse_index(size[2], nnz))) {
    r.fail("malformed size line");
  }
  if (rows < 0 || cols < 0 || nnz < 0) r.fail("negative dimension");
  if (rows != 0 && cols > kMaxEntries / rows) r.fail("dimension overflow");
  if (h.coordinate && nnz > rows * cols) r.fail("more entries than the matrix holds");

  DenseMatrix m = DenseMatrix::Zero(rows, cols);
  if (h.coordinate) {
    for (long long k = 0; k < nnz; ++k) {
      if (!r.next_data(line)) r.fail("expected " + std::to_string(nnz) + " entries");
      const auto tok = split(line);
      long long i = 0, j = 0;
      if (tok.size() != 3 || !parse_index(tok[0], i) || !parse_index(tok[1], j)) {
        r.fail("malformed coordinate entry");
      }
      if (i < 1 || i > rows || j < 1 || j > cols) r.fail("index out of range");
      m(i - 1, j - 1) += value_or_fail(r, tok[2]);
    }
  } else {
    const long long total = rows * cols;
    long long k = 0;
    while (k < total) {
      if (!r.next_data(line)) r.fail("expected " + std::to_string(total) + " values");
      for (std::string_view tok : split(line)) {
        if (k >= total) r.fail("too many values");
        m(k % rows, k / rows) = value_or_fail(r, tok);
        ++k;
      }
    }
  }
  if (r.next_data(line)) r.fail("trailing data");
  return m;
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  return in;
}

}  // namespace

DenseMatrix read_matrix_market(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  std::string banner;
  if (!r.next(banner)) r.fail("empty file");
  const Header h = parse_banner(r, banner);
  return read_body(r, h);
}

DenseMatrix read_matrix_market(const std::string& path) {
  auto in = open_or_fail(path);
  return read_matrix_market(in, path);
}

DenseVector read_vector(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  std::string line;
  if (!r.next(line)) r.fail("empty file");
  if (line.rfind("%%", 0) == 0) {
    const DenseMatrix m = read_body(r, parse_banner(r, line));
    if (m.cols() != 1) r.fail("right-hand side must have one column");
    return m.col(0);
  }
  std::vector<double> values;
  do {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
    for (std::string_view tok : split(line)) values.push_back(value_or_fail(r, tok));
  } while (r.next(line));
  if (values.empty()) r.fail("no values");
  return Eigen::Map<const DenseVector>(values.data(), static_cast<Index>(values.size()));
}

DenseVector read_vector(const std::string& path) {
  auto in = open_or_fail(path);
  return read_vector(in, path);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  out << "%%MatrixMarket matrix array real general\n" << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << '\n';
    }
  }
}

void write_matrix_market(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, path + ": cannot open file for writing");
  write_matrix_market(out, m);
  if (!out) throw Error(ErrorCode::ParseError, path + ": write failed");
}

}  // namespace tlscond
