#include "arnagg/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace arnagg {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
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

bool parse_real(std::string_view token, double& value) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_index(std::string_view token, long long& value) {
  token = trim(token);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".mtx" ? MatrixFormat::MatrixMarket
                                                    : MatrixFormat::DenseCsv;
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

MatrixStorage read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing Matrix Market header");
  {
    const auto tokens = split_whitespace(line);
    if (tokens.size() != 5 || lower(tokens[0]) != "%%matrixmarket" || lower(tokens[1]) != "matrix" ||
        lower(tokens[2]) != "coordinate" ||
        (lower(tokens[3]) != "real" && lower(tokens[3]) != "integer") ||
        lower(tokens[4]) != "general")
      throw ParseError(1, "expected '%%MatrixMarket matrix coordinate real general'");
  }

  long long rows = -1, cols = -1, nnz = -1;
  std::vector<Eigen::Triplet<double>> triplets;
  long long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '%') continue;
    const auto tokens = split_whitespace(view);
    if (rows < 0) {
      if (tokens.size() != 3 || !parse_index(tokens[0], rows) || !parse_index(tokens[1], cols) ||
          !parse_index(tokens[2], nnz) || rows < 0 || cols < 0 || nnz < 0)
        throw ParseError(line_no, "expected 'rows cols entries'");
      triplets.reserve(static_cast<std::size_t>(nnz));
      continue;
    }
    long long i = 0, j = 0;
    double v = 0.0;
    if (tokens.size() != 3 || !parse_index(tokens[0], i) || !parse_index(tokens[1], j) ||
        !parse_real(tokens[2], v))
      throw ParseError(line_no, "expected 'row col value'");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ShapeError("line " + std::to_string(line_no) + ": entry (" + std::to_string(i) + ", " +
                       std::to_string(j) + ") outside " + std::to_string(rows) + "x" +
                       std::to_string(cols) + " matrix");
    if (++seen > nnz) throw ParseError(line_no, "more entries than declared");
    triplets.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
  }
  if (rows < 0) throw ParseError(line_no, "missing size line");
  if (seen != nnz)
    throw ParseError(line_no, "declared " + std::to_string(nnz) + " entries, found " +
                                  std::to_string(seen));

  SparseMatrix M(static_cast<Index>(rows), static_cast<Index>(cols));
  M.setFromTriplets(triplets.begin(), triplets.end());
  return MatrixStorage(std::move(M));
}

MatrixStorage read_dense_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view cell =
          view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      double v = 0.0;
      if (!parse_real(cell, v)) throw ParseError(line_no, "bad number '" + std::string(cell) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ShapeError("line " + std::to_string(line_no) + ": row has " +
                       std::to_string(row.size()) + " columns, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  const Index r = static_cast<Index>(rows.size());
  const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  RowMajorMatrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return MatrixStorage(std::move(M));
}

void write_matrix_market(const MatrixStorage& M, std::ostream& out) {
  std::size_t nnz = 0;
  M.for_each_entry([&](Index, Index, double v) { nnz += v != 0.0; });
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << M.rows() << ' ' << M.cols() << ' ' << nnz << '\n';
  M.for_each_entry([&](Index i, Index j, double v) {
    if (v != 0.0) out << (i + 1) << ' ' << (j + 1) << ' ' << format_real(v) << '\n';
  });
}

void write_dense_csv(const MatrixStorage& M, std::ostream& out) {
  const DenseMatrix D = M.to_dense();
  for (Index i = 0; i < D.rows(); ++i) {
    for (Index j = 0; j < D.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(D(i, j));
    }
    out << '\n';
  }
}

MatrixStorage load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  auto in = open_input(path);
  return format == MatrixFormat::MatrixMarket ? read_matrix_market(in) : read_dense_csv(in);
}

MatrixStorage load_matrix(const std::filesystem::path& path) {
  return load_matrix(path, format_from_path(path));
}

void save_matrix(const MatrixStorage& M, const std::filesystem::path& path, MatrixFormat format) {
  auto out = open_output(path);
  if (format == MatrixFormat::MatrixMarket)
    write_matrix_market(M, out);
  else
    write_dense_csv(M, out);
}

void save_matrix(const MatrixStorage& M, const std::filesystem::path& path) {
  save_matrix(M, path, format_from_path(path));
}

StochasticMatrix load_stochastic(const std::filesystem::path& path, double tol) {
  return validate_stochastic(load_matrix(path), tol);
}

GeneratorMatrix load_generator(const std::filesystem::path& path, double tol) {
  return validate_generator(load_matrix(path), tol);
}

Vector read_vector_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    double v = 0.0;
    if (!parse_real(view, v)) throw ParseError(line_no, "bad number '" + std::string(view) + "'");
    values.push_back(v);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void write_vector_csv(const Eigen::Ref<const Vector>& v, std::ostream& out) {
  for (Index i = 0; i < v.size(); ++i) out << format_real(v[i]) << '\n';
}

Vector load_vector(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vector_csv(in);
}

void save_vector(const Eigen::Ref<const Vector>& v, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_vector_csv(v, out);
}

}  // namespace arnagg
