#include "dyntomo/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dyntomo::io {
namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& what) {
  throw input_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_double(const std::filesystem::path& path, std::size_t line,
                    const std::string& tok) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    fail(path, line, "not a number: '" + tok + "'");
  if (!std::isfinite(v)) fail(path, line, "non-finite value: '" + tok + "'");
  return v;
}

long long parse_int(const std::filesystem::path& path, std::size_t line,
                    const std::string& tok) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty() || errno == ERANGE)
    fail(path, line, "not an integer: '" + tok + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

std::vector<std::string> split_comma(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw input_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw input_error("cannot rename " + tmp.string() + " to " + path.string() +
                      ": " + ec.message());
}

void write_matrix(const std::filesystem::path& path, const Matrixd& m) {
  std::ostringstream out;
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

Matrixd read_matrix(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  std::size_t ln = 0;
  while (ln < lines.size() && split_ws(lines[ln]).empty()) ++ln;
  if (ln == lines.size()) throw input_error(path.string() + ": empty file");

  auto header = split_ws(lines[ln]);
  if (header.size() != 2)
    fail(path, ln + 1, "expected header 'rows cols'");
  long long rows = parse_int(path, ln + 1, header[0]);
  long long cols = parse_int(path, ln + 1, header[1]);
  if (rows <= 0 || cols <= 0)
    fail(path, ln + 1, "matrix dimensions must be positive");
  ++ln;

  Matrixd m(rows, cols);
  for (long long i = 0; i < rows; ++i, ++ln) {
    if (ln >= lines.size())
      fail(path, lines.size(), "expected " + std::to_string(rows) +
                                   " data rows, got " + std::to_string(i));
    auto toks = split_ws(lines[ln]);
    if (static_cast<long long>(toks.size()) != cols)
      fail(path, ln + 1, "expected " + std::to_string(cols) + " values, got " +
                             std::to_string(toks.size()));
    for (long long j = 0; j < cols; ++j)
      m(i, j) = parse_double(path, ln + 1, toks[j]);
  }
  for (; ln < lines.size(); ++ln)
    if (!split_ws(lines[ln]).empty())
      fail(path, ln + 1, "unexpected data after matrix rows");
  return m;
}

void write_sequence(const std::filesystem::path& path,
                    const std::vector<Vectord>& seq) {
  std::ostringstream out;
  out << "t,component_index,value\n";
  for (std::size_t t = 0; t < seq.size(); ++t)
    for (Index k = 0; k < seq[t].size(); ++k)
      out << (t + 1) << ',' << (k + 1) << ',' << format_double(seq[t][k])
          << '\n';
  atomic_write(path, out.str());
}

std::vector<Vectord> read_sequence(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw input_error(path.string() + ": empty file");
  if (split_comma(lines[0]) !=
      std::vector<std::string>{"t", "component_index", "value"})
    fail(path, 1, "expected header 't,component_index,value'");

  std::vector<std::vector<double>> rows_by_t;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (split_ws(lines[ln]).empty()) continue;
    auto f = split_comma(lines[ln]);
    if (f.size() != 3) fail(path, ln + 1, "expected 3 comma-separated fields");
    long long t = parse_int(path, ln + 1, f[0]);
    long long k = parse_int(path, ln + 1, f[1]);
    double v = parse_double(path, ln + 1, f[2]);
    if (t == static_cast<long long>(rows_by_t.size()) + 1 && k == 1) {
      rows_by_t.emplace_back();
    } else if (t != static_cast<long long>(rows_by_t.size()) ||
               rows_by_t.empty() ||
               k != static_cast<long long>(rows_by_t.back().size()) + 1) {
      fail(path, ln + 1,
           "rows must advance t contiguously from 1 with component_index "
           "1..m in order");
    }
    rows_by_t.back().push_back(v);
  }
  if (rows_by_t.empty()) throw input_error(path.string() + ": no data rows");
  const std::size_t m = rows_by_t.front().size();
  std::vector<Vectord> seq;
  for (std::size_t t = 0; t < rows_by_t.size(); ++t) {
    if (rows_by_t[t].size() != m)
      throw input_error(path.string() + ": time " + std::to_string(t + 1) +
                        " has " + std::to_string(rows_by_t[t].size()) +
                        " components, expected " + std::to_string(m));
    seq.push_back(Eigen::Map<const Vectord>(rows_by_t[t].data(), m));
  }
  return seq;
}

void write_pgm(const std::filesystem::path& path, const GridSpec& grid,
               const Vectord& state) {
  if (state.size() != grid.size())
    throw input_error("state size " + std::to_string(state.size()) +
                      " does not match grid " + std::to_string(grid.side) +
                      "x" + std::to_string(grid.side));
  const double lo = state.minCoeff();
  const double hi = state.maxCoeff();
  const double span = hi - lo;
  std::ostringstream out;
  out << "P2\n" << grid.side << ' ' << grid.side << "\n255\n";
  for (Index i = 1; i <= grid.side; ++i) {
    for (Index j = 1; j <= grid.side; ++j) {
      long pix = 0;
      if (span > 0)
        pix = std::lround(255.0 * (state[grid.offset(i, j)] - lo) / span);
      if (j > 1) out << ' ';
      out << pix;
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

}  // namespace dyntomo::io
