#include "dyntomo/io.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

using namespace dyntomo;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("dyntomo_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void expect_error(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
    FAIL_CHECK("expected io::input_error containing '" << needle << "'");
  } catch (const io::input_error& e) {
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("matrices round-trip bit for bit, awkward values included") {
  const fs::path dir = fresh_dir("matrix_roundtrip");
  Matrixd m(2, 4);
  m << 1.0 / 3.0, 0.1, -0.0, 1e17,
       3.141592653589793, 1e-308, 5e-324, -1.7976931348623157e308;
  const fs::path file = dir / "m.mat";
  io::write_matrix(file, m);
  const Matrixd back = io::read_matrix(file);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 4);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 4; ++j) {
      CHECK(back(i, j) == m(i, j));
      CHECK(std::signbit(back(i, j)) == std::signbit(m(i, j)));
    }
  // Atomic write leaves no temporary behind.
  CHECK_FALSE(fs::exists(dir / "m.mat.tmp"));
}

TEST_CASE("matrix reader tolerates blank padding and carriage returns") {
  const fs::path dir = fresh_dir("matrix_padding");
  const fs::path file = dir / "p.mat";
  put_file(file, "\n  \n1 2\r\n0.5 -3\n\n");
  const Matrixd m = io::read_matrix(file);
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 0.5);
  CHECK(m(0, 1) == -3.0);
}

TEST_CASE("matrix reader reports the offending file, line, and token") {
  const fs::path dir = fresh_dir("matrix_errors");
  const fs::path file = dir / "bad.mat";

  expect_error([&] { io::read_matrix(dir / "missing.mat"); }, "missing.mat");

  put_file(file, "");
  expect_error([&] { io::read_matrix(file); }, "empty file");

  put_file(file, "3\n1 2 3\n");
  expect_error([&] { io::read_matrix(file); }, "expected header 'rows cols'");

  put_file(file, "2 -1\n");
  expect_error([&] { io::read_matrix(file); }, "must be positive");

  put_file(file, "1 2\n0.5 oops\n");
  expect_error([&] { io::read_matrix(file); }, "not a number: 'oops'");
  expect_error([&] { io::read_matrix(file); }, "bad.mat:2");

  put_file(file, "2 2\n1 2\n");
  expect_error([&] { io::read_matrix(file); }, "expected 2 data rows, got 1");

  put_file(file, "1 2\n1 2 3\n");
  expect_error([&] { io::read_matrix(file); }, "expected 2 values, got 3");

  put_file(file, "1 1\n1\n7\n");
  expect_error([&] { io::read_matrix(file); }, "unexpected data after matrix rows");

  put_file(file, "1 1\ninf\n");
  expect_error([&] { io::read_matrix(file); }, "non-finite");

  put_file(file, "1 1\n1e400\n");
  expect_error([&] { io::read_matrix(file); }, "non-finite");
}

TEST_CASE("measurement sequences round-trip through the CSV layout") {
  const fs::path dir = fresh_dir("sequence_roundtrip");
  std::vector<Vectord> seq;
  Vectord d1(2), d2(2), d3(2);
  d1 << 0.25, -1.0 / 3.0;
  d2 << 1e-12, 42.0;
  d3 << -0.0, 7.5;
  seq = {d1, d2, d3};
  const fs::path file = dir / "data.csv";
  io::write_sequence(file, seq);

  CHECK(slurp(file).rfind("t,component_index,value\n1,1,0.25\n", 0) == 0);

  const auto back = io::read_sequence(file);
  REQUIRE(back.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    REQUIRE(back[t].size() == 2);
    CHECK(back[t](0) == seq[t](0));
    CHECK(back[t](1) == seq[t](1));
  }
}

TEST_CASE("sequence reader enforces the contiguous t / ordered k contract") {
  const fs::path dir = fresh_dir("sequence_errors");
  const fs::path file = dir / "bad.csv";

  put_file(file, "time,component,value\n1,1,0.5\n");
  expect_error([&] { io::read_sequence(file); },
               "expected header 't,component_index,value'");

  put_file(file, "t,component_index,value\n");
  expect_error([&] { io::read_sequence(file); }, "no data rows");

  put_file(file, "t,component_index,value\n1,1,0.5\n3,1,0.5\n");
  expect_error([&] { io::read_sequence(file); }, "contiguously");

  put_file(file, "t,component_index,value\n1,2,0.5\n");
  expect_error([&] { io::read_sequence(file); }, "contiguously");

  put_file(file, "t,component_index,value\n1,1,0.5\n1,3,0.5\n");
  expect_error([&] { io::read_sequence(file); }, "contiguously");

  put_file(file, "t,component_index,value\n1,1\n");
  expect_error([&] { io::read_sequence(file); }, "expected 3 comma-separated fields");

  put_file(file, "t,component_index,value\n1,1,\n");
  expect_error([&] { io::read_sequence(file); }, "not a number");

  // Uniform component counts across t.
  put_file(file, "t,component_index,value\n1,1,1\n1,2,2\n2,1,3\n");
  expect_error([&] { io::read_sequence(file); }, "expected 2");
}

TEST_CASE("PGM writer: golden output for a 2x2 grid") {
  const fs::path dir = fresh_dir("pgm");
  GridSpec g{2};
  Vectord x(4);
  // Column-major offsets: (1,1), (2,1), (1,2), (2,2).
  x << 0.0, 1.0, 0.5, 0.25;
  io::write_pgm(dir / "img.pgm", g, x);
  CHECK(slurp(dir / "img.pgm") == "P2\n2 2\n255\n0 128\n255 64\n");

  io::write_pgm(dir / "flat.pgm", g, Vectord(Vectord::Constant(4, 3.25)));
  CHECK(slurp(dir / "flat.pgm") == "P2\n2 2\n255\n0 0\n0 0\n");

  expect_error([&] { io::write_pgm(dir / "no.pgm", g, Vectord::Ones(5)); },
               "does not match grid");
}

TEST_CASE("format_double emits shortest-round-trip decimal text") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e-7}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-0.0) == "-0");
}

TEST_CASE("atomic_write refuses unwritable destinations") {
  expect_error(
      [] { io::atomic_write("/nonexistent_dir_zzz/file.txt", "x"); },
      "nonexistent_dir_zzz");
}
