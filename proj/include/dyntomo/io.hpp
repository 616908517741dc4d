#pragma once

#include "dyntomo/core.hpp"
#include "dyntomo/dynamics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dyntomo::io {

// Unusable input: missing/malformed file, inconsistent dimensions. The CLI
// maps this (and std::invalid_argument) to its input-error exit code.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest text that round-trips a finite double exactly.
std::string format_double(double v);

// Write-temp-then-rename so readers never observe a half-written file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Matrix file: first line "rows cols", then `rows` lines of `cols`
// whitespace-separated decimals. parse(serialize(M)) == M bit-exactly.
void write_matrix(const std::filesystem::path& path, const Matrixd& m);
Matrixd read_matrix(const std::filesystem::path& path);

// Measurement/state sequence CSV: header "t,component_index,value", one row
// per (time, component), times contiguous from 1, components 1..m in order.
void write_sequence(const std::filesystem::path& path,
                    const std::vector<Vectord>& seq);
std::vector<Vectord> read_sequence(const std::filesystem::path& path);

// ASCII PGM (P2) of a grid state, linearly rescaled to 0..255; a constant
// state maps to all zeros. Image row r is grid row i = r+1.
void write_pgm(const std::filesystem::path& path, const GridSpec& grid,
               const Vectord& state);

}  // namespace dyntomo::io
