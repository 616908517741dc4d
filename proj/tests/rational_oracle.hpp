#pragma once

// Exact matrix rank over the rationals, independent of every floating-point
// rank decision in the library: fraction-free (Bareiss) elimination on
// integer matrices. All divisions in the Bareiss recurrence are exact, so the
// result is the true rank as long as nothing overflows.
//
// Intermediates live in __int128. Bareiss entries after step k are k+1 minors,
// bounded by Hadamard: |minor_k| <= k^(k/2) * B^k for |entries| <= B. The
// recurrence multiplies two such minors before dividing, so callers must keep
// (k^(k/2) B^k)^2 below ~1.7e38. For the suites here: 8x8 with B = 64
// (grid 1/16 scaled up) peaks near 1.3e36, and 5x5 with B = 1024 (grid 1/256)
// near 3e26 — both comfortably inside.

#include "dyntomo/core.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace oracle {

using Int = __int128;

inline dyntomo::Index bareiss_rank(std::vector<std::vector<long long>> rows) {
  if (rows.empty()) return 0;
  const std::size_t nr = rows.size();
  const std::size_t nc = rows[0].size();
  std::vector<std::vector<Int>> m(nr, std::vector<Int>(nc));
  for (std::size_t i = 0; i < nr; ++i) {
    if (rows[i].size() != nc) throw std::invalid_argument("ragged matrix");
    for (std::size_t j = 0; j < nc; ++j) m[i][j] = rows[i][j];
  }

  Int prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; ++c) {
    std::size_t pivot = r;
    while (pivot < nr && m[pivot][c] == 0) ++pivot;
    if (pivot == nr) continue;
    std::swap(m[pivot], m[r]);
    for (std::size_t i = r + 1; i < nr; ++i) {
      for (std::size_t j = c + 1; j < nc; ++j)
        m[i][j] = (m[i][j] * m[r][c] - m[i][c] * m[r][j]) / prev;
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
  }
  return static_cast<dyntomo::Index>(r);
}

// Rank of a double matrix whose entries are exact multiples of 1/denom.
inline dyntomo::Index dyadic_rank(const dyntomo::Matrixd& m, long long denom) {
  std::vector<std::vector<long long>> rows(
      static_cast<std::size_t>(m.rows()),
      std::vector<long long>(static_cast<std::size_t>(m.cols())));
  for (dyntomo::Index i = 0; i < m.rows(); ++i) {
    for (dyntomo::Index j = 0; j < m.cols(); ++j) {
      const double scaled = m(i, j) * static_cast<double>(denom);
      const double rounded = std::nearbyint(scaled);
      if (scaled != rounded)
        throw std::invalid_argument("entry is not a multiple of 1/denom");
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          static_cast<long long>(rounded);
    }
  }
  return bareiss_rank(std::move(rows));
}

}  // namespace oracle
