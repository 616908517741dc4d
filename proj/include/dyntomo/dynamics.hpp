#pragma once

#include "dyntomo/core.hpp"
#include "dyntomo/rng.hpp"
#include "dyntomo/subspace.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dyntomo {

// Square pixel grid, 1-based indices: i = row, j = column, both in 1..side.
// Pixels are stored column-major: linear offset of (i,j) is (j-1)*side + (i-1).
struct GridSpec {
  Index side = 1;

  Index size() const { return side * side; }
  Index offset(Index i, Index j) const { return (j - 1) * side + (i - 1); }
};

// Dynamics (stationary L, or the tuple L_1..L_{T-1}) paired with the
// projection P that produces each measurement. The optional grid tags systems
// whose states are pixel images.
template <class Scalar>
struct SystemModel {
  std::vector<Matrix<Scalar>> dynamics;
  bool stationary = true;
  Matrix<Scalar> P;
  std::string label;
  std::optional<GridSpec> grid;

  Index n() const { return P.cols(); }
  Index m() const { return P.rows(); }

  // Operator applied between x_t and x_{t+1}; t is 1-based.
  const Matrix<Scalar>& L_at(Index t) const {
    if (stationary) return dynamics.front();
    if (t < 1 || t > static_cast<Index>(dynamics.size()))
      throw std::invalid_argument("SystemModel: step index outside the dynamics tuple");
    return dynamics[static_cast<std::size_t>(t - 1)];
  }

  // Largest T such that x_1..x_T is computable.
  bool supports_steps(Index T) const {
    return stationary || T - 1 <= static_cast<Index>(dynamics.size());
  }
};

using SystemModeld = SystemModel<double>;

namespace detail {
template <class Scalar>
void validate_system(const SystemModel<Scalar>& s) {
  if (s.P.rows() < 1 || s.P.cols() < 1)
    throw std::invalid_argument("SystemModel: projection must be nonempty");
  if (s.P.rows() > s.P.cols())
    throw std::invalid_argument("SystemModel: projection has more rows than columns");
  require_finite(s.P, "SystemModel projection");
  if (numerical_rank(s.P) != s.P.rows())
    throw std::invalid_argument("SystemModel: projection must have full row rank");
  if (s.dynamics.empty())
    throw std::invalid_argument("SystemModel: at least one dynamics matrix required");
  for (const auto& L : s.dynamics) {
    if (L.rows() != s.P.cols() || L.cols() != s.P.cols())
      throw std::invalid_argument("SystemModel: dynamics blocks must be n x n with n = cols(P)");
    require_finite(L, "SystemModel dynamics");
  }
}
}  // namespace detail

template <class Scalar>
SystemModel<Scalar> make_system(Matrix<Scalar> L, Matrix<Scalar> P,
                                std::string label = {},
                                std::optional<GridSpec> grid = {}) {
  SystemModel<Scalar> s;
  s.dynamics.push_back(std::move(L));
  s.stationary = true;
  s.P = std::move(P);
  s.label = std::move(label);
  s.grid = grid;
  detail::validate_system(s);
  return s;
}

template <class Scalar>
SystemModel<Scalar> make_system(std::vector<Matrix<Scalar>> Ls, Matrix<Scalar> P,
                                std::string label = {},
                                std::optional<GridSpec> grid = {}) {
  SystemModel<Scalar> s;
  s.dynamics = std::move(Ls);
  s.stationary = false;
  s.P = std::move(P);
  s.label = std::move(label);
  s.grid = grid;
  detail::validate_system(s);
  return s;
}

// g x g^2 matrix summing pixel values down each grid column: row j has ones
// exactly at the offsets of column j.
inline Matrixd column_sum_projection(const GridSpec& grid) {
  const Index g = grid.side;
  Matrixd p = Matrixd::Zero(g, grid.size());
  for (Index j = 1; j <= g; ++j)
    for (Index i = 1; i <= g; ++i) p(j - 1, grid.offset(i, j)) = 1.0;
  return p;
}

// The 6-dimensional cyclic shift e1 -> e2 -> ... -> e6 -> e1 observed through
// the first two coordinates. Chain dims 4,3,2,1,0: one ambiguity dimension
// dies per step instead of the generic two.
inline SystemModeld cyclic_example() {
  Matrixd L = Matrixd::Zero(6, 6);
  for (Index i = 0; i < 6; ++i) L((i + 1) % 6, i) = 1.0;
  Matrixd P = Matrixd::Zero(2, 6);
  P(0, 0) = 1.0;
  P(1, 1) = 1.0;
  return make_system(std::move(L), std::move(P), "cyclic6");
}

enum class Boundary { Reflecting, Periodic };

// One explicit-Euler step of 5-point-stencil diffusion with a per-cell
// coefficient:  x'_a = x_a + kappa(a) * sum_{b ~ a} (x_b - x_a).
// Reflecting boundaries drop out-of-grid neighbors; periodic boundaries wrap
// (on tiny grids a neighbor can repeat, which just doubles its weight).
// Every row sums to exactly 1 by construction.
inline Matrixd diffusion_operator(const GridSpec& grid,
                                  const std::function<double(Index, Index)>& kappa,
                                  Boundary boundary) {
  const Index g = grid.side;
  Matrixd d = Matrixd::Identity(grid.size(), grid.size());
  const auto wrap = [g](Index v) { return ((v - 1) % g + g) % g + 1; };
  for (Index j = 1; j <= g; ++j) {
    for (Index i = 1; i <= g; ++i) {
      const Index a = grid.offset(i, j);
      const double k = kappa(i, j);
      if (!(k >= 0.0 && k <= 0.25))
        throw std::invalid_argument(
            "diffusion_operator: coefficient outside the stable range [0, 1/4]");
      const Index nbr[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& ij : nbr) {
        Index ii = ij[0], jj = ij[1];
        if (boundary == Boundary::Periodic) {
          ii = wrap(ii);
          jj = wrap(jj);
        } else if (ii < 1 || ii > g || jj < 1 || jj > g) {
          continue;
        }
        d(a, a) -= k;
        d(a, grid.offset(ii, jj)) += k;
      }
    }
  }
  return d;
}

// Permutation cyclically moving every pixel column right by `shift`
// (negative = left).
inline Matrixd column_shift(const GridSpec& grid, Index shift) {
  const Index g = grid.side;
  if (shift <= -g || shift >= g)
    throw std::invalid_argument("column_shift: |shift| must be smaller than the grid side");
  Matrixd s = Matrixd::Zero(grid.size(), grid.size());
  for (Index j = 1; j <= g; ++j) {
    const Index jt = ((j - 1 + shift) % g + g) % g + 1;
    for (Index i = 1; i <= g; ++i) s(grid.offset(i, jt), grid.offset(i, j)) = 1.0;
  }
  return s;
}

// Uniform-coefficient diffusion followed by a cyclic column shift (composed
// as S * D so the diffusion acts first). Reflecting boundaries.
inline Matrixd shift_diffusion(const GridSpec& grid, double kappa, Index shift) {
  if (!(kappa >= 0.0 && kappa <= 0.25))
    throw std::invalid_argument("shift_diffusion: kappa must lie in [0, 1/4]");
  Matrixd d = diffusion_operator(
      grid, [kappa](Index, Index) { return kappa; }, Boundary::Reflecting);
  if (shift == 0) return d;
  return column_shift(grid, shift) * d;
}

// Diffusion coefficient growing across the grid: (1/5) * (i^3 j^2 1e-5)^(1/4).
// Equals exactly 0.2 at (10,10).
inline double variable_kappa(Index i, Index j) {
  const double ii = static_cast<double>(i);
  const double jj = static_cast<double>(j);
  return 0.2 * std::pow(ii * ii * ii * jj * jj * 1e-5, 0.25);
}

// Variable-coefficient diffusion step on a periodic grid. The wraparound
// couples the slow-coefficient corner to the fast zone, which keeps all n
// modes visible to the column-sum projection within n/g steps; with walls the
// slow corner is diffusively isolated and the last few modes drown below
// double-precision noise. Rejects grids whose largest coefficient exceeds the
// explicit-Euler stability bound 1/4 (side <= 11 passes).
inline Matrixd variable_diffusion(const GridSpec& grid) {
  const double kmax = variable_kappa(grid.side, grid.side);
  if (kmax > 0.25)
    throw std::invalid_argument(
        "variable_diffusion: coefficient formula exceeds the stability bound 1/4 "
        "on this grid (side must be <= 11)");
  return diffusion_operator(grid, variable_kappa, Boundary::Periodic);
}

// n x n matrix of independent standard normals from the SplitMix64 + polar
// stream; entries are drawn row by row. Identical for identical seeds.
inline Matrixd random_dynamics(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_dynamics: n must be positive");
  NormalSampler sampler(seed);
  Matrixd L(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) L(r, c) = sampler.next();
  return L;
}

// `count` such matrices drawn back-to-back from one stream; the first one
// coincides with random_dynamics(n, seed).
inline std::vector<Matrixd> random_dynamics_tuple(Index n, std::uint64_t seed,
                                                  Index count) {
  if (n < 1 || count < 1)
    throw std::invalid_argument("random_dynamics_tuple: n and count must be positive");
  NormalSampler sampler(seed);
  std::vector<Matrixd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    Matrixd L(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) L(r, c) = sampler.next();
    out.push_back(std::move(L));
  }
  return out;
}

// Pixel (i,j) gets exp(-((i-ci)^2 + (j-cj)^2) / (2 sigma^2)).
inline Vectord gaussian_blob(const GridSpec& grid, double center_i, double center_j,
                             double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blob: sigma must be positive");
  Vectord x(grid.size());
  for (Index j = 1; j <= grid.side; ++j) {
    for (Index i = 1; i <= grid.side; ++i) {
      const double di = static_cast<double>(i) - center_i;
      const double dj = static_cast<double>(j) - center_j;
      x(grid.offset(i, j)) = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    }
  }
  return x;
}

}  // namespace dyntomo
