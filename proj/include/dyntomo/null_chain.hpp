#pragma once

#include "dyntomo/dynamics.hpp"
#include "dyntomo/subspace.hpp"

#include <optional>
#include <vector>

namespace dyntomo {

// The descending chain N_1 = null(P), N_{k+1} = N_1 cap L_k(N_k). Its
// dimensions count the ambiguity left after k measurements; the system is
// uniquely determined once some N_k is trivial.
template <class Scalar>
struct NullChain {
  SystemModel<Scalar> system;
  std::vector<Subspace<Scalar>> subspaces;  // N_1 .. N_K
  std::vector<Index> dims;
  std::optional<Index> k_star;      // smallest k with dim N_k = 0
  std::optional<Index> stalled_at;  // first i with dim N_{i+1} = dim N_i != 0
  Index max_steps = 0;
  RankTolerance tol;
};

using NullChaind = NullChain<double>;

template <class Scalar>
NullChain<Scalar> compute_chain(const SystemModel<Scalar>& system, Index max_steps,
                                const RankTolerance& tol = {}) {
  if (max_steps < 1)
    throw std::invalid_argument("compute_chain: max_steps must be at least 1");
  if (!system.stationary &&
      static_cast<Index>(system.dynamics.size()) < max_steps - 1)
    throw std::invalid_argument(
        "compute_chain: time-varying tuple provides fewer operators than max_steps - 1");

  NullChain<Scalar> chain{system, {}, {}, {}, {}, max_steps, tol};
  chain.subspaces.reserve(static_cast<std::size_t>(max_steps));
  chain.subspaces.push_back(null_space(system.P, tol));
  chain.dims.push_back(chain.subspaces.back().dim());
  // Copy: growing chain.subspaces would invalidate a reference into it.
  const Subspace<Scalar> n1 = chain.subspaces.front();

  while (static_cast<Index>(chain.subspaces.size()) < max_steps &&
         chain.subspaces.back().dim() > 0) {
    const Index k = static_cast<Index>(chain.subspaces.size());
    Subspace<Scalar> next =
        intersect(n1, image(system.L_at(k), chain.subspaces.back(), tol), tol);
    if (!chain.stalled_at && next.dim() == chain.subspaces.back().dim())
      chain.stalled_at = k;
    chain.subspaces.push_back(std::move(next));
    chain.dims.push_back(chain.subspaces.back().dim());
  }
  for (std::size_t i = 0; i < chain.dims.size(); ++i) {
    if (chain.dims[i] == 0) {
      chain.k_star = static_cast<Index>(i) + 1;
      break;
    }
  }
  return chain;
}

enum class OptimalStatus { Yes, No, Undecided };

// Diagnostics against the theoretical floor ceil(n/m): did the chain die as
// fast as dimension counting allows, and was every step transverse?
struct ReductionReport {
  Index lower_bound = 0;
  std::optional<Index> k_star;
  OptimalStatus optimal = OptimalStatus::Undecided;
  std::vector<bool> transverse_profile;  // step i: N_1 vs L_i(N_i)
  bool bound_satisfied = true;  // dim N_i <= dim N - i + 1 over the computed prefix
  bool conditioning_warning = false;
  double worst_condition = 0.0;
};

namespace detail {
template <class Scalar>
double condition_estimate(const Matrix<Scalar>& m) {
  Eigen::BDCSVD<Matrix<Scalar>> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0)) return 0.0;
  const auto smin = sv(sv.size() - 1);
  return smin > 0 ? static_cast<double>(sv(0) / smin)
                  : std::numeric_limits<double>::infinity();
}
}  // namespace detail

template <class Scalar>
ReductionReport reduction_report(const NullChain<Scalar>& chain) {
  const Index n = chain.system.n();
  const Index m = chain.system.m();
  ReductionReport rep;
  rep.lower_bound = (n + m - 1) / m;

  rep.k_star = chain.k_star;
  if (chain.k_star) {
    rep.optimal = (*chain.k_star == rep.lower_bound) ? OptimalStatus::Yes
                                                     : OptimalStatus::No;
  } else if (chain.stalled_at && chain.system.stationary) {
    // A stalled stationary chain is constant forever: N_k never dies.
    rep.optimal = OptimalStatus::No;
  } else if (static_cast<Index>(chain.dims.size()) >= rep.lower_bound) {
    // Survived past the floor, so it cannot die exactly at the floor.
    rep.optimal = OptimalStatus::No;
  } else {
    rep.optimal = OptimalStatus::Undecided;  // chain too short to decide
  }

  const Subspace<Scalar>& n1 = chain.subspaces.front();
  for (std::size_t i = 0; i + 1 < chain.subspaces.size(); ++i) {
    const Index step = static_cast<Index>(i) + 1;
    const auto img = image(chain.system.L_at(step), chain.subspaces[i], chain.tol);
    rep.transverse_profile.push_back(is_transverse(n1, img, chain.tol));
  }

  const Index p = chain.dims.empty() ? 0 : chain.dims.front();
  for (Index i = 1; i <= static_cast<Index>(chain.dims.size()) && i <= p + 1; ++i) {
    if (chain.dims[static_cast<std::size_t>(i - 1)] > p - i + 1) {
      rep.bound_satisfied = false;
      break;
    }
  }

  for (const auto& L : chain.system.dynamics) {
    const double c = detail::condition_estimate(L);
    rep.worst_condition = std::max(rep.worst_condition, c);
  }
  rep.conditioning_warning = rep.worst_condition > 1e12;
  return rep;
}

// The subspace a stalled chain is pinned to, plus how far it is from being
// exactly invariant under the stalling operator. A stall forces
// L(N_i) = N_i: the next element N_1 cap L(N_i) sits inside L(N_i) with the
// same dimension as N_i, which is only possible when L maps N_i onto itself.
template <class Scalar>
struct StallWitness {
  Subspace<Scalar> subspace;
  Index index = 0;                  // the i with dim N_{i+1} = dim N_i
  double invariance_residual = 0.0; // subspace_distance(L(N_i), N_i)
};

template <class Scalar>
std::optional<StallWitness<Scalar>> stall_witness(const NullChain<Scalar>& chain) {
  if (!chain.stalled_at) return std::nullopt;
  const Index i = *chain.stalled_at;
  const Subspace<Scalar>& ni = chain.subspaces[static_cast<std::size_t>(i - 1)];
  const auto img = image(chain.system.L_at(i), ni, chain.tol);
  StallWitness<Scalar> w{ni, i, subspace_distance(img, ni)};
  return w;
}

namespace detail {
template <class Scalar>
void require_invertible_blocks(const SystemModel<Scalar>& system, Index count,
                               const RankTolerance& tol, const char* who) {
  const Index n = system.n();
  const Index blocks = system.stationary ? 1 : count;
  for (Index t = 1; t <= blocks; ++t) {
    if (numerical_rank(system.L_at(t), tol) != n)
      throw std::invalid_argument(std::string(who) +
                                  ": all dynamics blocks must be invertible");
  }
}
}  // namespace detail

// Ranks of the stacked row blocks
//   [ B^T ; B^T M_1 ; ... ; B^T M_{k-1} ],  M_j = (L_{k-1} ... L_{k-j})^{-1},
// where B spans null(P)^perp, for k = 2..T. Each rank is the codimension of
// the k-fold intersection N cap L_{k-1}(N) cap ... — so n minus it equals
// dim N_k. Requires invertible dynamics (inverses are taken literally).
template <class Scalar>
std::vector<Index> stacked_complement_dims(const SystemModel<Scalar>& system, Index T,
                                           const RankTolerance& tol = {}) {
  if (T < 2) throw std::invalid_argument("stacked_complement_dims: T must be at least 2");
  if (!system.supports_steps(T))
    throw std::invalid_argument("stacked_complement_dims: tuple shorter than T - 1");
  detail::require_invertible_blocks(system, T - 1, tol, "stacked_complement_dims");

  const Index n = system.n();
  const Matrix<Scalar> bt =
      orth_complement(null_space(system.P, tol)).basis.transpose();
  const Index m = bt.rows();

  std::vector<Matrix<Scalar>> inv;  // inverse of each distinct block used
  const Index blocks = system.stationary ? 1 : T - 1;
  inv.reserve(static_cast<std::size_t>(blocks));
  for (Index t = 1; t <= blocks; ++t)
    inv.push_back(system.L_at(t).inverse());
  const auto inv_at = [&](Index t) -> const Matrix<Scalar>& {
    return system.stationary ? inv.front() : inv[static_cast<std::size_t>(t - 1)];
  };

  std::vector<Index> ranks;
  ranks.reserve(static_cast<std::size_t>(T - 1));
  for (Index k = 2; k <= T; ++k) {
    Matrix<Scalar> stack(m * k, n);
    stack.topRows(m) = bt;
    Matrix<Scalar> composed = Matrix<Scalar>::Identity(n, n);
    for (Index j = 1; j < k; ++j) {
      composed = inv_at(k - j) * composed;
      stack.middleRows(m * j, m) = bt * composed;
    }
    // Each row spans a direction of a complement subspace; the inverse
    // partial products scale those directions exponentially, so normalize
    // rows (rank-invariant) to keep the tolerance meaningful at large k.
    for (Index r = 0; r < stack.rows(); ++r) {
      const auto norm = stack.row(r).norm();
      if (norm > 0) stack.row(r) /= norm;
    }
    ranks.push_back(numerical_rank(stack, tol));
  }
  return ranks;
}

// dim span(B, LB, ..., L^{k-1}B) for k = 1..k_max, with B spanning
// null(P)^perp. Stationary dynamics only.
template <class Scalar>
std::vector<Index> krylov_span_dims(const SystemModel<Scalar>& system, Index k_max,
                                    const RankTolerance& tol = {}) {
  if (!system.stationary)
    throw std::invalid_argument("krylov_span_dims: stationary dynamics required");
  if (k_max < 1) throw std::invalid_argument("krylov_span_dims: k_max must be positive");

  const Index n = system.n();
  const Matrix<Scalar> b = orth_complement(null_space(system.P, tol)).basis;
  const Index m = b.cols();
  const Matrix<Scalar>& L = system.L_at(1);

  Matrix<Scalar> krylov(n, m * k_max);
  Matrix<Scalar> cur = b;
  std::vector<Index> dims;
  dims.reserve(static_cast<std::size_t>(k_max));
  for (Index k = 0; k < k_max; ++k) {
    if (k > 0) cur = L * cur;
    krylov.middleCols(m * k, m) = cur;
    dims.push_back(numerical_rank(krylov.leftCols(m * (k + 1)), tol));
  }
  return dims;
}

}  // namespace dyntomo
