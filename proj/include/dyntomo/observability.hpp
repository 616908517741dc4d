#pragma once

#include "dyntomo/dynamics.hpp"
#include "dyntomo/subspace.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace dyntomo {

// n x (m*T) matrix whose i-th row concatenates the measurements the i-th
// basis vector would generate: (P b_i, P L b_i, ..., P L^{T-1} b_i). Unique
// recovery of the trajectory from T measurements is exactly rank = n.
template <class Scalar>
struct ExtendedMatrix {
  Matrix<Scalar> E;
  Index T = 0;
  Index rank = 0;
  double condition = 0.0;  // ratio of extreme singular values counted by rank
  bool rank_deficient = false;
};

using ExtendedMatrixd = ExtendedMatrix<double>;

// Relative rank cutoff for extended matrices: max(rows, cols) * machine eps.
// These matrices legitimately run at condition 1e10..1e13 near full rank, so
// the generic subspace threshold (1e-10) would misread them as deficient;
// everything below the eps scale is genuinely indistinguishable from zero.
template <class Scalar>
typename Eigen::NumTraits<Scalar>::Real extended_rank_threshold(Index rows, Index cols) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  return static_cast<Real>(std::max(rows, cols)) *
         Eigen::NumTraits<Scalar>::epsilon();
}

template <class Scalar>
ExtendedMatrix<Scalar> build_extended(const SystemModel<Scalar>& system, Index T) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (T < 1) throw std::invalid_argument("build_extended: T must be at least 1");
  if (!system.supports_steps(T))
    throw std::invalid_argument("build_extended: tuple provides fewer than T - 1 operators");

  const Index n = system.n();
  const Index m = system.m();
  ExtendedMatrix<Scalar> ext;
  ext.T = T;
  ext.E.resize(n, m * T);
  Matrix<Scalar> phi = Matrix<Scalar>::Identity(n, n);  // L_{t-1} ... L_1
  for (Index t = 0; t < T; ++t) {
    if (t > 0) phi = system.L_at(t) * phi;
    ext.E.middleCols(t * m, m) = (system.P * phi).transpose();
  }
  require_finite(ext.E, "build_extended");

  Eigen::BDCSVD<Matrix<Scalar>> svd(ext.E);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv(0) > Real(0)) {
    const Real cut = extended_rank_threshold<Scalar>(n, m * T) * sv(0);
    while (ext.rank < sv.size() && sv(ext.rank) > cut) ++ext.rank;
  }
  if (ext.rank > 0)
    ext.condition = static_cast<double>(sv(0) / sv(ext.rank - 1));
  ext.rank_deficient = ext.rank < std::min(n, m * T);
  return ext;
}

template <class Scalar>
struct Trajectory {
  std::vector<Vector<Scalar>> states;  // x_1 .. x_T
};

template <class Scalar>
struct MeasurementSequence {
  std::vector<Vector<Scalar>> data;  // d_1 .. d_T
};

using Trajectoryd = Trajectory<double>;
using MeasurementSequenced = MeasurementSequence<double>;

// Forward iteration x_{t+1} = L_t x_t with d_t = P x_t; x_1 is the given
// initial state.
template <class Scalar>
std::pair<Trajectory<Scalar>, MeasurementSequence<Scalar>> simulate(
    const SystemModel<Scalar>& system, const Vector<Scalar>& x0, Index T) {
  if (T < 1) throw std::invalid_argument("simulate: T must be at least 1");
  if (x0.size() != system.n())
    throw std::invalid_argument("simulate: initial state has wrong dimension");
  if (!system.supports_steps(T))
    throw std::invalid_argument("simulate: tuple provides fewer than T - 1 operators");
  require_finite(x0, "simulate initial state");

  Trajectory<Scalar> traj;
  MeasurementSequence<Scalar> meas;
  traj.states.reserve(static_cast<std::size_t>(T));
  meas.data.reserve(static_cast<std::size_t>(T));
  Vector<Scalar> x = x0;
  for (Index t = 1; t <= T; ++t) {
    require_finite(x, "simulate state");
    traj.states.push_back(x);
    meas.data.push_back(system.P * x);
    if (t < T) x = system.L_at(t) * x;
  }
  return {std::move(traj), std::move(meas)};
}

// Banded block operator whose null space is exactly the set of
// dynamics-consistent trajectories: block row t is [0 .. L_t  -I .. 0].
template <class Scalar>
Matrix<Scalar> build_block_A(const SystemModel<Scalar>& system, Index T) {
  if (T < 2) throw std::invalid_argument("build_block_A: T must be at least 2");
  if (!system.supports_steps(T))
    throw std::invalid_argument("build_block_A: tuple provides fewer than T - 1 operators");
  const Index n = system.n();
  Matrix<Scalar> a = Matrix<Scalar>::Zero((T - 1) * n, T * n);
  for (Index t = 1; t < T; ++t) {
    a.block((t - 1) * n, (t - 1) * n, n, n) = system.L_at(t);
    a.block((t - 1) * n, t * n, n, n) = -Matrix<Scalar>::Identity(n, n);
  }
  return a;
}

// Block-diagonal stacking of P acting on a whole trajectory.
template <class Scalar>
Matrix<Scalar> build_block_P(const SystemModel<Scalar>& system, Index T) {
  if (T < 1) throw std::invalid_argument("build_block_P: T must be at least 1");
  const Index n = system.n();
  const Index m = system.m();
  Matrix<Scalar> p = Matrix<Scalar>::Zero(m * T, n * T);
  for (Index t = 0; t < T; ++t) p.block(t * m, t * n, m, n) = system.P;
  return p;
}

// The authoritative uniqueness test, valid for singular dynamics too: the
// stack of A over the block-diagonal P has trivial null space iff no nonzero
// trajectory is both dynamics-consistent and invisible to every measurement.
template <class Scalar>
bool oracle_unique(const SystemModel<Scalar>& system, Index T,
                   const RankTolerance& tol = {}) {
  if (T < 2) throw std::invalid_argument("oracle_unique: T must be at least 2");
  const Index n = system.n();
  const Index m = system.m();
  Matrix<Scalar> stack((T - 1) * n + m * T, n * T);
  stack.topRows((T - 1) * n) = build_block_A(system, T);
  stack.bottomRows(m * T) = build_block_P(system, T);
  return numerical_rank(stack, tol) == n * T;
}

template <class Scalar>
struct ReconstructionResult {
  Vector<Scalar> x0;
  Trajectory<Scalar> trajectory;
  double residual = 0.0;  // ||x0 E - d~|| in the row-vector convention
  bool unique = false;
  Index rank = 0;
  double condition = 0.0;
};

using ReconstructionResultd = ReconstructionResult<double>;

// Minimum-norm least-squares solve of the row-vector equation x0 E = d~
// (equivalently E^T x0^T = d~^T). The SVD solve truncates only at the same
// eps-scale cutoff the rank decision uses: harsher truncation amputates
// genuinely informative directions once E's condition passes ~1e10 and ruins
// the recovery; the setting is noiseless, so no regularization.
template <class Scalar>
ReconstructionResult<Scalar> reconstruct(const SystemModel<Scalar>& system,
                                         const MeasurementSequence<Scalar>& data,
                                         const RankTolerance& tol = {}) {
  const Index T = static_cast<Index>(data.data.size());
  if (T < 1) throw std::invalid_argument("reconstruct: empty measurement sequence");
  const Index n = system.n();
  const Index m = system.m();
  for (const auto& d : data.data) {
    if (d.size() != m)
      throw std::invalid_argument("reconstruct: measurement size does not match P");
    require_finite(d, "reconstruct data");
  }
  if (!system.supports_steps(T))
    throw std::invalid_argument("reconstruct: tuple provides fewer than T - 1 operators");

  ExtendedMatrix<Scalar> ext = build_extended(system, T);
  Vector<Scalar> dtil(m * T);
  for (Index t = 0; t < T; ++t) dtil.segment(t * m, m) = data.data[static_cast<std::size_t>(t)];

  Eigen::BDCSVD<Matrix<Scalar>> svd(ext.E.transpose(),
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(extended_rank_threshold<Scalar>(m * T, n));
  ReconstructionResult<Scalar> res;
  res.x0 = svd.solve(dtil);
  require_finite(res.x0, "reconstruct solution");
  res.residual = static_cast<double>((ext.E.transpose() * res.x0 - dtil).norm());
  res.rank = ext.rank;
  res.condition = ext.condition;

  bool all_invertible = true;
  const Index blocks = system.stationary ? 1 : T - 1;
  for (Index t = 1; t <= blocks && all_invertible; ++t)
    all_invertible = numerical_rank(system.L_at(t), tol) == n;
  if (all_invertible || T < 2)
    res.unique = ext.rank == n;
  else
    res.unique = oracle_unique(system, T, tol);

  res.trajectory = simulate(system, res.x0, T).first;
  return res;
}

}  // namespace dyntomo
