#pragma once

#include "dyntomo/core.hpp"

#include <algorithm>

namespace dyntomo {

// Subspace of R^n carried as an orthonormal basis. Zero basis columns encode
// the trivial subspace {0}; a square basis encodes all of R^n.
template <class Scalar>
struct Subspace {
  Index ambient_dim = 0;
  Matrix<Scalar> basis;  // ambient_dim x dim, orthonormal columns

  Index dim() const { return basis.cols(); }
  bool trivial() const { return basis.cols() == 0; }
};

using Subspaced = Subspace<double>;

template <class Scalar>
Subspace<Scalar> trivial_subspace(Index ambient) {
  return {ambient, Matrix<Scalar>(ambient, 0)};
}

template <class Scalar>
Subspace<Scalar> full_subspace(Index ambient) {
  return {ambient, Matrix<Scalar>::Identity(ambient, ambient)};
}

// max |B^T B - I|; 0 for the trivial subspace.
template <class Scalar>
double orthonormality_defect(const Subspace<Scalar>& s) {
  if (s.trivial()) return 0.0;
  Matrix<Scalar> g = s.basis.transpose() * s.basis;
  g -= Matrix<Scalar>::Identity(s.dim(), s.dim());
  return static_cast<double>(g.cwiseAbs().maxCoeff());
}

// Count of singular values above relative_threshold * sigma_max.
template <class Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m,
                     const RankTolerance& tol = {}) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  check_tolerance(tol);
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("numerical_rank: empty matrix");
  require_finite(m, "numerical_rank");
  Eigen::BDCSVD<Matrix<Scalar>> svd(m.derived());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > Real(0))) return 0;
  const Real cut = static_cast<Real>(tol.relative_threshold) * sv(0);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

// Orthonormal basis of {x : Mx = 0} from the right singular vectors past the
// numerical rank.
template <class Derived>
Subspace<typename Derived::Scalar> null_space(const Eigen::MatrixBase<Derived>& m,
                                              const RankTolerance& tol = {}) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  check_tolerance(tol);
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("null_space: empty matrix");
  require_finite(m, "null_space");
  Eigen::BDCSVD<Matrix<Scalar>> svd(m.derived(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Index r = 0;
  if (sv.size() > 0 && sv(0) > Real(0)) {
    const Real cut = static_cast<Real>(tol.relative_threshold) * sv(0);
    while (r < sv.size() && sv(r) > cut) ++r;
  }
  return {m.cols(), svd.matrixV().rightCols(m.cols() - r)};
}

// Orthonormalized span of L * basis(S). The rank cut discards directions
// collapsed by L.
template <class Derived, class Scalar>
Subspace<Scalar> image(const Eigen::MatrixBase<Derived>& L, const Subspace<Scalar>& s,
                       const RankTolerance& tol = {}) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  check_tolerance(tol);
  if (L.cols() != s.ambient_dim)
    throw std::invalid_argument("image: operator/subspace dimension mismatch");
  if (s.trivial()) return trivial_subspace<Scalar>(L.rows());
  Matrix<Scalar> k = L.derived() * s.basis;
  require_finite(k, "image");
  Eigen::BDCSVD<Matrix<Scalar>> svd(k, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index r = 0;
  if (sv.size() > 0 && sv(0) > Real(0)) {
    const Real cut = static_cast<Real>(tol.relative_threshold) * sv(0);
    while (r < sv.size() && sv(r) > cut) ++r;
  }
  return {L.rows(), svd.matrixU().leftCols(r)};
}

template <class Scalar>
Subspace<Scalar> orth_complement(const Subspace<Scalar>& s) {
  const Index n = s.ambient_dim;
  const Index k = s.dim();
  if (k == 0) return full_subspace<Scalar>(n);
  if (k == n) return trivial_subspace<Scalar>(n);
  // Full Q of a QR factorization: trailing n-k columns are orthonormal and
  // orthogonal to the (full-column-rank) basis.
  Eigen::HouseholderQR<Matrix<Scalar>> qr(s.basis);
  Matrix<Scalar> q = qr.householderQ();
  return {n, q.rightCols(n - k)};
}

// Intersection via the complement identity (S1 cap S2)^perp =
// span(S1^perp, S2^perp): stack the two complements and take the null space
// of the transpose.
template <class Scalar>
Subspace<Scalar> intersect(const Subspace<Scalar>& s1, const Subspace<Scalar>& s2,
                           const RankTolerance& tol = {}) {
  if (s1.ambient_dim != s2.ambient_dim)
    throw std::invalid_argument("intersect: ambient dimension mismatch");
  const Index n = s1.ambient_dim;
  const Subspace<Scalar> c1 = orth_complement(s1);
  const Subspace<Scalar> c2 = orth_complement(s2);
  const Index c = c1.dim() + c2.dim();
  if (c == 0) return full_subspace<Scalar>(n);
  Matrix<Scalar> stacked(n, c);
  stacked << c1.basis, c2.basis;
  return null_space(stacked.transpose(), tol);
}

// Transversality by the dimension equation: the intersection has the minimum
// possible dimension max(d1 + d2 - n, 0).
template <class Scalar>
bool is_transverse(const Subspace<Scalar>& s1, const Subspace<Scalar>& s2,
                   const RankTolerance& tol = {}) {
  if (s1.ambient_dim != s2.ambient_dim)
    throw std::invalid_argument("is_transverse: ambient dimension mismatch");
  const Index expected =
      std::max<Index>(s1.dim() + s2.dim() - s1.ambient_dim, 0);
  return intersect(s1, s2, tol).dim() == expected;
}

// Largest principal-angle sine of S1 against S2: 0 iff S1 is contained in S2.
// Not symmetric; callers wanting equality test both directions.
template <class Scalar>
double subspace_distance(const Subspace<Scalar>& s1, const Subspace<Scalar>& s2) {
  if (s1.ambient_dim != s2.ambient_dim)
    throw std::invalid_argument("subspace_distance: ambient dimension mismatch");
  if (s1.trivial()) return 0.0;
  if (s2.trivial()) return 1.0;
  Matrix<Scalar> resid =
      s1.basis - s2.basis * (s2.basis.transpose() * s1.basis);
  Eigen::BDCSVD<Matrix<Scalar>> svd(resid);
  const auto& sv = svd.singularValues();
  return sv.size() > 0 ? static_cast<double>(sv(0)) : 0.0;
}

}  // namespace dyntomo
