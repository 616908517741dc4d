#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace dyntomo {

using Index = Eigen::Index;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = Matrix<double>;
using Vectord = Vector<double>;

// Relative singular-value cutoff for rank decisions: sigma_i counts as
// nonzero when sigma_i > relative_threshold * sigma_max.
struct RankTolerance {
  double relative_threshold = 1e-10;
};

inline void check_tolerance(const RankTolerance& tol) {
  if (!(tol.relative_threshold > 0.0 && tol.relative_threshold < 1.0))
    throw std::invalid_argument(
        "RankTolerance.relative_threshold must lie strictly between 0 and 1");
}

// Raised when a computation (not its input) produces non-finite values or a
// factorization breaks down; the CLI maps this to its own exit code.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
  if (!m.allFinite())
    throw numerical_error(std::string(where) + ": non-finite entries encountered");
}

}  // namespace dyntomo
