#pragma once

#include <Eigen/Dense>

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtcpp {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Type label in 1..k. Stored 1-based so that every file format and
/// printed value agrees with the usual {1,...,k} labelling.
struct TypeIndex {
  int value = 1;

  constexpr int zero_based() const { return value - 1; }
  static constexpr TypeIndex from_zero(int i) { return TypeIndex{i + 1}; }

  friend constexpr auto operator<=>(const TypeIndex&, const TypeIndex&) = default;
};

using TypeList = std::vector<TypeIndex>;

/// Left-to-right placement rule for the offspring of one parent.
enum class Ordering {
  uniform,   // uniformly random permutation of the offspring multiset
  lf_first,  // linear-fractional: the h-distributed child is leftmost
};

// Error hierarchy. The CLI maps each family onto a distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Malformed input files or configuration.
struct SchemaError : Error {
  using Error::Error;
};
/// A precondition on arguments was violated.
struct DomainError : Error {
  using Error::Error;
};
/// A resource guard (node cap, rejection cap, state-space guard) was hit.
struct GuardError : Error {
  using Error::Error;
};
/// Conditioning on an event of (numerically) zero probability.
struct ConditioningError : Error {
  using Error::Error;
};
/// Two independent evaluation routes disagreed beyond tolerance.
struct NumericConsistencyError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

std::string to_string(const TypeList& types, char sep = '-');

}  // namespace mtcpp
