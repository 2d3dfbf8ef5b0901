#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>

namespace ttgs {

using Scalar = double;
using Index = Eigen::Index;

inline constexpr Scalar kInfinity = std::numeric_limits<Scalar>::infinity();

template <int Rows = Eigen::Dynamic, int Cols = Rows>
using Matrix = Eigen::Matrix<Scalar, Rows, Cols>;

template <int Rows = Eigen::Dynamic>
using Vector = Eigen::Matrix<Scalar, Rows, 1>;

// States are stored one per row; row-major keeps each state contiguous so a
// row can be handed to a predictor without copying.
using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StateMatrix = RowMatrix;
using StateVector = Vector<>;

template <class Derived>
using Ref = Eigen::Ref<Derived>;
template <class Derived>
using ConstRef = Eigen::Ref<const Derived>;

// Base error for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, bad input files, or violated call preconditions.
// The CLI maps these to exit code 2; anything else exits 1.
class InputError : public Error {
 public:
  using Error::Error;
};

// Requested target is unreachable in the planning graph.
class NoPathError : public Error {
 public:
  using Error::Error;
};

// Half-open [start, start + length) range of state-vector components,
// typically the position block used by the normalized L2 distance.
struct IndexRange {
  Index start = 0;
  Index length = 0;

  Index end() const { return start + length; }

  void check_within(Index dim, const std::string& what) const {
    if (start < 0 || length <= 0 || end() > dim) {
      throw InputError(what + ": index range [" + std::to_string(start) + ", " +
                       std::to_string(end()) + ") invalid for dimension " +
                       std::to_string(dim));
    }
  }

  bool operator==(const IndexRange&) const = default;
};

}  // namespace ttgs
