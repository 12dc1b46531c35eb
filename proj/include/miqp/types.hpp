// Copyright 2026 the miqp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace miqp {

using Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
constexpr Scalar inf() {
  return std::numeric_limits<Scalar>::infinity();
}

/// Thrown by cholesky_upper when a pivot falls below the positive
/// definiteness tolerance. Regularizing the problem usually fixes this.
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(Index pivot, double value)
      : std::runtime_error("matrix is not positive definite (pivot " +
                           std::to_string(pivot) + " = " +
                           std::to_string(value) + ")"),
        pivot_(pivot) {}
  Index pivot() const { return pivot_; }

 private:
  Index pivot_;
};

/// Thrown when a linear solve is requested on a factor whose trailing
/// pivot is (numerically) zero, or a row is appended to such a factor.
class SingularFactor : public std::logic_error {
 public:
  SingularFactor() : std::logic_error("LDL factor is singular") {}
};

/// Guard against exponential enumeration blowing up.
class TooManyBinaries : public std::invalid_argument {
 public:
  explicit TooManyBinaries(int nb)
      : std::invalid_argument("problem has " + std::to_string(nb) +
                              " binary constraints; enumeration is capped "
                              "at 20") {}
};

enum class BoundSide : std::int8_t { lower, upper };

/// Quadratic program with two-sided affine constraints of which a subset
/// must hold with equality at one of its two bounds:
///
///   minimize    1/2 x'Hx + f'x
///   subject to  b_lo <= Ax <= b_hi
///               A_i x in {b_lo_i, b_hi_i}   for i in binary
///
/// Bounds may be +-infinity except on binary rows. Binary indices are
/// 0-based and strictly increasing.
template <typename Scalar>
struct MiqpProblem {
  MatrixX<Scalar> H;
  VectorX<Scalar> f;
  MatrixX<Scalar> A;
  VectorX<Scalar> b_lo;
  VectorX<Scalar> b_hi;
  std::vector<int> binary;

  Index n() const { return H.rows(); }
  Index m() const { return A.rows(); }
  int nb() const { return static_cast<int>(binary.size()); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// The same problem mapped to least-distance form through u = Rx + v with
/// H = R'R and v = R^-T f:
///
///   minimize    1/2 ||u||^2
///   subject to  d_lo <= Mu <= d_hi,  M = A R^-1,  d = b + Mv
///
/// `offset` = 1/2 ||v||^2 converts objectives back: q(x) = 1/2||u||^2 - offset.
template <typename Scalar>
struct LdpProblem {
  MatrixX<Scalar> M;
  VectorX<Scalar> d_lo;
  VectorX<Scalar> d_hi;
  std::vector<int> binary;
  MatrixX<Scalar> R;
  VectorX<Scalar> v;
  Scalar offset = Scalar(0);

  Index n() const { return M.cols(); }
  Index m() const { return M.rows(); }
  int nb() const { return static_cast<int>(binary.size()); }
};

template <typename Scalar>
void MiqpProblem<Scalar>::validate() const {
  const Index nn = H.rows();
  const Index mm = A.rows();
  if (H.cols() != nn) throw std::invalid_argument("H must be square");
  for (Index i = 0; i < nn; ++i)
    for (Index j = i + 1; j < nn; ++j)
      if (H(i, j) != H(j, i))
        throw std::invalid_argument("H must be symmetric as stored");
  if (f.size() != nn) throw std::invalid_argument("f has wrong length");
  if (A.cols() != nn) throw std::invalid_argument("A has wrong column count");
  if (b_lo.size() != mm) throw std::invalid_argument("b_lo has wrong length");
  if (b_hi.size() != mm) throw std::invalid_argument("b_hi has wrong length");
  for (Index i = 0; i < mm; ++i) {
    if (std::isnan(double(b_lo[i])) || std::isnan(double(b_hi[i])))
      throw std::invalid_argument("bounds may not be NaN");
    if (b_lo[i] > b_hi[i])
      throw std::invalid_argument("b_lo exceeds b_hi at row " +
                                  std::to_string(i));
  }
  int prev = -1;
  for (int i : binary) {
    if (i <= prev)
      throw std::invalid_argument("binary indices must be strictly increasing");
    if (i < 0 || i >= mm)
      throw std::invalid_argument("binary index out of range: " +
                                  std::to_string(i));
    if (!std::isfinite(double(b_lo[i])) || !std::isfinite(double(b_hi[i])))
      throw std::invalid_argument("binary row " + std::to_string(i) +
                                  " must have finite bounds");
    if (!(b_lo[i] < b_hi[i]))
      throw std::invalid_argument("binary row " + std::to_string(i) +
                                  " must have b_lo < b_hi");
    prev = i;
  }
}

}  // namespace miqp
