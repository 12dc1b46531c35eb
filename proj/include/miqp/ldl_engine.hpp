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

#include <cassert>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "miqp/types.hpp"

namespace miqp {

namespace detail {
// Wider accumulator for refinement residuals.
template <typename Scalar>
struct Wide {
  using type = Scalar;
};
template <>
struct Wide<double> {
  using type = long double;
};
template <>
struct Wide<float> {
  using type = double;
};
}  // namespace detail

/// Incrementally maintained LDL' factorization of the Gram matrix
/// M_W M_W' for the working-set rows W of a constraint matrix M.
///
/// Rows are appended with a bordered update (one triangular solve plus one
/// new pivot) and removed by refactorizing the trailing block. At most the
/// trailing pivot may be numerically zero; while it is, the factor is
/// `singular` and refuses further appends — the caller must remove a row
/// first. A pivot counts as zero below a scale-relative floor in the
/// largest squared row norm, or below the cancellation noise of its own
/// computation (gram_ii - l'Dl of near-equal magnitude carries absolute
/// error of that magnitude times machine epsilon; without the second term,
/// exactly dependent rows can sneak past the flag on roundoff alone).
/// The factorization is unpivoted, so the flagged-nonsingular regime must
/// keep systems solvable in working precision: pivots below the floor go
/// down the singular path instead of poisoning later solves.
template <typename Scalar>
class LdlFactor {
 public:
  LdlFactor(Index m, Index n)
      : cols_(n),
        capacity_(std::min(m, n + 1)),
        lmat_(MatrixX<Scalar>::Zero(capacity_, capacity_)),
        gram_(MatrixX<Scalar>::Zero(capacity_, capacity_)),
        pivots_(VectorX<Scalar>::Zero(capacity_)) {
    order_.reserve(capacity_);
  }

  Index size() const { return static_cast<Index>(order_.size()); }
  bool empty() const { return order_.empty(); }
  bool singular() const { return singular_; }
  const std::vector<int>& order() const { return order_; }
  Scalar pivot(Index t) const { return pivots_[t]; }

  Scalar singularity_tol() const {
    const Index k = size();
    Scalar g = Scalar(1);
    for (Index t = 0; t < k; ++t) g = std::max(g, gram_(t, t));
    return Scalar(1e-10) * g;
  }

  /// Append constraint row i. Requires a nonsingular factor and i not
  /// already a member.
  void add_row(const MatrixX<Scalar>& M, int i) {
    if (singular_) throw SingularFactor();
    const Index k = size();
    VectorX<Scalar> w(k);
    for (Index t = 0; t < k; ++t) w[t] = M.row(order_[t]).dot(M.row(i));
    append(w, M.row(i).squaredNorm(), i);
  }

  /// Drop the member at position `pos` in insertion order. The trailing
  /// block is refactorized from the stored Gram entries, so the result is
  /// identical to a fresh factorization of the surviving rows in their
  /// surviving order.
  void remove_row(Index pos) {
    const Index k = size();
    assert(pos >= 0 && pos < k);
    std::vector<int> tail(order_.begin() + pos + 1, order_.end());
    // Compact the Gram matrix around the removed row.
    for (Index a = pos; a < k - 1; ++a)
      for (Index b = 0; b < k; ++b) gram_(a, b) = gram_(a + 1, b);
    for (Index b = pos; b < k - 1; ++b)
      for (Index a = 0; a < k - 1; ++a) gram_(a, b) = gram_(a, b + 1);
    order_.resize(pos);
    singular_ = false;
    for (std::size_t t = 0; t < tail.size(); ++t) {
      const Index at = pos + static_cast<Index>(t);
      const VectorX<Scalar> w = gram_.row(at).head(at);
      append(w, gram_(at, at), tail[t]);
    }
  }

  /// Stationary point of the equality-constrained dual subproblem:
  /// solves M_W M_W' lambda = -rhs through the factor, followed by
  /// iterative refinement against the stored Gram matrix with the
  /// residual accumulated in wider precision.
  VectorX<Scalar> solve_stationary(const VectorX<Scalar>& rhs) const {
    if (singular_) throw SingularFactor();
    using WideScalar = typename detail::Wide<Scalar>::type;
    const Index k = size();
    assert(rhs.size() == k);
    VectorX<Scalar> lam = backsolve(-rhs);
    VectorX<Scalar> r(k);
    for (int step = 0; step < 2 && k > 0; ++step) {
      for (Index t = 0; t < k; ++t) {
        WideScalar acc = -WideScalar(rhs[t]);
        for (Index s = 0; s < k; ++s)
          acc -= WideScalar(gram_(t, s)) * WideScalar(lam[s]);
        r[t] = Scalar(acc);
      }
      lam += backsolve(r);
    }
    return lam;
  }

  struct Direction {
    VectorX<Scalar> p;
    bool zero_descent = false;
  };

  /// Null-space direction exposed by the zero trailing pivot, with the
  /// sign chosen so that rhs'p < 0. When the directional derivative
  /// vanishes (|rhs'p| <= 1e-12) the direction is returned unsigned with
  /// `zero_descent` set and the caller resolves the degeneracy.
  Direction singular_direction(const VectorX<Scalar>& rhs) const {
    if (!singular_) throw SingularFactor();
    const Index k = size();
    assert(rhs.size() == k);
    Direction dir;
    dir.p.resize(k);
    dir.p[k - 1] = Scalar(1);
    for (Index t = k - 2; t >= 0; --t)
      dir.p[t] = -lmat_.col(t).segment(t + 1, k - 1 - t)
                      .dot(dir.p.segment(t + 1, k - 1 - t));
    const Scalar slope = rhs.dot(dir.p);
    if (std::abs(double(slope)) <= 1e-12) {
      dir.zero_descent = true;
    } else if (slope > Scalar(0)) {
      dir.p = -dir.p;
    }
    return dir;
  }

  /// Dense reconstruction L diag(D) L' of the factored Gram matrix.
  MatrixX<Scalar> reconstruct() const {
    const Index k = size();
    MatrixX<Scalar> L = lmat_.topLeftCorner(k, k);
    L.template triangularView<Eigen::StrictlyUpper>().setZero();
    L.diagonal().setOnes();
    return L * pivots_.head(k).asDiagonal() * L.transpose();
  }

 private:
  // Solve L diag(D) L' x = b.
  VectorX<Scalar> backsolve(const VectorX<Scalar>& b) const {
    const Index k = size();
    VectorX<Scalar> y(k);
    for (Index t = 0; t < k; ++t)
      y[t] = b[t] - lmat_.row(t).head(t).dot(y.head(t));
    for (Index t = 0; t < k; ++t) y[t] /= pivots_[t];
    VectorX<Scalar> x(k);
    for (Index t = k - 1; t >= 0; --t)
      x[t] = y[t] - lmat_.col(t).segment(t + 1, k - 1 - t)
                        .dot(x.segment(t + 1, k - 1 - t));
    return x;
  }

  // Border the factor with a row whose Gram column is w and squared norm
  // is gram_ii: solve L diag(D) l = w, new pivot = gram_ii - l'Dl.
  void append(const VectorX<Scalar>& w, Scalar gram_ii, int i) {
    const Index k = size();
    assert(k < capacity_);
    VectorX<Scalar> y(k);
    for (Index t = 0; t < k; ++t)
      y[t] = w[t] - lmat_.row(t).head(t).dot(y.head(t));
    Scalar d_new = gram_ii;
    Scalar cancel = gram_ii;
    for (Index t = 0; t < k; ++t) {
      lmat_(k, t) = y[t] / pivots_[t];
      d_new -= lmat_(k, t) * y[t];
      cancel += lmat_(k, t) * y[t];  // l'Dl is a sum of non-negative terms
    }
    lmat_(k, k) = Scalar(1);
    pivots_[k] = d_new;
    for (Index t = 0; t < k; ++t) {
      gram_(k, t) = w[t];
      gram_(t, k) = w[t];
    }
    gram_(k, k) = gram_ii;
    order_.push_back(i);
    // More rows than columns means the Gram matrix is rank-deficient no
    // matter what the (pure roundoff) trailing pivot says.
    singular_ =
        d_new <= std::max(singularity_tol(), Scalar(1e-13) * cancel) ||
        size() > cols_;
  }

  Index cols_;
  Index capacity_;
  MatrixX<Scalar> lmat_;
  MatrixX<Scalar> gram_;
  VectorX<Scalar> pivots_;
  std::vector<int> order_;
  bool singular_ = false;
};

}  // namespace miqp
