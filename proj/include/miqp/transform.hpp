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

#include <cmath>

#include <Eigen/Dense>

#include "miqp/types.hpp"

namespace miqp {

/// Upper-triangular Cholesky factor R with H = R'R and a strictly positive
/// diagonal. The pivot test is scale-relative: a pivot at or below
/// 1e-12 * trace(H)/n raises NotPositiveDefinite.
template <typename Derived>
MatrixX<typename Derived::Scalar> cholesky_upper(
    const Eigen::MatrixBase<Derived>& H) {
  using Scalar = typename Derived::Scalar;
  const Index n = H.rows();
  const Scalar tol_pd =
      std::max(Scalar(1e-12) * H.diagonal().sum() / Scalar(n > 0 ? n : 1),
               Scalar(0));
  MatrixX<Scalar> R = MatrixX<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const Scalar s = H(i, i) - R.col(i).head(i).squaredNorm();
    if (s <= tol_pd) throw NotPositiveDefinite(i, double(s));
    R(i, i) = std::sqrt(s);
    for (Index j = i + 1; j < n; ++j)
      R(i, j) = (H(i, j) - R.col(i).head(i).dot(R.col(j).head(i))) / R(i, i);
  }
  return R;
}

/// Objective 1/2 x'Hx + f'x of the quadratic program.
template <typename Scalar, typename Derived>
Scalar qp_objective(const MiqpProblem<Scalar>& prob,
                    const Eigen::MatrixBase<Derived>& x) {
  return Scalar(0.5) * x.dot(prob.H * x) + prob.f.dot(x);
}

/// Map the problem into least-distance coordinates u = Rx + v. Infinite
/// bound entries stay infinite; finite ones are shifted by Mv.
template <typename Scalar>
LdpProblem<Scalar> to_ldp(const MiqpProblem<Scalar>& prob) {
  LdpProblem<Scalar> ldp;
  ldp.R = cholesky_upper(prob.H);
  auto lower = ldp.R.transpose().template triangularView<Eigen::Lower>();
  ldp.v = lower.solve(prob.f);
  ldp.M = lower.solve(MatrixX<Scalar>(prob.A.transpose())).transpose();
  const VectorX<Scalar> shift = ldp.M * ldp.v;
  ldp.d_lo = prob.b_lo;
  ldp.d_hi = prob.b_hi;
  for (Index i = 0; i < prob.m(); ++i) {
    if (std::isfinite(double(ldp.d_lo[i]))) ldp.d_lo[i] += shift[i];
    if (std::isfinite(double(ldp.d_hi[i]))) ldp.d_hi[i] += shift[i];
  }
  ldp.binary = prob.binary;
  ldp.offset = Scalar(0.5) * ldp.v.squaredNorm();
  return ldp;
}

/// Pull an LDP point back to the original coordinates, x = R^-1 (u - v).
template <typename Scalar>
VectorX<Scalar> recover_solution(const VectorX<Scalar>& u,
                                 const LdpProblem<Scalar>& ldp) {
  return ldp.R.template triangularView<Eigen::Upper>().solve(
      VectorX<Scalar>(u - ldp.v));
}

/// Add eps * ||A_i x - (b_lo_i + b_hi_i)/2||^2 terms on the binary rows
/// (constant dropped). The added terms take the same value at every point
/// that satisfies the binary constraints, so the solution set is unchanged
/// while H gains curvature along the binary rows.
template <typename Scalar>
MiqpProblem<Scalar> regularize(const MiqpProblem<Scalar>& prob, Scalar eps) {
  MiqpProblem<Scalar> out = prob;
  for (int i : prob.binary) {
    const auto row = prob.A.row(i);
    out.H.noalias() += eps * row.transpose() * row;
    out.f.noalias() -=
        (eps * (prob.b_lo[i] + prob.b_hi[i]) / Scalar(2)) * row.transpose();
  }
  return out;
}

}  // namespace miqp
