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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "miqp/ldp_solver.hpp"
#include "miqp/transform.hpp"
#include "miqp/types.hpp"

namespace miqp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Mix a base seed with stream coordinates (e.g. batch index and sample
/// index) into an independent instance seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t s = base;
  splitmix64(s);
  s ^= 0x632be59bd9b4e019ull * (a + 1);
  splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ull * (b + 1);
  return splitmix64(s);
}

/// xoshiro256++ with splitmix64 seeding and Box-Muller normals. The stream
/// is fully specified here so generated problems are reproducible across
/// platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  double normal(double stddev = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return spare_ * stddev;
    }
    const double r = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
    const double theta = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta) * stddev;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Parameters of the random benchmark family: n_b binary variable
/// bindings, n = 5 n_b variables, m = 10 n_b two-sided rows.
template <typename Scalar>
struct GenSpec {
  int nb = 1;
  std::uint64_t seed = 0;
  Scalar cond = Scalar(1e4);
  Scalar f_sigma = Scalar(10);

  Index n() const { return 5 * nb; }
  Index m() const { return 10 * nb; }
};

/// Dense symmetric positive definite matrix with log-spaced eigenvalues in
/// [1, cond], built as Q diag(sigma) Q' from the orthogonal factor of a
/// random Gaussian matrix.
template <typename Scalar>
MatrixX<Scalar> spd_with_condition(Index n, Scalar cond, Rng& rng) {
  MatrixX<Scalar> G(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) G(i, j) = Scalar(rng.normal());
  const Eigen::HouseholderQR<MatrixX<Scalar>> qr(G);
  const MatrixX<Scalar> Q =
      qr.householderQ() * MatrixX<Scalar>::Identity(n, n);
  VectorX<Scalar> sigma(n);
  for (Index i = 0; i < n; ++i)
    sigma[i] = n > 1 ? std::pow(cond, Scalar(i) / Scalar(n - 1)) : Scalar(1);
  MatrixX<Scalar> H = Q * sigma.asDiagonal() * Q.transpose();
  H = ((H + H.transpose()) / Scalar(2)).eval();
  return H;
}

/// Random instance of the benchmark family: standard-normal constraint
/// rows with bounds uniform in [-20, 0] and [0, 20], an SPD Hessian with
/// the requested condition number, and a linear term whose binary part is
/// forced negative. The first nb rows of A are identity rows binding
/// x_i to {0, 1} and are marked binary.
template <typename Scalar>
MiqpProblem<Scalar> random_miqp(const GenSpec<Scalar>& spec) {
  Rng rng(spec.seed);
  const Index n = spec.n();
  const Index m = spec.m();
  MiqpProblem<Scalar> prob;
  prob.A.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) prob.A(i, j) = Scalar(rng.normal());
  prob.b_lo.resize(m);
  prob.b_hi.resize(m);
  for (Index i = 0; i < m; ++i) prob.b_lo[i] = Scalar(rng.uniform(-20.0, 0.0));
  for (Index i = 0; i < m; ++i) prob.b_hi[i] = Scalar(rng.uniform(0.0, 20.0));
  prob.H = spd_with_condition(n, spec.cond, rng);
  prob.f.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Scalar value = Scalar(rng.normal(double(spec.f_sigma)));
    prob.f[j] = j < spec.nb ? -std::abs(value) : value;
  }
  for (int i = 0; i < spec.nb; ++i) {
    prob.A.row(i).setZero();
    prob.A(i, i) = Scalar(1);
    prob.b_lo[i] = Scalar(0);
    prob.b_hi[i] = Scalar(1);
    prob.binary.push_back(i);
  }
  return prob;
}

template <typename Scalar>
struct BruteForceResult {
  bool feasible = false;
  VectorX<Scalar> x;
  Scalar J = inf<Scalar>();
  std::int64_t relaxations = 0;
  std::vector<int> fix_lo, fix_hi;   // argmin assignment
  std::int64_t iterations = 0;
  VectorX<Scalar> lambda;            // dual of the argmin relaxation
};

/// Enumerate all 2^nb bound assignments and solve each fixed relaxation to
/// completion. The reference the branch-and-bound solver is checked
/// against; capped at 20 binaries.
template <typename Scalar>
BruteForceResult<Scalar> brute_force_solve(const MiqpProblem<Scalar>& prob,
                                           const RelaxSettings<Scalar>& cfg = {}) {
  const int nb = prob.nb();
  if (nb > 20) throw TooManyBinaries(nb);
  const LdpProblem<Scalar> ldp = to_ldp(prob);

  BruteForceResult<Scalar> out;
  Scalar best_ldp = inf<Scalar>();
  VectorX<Scalar> u_best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << nb); ++mask) {
    std::vector<int> fix_lo, fix_hi;
    for (int t = 0; t < nb; ++t) {
      if (mask & (std::uint64_t(1) << t))
        fix_hi.push_back(prob.binary[static_cast<std::size_t>(t)]);
      else
        fix_lo.push_back(prob.binary[static_cast<std::size_t>(t)]);
    }
    RelaxResult<Scalar> rel = solve_relaxation(ldp, fix_lo, fix_hi,
                                               std::nullopt, inf<Scalar>(),
                                               cfg);
    ++out.relaxations;
    out.iterations += rel.iters;
    if (rel.status == RelaxStatus::optimal && rel.J < best_ldp) {
      best_ldp = rel.J;
      u_best = rel.u;
      out.fix_lo = std::move(fix_lo);
      out.fix_hi = std::move(fix_hi);
      out.lambda = rel.working_set.lambda;
    }
  }
  if (u_best.size() > 0) {
    out.feasible = true;
    out.x = recover_solution(u_best, ldp);
    out.J = best_ldp - ldp.offset;
  }
  return out;
}

template <typename Scalar>
struct KktReport {
  bool stationarity = true;
  bool primal = true;
  bool fixes = true;
  bool signs = true;
  bool complementarity = true;
  Scalar stationarity_residual = Scalar(0);
  Scalar primal_residual = Scalar(0);

  bool pass() const {
    return stationarity && primal && fixes && signs && complementarity;
  }
};

/// Independent optimality certificate for a solved (fixed) relaxation in
/// original coordinates: stationarity Hx + f + A'lambda = 0, primal
/// feasibility, fixed rows at their bounds, and sign/complementarity of
/// the multipliers off the fixes.
template <typename Scalar>
KktReport<Scalar> kkt_check(const MiqpProblem<Scalar>& prob,
                            const std::vector<int>& fix_lo,
                            const std::vector<int>& fix_hi,
                            const VectorX<Scalar>& x,
                            const VectorX<Scalar>& lambda, Scalar tol) {
  KktReport<Scalar> report;
  const VectorX<Scalar> grad = prob.H * x + prob.f;
  const VectorX<Scalar> atl = prob.A.transpose() * lambda;
  const Scalar stat_scale =
      std::max({Scalar(1), grad.template lpNorm<Eigen::Infinity>(),
                atl.template lpNorm<Eigen::Infinity>()});
  report.stationarity_residual =
      (grad + atl).template lpNorm<Eigen::Infinity>();
  report.stationarity = report.stationarity_residual <= tol * stat_scale;

  Scalar b_scale = Scalar(0);
  for (Index i = 0; i < prob.m(); ++i) {
    if (std::isfinite(double(prob.b_lo[i])))
      b_scale = std::max(b_scale, std::abs(prob.b_lo[i]));
    if (std::isfinite(double(prob.b_hi[i])))
      b_scale = std::max(b_scale, std::abs(prob.b_hi[i]));
  }
  const Scalar tol_primal = tol * (Scalar(1) + b_scale);
  const Scalar tol_dual =
      tol * std::max(Scalar(1), lambda.template lpNorm<Eigen::Infinity>());

  const VectorX<Scalar> ax = prob.A * x;
  std::vector<std::int8_t> fixed(static_cast<std::size_t>(prob.m()), 0);
  for (int i : fix_lo) fixed[static_cast<std::size_t>(i)] = -1;
  for (int i : fix_hi) fixed[static_cast<std::size_t>(i)] = 1;

  for (Index i = 0; i < prob.m(); ++i) {
    const Scalar lo_gap = ax[i] - prob.b_lo[i];
    const Scalar hi_gap = prob.b_hi[i] - ax[i];
    if (lo_gap < -tol_primal || hi_gap < -tol_primal) {
      report.primal = false;
      report.primal_residual =
          std::max(report.primal_residual,
                   std::max(-lo_gap, -hi_gap));
    }
    const std::int8_t fx = fixed[static_cast<std::size_t>(i)];
    if (fx != 0) {
      const Scalar gap = fx > 0 ? std::abs(ax[i] - prob.b_hi[i])
                                : std::abs(ax[i] - prob.b_lo[i]);
      if (gap > tol_primal) report.fixes = false;
      continue;  // fixed multipliers are sign-free
    }
    const bool at_upper =
        std::isfinite(double(prob.b_hi[i])) && hi_gap <= tol_primal;
    const bool at_lower =
        std::isfinite(double(prob.b_lo[i])) && lo_gap <= tol_primal;
    if (lambda[i] > tol_dual) {
      if (!at_upper) {
        if (at_lower)
          report.signs = false;
        else
          report.complementarity = false;
      }
    } else if (lambda[i] < -tol_dual) {
      if (!at_lower) {
        if (at_upper)
          report.signs = false;
        else
          report.complementarity = false;
      }
    }
  }
  return report;
}

}  // namespace miqp
