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

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "miqp/ldl_engine.hpp"
#include "miqp/types.hpp"

namespace miqp {

/// Active constraints of the dual iterate. `entries` mirrors the insertion
/// order of the LDL factor; `state` is a per-constraint marker (+1 upper,
/// -1 lower, 0 free); `lambda` is the m-vector dual, zero off the set.
/// Entries flagged `fixed` are equality fixes and are never candidates for
/// removal, and their multipliers carry no sign restriction.
template <typename Scalar>
struct WorkingSet {
  struct Entry {
    int index;
    BoundSide side;
    bool fixed;
  };

  std::vector<Entry> entries;
  std::vector<std::int8_t> state;
  VectorX<Scalar> lambda;
  LdlFactor<Scalar> factor;

  WorkingSet(Index m, Index n)
      : state(static_cast<std::size_t>(m), 0),
        lambda(VectorX<Scalar>::Zero(m)),
        factor(m, n) {}

  Index size() const { return static_cast<Index>(entries.size()); }
  bool contains(int i) const { return state[i] != 0; }

  void insert(const MatrixX<Scalar>& M, int i, BoundSide side, bool fixed) {
    assert(state[i] == 0);
    factor.add_row(M, i);
    entries.push_back({i, side, fixed});
    state[i] = side == BoundSide::upper ? 1 : -1;
  }

  void erase(Index pos) {
    factor.remove_row(pos);
    const int i = entries[static_cast<std::size_t>(pos)].index;
    state[i] = 0;
    lambda[i] = Scalar(0);
    entries.erase(entries.begin() + pos);
  }

  std::vector<int> upper_set() const { return members(BoundSide::upper); }
  std::vector<int> lower_set() const { return members(BoundSide::lower); }
  std::vector<int> fixed_set() const {
    std::vector<int> out;
    for (const Entry& e : entries)
      if (e.fixed) out.push_back(e.index);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<int> members(BoundSide side) const {
    std::vector<int> out;
    for (const Entry& e : entries)
      if (e.side == side) out.push_back(e.index);
    std::sort(out.begin(), out.end());
    return out;
  }
};

enum class RelaxStatus : std::int8_t { optimal, infeasible, futile, iter_limit };

template <typename Scalar>
struct RelaxResult {
  RelaxStatus status;
  VectorX<Scalar> u;  // populated for optimal results only
  Scalar J;           // 1/2 ||u||^2, +inf unless optimal
  WorkingSet<Scalar> working_set;
  std::int64_t iters = 0;
};

template <typename Scalar>
struct RelaxSettings {
  Scalar primal_tol = Scalar(1e-6);  // scaled by 1 + the bound magnitudes
  Scalar dual_tol = Scalar(1e-10);
  int max_iter_factor = 100;  // iteration cap = factor * (m + n)
};

/// Test hook: reports every accepted dual iterate's objective value and the
/// matching primal lower bound.
template <typename Scalar>
struct RelaxObserver {
  std::function<void(Scalar dual_objective, Scalar lower_bound)> on_accept;
};

/// u = -sum_{i in W} M_i' lambda_i.
template <typename Scalar>
VectorX<Scalar> compute_primal(const VectorX<Scalar>& lambda,
                               const MatrixX<Scalar>& M,
                               const std::vector<int>& working) {
  VectorX<Scalar> u = VectorX<Scalar>::Zero(M.cols());
  for (int i : working) u.noalias() -= M.row(i).transpose() * lambda[i];
  return u;
}

template <typename Scalar>
struct Violation {
  int index;
  BoundSide side;
  Scalar amount;  // most negative slack
};

/// Most violated inactive constraint at u, or nullopt when all inactive
/// slacks are >= -tol. On a near-tie between the two sides (within 1e-14)
/// the upper side wins.
template <typename Scalar>
std::optional<Violation<Scalar>> most_violated(
    const VectorX<Scalar>& u, const MatrixX<Scalar>& M,
    const VectorX<Scalar>& d_lo, const VectorX<Scalar>& d_hi,
    const std::vector<std::int8_t>& state, Scalar tol) {
  const VectorX<Scalar> mu = M * u;
  std::optional<Violation<Scalar>> worst;
  for (Index i = 0; i < M.rows(); ++i) {
    if (state[i] != 0) continue;
    const Scalar slack_hi = d_hi[i] - mu[i];
    const Scalar slack_lo = mu[i] - d_lo[i];
    const Scalar s = std::min(slack_hi, slack_lo);
    if (s >= -tol) continue;
    if (!worst || s < worst->amount) {
      const BoundSide side = (slack_hi - slack_lo <= Scalar(1e-14))
                                 ? BoundSide::upper
                                 : BoundSide::lower;
      worst = Violation<Scalar>{static_cast<int>(i), side, s};
    }
  }
  return worst;
}

/// Step the dual iterate along p until the first blocking component in C
/// reaches zero, then drop that component from the working set. C holds
/// positions into the working-set order; ratio ties resolve to the
/// smallest constraint index.
template <typename Scalar>
void drop_blocking(WorkingSet<Scalar>& ws,
                   const std::vector<Index>& candidates,
                   const VectorX<Scalar>& p) {
  assert(!candidates.empty());
  Index best = -1;
  Scalar best_ratio = Scalar(0);
  int best_index = 0;
  for (Index t : candidates) {
    const int i = ws.entries[static_cast<std::size_t>(t)].index;
    assert(p[t] != Scalar(0));
    const Scalar ratio = -ws.lambda[i] / p[t];
    if (best < 0 || ratio < best_ratio ||
        (ratio == best_ratio && i < best_index)) {
      best = t;
      best_ratio = ratio;
      best_index = i;
    }
  }
  const int j = ws.entries[static_cast<std::size_t>(best)].index;
  const Scalar step = -ws.lambda[j] / p[best];
  for (Index t = 0; t < ws.size(); ++t)
    ws.lambda[ws.entries[static_cast<std::size_t>(t)].index] += step * p[t];
  ws.lambda[j] = Scalar(0);
  ws.erase(best);
}

/// Dual active-set solve of the least-distance relaxation with the rows in
/// fix_lo / fix_hi held at their lower / upper bound as equalities. A warm
/// working set (from a parent relaxation, with the new fix already
/// inserted) may be supplied; otherwise the solve cold-starts from the
/// equality fixes with a zero dual. The solve declares the node futile as
/// soon as a dual-feasible iterate certifies a lower bound >= j_bar.
template <typename Scalar>
RelaxResult<Scalar> solve_relaxation(
    const LdpProblem<Scalar>& ldp, const std::vector<int>& fix_lo,
    const std::vector<int>& fix_hi,
    std::type_identity_t<std::optional<WorkingSet<Scalar>>> warm =
        std::nullopt,
    std::type_identity_t<Scalar> j_bar = inf<Scalar>(),
    const std::type_identity_t<RelaxSettings<Scalar>>& cfg = {},
    const RelaxObserver<Scalar>* obs = nullptr) {
  const Index m = ldp.m();
  const Index n = ldp.n();
  const MatrixX<Scalar>& M = ldp.M;

  // Feasibility tolerance, scale-relative in the bounds. Mu - d equals the
  // pre-transform constraint residual, so the scale is measured with the
  // coordinate shift Mv removed; the shift itself can dwarf the bounds
  // (strongly regularized problems) and must not loosen the test.
  const VectorX<Scalar> shift = ldp.M * ldp.v;
  Scalar d_scale = Scalar(0);
  for (Index i = 0; i < m; ++i) {
    if (std::isfinite(double(ldp.d_lo[i])))
      d_scale = std::max(d_scale, std::abs(ldp.d_lo[i] - shift[i]));
    if (std::isfinite(double(ldp.d_hi[i])))
      d_scale = std::max(d_scale, std::abs(ldp.d_hi[i] - shift[i]));
  }
  const Scalar tol_primal = cfg.primal_tol * (Scalar(1) + d_scale);
  const std::int64_t max_iter = std::int64_t(cfg.max_iter_factor) * (m + n);

  // Fixes to seed, merged by index; honored lazily inside the main loop so
  // that a singular factor can be resolved between insertions.
  std::vector<std::pair<int, BoundSide>> pending;
  WorkingSet<Scalar> ws = warm ? std::move(*warm) : WorkingSet<Scalar>(m, n);
  if (!warm) {
    for (int i : fix_lo) pending.emplace_back(i, BoundSide::lower);
    for (int i : fix_hi) pending.emplace_back(i, BoundSide::upper);
    std::sort(pending.begin(), pending.end());
  } else {
#ifndef NDEBUG
    for (int i : fix_lo) assert(ws.state[i] == -1);
    for (int i : fix_hi) assert(ws.state[i] == 1);
#endif
  }
  std::size_t next_fix = 0;

  std::int64_t iters = 0;
  auto finish = [&](RelaxStatus status, VectorX<Scalar> u, Scalar J) {
    return RelaxResult<Scalar>{status, std::move(u), J, std::move(ws), iters};
  };

  while (true) {
    if (!ws.factor.singular() && next_fix < pending.size()) {
      const auto [i, side] = pending[next_fix++];
      ws.insert(M, i, side, /*fixed=*/true);
      continue;
    }
    if (iters >= max_iter)
      return finish(RelaxStatus::iter_limit, {}, inf<Scalar>());

    const Index k = ws.size();
    VectorX<Scalar> rhs(k);
    for (Index t = 0; t < k; ++t) {
      const auto& e = ws.entries[static_cast<std::size_t>(t)];
      rhs[t] = e.side == BoundSide::upper ? ldp.d_hi[e.index]
                                          : ldp.d_lo[e.index];
    }

    if (!ws.factor.singular()) {
      const VectorX<Scalar> lam_star = ws.factor.solve_stationary(rhs);
      ++iters;
      bool dual_feasible = true;
      for (Index t = 0; t < k && dual_feasible; ++t) {
        const auto& e = ws.entries[static_cast<std::size_t>(t)];
        if (e.fixed) continue;
        if (e.side == BoundSide::upper && lam_star[t] < -cfg.dual_tol)
          dual_feasible = false;
        if (e.side == BoundSide::lower && lam_star[t] > cfg.dual_tol)
          dual_feasible = false;
      }
      if (dual_feasible) {
        VectorX<Scalar> u = VectorX<Scalar>::Zero(n);
        for (Index t = 0; t < k; ++t)
          u.noalias() -=
              M.row(ws.entries[static_cast<std::size_t>(t)].index).transpose() *
              lam_star[t];
        const Scalar J = Scalar(0.5) * u.squaredNorm();
        if (J >= j_bar) return finish(RelaxStatus::futile, {}, inf<Scalar>());
        for (Index t = 0; t < k; ++t)
          ws.lambda[ws.entries[static_cast<std::size_t>(t)].index] =
              lam_star[t];
        if (obs && obs->on_accept) obs->on_accept(-J, J);
        const auto viol =
            most_violated(u, M, ldp.d_lo, ldp.d_hi, ws.state, tol_primal);
        if (!viol) return finish(RelaxStatus::optimal, std::move(u), J);
        ws.insert(M, viol->index, viol->side, /*fixed=*/false);
      } else {
        VectorX<Scalar> p(k);
        std::vector<Index> candidates;
        for (Index t = 0; t < k; ++t) {
          const auto& e = ws.entries[static_cast<std::size_t>(t)];
          p[t] = lam_star[t] - ws.lambda[e.index];
          if (e.fixed) continue;
          if ((e.side == BoundSide::upper && lam_star[t] < Scalar(0)) ||
              (e.side == BoundSide::lower && lam_star[t] > Scalar(0)))
            candidates.push_back(t);
        }
        drop_blocking(ws, candidates, p);
      }
    } else {
      const auto dir = ws.factor.singular_direction(rhs);
      ++iters;
      if (dir.zero_descent) {
        // Degenerate zero-slope direction: drop the component of largest
        // magnitude, preferring removable (non-fixed) entries.
        Index best = -1;
        bool best_fixed = true;
        for (Index t = 0; t < k; ++t) {
          if (dir.p[t] == Scalar(0)) continue;
          const bool fx = ws.entries[static_cast<std::size_t>(t)].fixed;
          const bool better =
              best < 0 || (best_fixed && !fx) ||
              (fx == best_fixed &&
               std::abs(dir.p[t]) > std::abs(dir.p[best]));
          if (better) {
            best = t;
            best_fixed = fx;
          }
        }
        assert(best >= 0);
        ws.erase(best);
      } else {
        std::vector<Index> candidates;
        for (Index t = 0; t < k; ++t) {
          const auto& e = ws.entries[static_cast<std::size_t>(t)];
          if (e.fixed) continue;
          if ((e.side == BoundSide::upper && dir.p[t] < Scalar(0)) ||
              (e.side == BoundSide::lower && dir.p[t] > Scalar(0)))
            candidates.push_back(t);
        }
        if (candidates.empty())
          return finish(RelaxStatus::infeasible, {}, inf<Scalar>());
        drop_blocking(ws, candidates, dir.p);
      }
    }
  }
}

}  // namespace miqp
