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
#include <stdexcept>
#include <utility>
#include <vector>

#include "miqp/ldp_solver.hpp"
#include "miqp/transform.hpp"
#include "miqp/types.hpp"

namespace miqp {

/// A pending branch-and-bound node: its depth and the signed constraint to
/// fix when it is processed (magnitude is the 1-based constraint index,
/// positive fixes the upper bound, negative the lower; the root is {0, 0}).
/// Together with the depth-first path buffer this is the node's entire
/// state.
struct Node {
  std::int32_t level = 0;
  std::int32_t fix = 0;
};
static_assert(sizeof(Node) == 2 * sizeof(std::int32_t));

/// Depth-first node stack plus the shared path buffer. Under strict LIFO
/// processing, entries path[0..level) of the buffer always spell out the
/// full fix history of the node being processed, so pending nodes need
/// nothing beyond their two integers. Capacity is nb + 1 nodes: a parent
/// is popped before its two children are pushed.
class Tree {
 public:
  explicit Tree(int nb) : nb_(nb), path_(static_cast<std::size_t>(nb), 0) {
    stack_.reserve(static_cast<std::size_t>(nb) + 1);
  }

  bool empty() const { return stack_.empty(); }
  std::size_t size() const { return stack_.size(); }
  std::size_t max_occupancy() const { return max_occupancy_; }
  std::size_t capacity() const { return static_cast<std::size_t>(nb_) + 1; }
  const std::vector<std::int32_t>& path() const { return path_; }

  void push(const Node& node) {
    assert(stack_.size() < capacity());
    stack_.push_back(node);
    max_occupancy_ = std::max(max_occupancy_, stack_.size());
  }

  Node pop() {
    assert(!stack_.empty());
    Node node = stack_.back();
    stack_.pop_back();
    return node;
  }

  /// Record the popped node's fix in the path buffer and decode its full
  /// lower/upper fix sets (0-based, sorted) from the first `level` entries.
  std::pair<std::vector<int>, std::vector<int>> decode(const Node& node) {
    std::vector<int> lo, hi;
    if (node.level > 0) {
      assert(node.level <= nb_ && node.fix != 0);
      path_[static_cast<std::size_t>(node.level) - 1] = node.fix;
      for (std::int32_t t = 0; t < node.level; ++t) {
        const std::int32_t e = path_[static_cast<std::size_t>(t)];
        if (e < 0)
          lo.push_back(-e - 1);
        else
          hi.push_back(e - 1);
      }
      std::sort(lo.begin(), lo.end());
      std::sort(hi.begin(), hi.end());
    }
    return {std::move(lo), std::move(hi)};
  }

 private:
  int nb_;
  std::vector<Node> stack_;
  std::vector<std::int32_t> path_;
  std::size_t max_occupancy_ = 0;
};

/// Smallest binary constraint not in the working set, the lexicographic
/// branching rule. Callers only branch when at least one candidate exists.
inline std::optional<int> select_branch_index(
    const std::vector<int>& binary, const std::vector<std::int8_t>& state) {
  for (int i : binary)
    if (state[i] == 0) return i;
  return std::nullopt;
}

/// Which child to explore first: the bound closest to M_i u in the parent
/// solution, with the midpoint itself going to the lower side.
template <typename Scalar>
BoundSide select_child(Scalar Mi_u, Scalar d_lo_i, Scalar d_hi_i) {
  return Mi_u <= (d_lo_i + d_hi_i) / Scalar(2) ? BoundSide::lower
                                               : BoundSide::upper;
}

/// Push both children of a branch, non-preferred first so the preferred
/// child is popped (and therefore processed) first.
inline void push_children(Tree& tree, int parent_level, int index,
                          BoundSide preferred) {
  const std::int32_t level = parent_level + 1;
  const Node lower{level, -(index + 1)};
  const Node upper{level, index + 1};
  if (preferred == BoundSide::lower) {
    tree.push(upper);
    tree.push(lower);
  } else {
    tree.push(lower);
    tree.push(upper);
  }
}

/// Working set to start a node's relaxation from. A node popped right
/// after its parent was processed (level == prev_level + 1) reuses the
/// parent's dual iterate, working set, and factorization, with only the
/// node's own fix inserted. Any other pop is a backtrack and cold-starts.
template <typename Scalar>
std::optional<WorkingSet<Scalar>> hot_start_for(const Node& node,
                                                const WorkingSet<Scalar>& prev,
                                                int prev_level,
                                                const MatrixX<Scalar>& M) {
  if (node.level != prev_level + 1 || node.fix == 0) return std::nullopt;
  WorkingSet<Scalar> ws = prev;
  const int index = std::abs(node.fix) - 1;
  const BoundSide side = node.fix > 0 ? BoundSide::upper : BoundSide::lower;
  ws.insert(M, index, side, /*fixed=*/true);
  return ws;
}

enum class SolveStatus : std::int8_t { optimal, infeasible, node_limit };

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t iterations = 0;
  std::size_t max_stack = 0;
};

template <typename Scalar>
struct SolverResult {
  SolveStatus status;
  VectorX<Scalar> x;  // populated for optimal results only
  Scalar J = inf<Scalar>();
  SolveStats stats;
};

template <typename Scalar>
struct SolveOptions {
  /// Regularization weight applied up front; 0 requests none, in which
  /// case a failed Cholesky is retried once with 1e-5 * (1 + |H|_max).
  Scalar eps_reg = Scalar(0);
  Scalar primal_tol = Scalar(1e-6);
  Scalar dual_tol = Scalar(1e-10);
  bool early_term = true;
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  int max_iter_factor = 100;
};

/// Test hooks into the search. All optional.
template <typename Scalar>
struct BnbCallbacks {
  std::function<void(const Node&, const std::vector<int>& fix_lo,
                     const std::vector<int>& fix_hi)>
      on_pop;
  std::function<void(const RelaxResult<Scalar>&, Scalar j_bar, bool warm)>
      on_relaxed;
  std::function<void(int index, BoundSide preferred)> on_branch;
};

/// Depth-first branch and bound over the binary bound fixings. Relaxations
/// are solved in least-distance coordinates; a node is cut when its value
/// reaches the incumbent (dominance) and becomes the incumbent when every
/// binary row is held in the relaxation's working set. Children are
/// explored lexicographically, preferred bound first, hot-starting each
/// directly-following child from its parent's working set.
template <typename Scalar>
SolverResult<Scalar> solve_miqp(const MiqpProblem<Scalar>& prob,
                                const SolveOptions<Scalar>& opts = {},
                                const BnbCallbacks<Scalar>* cb = nullptr) {
  prob.validate();

  LdpProblem<Scalar> ldp;
  if (opts.eps_reg > Scalar(0)) {
    ldp = to_ldp(regularize(prob, opts.eps_reg));
  } else {
    try {
      ldp = to_ldp(prob);
    } catch (const NotPositiveDefinite&) {
      const Scalar auto_eps =
          Scalar(1e-5) * (Scalar(1) + prob.H.cwiseAbs().maxCoeff());
      ldp = to_ldp(regularize(prob, auto_eps));
    }
  }

  RelaxSettings<Scalar> relax_cfg;
  relax_cfg.primal_tol = opts.primal_tol;
  relax_cfg.dual_tol = opts.dual_tol;
  relax_cfg.max_iter_factor = opts.max_iter_factor;

  Tree tree(ldp.nb());
  tree.push(Node{});
  std::optional<VectorX<Scalar>> u_best;
  Scalar j_best = inf<Scalar>();
  std::optional<WorkingSet<Scalar>> prev_ws;
  int prev_level = 0;
  SolveStats stats;

  while (!tree.empty()) {
    if (stats.nodes >= opts.node_limit) {
      stats.max_stack = tree.max_occupancy();
      return {SolveStatus::node_limit, {},
              u_best ? j_best - ldp.offset : inf<Scalar>(), stats};
    }
    const Node node = tree.pop();
    auto [fix_lo, fix_hi] = tree.decode(node);
    if (cb && cb->on_pop) cb->on_pop(node, fix_lo, fix_hi);

    std::optional<WorkingSet<Scalar>> warm;
    if (prev_ws) warm = hot_start_for(node, *prev_ws, prev_level, ldp.M);
    const bool was_warm = warm.has_value();
    const Scalar j_bar = opts.early_term ? j_best : inf<Scalar>();
    RelaxResult<Scalar> rel = solve_relaxation(ldp, fix_lo, fix_hi,
                                               std::move(warm), j_bar,
                                               relax_cfg);
    ++stats.nodes;
    stats.iterations += rel.iters;
    if (rel.status == RelaxStatus::iter_limit)
      throw std::runtime_error("relaxation hit its iteration limit");
    if (cb && cb->on_relaxed) cb->on_relaxed(rel, j_bar, was_warm);

    const Scalar J = rel.J;
    const auto& state = rel.working_set.state;
    if (J < j_best) {
      bool binary_feasible = true;
      for (int i : ldp.binary)
        if (state[i] == 0) {
          binary_feasible = false;
          break;
        }
      if (binary_feasible) {
#ifndef NDEBUG
        // Working-set membership is the feasibility test; the numeric
        // counterpart must agree (residuals are in pre-transform units).
        for (int i : ldp.binary) {
          const Scalar mu = ldp.M.row(i).dot(rel.u);
          const Scalar shift_i = ldp.M.row(i).dot(ldp.v);
          assert(std::min(std::abs(mu - ldp.d_lo[i]),
                          std::abs(mu - ldp.d_hi[i])) <=
                 Scalar(1e-6) *
                     (Scalar(1) + std::abs(ldp.d_hi[i] - shift_i)));
        }
#endif
        u_best = rel.u;
        j_best = J;
      } else {
        const int i = *select_branch_index(ldp.binary, state);
        const BoundSide preferred = select_child(
            Scalar(ldp.M.row(i).dot(rel.u)), ldp.d_lo[i], ldp.d_hi[i]);
        push_children(tree, node.level, i, preferred);
        if (cb && cb->on_branch) cb->on_branch(i, preferred);
      }
    }
    prev_ws = std::move(rel.working_set);
    prev_level = node.level;
  }

  stats.max_stack = tree.max_occupancy();
  if (!u_best) return {SolveStatus::infeasible, {}, inf<Scalar>(), stats};
  SolverResult<Scalar> out;
  out.status = SolveStatus::optimal;
  out.x = recover_solution(*u_best, ldp);
  out.J = j_best - ldp.offset;
  out.stats = stats;
  return out;
}

}  // namespace miqp
