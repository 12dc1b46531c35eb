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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miqp/bnb.hpp"
#include "miqp/problem_gen.hpp"
#include "miqp/problem_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;
constexpr int kExitMismatch = 4;

const char* status_name(miqp::SolveStatus status) {
  switch (status) {
    case miqp::SolveStatus::optimal:
      return "optimal";
    case miqp::SolveStatus::infeasible:
      return "infeasible";
    case miqp::SolveStatus::node_limit:
      return "node_limit";
  }
  return "unknown";
}

std::string format_vector(const miqp::VectorX<double>& x) {
  std::string out = "[";
  char buf[40];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", x[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  out += "]";
  return out;
}

int exit_code_for(miqp::SolveStatus status) {
  switch (status) {
    case miqp::SolveStatus::optimal:
      return kExitOk;
    case miqp::SolveStatus::infeasible:
      return kExitInfeasible;
    case miqp::SolveStatus::node_limit:
      return kExitLimit;
  }
  return kExitError;
}

int run_solve(const std::string& path, double reg, double tol,
              bool no_early_term, std::int64_t node_limit, bool as_json) {
  miqp::MiqpProblem<double> prob;
  try {
    prob = miqp::io::read_problem_file(path);
  } catch (const miqp::io::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }

  miqp::SolveOptions<double> opts;
  opts.eps_reg = reg;
  opts.primal_tol = tol;
  opts.early_term = !no_early_term;
  opts.node_limit = node_limit;
  const auto result = miqp::solve_miqp(prob, opts);

  char jbuf[40];
  std::snprintf(jbuf, sizeof jbuf, "%.12g", result.J);
  if (as_json) {
    std::cout << "{\"status\": \"" << status_name(result.status)
              << "\", \"objective\": "
              << (std::isfinite(result.J) ? jbuf : "null") << ", \"x\": "
              << format_vector(result.x) << ", \"nodes\": "
              << result.stats.nodes << ", \"iterations\": "
              << result.stats.iterations << ", \"max_stack\": "
              << result.stats.max_stack << "}\n";
  } else {
    std::cout << "status: " << status_name(result.status) << "\n";
    std::cout << "objective: " << jbuf << "\n";
    std::cout << "x: " << format_vector(result.x) << "\n";
    std::cout << "nodes: " << result.stats.nodes << "\n";
    std::cout << "iterations: " << result.stats.iterations << "\n";
    std::cout << "max_stack: " << result.stats.max_stack << "\n";
  }
  return exit_code_for(result.status);
}

bool verify_one(const miqp::MiqpProblem<double>& prob, bool print_solutions) {
  const auto solved = miqp::solve_miqp(prob);
  const auto oracle = miqp::brute_force_solve(prob);

  char a[40], b[40];
  std::snprintf(a, sizeof a, "%.12g", solved.J);
  std::snprintf(b, sizeof b, "%.12g", oracle.J);
  std::cout << "solver: status=" << status_name(solved.status) << " J=" << a
            << " nodes=" << solved.stats.nodes
            << " iterations=" << solved.stats.iterations << "\n";
  std::cout << "oracle: status="
            << (oracle.feasible ? "optimal" : "infeasible") << " J=" << b
            << " relaxations=" << oracle.relaxations
            << " iterations=" << oracle.iterations << "\n";

  const bool status_match =
      (solved.status == miqp::SolveStatus::optimal) == oracle.feasible &&
      solved.status != miqp::SolveStatus::node_limit;
  bool value_match = true;
  if (oracle.feasible) {
    const double scale = std::max(1.0, std::abs(oracle.J));
    value_match = std::abs(solved.J - oracle.J) <= 1e-6 * scale;
  }
  if (status_match && value_match) return true;
  if (print_solutions) {
    std::cout << "solver x: " << format_vector(solved.x) << "\n";
    std::cout << "oracle x: " << format_vector(oracle.x) << "\n";
  }
  return false;
}

int run_verify(const std::optional<std::string>& path, int random_nb,
               int samples, std::uint64_t seed) {
  try {
    if (path) {
      const auto prob = miqp::io::read_problem_file(*path);
      if (prob.nb() > 20) {
        std::cerr << "error: verification is capped at 20 binary "
                     "constraints (file has "
                  << prob.nb() << ")\n";
        return kExitError;
      }
      return verify_one(prob, /*print_solutions=*/true) ? kExitOk
                                                        : kExitMismatch;
    }
    if (random_nb <= 0) {
      std::cerr << "error: provide a problem file or --random NB\n";
      return kExitError;
    }
    if (random_nb > 20) {
      std::cerr << "error: verification is capped at 20 binary constraints\n";
      return kExitError;
    }
    int mismatches = 0;
    for (int k = 0; k < samples; ++k) {
      miqp::GenSpec<double> spec;
      spec.nb = random_nb;
      spec.seed = miqp::derive_seed(seed, std::uint64_t(random_nb),
                                    std::uint64_t(k));
      std::cout << "sample " << k << " (seed " << spec.seed << ")\n";
      if (!verify_one(miqp::random_miqp(spec), /*print_solutions=*/true))
        ++mismatches;
    }
    if (mismatches > 0) {
      std::cerr << mismatches << " of " << samples << " samples mismatched\n";
      return kExitMismatch;
    }
    return kExitOk;
  } catch (const miqp::io::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  return k % 2 == 1 ? values[k / 2]
                    : 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

int run_bench(const std::string& range, int samples, std::uint64_t seed,
              const std::string& out_path) {
  int lo = 0, hi = 0;
  const auto colon = range.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(range);
    lo = std::stoi(range.substr(0, colon));
    hi = std::stoi(range.substr(colon + 1));
  } catch (const std::exception&) {
    std::cerr << "error: --nb-range expects LO:HI, got '" << range << "'\n";
    return kExitError;
  }
  if (lo < 1 || hi < lo) {
    std::cerr << "error: invalid range " << lo << ":" << hi << "\n";
    return kExitError;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open '" << out_path << "' for write\n";
      return kExitError;
    }
    out = &file;
  }

  *out << "nb,time_med,time_best,time_wc,iter_med,iter_best,iter_wc,"
          "node_med,node_best,node_wc\n";
  char buf[40];
  for (int nb = lo; nb <= hi; ++nb) {
    std::vector<double> times, iters, nodes;
    for (int k = 0; k < samples; ++k) {
      miqp::GenSpec<double> spec;
      spec.nb = nb;
      spec.seed = miqp::derive_seed(seed, std::uint64_t(nb), std::uint64_t(k));
      const auto prob = miqp::random_miqp(spec);
      const auto t0 = std::chrono::steady_clock::now();
      const auto result = miqp::solve_miqp(prob);
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
      iters.push_back(double(result.stats.iterations));
      nodes.push_back(double(result.stats.nodes));
    }
    std::sort(times.begin(), times.end());
    std::sort(iters.begin(), iters.end());
    std::sort(nodes.begin(), nodes.end());
    *out << nb;
    const double stats[9] = {median(times), times.front(), times.back(),
                             median(iters), iters.front(), iters.back(),
                             median(nodes), nodes.front(), nodes.back()};
    for (double s : stats) {
      std::snprintf(buf, sizeof buf, "%.9g", s);
      *out << ',' << buf;
    }
    *out << '\n';
  }
  if (!out_path.empty() && !file.good()) {
    std::cerr << "error: write to '" << out_path << "' failed\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-integer QP solver (branch and bound over a dual "
               "active-set least-distance solver)"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "solve a problem file");
  std::string solve_path;
  double reg = 0.0, tol = 1e-6;
  bool no_early_term = false, as_json = false;
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  solve->add_option("file", solve_path, "problem JSON file")->required();
  solve->add_option("--reg", reg, "regularization weight (0 = automatic)");
  solve->add_option("--tol", tol, "primal tolerance base");
  solve->add_flag("--no-early-term", no_early_term,
                  "solve every relaxation to completion");
  solve->add_option("--node-limit", node_limit, "node processing cap");
  solve->add_flag("--json", as_json, "machine-readable output");

  auto* verify = app.add_subcommand(
      "verify", "cross-check the solver against brute-force enumeration");
  std::string verify_path;
  int random_nb = 0, samples = 1;
  std::uint64_t seed = 0;
  verify->add_option("file", verify_path, "problem JSON file");
  verify->add_option("--random", random_nb,
                     "generate random instances with this many binaries");
  verify->add_option("--samples", samples, "number of random instances");
  verify->add_option("--seed", seed, "random seed");

  auto* bench = app.add_subcommand("bench", "benchmark the random family");
  std::string range, out_path;
  int bench_samples = 50;
  std::uint64_t bench_seed = 0;
  bench->add_option("--nb-range", range, "binary count range LO:HI")
      ->required();
  bench->add_option("--samples", bench_samples, "instances per size");
  bench->add_option("--seed", bench_seed, "random seed");
  bench->add_option("--out", out_path, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(solve_path, reg, tol, no_early_term, node_limit,
                       as_json);
    if (verify->parsed())
      return run_verify(verify_path.empty()
                            ? std::nullopt
                            : std::optional<std::string>(verify_path),
                        random_nb, samples, seed);
    if (bench->parsed())
      return run_bench(range, bench_samples, bench_seed, out_path);
  } catch (const miqp::io::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
