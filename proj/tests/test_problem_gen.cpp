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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

#include "miqp/problem_gen.hpp"

using miqp::GenSpec;
using miqp::MatrixX;
using miqp::MiqpProblem;
using miqp::VectorX;

TEST_CASE("dimensions follow the 5x / 10x scaling") {
  GenSpec<double> spec;
  spec.nb = 4;
  const auto prob = miqp::random_miqp(spec);
  CHECK(prob.n() == 20);
  CHECK(prob.m() == 40);
  CHECK(prob.nb() == 4);
  CHECK_NOTHROW(prob.validate());
}

TEST_CASE("generation is deterministic in the seed") {
  GenSpec<double> spec;
  spec.nb = 3;
  spec.seed = 1234;
  const auto a = miqp::random_miqp(spec);
  const auto b = miqp::random_miqp(spec);
  CHECK((a.H - b.H).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.A - b.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.f - b.f).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.b_lo - b.b_lo).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.b_hi - b.b_hi).cwiseAbs().maxCoeff() == 0.0);
  spec.seed = 1235;
  const auto c = miqp::random_miqp(spec);
  CHECK((a.H - c.H).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("bound samples stay in their supports") {
  GenSpec<double> spec;
  spec.nb = 10;  // m = 100 rows
  spec.seed = 5;
  int checked = 0;
  for (std::uint64_t s = 0; s < 12; ++s) {
    spec.seed = s;
    const auto prob = miqp::random_miqp(spec);
    for (Eigen::Index i = spec.nb; i < prob.m(); ++i) {
      CHECK(prob.b_hi[i] >= 0.0);
      CHECK(prob.b_hi[i] <= 20.0);
      CHECK(prob.b_lo[i] >= -20.0);
      CHECK(prob.b_lo[i] <= 0.0);
      ++checked;
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("binary rows are identity bindings with unit box bounds") {
  GenSpec<double> spec;
  spec.nb = 4;
  spec.seed = 9;
  const auto prob = miqp::random_miqp(spec);
  for (int t = 0; t < spec.nb; ++t) {
    CHECK(prob.binary[std::size_t(t)] == t);
    CHECK(prob.b_lo[t] == 0.0);
    CHECK(prob.b_hi[t] == 1.0);
    CHECK(prob.A(t, t) == 1.0);
    CHECK(prob.A.row(t).cwiseAbs().sum() == 1.0);
    CHECK(prob.f[t] <= 0.0);  // binary part of f is forced negative
  }
}

TEST_CASE("condition-1 Hessians are the identity") {
  miqp::Rng rng(3);
  const MatrixX<double> H = miqp::spd_with_condition<double>(8, 1.0, rng);
  CHECK((H - MatrixX<double>::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("spd_with_condition hits the requested spectrum") {
  miqp::Rng rng(4);
  const MatrixX<double> H = miqp::spd_with_condition<double>(10, 1e4, rng);
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::SelfAdjointEigenSolver<MatrixX<double>> eig(H);
  const double ratio =
      eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  CHECK(ratio >= 0.99e4);
  CHECK(ratio <= 1.01e4);
}

TEST_CASE("brute force counts 2^nb relaxations") {
  GenSpec<double> spec;
  spec.nb = 2;
  spec.seed = 21;
  const auto oracle = miqp::brute_force_solve(miqp::random_miqp(spec));
  CHECK(oracle.relaxations == 4);
}

TEST_CASE("brute force solves the one-variable instance by hand") {
  MiqpProblem<double> prob;
  prob.H = MatrixX<double>::Constant(1, 1, 1.0);
  prob.f = VectorX<double>::Constant(1, 0.3);
  prob.A = MatrixX<double>::Constant(1, 1, 1.0);
  prob.b_lo = VectorX<double>::Constant(1, 0.0);
  prob.b_hi = VectorX<double>::Constant(1, 1.0);
  prob.binary = {0};
  const auto oracle = miqp::brute_force_solve(prob);
  REQUIRE(oracle.feasible);
  CHECK(oracle.x[0] == doctest::Approx(0.0));
  CHECK(oracle.J == doctest::Approx(0.0));
  CHECK(oracle.fix_lo == std::vector<int>{0});
  CHECK(oracle.fix_hi.empty());
}

TEST_CASE("brute force reports infeasible when every fixing fails") {
  MiqpProblem<double> prob;
  prob.H = MatrixX<double>::Constant(1, 1, 1.0);
  prob.f = VectorX<double>::Zero(1);
  prob.A = MatrixX<double>(2, 1);
  prob.A << 1, 1;
  prob.b_lo = VectorX<double>(2);
  prob.b_hi = VectorX<double>(2);
  prob.b_lo << 0.0, 0.4;
  prob.b_hi << 1.0, 0.6;
  prob.binary = {0};
  const auto oracle = miqp::brute_force_solve(prob);
  CHECK_FALSE(oracle.feasible);
  CHECK(std::isinf(oracle.J));
}

TEST_CASE("brute force guards against too many binaries") {
  GenSpec<double> spec;
  spec.nb = 21;
  spec.seed = 1;
  const auto prob = miqp::random_miqp(spec);
  CHECK_THROWS_AS(miqp::brute_force_solve(prob), miqp::TooManyBinaries);
}

TEST_CASE("kkt_check certifies oracle solutions and catches tampering") {
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    GenSpec<double> spec;
    spec.nb = 3;
    spec.seed = 600 + seed;
    const auto prob = miqp::random_miqp(spec);
    const auto oracle = miqp::brute_force_solve(prob);
    if (!oracle.feasible) continue;
    const auto report = miqp::kkt_check(prob, oracle.fix_lo, oracle.fix_hi,
                                        oracle.x, oracle.lambda, 1e-6);
    CHECK(report.pass());
    ++passes;

    // Perturbing the point breaks stationarity.
    VectorX<double> x = oracle.x;
    x[prob.n() - 1] += 1e-2;
    const auto broken = miqp::kkt_check(prob, oracle.fix_lo, oracle.fix_hi,
                                        x, oracle.lambda, 1e-6);
    CHECK_FALSE(broken.stationarity);

    // A multiplier on an inactive row breaks complementarity.
    VectorX<double> lambda = oracle.lambda;
    int inactive = -1;
    const VectorX<double> ax = prob.A * oracle.x;
    for (Eigen::Index i = 0; i < prob.m(); ++i) {
      if (lambda[i] == 0.0 && ax[i] > prob.b_lo[i] + 1e-3 &&
          ax[i] < prob.b_hi[i] - 1e-3) {
        inactive = int(i);
        break;
      }
    }
    REQUIRE(inactive >= 0);
    lambda[inactive] = -1.0;
    const auto slack = miqp::kkt_check(prob, oracle.fix_lo, oracle.fix_hi,
                                       oracle.x, lambda, 1e-6);
    CHECK_FALSE(slack.complementarity);
  }
  CHECK(passes >= 20);
}

TEST_CASE("derive_seed separates streams") {
  const auto a = miqp::derive_seed(1, 2, 3);
  CHECK(a == miqp::derive_seed(1, 2, 3));
  CHECK(a != miqp::derive_seed(1, 2, 4));
  CHECK(a != miqp::derive_seed(1, 3, 3));
  CHECK(a != miqp::derive_seed(2, 2, 3));
}

TEST_CASE("uniform01 stays in [0, 1) and normals average out") {
  miqp::Rng rng(99);
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < 20000; ++t) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / 20000.0) < 0.05);
  CHECK(std::abs(sumsq / 20000.0 - 1.0) < 0.05);
}
