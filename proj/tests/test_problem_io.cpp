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

#include <sstream>
#include <string>

#include "miqp/problem_gen.hpp"
#include "miqp/problem_io.hpp"

using miqp::MiqpProblem;
using miqp::io::ParseError;

namespace {

std::string minimal_doc() {
  return R"({"n": 1, "m": 2,
             "H": [[1.0]], "f": [0.3],
             "A": [[1.0], [2.0]],
             "bl": [0.0, "-inf"], "bu": [1.0, "inf"],
             "binary": [1]})";
}

MiqpProblem<double> parse(const std::string& text) {
  std::istringstream in(text);
  return miqp::io::read_problem(in);
}

std::string field_of(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ParseError& err) {
    return err.field();
  }
  return "";
}

std::string replace_once(std::string text, const std::string& from,
                         const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("a minimal document parses with infinities and 1-based binaries") {
  const auto prob = parse(minimal_doc());
  CHECK(prob.n() == 1);
  CHECK(prob.m() == 2);
  CHECK(prob.f[0] == 0.3);
  CHECK(prob.b_lo[1] == -miqp::inf<double>());
  CHECK(prob.b_hi[1] == miqp::inf<double>());
  CHECK(prob.binary == std::vector<int>{0});
  CHECK_NOTHROW(prob.validate());
}

TEST_CASE("write-then-read is the identity") {
  for (std::uint64_t seed : {1ull, 2ull}) {
    miqp::GenSpec<double> spec;
    spec.nb = 3;
    spec.seed = seed;
    auto prob = miqp::random_miqp(spec);
    prob.b_lo[7] = -miqp::inf<double>();
    prob.b_hi[9] = miqp::inf<double>();
    std::stringstream buffer;
    miqp::io::write_problem(buffer, prob);
    const auto back = miqp::io::read_problem(buffer);
    CHECK((back.H - prob.H).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.A - prob.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.f - prob.f).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.b_lo.array() == prob.b_lo.array()).all());
    CHECK((back.b_hi.array() == prob.b_hi.array()).all());
    CHECK(back.binary == prob.binary);
  }
}

TEST_CASE("wrong bl length is reported as bl") {
  const auto text = replace_once(minimal_doc(), R"("bl": [0.0, "-inf"])",
                                 R"("bl": [0.0])");
  CHECK(field_of(text) == "bl");
}

TEST_CASE("missing field is reported by name") {
  const auto text =
      replace_once(minimal_doc(), R"("f": [0.3],)", "");
  CHECK(field_of(text) == "f");
}

TEST_CASE("asymmetric H is rejected") {
  std::string text = minimal_doc();
  text = replace_once(text, R"("n": 1)", R"("n": 2)");
  text = replace_once(text, R"("H": [[1.0]])", R"("H": [[1.0, 0.5], [0.25, 1.0]])");
  text = replace_once(text, R"("f": [0.3])", R"("f": [0.3, 0.0])");
  text = replace_once(text, R"("A": [[1.0], [2.0]])",
                      R"("A": [[1.0, 0.0], [2.0, 1.0]])");
  CHECK(field_of(text) == "H");
}

TEST_CASE("bounds must order and binaries must be clean") {
  CHECK(field_of(replace_once(minimal_doc(), R"("bl": [0.0, "-inf"])",
                              R"("bl": [2.0, "-inf"])")) == "bl");
  CHECK(field_of(replace_once(minimal_doc(), R"("binary": [1])",
                              R"("binary": [2])")) == "binary");
  CHECK(field_of(replace_once(minimal_doc(), R"("binary": [1])",
                              R"("binary": [0])")) == "binary");
  CHECK(field_of(replace_once(minimal_doc(), R"("binary": [1])",
                              R"("binary": [1, 1])")) == "binary");
  CHECK(field_of(replace_once(minimal_doc(), R"("bu": [1.0, "inf"])",
                              R"("bu": ["oo", "inf"])")) == "bu");
}

TEST_CASE("garbage documents name the document") {
  CHECK(field_of("{") == "(document)");
  CHECK(field_of("[1, 2]") == "(document)");
}
