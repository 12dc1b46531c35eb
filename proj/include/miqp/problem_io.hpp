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

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "miqp/types.hpp"

namespace miqp::io {

/// Problem-file rejection; `field` names the offending entry ("H", "bl",
/// "binary", ...).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& message)
      : std::runtime_error("invalid problem file, field '" + field +
                           "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// JSON problem document: {"n", "m", "H" (n*n rows), "f", "A" (m*n rows),
// "bl", "bu" (numbers or "-inf"/"inf"), "binary" (1-based, sorted)}.
MiqpProblem<double> read_problem(std::istream& in);
MiqpProblem<double> read_problem_file(const std::string& path);
void write_problem(std::ostream& out, const MiqpProblem<double>& prob);
void write_problem_file(const std::string& path,
                        const MiqpProblem<double>& prob);

}  // namespace miqp::io
