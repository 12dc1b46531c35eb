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

#include "miqp/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace miqp::io {
namespace {

using nlohmann::ordered_json;

double parse_bound(const ordered_json& value, const std::string& field,
                   Eigen::Index row) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError(field, "entry " + std::to_string(row) +
                                ": expected a number, \"inf\" or \"-inf\", "
                                "got \"" +
                                s + "\"");
  }
  throw ParseError(field,
                   "entry " + std::to_string(row) + " is not a number");
}

ordered_json bound_to_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

const ordered_json& require(const ordered_json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(field, "missing");
  return *it;
}

Eigen::Index require_count(const ordered_json& doc, const char* field) {
  const ordered_json& value = require(doc, field);
  if (!value.is_number_integer() || value.get<long long>() < 0)
    throw ParseError(field, "must be a non-negative integer");
  return value.get<Eigen::Index>();
}

MatrixX<double> read_matrix(const ordered_json& doc, const char* field,
                            Eigen::Index rows, Eigen::Index cols) {
  const ordered_json& arr = require(doc, field);
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows))
    throw ParseError(field, "expected " + std::to_string(rows) + " rows");
  MatrixX<double> out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const ordered_json& row = arr[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols))
      throw ParseError(field, "row " + std::to_string(i) + ": expected " +
                                  std::to_string(cols) + " entries");
    for (Eigen::Index j = 0; j < cols; ++j) {
      const ordered_json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_number())
        throw ParseError(field, "row " + std::to_string(i) +
                                    " has a non-numeric entry");
      out(i, j) = e.get<double>();
    }
  }
  return out;
}

VectorX<double> read_vector(const ordered_json& doc, const char* field,
                            Eigen::Index size, bool bounds) {
  const ordered_json& arr = require(doc, field);
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(size))
    throw ParseError(field, "expected " + std::to_string(size) + " entries");
  VectorX<double> out(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const ordered_json& e = arr[static_cast<std::size_t>(i)];
    if (bounds) {
      out[i] = parse_bound(e, field, i);
    } else if (e.is_number()) {
      out[i] = e.get<double>();
    } else {
      throw ParseError(field,
                       "entry " + std::to_string(i) + " is not a number");
    }
  }
  return out;
}

}  // namespace

MiqpProblem<double> read_problem(std::istream& in) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError("(document)", err.what());
  }
  if (!doc.is_object()) throw ParseError("(document)", "not a JSON object");

  const Eigen::Index n = require_count(doc, "n");
  const Eigen::Index m = require_count(doc, "m");

  MiqpProblem<double> prob;
  prob.H = read_matrix(doc, "H", n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (prob.H(i, j) != prob.H(j, i))
        throw ParseError("H", "not symmetric at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
  prob.f = read_vector(doc, "f", n, /*bounds=*/false);
  prob.A = read_matrix(doc, "A", m, n);
  prob.b_lo = read_vector(doc, "bl", m, /*bounds=*/true);
  prob.b_hi = read_vector(doc, "bu", m, /*bounds=*/true);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isnan(prob.b_lo[i])) throw ParseError("bl", "NaN entry");
    if (std::isnan(prob.b_hi[i])) throw ParseError("bu", "NaN entry");
    if (prob.b_lo[i] > prob.b_hi[i])
      throw ParseError("bl", "exceeds bu at row " + std::to_string(i));
  }

  const ordered_json& bin = require(doc, "binary");
  if (!bin.is_array()) throw ParseError("binary", "expected an array");
  long long prev = 0;
  for (const ordered_json& e : bin) {
    if (!e.is_number_integer())
      throw ParseError("binary", "entries must be integers");
    const long long idx = e.get<long long>();
    if (idx < 1 || idx > m)
      throw ParseError("binary", "index " + std::to_string(idx) +
                                     " out of range 1.." + std::to_string(m));
    if (idx <= prev)
      throw ParseError("binary", "indices must be strictly increasing");
    const Eigen::Index row = idx - 1;
    if (!std::isfinite(prob.b_lo[row]) || !std::isfinite(prob.b_hi[row]))
      throw ParseError("binary", "row " + std::to_string(idx) +
                                     " has an infinite bound");
    if (!(prob.b_lo[row] < prob.b_hi[row]))
      throw ParseError("binary", "row " + std::to_string(idx) +
                                     " needs bl < bu");
    prob.binary.push_back(static_cast<int>(row));
    prev = idx;
  }
  return prob;
}

MiqpProblem<double> read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("(file)", "cannot open '" + path + "'");
  return read_problem(in);
}

void write_problem(std::ostream& out, const MiqpProblem<double>& prob) {
  ordered_json doc;
  doc["n"] = prob.n();
  doc["m"] = prob.m();
  ordered_json h = ordered_json::array();
  for (Eigen::Index i = 0; i < prob.n(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < prob.n(); ++j) row.push_back(prob.H(i, j));
    h.push_back(std::move(row));
  }
  doc["H"] = std::move(h);
  doc["f"] = std::vector<double>(prob.f.begin(), prob.f.end());
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < prob.m(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < prob.n(); ++j) row.push_back(prob.A(i, j));
    a.push_back(std::move(row));
  }
  doc["A"] = std::move(a);
  ordered_json bl = ordered_json::array();
  ordered_json bu = ordered_json::array();
  for (Eigen::Index i = 0; i < prob.m(); ++i) {
    bl.push_back(bound_to_json(prob.b_lo[i]));
    bu.push_back(bound_to_json(prob.b_hi[i]));
  }
  doc["bl"] = std::move(bl);
  doc["bu"] = std::move(bu);
  ordered_json bin = ordered_json::array();
  for (int i : prob.binary) bin.push_back(i + 1);
  doc["binary"] = std::move(bin);
  out << doc.dump(1) << '\n';
}

void write_problem_file(const std::string& path,
                        const MiqpProblem<double>& prob) {
  std::ofstream out(path);
  if (!out) throw ParseError("(file)", "cannot open '" + path + "' for write");
  write_problem(out, prob);
}

}  // namespace miqp::io
