// Copyright 2026 The rspsim authors
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

#include <json.hpp>
#include <string>

#include "rspsim/qstate.hpp"
#include "rspsim/tomo.hpp"

/// \file json_io.hpp
/// JSON interchange: matrices as row-major lists of {"re", "im"} pairs,
/// Bloch vectors, count records and tomography results. These schemas are
/// the file contract between the CLI subcommands.

namespace rspsim::io {

using nlohmann::json;

class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

template <typename Mat>
json matrix_to_json(const Mat& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      out.push_back({{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
    }
  }
  return out;
}

template <typename Mat>
Mat matrix_from_json(const json& j) {
  Mat m;
  const int n = static_cast<int>(m.rows());
  if (!j.is_array() || static_cast<int>(j.size()) != n * n) {
    throw SchemaError("matrix: expected array of " + std::to_string(n * n) +
                      " complex entries");
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const json& e = j[i * n + k];
      if (!e.is_object() || !e.contains("re") || !e.contains("im")) {
        throw SchemaError("matrix: entries must be {re, im} objects");
      }
      m(i, k) = qstate::complexd(e["re"].get<double>(), e["im"].get<double>());
    }
  }
  return m;
}

inline json bloch_to_json(const qstate::BlochVector& b) {
  return {{"s1", b.s1}, {"s2", b.s2}, {"s3", b.s3}};
}

inline json count_record_to_json(const tomo::CountRecord& r) {
  return {{"labels", r.labels},
          {"counts", r.counts},
          {"n0", r.n0},
          {"seed", r.seed}};
}

inline tomo::CountRecord count_record_from_json(const json& j) {
  for (const char* key : {"labels", "counts", "n0", "seed"}) {
    if (!j.contains(key)) {
      throw SchemaError(std::string("count record: missing field ") + key);
    }
  }
  tomo::CountRecord r;
  r.labels = j["labels"].get<std::vector<std::string>>();
  r.counts = j["counts"].get<std::vector<double>>();
  r.n0 = j["n0"].get<double>();
  r.seed = j["seed"].get<std::uint64_t>();
  if (r.labels.size() != r.counts.size()) {
    throw SchemaError("count record: labels and counts differ in length");
  }
  for (double c : r.counts) {
    if (c < 0.0) throw SchemaError("count record: negative count");
  }
  return r;
}

inline json tomography_result_to_json(const tomo::TomographyResult1Q& r) {
  return {{"matrix", matrix_to_json(r.rho_hat.mat)},
          {"log_likelihood", r.log_likelihood},
          {"iterations", r.iterations}};
}

inline json tomography_result_to_json(const tomo::TomographyResult2Q& r) {
  return {{"matrix", matrix_to_json(r.rho_hat.mat)},
          {"log_likelihood", r.log_likelihood},
          {"iterations", r.iterations}};
}

inline json state_to_json(const qstate::DensityMatrix1Q& rho) {
  json out = {{"matrix", matrix_to_json(rho.mat)}};
  if (rho.is_normalized()) {
    out["bloch"] = bloch_to_json(qstate::bloch_from_state(rho));
  }
  return out;
}

}  // namespace rspsim::io
