// Copyright 2026 The qudec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON and CSV encodings of the library's inputs and reports.

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "qudec/bloch_geometry.hpp"
#include "qudec/constraints.hpp"
#include "qudec/correlation.hpp"
#include "qudec/decompose.hpp"
#include "qudec/density_matrix.hpp"
#include "qudec/errors.hpp"

namespace qudec {

using Json = nlohmann::ordered_json;

// --- number formatting -------------------------------------------------------

/// Locale-independent decimal text; `digits` significant digits, or the
/// shortest round-trip form when digits == 0. Negative zero prints as 0.
inline std::string format_number(double v, int digits = 0) {
  if (v == 0) v = 0;  // drops the sign of -0
  std::array<char, 64> buf{};
  std::to_chars_result r = digits > 0
      ? std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, digits)
      : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (r.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  std::string s(buf.data(), r.ptr);
  if (s == "-0") s = "0";
  return s;
}

/// FNV-1a, 64 bit, as 16 hex digits.
inline std::string input_digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + 16, h, 16);
  std::string s(buf.data(), r.ptr);
  return std::string(16 - s.size(), '0') + s;
}

struct RunMeta {
  std::string tool;
  std::optional<std::uint64_t> seed;
  std::string input_digest;
};

inline Json to_json(const RunMeta& m) {
  Json j;
  j["tool"] = m.tool;
  j["version"] = kVersion;
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  j["input_digest"] = m.input_digest.empty() ? Json(nullptr) : Json(m.input_digest);
  return j;
}

// --- matrices ----------------------------------------------------------------

inline Json complex_json(cplx v) { return Json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_object() && j.contains("re")) {
    return {j.at("re").get<double>(), j.value("im", 0.0)};
  }
  throw ParseError("complex entries must be a number, [re, im] or {\"re\", \"im\"}");
}

inline Json matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const DensityMatrix& rho) {
  Json j;
  j["dim"] = rho.dim();
  j["entries"] = matrix_json(rho.matrix());
  return j;
}

/// Accepts {"dim": d, "entries": rows} or a bare list of rows.
inline ComplexMatrix matrix_from_json(const Json& j) {
  const Json& rows = j.is_object() ? j.at("entries") : j;
  if (!rows.is_array() || rows.empty()) throw ParseError("matrix must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (j.is_object() && j.contains("dim") && j.at("dim").get<Eigen::Index>() != n) {
    throw ParseError("'dim' does not match the number of rows");
  }
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError("matrix is not square: row " + std::to_string(r + 1) + " has " +
                       std::to_string(row.is_array() ? row.size() : 0) + " entries, expected " +
                       std::to_string(n));
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

/// Wraps nlohmann type and key errors as ParseError.
template <class Fn>
auto with_parse_errors(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("unexpected JSON layout: ") + e.what());
  }
}

inline DensityMatrix density_matrix_from_json(const Json& j) {
  return with_parse_errors([&] {
    const double tol = j.is_object() ? j.value("tolerance", kDefaultTolerance) : kDefaultTolerance;
    return DensityMatrix(matrix_from_json(j), tol);
  });
}

inline Json to_json(const ValidationReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["dim"] = r.dim;
  j["valid"] = r.ok();
  j["tolerance"] = r.tolerance;
  j["hermiticity_error"] = r.hermiticity_error;
  j["trace_error"] = r.trace_error;
  j["min_eigenvalue"] = r.min_eigenvalue;
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"kind", to_string(x.kind)}, {"magnitude", x.magnitude}, {"message", x.message}});
  }
  j["violations"] = v;
  return j;
}

// --- ensembles ---------------------------------------------------------------

inline Json to_json(const ExtensionMap& m) {
  Json j;
  j["parent_dim"] = m.parent_dim;
  j["target_dim"] = m.target_dim;
  j["zero_positions"] = m.zero_positions;
  return j;
}

inline Json to_json(const QubitEnsemble& ens) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["parent"] = to_json(ens.parent);
  Json qubits = Json::array();
  for (std::size_t k = 0; k < ens.qubits.size(); ++k) {
    const QubitState& q = ens.qubits[k];
    Json jq;
    jq["label"] = k + 1;
    jq["matrix"] = matrix_json(q.matrix.matrix());
    Json prov = Json::array();
    for (const auto& e : q.provenance) prov.push_back(provenance_string(e));
    jq["provenance"] = prov;
    Json lineage = Json::array();
    for (const auto& step : q.lineage) {
      Json s;
      s["map"] = step.map.label();
      s["zero_positions"] = step.map.zero_positions;
      s["kept"] = step.kept == Subsystem::Qubit ? "qubit" : "rest";
      lineage.push_back(std::move(s));
    }
    jq["lineage"] = lineage;
    jq["multiplicity"] = q.multiplicity;
    jq["trivial"] = q.trivial;
    qubits.push_back(std::move(jq));
  }
  j["qubits"] = qubits;
  j["counts"] = {{"total_generated", ens.total_generated}, {"trivial", ens.trivial_count},
                 {"distinct_nontrivial", ens.distinct_count},
                 {"trivial_discarded", ens.trivial_discarded},
                 {"duplicates_merged", ens.duplicates_merged}, {"emitted", ens.qubits.size()}};
  return j;
}

// --- geometry ----------------------------------------------------------------

inline std::string bloch_csv(const std::vector<BlochPoint>& points) {
  std::string out = "label,x1,x2,x3\n";
  for (const auto& p : points) {
    out += std::to_string(p.label) + ',' + format_number(p.x1, 6) + ',' + format_number(p.x2, 6) +
           ',' + format_number(p.x3, 6) + '\n';
  }
  return out;
}

inline Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json("absent");
}

inline Json to_json(const RegionSpec& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["t2"] = s.t2;
  j["t3"] = s.t3;
  j["regime"] = to_string(s.regime);
  Json z0 = Json::array();
  for (const auto& v : s.z0_candidates) z0.push_back(optional_json(v));
  Json radii = Json::array();
  for (const auto& v : s.radius_candidates) radii.push_back(optional_json(v));
  j["z0_candidates"] = z0;
  j["radius_candidates"] = radii;
  j["upper"] = {{"axis", {s.axis_low, s.axis_high}}, {"radius", s.radius}};
  j["lower"] = {{"axis", {-s.axis_high, -s.axis_low}}, {"radius", s.radius}};
  return j;
}

inline Json to_json(const RegionMcReport& r) {
  Json j;
  j["t2"] = r.t2;
  j["t3"] = r.t3 ? Json(*r.t3) : Json("absent");
  j["samples"] = r.samples;
  j["accepted"] = r.accepted;
  j["points"] = r.points;
  j["points_inside"] = r.points_inside;
  j["fraction_inside"] = r.fraction_inside();
  j["max_excess"] = r.max_excess;
  j["insufficient"] = r.insufficient;
  return j;
}

// --- bounds ------------------------------------------------------------------

inline Json position_json(const Position& p) { return Json::array({p.first, p.second}); }

inline Position position_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2) return {j[0].get<int>(), j[1].get<int>()};
  if (j.is_object()) return {j.at("row").get<int>(), j.at("col").get<int>()};
  throw ParseError("positions must be [row, col] or {\"row\", \"col\"}");
}

inline Json to_json(const ReconstructionProblem& p) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["dim"] = p.dim;
  Json known = Json::array();
  for (const auto& [pos, v] : p.known) {
    known.push_back({{"row", pos.first}, {"col", pos.second}, {"value", complex_json(v)}});
  }
  j["known"] = known;
  Json unknown = Json::array();
  for (const auto& pos : p.unknown) unknown.push_back(position_json(pos));
  j["unknown"] = unknown;
  return j;
}

/// {"dim", "known": [{"row", "col", "value"}], "unknown": [[r, c], ...]}.
/// The problem is normalized, so malformed populations throw here.
inline ReconstructionProblem problem_from_json(const Json& j) {
  ReconstructionProblem p = with_parse_errors([&] {
    ReconstructionProblem q;
    q.dim = j.at("dim").get<int>();
    for (const Json& e : j.at("known")) {
      q.known[position_from_json(e)] = complex_from_json(e.at("value"));
    }
    if (j.contains("unknown")) {
      for (const Json& e : j.at("unknown")) q.unknown.push_back(position_from_json(e));
    }
    return q;
  });
  p.normalize();
  return p;
}

inline Json to_json(const BoundSet& b) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["feasible"] = b.feasible;
  Json entries = Json::array();
  for (const auto& e : b.entries) {
    entries.push_back({{"symbol", e.symbol}, {"position", position_json(e.position)},
                       {"modulus2", {e.lower, e.upper}}});
  }
  j["unknowns"] = entries;
  j["l_values"] = b.l_values;
  j["purity_window"] = {b.purity_window.first, b.purity_window.second};
  return j;
}

inline Json to_json(const NestedBounds& nb) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["feasible"] = nb.feasible;
  std::string order;
  Json chain = Json::array();
  for (std::size_t k = 0; k < 3; ++k) {
    const EntryBound& e = nb.envelope[k];
    order += e.symbol;
    Json step = {{"symbol", e.symbol}, {"position", position_json(e.position)},
                 {"depends_on", Json::array()}, {"modulus2_envelope", {e.lower, e.upper}}};
    for (std::size_t i = 0; i < k; ++i) step["depends_on"].push_back(nb.envelope[i].symbol);
    chain.push_back(std::move(step));
  }
  j["order"] = order;
  j["populations"] = nb.populations;
  j["chain"] = chain;
  j["purity_window"] = {nb.purity_window.first, nb.purity_window.second};
  return j;
}

inline Json to_json(const FeasibilityEnvelope& env, const BoundSet& bounds) {
  Json j;
  j["drawn"] = env.drawn;
  j["feasible"] = env.feasible;
  j["empty"] = env.empty();
  Json entries = Json::array();
  for (const auto& e : env.entries) {
    Json je = {{"symbol", entry_symbol(e.position, bounds.l_values.size() == 3 ? 3 : 0)},
               {"position", position_json(e.position)}};
    je["modulus2"] = env.empty() ? Json(nullptr) : Json::array({e.min, e.max});
    entries.push_back(std::move(je));
  }
  j["unknowns"] = entries;
  j["purity"] = env.empty() ? Json(nullptr) : Json::array({env.purity_min, env.purity_max});
  j["containment_violations"] = env.containment_violations(bounds);
  return j;
}

// --- correlation -------------------------------------------------------------

inline Json to_json(const CorrelationReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["measure"] = to_string(r.config.measure);
  j["seed"] = r.config.seed;
  j["pair"] = {r.pair.first, r.pair.second};
  j["eigenvalue"] = to_string(r.which);
  j["n_samples"] = r.n_samples;
  j["final_corr"] = r.final_corr;
  j["mean_eps1"] = r.mean_eps1;
  j["mean_eps2"] = r.mean_eps2;
  j["sd_eps1"] = r.sd_eps1;
  j["sd_eps2"] = r.sd_eps2;
  j["degenerate"] = r.degenerate;
  Json series = Json::array();
  for (const auto& [n, c] : r.running_corr) series.push_back({n, c});
  j["running_corr"] = series;
  return j;
}

inline std::string correlation_csv(const CorrelationReport& r) {
  std::string out = "n,running_corr\n";
  for (const auto& [n, c] : r.running_corr) out += std::to_string(n) + ',' + format_number(c) + '\n';
  return out;
}

}  // namespace qudec
