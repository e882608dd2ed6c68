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

// Qubit decomposition of a qudit density matrix.
//
// A d x d state is embedded into an l x l matrix (l the closest even number
// above d) by inserting zero rows/columns in matched pairs. The embedding is
// read as a qubit (x) n-level system, n = l/2, with qubit-major indexing
// (index = qubit * n + level), and both partial traces are taken. Reductions
// with n > 2 are decomposed again until only qubits remain.
//
// The enumeration is carried out symbolically: every entry of a derived
// qubit is a set of parent entries whose sum it equals. Two qubits are
// duplicates iff their four entry sets coincide, and a qubit is trivial iff
// it is constant over all states (no off-diagonal content and a diagonal that
// is either empty or the whole parent trace).

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "qudec/density_matrix.hpp"

namespace qudec {

inline int extension_target_dim(int d) { return d % 2 != 0 ? d + 1 : d + 2; }
inline int extension_zero_count(int d) { return d % 2 != 0 ? 1 : 2; }

/// Number of distinct embeddings: d+1 for odd d, (d+2)(d+1)/2 for even d.
inline std::int64_t extension_count(int d) {
  return d % 2 != 0 ? std::int64_t{d} + 1 : (std::int64_t{d} + 2) * (d + 1) / 2;
}

struct ExtensionMap {
  int parent_dim = 0;
  int target_dim = 0;
  std::vector<int> zero_positions;  // 1-based, ascending

  static ExtensionMap make(int parent_dim, std::vector<int> zeros) {
    if (parent_dim < 1) throw OutOfRangeError("parent dimension must be >= 1");
    ExtensionMap m;
    m.parent_dim = parent_dim;
    m.target_dim = extension_target_dim(parent_dim);
    std::sort(zeros.begin(), zeros.end());
    if (static_cast<int>(zeros.size()) != extension_zero_count(parent_dim)) {
      throw DimensionError("dimension " + std::to_string(parent_dim) + " needs " +
                           std::to_string(extension_zero_count(parent_dim)) +
                           " zero positions");
    }
    if (std::adjacent_find(zeros.begin(), zeros.end()) != zeros.end()) {
      throw DimensionError("zero positions must be distinct");
    }
    for (int z : zeros) {
      if (z < 1 || z > m.target_dim) throw DimensionError("zero position out of range");
    }
    m.zero_positions = std::move(zeros);
    return m;
  }

  /// kept_positions()[k] is the 1-based target position housing parent index k+1.
  std::vector<int> kept_positions() const {
    std::vector<int> kept;
    kept.reserve(static_cast<std::size_t>(parent_dim));
    for (int p = 1; p <= target_dim; ++p) {
      if (!std::binary_search(zero_positions.begin(), zero_positions.end(), p)) {
        kept.push_back(p);
      }
    }
    return kept;
  }

  std::string label() const {
    std::string s = "zero{";
    for (std::size_t i = 0; i < zero_positions.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(zero_positions[i]);
    }
    return s + "}";
  }

  auto operator<=>(const ExtensionMap&) const = default;
};

/// All embeddings of a d-level state, ordered lexicographically by zero
/// positions.
inline std::vector<ExtensionMap> enumerate_extensions(int d) {
  if (d < 2) throw OutOfRangeError("enumerate_extensions needs d >= 2");
  const int l = extension_target_dim(d);
  std::vector<ExtensionMap> maps;
  if (extension_zero_count(d) == 1) {
    for (int z = 1; z <= l; ++z) maps.push_back(ExtensionMap::make(d, {z}));
  } else {
    for (int z1 = 1; z1 <= l; ++z1) {
      for (int z2 = z1 + 1; z2 <= l; ++z2) maps.push_back(ExtensionMap::make(d, {z1, z2}));
    }
  }
  return maps;
}

inline DensityMatrix extend(const DensityMatrix& rho, const ExtensionMap& map) {
  if (map.parent_dim != rho.dim()) {
    throw DimensionError("extension map built for dimension " +
                         std::to_string(map.parent_dim) + " applied to dimension " +
                         std::to_string(rho.dim()));
  }
  const std::vector<int> kept = map.kept_positions();
  ComplexMatrix sigma = ComplexMatrix::Zero(map.target_dim, map.target_dim);
  for (int j = 0; j < rho.dim(); ++j) {
    for (int k = 0; k < rho.dim(); ++k) {
      sigma(kept[j] - 1, kept[k] - 1) = rho(j, k);
    }
  }
  return DensityMatrix(std::move(sigma), rho.tolerance());
}

struct PartialTraces {
  DensityMatrix qubit;  // trace over the n-level factor
  DensityMatrix rest;   // trace over the qubit
};

/// Both reductions of a 2n x 2n matrix in the qubit-major basis.
inline PartialTraces partial_trace_pair(const DensityMatrix& sigma) {
  const int l = sigma.dim();
  if (l % 2 != 0) {
    throw DimensionError("partial_trace_pair needs an even dimension, got " +
                         std::to_string(l));
  }
  const int n = l / 2;
  ComplexMatrix q = ComplexMatrix::Zero(2, 2);
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (int a = 0; a < 2; ++a) {
    for (int a2 = 0; a2 < 2; ++a2) {
      for (int b = 0; b < n; ++b) q(a, a2) += sigma(a * n + b, a2 * n + b);
    }
  }
  for (int b = 0; b < n; ++b) {
    for (int b2 = 0; b2 < n; ++b2) {
      for (int a = 0; a < 2; ++a) r(b, b2) += sigma(a * n + b, a * n + b2);
    }
  }
  return {DensityMatrix(std::move(q), sigma.tolerance()),
          DensityMatrix(std::move(r), sigma.tolerance())};
}

/// Recursion for the total number of generated qubits:
/// n_d = f(d) (n_{g(d)} + 1), n_3 = 8, g(d) = (d+1)/2 (odd) or (d+2)/2 (even).
inline std::int64_t count_total(int d) {
  if (d < 3) throw OutOfRangeError("count_total needs d >= 3");
  if (d == 3) return 8;
  const std::int64_t f = extension_count(d);
  const std::int64_t inner = count_total(extension_target_dim(d) / 2) + 1;
  if (inner > std::numeric_limits<std::int64_t>::max() / f) {
    throw OutOfRangeError("count_total overflows 64 bits for d = " + std::to_string(d));
  }
  return f * inner;
}

// --- symbolic entries --------------------------------------------------------

/// 0-based coordinate of a parent entry.
struct EntryRef {
  int row = 0;
  int col = 0;
  auto operator<=>(const EntryRef&) const = default;
};

/// Sorted, duplicate-free set of parent entries; the value is their sum.
using SymbolicEntry = std::vector<EntryRef>;

/// Qubit entries in the order (1,1), (1,2), (2,1), (2,2).
using QubitProvenance = std::array<SymbolicEntry, 4>;

enum class Subsystem { Qubit, Rest };

inline const char* to_string(Subsystem s) { return s == Subsystem::Qubit ? "qubit" : "rest"; }

struct LineageStep {
  ExtensionMap map;
  Subsystem kept = Subsystem::Qubit;
  auto operator<=>(const LineageStep&) const = default;
};

/// "r11+r22+r33" with 1-based indices; "0" for the empty sum. Indices above
/// 9 are written r[row,col].
inline std::string provenance_string(const SymbolicEntry& e) {
  if (e.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += "+";
    const int r = e[i].row + 1;
    const int c = e[i].col + 1;
    if (r < 10 && c < 10) {
      s += "r" + std::to_string(r) + std::to_string(c);
    } else {
      s += "r[" + std::to_string(r) + "," + std::to_string(c) + "]";
    }
  }
  return s;
}

inline cplx evaluate(const SymbolicEntry& e, const ComplexMatrix& parent) {
  cplx sum{0, 0};
  for (const EntryRef& ref : e) sum += parent(ref.row, ref.col);
  return sum;
}

/// Constant over every state of dimension parent_dim.
inline bool is_trivial(const QubitProvenance& p, int parent_dim) {
  if (!p[1].empty() || !p[2].empty()) return false;
  const auto full = static_cast<std::size_t>(parent_dim);
  return p[0].empty() || p[0].size() == full;
}

struct QubitState {
  DensityMatrix matrix;
  QubitProvenance provenance;
  std::vector<LineageStep> lineage;
  std::int64_t multiplicity = 1;  // raw qubits merged into this one
  bool trivial = false;

  /// Parent entries feeding the off-diagonal (1,2) element.
  const SymbolicEntry& coherence_terms() const { return provenance[1]; }
};

struct QubitEnsemble {
  DensityMatrix parent;
  std::vector<QubitState> qubits;
  std::int64_t total_generated = 0;
  std::int64_t trivial_count = 0;      // raw qubits that are trivial
  std::int64_t distinct_count = 0;     // distinct non-trivial qubits
  std::int64_t trivial_discarded = 0;  // raw trivial qubits not emitted
  std::int64_t duplicates_merged = 0;  // raw qubits folded into an earlier one
};

struct DecomposeOptions {
  bool dedup = true;
  bool keep_trivial = false;
};

namespace detail {

class SymbolicMatrix {
 public:
  explicit SymbolicMatrix(int dim)
      : dim_(dim), cells_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {}

  static SymbolicMatrix identity(int dim) {
    SymbolicMatrix m(dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) m.at(r, c) = {EntryRef{r, c}};
    }
    return m;
  }

  int dim() const { return dim_; }
  SymbolicEntry& at(int r, int c) { return cells_[index(r, c)]; }
  const SymbolicEntry& at(int r, int c) const { return cells_[index(r, c)]; }

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(dim_) +
           static_cast<std::size_t>(c);
  }
  int dim_;
  std::vector<SymbolicEntry> cells_;
};

inline void append_sorted(SymbolicEntry& into, const SymbolicEntry& from) {
  if (from.empty()) return;
  SymbolicEntry merged;
  merged.reserve(into.size() + from.size());
  std::merge(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
  into = std::move(merged);
}

inline SymbolicMatrix symbolic_extend(const SymbolicMatrix& parent, const ExtensionMap& map) {
  const std::vector<int> kept = map.kept_positions();
  SymbolicMatrix sigma(map.target_dim);
  for (int j = 0; j < parent.dim(); ++j) {
    for (int k = 0; k < parent.dim(); ++k) sigma.at(kept[j] - 1, kept[k] - 1) = parent.at(j, k);
  }
  return sigma;
}

inline std::pair<SymbolicMatrix, SymbolicMatrix> symbolic_partial_trace(
    const SymbolicMatrix& sigma) {
  const int n = sigma.dim() / 2;
  SymbolicMatrix q(2);
  SymbolicMatrix r(n);
  for (int a = 0; a < 2; ++a) {
    for (int a2 = 0; a2 < 2; ++a2) {
      for (int b = 0; b < n; ++b) append_sorted(q.at(a, a2), sigma.at(a * n + b, a2 * n + b));
    }
  }
  for (int b = 0; b < n; ++b) {
    for (int b2 = 0; b2 < n; ++b2) {
      for (int a = 0; a < 2; ++a) append_sorted(r.at(b, b2), sigma.at(a * n + b, a * n + b2));
    }
  }
  return {std::move(q), std::move(r)};
}

inline QubitProvenance cells_of(const SymbolicMatrix& q) {
  return {q.at(0, 0), q.at(0, 1), q.at(1, 0), q.at(1, 1)};
}

inline QubitProvenance substitute(const QubitProvenance& local, const SymbolicMatrix& outer) {
  QubitProvenance out;
  for (std::size_t i = 0; i < 4; ++i) {
    for (const EntryRef& ref : local[i]) append_sorted(out[i], outer.at(ref.row, ref.col));
  }
  return out;
}

struct TemplateQubit {
  QubitProvenance entries;
  std::vector<LineageStep> lineage;
  std::int64_t multiplicity = 1;
  bool trivial = false;
};

/// Decomposition of a generic d-level state in its own coordinates. When
/// merged, identical qubits are folded into the first occurrence (depth-first
/// order) and their multiplicities summed.
struct QubitTemplate {
  int dim = 0;
  bool merged = false;
  std::vector<TemplateQubit> qubits;
  std::int64_t total = 0;
};

inline const QubitTemplate& qubit_template(int d, bool merged);

inline std::unique_ptr<QubitTemplate> build_template(int d, bool merged) {
  auto out = std::make_unique<QubitTemplate>();
  out->dim = d;
  out->merged = merged;
  std::map<QubitProvenance, std::size_t> seen;

  auto emit = [&](QubitProvenance entries, std::vector<LineageStep> lineage,
                  std::int64_t multiplicity) {
    out->total += multiplicity;
    if (merged) {
      auto [it, inserted] = seen.try_emplace(entries, out->qubits.size());
      if (!inserted) {
        out->qubits[it->second].multiplicity += multiplicity;
        return;
      }
    }
    const bool trivial = is_trivial(entries, d);
    out->qubits.push_back({std::move(entries), std::move(lineage), multiplicity, trivial});
  };

  const SymbolicMatrix parent = SymbolicMatrix::identity(d);
  for (const ExtensionMap& map : enumerate_extensions(d)) {
    auto [q, r] = symbolic_partial_trace(symbolic_extend(parent, map));
    emit(cells_of(q), {{map, Subsystem::Qubit}}, 1);
    if (r.dim() == 2) {
      emit(cells_of(r), {{map, Subsystem::Rest}}, 1);
      continue;
    }
    for (const TemplateQubit& t : qubit_template(r.dim(), merged).qubits) {
      std::vector<LineageStep> lineage;
      lineage.reserve(t.lineage.size() + 1);
      lineage.push_back({map, Subsystem::Rest});
      lineage.insert(lineage.end(), t.lineage.begin(), t.lineage.end());
      emit(substitute(t.entries, r), std::move(lineage), t.multiplicity);
    }
  }
  return out;
}

/// Memoized per (d, merged); safe to call concurrently.
inline const QubitTemplate& qubit_template(int d, bool merged) {
  static std::mutex mutex;
  static std::map<std::pair<int, bool>, std::unique_ptr<QubitTemplate>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({d, merged});
    if (it != cache.end()) return *it->second;
  }
  // Built outside the lock: construction recurses into smaller dimensions.
  auto built = build_template(d, merged);
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace({d, merged}, std::move(built));
  return *it->second;
}

inline QubitState make_qubit(const DensityMatrix& parent, QubitProvenance provenance,
                             std::vector<LineageStep> lineage, std::int64_t multiplicity,
                             bool trivial) {
  ComplexMatrix m(2, 2);
  m(0, 0) = evaluate(provenance[0], parent.matrix());
  m(0, 1) = evaluate(provenance[1], parent.matrix());
  m(1, 0) = evaluate(provenance[2], parent.matrix());
  m(1, 1) = evaluate(provenance[3], parent.matrix());
  return {DensityMatrix(std::move(m), parent.tolerance()), std::move(provenance),
          std::move(lineage), multiplicity, trivial};
}

}  // namespace detail

/// Full recursive decomposition. With dedup the ensemble holds one
/// representative per distinct qubit (first in depth-first lineage order);
/// trivial qubits are dropped unless keep_trivial is set. The counters always
/// describe the complete raw enumeration.
inline QubitEnsemble decompose_recursive(const DensityMatrix& rho,
                                         const DecomposeOptions& options = {}) {
  const int d = rho.dim();
  if (d < 2) throw OutOfRangeError("decompose_recursive needs d >= 2");

  const detail::QubitTemplate& merged = detail::qubit_template(d, true);
  QubitEnsemble ens;
  ens.parent = rho;
  ens.total_generated = merged.total;
  for (const auto& t : merged.qubits) {
    if (t.trivial) {
      ens.trivial_count += t.multiplicity;
    } else {
      ++ens.distinct_count;
    }
  }

  const detail::QubitTemplate& source = options.dedup ? merged : detail::qubit_template(d, false);
  for (const auto& t : source.qubits) {
    if (t.trivial && !options.keep_trivial) {
      ens.trivial_discarded += t.multiplicity;
      continue;
    }
    ens.qubits.push_back(detail::make_qubit(rho, t.entries, t.lineage, t.multiplicity, t.trivial));
  }
  ens.duplicates_merged = ens.total_generated - ens.trivial_discarded -
                          static_cast<std::int64_t>(ens.qubits.size());
  return ens;
}

/// The six qubits of a qutrit in the fixed order rho_1 .. rho_6: the qubit
/// and the remaining reduction of the embeddings with the zero row/column at
/// positions 4, 1 and 2 respectively.
inline QubitEnsemble qutrit_qubits(const DensityMatrix& rho) {
  if (rho.dim() != 3) {
    throw DimensionError("qutrit_qubits needs a 3x3 state, got dimension " +
                         std::to_string(rho.dim()));
  }
  require_valid(rho);
  QubitEnsemble ens;
  ens.parent = rho;
  const auto parent = detail::SymbolicMatrix::identity(3);
  for (int zero : {4, 1, 2}) {
    const ExtensionMap map = ExtensionMap::make(3, {zero});
    auto [q, r] = detail::symbolic_partial_trace(detail::symbolic_extend(parent, map));
    ens.qubits.push_back(
        detail::make_qubit(rho, detail::cells_of(q), {{map, Subsystem::Qubit}}, 1, false));
    ens.qubits.push_back(
        detail::make_qubit(rho, detail::cells_of(r), {{map, Subsystem::Rest}}, 1, false));
  }
  ens.total_generated = 6;
  ens.distinct_count = 6;
  return ens;
}

/// Distinct non-trivial qubits of a generic d-level state.
inline std::int64_t count_distinct(int d) {
  std::int64_t n = 0;
  for (const auto& t : detail::qubit_template(d, true).qubits) n += t.trivial ? 0 : 1;
  return n;
}

/// Variant of the total count in which the inner reduction contributes only
/// its distinct non-trivial qubits: f(d) (distinct(g(d)) + 1). For d = 4 this
/// is 15 * 7 = 105 against the raw recursion's 135.
inline std::int64_t count_total_premerged(int d) {
  if (d < 4) throw OutOfRangeError("count_total_premerged needs d >= 4");
  return extension_count(d) * (count_distinct(extension_target_dim(d) / 2) + 1);
}

}  // namespace qudec
