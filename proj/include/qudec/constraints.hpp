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

// Positivity, fidelity and entropy conditions on derived qubits, and interval
// bounds on unknown entries of a partially measured state.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qudec/decompose.hpp"
#include "qudec/density_matrix.hpp"
#include "qudec/parallel.hpp"
#include "qudec/random_states.hpp"

namespace qudec {

// --- qubit conditions --------------------------------------------------------

struct QubitPositivity {
  double det = 0;
  double purity = 0;
  bool det_ok = false;     // 0 <= det <= 1/4
  bool purity_ok = false;  // 1/2 <= Tr(q^2) <= 1
  bool equivalent = false; // det == (1 - Tr(q^2)) / 2 within tolerance
  bool ok() const { return det_ok && purity_ok; }
};

inline QubitPositivity qubit_positivity(const DensityMatrix& q) {
  if (q.dim() != 2) throw DimensionError("qubit_positivity needs a 2x2 matrix");
  const double tol = q.tolerance();
  QubitPositivity r;
  r.det = determinant(q);
  r.purity = purity(q);
  r.det_ok = r.det >= -tol && r.det <= 0.25 + tol;
  r.purity_ok = r.purity >= 0.5 - tol && r.purity <= 1 + tol;
  r.equivalent = std::abs(r.det - (1 - r.purity) / 2) <= tol;
  return r;
}

inline QubitPositivity qubit_positivity(const QubitState& q) { return qubit_positivity(q.matrix); }

/// F = Tr(q1 q2) + 2 sqrt(det q1 det q2).
inline double fidelity(const DensityMatrix& q1, const DensityMatrix& q2) {
  if (q1.dim() != 2 || q2.dim() != 2) throw DimensionError("fidelity needs two 2x2 matrices");
  const double tol = std::max(q1.tolerance(), q2.tolerance());
  const double d1 = determinant(q1);
  const double d2 = determinant(q2);
  if (d1 < -tol || d2 < -tol) throw InvalidStateError("fidelity of a qubit with negative determinant");
  const double overlap = (q1.matrix() * q2.matrix()).trace().real();
  return overlap + 2 * std::sqrt(std::max(0.0, d1) * std::max(0.0, d2));
}

inline double fidelity(const QubitState& q1, const QubitState& q2) {
  return fidelity(q1.matrix, q2.matrix);
}

/// Natural-log von Neumann entropy; eigenvalues below tolerance count as 0.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0;
  for (double lam : eigenvalues(rho)) {
    if (lam > rho.tolerance()) s -= lam * std::log(lam);
  }
  return s;
}

struct QubitEntropy {
  double entropy = 0;
  bool in_range = false;  // 0 <= S <= log 2
};

inline QubitEntropy entropy_checks(const QubitState& q) {
  QubitEntropy r;
  r.entropy = von_neumann_entropy(q.matrix);
  const double tol = q.matrix.tolerance();
  r.in_range = r.entropy >= -tol && r.entropy <= std::numbers::ln2 + tol;
  return r;
}

struct ExtensionEntropy {
  ExtensionMap map;
  double joint = 0;  // S(sigma); equals S(rho)
  double qubit = 0;
  double rest = 0;
  double mutual_information() const { return qubit + rest - joint; }
  bool subadditive(double tol = kDefaultTolerance) const { return joint <= qubit + rest + tol; }
};

/// Subadditivity and mutual information for every embedding of rho.
inline std::vector<ExtensionEntropy> extension_entropy_checks(const DensityMatrix& rho) {
  std::vector<ExtensionEntropy> out;
  for (const ExtensionMap& map : enumerate_extensions(rho.dim())) {
    const DensityMatrix sigma = extend(rho, map);
    const PartialTraces parts = partial_trace_pair(sigma);
    out.push_back({map, von_neumann_entropy(sigma), von_neumann_entropy(parts.qubit),
                   von_neumann_entropy(parts.rest)});
  }
  return out;
}

// --- reconstruction problems --------------------------------------------------

/// 1-based (row, col) with row < col for off-diagonal positions.
using Position = std::pair<int, int>;

/// Partially known state. Diagonal entries must all be known (one missing
/// diagonal is filled in from the unit trace by normalize()).
struct ReconstructionProblem {
  int dim = 0;
  std::map<Position, cplx> known;
  std::vector<Position> unknown;

  /// Qutrit with the given populations and all three coherences unknown.
  static ReconstructionProblem qutrit_diagonal(double rho11, double rho22) {
    ReconstructionProblem p;
    p.dim = 3;
    p.known[{1, 1}] = rho11;
    p.known[{2, 2}] = rho22;
    p.unknown = {{1, 2}, {1, 3}, {2, 3}};
    p.normalize();
    return p;
  }

  double diagonal(int i) const { return known.at({i, i}).real(); }

  /// Canonicalizes positions to the upper triangle, derives a single missing
  /// diagonal and checks the populations. Throws on malformed problems.
  void normalize(double tol = kDefaultTolerance) {
    if (dim < 2) throw DimensionError("reconstruction problem needs dim >= 2");
    auto check_pos = [&](const Position& p) {
      if (p.first < 1 || p.second < 1 || p.first > dim || p.second > dim) {
        throw DimensionError("entry position out of range");
      }
    };
    std::map<Position, cplx> canon;
    for (const auto& [pos, v] : known) {
      check_pos(pos);
      if (pos.first <= pos.second) {
        canon[pos] = v;
      } else {
        canon[{pos.second, pos.first}] = std::conj(v);
      }
    }
    known = std::move(canon);
    for (auto& p : unknown) {
      check_pos(p);
      if (p.first == p.second) throw InvalidStateError("diagonal entries must be known");
      if (p.first > p.second) std::swap(p.first, p.second);
      if (known.count(p)) throw InvalidStateError("entry listed as both known and unknown");
    }
    std::sort(unknown.begin(), unknown.end());
    unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());

    std::vector<int> missing;
    double sum = 0;
    for (int i = 1; i <= dim; ++i) {
      auto it = known.find({i, i});
      if (it == known.end()) {
        missing.push_back(i);
      } else {
        if (std::abs(it->second.imag()) > tol) throw InvalidStateError("diagonal entries must be real");
        it->second = it->second.real();
        sum += it->second.real();
      }
    }
    if (missing.size() > 1) throw InvalidStateError("at most one diagonal entry may be omitted");
    if (missing.size() == 1) known[{missing[0], missing[0]}] = 1 - sum;
    double total = 0;
    for (int i = 1; i <= dim; ++i) {
      const double v = diagonal(i);
      if (v < -tol || v > 1 + tol) {
        throw InvalidStateError("population rho_" + std::to_string(i) + std::to_string(i) +
                                " = " + std::to_string(v) + " outside [0, 1]");
      }
      total += v;
    }
    if (std::abs(total - 1) > tol) {
      throw InvalidStateError("populations sum to " + std::to_string(total) + ", not 1");
    }
    // Off-diagonal entries not mentioned at all are treated as unknown.
    for (int r = 1; r <= dim; ++r) {
      for (int c = r + 1; c <= dim; ++c) {
        if (!known.count({r, c}) &&
            !std::binary_search(unknown.begin(), unknown.end(), Position{r, c})) {
          unknown.push_back({r, c});
        }
      }
    }
    std::sort(unknown.begin(), unknown.end());
  }

  bool is_unknown(const Position& p) const {
    return std::binary_search(unknown.begin(), unknown.end(), p);
  }

  /// l_i = rho_ii (1 - rho_ii).
  std::vector<double> l_values() const {
    std::vector<double> l;
    for (int i = 1; i <= dim; ++i) l.push_back(diagonal(i) * (1 - diagonal(i)));
    return l;
  }
};

inline std::string entry_symbol(const Position& p, int dim) {
  if (dim == 3) {
    if (p == Position{1, 2}) return "x";
    if (p == Position{1, 3}) return "y";
    if (p == Position{2, 3}) return "z";
  }
  return "r" + std::to_string(p.first) + std::to_string(p.second);
}

inline constexpr double kEmptyIntervalTolerance = 1e-12;

struct EntryBound {
  Position position;
  std::string symbol;
  double lower = 0;  // bounds on |entry|^2
  double upper = 0;
};

struct BoundSet {
  bool feasible = true;
  std::vector<EntryBound> entries;
  std::vector<double> l_values;
  std::pair<double, double> purity_window{0, 0};

  const EntryBound& at(const Position& p) const {
    for (const auto& e : entries) {
      if (e.position == p) return e;
    }
    throw std::out_of_range("no bound for requested entry");
  }
};

/// Necessary conditions for a PSD completion: every fully specified 2x2
/// principal minor is nonnegative, and a fully specified matrix is PSD.
/// For three or fewer levels these are also sufficient.
inline bool completable(const ReconstructionProblem& p, double tol = kDefaultTolerance) {
  for (const auto& [pos, v] : p.known) {
    if (pos.first == pos.second) continue;
    if (std::norm(v) > p.diagonal(pos.first) * p.diagonal(pos.second) + tol) return false;
  }
  if (p.unknown.empty()) {
    ComplexMatrix m(p.dim, p.dim);
    for (const auto& [pos, v] : p.known) {
      m(pos.first - 1, pos.second - 1) = v;
      m(pos.second - 1, pos.first - 1) = std::conj(v);
    }
    return is_psd(m, tol);
  }
  return true;
}

namespace detail {

inline double purity_from(const ReconstructionProblem& p, double unknown_mod2_sum) {
  double s = 0;
  for (const auto& [pos, v] : p.known) s += pos.first == pos.second ? std::norm(v) : 2 * std::norm(v);
  return s + 2 * unknown_mod2_sum;
}

}  // namespace detail

/// Bounds from the positivity of the derived qubits:
///   max{0, l_i - 1/4, l_j - 1/4} <= |rho_ij|^2 <= min{l_i, l_j}.
inline BoundSet rough_bounds(ReconstructionProblem p) {
  p.normalize();
  BoundSet out;
  out.l_values = p.l_values();
  if (!completable(p)) {
    out.feasible = false;
    return out;
  }
  double lo_sum = 0;
  double hi_sum = 0;
  for (const Position& pos : p.unknown) {
    const double li = out.l_values[static_cast<std::size_t>(pos.first - 1)];
    const double lj = out.l_values[static_cast<std::size_t>(pos.second - 1)];
    EntryBound b{pos, entry_symbol(pos, p.dim), std::max({0.0, li - 0.25, lj - 0.25}),
                 std::min(li, lj)};
    if (b.lower > b.upper + kEmptyIntervalTolerance) out.feasible = false;
    lo_sum += b.lower;
    hi_sum += b.upper;
    out.entries.push_back(std::move(b));
  }
  out.purity_window = {std::min(1.0, detail::purity_from(p, lo_sum)),
                       std::min(1.0, detail::purity_from(p, hi_sum))};
  return out;
}

// --- nested (refined) qutrit bounds ---------------------------------------
//
// With populations (d1, d2, d3) and coherences e1, e2, e3 taken in the chosen
// order, det(rho) = D + 2 Re(x z y*) - sum_k d_{m(k)} |e_k|^2, where D = d1 d2 d3
// and m(k) is the population not touched by e_k. The chain is
//   |e1| <= sqrt(d_i d_j)                               (2x2 minor)
//   |e2|^2 <= (D - d_{m1} |e1|^2) / d_{m2}               (det >= 0 at e3 = 0)
//   |e3| <= (-|e1||e2| + sqrt(|e1|^2|e2|^2 + d_{m3} C)) / d_{m3}
// with C = D - d_{m1}|e1|^2 - d_{m2}|e2|^2; the last line is det >= 0 at the
// least favourable relative phase, so every point of the chain is a valid
// state whatever the phases.

struct NestedBounds {
  bool feasible = true;
  std::array<Position, 3> order{};  // elimination order
  std::array<double, 3> populations{};
  std::pair<double, double> purity_window{0, 0};
  std::array<EntryBound, 3> envelope{};  // |e_k|^2 ranges over the whole chain

  double complement(const Position& p) const {
    const int m = 6 - p.first - p.second;
    return populations[static_cast<std::size_t>(m - 1)];
  }

  double pair_product(const Position& p) const {
    return populations[static_cast<std::size_t>(p.first - 1)] *
           populations[static_cast<std::size_t>(p.second - 1)];
  }

  double product() const { return populations[0] * populations[1] * populations[2]; }

  double first_max() const { return std::sqrt(std::max(0.0, pair_product(order[0]))); }

  std::optional<double> second_max(double m1) const {
    if (m1 > first_max() + kEmptyIntervalTolerance) return std::nullopt;
    const double rest = product() - complement(order[0]) * m1 * m1;
    if (rest < -kEmptyIntervalTolerance) return std::nullopt;
    double bound = pair_product(order[1]);
    const double dm = complement(order[1]);
    if (dm > kEmptyIntervalTolerance) bound = std::min(bound, std::max(0.0, rest) / dm);
    return std::sqrt(std::max(0.0, bound));
  }

  std::optional<double> third_max(double m1, double m2) const {
    const auto s = second_max(m1);
    if (!s || m2 > *s + kEmptyIntervalTolerance) return std::nullopt;
    const double c = product() - complement(order[0]) * m1 * m1 - complement(order[1]) * m2 * m2;
    if (c < -kEmptyIntervalTolerance) return std::nullopt;
    const double cc = std::max(0.0, c);
    double bound = std::sqrt(std::max(0.0, pair_product(order[2])));
    const double dm = complement(order[2]);
    const double b = m1 * m2;
    if (dm > kEmptyIntervalTolerance) {
      bound = std::min(bound, (-b + std::sqrt(b * b + dm * cc)) / dm);
    } else if (b > 0) {
      bound = std::min(bound, cc / (2 * b));
    }
    return std::max(0.0, bound);
  }
};

namespace detail {

inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iterations = 80) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo;
  double b = hi;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace detail

/// Elimination orders are given by symbols, e.g. "xyz" (the default) or "zyx".
inline std::array<Position, 3> parse_order(const std::string& s) {
  if (s.size() != 3) throw OutOfRangeError("order must be a permutation of xyz");
  std::array<Position, 3> out{};
  std::string seen;
  for (std::size_t i = 0; i < 3; ++i) {
    switch (s[i]) {
      case 'x': out[i] = {1, 2}; break;
      case 'y': out[i] = {1, 3}; break;
      case 'z': out[i] = {2, 3}; break;
      default: throw OutOfRangeError("order must be a permutation of xyz");
    }
    if (seen.find(s[i]) != std::string::npos) throw OutOfRangeError("order must be a permutation of xyz");
    seen += s[i];
  }
  return out;
}

/// Nested bounds for a qutrit whose populations are known and whose three
/// coherences are unknown. The purity window is Sum rho_ii^2 + 2 Sum |e_k|^2
/// extremized over the chain: a 1000 x 1000 grid in the chain's unit-square
/// parametrization, polished by golden-section line searches.
inline NestedBounds refined_bounds(ReconstructionProblem p, const std::string& order = "xyz",
                                   int grid = 1000) {
  p.normalize();
  if (p.dim != 3) throw DimensionError("refined bounds are available for qutrits only");
  NestedBounds nb;
  nb.order = parse_order(order);
  for (int i = 0; i < 3; ++i) nb.populations[static_cast<std::size_t>(i)] = p.diagonal(i + 1);
  if (!completable(p)) {
    nb.feasible = false;
    return nb;
  }
  if (p.unknown.size() != 3) {
    throw InvalidStateError("refined bounds need all three coherences unknown");
  }

  const double m1max = nb.first_max();
  const double m2max = nb.second_max(0).value_or(0);
  const double m3max = nb.third_max(0, 0).value_or(0);
  for (std::size_t k = 0; k < 3; ++k) {
    const double mx = k == 0 ? m1max : (k == 1 ? m2max : m3max);
    nb.envelope[k] = {nb.order[k], entry_symbol(nb.order[k], 3), 0.0, mx * mx};
  }

  const double diag2 = nb.populations[0] * nb.populations[0] +
                       nb.populations[1] * nb.populations[1] +
                       nb.populations[2] * nb.populations[2];
  // (u, v) in [0,1]^2 -> |e1| = u m1max, |e2| = v second_max(|e1|), |e3| at
  // its chain maximum (purity grows with every modulus).
  auto purity_at = [&](double u, double v) {
    const double m1 = u * m1max;
    const double m2 = v * nb.second_max(m1).value_or(0);
    const double m3 = nb.third_max(m1, m2).value_or(0);
    return diag2 + 2 * (m1 * m1 + m2 * m2 + m3 * m3);
  };
  double best = -1;
  double bu = 0;
  double bv = 0;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      const double u = static_cast<double>(i) / grid;
      const double v = static_cast<double>(j) / grid;
      const double val = purity_at(u, v);
      if (val > best) best = val, bu = u, bv = v;
    }
  }
  const double h = 1.0 / grid;
  for (int round = 0; round < 4; ++round) {
    const double u = detail::golden_max([&](double t) { return purity_at(t, bv); },
                                        std::max(0.0, bu - h), std::min(1.0, bu + h));
    if (purity_at(u, bv) > best) best = purity_at(u, bv), bu = u;
    const double v = detail::golden_max([&](double t) { return purity_at(bu, t); },
                                        std::max(0.0, bv - h), std::min(1.0, bv + h));
    if (purity_at(bu, v) > best) best = purity_at(bu, v), bv = v;
  }
  // The minimum sits at vanishing coherences, which the chain always admits.
  nb.purity_window = {diag2, best};
  return nb;
}

// --- sampling oracle -----------------------------------------------------------

struct EntryEnvelope {
  Position position;
  double min = std::numeric_limits<double>::infinity();  // of |entry|^2
  double max = -std::numeric_limits<double>::infinity();
};

struct FeasibilityEnvelope {
  std::int64_t drawn = 0;
  std::int64_t feasible = 0;
  std::vector<EntryEnvelope> entries;
  double purity_min = std::numeric_limits<double>::infinity();
  double purity_max = -std::numeric_limits<double>::infinity();

  bool empty() const { return feasible == 0; }

  /// Envelope entries lying outside the given bounds (by more than tol).
  std::int64_t containment_violations(const BoundSet& bounds, double tol = 1e-12) const {
    std::int64_t v = 0;
    if (empty()) return 0;
    for (const auto& e : entries) {
      const EntryBound& b = bounds.at(e.position);
      if (e.min < b.lower - tol) ++v;
      if (e.max > b.upper + tol) ++v;
    }
    if (purity_min < bounds.purity_window.first - tol) ++v;
    if (purity_max > bounds.purity_window.second + tol) ++v;
    return v;
  }
};

/// Rejection sampling of completions: each unknown gets |entry|^2 uniform in
/// [0, 1/4] and a uniform phase; PSD completions are kept. Chunks of draws use
/// independent seeded streams, so the result does not depend on `threads`.
inline FeasibilityEnvelope feasibility_sample(ReconstructionProblem p, std::int64_t n,
                                              std::uint64_t seed, unsigned threads = 1) {
  p.normalize();
  if (n < 1000) throw OutOfRangeError("feasibility_sample needs n >= 1000");
  ComplexMatrix base = ComplexMatrix::Zero(p.dim, p.dim);
  for (const auto& [pos, v] : p.known) {
    base(pos.first - 1, pos.second - 1) = v;
    base(pos.second - 1, pos.first - 1) = std::conj(v);
  }
  constexpr std::int64_t kChunk = 4096;
  const auto chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
  std::vector<FeasibilityEnvelope> parts(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    StateSampler rng({p.dim, Measure::HilbertSchmidt, seed}, c);
    FeasibilityEnvelope& env = parts[c];
    for (const Position& pos : p.unknown) env.entries.push_back({pos});
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(n, begin + kChunk);
    ComplexMatrix m = base;
    std::vector<double> mod2(p.unknown.size());
    for (std::int64_t s = begin; s < end; ++s) {
      ++env.drawn;
      for (std::size_t k = 0; k < p.unknown.size(); ++k) {
        mod2[k] = 0.25 * rng.uniform();
        const double phase = 2 * std::numbers::pi * rng.uniform();
        const cplx v = std::polar(std::sqrt(mod2[k]), phase);
        const auto [r, col] = p.unknown[k];
        m(r - 1, col - 1) = v;
        m(col - 1, r - 1) = std::conj(v);
      }
      if (!is_psd(m, 0.0)) continue;
      ++env.feasible;
      for (std::size_t k = 0; k < mod2.size(); ++k) {
        env.entries[k].min = std::min(env.entries[k].min, mod2[k]);
        env.entries[k].max = std::max(env.entries[k].max, mod2[k]);
      }
      const double pur = m.squaredNorm();
      env.purity_min = std::min(env.purity_min, pur);
      env.purity_max = std::max(env.purity_max, pur);
    }
  });
  FeasibilityEnvelope out;
  for (const Position& pos : p.unknown) out.entries.push_back({pos});
  for (const auto& part : parts) {
    out.drawn += part.drawn;
    out.feasible += part.feasible;
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
      out.entries[k].min = std::min(out.entries[k].min, part.entries[k].min);
      out.entries[k].max = std::max(out.entries[k].max, part.entries[k].max);
    }
    out.purity_min = std::min(out.purity_min, part.purity_min);
    out.purity_max = std::max(out.purity_max, part.purity_max);
  }
  return out;
}

}  // namespace qudec
