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

// Bloch-sphere picture of a qudit through a quorum of its derived qubits,
// the purity and coherence identities for the canonical qutrit set, and the
// regions the canonical points can occupy once Tr(rho^2) and Tr(rho^3) are
// fixed.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qudec/decompose.hpp"
#include "qudec/density_matrix.hpp"
#include "qudec/parallel.hpp"
#include "qudec/random_states.hpp"

namespace qudec {

class QuorumError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BlochPoint {
  int label = 0;
  double x1 = 0;
  double x2 = 0;
  double x3 = 0;

  double norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }
  /// Distance to the x3 axis; equals the qubit's coherence 2|rho_12|.
  double axis_distance() const { return std::hypot(x1, x2); }
};

/// P = (q12 + q21, i (q12 - q21), 2 q11 - 1). The imaginary residue is dropped
/// once the input has passed the Hermiticity check.
inline BlochPoint bloch_point(const DensityMatrix& q, int label) {
  if (q.dim() != 2) throw DimensionError("bloch_point needs a 2x2 matrix");
  require_hermitian(q.matrix(), q.tolerance());
  const cplx q12 = q(0, 1);
  const cplx q21 = q(1, 0);
  const cplx i{0, 1};
  return {label, (q12 + q21).real(), (i * (q12 - q21)).real(), 2 * q(0, 0).real() - 1};
}

inline BlochPoint bloch_point(const QubitState& q, int label) {
  return bloch_point(q.matrix, label);
}

/// Indices (0-based) into a QubitEnsemble's qubit list.
struct Quorum {
  std::vector<std::size_t> members;

  /// {rho_1, rho_4, rho_5} within qutrit_qubits() order.
  static Quorum canonical_qutrit() { return {{0, 3, 4}}; }
};

/// Each member must carry at most one parent off-diagonal entry, and the
/// members together must hit every unordered off-diagonal pair exactly once.
inline void validate_quorum(const QubitEnsemble& ens, const Quorum& quorum) {
  const int d = ens.parent.dim();
  const std::size_t pairs = static_cast<std::size_t>(d) * static_cast<std::size_t>(d - 1) / 2;
  if (quorum.members.size() != pairs) {
    throw QuorumError("quorum for dimension " + std::to_string(d) + " needs " +
                      std::to_string(pairs) + " members, got " +
                      std::to_string(quorum.members.size()));
  }
  std::set<std::pair<int, int>> covered;
  for (std::size_t idx : quorum.members) {
    if (idx >= ens.qubits.size()) throw QuorumError("quorum member index out of range");
    const SymbolicEntry& terms = ens.qubits[idx].coherence_terms();
    if (terms.size() > 1) {
      throw QuorumError("quorum member " + std::to_string(idx + 1) +
                        " mixes several off-diagonal entries: " + provenance_string(terms));
    }
    if (terms.empty()) continue;
    const auto [r, c] = std::minmax(terms[0].row, terms[0].col);
    if (!covered.insert({r, c}).second) {
      throw QuorumError("off-diagonal pair (" + std::to_string(r + 1) + "," +
                        std::to_string(c + 1) + ") covered twice");
    }
  }
  if (covered.size() != pairs) throw QuorumError("quorum does not cover every off-diagonal entry");
}

/// Greedy quorum: walk the ensemble in its (lineage) order and take the first
/// qubit that houses a single, still uncovered off-diagonal entry.
inline Quorum select_quorum(const QubitEnsemble& ens) {
  const int d = ens.parent.dim();
  const std::size_t pairs = static_cast<std::size_t>(d) * static_cast<std::size_t>(d - 1) / 2;
  std::set<std::pair<int, int>> covered;
  Quorum q;
  for (std::size_t i = 0; i < ens.qubits.size() && covered.size() < pairs; ++i) {
    const SymbolicEntry& terms = ens.qubits[i].coherence_terms();
    if (terms.size() != 1) continue;
    const auto key = std::minmax(terms[0].row, terms[0].col);
    if (covered.insert(key).second) q.members.push_back(i);
  }
  if (covered.size() != pairs) throw QuorumError("ensemble admits no covering quorum");
  return q;
}

inline std::vector<BlochPoint> quorum_representation(const QubitEnsemble& ens,
                                                     const Quorum& quorum) {
  std::vector<BlochPoint> pts;
  pts.reserve(quorum.members.size());
  int label = 1;
  for (std::size_t idx : quorum.members) pts.push_back(bloch_point(ens.qubits.at(idx), label++));
  return pts;
}

/// Points of rho_1, rho_4, rho_5 labelled 1, 2, 3.
inline std::array<BlochPoint, 3> canonical_representation(const DensityMatrix& rho) {
  const QubitEnsemble ens = qutrit_qubits(rho);
  return {bloch_point(ens.qubits[0], 1), bloch_point(ens.qubits[3], 2),
          bloch_point(ens.qubits[4], 3)};
}

struct IdentityCheck {
  double lhs = 0;
  double rhs = 0;
  double difference() const { return std::abs(lhs - rhs); }
};

struct PurityIdentity : IdentityCheck {
  double qubit_purity_sum = 0;  // sum of Tr(rho_j^2) over the canonical set
  bool upper_bound_holds = false;
};

/// lhs = Tr(rho^2); rhs = sum_{j=1,4,5} (Tr(rho_j^2) - x3_j^2 / 4) - 5/4.
inline PurityIdentity purity_identity_check(const DensityMatrix& rho) {
  const QubitEnsemble ens = qutrit_qubits(rho);
  PurityIdentity out;
  out.lhs = purity(rho);
  double sum = 0;
  for (std::size_t j : Quorum::canonical_qutrit().members) {
    const double p = purity(ens.qubits[j].matrix);
    const double x3 = bloch_point(ens.qubits[j], 0).x3;
    out.qubit_purity_sum += p;
    sum += p - x3 * x3 / 4;
  }
  out.rhs = sum - 5.0 / 4;
  out.upper_bound_holds = out.lhs <= out.qubit_purity_sum + rho.tolerance();
  return out;
}

/// lhs = C(rho); rhs = sum of the members' coherences.
inline IdentityCheck coherence_sum_check(const QubitEnsemble& ens, const Quorum& quorum) {
  validate_quorum(ens, quorum);
  IdentityCheck out;
  out.lhs = coherence(ens.parent);
  for (std::size_t idx : quorum.members) out.rhs += coherence(ens.qubits[idx].matrix);
  return out;
}

// --- invariant windows -----------------------------------------------------

inline constexpr double kInvariantSlack = 1e-12;

struct T3Bounds {
  double min = 0;
  double max = 0;
};

namespace detail {

inline double check_t2(double t2) {
  if (!(t2 >= 1.0 / 3 - kInvariantSlack && t2 <= 1 + kInvariantSlack)) {
    throw OutOfRangeError("t2 = " + std::to_string(t2) + " outside [1/3, 1]");
  }
  return std::clamp(t2, 1.0 / 3, 1.0);
}

/// sqrt(max(0, 6 t2 - 2)); the argument only dips below zero by rounding.
inline double root6(double t2) { return std::sqrt(std::max(0.0, 6 * t2 - 2)); }

/// sqrt of a curve argument, absent when the argument is negative.
inline std::optional<double> curve_sqrt(double arg) {
  if (arg < -kInvariantSlack) return std::nullopt;
  return std::sqrt(std::max(0.0, arg));
}

}  // namespace detail

inline double t3_max(double t2) {
  t2 = detail::check_t2(t2);
  const double s = detail::root6(t2);
  return (-s + 3 * t2 * (s + 6) - 4) / 18;
}

/// Branch of t3_min valid on [1/3, 1/2].
inline double t3_min_mixed_branch(double t2) {
  const double s = detail::root6(t2);
  return (s - 3 * t2 * (s - 6) - 4) / 18;
}

/// Branch of t3_min valid on [1/2, 1].
inline double t3_min_rank2_branch(double t2) { return (3 * t2 - 1) / 2; }

inline double t3_min(double t2) {
  t2 = detail::check_t2(t2);
  return t2 <= 0.5 ? t3_min_mixed_branch(t2) : t3_min_rank2_branch(t2);
}

inline T3Bounds t3_bounds(double t2) { return {t3_min(t2), t3_max(t2)}; }

/// Ascending spectrum of the qutrit states with invariants (t2, t3): the
/// roots of x^3 - x^2 + e2 x - e3 with e2 = (1 - t2)/2, e3 = (t3 - t2 + e2)/3.
inline std::array<double, 3> spectrum_from_invariants(double t2, double t3) {
  const T3Bounds b = t3_bounds(t2);
  if (t3 < b.min - 1e-9 || t3 > b.max + 1e-9) {
    throw OutOfRangeError("t3 = " + std::to_string(t3) + " outside [" + std::to_string(b.min) +
                          ", " + std::to_string(b.max) + "]");
  }
  const double e2 = (1 - t2) / 2;
  const double e3 = (t3 - t2 + e2) / 3;
  // Depressed cubic in u = x - 1/3: u^3 + p u + q = 0.
  const double p = e2 - 1.0 / 3;
  const double q = -2.0 / 27 + e2 / 3 - e3;
  std::array<double, 3> out{};
  if (p > -1e-300) {
    out = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  } else {
    const double m = 2 * std::sqrt(-p / 3);
    const double arg = std::clamp(3 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3;
    for (int k = 0; k < 3; ++k) {
      out[static_cast<std::size_t>(k)] =
          1.0 / 3 + m * std::cos(theta - 2 * std::numbers::pi * k / 3);
    }
  }
  for (double& v : out) v = std::max(v, 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

// --- allowed regions ---------------------------------------------------------

inline constexpr double kRegionTolerance = 1e-9;

/// Two regions symmetric about the x-y plane. The upper one (holding point 1)
/// is the set of points within `radius` of the x3-axis segment
/// [axis_low, axis_high]; the lower one (points 2 and 3) is its mirror image.
///
/// Which candidate curves describe the region depends on where t3 sits:
///   maximal t3                -> centre 1/3 - sqrt(t2/6 - 1/18), radius sqrt(3 t2/2 - 1/2)
///   minimal t3, t2 <= 1/2     -> centre 1/3 + sqrt(t2/6 - 1/18), radius sqrt(3 t2/2 - 1/2)
///   minimal t3, t2 >  1/2     -> centre 1/2 - sqrt(t2/2 - 1/4), radius 1/2 + sqrt(t2/2 - 1/4)
///   strictly between          -> centre anywhere between the first two, radius sqrt(2 t2 - 2/3)
/// The first three are balls swept exactly by Haar-random states of the
/// corresponding spectrum; the last one is an envelope, checked by sampling.
struct RegionSpec {
  enum class Regime { MaximalT3, MinimalT3Mixed, MinimalT3RankTwo, Interior };

  double t2 = 0;
  double t3 = 0;
  std::array<std::optional<double>, 3> z0_candidates;
  std::array<std::optional<double>, 3> radius_candidates;  // clamped to [0, 1]
  Regime regime = Regime::Interior;
  double axis_low = 0;
  double axis_high = 0;
  double radius = 0;

  /// Distance beyond the boundary of the upper (sign = +1) or lower region;
  /// nonpositive inside.
  double excess(const BlochPoint& p, int sign) const {
    const double z = sign * p.x3;
    const double zc = std::clamp(z, axis_low, axis_high);
    return std::hypot(p.axis_distance(), z - zc) - radius;
  }

  double excess(const BlochPoint& p) const { return excess(p, p.label == 1 ? +1 : -1); }

  bool contains(const BlochPoint& p, double tol = kRegionTolerance) const {
    return excess(p) <= tol;
  }
};

inline const char* to_string(RegionSpec::Regime r) {
  switch (r) {
    case RegionSpec::Regime::MaximalT3: return "maximal_t3";
    case RegionSpec::Regime::MinimalT3Mixed: return "minimal_t3_mixed";
    case RegionSpec::Regime::MinimalT3RankTwo: return "minimal_t3_rank2";
    case RegionSpec::Regime::Interior: return "interior";
  }
  return "unknown";
}

inline RegionSpec allowed_region(double t2, double t3) {
  t2 = detail::check_t2(t2);
  const T3Bounds b = t3_bounds(t2);
  if (t3 < b.min - kRegionTolerance || t3 > b.max + kRegionTolerance) {
    throw OutOfRangeError("t3 = " + std::to_string(t3) + " outside [" + std::to_string(b.min) +
                          ", " + std::to_string(b.max) + "] for t2 = " + std::to_string(t2));
  }
  RegionSpec spec;
  spec.t2 = t2;
  spec.t3 = t3;

  const auto shift = detail::curve_sqrt(t2 / 6 - 1.0 / 18);
  const auto rank2 = detail::curve_sqrt(t2 / 2 - 1.0 / 4);
  if (shift) {
    spec.z0_candidates[0] = 1.0 / 3 + *shift;
    spec.z0_candidates[1] = 1.0 / 3 - *shift;
  }
  if (rank2) spec.z0_candidates[2] = 0.5 - *rank2;

  auto clamp_radius = [](std::optional<double> r) -> std::optional<double> {
    if (!r) return r;
    return std::clamp(*r, 0.0, 1.0);
  };
  spec.radius_candidates[0] = clamp_radius(detail::curve_sqrt(3 * t2 / 2 - 0.5));
  if (rank2) spec.radius_candidates[1] = clamp_radius(0.5 + *rank2);
  spec.radius_candidates[2] = clamp_radius(detail::curve_sqrt(2 * t2 - 2.0 / 3));

  const double r_equal = spec.radius_candidates[0].value_or(0.0);
  if (std::abs(t3 - b.max) <= kRegionTolerance) {
    spec.regime = RegionSpec::Regime::MaximalT3;
    spec.axis_low = spec.axis_high = spec.z0_candidates[1].value_or(1.0 / 3);
    spec.radius = r_equal;
  } else if (std::abs(t3 - b.min) <= kRegionTolerance && t2 <= 0.5) {
    spec.regime = RegionSpec::Regime::MinimalT3Mixed;
    spec.axis_low = spec.axis_high = spec.z0_candidates[0].value_or(1.0 / 3);
    spec.radius = r_equal;
  } else if (std::abs(t3 - b.min) <= kRegionTolerance) {
    spec.regime = RegionSpec::Regime::MinimalT3RankTwo;
    spec.axis_low = spec.axis_high = spec.z0_candidates[2].value_or(0.5);
    spec.radius = spec.radius_candidates[1].value_or(0.5);
  } else {
    spec.regime = RegionSpec::Regime::Interior;
    spec.axis_low = spec.z0_candidates[1].value_or(1.0 / 3);
    spec.axis_high = spec.z0_candidates[0].value_or(1.0 / 3);
    spec.radius = spec.radius_candidates[2].value_or(0.0);
  }
  return spec;
}

// --- Monte-Carlo check of the regions --------------------------------------

struct RegionMcOptions {
  /// With a t3, states are drawn with exactly the spectrum fixed by (t2, t3)
  /// and Haar-random eigenvectors. Without one, Hilbert-Schmidt states are
  /// filtered to |Tr(rho^2) - t2| < window and each is tested against the
  /// region of its own invariants.
  std::optional<double> t3;
  double window = 0.005;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct RegionMcReport {
  double t2 = 0;
  std::optional<double> t3;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  std::int64_t accepted = 0;
  std::int64_t points = 0;
  std::int64_t points_inside = 0;
  double max_excess = -1;  // largest distance of a point beyond its region
  bool insufficient = false;

  double fraction_inside() const {
    return points == 0 ? 0.0 : static_cast<double>(points_inside) / static_cast<double>(points);
  }
};

inline RegionMcReport region_montecarlo_check(double t2, std::int64_t samples,
                                              const RegionMcOptions& opt = {}) {
  t2 = detail::check_t2(t2);
  const bool fixed = opt.t3.has_value();
  if (fixed) {
    if (samples < 100) throw OutOfRangeError("fixed-spectrum check needs >= 100 samples");
  } else if (samples < 10000) {
    throw OutOfRangeError("filtered check needs >= 10^4 samples");
  }
  std::vector<double> spectrum;
  std::optional<RegionSpec> fixed_region;
  if (fixed) {
    const auto s = spectrum_from_invariants(t2, *opt.t3);
    spectrum.assign(s.begin(), s.end());
    fixed_region = allowed_region(t2, *opt.t3);
  }

  constexpr std::int64_t kChunk = 1024;
  const auto chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  std::vector<RegionMcReport> partial(chunks);
  parallel_chunks(chunks, opt.threads, [&](std::size_t c) {
    StateSampler sampler({3, Measure::HilbertSchmidt, opt.seed}, c);
    RegionMcReport& part = partial[c];
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(samples, begin + kChunk);
    for (std::int64_t s = begin; s < end; ++s) {
      ++part.samples;
      DensityMatrix rho;
      RegionSpec region;
      if (fixed) {
        rho = DensityMatrix(sampler.with_spectrum(spectrum), 1e-9);
        region = *fixed_region;
      } else {
        rho = DensityMatrix(sampler.next_matrix(), 1e-9);
        const double p = purity(rho);
        if (std::abs(p - t2) >= opt.window) continue;
        const T3Bounds b = t3_bounds(p);
        region = allowed_region(p, std::clamp(trace_power(rho, 3), b.min, b.max));
      }
      ++part.accepted;
      for (const BlochPoint& pt : canonical_representation(rho)) {
        ++part.points;
        const double ex = region.excess(pt);
        part.max_excess = std::max(part.max_excess, ex);
        if (ex <= kRegionTolerance) ++part.points_inside;
      }
    }
  });

  RegionMcReport out;
  out.t2 = t2;
  out.t3 = opt.t3;
  out.seed = opt.seed;
  for (const auto& p : partial) {
    out.samples += p.samples;
    out.accepted += p.accepted;
    out.points += p.points;
    out.points_inside += p.points_inside;
    if (p.accepted > 0) out.max_excess = std::max(out.max_excess, p.max_excess);
  }
  out.insufficient = out.accepted < 100;
  return out;
}

}  // namespace qudec
