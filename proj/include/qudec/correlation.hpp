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

// Streaming Pearson correlation between eigenvalues of derived qubits of
// random qutrits.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qudec/decompose.hpp"
#include "qudec/parallel.hpp"
#include "qudec/random_states.hpp"

namespace qudec {

/// Single-pass bivariate moments (Welford updates, Chan et al. merging).
class MomentAccumulator {
 public:
  void add(double x, double y) {
    ++n_;
    const double nd = static_cast<double>(n_);
    const double dx = x - mean_x_;
    mean_x_ += dx / nd;
    const double dy = y - mean_y_;
    mean_y_ += dy / nd;
    m2x_ += dx * (x - mean_x_);
    m2y_ += dy * (y - mean_y_);
    cxy_ += dx * (y - mean_y_);
  }

  void merge(const MomentAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double dx = o.mean_x_ - mean_x_;
    const double dy = o.mean_y_ - mean_y_;
    mean_x_ += dx * nb / n;
    mean_y_ += dy * nb / n;
    m2x_ += o.m2x_ + dx * dx * na * nb / n;
    m2y_ += o.m2y_ + dy * dy * na * nb / n;
    cxy_ += o.cxy_ + dx * dy * na * nb / n;
    n_ += o.n_;
  }

  std::int64_t count() const { return n_; }
  double mean_x() const { return mean_x_; }
  double mean_y() const { return mean_y_; }
  double sd_x() const { return n_ ? std::sqrt(m2x_ / static_cast<double>(n_)) : 0.0; }
  double sd_y() const { return n_ ? std::sqrt(m2y_ / static_cast<double>(n_)) : 0.0; }

  /// Variances below this relative level count as zero.
  bool degenerate() const {
    const double scale = 1e-28 * static_cast<double>(std::max<std::int64_t>(n_, 1));
    return n_ < 2 || m2x_ <= scale || m2y_ <= scale;
  }

  /// Pearson coefficient, clamped to [-1, 1]; 0 for degenerate streams.
  double correlation() const {
    if (degenerate()) return 0.0;
    return std::clamp(cxy_ / std::sqrt(m2x_ * m2y_), -1.0, 1.0);
  }

 private:
  std::int64_t n_ = 0;
  double mean_x_ = 0;
  double mean_y_ = 0;
  double m2x_ = 0;
  double m2y_ = 0;
  double cxy_ = 0;
};

enum class EigenChoice { Smallest, Largest };

inline std::string to_string(EigenChoice c) { return c == EigenChoice::Smallest ? "smallest" : "largest"; }

inline EigenChoice parse_eigen_choice(const std::string& s) {
  if (s == "smallest" || s == "min") return EigenChoice::Smallest;
  if (s == "largest" || s == "max") return EigenChoice::Largest;
  throw OutOfRangeError("eigenvalue choice must be 'smallest' or 'largest', got '" + s + "'");
}

struct CorrelationReport {
  SamplerConfig config;
  std::pair<int, int> pair{1, 2};  // 1-based qubit labels of the qutrit decomposition
  EigenChoice which = EigenChoice::Smallest;
  std::int64_t n_samples = 0;
  std::vector<std::pair<std::int64_t, double>> running_corr;
  double final_corr = 0;
  double mean_eps1 = 0;
  double mean_eps2 = 0;
  double sd_eps1 = 0;
  double sd_eps2 = 0;
  bool degenerate = false;
};

/// Log-spaced sample counts ending at n; duplicates removed.
inline std::vector<std::int64_t> log_checkpoints(std::int64_t n, int count) {
  std::vector<std::int64_t> out;
  if (count <= 0) return out;
  const double lo = std::log(std::min<double>(100.0, static_cast<double>(n)));
  const double hi = std::log(static_cast<double>(n));
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::clamp<std::int64_t>(std::llround(std::exp(lo + t * (hi - lo))), 1, n));
  }
  out.back() = n;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

/// Extreme eigenvalue of a unit-trace Hermitian 2x2 [[p, c*], [c, 1-p]].
inline double qubit_eigenvalue(double p, cplx c, EigenChoice which) {
  const double r = std::sqrt((p - 0.5) * (p - 0.5) + std::norm(c));
  return which == EigenChoice::Smallest ? 0.5 - r : 0.5 + r;
}

}  // namespace detail

/// Correlation between one eigenvalue of qubits `pair.first` and
/// `pair.second` (labels 1..6 of the qutrit decomposition) over n samples.
inline CorrelationReport eigen_correlation(const SamplerConfig& cfg, std::int64_t n,
                                           std::pair<int, int> pair, EigenChoice which,
                                           int checkpoints = 40, unsigned threads = 1) {
  if (cfg.dim != 3) throw DimensionError("the correlation experiment samples qutrits");
  if (n < 1000) throw OutOfRangeError("correlation experiment needs n >= 1000");
  for (int j : {pair.first, pair.second}) {
    if (j < 1 || j > 6) throw OutOfRangeError("qubit labels must lie in 1..6");
  }
  // Qubit entries expressed through parent entries; independent of the state.
  const QubitEnsemble shape = qutrit_qubits(DensityMatrix::maximally_mixed(3));
  const QubitProvenance& pa = shape.qubits[static_cast<std::size_t>(pair.first - 1)].provenance;
  const QubitProvenance& pb = shape.qubits[static_cast<std::size_t>(pair.second - 1)].provenance;

  const std::vector<std::int64_t> marks = log_checkpoints(n, checkpoints);
  constexpr std::int64_t kChunk = 4096;
  const auto chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
  struct ChunkResult {
    MomentAccumulator total;
    std::vector<std::pair<std::int64_t, MomentAccumulator>> snapshots;  // global n -> prefix
  };
  std::vector<ChunkResult> parts(chunks);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    StateSampler sampler(cfg, c);
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(n, begin + kChunk);
    auto mark = std::upper_bound(marks.begin(), marks.end(), begin);
    ChunkResult& out = parts[c];
    for (std::int64_t s = begin; s < end; ++s) {
      const ComplexMatrix rho = sampler.next_matrix();
      const double e1 = detail::qubit_eigenvalue(evaluate(pa[0], rho).real(), evaluate(pa[2], rho), which);
      const double e2 = detail::qubit_eigenvalue(evaluate(pb[0], rho).real(), evaluate(pb[2], rho), which);
      out.total.add(e1, e2);
      if (mark != marks.end() && *mark == s + 1) {
        out.snapshots.emplace_back(s + 1, out.total);
        ++mark;
      }
    }
  });

  CorrelationReport rep;
  rep.config = cfg;
  rep.pair = pair;
  rep.which = which;
  rep.n_samples = n;
  MomentAccumulator acc;
  for (const ChunkResult& part : parts) {
    for (const auto& [at, prefix] : part.snapshots) {
      MomentAccumulator m = acc;
      m.merge(prefix);
      rep.running_corr.emplace_back(at, m.correlation());
    }
    acc.merge(part.total);
  }
  rep.final_corr = acc.correlation();
  rep.mean_eps1 = acc.mean_x();
  rep.mean_eps2 = acc.mean_y();
  rep.sd_eps1 = acc.sd_x();
  rep.sd_eps2 = acc.sd_y();
  rep.degenerate = acc.degenerate();
  return rep;
}

/// Smallest eigenvalues of the first two qubits of the qutrit decomposition.
inline CorrelationReport pearson_experiment(const SamplerConfig& cfg, std::int64_t n,
                                            int checkpoints = 40, unsigned threads = 1) {
  return eigen_correlation(cfg, n, {1, 2}, EigenChoice::Smallest, checkpoints, threads);
}

}  // namespace qudec
