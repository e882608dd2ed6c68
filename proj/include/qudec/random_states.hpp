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

// Random density matrices.
//
//   hilbert-schmidt  G G^dag / Tr, G a d x d matrix of standard complex normals
//   bures            (1 + U) G G^dag (1 + U)^dag / Tr, U Haar-random
//   pure-haar        |psi><psi| with psi a normalized complex Gaussian vector

#pragma once

#include <Eigen/QR>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "qudec/density_matrix.hpp"

namespace qudec {

enum class Measure { HilbertSchmidt, Bures, PureHaar };

inline const char* to_string(Measure m) {
  switch (m) {
    case Measure::HilbertSchmidt: return "hilbert-schmidt";
    case Measure::Bures: return "bures";
    case Measure::PureHaar: return "pure-haar";
  }
  return "unknown";
}

inline Measure parse_measure(std::string_view s) {
  if (s == "hilbert-schmidt" || s == "hs") return Measure::HilbertSchmidt;
  if (s == "bures") return Measure::Bures;
  if (s == "pure-haar" || s == "pure") return Measure::PureHaar;
  throw OutOfRangeError("unknown measure '" + std::string(s) + "'");
}

struct SamplerConfig {
  int dim = 3;
  Measure measure = Measure::HilbertSchmidt;
  std::uint64_t seed = 0;
};

/// Deterministic stream of random states. (seed, stream) fully determines
/// the sequence; independent streams give the per-chunk substreams used by
/// the parallel experiments.
class StateSampler {
 public:
  explicit StateSampler(const SamplerConfig& cfg, std::uint64_t stream = 0)
      : cfg_(cfg), engine_(make_engine(cfg.seed, stream)) {
    if (cfg.dim < 2) throw OutOfRangeError("sampler dimension must be >= 2");
  }

  const SamplerConfig& config() const { return cfg_; }

  ComplexMatrix next_matrix() {
    switch (cfg_.measure) {
      case Measure::HilbertSchmidt: {
        const ComplexMatrix g = ginibre(cfg_.dim);
        ComplexMatrix rho = g * g.adjoint();
        return rho / rho.trace().real();
      }
      case Measure::Bures: {
        const ComplexMatrix g = ginibre(cfg_.dim);
        const ComplexMatrix a =
            (ComplexMatrix::Identity(cfg_.dim, cfg_.dim) + haar_unitary(cfg_.dim)) * g;
        ComplexMatrix rho = a * a.adjoint();
        return rho / rho.trace().real();
      }
      case Measure::PureHaar: {
        Eigen::VectorXcd psi(cfg_.dim);
        for (int i = 0; i < cfg_.dim; ++i) psi(i) = complex_normal();
        psi.normalize();
        return psi * psi.adjoint();
      }
    }
    throw OutOfRangeError("unknown measure");
  }

  DensityMatrix next() { return DensityMatrix(next_matrix()); }

  /// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
  /// the phases of R's diagonal absorbed into Q.
  ComplexMatrix haar_unitary(int dim) {
    const ComplexMatrix z = ginibre(dim);
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
      const cplx d = r(j, j);
      const double mag = std::abs(d);
      if (mag > 0) q.col(j) *= d / mag;
    }
    return q;
  }

  /// U diag(spectrum) U^dag with U Haar-random.
  ComplexMatrix with_spectrum(const std::vector<double>& spectrum) {
    const int dim = static_cast<int>(spectrum.size());
    const ComplexMatrix u = haar_unitary(dim);
    Eigen::VectorXcd lam(dim);
    for (int i = 0; i < dim; ++i) lam(i) = spectrum[static_cast<std::size_t>(i)];
    ComplexMatrix rho = u * lam.asDiagonal() * u.adjoint();
    // Exact Hermiticity; the product leaves rounding asymmetry behind.
    return (rho + rho.adjoint()) / 2.0;
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:

  static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x71756465u};
    return std::mt19937_64(seq);
  }

  cplx complex_normal() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  ComplexMatrix ginibre(int dim) {
    ComplexMatrix g(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) g(i, j) = complex_normal();
    }
    return g;
  }

  SamplerConfig cfg_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// First state of the stream for `cfg`.
inline DensityMatrix sample_state(const SamplerConfig& cfg) { return StateSampler(cfg).next(); }

}  // namespace qudec
