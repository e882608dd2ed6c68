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

// Core density-matrix type: small Hermitian routines, spectra, invariants,
// validation and the eight-component qutrit Bloch parametrization.
//
// Entries are stored 0-based in an Eigen matrix. entry(row, col) offers the
// 1-based addressing used when talking about rho_{jk}.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

#include "qudec/errors.hpp"

namespace qudec {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTolerance = 1e-10;

class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Wraps a square matrix. Physical validity is not enforced here; see
  /// validate() and require_valid().
  explicit DensityMatrix(ComplexMatrix m, double tolerance = kDefaultTolerance)
      : m_(std::move(m)), tol_(tolerance) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      throw DimensionError("density matrix must be square and non-empty, got " +
                           std::to_string(m_.rows()) + "x" +
                           std::to_string(m_.cols()));
    }
    if (tol_ < 0) throw OutOfRangeError("tolerance must be nonnegative");
  }

  static DensityMatrix diagonal(std::initializer_list<double> diag) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(diag.size()),
                                          static_cast<Eigen::Index>(diag.size()));
    Eigen::Index i = 0;
    for (double v : diag) m(i, i) = v, ++i;
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix maximally_mixed(int dim) {
    ComplexMatrix m = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
    return DensityMatrix(std::move(m));
  }

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  double tolerance() const noexcept { return tol_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }

  /// 0-based access.
  cplx operator()(int row, int col) const { return m_(row, col); }

  /// 1-based access, rho_{row,col}.
  cplx entry(int row, int col) const {
    if (row < 1 || col < 1 || row > dim() || col > dim()) {
      throw DimensionError("entry index out of range");
    }
    return m_(row - 1, col - 1);
  }

  DensityMatrix with_tolerance(double tolerance) const {
    return DensityMatrix(m_, tolerance);
  }

 private:
  ComplexMatrix m_;
  double tol_ = kDefaultTolerance;
};

struct GeneralizedBlochVector {
  std::array<double, 8> a{};  // a[0] holds a_1

  double component(int k) const { return a.at(static_cast<std::size_t>(k - 1)); }
  double& component(int k) { return a.at(static_cast<std::size_t>(k - 1)); }
};

struct InvariantPair {
  double t2 = 0;
  double t3 = 0;
};

// --- Hermitian helpers ------------------------------------------------------

inline double hermiticity_error(const ComplexMatrix& m) {
  double worst = 0;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = j; k < m.cols(); ++k) {
      worst = std::max(worst, std::abs(m(j, k) - std::conj(m(k, j))));
    }
  }
  return worst;
}

inline void require_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  const double err = hermiticity_error(m);
  if (err > tol) {
    throw InvalidStateError("matrix is not Hermitian (max deviation " +
                            std::to_string(err) + ")");
  }
}

namespace detail {

inline double sqr(double v) { return v * v; }

/// Closed-form spectrum of a Hermitian 2x2, ascending.
inline std::array<double, 2> eigenvalues_2x2(const ComplexMatrix& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half_gap = std::sqrt(sqr((a - d) / 2) + std::norm(m(0, 1)));
  const double mid = (a + d) / 2;
  return {mid - half_gap, mid + half_gap};
}

/// Closed-form spectrum of a Hermitian 3x3 via the trigonometric solution of
/// the characteristic cubic, ascending.
inline std::array<double, 3> eigenvalues_3x3(const ComplexMatrix& m) {
  const double a = m(0, 0).real();
  const double b = m(1, 1).real();
  const double c = m(2, 2).real();
  const cplx x = m(0, 1);
  const cplx y = m(0, 2);
  const cplx z = m(1, 2);
  const double off = std::norm(x) + std::norm(y) + std::norm(z);
  const double q = (a + b + c) / 3;
  const double p2 = sqr(a - q) + sqr(b - q) + sqr(c - q) + 2 * off;
  if (p2 < 1e-300) return {q, q, q};
  const double p = std::sqrt(p2 / 6);
  const double da = (a - q) / p;
  const double db = (b - q) / p;
  const double dc = (c - q) / p;
  const cplx bx = x / p;
  const cplx by = y / p;
  const cplx bz = z / p;
  const double det_b = da * db * dc + 2 * (bx * bz * std::conj(by)).real() -
                       da * std::norm(bz) - db * std::norm(by) - dc * std::norm(bx);
  const double r = std::clamp(det_b / 2, -1.0, 1.0);
  const double phi = std::acos(r) / 3;
  const double hi = q + 2 * p * std::cos(phi);
  const double lo = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
  const double mid = 3 * q - hi - lo;
  std::array<double, 3> out{lo, mid, hi};
  std::sort(out.begin(), out.end());
  return out;
}

inline double determinant_3x3(const ComplexMatrix& m) {
  const double a = m(0, 0).real();
  const double b = m(1, 1).real();
  const double c = m(2, 2).real();
  const cplx x = m(0, 1);
  const cplx y = m(0, 2);
  const cplx z = m(1, 2);
  return a * b * c + 2 * (x * z * std::conj(y)).real() - a * std::norm(z) -
         b * std::norm(y) - c * std::norm(x);
}

inline std::vector<double> eigenvalues_unchecked(const ComplexMatrix& m) {
  switch (m.rows()) {
    case 1:
      return {m(0, 0).real()};
    case 2: {
      auto e = eigenvalues_2x2(m);
      return {e.begin(), e.end()};
    }
    case 3: {
      auto e = eigenvalues_3x3(m);
      return {e.begin(), e.end()};
    }
    default: {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
      const Eigen::VectorXd& ev = solver.eigenvalues();
      return {ev.data(), ev.data() + ev.size()};
    }
  }
}

}  // namespace detail

/// Ascending real eigenvalues of a Hermitian matrix. Dimensions 2 and 3 use
/// closed forms; larger ones use Eigen's self-adjoint solver.
inline std::vector<double> eigenvalues(const ComplexMatrix& m,
                                       double tol = kDefaultTolerance) {
  require_hermitian(m, tol);
  return detail::eigenvalues_unchecked(m);
}

inline std::vector<double> eigenvalues(const DensityMatrix& rho) {
  return eigenvalues(rho.matrix(), rho.tolerance());
}

inline double trace(const DensityMatrix& rho) { return rho.matrix().trace().real(); }

/// Tr(rho^2), computed as the Frobenius norm squared.
inline double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

inline double trace_power(const DensityMatrix& rho, int k) {
  switch (k) {
    case 1:
      return trace(rho);
    case 2:
      return purity(rho);
    case 3: {
      const ComplexMatrix& m = rho.matrix();
      return (m * m).cwiseProduct(m.transpose()).sum().real();
    }
    default:
      throw OutOfRangeError("trace_power supports k = 1, 2, 3");
  }
}

inline double determinant(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix();
  switch (rho.dim()) {
    case 1:
      return m(0, 0).real();
    case 2:
      return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    case 3:
      return detail::determinant_3x3(m);
    default:
      return m.partialPivLu().determinant().real();
  }
}

/// Sum of the moduli of all off-diagonal entries.
inline double coherence(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix();
  double sum = 0;
  for (int j = 0; j < rho.dim(); ++j) {
    for (int k = 0; k < rho.dim(); ++k) {
      if (j != k) sum += std::abs(m(j, k));
    }
  }
  return sum;
}

inline InvariantPair invariants(const DensityMatrix& rho) {
  return {purity(rho), trace_power(rho, 3)};
}

/// Positive-semidefiniteness of a Hermitian matrix. For dimension <= 3 the
/// elementary symmetric polynomials of the spectrum are tested in closed
/// form (all >= -tol); larger matrices go through the eigen-solver.
inline bool is_psd(const ComplexMatrix& m, double tol = kDefaultTolerance) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0).real() >= -tol;
  if (n == 2 || n == 3) {
    const double e1 = m.trace().real();
    const double e2 = (e1 * e1 - m.squaredNorm()) / 2;
    if (e1 < -tol || e2 < -tol) return false;
    if (n == 2) return true;
    return detail::determinant_3x3(m) >= -tol;
  }
  return detail::eigenvalues_unchecked(m).front() >= -tol;
}

// --- validation --------------------------------------------------------------

struct Violation {
  enum class Kind { NotSquare, NonFinite, NotHermitian, TraceNotOne, NotPositive };
  Kind kind;
  double magnitude = 0;
  std::string message;
};

inline const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::NotSquare: return "not_square";
    case Violation::Kind::NonFinite: return "non_finite";
    case Violation::Kind::NotHermitian: return "not_hermitian";
    case Violation::Kind::TraceNotOne: return "trace_not_one";
    case Violation::Kind::NotPositive: return "not_positive";
  }
  return "unknown";
}

struct ValidationReport {
  int dim = 0;
  double tolerance = kDefaultTolerance;
  double hermiticity_error = 0;
  double trace_error = 0;
  double min_eigenvalue = 0;
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(Violation::Kind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
  }
};

/// Checks every density-matrix invariant and reports each violation with
/// its magnitude. Never throws.
inline ValidationReport validate(const ComplexMatrix& m, double tol = kDefaultTolerance) {
  ValidationReport report;
  report.tolerance = tol;
  report.dim = static_cast<int>(m.rows());
  if (m.rows() == 0 || m.rows() != m.cols()) {
    report.violations.push_back({Violation::Kind::NotSquare, 0, "matrix is not square"});
    return report;
  }
  if (!m.allFinite()) {
    report.violations.push_back({Violation::Kind::NonFinite, 0, "non-finite entry"});
    return report;
  }
  report.hermiticity_error = hermiticity_error(m);
  if (report.hermiticity_error > tol) {
    report.violations.push_back({Violation::Kind::NotHermitian, report.hermiticity_error,
                                 "max |rho_jk - conj(rho_kj)|"});
  }
  const cplx tr = m.trace();
  report.trace_error = std::abs(tr - cplx{1.0, 0.0});
  if (report.trace_error > tol) {
    report.violations.push_back(
        {Violation::Kind::TraceNotOne, report.trace_error, "|Tr(rho) - 1|"});
  }
  // Spectrum of the Hermitian part; meaningful even when the input is only
  // approximately Hermitian.
  const ComplexMatrix herm = (m + m.adjoint()) / 2.0;
  report.min_eigenvalue = detail::eigenvalues_unchecked(herm).front();
  if (!is_psd(herm, tol)) {
    report.violations.push_back({Violation::Kind::NotPositive,
                                 std::max(0.0, -report.min_eigenvalue),
                                 "smallest eigenvalue " +
                                     std::to_string(report.min_eigenvalue)});
  }
  return report;
}

inline ValidationReport validate(const DensityMatrix& rho) {
  return validate(rho.matrix(), rho.tolerance());
}

inline void require_valid(const DensityMatrix& rho) {
  const ValidationReport report = validate(rho);
  if (!report.ok()) {
    std::string msg = "invalid density matrix:";
    for (const auto& v : report.violations) {
      msg += std::string(" ") + to_string(v.kind) + "=" + std::to_string(v.magnitude);
    }
    throw InvalidStateError(msg);
  }
}

// --- qutrit Bloch parametrization -------------------------------------------
//
// rho = 1/2 [[2/3 + a7 + a8/sqrt3, a1 - i a4,           a2 - i a5     ],
//            [a1 + i a4,           2/3 - a7 + a8/sqrt3, a3 - i a6     ],
//            [a2 + i a5,           a3 + i a6,           2/3 - 2 a8/sqrt3]]
//
// The upper triangle carries -i a_k for k = 4, 5, 6. Hermiticity and unit
// trace hold by construction; positivity does not.

inline DensityMatrix from_bloch8(const GeneralizedBlochVector& v,
                                 double tol = kDefaultTolerance) {
  const auto& a = v.a;
  const double s3 = std::numbers::sqrt3;
  ComplexMatrix m(3, 3);
  m(0, 0) = 2.0 / 3 + a[6] + a[7] / s3;
  m(1, 1) = 2.0 / 3 - a[6] + a[7] / s3;
  m(2, 2) = 2.0 / 3 - 2 * a[7] / s3;
  m(0, 1) = cplx{a[0], -a[3]};
  m(0, 2) = cplx{a[1], -a[4]};
  m(1, 2) = cplx{a[2], -a[5]};
  m(1, 0) = std::conj(m(0, 1));
  m(2, 0) = std::conj(m(0, 2));
  m(2, 1) = std::conj(m(1, 2));
  return DensityMatrix(m / 2.0, tol);
}

inline GeneralizedBlochVector to_bloch8(const DensityMatrix& rho) {
  if (rho.dim() != 3) {
    throw DimensionError("to_bloch8 needs a 3x3 matrix, got dimension " +
                         std::to_string(rho.dim()));
  }
  // Read the upper triangle and diagonal; a Hermitian input is assumed.
  const ComplexMatrix& m = rho.matrix();
  GeneralizedBlochVector v;
  v.a[0] = 2 * m(0, 1).real();
  v.a[3] = -2 * m(0, 1).imag();
  v.a[1] = 2 * m(0, 2).real();
  v.a[4] = -2 * m(0, 2).imag();
  v.a[2] = 2 * m(1, 2).real();
  v.a[5] = -2 * m(1, 2).imag();
  v.a[6] = m(0, 0).real() - m(1, 1).real();
  v.a[7] = std::numbers::sqrt3 * (1.0 / 3 - m(2, 2).real());
  return v;
}

}  // namespace qudec
