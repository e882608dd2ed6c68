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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qudec/density_matrix.hpp"
#include "test_support.hpp"

namespace qudec {
namespace {

using testing::Ginibre;

const double kSqrt3 = std::sqrt(3.0);

ComplexMatrix particular_state() {
  const cplx i{0, 1};
  ComplexMatrix m(3, 3);
  m << 3.0, 1.0 + i, -1.0, 1.0 - i, 3.0, 1.0 - i, -1.0, 1.0 + i, 3.0;
  return m / 9.0;
}

TEST(Bloch8, ZeroVectorIsMaximallyMixed) {
  const DensityMatrix rho = from_bloch8({});
  EXPECT_LT((rho.matrix() - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 1e-15);
}

TEST(Bloch8, A1GivesRealCoherence12) {
  GeneralizedBlochVector a;
  a.a[0] = 1;
  const DensityMatrix rho = from_bloch8(a);
  EXPECT_NEAR(rho.entry(1, 2).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho.entry(2, 1).real(), 0.5, 1e-15);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(rho.entry(k, k).real(), 1.0 / 3, 1e-15);
}

TEST(Bloch8, PureStateDiagonal) {
  // Solving the diagonal: a7 = rho11 - rho22 = 1, a8 = sqrt(3) (1/3 - rho33) = 1/sqrt(3).
  const GeneralizedBlochVector a = to_bloch8(DensityMatrix::diagonal({1, 0, 0}));
  EXPECT_NEAR(a.component(7), 1.0, 1e-15);
  EXPECT_NEAR(a.component(8), 1.0 / kSqrt3, 1e-15);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(a.component(k), 0.0);
  const DensityMatrix back = from_bloch8(a);
  EXPECT_LT((back.matrix() - DensityMatrix::diagonal({1, 0, 0}).matrix()).norm(), 1e-15);
}

TEST(Bloch8, OtherDiagonalReadingIsNotPure) {
  GeneralizedBlochVector a;
  a.a[6] = 2.0 / 3;
  a.a[7] = 2.0 / kSqrt3;
  // Gives diag(1, 1/3, -1/3), which is not a state.
  const DensityMatrix rho = from_bloch8(a);
  EXPECT_NEAR(rho.entry(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(rho.entry(2, 2).real(), 1.0 / 3, 1e-15);
  EXPECT_NEAR(rho.entry(3, 3).real(), -1.0 / 3, 1e-15);
  EXPECT_TRUE(validate(rho.matrix()).has(Violation::Kind::NotPositive));
}

TEST(Bloch8, ParticularStateSigns) {
  const GeneralizedBlochVector a = to_bloch8(DensityMatrix(particular_state()));
  EXPECT_NEAR(a.component(1), 2.0 / 9, 1e-15);
  EXPECT_NEAR(a.component(4), -2.0 / 9, 1e-15);
  EXPECT_NEAR(a.component(2), -2.0 / 9, 1e-15);
  EXPECT_NEAR(a.component(5), 0.0, 1e-15);
  EXPECT_NEAR(a.component(3), 2.0 / 9, 1e-15);
  EXPECT_NEAR(a.component(6), 2.0 / 9, 1e-15);
  EXPECT_NEAR(a.component(7), 0.0, 1e-15);
  EXPECT_NEAR(a.component(8), 0.0, 1e-15);
}

TEST(Bloch8, RoundTripRandomQutrits) {
  Ginibre g(11);
  double worst = 0;
  for (int s = 0; s < 10000; ++s) {
    const DensityMatrix rho(g.state(3));
    const DensityMatrix back = from_bloch8(to_bloch8(rho));
    worst = std::max(worst, (back.matrix() - rho.matrix()).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Bloch8, RejectsWrongDimension) {
  EXPECT_THROW(to_bloch8(DensityMatrix::maximally_mixed(4)), DimensionError);
}

TEST(Bloch8, NonPsdIsReportedNotThrown) {
  GeneralizedBlochVector a;
  a.a[0] = 3;
  const DensityMatrix rho = from_bloch8(a);
  const ValidationReport rep = validate(rho.matrix());
  EXPECT_TRUE(rep.has(Violation::Kind::NotPositive));
  EXPECT_FALSE(rep.has(Violation::Kind::NotHermitian));
  EXPECT_FALSE(rep.has(Violation::Kind::TraceNotOne));
}

TEST(Eigenvalues, MaximallyMixed) {
  for (double v : eigenvalues(DensityMatrix::maximally_mixed(3))) EXPECT_NEAR(v, 1.0 / 3, 1e-14);
}

TEST(Eigenvalues, RankOneProjector) {
  ComplexMatrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  const auto ev = eigenvalues(m);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], 0.0, 1e-15);
  EXPECT_NEAR(ev[1], 1.0, 1e-15);
}

TEST(Eigenvalues, ParticularStateTraceIdentities) {
  const DensityMatrix rho(particular_state());
  const auto ev = eigenvalues(rho);
  double s1 = 0;
  double s2 = 0;
  for (double v : ev) s1 += v, s2 += v * v;
  EXPECT_NEAR(s1, 1.0, 1e-12);
  EXPECT_NEAR(s2, (rho.matrix() * rho.matrix()).trace().real(), 1e-12);
  EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
}

TEST(Eigenvalues, ClosedFormsMatchGenericSolver) {
  Ginibre g(5);
  for (int d : {2, 3}) {
    for (int s = 0; s < 2000; ++s) {
      const ComplexMatrix m = g.state(d);
      const auto fast = eigenvalues(m);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
      for (int k = 0; k < d; ++k) EXPECT_NEAR(fast[static_cast<std::size_t>(k)], es.eigenvalues()(k), 1e-12);
    }
  }
}

TEST(Eigenvalues, GenericResidual) {
  Ginibre g(6);
  const ComplexMatrix m = g.state(7);
  const auto ev = eigenvalues(m);
  for (double lam : ev) {
    const double smallest_sv =
        (m - lam * ComplexMatrix::Identity(7, 7)).jacobiSvd().singularValues().minCoeff();
    EXPECT_LE(smallest_sv, 1e-10);
  }
}

TEST(Eigenvalues, RejectsNonHermitian) {
  ComplexMatrix m(2, 2);
  m << 0.5, 1, 0, 0.5;
  EXPECT_THROW(eigenvalues(m), InvalidStateError);
}

TEST(Eigenvalues, SpectralIdentitiesRandom) {
  Ginibre g(7);
  for (int d : {2, 3, 4, 5}) {
    for (int s = 0; s < 500; ++s) {
      const DensityMatrix rho(g.state(d));
      const auto ev = eigenvalues(rho);
      double s1 = 0, s2 = 0, prod = 1;
      for (double v : ev) s1 += v, s2 += v * v, prod *= v;
      EXPECT_NEAR(s1, trace(rho), 1e-10);
      EXPECT_NEAR(s2, purity(rho), 1e-10);
      EXPECT_NEAR(prod, determinant(rho), 1e-10);
    }
  }
}

TEST(Invariants, MaximallyMixed) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(3);
  EXPECT_NEAR(purity(rho), 1.0 / 3, 1e-15);
  EXPECT_NEAR(trace_power(rho, 3), 1.0 / 9, 1e-15);
  EXPECT_EQ(coherence(rho), 0.0);
}

TEST(Invariants, PureDiagonal) {
  const DensityMatrix rho = DensityMatrix::diagonal({1, 0, 0});
  EXPECT_NEAR(purity(rho), 1, 1e-15);
  EXPECT_NEAR(trace_power(rho, 3), 1, 1e-15);
  EXPECT_NEAR(determinant(rho), 0, 1e-15);
}

TEST(Invariants, ParticularStateCoherence) {
  EXPECT_NEAR(coherence(DensityMatrix(particular_state())), (2 + 4 * std::sqrt(2.0)) / 9, 1e-14);
}

TEST(Invariants, PurityWindowRandom) {
  Ginibre g(8);
  for (int d : {2, 3, 4, 6}) {
    for (int s = 0; s < 300; ++s) {
      const DensityMatrix rho(g.state(d));
      const double p = purity(rho);
      EXPECT_GE(p, 1.0 / d - 1e-12);
      EXPECT_LE(p, 1.0 + 1e-12);
    }
  }
  EXPECT_EQ(coherence(DensityMatrix::diagonal({0.2, 0.3, 0.5})), 0.0);
}

TEST(Invariants, TracePowerRejectsOtherOrders) {
  EXPECT_THROW(trace_power(DensityMatrix::maximally_mixed(3), 4), OutOfRangeError);
}

TEST(Validate, PureDiagonalPasses) { EXPECT_TRUE(validate(DensityMatrix::diagonal({1, 0, 0}).matrix()).ok()); }

TEST(Validate, ReportsNegativeEigenvalue) {
  const ComplexMatrix m = Eigen::Vector3cd(2, -1, 0).asDiagonal();
  const ValidationReport rep = validate(m);
  EXPECT_TRUE(rep.has(Violation::Kind::NotPositive));
  EXPECT_NEAR(rep.min_eigenvalue, -1.0, 1e-14);
  EXPECT_FALSE(rep.has(Violation::Kind::TraceNotOne));
}

TEST(Validate, ParticularStatePasses) {
  const ValidationReport rep = validate(particular_state());
  EXPECT_TRUE(rep.ok());
  EXPECT_GE(rep.min_eigenvalue, 0.0);
}

TEST(Validate, NeverThrows) {
  ComplexMatrix rect(2, 3);
  rect.setZero();
  EXPECT_NO_THROW({
    const ValidationReport rep = validate(rect);
    EXPECT_TRUE(rep.has(Violation::Kind::NotSquare));
  });
  ComplexMatrix nan = ComplexMatrix::Identity(2, 2) * std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(validate(nan).has(Violation::Kind::NonFinite));
  ComplexMatrix skew(2, 2);
  skew << 0.5, 0.3, -0.3, 0.5;
  EXPECT_TRUE(validate(skew).has(Violation::Kind::NotHermitian));
}

TEST(Validate, ToleranceOverride) {
  ComplexMatrix m = Eigen::Vector3cd(0.5 + 1e-8, 0.5, -1e-8).asDiagonal();
  EXPECT_FALSE(validate(m).ok());
  EXPECT_TRUE(validate(m, 1e-6).ok());
}

TEST(Psd, ClosedFormAgreesWithSpectrum) {
  Ginibre g(9);
  for (int s = 0; s < 3000; ++s) {
    ComplexMatrix m = g.state(3);
    // Push some samples across the boundary.
    m -= (0.2 * g.uniform()) * ComplexMatrix::Identity(3, 3);
    const bool expected = eigenvalues(m).front() >= -1e-10;
    EXPECT_EQ(is_psd(m, 1e-10), expected);
  }
}

TEST(DensityMatrix, OneBasedAccess) {
  const DensityMatrix rho(particular_state());
  EXPECT_EQ(rho.entry(1, 2), rho(0, 1));
  EXPECT_THROW(rho.entry(0, 1), DimensionError);
  EXPECT_THROW(rho.entry(1, 4), DimensionError);
}

TEST(DensityMatrix, RejectsNonSquare) {
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Zero(2, 3)), DimensionError);
}

}  // namespace
}  // namespace qudec
