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

#include <algorithm>
#include <set>

#include "qudec/decompose.hpp"
#include "test_support.hpp"

namespace qudec {
namespace {

using testing::Ginibre;
using testing::Mat;

std::int64_t expected_maps(int d) { return d % 2 ? d + 1 : (d + 2) * (d + 1) / 2; }

TEST(Extensions, Cardinalities) {
  for (int d = 2; d <= 12; ++d) {
    const auto maps = enumerate_extensions(d);
    EXPECT_EQ(static_cast<std::int64_t>(maps.size()), expected_maps(d)) << "d=" << d;
    EXPECT_EQ(extension_count(d), expected_maps(d));
    std::set<std::vector<int>> distinct;
    for (const auto& m : maps) {
      distinct.insert(m.zero_positions);
      EXPECT_EQ(m.target_dim % 2, 0);
      EXPECT_EQ(m.target_dim, d % 2 ? d + 1 : d + 2);
    }
    EXPECT_EQ(distinct.size(), maps.size());
  }
  EXPECT_EQ(enumerate_extensions(3).size(), 4u);
  EXPECT_EQ(enumerate_extensions(4).size(), 15u);
  EXPECT_EQ(enumerate_extensions(5).size(), 6u);
}

TEST(Extensions, InvalidMaps) {
  EXPECT_THROW(ExtensionMap::make(3, {1, 2}), DimensionError);
  EXPECT_THROW(ExtensionMap::make(4, {5, 5}), DimensionError);
  EXPECT_THROW(ExtensionMap::make(3, {5}), DimensionError);
  EXPECT_THROW(extend(DensityMatrix::maximally_mixed(4), ExtensionMap::make(3, {1})), DimensionError);
}

TEST(Extensions, QutritBlockForms) {
  Ginibre g(1);
  const DensityMatrix rho(g.state(3));
  const DensityMatrix s1 = extend(rho, ExtensionMap::make(3, {4}));
  EXPECT_EQ((s1.matrix().topLeftCorner(3, 3) - rho.matrix()).norm(), 0.0);
  EXPECT_EQ(s1.matrix().row(3).norm() + s1.matrix().col(3).norm(), 0.0);
  const DensityMatrix s2 = extend(rho, ExtensionMap::make(3, {1}));
  EXPECT_EQ((s2.matrix().bottomRightCorner(3, 3) - rho.matrix()).norm(), 0.0);
  const DensityMatrix s3 = extend(rho, ExtensionMap::make(3, {2}));
  EXPECT_EQ(s3.matrix()(0, 2), rho(0, 1));
  EXPECT_EQ(s3.matrix()(3, 2), rho(2, 1));
  EXPECT_EQ(s3.matrix().row(1).norm(), 0.0);
}

TEST(Extensions, FourLevelBlockForm) {
  Ginibre g(2);
  const DensityMatrix rho(g.state(4));
  const DensityMatrix s = extend(rho, ExtensionMap::make(4, {5, 6}));
  EXPECT_EQ((s.matrix().topLeftCorner(4, 4) - rho.matrix()).norm(), 0.0);
  EXPECT_EQ(s.matrix().bottomRows(2).norm(), 0.0);
  const PartialTraces pt = partial_trace_pair(s);
  const auto& r = rho.matrix();
  EXPECT_NEAR(std::abs(pt.qubit(0, 0) - (r(0, 0) + r(1, 1) + r(2, 2))), 0, 1e-15);
  EXPECT_NEAR(std::abs(pt.qubit(0, 1) - r(0, 3)), 0, 1e-15);
  EXPECT_NEAR(std::abs(pt.qubit(1, 1) - r(3, 3)), 0, 1e-15);
  // Rest: r[b][b'] = sigma[b][b'] + sigma[3+b][3+b'].
  Mat rest(3, 3);
  rest << r(0, 0) + r(3, 3), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2), r(2, 0), r(2, 1), r(2, 2);
  EXPECT_LT(testing::max_abs_diff(pt.rest.matrix(), rest), 1e-15);
}

TEST(Extensions, SpectrumPreserved) {
  Ginibre g(3);
  for (int d : {3, 4, 5}) {
    for (int s = 0; s < 1000; ++s) {
      const DensityMatrix rho(g.state(d));
      auto ev = eigenvalues(rho);
      for (const auto& map : enumerate_extensions(d)) {
        if (map.zero_positions.front() > 1 && s % 7) continue;  // keep the loop quick
        std::vector<double> want = ev;
        want.resize(static_cast<std::size_t>(map.target_dim), 0.0);
        std::sort(want.begin(), want.end());
        const auto got = eigenvalues(extend(rho, map));
        for (std::size_t k = 0; k < got.size(); ++k) ASSERT_NEAR(got[k], want[k], 1e-10);
      }
    }
  }
}

TEST(PartialTrace, MatchesKroneckerOracle) {
  Ginibre g(4);
  for (int l : {2, 4, 6, 8}) {
    for (int s = 0; s < 50; ++s) {
      const Mat sigma = g.state(l);
      const PartialTraces pt = partial_trace_pair(DensityMatrix(sigma));
      EXPECT_LT(testing::max_abs_diff(pt.qubit.matrix(), testing::trace_out_rest(sigma, l / 2)), 1e-14);
      EXPECT_LT(testing::max_abs_diff(pt.rest.matrix(), testing::trace_out_qubit(sigma, l / 2)), 1e-14);
    }
  }
}

TEST(PartialTrace, MaximallyMixedFour) {
  const PartialTraces pt = partial_trace_pair(DensityMatrix::maximally_mixed(4));
  EXPECT_LT(testing::max_abs_diff(pt.qubit.matrix(), Mat::Identity(2, 2) / 2.0), 1e-15);
  EXPECT_LT(testing::max_abs_diff(pt.rest.matrix(), Mat::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, OddDimensionThrows) {
  EXPECT_THROW(partial_trace_pair(DensityMatrix::maximally_mixed(3)), DimensionError);
}

TEST(QutritQubits, MatchHandTemplates) {
  Ginibre g(5);
  for (int s = 0; s < 2000; ++s) {
    const Mat r = g.state(3);
    const QubitEnsemble ens = qutrit_qubits(DensityMatrix(r));
    const auto want = testing::qutrit_qubits_by_hand(r);
    ASSERT_EQ(ens.qubits.size(), 6u);
    for (std::size_t j = 0; j < 6; ++j) {
      ASSERT_LE(testing::max_abs_diff(ens.qubits[j].matrix.matrix(), want[j]), 1e-15) << "qubit " << j + 1;
    }
  }
}

TEST(QutritQubits, PureDiagonal) {
  const QubitEnsemble ens = qutrit_qubits(DensityMatrix::diagonal({1, 0, 0}));
  EXPECT_LT(testing::max_abs_diff(ens.qubits[0].matrix.matrix(), Mat(Eigen::Vector2cd(1, 0).asDiagonal())), 1e-15);
  EXPECT_LT(testing::max_abs_diff(ens.qubits[3].matrix.matrix(), Mat(Eigen::Vector2cd(0, 1).asDiagonal())), 1e-15);
  EXPECT_LT(testing::max_abs_diff(ens.qubits[4].matrix.matrix(), Mat(Eigen::Vector2cd(1, 0).asDiagonal())), 1e-15);
}

TEST(QutritQubits, MaximallyMixed) {
  const QubitEnsemble ens = qutrit_qubits(DensityMatrix::maximally_mixed(3));
  EXPECT_LT(testing::max_abs_diff(ens.qubits[0].matrix.matrix(), Mat(Eigen::Vector2cd(2.0 / 3, 1.0 / 3).asDiagonal())), 1e-15);
  EXPECT_LT(testing::max_abs_diff(ens.qubits[3].matrix.matrix(), Mat(Eigen::Vector2cd(1.0 / 3, 2.0 / 3).asDiagonal())), 1e-15);
  EXPECT_LT(testing::max_abs_diff(ens.qubits[4].matrix.matrix(), Mat(Eigen::Vector2cd(1.0 / 3, 2.0 / 3).asDiagonal())), 1e-15);
}

TEST(QutritQubits, ParticularStateSecondQubit) {
  const cplx i{0, 1};
  Mat m(3, 3);
  m << 3.0, 1.0 + i, -1.0, 1.0 - i, 3.0, 1.0 - i, -1.0, 1.0 + i, 3.0;
  const QubitEnsemble ens = qutrit_qubits(DensityMatrix(m / 9.0));
  Mat want(2, 2);
  want << 2.0 / 3, (1.0 + i) / 9.0, (1.0 - i) / 9.0, 1.0 / 3;
  EXPECT_LT(testing::max_abs_diff(ens.qubits[1].matrix.matrix(), want), 1e-15);
}

TEST(QutritQubits, ProvenanceStrings) {
  const QubitEnsemble ens = qutrit_qubits(DensityMatrix::maximally_mixed(3));
  EXPECT_EQ(provenance_string(ens.qubits[0].provenance[0]), "r11+r22");
  EXPECT_EQ(provenance_string(ens.qubits[0].provenance[1]), "r13");
  EXPECT_EQ(provenance_string(ens.qubits[1].provenance[1]), "r12");
  EXPECT_EQ(provenance_string(ens.qubits[3].provenance[1]), "r23");
  EXPECT_EQ(ens.qubits[2].lineage.front().map.label(), "zero{1}");
}

TEST(QutritQubits, InvalidParentThrows) {
  const ComplexMatrix bad = Eigen::Vector3cd(2, -1, 0).asDiagonal();
  EXPECT_THROW(qutrit_qubits(DensityMatrix(bad)), InvalidStateError);
  EXPECT_THROW(qutrit_qubits(DensityMatrix::maximally_mixed(4)), DimensionError);
}

TEST(Recursive, QutritAgainstDirectOracle) {
  // Without merging, the 8 raw qubits follow enumeration order
  // zero{1}, zero{2}, zero{3}, zero{4}, each as (qubit, rest).
  Ginibre g(6);
  for (int s = 0; s < 500; ++s) {
    const Mat r = g.state(3);
    const QubitEnsemble ens = decompose_recursive(DensityMatrix(r), {false, true});
    ASSERT_EQ(ens.qubits.size(), 8u);
    std::size_t k = 0;
    for (int zero : {1, 2, 3, 4}) {
      const Mat v = testing::embedding(3, {zero});
      const Mat sigma = v * r * v.transpose();
      ASSERT_LE(testing::max_abs_diff(ens.qubits[k++].matrix.matrix(), testing::trace_out_rest(sigma, 2)), 1e-15);
      ASSERT_LE(testing::max_abs_diff(ens.qubits[k++].matrix.matrix(), testing::trace_out_qubit(sigma, 2)), 1e-15);
    }
  }
}

TEST(Recursive, QutritDedup) {
  Ginibre g(7);
  const Mat r = g.state(3);
  const QubitEnsemble ens = decompose_recursive(DensityMatrix(r));
  EXPECT_EQ(ens.total_generated, 8);
  EXPECT_EQ(ens.distinct_count, 6);
  EXPECT_EQ(ens.duplicates_merged, 2);
  EXPECT_EQ(ens.trivial_discarded, 0);
  ASSERT_EQ(ens.qubits.size(), 6u);
  // Same set of matrices as the hand-written list.
  const auto want = testing::qutrit_qubits_by_hand(r);
  for (const auto& w : want) {
    const bool found = std::any_of(ens.qubits.begin(), ens.qubits.end(), [&](const QubitState& q) {
      return testing::max_abs_diff(q.matrix.matrix(), w) < 1e-15;
    });
    EXPECT_TRUE(found);
  }
}

TEST(Recursive, DistinctCountsFourFiveSix) {
  EXPECT_EQ(count_distinct(4), 35);
  EXPECT_EQ(count_distinct(5), 40);
  EXPECT_EQ(count_distinct(6), 267);
  Ginibre g(8);
  for (int d : {4, 5, 6}) {
    const QubitEnsemble ens = decompose_recursive(DensityMatrix(g.state(d)));
    EXPECT_EQ(static_cast<std::int64_t>(ens.qubits.size()), count_distinct(d));
    EXPECT_EQ(ens.distinct_count, count_distinct(d));
    EXPECT_EQ(ens.total_generated, count_total(d));
    EXPECT_EQ(ens.total_generated, ens.trivial_discarded + ens.duplicates_merged +
                                       static_cast<std::int64_t>(ens.qubits.size()));
  }
}

TEST(Recursive, TrivialCounts) {
  EXPECT_EQ(decompose_recursive(DensityMatrix::maximally_mixed(4)).trivial_count, 8);
  EXPECT_EQ(decompose_recursive(DensityMatrix::maximally_mixed(6)).trivial_count, 294);
  EXPECT_EQ(decompose_recursive(DensityMatrix::maximally_mixed(5)).trivial_count, 0);
  const QubitEnsemble two = decompose_recursive(DensityMatrix::maximally_mixed(2));
  EXPECT_EQ(two.total_generated, 12);
  EXPECT_EQ(two.trivial_count, 4);
  EXPECT_EQ(two.distinct_count, 3);
}

TEST(Recursive, TrivialQubitsAreConstant) {
  Ginibre g(9);
  const DensityMatrix a(g.state(4));
  const DensityMatrix b(g.state(4));
  const QubitEnsemble ea = decompose_recursive(a, {false, true});
  const QubitEnsemble eb = decompose_recursive(b, {false, true});
  ASSERT_EQ(ea.qubits.size(), eb.qubits.size());
  int trivial = 0;
  for (std::size_t k = 0; k < ea.qubits.size(); ++k) {
    if (!ea.qubits[k].trivial) continue;
    ++trivial;
    EXPECT_LT(testing::max_abs_diff(ea.qubits[k].matrix.matrix(), eb.qubits[k].matrix.matrix()), 1e-14);
    const auto& m = ea.qubits[k].matrix.matrix();
    EXPECT_EQ(std::abs(m(0, 1)), 0.0);
    EXPECT_TRUE(std::abs(m(0, 0) - 1.0) < 1e-14 || std::abs(m(0, 0)) < 1e-14);
  }
  EXPECT_EQ(trivial, 8);
}

TEST(Recursive, KeepTrivialAndNoDedup) {
  const DensityMatrix rho = DensityMatrix::maximally_mixed(4);
  EXPECT_EQ(decompose_recursive(rho, {false, true}).qubits.size(), 135u);
  EXPECT_EQ(decompose_recursive(rho, {false, false}).qubits.size(), 127u);
  const QubitEnsemble merged_trivial = decompose_recursive(rho, {true, true});
  EXPECT_EQ(merged_trivial.qubits.size(), 37u);  // 35 plus diag(1,0) and diag(0,1)
}

TEST(Recursive, EveryQubitIsValid) {
  Ginibre g(10);
  for (int s = 0; s < 10000; ++s) {
    const int d = 3 + s % 3;
    const QubitEnsemble ens = decompose_recursive(DensityMatrix(g.state(d)));
    for (const auto& q : ens.qubits) {
      const double det = determinant(q.matrix);
      const double p = purity(q.matrix);
      ASSERT_GE(det, -1e-12);
      ASSERT_LE(det, 0.25 + 1e-12);
      ASSERT_GE(p, 0.5 - 1e-12);
      ASSERT_LE(p, 1 + 1e-12);
      ASSERT_TRUE(validate(q.matrix.matrix(), 1e-10).ok());
    }
  }
}

TEST(Recursive, OrderIsDeterministic) {
  Ginibre g(11);
  const DensityMatrix rho(g.state(5));
  const QubitEnsemble a = decompose_recursive(rho);
  const QubitEnsemble b = decompose_recursive(rho);
  ASSERT_EQ(a.qubits.size(), b.qubits.size());
  for (std::size_t k = 0; k < a.qubits.size(); ++k) {
    EXPECT_EQ(a.qubits[k].lineage, b.qubits[k].lineage);
    EXPECT_EQ(a.qubits[k].matrix.matrix(), b.qubits[k].matrix.matrix());
  }
}

TEST(Counting, Recursion) {
  EXPECT_EQ(count_total(3), 8);
  EXPECT_EQ(count_total(4), 135);
  EXPECT_EQ(count_total(5), 54);
  EXPECT_EQ(count_total(6), 28 * (count_total(4) + 1));
  EXPECT_EQ(count_total_premerged(4), 105);
  EXPECT_THROW(count_total(2), OutOfRangeError);
}

}  // namespace
}  // namespace qudec
