#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "admipc/specmat.hpp"
#include "oracles.hpp"

using namespace admipc;

namespace {

DenseSymMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return DenseSymMatrix(m);
}

ObservationMask randomMask(Index n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution keep(p);
  std::vector<IndexPair> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (keep(gen)) pairs.emplace_back(i, j);
  return ObservationMask(n, pairs);
}

}  // namespace

TEST(ProjectMask, FullMaskIsIdentity) {
  std::mt19937_64 gen(1);
  const DenseSymMatrix m(oracle::randomSymmetric(6, gen));
  EXPECT_EQ(projectMask(m, ObservationMask::full(6)), m);
}

TEST(ProjectMask, DiagonalMaskKeepsDiagonal) {
  const auto m = mat({{1, 2}, {2, 3}});
  EXPECT_EQ(projectMask(m, ObservationMask::diagonalOnly(2)), mat({{1, 0}, {0, 3}}));
  EXPECT_EQ(projectMaskComplement(m, ObservationMask::diagonalOnly(2)), mat({{0, 2}, {2, 0}}));
}

TEST(ProjectMask, ComplementOfFullMaskIsZero) {
  std::mt19937_64 gen(2);
  const DenseSymMatrix m(oracle::randomSymmetric(5, gen));
  EXPECT_EQ(projectMaskComplement(m, ObservationMask::full(5)), DenseSymMatrix::zeros(5));
}

TEST(ProjectMask, ProjectionsSumToInputAndAreIdempotent) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseSymMatrix m(oracle::randomSymmetric(5, gen));
    const ObservationMask mask = randomMask(5, 0.5, gen);
    const DenseSymMatrix p = projectMask(m, mask);
    EXPECT_EQ(p + projectMaskComplement(m, mask), m);
    EXPECT_EQ(projectMask(p, mask), p);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) EXPECT_EQ(p(i, j), mask.contains(i, j) ? m(i, j) : 0.0);
  }
}

TEST(ProjectMask, DimensionMismatchThrows) {
  EXPECT_THROW(projectMask(DenseSymMatrix::zeros(3), ObservationMask::full(4)), std::invalid_argument);
  EXPECT_THROW(projectMaskComplement(DenseSymMatrix::zeros(3), ObservationMask::full(2)), std::invalid_argument);
}

TEST(ObservationMaskTest, RejectsBadPairs) {
  EXPECT_THROW(ObservationMask(3, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(ObservationMask(3, {{0, 3}}), std::invalid_argument);
  EXPECT_THROW(ObservationMask(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_TRUE(ObservationMask(3, {{2, 0}}).contains(0, 2));
}

TEST(DenseSymMatrixTest, SymmetrizesAndWarns) {
  std::string seen;
  auto saved = symmetryWarningHandler();
  symmetryWarningHandler() = [&](std::string_view msg) { seen = msg; };
  Eigen::MatrixXd raw(2, 2);
  raw << 1, 2, 4, 3;
  const DenseSymMatrix m(raw);
  symmetryWarningHandler() = saved;
  EXPECT_EQ(m(0, 1), 3.0);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_FALSE(seen.empty());
}

TEST(DenseSymMatrixTest, SetKeepsSymmetry) {
  DenseSymMatrix m = DenseSymMatrix::zeros(3);
  m.set(0, 2, 5.0);
  EXPECT_EQ(m(2, 0), 5.0);
  EXPECT_THROW(DenseSymMatrix::zeros(0), std::invalid_argument);
}

TEST(Norms, HandComputed) {
  const auto m = mat({{1, -2}, {-2, 1}});
  EXPECT_DOUBLE_EQ(frobeniusNorm(m), std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(infNorm(m), 2.0);
  EXPECT_DOUBLE_EQ(trace(m), 2.0);
  const auto z = DenseSymMatrix::zeros(4);
  EXPECT_EQ(frobeniusNorm(z), 0.0);
  EXPECT_EQ(infNorm(z), 0.0);
  EXPECT_EQ(trace(z), 0.0);
  EXPECT_EQ(trace(DenseSymMatrix::identity(7)), 7.0);
}

TEST(Norms, FrobeniusMatchesNaiveLoop) {
  std::mt19937_64 gen(4);
  const DenseSymMatrix m(oracle::randomSymmetric(5, gen));
  double sum = 0.0;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) sum += m(i, j) * m(i, j);
  EXPECT_NEAR(frobeniusNorm(m) * frobeniusNorm(m), sum, 1e-12 * sum);
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectralNorm(DenseSymMatrix::identity(5)), 1.0, 1e-12);
  EXPECT_NEAR(spectralNorm(mat({{2, 0}, {0, -5}})), 5.0, 1e-12);
  EXPECT_EQ(spectralNorm(DenseSymMatrix::zeros(3)), 0.0);
}

TEST(SpectralNorm, MatchesOracleAndBoundedByFrobenius) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd raw = oracle::randomSymmetric(8, gen);
    const auto e = oracle::jacobi(raw);
    const double expected = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    const DenseSymMatrix m(raw);
    EXPECT_NEAR(spectralNorm(m), expected, 1e-6 * expected);
    EXPECT_LE(spectralNorm(m), frobeniusNorm(m) * (1 + 1e-12));
  }
}

TEST(PsdProjectShifted, DiagonalExample) {
  const auto out = psdProjectShifted(mat({{3, 0}, {0, -1}}), 0.5, SpectralBackend::fullDense());
  EXPECT_NEAR((out.L.dense() - mat({{2.5, 0}, {0, 0}}).dense()).norm(), 0.0, 1e-14);
  EXPECT_EQ(out.eigCalls, 1);
}

TEST(PsdProjectShifted, ZeroMatrix) {
  for (auto backend : {SpectralBackend::fullDense(), SpectralBackend::thresholdedIterative()}) {
    const auto out = psdProjectShifted(DenseSymMatrix::zeros(4), 0.7, backend);
    EXPECT_EQ(frobeniusNorm(out.L), 0.0);
  }
}

TEST(PsdProjectShifted, RejectsNonPositiveShift) {
  EXPECT_THROW(psdProjectShifted(DenseSymMatrix::zeros(2), 0.0, {}), std::invalid_argument);
}

TEST(PsdProjectShifted, MatchesJacobiOracle) {
  std::mt19937_64 gen(6);
  for (int n : {6, 10}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd raw = oracle::randomSymmetric(n, gen);
      const double shift = 0.3;
      const Eigen::MatrixXd expected =
          oracle::spectralMap(oracle::jacobi(raw), [shift](double l) { return std::max(l - shift, 0.0); });
      const auto got = psdProjectShifted(DenseSymMatrix(raw), shift, SpectralBackend::fullDense());
      EXPECT_LE((got.L.dense() - expected).norm(), 1e-8);
      // PSD up to tolerance, checked with the oracle.
      EXPECT_GE(oracle::jacobi(got.L.dense()).values.back(), -1e-8);
    }
  }
}

TEST(PsdProjectShifted, IsFrobeniusProjectionOfShiftedInput) {
  // Optimality of the PSD projection P of A: P - A is positive semidefinite
  // and orthogonal to P.
  std::mt19937_64 gen(7);
  const Eigen::MatrixXd raw = oracle::randomSymmetric(9, gen);
  const double shift = 0.4;
  const auto got = psdProjectShifted(DenseSymMatrix(raw), shift, {});
  const Eigen::MatrixXd a = raw - shift * Eigen::MatrixXd::Identity(9, 9);
  const Eigen::MatrixXd diff = got.L.dense() - a;
  EXPECT_GE(oracle::jacobi(diff).values.back(), -1e-9);
  EXPECT_NEAR((diff.array() * got.L.dense().array()).sum(), 0.0, 1e-9);
}

TEST(SpectralBackends, ThresholdedMatchesFullDenseOn20x20) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd raw = oracle::randomSymmetric(20, gen);
    const auto e = oracle::jacobi(raw);
    // Keep the threshold away from every eigenvalue so the selected set is unambiguous.
    double shift = 0.5;
    for (bool clash = true; clash;) {
      clash = false;
      for (double v : e.values)
        if (std::abs(v - shift) < 1e-4) {
          shift += 1e-3;
          clash = true;
        }
    }
    const DenseSymMatrix q(raw);
    const auto dense = psdProjectShifted(q, shift, SpectralBackend::fullDense());
    const auto partial = psdProjectShifted(q, shift, SpectralBackend::thresholdedIterative());
    EXPECT_LE((dense.L.dense() - partial.L.dense()).norm(), 1e-6);
  }
}

TEST(SpectralBackends, ThresholdedReturnsExactlyTheEigenpairsAboveThreshold) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd raw = oracle::randomSymmetric(30, gen);
    const auto e = oracle::jacobi(raw);
    const double threshold = 1.0;
    std::vector<double> expected;
    for (double v : e.values)
      if (v > threshold) expected.push_back(v);
    const Eigenpairs got = eigenpairsAbove(DenseSymMatrix(raw), threshold, SpectralBackend::thresholdedIterative());
    ASSERT_EQ(static_cast<std::size_t>(got.values.size()), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      EXPECT_NEAR(got.values[static_cast<Eigen::Index>(k)], expected[k], 1e-10);
      if (k > 0) EXPECT_GE(got.values[static_cast<Eigen::Index>(k) - 1], got.values[static_cast<Eigen::Index>(k)]);
      const Eigen::VectorXd w = got.vectors.col(static_cast<Eigen::Index>(k));
      EXPECT_LE((raw * w - expected[k] * w).norm(), 1e-9);
    }
  }
}

TEST(SpectralBackends, RepeatedEigenvaluesStayOrthogonal) {
  // A block-diagonal matrix of ones with equal blocks has a multiple eigenvalue.
  const Index n = 24;
  Eigen::MatrixXd bdo = Eigen::MatrixXd::Zero(n, n);
  for (Index b = 0; b < 4; ++b) bdo.block(6 * b, 6 * b, 6, 6).setOnes();
  std::mt19937_64 gen(10);
  Eigen::MatrixXd q = bdo + 1e-3 * oracle::randomSymmetric(static_cast<int>(n), gen);
  q = 0.5 * (q + q.transpose()).eval();
  for (const Eigen::MatrixXd& m : {bdo, q}) {
    const Eigenpairs got = eigenpairsAbove(DenseSymMatrix(m), 0.5, SpectralBackend::thresholdedIterative());
    ASSERT_EQ(got.values.size(), 4);
    EXPECT_LE((got.vectors.transpose() * got.vectors - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-9);
    const auto dense = psdProjectShifted(DenseSymMatrix(m), 0.5, SpectralBackend::fullDense());
    const auto partial = psdProjectShifted(DenseSymMatrix(m), 0.5, SpectralBackend::thresholdedIterative());
    EXPECT_LE((dense.L.dense() - partial.L.dense()).norm(), 1e-8);
  }
}

TEST(SpectralBackends, BothTailsFromOneCut) {
  std::mt19937_64 gen(11);
  const Eigen::MatrixXd raw = oracle::randomSymmetric(25, gen);
  const SpectrumCut cut{-1.5, 1.5};
  const Eigenpairs a = eigenpairsOutside(DenseSymMatrix(raw), cut, SpectralBackend::fullDense());
  const Eigenpairs b = eigenpairsOutside(DenseSymMatrix(raw), cut, SpectralBackend::thresholdedIterative());
  ASSERT_EQ(a.values.size(), b.values.size());
  EXPECT_LE((a.values - b.values).norm(), 1e-10);
  const auto rebuild = [](const Eigenpairs& p) { return reconstruct(25, p, [](double l) { return l; }).dense(); };
  EXPECT_LE((rebuild(a) - rebuild(b)).norm(), 1e-8);
}

TEST(SpectralBackends, OneByOne) {
  Eigen::MatrixXd m(1, 1);
  m << 2.0;
  EXPECT_EQ(eigenpairsAbove(DenseSymMatrix(m), 1.0, SpectralBackend::thresholdedIterative()).values.size(), 1);
  EXPECT_EQ(eigenpairsAbove(DenseSymMatrix(m), 3.0, SpectralBackend::thresholdedIterative()).values.size(), 0);
}

TEST(SpectralBackendErrorTest, CarriesResidual) {
  const SpectralBackendError e("no convergence", 0.25);
  EXPECT_EQ(e.residual(), 0.25);
  EXPECT_NE(std::string(e.what()).find("no convergence"), std::string::npos);
}

TEST(SpectralBackendTest, Names) {
  EXPECT_EQ(toString(SpectralBackend::fullDense().kind), "full-dense");
  EXPECT_EQ(toString(SpectralBackend::thresholdedIterative().kind), "thresholded-iterative");
  EXPECT_EQ(SpectralBackend{}.kind, SpectralBackend::Kind::FullDense);
}
