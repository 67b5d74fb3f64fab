#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "tsfloquet/matpow.hpp"

using namespace tsfloquet;
using namespace std::complex_literals;
using tsfloquet::testing::logm;
using tsfloquet::testing::rel_err;

namespace {

Matrix jordan(Complex lambda, int n) {
  Matrix j = lambda * Matrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  return j;
}

Matrix conjugate_by_random(const Matrix& m, std::mt19937_64& rng) {
  const Matrix s = tsfloquet::testing::random_matrix(rng, m.rows()) + 2.0 * Matrix::Identity(m.rows(), m.rows());
  return s * m * s.inverse();
}

}  // namespace

TEST(MatPow, FallingBinomials) {
  const auto c = falling_binomials(2.5, 4);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0], 1.0);
  EXPECT_NEAR(std::abs(c[1] - 2.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[2] - 2.5 * 1.5 / 2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[3] - 2.5 * 1.5 * 0.5 / 6), 0.0, 1e-15);
  // Integer exponents truncate.
  EXPECT_EQ(falling_binomials(2.0, 5)[3], 0.0);
}

TEST(MatPow, IntegerPowersMatchProducts) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = tsfloquet::testing::random_matrix(rng, 4) + 3.0 * Matrix::Identity(4, 4);
    EXPECT_LT(rel_err(real_power(m, 3), m * m * m), 1e-11);
    EXPECT_LT(rel_err(real_power(m, -1), m.inverse()), 1e-11);
    EXPECT_LT(rel_err(real_power(m, 0), Matrix::Identity(4, 4)), 1e-12);
  }
}

TEST(MatPow, DefectiveJordanBlockClosedForm) {
  // [[l, 1], [0, l]]^r = l^r [[1, r / l], [0, 1]].
  for (Complex l : {Complex(2.0), Complex(-1.0), Complex(0.5, 1.5)}) {
    for (double r : {0.5, 1.0 / 3.0, -2.25}) {
      const Complex lr = std::pow(l, r);
      Matrix want(2, 2);
      want << lr, r * lr / l, 0.0, lr;
      EXPECT_LT(rel_err(real_power(jordan(l, 2), r), want), 1e-13) << l << " " << r;
    }
  }
}

TEST(MatPow, ThreeByThreeJordanBlock) {
  const Complex l = 3.0;
  const double r = 0.7;
  const Complex lr = std::pow(l, r);
  Matrix want = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    want(i, i) = lr;
    if (i + 1 < 3) want(i, i + 1) = r * lr / l;
  }
  want(0, 2) = r * (r - 1) / 2 * lr / (l * l);
  EXPECT_LT(rel_err(real_power(jordan(l, 3), r), want), 1e-13);
}

TEST(MatPow, PowerAdditivity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = conjugate_by_random(jordan(1.5 + 0.5i, 3), rng);
    const auto s = spectral_decompose(m);
    EXPECT_LT(rel_err(real_power(s, 0.3) * real_power(s, 0.45), real_power(s, 0.75)), 1e-9);
    EXPECT_LT(rel_err(real_power(real_power(s, 0.5), 2.0), m), 1e-9);
  }
}

TEST(MatPow, LogAgreesWithSchurParlett) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = tsfloquet::testing::random_matrix(rng, 3) + 2.5 * Matrix::Identity(3, 3);
    const auto s = spectral_decompose(m);
    EXPECT_LT(rel_err(matrix_log(s), logm(m)), 1e-9);
    EXPECT_LT(rel_err(real_power(s, 0.5), (0.5 * logm(m)).exp()), 1e-9);
  }
}

TEST(MatPow, PrincipalBranchOnNegativeAxis) {
  Matrix m = -Matrix::Identity(2, 2);
  const auto s = spectral_decompose(m);
  EXPECT_LT(rel_err(matrix_log(s), std::numbers::pi * 1i * Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(rel_err(real_power(s, 0.5), 1i * Matrix::Identity(2, 2)), 1e-15);
}

TEST(MatPow, ComplexPower) {
  const Matrix m = jordan(2.0, 2);
  const Complex r(0.5, 1.0);
  const Complex lr = std::exp(r * std::log(2.0));
  Matrix want(2, 2);
  want << lr, r * lr / 2.0, 0.0, lr;
  EXPECT_LT(rel_err(complex_power(spectral_decompose(m), r), want), 1e-13);
}

TEST(MatPow, ProjectionsAreComplete) {
  std::mt19937_64 rng(9);
  Matrix d = Matrix::Zero(5, 5);
  d.block(0, 0, 2, 2) = jordan(2.0, 2);
  d(2, 2) = -1.0;
  d.block(3, 3, 2, 2) = jordan(0.5i, 2);
  const auto s = spectral_decompose(conjugate_by_random(d, rng));
  EXPECT_EQ(s.clusters(), 3u);
  int total = 0;
  for (int k : s.multiplicities) total += k;
  EXPECT_EQ(total, 5);
  EXPECT_LT(projection_residuals(s).max(), 1e-8);
  for (std::size_t i = 0; i < s.clusters(); ++i) {
    EXPECT_NEAR(std::abs(s.projections[i].trace() - double(s.multiplicities[i])), 0.0, 1e-8);
  }
}

TEST(MatPow, GeometricMultiplicity) {
  EXPECT_EQ(geometric_multiplicity(jordan(2.0, 3), 2.0), 1);
  EXPECT_EQ(geometric_multiplicity(2.0 * Matrix::Identity(3, 3), 2.0), 3);
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1.0;
  EXPECT_EQ(geometric_multiplicity(m, 1.0), 2);
  EXPECT_EQ(geometric_multiplicity(m, 5.0), 0);
}

TEST(MatPow, ClusteringTolerances) {
  Matrix tight = Matrix::Identity(2, 2);
  tight(1, 1) = 1.0 + 1e-10;
  const auto a = spectral_decompose(tight);
  EXPECT_EQ(a.clusters(), 1u);
  EXPECT_FALSE(a.ambiguous);

  Matrix border = Matrix::Identity(2, 2);
  border(1, 1) = 1.0 + 1e-7;
  const auto b = spectral_decompose(border);
  EXPECT_EQ(b.clusters(), 1u);
  EXPECT_TRUE(b.ambiguous);
  try {
    (void)spectral_decompose(border, SpectralOptions{.strict = true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClusteringAmbiguous);
  }

  Matrix apart = Matrix::Identity(2, 2);
  apart(1, 1) = 1.0 + 1e-4;
  const auto c = spectral_decompose(apart, SpectralOptions{.strict = true});
  EXPECT_EQ(c.clusters(), 2u);
}

TEST(MatPow, PerturbedJordanBlockStaysAccurate) {
  // Rounding splits a defective eigenvalue by about sqrt(eps); the adaptive
  // rule keeps it in one cluster.
  std::mt19937_64 rng(17);
  const Matrix m = conjugate_by_random(jordan(2.0, 2), rng);
  const auto s = spectral_decompose(m);
  EXPECT_EQ(s.clusters(), 1u);
  EXPECT_LT(rel_err(real_power(s, 0.5) * real_power(s, 0.5), m), 1e-9);
}

TEST(MatPow, SingularThrows) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = 0.0;
  try {
    (void)spectral_decompose(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
  }
}
