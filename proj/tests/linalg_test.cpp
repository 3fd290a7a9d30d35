#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "prodsdp/linalg.hpp"

using namespace prodsdp;

namespace {

SymMatrix random_symmetric(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a.set(i, j, d(rng));
  return a;
}

}  // namespace

TEST(Kron, ProductRowLayout) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 5}, {6, 7}};
  const Matrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 4u);
  ASSERT_EQ(k.cols(), 4u);
  // (i1, i2) -> i1 * 2 + i2
  for (std::size_t i1 = 0; i1 < 2; ++i1)
    for (std::size_t j1 = 0; j1 < 2; ++j1)
      for (std::size_t i2 = 0; i2 < 2; ++i2)
        for (std::size_t j2 = 0; j2 < 2; ++j2)
          EXPECT_EQ(k(i1 * 2 + i2, j1 * 2 + j2), a(i1, j1) * b(i2, j2));
}

TEST(Kron, Vectors) {
  const std::vector<double> a{1, -2}, b{3, 4, 5};
  EXPECT_EQ(kron(a, b), (std::vector<double>{3, 4, 5, -6, -8, -10}));
}

TEST(Kron, MixedProductRule) {
  const SymMatrix a = random_symmetric(3, 1), b = random_symmetric(2, 2);
  const SymMatrix c = random_symmetric(3, 3), d = random_symmetric(2, 4);
  // (A (x) B) . (C (x) D) = (A . C)(B . D)
  EXPECT_NEAR(frobenius_dot(kron(a, b), kron(c, d)), frobenius_dot(a, c) * frobenius_dot(b, d),
              1e-12);
}

TEST(Frobenius, ShapeMismatchThrows) {
  EXPECT_THROW(frobenius_dot(Matrix(2, 2), Matrix(2, 3)), std::invalid_argument);
}

TEST(SymMatrix, RejectsAsymmetric) {
  EXPECT_THROW(SymMatrix(Matrix{{1, 2}, {3, 4}}), std::invalid_argument);
  EXPECT_THROW(SymMatrix(Matrix(2, 3)), std::invalid_argument);
  const SymMatrix s = SymMatrix::symmetrize(Matrix{{1, 2}, {4, 1}});
  EXPECT_EQ(s(0, 1), 3.0);
  EXPECT_EQ(s(1, 0), 3.0);
}

TEST(Hat, BipartiteBlocks) {
  const SymMatrix h = hat(Matrix{{1, 2, 3}});
  ASSERT_EQ(h.dim(), 4u);
  EXPECT_EQ(h(0, 0), 0.0);
  EXPECT_EQ(h(0, 3), 3.0);
  EXPECT_EQ(h(3, 0), 3.0);
  EXPECT_EQ(h(1, 2), 0.0);
}

TEST(Eigen, TwoByTwo) {
  const auto e = eigen(SymMatrix{{2, 1}, {1, 2}});
  ASSERT_EQ(e.eigenvalues.size(), 2u);
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 3.0, 1e-14);
}

TEST(Eigen, ReconstructsRandomMatrices) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const SymMatrix a = random_symmetric(7, seed);
    const auto e = eigen(a);
    for (std::size_t k = 1; k < e.eigenvalues.size(); ++k)
      EXPECT_LE(e.eigenvalues[k - 1], e.eigenvalues[k]);
    Matrix lam(7, 7);
    for (std::size_t k = 0; k < 7; ++k) lam(k, k) = e.eigenvalues[k];
    const Matrix back = e.eigenvectors * lam * e.eigenvectors.transpose();
    EXPECT_LT((back - a.matrix()).max_abs(), 1e-12);
    const Matrix gram = e.eigenvectors.transpose() * e.eigenvectors;
    EXPECT_LT((gram - Matrix::identity(7)).max_abs(), 1e-12);
  }
}

TEST(Eigen, PsdTests) {
  EXPECT_TRUE(is_psd(SymMatrix{{1, 1}, {1, 1}}));
  EXPECT_FALSE(is_psd(SymMatrix{{1, 2}, {2, 1}}));
  EXPECT_NEAR(min_eigenvalue(SymMatrix{{1, 2}, {2, 1}}), -1.0, 1e-14);
  EXPECT_NEAR(max_eigenvalue(SymMatrix{{1, 2}, {2, 1}}), 3.0, 1e-14);
  // The all-ones matrix of order n has eigenvalues n and 0.
  EXPECT_NEAR(max_eigenvalue(SymMatrix(Matrix(5, 5, 1.0))), 5.0, 1e-13);
}

TEST(Cholesky, SolveAndInverse) {
  const Matrix a{{4, 2, 0}, {2, 5, 1}, {0, 1, 3}};
  const auto l = cholesky(a);
  ASSERT_TRUE(l.has_value());
  EXPECT_LT((*l * l->transpose() - a).max_abs(), 1e-14);
  std::vector<double> b{1, 2, 3};
  const std::vector<double> rhs = b;
  cholesky_solve(*l, b);
  const auto ax = a * std::span<const double>(b);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ax[i], rhs[i], 1e-14);
  EXPECT_LT((lower_inverse(*l) * *l - Matrix::identity(3)).max_abs(), 1e-14);
  EXPECT_FALSE(cholesky(Matrix{{1, 2}, {2, 1}}).has_value());
}

TEST(Vectors, Norms) {
  const std::vector<double> v{3, -4};
  EXPECT_EQ(dot(v, v), 25.0);
  EXPECT_EQ(norm2(v), 5.0);
  EXPECT_EQ(norm_inf(v), 4.0);
}

TEST(Eigen, SmallCases) {
  EXPECT_EQ(eigen(SymMatrix::identity(3)).eigenvalues, (std::vector<double>{1, 1, 1}));
  const auto d = eigen(SymMatrix{{2, 0}, {0, -1}});
  EXPECT_EQ(d.eigenvalues, (std::vector<double>{-1, 2}));
  const auto h = eigen(hat(Matrix{{1}}));
  EXPECT_NEAR(h.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(h.eigenvalues[1], 1.0, 1e-15);
  EXPECT_FALSE(is_psd(hat(Matrix{{1}}), 1e-9));
}

TEST(Hat, TopEigenvalueIsLargestSingularValue) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a(3, 3);
    for (double& v : a.entries()) v = d(rng);
    const double sigma = std::sqrt(max_eigenvalue(SymMatrix::symmetrize(a.transpose() * a)));
    EXPECT_NEAR(max_eigenvalue(hat(a)), sigma, 1e-9);
  }
}
