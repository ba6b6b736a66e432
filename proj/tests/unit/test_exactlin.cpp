#include <gtest/gtest.h>

#include <random>

#include "derivkit/error.hpp"
#include "derivkit/matrix.hpp"

using namespace derivkit;

namespace {

Matrix random_matrix(const Field& k, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Matrix m(k, r, c);
  std::uniform_int_distribution<long> d(-3, 3);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, d(rng));
  return m;
}

}  // namespace

TEST(Field, ParseAndName) {
  EXPECT_EQ(Field::parse("q").name(), "Q");
  EXPECT_EQ(Field::parse("fp:5").name(), "fp:5");
  EXPECT_EQ(Field::parse("F2"), Field::f2());
  EXPECT_THROW(Field::parse("fp:6"), InvalidInput);
  EXPECT_THROW(Field::prime(1), InvalidInput);
}

TEST(Field, Scalars) {
  const Field q = Field::rationals();
  EXPECT_EQ(q.format_scalar(q.parse_scalar("-6/4")), "-3/2");
  const Field f7 = Field::prime(7);
  EXPECT_EQ(f7.format_scalar(f7.parse_scalar("1/3")), "5");  // 3·5 = 15 ≡ 1
  EXPECT_EQ(f7.format_scalar(f7.parse_scalar("-1")), "6");
}

TEST(Rank, EmptyIdentityAndDependent) {
  EXPECT_EQ(rank(Matrix(Field::rationals(), 0, 0)), 0u);
  EXPECT_EQ(rank(Matrix::identity(Field::f2(), 2)), 2u);
  EXPECT_EQ(rank(Matrix::from_rows(Field::rationals(), {{1, 2}, {2, 4}})), 1u);
  // over F_2 the second row vanishes
  EXPECT_EQ(rank(Matrix::from_rows(Field::f2(), {{1, 2}, {2, 4}})), 1u);
  EXPECT_EQ(rank(Matrix::from_rows(Field::prime(3), {{1, 2}, {2, 1}})), 1u);  // 2·(1,2) = (2,1) mod 3
}

TEST(Kernel, Examples) {
  EXPECT_EQ(kernel_basis(Matrix::identity(Field::rationals(), 3)).cols(), 0u);
  const Matrix z(Field::rationals(), 2, 3);
  const Matrix k = kernel_basis(z);
  EXPECT_EQ(k.cols(), 3u);
  EXPECT_EQ(rank(k), 3u);
  const Matrix f2 = kernel_basis(Matrix::from_rows(Field::f2(), {{1, 1}}));
  EXPECT_EQ(f2, Matrix::from_rows(Field::f2(), {{1}, {1}}));
}

TEST(Solve, Examples) {
  const Field q = Field::rationals();
  const Matrix b = Matrix::from_rows(q, {{3, 1}, {-2, 7}});
  EXPECT_EQ(*solve(Matrix::identity(q, 2), b), b);
  const auto x = solve(Matrix::from_rows(Field::f2(), {{1, 0}}), Matrix::from_rows(Field::f2(), {{1}}));
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, Matrix::from_rows(Field::f2(), {{1}, {0}}));
  EXPECT_FALSE(solve(Matrix(q, 2, 2), Matrix::from_rows(q, {{1}, {0}})));
  for (const Field& k : {Field::f2(), Field::prime(3), Field::rationals()}) {
    EXPECT_FALSE(solve(Matrix(k, 1, 0), Matrix::from_rows(k, {{1}})));
    // x + y = 1 and x + y = 0 are inconsistent in every characteristic
    EXPECT_FALSE(solve(Matrix::from_rows(k, {{1, 1}, {1, 1}}), Matrix::from_rows(k, {{1}, {0}})));
  }
  EXPECT_THROW(solve(Matrix(q, 2, 2), Matrix(Field::f2(), 2, 1)), InvalidInput);
  EXPECT_THROW(solve(Matrix(q, 2, 2), Matrix(q, 3, 1)), InvalidInput);
}

TEST(Matrix, RationalArithmetic) {
  const Field q = Field::rationals();
  const Matrix a = Matrix::from_rows(q, {{1, 2}, {3, 4}});
  const Matrix inv = inverse(a);
  // det = −2, inverse = [[−2, 1], [3/2, −1/2]]
  EXPECT_EQ(inv.entry_string(1, 0), "3/2");
  EXPECT_EQ(inv.entry_string(1, 1), "-1/2");
  EXPECT_TRUE((a * inv).is_identity());
  EXPECT_THROW(inverse(Matrix::from_rows(q, {{1, 2}, {2, 4}})), InvalidInput);
}

TEST(Matrix, KroneckerOfIdentities) {
  for (const Field& k : {Field::f2(), Field::prime(5), Field::rationals()})
    EXPECT_TRUE(Matrix::kronecker(Matrix::identity(k, 2), Matrix::identity(k, 3)).is_identity());
  const Field q = Field::rationals();
  const Matrix a = Matrix::from_rows(q, {{1, 2}});
  const Matrix b = Matrix::from_rows(q, {{0, 1}, {1, 0}});
  EXPECT_EQ(Matrix::kronecker(a, b), Matrix::from_rows(q, {{0, 1, 0, 2}, {1, 0, 2, 0}}));
}

TEST(Matrix, RankNullityAndDeterminism) {
  std::mt19937_64 rng(11);
  for (const Field& k : {Field::f2(), Field::prime(3), Field::prime(65521), Field::rationals()}) {
    for (int t = 0; t < 40; ++t) {
      const std::size_t r = rng() % 7, c = rng() % 7;
      const Matrix m = random_matrix(k, r, c, rng);
      const Matrix ker = kernel_basis(m);
      EXPECT_EQ(rank(m) + ker.cols(), c);
      EXPECT_TRUE((m * ker).is_zero());
      const Matrix x0 = random_matrix(k, c, 1, rng);
      const Matrix b = m * x0;
      const auto x = solve(m, b);
      ASSERT_TRUE(x);
      EXPECT_EQ(m * *x, b);
      EXPECT_EQ(*solve(m, b), *x);
    }
  }
}

TEST(Matrix, WideF2RowsUseAllWords) {
  // 130 columns crosses two 64-bit words
  const Field k = Field::f2();
  Matrix m(k, 3, 130);
  m.set(0, 129, 1L);
  m.set(1, 0, 1L);
  m.set(1, 129, 1L);
  m.set(2, 64, 1L);
  EXPECT_EQ(rank(m), 3u);
  const Matrix ker = kernel_basis(m);
  EXPECT_EQ(ker.cols(), 127u);
  EXPECT_TRUE((m * ker).is_zero());
}
