#include <gtest/gtest.h>

#include <limits>

#include "masf/field.hpp"
#include "test_util.hpp"

namespace masf {
namespace {

using testing::random_field;

TEST(Field, ConstructionChecksShapeAndFiniteness) {
  EXPECT_THROW(Field(Shape{0, 2, 1}), DimensionError);
  EXPECT_THROW(Field(Shape{2, 2, 1}, std::vector<double>(3)), DimensionError);
  EXPECT_THROW(Field(Shape{1, 1, 1}, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}), ValidityError);
  EXPECT_THROW(Field(Shape{1, 1, 1}, std::vector<double>{std::numeric_limits<double>::infinity()}), ValidityError);
}

TEST(Field, RowMajorLayout) {
  const Field f(Shape{2, 3, 2}, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  EXPECT_EQ(f(0, 0, 1), 1);
  EXPECT_EQ(f(0, 2, 0), 4);
  EXPECT_EQ(f(1, 0, 0), 6);
  EXPECT_EQ(f(1, 2, 1), 11);
}

TEST(Field, LerpMidpoint) {
  const Shape s{4, 4, 3};
  const Field out = lerp(Field(s, 0.0), Field(s, 1.0), Field(s, 0.5));
  for (double v : out.values()) EXPECT_EQ(v, 0.5);
}

TEST(Field, MulByOnesIsIdentity) {
  std::mt19937_64 rng(1);
  const Field a = random_field({5, 3, 2}, rng);
  EXPECT_TRUE(bitwise_equal(elementwise_combine(a, Field(a.shape(), 1.0), Combine::mul), a));
}

TEST(Field, AddNegationIsZero) {
  std::mt19937_64 rng(2);
  const Field a = random_field({3, 7, 1}, rng);
  const Field z = elementwise_combine(a, -a, Combine::add);
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(Field, ShapeMismatchIsReported) {
  const Field a(Shape{2, 2, 1});
  const Field b(Shape{2, 2, 3});
  EXPECT_THROW(elementwise_combine(a, b, Combine::add), DimensionError);
  EXPECT_THROW(abs_diff(a, b), DimensionError);
  EXPECT_THROW(lerp(a, a, b), DimensionError);
}

TEST(Field, LerpRejectsCoefficientOutsideUnitInterval) {
  const Shape s{1, 2, 1};
  EXPECT_THROW(lerp(Field(s), Field(s), Field(s, 1.5)), ParameterError);
  EXPECT_THROW(lerp(Field(s), Field(s), Field(s, -0.1)), ParameterError);
}

TEST(Field, OverflowIsAValidityError) {
  const Field big(Shape{1, 1, 1}, 1e308);
  EXPECT_THROW(elementwise_combine(big, big, Combine::add), ValidityError);
}

TEST(AbsDiff, TrivialCases) {
  std::mt19937_64 rng(3);
  const Field a = random_field({4, 4, 1}, rng);
  for (const Field f = abs_diff(a, a); double v : f.values()) EXPECT_EQ(v, 0.0);
  const Shape s{2, 2, 2};
  for (const Field f = abs_diff(Field(s, 1.0), Field(s, -1.0)); double v : f.values()) EXPECT_EQ(v, 2.0);
}

TEST(AbsDiff, MatchesScalarLoop) {
  std::mt19937_64 rng(4);
  const Shape s{6, 5, 3};
  const Field a = random_field(s, rng, -3, 3);
  const Field b = random_field(s, rng, -3, 3);
  const Field d = abs_diff(a, b);
  for (std::size_t h = 0; h < s.height; ++h)
    for (std::size_t w = 0; w < s.width; ++w)
      for (std::size_t c = 0; c < s.channels; ++c) {
        const double x = a(h, w, c), y = b(h, w, c);
        EXPECT_EQ(d(h, w, c), x > y ? x - y : y - x);
      }
}

// Property: lerp(a, b, c) - a == c o (b - a), and abs_diff is symmetric.
TEST(FieldProperties, LerpDifferenceAndAbsDiffSymmetry) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape s{dim(rng), dim(rng), dim(rng) % 4 + 1};
    const Field a = random_field(s, rng, -10, 10);
    const Field b = random_field(s, rng, -10, 10);
    const Field c = random_field(s, rng, 0, 1);
    const Field lhs = lerp(a, b, c) - a;
    const Field rhs = elementwise_combine(c, b - a, Combine::mul);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
    EXPECT_TRUE(bitwise_equal(abs_diff(a, b), abs_diff(b, a)));
  }
}

}  // namespace
}  // namespace masf
