#include <gtest/gtest.h>

#include "pmet/ext_real.hpp"

using pmet::ExtReal;
using pmet::Top;

TEST(ExtReal, AdditionSaturatesAtInfinity) {
  EXPECT_TRUE((ExtReal(3.0) + ExtReal::inf()).is_inf());
  EXPECT_TRUE((ExtReal::inf() + ExtReal::inf()).is_inf());
  EXPECT_DOUBLE_EQ((ExtReal(0.25) + ExtReal(0.5)).value(), 0.75);
}

TEST(ExtReal, EuclidHandlesInfinity) {
  EXPECT_DOUBLE_EQ(pmet::euclid(ExtReal(0.4), ExtReal(0.7)).value(), 0.7 - 0.4);
  EXPECT_TRUE(pmet::euclid(ExtReal::inf(), ExtReal(2.0)).is_inf());
  EXPECT_TRUE(pmet::euclid(ExtReal(2.0), ExtReal::inf()).is_inf());
  EXPECT_EQ(pmet::euclid(ExtReal::inf(), ExtReal::inf()), ExtReal());
}

TEST(ExtReal, RejectsNegativeAndNaN) {
  EXPECT_THROW(ExtReal(-0.1), pmet::RangeError);
  EXPECT_THROW(ExtReal(std::nan("")), pmet::RangeError);
}

TEST(ExtReal, ScalingByZeroKillsInfinity) {
  EXPECT_EQ(0.0 * ExtReal::inf(), ExtReal());
  EXPECT_TRUE((0.5 * ExtReal::inf()).is_inf());
}

TEST(ExtReal, ApproxComparisons) {
  EXPECT_TRUE(pmet::approx_equal(ExtReal(0.1 + 0.2), ExtReal(0.3)));
  EXPECT_FALSE(pmet::approx_equal(ExtReal(0.3), ExtReal(0.3 + 1e-8)));
  EXPECT_FALSE(pmet::approx_equal(ExtReal(1e300), ExtReal::inf()));
  EXPECT_TRUE(pmet::approx_le(ExtReal(5.0), ExtReal::inf()));
  EXPECT_FALSE(pmet::approx_le(ExtReal::inf(), ExtReal(5.0)));
}

TEST(Top, ClampingIsAnError) {
  EXPECT_THROW(Top::one().check(ExtReal(1.5)), pmet::RangeError);
  EXPECT_EQ(Top::one().check(ExtReal(1.0 + 1e-12)), ExtReal(1.0));
  EXPECT_TRUE(Top::infinite().check(ExtReal::inf()).is_inf());
  EXPECT_THROW(Top::one().check(ExtReal::inf()), pmet::RangeError);
}

TEST(Top, ParsesNames) {
  EXPECT_EQ(Top::parse("1"), Top::one());
  EXPECT_EQ(Top::parse("inf"), Top::infinite());
  EXPECT_THROW(Top::parse("2"), pmet::InputError);
}

TEST(Format, TwelveSignificantDigitsAndInf) {
  EXPECT_EQ(pmet::format_value(ExtReal(0.1 + 0.2)), "0.3");
  EXPECT_EQ(pmet::format_value(ExtReal(2.0 / 3.0)), "0.666666666667");
  EXPECT_EQ(pmet::format_value(ExtReal::inf()), "inf");
}
