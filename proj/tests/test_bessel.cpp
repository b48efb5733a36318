#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "bessel_oracle.hpp"
#include "helmholtz_cip/bessel.hpp"

namespace helmholtz_cip {
namespace {

using testing::bessel_series_oracle;

TEST(Bessel, ValuesAtZero) {
  EXPECT_EQ(bessel::j0(0.0), 1.0);
  EXPECT_EQ(bessel::j1(0.0), 0.0);
}

TEST(Bessel, ValuesAtOneMatchExtendedPrecisionSeries) {
  // Frozen from the 512-bit series oracle.
  EXPECT_NEAR(bessel::j0(1.0), 0.765197686557967, 1e-15);
  EXPECT_NEAR(bessel::j1(1.0), 0.440050585744934, 1e-15);
  EXPECT_NEAR(bessel_series_oracle(0, 1.0), 0.765197686557967, 1e-15);
  EXPECT_NEAR(bessel_series_oracle(1, 1.0), 0.440050585744934, 1e-15);
}

TEST(Bessel, AgreesWithSeriesOracleOnZeroTo200) {
  double worst0 = 0.0;
  double worst1 = 0.0;
  for (double x = 0.0; x <= 200.0; x += 0.173) {
    worst0 = std::max(worst0, std::abs(bessel::j0(x) - bessel_series_oracle(0, x)));
    worst1 = std::max(worst1, std::abs(bessel::j1(x) - bessel_series_oracle(1, x)));
  }
  EXPECT_LE(worst0, 1e-12);
  EXPECT_LE(worst1, 1e-12);
}

TEST(Bessel, RegimeSwitchoversAreContinuous) {
  for (double edge : {bessel::series_limit, bessel::asymptotic_limit}) {
    for (double dx : {-1e-9, 0.0, 1e-9}) {
      const double x = edge + dx;
      EXPECT_NEAR(bessel::j0(x), bessel_series_oracle(0, x), 1e-13) << x;
      EXPECT_NEAR(bessel::j1(x), bessel_series_oracle(1, x), 1e-13) << x;
    }
  }
}

TEST(Bessel, LargeArgumentsUpTo700) {
  // The 512-bit series loses all digits past x ~ 350; compare with the C++17 special functions instead.
  for (double x : {250.0, 333.3, 499.99, 612.5, 700.0}) {
    EXPECT_NEAR(bessel::j0(x), std::cyl_bessel_j(0.0, x), 1e-12) << x;
    EXPECT_NEAR(bessel::j1(x), std::cyl_bessel_j(1.0, x), 1e-12) << x;
  }
}

TEST(Bessel, DerivativeOfJ0IsMinusJ1) {
  const double step = 1e-5;
  for (double x : {0.5, 5.0, 50.0}) {
    const double fd = (bessel::j0(x + step) - bessel::j0(x - step)) / (2 * step);
    EXPECT_NEAR(fd, -bessel::j1(x), 1e-6) << x;
  }
}

TEST(Bessel, NoSimultaneousZeros) {
  for (double x = 0.0; x <= 700.0; x += 0.01) {
    const double a = bessel::j0(x);
    const double b = bessel::j1(x);
    ASSERT_GT(a * a + b * b, 0.0) << x;
  }
}

TEST(Bessel, RejectsInvalidArguments) {
  EXPECT_THROW(bessel::j0(-1.0), Error);
  EXPECT_THROW(bessel::j1(std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_THROW(bessel::j0(std::numeric_limits<double>::infinity()), Error);
}

}  // namespace
}  // namespace helmholtz_cip
