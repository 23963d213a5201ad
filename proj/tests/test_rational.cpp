#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace zerofiber;
using fixtures::q;

TEST(Rational, ParsesIntegersAndFractions) {
    EXPECT_EQ(parse_rational("7"), q(7));
    EXPECT_EQ(parse_rational("-3/4"), q(-3, 4));
    EXPECT_EQ(parse_rational("6/8"), q(3, 4));
    EXPECT_EQ(parse_rational("+2/4"), q(1, 2));
    EXPECT_EQ(to_string(parse_rational("6/8")), "3/4");
    EXPECT_EQ(to_string(parse_rational("-10/5")), "-2");
}

TEST(Rational, RejectsMalformedInput) {
    for (const char* bad : {"", "1/", "/2", "1/0", "1.5", "a", "1/-2", "1 /2", "--1"})
        EXPECT_THROW(parse_rational(bad), InputError) << bad;
}

TEST(Rational, FromDoubleIsExact) {
    EXPECT_EQ(from_double(0.375), q(3, 8));
    EXPECT_EQ(from_double(-2.0), q(-2));
    EXPECT_THROW(from_double(std::nan("")), InputError);
}

TEST(Rational, RationalizeRespectsCap) {
    // 1/3 as a double is a dyadic with a huge denominator.
    EXPECT_EQ(rationalize(1.0 / 3.0, default_denominator_cap()), q(1, 3));
    EXPECT_EQ(rationalize(0.1, default_denominator_cap()), q(1, 10));
    EXPECT_EQ(rationalize(q(355, 113), mpz_class(100)), q(22, 7));
    EXPECT_EQ(rationalize(q(22, 7), mpz_class(100)), q(22, 7));
    EXPECT_EQ(rationalize(q(-7, 3), mpz_class(1)), q(-2));
}

TEST(Rational, SumAndMaxAbs) {
    RationalVector v{q(1, 2), q(-3, 4), q(1, 4)};
    EXPECT_EQ(sum(v), 0);
    EXPECT_EQ(max_abs(v), q(3, 4));
}
