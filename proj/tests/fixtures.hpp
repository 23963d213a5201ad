#pragma once

#include <string>

#include "zerofiber/zerofiber.hpp"

namespace fixtures {

using zerofiber::ClassVector;
using zerofiber::Model;
using zerofiber::Rational;
using zerofiber::RationalVector;

inline Rational q(long p, long d = 1) {
    Rational r{mpz_class(p), mpz_class(d)};
    r.canonicalize();
    return r;
}

inline RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

inline ClassVector divisor(std::initializer_list<Rational> xs) { return ClassVector::divisor(RationalVector(xs)); }

/// One blow-up of a point of the zero fiber on a section: E1 (strict
/// transform) and E2 (exceptional), both reduced, V = 1.
inline zerofiber::SurfaceBuilder m1_builder() {
    auto b = zerofiber::SurfaceBuilder::trivial(1);
    b.add_section("G");
    b.apply(zerofiber::BlowupStep::on_section(0, 0));
    return b;
}

inline Model m1() { return m1_builder().model(); }

/// M1 followed by blowing up E1 ∩ E2: a chain E1 - E3 - E2 with b = (1, 1, 2).
inline Model chain3() {
    auto b = m1_builder();
    b.apply(zerofiber::BlowupStep::intersection(0, 1));
    return b.model();
}

inline Model m2() { return zerofiber::verify::normal_cone_model(); }

inline std::string models_dir() { return ZEROFIBER_MODELS_DIR; }

}  // namespace fixtures
