#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace zerofiber;
using fixtures::divisor;
using fixtures::q;

TEST(Builder, TrivialModel) {
    auto m = SurfaceBuilder::trivial(q(2)).model();
    EXPECT_EQ(m.size(), 1u);
    EXPECT_EQ(m.tensor.get({kA, 1}), 2);
    EXPECT_EQ(m.tensor.get({1, 1}), 0);
    EXPECT_TRUE(validate_model(m).empty());
    EXPECT_THROW(SurfaceBuilder::trivial(q(0)), InputError);
}

TEST(Builder, InteriorBlowupGivesM1Tensor) {
    auto b = trivial_model(1);
    b = blowup(b, BlowupStep::interior(0));
    EXPECT_EQ(b.model().tensor, fixtures::m1().tensor);
    EXPECT_EQ(b.log().size(), 1u);
    EXPECT_EQ(b.log()[0].result, 1u);
}

TEST(Builder, IntersectionBlowup) {
    auto m = fixtures::chain3();
    EXPECT_EQ(m.components[2].b, 2);
    EXPECT_EQ(m.tensor.get({3, 3}), -1);
    EXPECT_EQ(m.tensor.get({1, 2}), 0);
    EXPECT_EQ(m.tensor.get({1, 3}), 1);
    EXPECT_EQ(m.tensor.get({2, 3}), 1);
    EXPECT_EQ(m.tensor.get({1, 1}), -2);
    EXPECT_FALSE(m.has_face({0, 1}));
    SurfaceForm form(m);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(form.pair_component(m.zero_fiber(), i), 0);
}

TEST(Builder, SectionBookkeeping) {
    auto b = fixtures::m1_builder();
    ASSERT_EQ(b.sections().size(), 1u);
    EXPECT_EQ(b.sections()[0].self, -1);
    EXPECT_EQ(b.dominant_component(), 0u);
    // The section now crosses E2 only; it cannot be blown up on E1 again.
    EXPECT_THROW(b.apply(BlowupStep::on_section(0, 0)), InputError);
    b.apply(BlowupStep::on_section(0, 1));
    EXPECT_EQ(b.model().curves[0].pairing, (RationalVector{0, 0, 0, 1}));
}

TEST(Builder, IllegalCenters) {
    auto b = fixtures::m1_builder();
    EXPECT_THROW(b.apply(BlowupStep::interior(7)), InputError);
    EXPECT_THROW(b.apply(BlowupStep::intersection(0, 0)), InputError);
    b.apply(BlowupStep::intersection(0, 1));
    EXPECT_THROW(b.apply(BlowupStep::intersection(0, 1)), InputError);
    EXPECT_THROW(b.apply(BlowupStep::on_section(3, 0)), InputError);
    EXPECT_THROW(b.add_section("G"), InputError);
    EXPECT_THROW(b.add_section("E1"), InputError);
}

TEST(Zariski, M1Examples) {
    auto m = fixtures::m1();
    SurfaceForm form(m);
    auto z = zariski(m, divisor({q(9, 4), q(1)}));
    EXPECT_EQ(z.N, (RationalVector{q(1, 4), 0}));
    EXPECT_EQ(z.support, (std::vector<std::size_t>{0}));
    EXPECT_EQ(form.pair_component(z.P, 0), 0);
    EXPECT_EQ(form.pair_component(z.P, 1), 1);
    EXPECT_EQ(volume(m, divisor({q(9, 4), q(1)})), 3);

    auto k = zariski(m, m.A() + m.zero_fiber());
    EXPECT_TRUE(k.support.empty());
    EXPECT_EQ(k.N, (RationalVector{0, 0}));

    auto y = zariski(m, divisor({q(1), q(3)}));
    EXPECT_EQ(y.N, (RationalVector{0, 2}));
    EXPECT_EQ(form.pair_component(y.P, 0), 1);
    EXPECT_EQ(form.pair_component(y.P, 1), 0);
}

TEST(Zariski, GaugeIndependentN) {
    auto m = fixtures::m1();
    auto a = zariski(m, divisor({q(1), q(-1, 4)}));
    auto b = zariski(m, divisor({q(9, 4), q(1)}));
    EXPECT_EQ(a.N, b.N);
    EXPECT_EQ(a.P + q(5, 4) * m.zero_fiber(), b.P);
}

// Values from an independent brute-force enumeration.
TEST(Zariski, ChainOracleValues) {
    auto m = fixtures::chain3();
    struct Case {
        ClassVector D;
        RationalVector N;
        Rational vol;
        RationalVector masses;
    };
    std::vector<Case> cases{
        {divisor({1, 4, 1}), {0, q(7, 2), 0}, q(3, 2), {0, 0, 1}},
        {divisor({3, 1, 1}), {2, q(1, 2), 0}, q(3, 2), {0, 0, 1}},
        {divisor({2, 1, 2}), {q(1, 2), 0, 0}, q(5, 2), {0, 0, 1}},
        {divisor({1, 1, q(3, 2)}), {0, q(1, 4), 0}, q(15, 8), {q(1, 2), 0, q(1, 2)}},
        {divisor({q(5, 4), q(1, 2), q(3, 2)}), {0, 0, 0}, q(15, 8), {0, q(1, 2), q(1, 2)}},
    };
    for (const auto& c : cases) {
        auto z = zariski(m, c.D);
        EXPECT_EQ(z.N, c.N);
        EXPECT_EQ(volume(m, c.D), c.vol);
        EXPECT_EQ(ma_big(m, c.D).masses, c.masses);
    }
    auto status = classify_components(m, divisor({q(5, 4), q(1, 2), q(3, 2)}));
    EXPECT_EQ(status[0], ComponentStatus::in_enk_not_enn);
    EXPECT_EQ(status[1], ComponentStatus::kahler_locus);
}

TEST(Zariski, NotBigAndBoundary) {
    auto c3 = fixtures::chain3();
    EXPECT_THROW(zariski(c3, divisor({0, 0, 3})), BoundaryClassError);
    auto m = fixtures::m1();
    ClassVector neg{q(-1), {0, 0}};
    EXPECT_THROW(zariski(m, neg), NotBigError);
    ClassVector zero{q(0), {1, 0}};
    EXPECT_THROW(zariski(m, zero), NotBigError);
    EXPECT_THROW(SurfaceForm(fixtures::m2()), InputError);
}

TEST(Volume, Examples) {
    auto m = fixtures::m1();
    for (auto c : {q(1, 3), q(1), q(5)}) EXPECT_EQ(volume(m, m.A() + c * m.zero_fiber()), 2 * c);
    EXPECT_GE(volume(m, m.A() + m.zero_fiber() + m.E(1)), volume(m, m.A() + m.zero_fiber()));
}

TEST(RestrictedVolume, Examples) {
    auto m = fixtures::m1();
    EXPECT_EQ(restricted_volume(m, divisor({q(9, 4), 1}), 0), 0);
    EXPECT_EQ(restricted_volume(m, divisor({q(9, 4), 1}), 1), 1);
    EXPECT_EQ(restricted_volume(m, divisor({1, 3}), 0), 1);
    EXPECT_EQ(restricted_volume(m, divisor({1, 3}), 1), 0);
    auto D = divisor({1, q(1, 2)});
    SurfaceForm form(m);
    EXPECT_EQ(restricted_volume(m, D, 0), form.pair_component(D, 0));
    EXPECT_THROW(restricted_volume(m, D, 2), InputError);
}

TEST(Lelong, Examples) {
    auto m = fixtures::m1();
    EXPECT_EQ(lelong(m, divisor({q(9, 4), 1})), (RationalVector{q(1, 4), 0}));
    EXPECT_EQ(lelong(m, divisor({1, q(1, 2)})), (RationalVector{0, 0}));
    EXPECT_EQ(lelong(m, divisor({1, 3})), (RationalVector{0, 2}));
}

TEST(MaBig, Examples) {
    auto m = fixtures::m1();
    EXPECT_EQ(ma_big(m, divisor({q(9, 4), 1})).masses, (RationalVector{0, 1}));
    EXPECT_EQ(ma_big(m, divisor({1, q(1, 2)})), ma_kahler(m, divisor({1, q(1, 2)})));
    EXPECT_EQ(ma_big(m, divisor({1, 3})).masses, (RationalVector{1, 0}));
    ClassVector half{q(1, 2), {1, 1}};
    EXPECT_THROW(ma_big(m, half), InputError);
}

TEST(Envelope, ExamplesAndOrthogonality) {
    auto m = fixtures::m1();
    EXPECT_EQ(envelope_values(m, divisor({q(9, 4), 1})), (RationalVector{2, 1}));
    EXPECT_EQ(envelope_values(m, divisor({1, q(1, 2)})), (RationalVector{1, q(1, 2)}));
    EXPECT_EQ(envelope_values(m, divisor({1, 3})), (RationalVector{1, 1}));
    for (auto D : {divisor({q(9, 4), 1}), divisor({1, q(1, 2)}), divisor({1, 3})})
        EXPECT_EQ(orthogonality_pairing(m, D), 0);
    // Multiplicity-2 component divides the Lelong number.
    auto c3 = fixtures::chain3();
    auto env = envelope_values(c3, divisor({1, 4, 1}));
    EXPECT_EQ(env, (RationalVector{1, q(1, 2), q(1, 2)}));
}

TEST(Classify, Examples) {
    auto m = fixtures::m1();
    EXPECT_EQ(classify_components(m, divisor({q(9, 4), 1})),
              (std::vector<ComponentStatus>{ComponentStatus::in_enn, ComponentStatus::kahler_locus}));
    EXPECT_EQ(classify_components(m, divisor({1, q(1, 2)})),
              (std::vector<ComponentStatus>{ComponentStatus::kahler_locus, ComponentStatus::kahler_locus}));
    EXPECT_EQ(classify_components(m, m.A() + m.zero_fiber())[1], ComponentStatus::in_enk_not_enn);
    EXPECT_EQ(to_string(ComponentStatus::in_enk_not_enn), "in-EnK-not-Enn");
}

TEST(Derivative, BoundaryOfNefConeComponent) {
    // β = A + 𝒳_0 along E_2: E_2 is not good, the target is 0 and the
    // one-sided quotients are O(h).
    auto m = fixtures::m1();
    ClassVector beta = m.A() + m.zero_fiber();
    EXPECT_THROW(volume_derivative_check(m, beta, 1, q(1, 8)), DomainError);
    auto dc = volume_derivative_check(m, beta, 1, q(1, 8), true);
    EXPECT_EQ(dc.target, 0);
    auto cb = curvature_bound(m, beta, 1, q(1, 8));
    EXPECT_LE(cb.C, 2);
    EXPECT_LE(dc.right_error(), q(1, 8) * cb.C);
    EXPECT_LE(dc.left_error(), q(1, 8) * cb.C);
}

TEST(Derivative, ChamberSlopesAreExact) {
    auto m = fixtures::m1();
    ClassVector beta = m.A() + q(3, 2) * m.zero_fiber() + q(1, 4) * m.E(1);
    SurfaceForm form(m);
    auto ch = chamber_along(form, beta, 0, 0);
    auto h = q(1, 64);
    auto dc = volume_derivative_check(m, beta, 0, h);
    // vol(β + tE_1) = vol + 2t·rv + q t² inside the chamber.
    EXPECT_EQ(dc.right - ch.q * h, dc.target);
    EXPECT_EQ(dc.left + ch.q * h, dc.target);
    EXPECT_EQ(dc.target, 2 * restricted_volume(m, beta, 0));
    EXPECT_LE(dc.right_error(), h);
    EXPECT_THROW(volume_derivative_check(m, beta, 0, q(0)), InputError);
    EXPECT_THROW(volume_derivative_check(m, m.A() + q(1, 100) * m.zero_fiber(), 0, q(5)), DomainError);
}

TEST(Derivative, CurvatureBoundAcrossWall) {
    auto m = fixtures::m1();
    // Wall of the negative part of E_1 at t = 0 along E_1 from β = A + 2E_1 + E_2.
    ClassVector beta = divisor({2, 1});
    SurfaceForm form(m);
    auto right = chamber_along(form, beta, 0, q(1, 8));
    auto left = chamber_along(form, beta, 0, q(-1, 8));
    EXPECT_NE(right.support, left.support);
    auto cb = curvature_bound(m, beta, 0, q(1, 8));
    EXPECT_FALSE(cb.single_chamber);
    EXPECT_EQ(cb.C, std::max(abs(right.q), abs(left.q)));
}
