#include <gtest/gtest.h>

#include <chrono>

#include "fixtures.hpp"

using namespace zerofiber;
using fixtures::divisor;
using fixtures::q;

TEST(Graph, Distances) {
    auto g1 = intersection_graph(fixtures::m1());
    EXPECT_EQ(g1.dist, (std::vector<std::vector<std::size_t>>{{0, 1}, {1, 0}}));
    auto g3 = intersection_graph(fixtures::chain3());
    EXPECT_EQ(g3.dist[0][1], 2u);
    EXPECT_EQ(g3.dist[0][2], 1u);
    EXPECT_EQ(g3.dist[1][2], 1u);
    auto g0 = intersection_graph(SurfaceBuilder::trivial(1).model());
    EXPECT_EQ(g0.dist, (std::vector<std::vector<std::size_t>>{{0}}));

    auto broken = fixtures::chain3();
    broken.faces = {{0}, {1}, {2}, {0, 2}};
    EXPECT_THROW(intersection_graph(broken), DomainError);
}

TEST(Calibration, M1) {
    auto m = fixtures::m1();
    auto fam = build_calibrated_divisors(m, default_t_cap());
    EXPECT_EQ(fam.t0, 2);
    EXPECT_EQ(fam.D[0], divisor({1, 3}));
    EXPECT_EQ(fam.D[1], divisor({3, 1}));
    SurfaceForm form(m);
    EXPECT_EQ(form.pair_component(fam.D[0], 1), -2);
    EXPECT_EQ(form.pair_component(fam.D[1], 0), -1);

    auto at_one = calibrated_divisors_at(m, intersection_graph(m), q(1));
    EXPECT_EQ(form.pair_component(at_one[0], 1), 0);
    EXPECT_FALSE(is_calibrated(form, at_one));
    EXPECT_THROW(build_calibrated_divisors(m, q(1)), DomainError);
}

TEST(Calibration, SingleComponentAndChain) {
    auto t = SurfaceBuilder::trivial(2).model();
    auto fam = build_calibrated_divisors(t, default_t_cap());
    EXPECT_EQ(fam.D.size(), 1u);
    EXPECT_EQ(fam.D[0], divisor({1}));
    auto c3 = fixtures::chain3();
    auto fc = build_calibrated_divisors(c3, default_t_cap());
    EXPECT_TRUE(is_calibrated(SurfaceForm(c3), fc.D));
    EXPECT_LE(fc.t0, 1 << 20);
}

TEST(SimplexMap, VerticesAndInterior) {
    auto m = fixtures::m1();
    auto fam = build_calibrated_divisors(m, default_t_cap());
    EXPECT_EQ(simplex_map(m, fam, {1, 0}).masses, (RationalVector{1, 0}));
    EXPECT_EQ(simplex_map(m, fam, {0, 1}).masses, (RationalVector{0, 1}));
    auto mid = simplex_map(m, fam, {q(1, 2), q(1, 2)});
    EXPECT_EQ(mid.total(), 1);
    for (const auto& x : mid.masses) EXPECT_GE(x, 0);
    EXPECT_THROW(simplex_map(m, fam, {q(1, 2), q(1, 4)}), InputError);
    EXPECT_THROW(simplex_map(m, fam, {q(3, 2), q(-1, 2)}), InputError);
}

TEST(SolveMa, M1InteriorTarget) {
    auto m = fixtures::m1();
    DivisorialMeasure mu{{q(1, 4), q(3, 4)}};
    auto start = std::chrono::steady_clock::now();
    auto r = solve_ma(m, mu);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.residual, from_double(1e-9));
    // Recompute independently at the returned class.
    EXPECT_EQ(ma_big(m, r.D).masses, r.masses.masses);
    // Cross-check against the closed-form Kähler solution D = (7/4, 1).
    EXPECT_EQ(ma_kahler(m, divisor({q(7, 4), 1})).masses, mu.masses);
    EXPECT_FALSE(r.trace.empty());
}

TEST(SolveMa, BoundaryTargetUsesSubSimplex) {
    auto m = fixtures::m1();
    auto r = solve_ma(m, {{1, 0}});
    EXPECT_EQ(r.a_exact, (RationalVector{1, 0}));
    EXPECT_EQ(r.residual, 0);
    SolveOptions strict;
    strict.restrict_support = false;
    EXPECT_THROW(solve_ma(m, {{1, 0}}, strict), InputError);
    auto c3 = fixtures::chain3();
    EXPECT_THROW(solve_ma(c3, {{q(1, 2), q(1, 2), 0}}, strict), InputError);
    auto rc = solve_ma(c3, {{q(1, 2), q(1, 2), 0}});
    EXPECT_TRUE(rc.converged);
    EXPECT_EQ(rc.a_exact[2], 0);
}

TEST(SolveMa, InputErrors) {
    auto m = fixtures::m1();
    EXPECT_THROW(solve_ma(m, {{q(1, 2), q(1, 4)}}), InputError);
    EXPECT_THROW(solve_ma(m, {{q(3, 2), q(-1, 2)}}), InputError);
    EXPECT_THROW(solve_ma(m, {{1}}), InputError);
    EXPECT_THROW(solve_ma(fixtures::m2(), {{q(1, 2), q(1, 2)}}), InputError);
}

TEST(SolveMa, ChainTargetsWithFallbackDisabledAndEnabled) {
    auto m = fixtures::chain3();
    DivisorialMeasure mu{{q(1, 5), q(3, 10), q(1, 2)}};
    auto r = solve_ma(m, mu);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(ma_big(m, r.D).masses, r.masses.masses);
    SolveOptions capped;
    capped.max_iter = 0;
    auto none = solve_ma(m, mu, capped);
    EXPECT_FALSE(none.converged);
    EXPECT_GT(none.residual, 0);
}

TEST(Variational, M1) {
    auto m = fixtures::m1();
    DivisorialMeasure mu{{q(1, 4), q(3, 4)}};
    auto v = variational_solve(m, mu);
    ASSERT_TRUE(v.attained);
    EXPECT_EQ(v.masses.masses, mu.masses);
    EXPECT_EQ(v.residual, 0);
    auto z = gauge_normalize(m, v.D, GaugeMode::min_zero);
    EXPECT_EQ(z.D, divisor({q(3, 4), 0}));
    // g(D) = E(D) - Σ μ_i d_i / b_i = 15/32 - 3/16 in the min-zero gauge.
    EXPECT_EQ(v.dual_energy_lower_bound, q(9, 32));
    EXPECT_EQ(dual_objective(m, mu, z.D), q(9, 32));
    EXPECT_FALSE(kahler_violation(m, v.D));

    auto fp = solve_ma(m, mu);
    for (std::size_t i = 0; i < m.size(); ++i)
        EXPECT_LE(abs(Rational(fp.masses.masses[i] - v.masses.masses[i])), from_double(1e-8));
}

TEST(Variational, M1OutsideKahlerChamber) {
    auto m = fixtures::m1();
    auto v = variational_solve(m, {{1, 0}});
    EXPECT_FALSE(v.attained);
    EXPECT_EQ(v.message, kNotAttainable);
}

TEST(Variational, NormalConeRegion) {
    auto m = fixtures::m2();
    auto v = variational_solve(m, {{q(7, 8), q(1, 8)}});
    ASSERT_TRUE(v.attained);
    EXPECT_EQ(v.masses.masses, (RationalVector{q(7, 8), q(1, 8)}));
    // e = d_1 - d_2 = 1/2 in any gauge.
    EXPECT_EQ(v.D.d[0] - v.D.d[1], q(1, 2));
    EXPECT_FALSE(kahler_violation(m, v.D));

    auto bad = variational_solve(m, {{q(1, 4), q(3, 4)}});
    EXPECT_FALSE(bad.attained);
    EXPECT_EQ(bad.message, kNotAttainable);

    // a_1 = 1/2 is only approached as e -> 1, on the chamber boundary.
    EXPECT_FALSE(variational_solve(m, {{q(1, 2), q(1, 2)}}).attained);

    // Targets reached by Newton iterations rather than the start point.
    for (auto e : {q(1, 3), q(9, 10)}) {
        DivisorialMeasure mu{{1 - e * e / 2, e * e / 2}};
        auto r = variational_solve(m, mu);
        ASSERT_TRUE(r.attained);
        EXPECT_LE(r.residual, from_double(1e-9));
        EXPECT_LE(abs(Rational(r.D.d[0] - r.D.d[1] - e)), from_double(1e-8));
    }
}

TEST(Variational, ConcavityCertificate) {
    // Surface Hessian V^{-1}·Gram is negative semidefinite with kernel 𝒳_0.
    for (const auto& m : {fixtures::m1(), fixtures::chain3()}) {
        auto h = hessian_energy(m, m.A());
        auto in = inertia(h);
        EXPECT_EQ(in.positive, 0u);
        EXPECT_EQ(in.zero, 1u);
        EXPECT_EQ(h * m.zero_fiber().d, RationalVector(m.size()));
    }
}
