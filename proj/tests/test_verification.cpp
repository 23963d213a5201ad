#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace zerofiber;
using namespace zerofiber::verify;
using fixtures::divisor;
using fixtures::q;

namespace {

FuzzSpec small_spec(std::uint64_t seed = 7) {
    FuzzSpec s;
    s.seed = seed;
    s.models = 12;
    s.divisors_per_model = 3;
    return s;
}

}  // namespace

TEST(Oracle, ChainValues) {
    auto m = fixtures::chain3();
    auto z = zariski_oracle(m, divisor({1, 4, 1}));
    EXPECT_EQ(z.N, (RationalVector{0, q(7, 2), 0}));
    auto z2 = zariski_oracle(m, divisor({q(5, 4), q(1, 2), q(3, 2)}));
    EXPECT_EQ(z2.N, (RationalVector{0, 0, 0}));
    EXPECT_THROW(zariski_oracle(m, divisor({0, 0, 3})), BoundaryClassError);
    EXPECT_THROW(zariski_oracle(fixtures::m2(), fixtures::m2().A()), InputError);
}

TEST(Oracle, AgreesWithLoopOnM1) {
    auto m = fixtures::m1();
    SurfaceForm form(m);
    for (int a = 0; a <= 8; ++a)
        for (int b = 0; b <= 8; ++b) {
            ClassVector beta = divisor({q(a, 4), q(b, 4)});
            try {
                auto z = zariski(form, beta);
                EXPECT_EQ(zariski_oracle(m, beta).N, z.N);
            } catch (const NotBigError&) {
                EXPECT_THROW(zariski_oracle(m, beta), NotBigError);
            }
        }
}

TEST(Corpus, DeterministicForSeed) {
    auto a = generate_corpus(small_spec());
    auto b = generate_corpus(small_spec());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(io::model_to_json(a[i].model), io::model_to_json(b[i].model));
        ASSERT_EQ(a[i].divisors.size(), b[i].divisors.size());
        for (std::size_t k = 0; k < a[i].divisors.size(); ++k) EXPECT_EQ(a[i].divisors[k], b[i].divisors[k]);
    }
    auto c = generate_corpus(small_spec(8));
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        differs |= io::model_to_json(a[i].model) != io::model_to_json(c[i].model);
    EXPECT_TRUE(differs);
}

TEST(Corpus, ModelsValidAndDivisorsBig) {
    for (const auto& inst : generate_corpus(small_spec())) {
        EXPECT_NO_THROW(require_valid(inst.model));
        EXPECT_LE(inst.model.size(), 9u);
        for (const auto& D : inst.divisors) EXPECT_GT(volume(inst.model, D), 0);
    }
}

TEST(Checks, SmallCorpusPasses) {
    auto corpus = generate_corpus(small_spec());
    for (const auto& r : {check_probability(corpus), check_corWN(corpus), check_orthogonality(corpus),
                          check_gauge(corpus, 7), check_oracle(corpus), check_calibration(corpus)}) {
        EXPECT_TRUE(r.passed()) << r.name << ": " << (r.failures.empty() ? "" : r.failures.front());
        EXPECT_GT(r.instances, 0) << r.name;
    }
    DerivativeSpec d;
    d.instances = 6;
    auto r = check_derivative(small_spec(), d);
    EXPECT_TRUE(r.passed()) << (r.failures.empty() ? "" : r.failures.front());
}

TEST(Checks, KahlerRegion) {
    auto r = check_kahler_region(fixtures::m2(), 100);
    EXPECT_EQ(r.instances, 99);
    EXPECT_TRUE(r.passed());
}

TEST(Checks, CorWNDetectsBrokenClass) {
    auto m = fixtures::m1();
    // Not big: the check reports it instead of throwing.
    auto r = check_corWN(m, {divisor({-5, 0})});
    EXPECT_FALSE(r.passed());
    auto j = io::Json::parse(r.failures.front());
    EXPECT_TRUE(j.contains("model"));
    EXPECT_TRUE(j.contains("divisor"));
}

TEST(Report, Json) {
    CheckReport r{"x", 3, {}, true, {"n"}};
    auto j = report_to_json(r);
    EXPECT_EQ(j["passed"], true);
    EXPECT_EQ(j["instances"], 3);
}
