#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "zerofiber/io.hpp"
#include "zerofiber/solver.hpp"
#include "zerofiber/surface.hpp"

namespace zerofiber::verify {

struct FuzzSpec {
    std::uint64_t seed = 42;
    int models = 200;
    int divisors_per_model = 5;
    int max_steps = 8;        // blow-ups per model, at most 8
    int coefficient_range = 4;
    int max_denominator = 64;
};

struct Instance {
    Model model;
    std::vector<ClassVector> divisors;  // big classes A + D
};

struct CheckReport {
    std::string name;
    long instances = 0;
    std::vector<std::string> failures;  // each a replayable JSON counterexample
    bool exact = true;
    std::vector<std::string> notes;

    bool passed() const { return failures.empty(); }
};

inline io::Json report_to_json(const CheckReport& r) {
    io::Json failures = io::Json::array();
    for (const auto& f : r.failures) failures.push_back(io::Json::parse(f));
    return {{"check", r.name},     {"instances", r.instances}, {"exact", r.exact},
            {"passed", r.passed()}, {"failures", failures},    {"notes", r.notes}};
}

inline std::string counterexample(const Model& m, const ClassVector& D, const std::string& what) {
    return io::Json{{"what", what}, {"model", io::model_to_json(m)}, {"divisor", io::divisor_to_json(D)}}.dump();
}

// ---------------------------------------------------------------------------
// Generators.

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// p/q with 1 ≤ q ≤ max_den and |p/q| ≤ range.
inline Rational random_rational(Rng& rng, int range, int max_den) {
    const int q = uniform_int(rng, 1, max_den);
    const int p = uniform_int(rng, -range * q, range * q);
    Rational r{mpz_class(p), mpz_class(q)};
    r.canonicalize();
    return r;
}

/// Random surface model: V from a small set, a section G, then up to
/// max_steps blow-ups alternating (when possible) between interior points
/// and crossing points of the zero fiber.
inline SurfaceBuilder random_surface_builder(Rng& rng, const FuzzSpec& spec) {
    static const int volumes[] = {1, 1, 2, 3};
    auto b = SurfaceBuilder::trivial(Rational(volumes[uniform_int(rng, 0, 3)]));
    b.add_section("G");
    const int steps = uniform_int(rng, 0, std::min(spec.max_steps, 8));
    bool prefer_crossing = uniform_int(rng, 0, 1) == 1;
    for (int s = 0; s < steps; ++s) {
        const Model& m = b.model();
        std::vector<std::vector<std::size_t>> edges;
        for (const auto& f : m.faces)
            if (f.size() == 2) edges.push_back(f);
        if (prefer_crossing && !edges.empty()) {
            const auto& e = edges[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(edges.size()) - 1))];
            b.apply(BlowupStep::intersection(e[0], e[1]));
        } else {
            const auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(m.size()) - 1));
            const auto& sec = b.sections().front();
            if (uniform_int(rng, 0, 3) == 0 && sec.pairing[static_cast<std::size_t>(basis_of(i))] == 1 &&
                m.components[i].b == 1)
                b.apply(BlowupStep::on_section(0, i));
            else
                b.apply(BlowupStep::interior(i));
        }
        prefer_crossing = !prefer_crossing;
    }
    return b;
}

/// Random coefficients, moved into the D ≥ 𝒳_0 gauge, plus c𝒳_0 for a random
/// c ∈ [0, 2]; such classes dominate A + 𝒳_0 and are big.
inline ClassVector random_big_divisor(Rng& rng, const Model& m, const FuzzSpec& spec) {
    ClassVector D = ClassVector::divisor(RationalVector(m.size()));
    for (auto& x : D.d) x = random_rational(rng, spec.coefficient_range, spec.max_denominator);
    D = gauge_normalize(m, D, GaugeMode::dominate_x0).D;
    Rational c{mpz_class(uniform_int(rng, 0, 2 * spec.max_denominator)), mpz_class(spec.max_denominator)};
    c.canonicalize();
    return D + c * m.zero_fiber();
}

/// Seed-deterministic corpus of surface models and big divisors.
inline std::vector<Instance> generate_corpus(const FuzzSpec& spec) {
    Rng rng(spec.seed);
    std::vector<Instance> out;
    out.reserve(static_cast<std::size_t>(spec.models));
    for (int k = 0; k < spec.models; ++k) {
        Instance inst{random_surface_builder(rng, spec).model(), {}};
        for (int j = 0; j < spec.divisors_per_model; ++j) inst.divisors.push_back(random_big_divisor(rng, inst.model, spec));
        out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallel map over instances with deterministic result order.

inline unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ZEROFIBER_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min(hw, static_cast<unsigned>(v));
    }
    return hw;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), count));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < count; k += workers) fn(k);
        });
    for (auto& t : pool) t.join();
}

/// Runs `per_instance` on every corpus entry and concatenates failures in
/// corpus order. `per_instance(instance, index)` returns (instances checked,
/// failures).
inline CheckReport run_over_corpus(
    const std::string& name, const std::vector<Instance>& corpus,
    const std::function<std::pair<long, std::vector<std::string>>(const Instance&, std::size_t)>& per_instance) {
    std::vector<std::pair<long, std::vector<std::string>>> results(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t k) {
        try {
            results[k] = per_instance(corpus[k], k);
        } catch (const std::exception& e) {
            results[k] = {1, {counterexample(corpus[k].model, corpus[k].model.A(), std::string("exception: ") + e.what())}};
        }
    });
    CheckReport r{name, 0, {}, true, {}};
    for (auto& [count, fails] : results) {
        r.instances += count;
        for (auto& f : fails) r.failures.push_back(std::move(f));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Reference Zariski decomposition by subset enumeration.

inline ZariskiDecomposition zariski_oracle(const Model& m, const ClassVector& beta) {
    if (m.n != 1) throw InputError("zariski_oracle requires n = 1");
    const std::size_t N = m.size();
    if (N > 12) throw InputError("zariski_oracle is limited to 12 components");
    // Pairings through the tensor directly, not through SurfaceForm.
    auto dot = [&m](const ClassVector& x, const ClassVector& y) { return contract(m, {x, y}); };
    const ClassVector b0 = gauge_normalize(m, beta, GaugeMode::dominate_x0).D;
    Matrix gram(N, N);
    RationalVector beta_dot(N);
    for (std::size_t i = 0; i < N; ++i) {
        beta_dot[i] = dot(b0, m.E(i));
        for (std::size_t j = i; j < N; ++j) gram(i, j) = gram(j, i) = dot(m.E(i), m.E(j));
    }

    std::optional<ZariskiDecomposition> found;
    for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
        std::vector<std::size_t> S;
        for (std::size_t i = 0; i < N; ++i)
            if (mask & (1u << i)) S.push_back(i);
        const Matrix G = gram.principal(S);
        RationalVector N_S(N);
        if (!S.empty()) {
            RationalVector rhs(S.size());
            for (std::size_t r = 0; r < S.size(); ++r) rhs[r] = beta_dot[S[r]];
            auto x = solve(G, rhs);
            if (!x) continue;
            bool positive = true;
            for (std::size_t r = 0; r < S.size(); ++r) {
                if ((*x)[r] <= 0) positive = false;
                N_S[S[r]] = (*x)[r];
            }
            if (!positive) continue;
        }
        bool nef_off_support = true;
        for (std::size_t k = 0; k < N && nef_off_support; ++k) {
            if (mask & (1u << k)) continue;
            Rational pk = beta_dot[k];
            for (auto j : S) pk -= N_S[j] * gram(j, k);
            if (pk < 0) nef_off_support = false;
        }
        if (!nef_off_support) continue;
        if (!S.empty() && !is_negative_definite(G)) continue;
        if (found) throw InvariantError("zariski_oracle: more than one admissible support");
        ClassVector P_caller = beta;
        for (std::size_t i = 0; i < N; ++i) P_caller.d[i] -= N_S[i];
        found = ZariskiDecomposition{P_caller, N_S, S};
    }
    if (!found) throw NotBigError("zariski_oracle: no admissible support");
    Rational vol = dot(found->P, found->P);
    if (vol < 0) throw NotBigError("zariski_oracle: class is not big");
    if (vol == 0) throw BoundaryClassError("zariski_oracle: class on the boundary of the big cone");
    return *found;
}

// ---------------------------------------------------------------------------
// Checks.

inline CheckReport check_probability(const std::vector<Instance>& corpus) {
    return run_over_corpus("probability", corpus, [](const Instance& inst, std::size_t) {
        const Model& m = inst.model;
        SurfaceForm form(m);
        std::vector<std::string> fails;
        for (const auto& D : inst.divisors) {
            auto z = zariski(form, D);
            auto rv = restricted_volumes(form, z);
            Rational total = 0;
            for (std::size_t i = 0; i < m.size(); ++i) total += m.components[i].b * rv[i];
            if (total != m.V)
                fails.push_back(counterexample(m, D, "sum b_i rv_i = " + to_string(total) + " != V = " + to_string(m.V)));
            if (ma_big(form, z).total() != 1) fails.push_back(counterexample(m, D, "masses do not sum to 1"));
            for (const auto& x : ma_big(form, z).masses)
                if (x < 0) fails.push_back(counterexample(m, D, "negative mass"));
        }
        return std::pair{static_cast<long>(inst.divisors.size()), fails};
    });
}

/// Σ b_i rv_i against the fiber-side value P·𝒳_0, contracted through the
/// tensor, and against V.
inline CheckReport check_corWN(const Model& m, const std::vector<ClassVector>& betas) {
    CheckReport r{"corWN", 0, {}, true, {}};
    SurfaceForm form(m);
    for (const auto& beta : betas) {
        ++r.instances;
        ZariskiDecomposition z;
        try {
            z = zariski(form, beta);
        } catch (const DomainError& e) {
            r.failures.push_back(counterexample(m, beta, e.what()));
            continue;
        }
        auto rv = restricted_volumes(form, z);
        Rational lhs = 0;
        for (std::size_t i = 0; i < m.size(); ++i) lhs += m.components[i].b * rv[i];
        Rational rhs = contract(m, {z.P, m.zero_fiber()});
        if (lhs != rhs || rhs != beta.s * m.V)
            r.failures.push_back(counterexample(m, beta, "sum b_i rv_i = " + to_string(lhs) + ", P.X0 = " + to_string(rhs)));
    }
    return r;
}

inline CheckReport check_corWN(const std::vector<Instance>& corpus) {
    return run_over_corpus("corWN", corpus, [](const Instance& inst, std::size_t) {
        auto r = check_corWN(inst.model, inst.divisors);
        return std::pair{r.instances, r.failures};
    });
}

inline CheckReport check_orthogonality(const std::vector<Instance>& corpus) {
    return run_over_corpus("orthogonality", corpus, [](const Instance& inst, std::size_t) {
        const Model& m = inst.model;
        SurfaceForm form(m);
        std::vector<std::string> fails;
        for (const auto& D : inst.divisors) {
            if (auto p = orthogonality_pairing(m, D); p != 0)
                fails.push_back(counterexample(m, D, "orthogonality pairing = " + to_string(p)));
            auto z = zariski(form, D);
            auto mu = ma_big(form, z);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (z.N[i] > 0 && mu.masses[i] != 0)
                    fails.push_back(counterexample(m, D, "mass on negative-part component " + m.components[i].name));
            auto env = envelope_values(m, D);
            auto f = pl_vertex_values(m, D);
            for (std::size_t i = 0; i < m.size(); ++i)
                if (mu.masses[i] != 0 && env[i] != f[i])
                    fails.push_back(counterexample(m, D, "mass off the contact set at " + m.components[i].name));
        }
        return std::pair{static_cast<long>(inst.divisors.size()), fails};
    });
}

/// Gauge shifts (random c > 0) and, on Kähler-certified instances, the
/// gradient identity b_i ∂E/∂d_i = masses_i.
inline CheckReport check_gauge(const std::vector<Instance>& corpus, std::uint64_t seed) {
    std::vector<Rational> shifts(corpus.size());
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (auto& c : shifts) {
        c = Rational(mpz_class(uniform_int(rng, 1, 256)), mpz_class(uniform_int(rng, 1, 64)));
        c.canonicalize();
    }
    long certified = 0;
    auto report = run_over_corpus("gauge", corpus, [&shifts](const Instance& inst, std::size_t k) {
        const Model& m = inst.model;
        const Rational& c = shifts[k];
        std::vector<std::string> fails;
        for (const auto& D : inst.divisors) {
            const ClassVector Dc = D + c * m.zero_fiber();
            if (energy(m, Dc) != energy(m, D) + c)
                fails.push_back(counterexample(m, D, "energy(D + c X0) != energy(D) + c for c = " + to_string(c)));
            if (!(ma_big(m, Dc) == ma_big(m, D)))
                fails.push_back(counterexample(m, D, "ma_big not invariant under c = " + to_string(c)));
            if (!kahler_violation(m, D)) {
                auto g = grad_energy(m, D);
                auto mu = ma_big(m, D);
                auto mk = ma_kahler(m, D);
                for (std::size_t i = 0; i < m.size(); ++i)
                    if (m.components[i].b * g[i] != mu.masses[i] || mk.masses[i] != mu.masses[i])
                        fails.push_back(counterexample(m, D, "gradient identity fails at " + m.components[i].name));
            }
        }
        return std::pair{static_cast<long>(inst.divisors.size()), fails};
    });
    for (const auto& inst : corpus)
        for (const auto& D : inst.divisors)
            if (!kahler_violation(inst.model, D)) ++certified;
    report.notes.push_back("gradient identity checked on " + std::to_string(certified) + " Kähler-certified instances");
    return report;
}

struct DerivativeSpec {
    int instances = 50;
    std::vector<Rational> steps{Rational(1, 64), Rational(1, 256)};
};

/// Volume differentiability on big classes and good components:
///   |quotient − 2·rv| ≤ h·C with C the largest chamber coefficient met, and
///   right − q·h = target, left + q·h = target exactly on a step that stays
///   in one chamber.
inline CheckReport check_derivative(const FuzzSpec& spec, const DerivativeSpec& dspec = {}) {
    CheckReport r{"derivative", 0, {}, true, {}};
    Rng rng(spec.seed ^ 0xd1b54a32d192ed03ULL);
    long skipped_not_good = 0, skipped_big = 0, chamber_exact = 0, multi_chamber = 0;
    for (int attempts = 0; r.instances < dspec.instances && attempts < 100 * dspec.instances; ++attempts) {
        const Model m = random_surface_builder(rng, spec).model();
        ClassVector beta = random_big_divisor(rng, m, spec);
        const auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(m.size()) - 1));
        SurfaceForm form(m);
        if (attempts % 2 == 1) {
            // Park β at distance h/3 from a chamber wall along E_i.
            const Rational offset = dspec.steps.front() / 3;
            Chamber ch = chamber_along(form, beta, i, 0);
            if (ch.upper)
                beta.d[i] += *ch.upper - offset;
            else if (ch.lower)
                beta.d[i] += *ch.lower + offset;
            try {
                zariski(form, beta);
            } catch (const NotBigError&) {
                ++skipped_big;
                continue;
            }
        }
        if (classify_components(m, beta)[i] == ComponentStatus::in_enk_not_enn) {
            ++skipped_not_good;
            continue;
        }
        std::vector<std::string> fails;
        bool usable = true;
        for (const auto& h : dspec.steps) {
            DerivativeCheck dc;
            CurvatureBound cb;
            try {
                dc = volume_derivative_check(m, beta, i, h);
                cb = curvature_bound(m, beta, i, h);
            } catch (const DomainError&) {
                usable = false;
                break;
            }
            if (!cb.single_chamber) ++multi_chamber;
            if (dc.right_error() > h * cb.C || dc.left_error() > h * cb.C)
                fails.push_back(counterexample(m, beta, "component " + std::to_string(i) + ", h = " + to_string(h) +
                                                            ": quotient error exceeds h*C = " + to_string(h * cb.C)));
            // Exact one-sided slopes on steps inside a single chamber.
            for (int side : {1, -1}) {
                Rational hs = h;
                for (int k = 0; k < 64; ++k, hs /= 2) {
                    Chamber ch = chamber_along(form, beta, i, side * hs);
                    bool covers = side > 0 ? (!ch.lower || *ch.lower <= 0) : (!ch.upper || *ch.upper >= 0);
                    if (!covers) continue;
                    auto exact = volume_derivative_check(m, beta, i, hs);
                    Rational slope = side > 0 ? Rational(exact.right - ch.q * hs) : Rational(exact.left + ch.q * hs);
                    if (slope != exact.target)
                        fails.push_back(counterexample(m, beta, "component " + std::to_string(i) +
                                                                    ": chamber-corrected slope " + to_string(slope) +
                                                                    " != " + to_string(exact.target)));
                    ++chamber_exact;
                    break;
                }
            }
        }
        if (!usable) {
            ++skipped_big;
            continue;
        }
        ++r.instances;
        for (auto& f : fails) r.failures.push_back(std::move(f));
    }
    r.exact = false;
    r.notes.push_back("skipped " + std::to_string(skipped_not_good) + " non-good components, " +
                      std::to_string(skipped_big) + " steps leaving the big cone");
    r.notes.push_back(std::to_string(chamber_exact) + " exact chamber-corrected slopes, " +
                      std::to_string(multi_chamber) + " steps crossing a chamber wall");
    if (r.instances < dspec.instances) r.failures.push_back(io::Json{{"what", "too few usable instances"}}.dump());
    return r;
}

inline CheckReport check_oracle(const std::vector<Instance>& corpus) {
    return run_over_corpus("oracle", corpus, [](const Instance& inst, std::size_t) {
        std::vector<std::string> fails;
        long count = 0;
        if (inst.model.size() > 12) return std::pair{count, fails};
        for (const auto& D : inst.divisors) {
            ++count;
            auto engine = zariski(inst.model, D);
            auto oracle = zariski_oracle(inst.model, D);
            if (!(engine == oracle)) fails.push_back(counterexample(inst.model, D, "engine and oracle disagree"));
        }
        return std::pair{count, fails};
    });
}

/// Calibration and boundary preservation of the simplex map at the
/// vertices; the inequalities are recomputed through the tensor.
inline CheckReport check_calibration(const std::vector<Instance>& corpus, const Rational& t_cap = default_t_cap()) {
    return run_over_corpus("calibration", corpus, [&t_cap](const Instance& inst, std::size_t) {
        const Model& m = inst.model;
        std::vector<std::string> fails;
        auto fam = build_calibrated_divisors(m, t_cap);
        if (fam.t0 > t_cap) fails.push_back(counterexample(m, m.A(), "t0 above cap"));
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::size_t k = 0; k < m.size(); ++k)
                if (k != i && contract(m, {fam.D[i], m.E(k)}) >= 0)
                    fails.push_back(counterexample(m, fam.D[i], "(A+D_i).E_k >= 0 for k = " + std::to_string(k)));
            RationalVector a(m.size());
            a[i] = 1;
            auto f = simplex_map(m, fam, a);
            for (std::size_t j = 0; j < m.size(); ++j)
                if (j != i && f.masses[j] != 0)
                    fails.push_back(counterexample(m, fam.D[i], "simplex map vertex leaks mass to " + std::to_string(j)));
        }
        return std::pair{1L, fails};
    });
}

/// Deformation to the normal cone of a line in ℙ¹×ℙ¹ (n = 2, V = 2):
/// A²E_1 = 2, E_1³ = −1, E_1²E_2 = 1, E_1E_2² = −1, E_2³ = 1, with the
/// curves of the two components.
inline Model normal_cone_model() {
    Model m;
    m.n = 2;
    m.V = 2;
    m.components = {{"E1", 1}, {"E2", 1}};
    m.tensor = IntersectionTensor(3);
    m.tensor.set({kA, kA, 1}, 2);
    m.tensor.set({1, 1, 1}, -1);
    m.tensor.set({1, 1, 2}, 1);
    m.tensor.set({1, 2, 2}, -1);
    m.tensor.set({2, 2, 2}, 1);
    m.faces = {{0}, {1}, {0, 1}};
    m.curves = {{"l", {0, 1, -1}}, {"R1", {1, -1, 1}}, {"R2", {1, -1, 1}}, {"R3", {0, 0, 1}}};
    require_valid(m);
    return m;
}

/// Normal-cone example on ℙ¹×ℙ¹: D = 𝒳_0 − eE_2 has masses (1 − e²/2, e²/2)
/// for e = k/steps, 0 < k < steps.
inline CheckReport check_kahler_region(const Model& m2, int steps = 100) {
    CheckReport r{"kahler-region", 0, {}, true, {}};
    for (int k = 1; k < steps; ++k) {
        Rational e{mpz_class(k), mpz_class(steps)};
        e.canonicalize();
        ClassVector D = m2.zero_fiber() - e * m2.E(1);
        D.s = 1;
        ++r.instances;
        try {
            auto mu = ma_kahler(m2, D);
            Rational half = e * e / 2;
            if (mu.masses[0] != 1 - half || mu.masses[1] != half || mu.total() != 1)
                r.failures.push_back(counterexample(m2, D, "masses differ from (1 - e^2/2, e^2/2)"));
        } catch (const NotKahlerError& err) {
            r.failures.push_back(counterexample(m2, D, err.what()));
        }
    }
    return r;
}

}  // namespace zerofiber::verify
