#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zerofiber/linalg.hpp"
#include "zerofiber/model.hpp"

namespace zerofiber {

/// Multilinear extension of the tensor evaluated on n+1 classes.
inline Rational contract(const Model& m, const std::vector<ClassVector>& classes) {
    if (static_cast<int>(classes.size()) != m.n + 1)
        throw StructuralError("contract expects " + std::to_string(m.n + 1) + " classes, got " +
                              std::to_string(classes.size()));
    for (const auto& c : classes)
        if (c.size() != m.size()) throw StructuralError("class vector length does not match model");

    Rational total = 0;
    IntersectionTensor::Key perm;
    for (const auto& [key, value] : m.tensor.entries()) {
        // Distinct orderings of the multiset, each assigning key slots to
        // argument slots.
        perm = key;
        Rational acc = 0;
        do {
            Rational term = 1;
            for (std::size_t slot = 0; slot < perm.size() && term != 0; ++slot)
                term *= classes[slot].coeff(perm[slot]);
            acc += term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        total += value * acc;
    }
    return total;
}

/// (c)^k · rest, with rest appended after k copies of c.
inline Rational power_times(const Model& m, const ClassVector& c, int k, const std::vector<ClassVector>& rest) {
    std::vector<ClassVector> args(static_cast<std::size_t>(k), c);
    args.insert(args.end(), rest.begin(), rest.end());
    return contract(m, args);
}

/// One failed validity identity.
struct Violation {
    std::string identity;             // "(a)", "(b)", "(c)" or "(d)"
    std::vector<BasisIndex> gamma;    // basis multiset the identity was tested on
    Rational expected;
    Rational actual;

    std::string describe(const Model& m) const {
        std::string g;
        for (auto k : gamma) {
            if (!g.empty()) g += ".";
            g += m.basis_name(k);
        }
        return identity + " gamma={" + g + "}: expected " + to_string(expected) + ", got " + to_string(actual);
    }
};
using ValidationReport = std::vector<Violation>;

namespace detail {

inline void for_each_multiset(int size, int alphabet, const std::function<void(const std::vector<BasisIndex>&)>& fn) {
    std::vector<BasisIndex> cur(static_cast<std::size_t>(size), 0);
    if (size == 0) {
        fn(cur);
        return;
    }
    while (true) {
        fn(cur);
        int pos = size - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == alphabet - 1) --pos;
        if (pos < 0) return;
        BasisIndex v = cur[static_cast<std::size_t>(pos)] + 1;
        for (int k = pos; k < size; ++k) cur[static_cast<std::size_t>(k)] = v;
    }
}

}  // namespace detail

/// Checks the fiber identities 𝒳_0 ≡ X_1:
///  (a) 𝒳_0·γ = 0 for every basis multiset γ of size n containing a
///      vertical component (implies 𝒳_0·𝒳_0·γ' = 0 for |γ'| = n−1),
///  (b) 𝒳_0·A^n = V,
///  (c) A^{n+1} = 0,
///  (d) b_i > 0.
/// Returns the violated identities; empty means valid.
inline ValidationReport validate_model(const Model& m) {
    check_structure(m);
    ValidationReport report;
    const ClassVector x0 = m.zero_fiber();
    const int basis = static_cast<int>(m.basis_size());
    detail::for_each_multiset(m.n, basis, [&](const std::vector<BasisIndex>& gamma) {
        std::vector<ClassVector> args{x0};
        bool all_a = true;
        for (auto k : gamma) {
            args.push_back(k == kA ? m.A() : m.E(static_cast<std::size_t>(k - 1)));
            all_a = all_a && k == kA;
        }
        Rational got = contract(m, args);
        Rational want = all_a ? m.V : Rational(0);
        if (got != want) report.push_back({all_a ? "(b)" : "(a)", gamma, want, got});
    });
    Rational top = m.tensor.get(IntersectionTensor::Key(static_cast<std::size_t>(m.n + 1), kA));
    if (top != 0) report.push_back({"(c)", IntersectionTensor::Key(static_cast<std::size_t>(m.n + 1), kA), 0, top});
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.components[i].b <= 0) report.push_back({"(d)", {basis_of(i)}, 1, m.components[i].b});
    return report;
}

inline void require_valid(const Model& m) {
    auto report = validate_model(m);
    if (!report.empty()) throw StructuralError("invalid model: " + report.front().describe(m));
}

/// E_A(φ_D) = V^{-1} (A+D)^{n+1} / (n+1).
inline Rational energy(const Model& m, const ClassVector& D) {
    return power_times(m, D, m.n + 1, {}) / (m.V * (m.n + 1));
}

/// ∂E/∂d_i = V^{-1} (A+D)^n · E_i.
inline RationalVector grad_energy(const Model& m, const ClassVector& D) {
    RationalVector g(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) g[i] = power_times(m, D, m.n, {m.E(i)}) / m.V;
    return g;
}

/// ∂²E/∂d_i∂d_j = V^{-1} n (A+D)^{n-1} · E_i · E_j.
inline Matrix hessian_energy(const Model& m, const ClassVector& D) {
    Matrix h(m.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i; j < m.size(); ++j) {
            Rational v = power_times(m, D, m.n - 1, {m.E(i), m.E(j)}) * m.n / m.V;
            h(i, j) = v;
            h(j, i) = v;
        }
    return h;
}

/// Intersection number of a class with a catalog curve.
inline Rational pair_with_curve(const ClassVector& c, const Curve& curve) {
    Rational r = c.s * curve.pairing.at(0);
    for (std::size_t i = 0; i < c.d.size(); ++i) r += c.d[i] * curve.pairing.at(i + 1);
    return r;
}

enum class CurveScope {
    all,       // every catalog curve, as given
    vertical,  // only curves with 𝒳_0·C = 0; the rest are fixed by a gauge shift
};

/// First failed positivity condition for A+D being relatively Kähler with
/// respect to the declared catalog, or nullopt if all pass.
inline std::optional<std::string> kahler_violation(const Model& m, const ClassVector& D,
                                                   CurveScope scope = CurveScope::all) {
    const ClassVector x0 = m.zero_fiber();
    for (const auto& curve : m.curves) {
        if (scope == CurveScope::vertical && pair_with_curve(x0, curve) != 0) continue;
        Rational p = pair_with_curve(D, curve);
        if (p <= 0) return "(A+D)." + curve.name + " = " + to_string(p);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        Rational p = power_times(m, D, m.n, {m.E(i)});
        if (p <= 0) return "(A+D)^" + std::to_string(m.n) + "." + m.components[i].name + " = " + to_string(p);
    }
    return std::nullopt;
}

/// Monge-Ampère measure of a Kähler test configuration:
/// masses_i = V^{-1} b_i (A+D)^n · E_i.
inline DivisorialMeasure ma_kahler(const Model& m, const ClassVector& D) {
    if (D.s != 1) throw InputError("ma_kahler expects a class A + D (s = 1)");
    if (auto bad = kahler_violation(m, D))
        throw NotKahlerError("not relatively Kähler w.r.t. declared catalog: " + *bad, *bad);
    DivisorialMeasure mu{RationalVector(m.size())};
    for (std::size_t i = 0; i < m.size(); ++i)
        mu.masses[i] = m.components[i].b * power_times(m, D, m.n, {m.E(i)}) / m.V;
    return mu;
}

/// Value of the PL function f_D at the point of the face simplex
/// Δ_Z = {w ≥ 0, Σ w_i b_i ≤ 1} with weights w (ordered as `face`).
inline Rational eval_pl(const Model& m, const ClassVector& D, const std::vector<std::size_t>& face,
                        const RationalVector& w) {
    if (!m.has_face(face)) throw InputError("not a face of the dual complex");
    if (w.size() != face.size()) throw InputError("weight vector length does not match face");
    Rational weighted = 0;
    Rational value = 0;
    for (std::size_t k = 0; k < face.size(); ++k) {
        if (w[k] < 0) throw InputError("weights must be nonnegative");
        weighted += w[k] * m.components.at(face[k]).b;
        value += w[k] * D.d.at(face[k]);
    }
    if (weighted > 1) throw InputError("weights outside the face simplex");
    return value;
}

/// Vertex values f_D(v_{E_i}) = d_i / b_i.
inline RationalVector pl_vertex_values(const Model& m, const ClassVector& D) {
    RationalVector v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = D.d.at(i) / m.components[i].b;
    return v;
}

enum class GaugeMode { min_zero, dominate_x0 };

struct GaugeShift {
    ClassVector D;
    Rational c;  // D_out = D_in + c·𝒳_0
};

/// Adds c·𝒳_0: min_zero makes min_i d_i/b_i = 0; dominate_x0 picks the
/// least c with D + c𝒳_0 ≥ 𝒳_0.
inline GaugeShift gauge_normalize(const Model& m, const ClassVector& D, GaugeMode mode) {
    if (D.size() != m.size()) throw StructuralError("divisor length does not match model");
    auto ratios = pl_vertex_values(m, D);
    Rational c;
    if (mode == GaugeMode::min_zero) {
        c = -*std::min_element(ratios.begin(), ratios.end());
    } else {
        c = 1 - *std::min_element(ratios.begin(), ratios.end());
    }
    return {D + c * m.zero_fiber(), c};
}

}  // namespace zerofiber
