#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "zerofiber/intersection.hpp"
#include "zerofiber/linalg.hpp"

namespace zerofiber {

// ---------------------------------------------------------------------------
// Gram form of a surface model (n = 1): the tensor as a symmetric matrix on
// the basis {A, E_1..E_N}.

class SurfaceForm {
  public:
    explicit SurfaceForm(const Model& m) : model_(&m), gram_(m.basis_size(), m.basis_size()) {
        if (m.n != 1) throw InputError("surface engine requires n = 1 (got n = " + std::to_string(m.n) + ")");
        for (const auto& [key, value] : m.tensor.entries()) {
            auto r = static_cast<std::size_t>(key[0]);
            auto c = static_cast<std::size_t>(key[1]);
            gram_(r, c) = value;
            gram_(c, r) = value;
        }
    }

    const Model& model() const { return *model_; }
    const Matrix& gram() const { return gram_; }

    Rational pair(const ClassVector& x, const ClassVector& y) const {
        Rational r = 0;
        const std::size_t n = gram_.rows();
        for (std::size_t i = 0; i < n; ++i) {
            const Rational& xi = x.coeff(static_cast<BasisIndex>(i));
            if (xi == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const Rational& g = gram_(i, j);
                if (g != 0) r += xi * g * y.coeff(static_cast<BasisIndex>(j));
            }
        }
        return r;
    }

    /// x · E_i.
    Rational pair_component(const ClassVector& x, std::size_t i) const {
        Rational r = 0;
        const std::size_t col = i + 1;
        for (std::size_t k = 0; k < gram_.rows(); ++k) {
            const Rational& g = gram_(k, col);
            if (g != 0) r += x.coeff(static_cast<BasisIndex>(k)) * g;
        }
        return r;
    }

    /// E_i · E_j.
    const Rational& component_pair(std::size_t i, std::size_t j) const { return gram_(i + 1, j + 1); }

    /// Gram matrix of the vertical components on `idx`.
    Matrix vertical_gram(const std::vector<std::size_t>& idx) const {
        Matrix g(idx.size(), idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < idx.size(); ++c) g(r, c) = component_pair(idx[r], idx[c]);
        return g;
    }

  private:
    const Model* model_;
    Matrix gram_;
};

// ---------------------------------------------------------------------------
// Blow-up builder.

/// A curve {x}×ℙ¹ tracked through blow-ups; its self-intersection is not
/// part of the basis so it is carried separately.
struct HorizontalSection {
    std::string name;
    RationalVector pairing;  // against A, E_1..E_N
    Rational self = 0;
    bool operator==(const HorizontalSection&) const = default;
};

struct BlowupStep {
    enum class Kind { interior, intersection, on_section };
    Kind kind = Kind::interior;
    std::size_t i = 0;        // component (interior, on_section) or first component (intersection)
    std::size_t j = 0;        // second component (intersection)
    std::size_t section = 0;  // section id (on_section)
    std::size_t result = 0;   // filled in by the builder: id of the new component

    static BlowupStep interior(std::size_t i) { return {Kind::interior, i, 0, 0, 0}; }
    static BlowupStep intersection(std::size_t i, std::size_t j) { return {Kind::intersection, i, j, 0, 0}; }
    static BlowupStep on_section(std::size_t section, std::size_t i) { return {Kind::on_section, i, 0, section, 0}; }

    bool operator==(const BlowupStep&) const = default;
};

inline std::string to_string(BlowupStep::Kind k) {
    switch (k) {
        case BlowupStep::Kind::interior: return "interior";
        case BlowupStep::Kind::intersection: return "intersection";
        case BlowupStep::Kind::on_section: return "on-section";
    }
    return "?";
}

/// Surface models obtained from X×ℙ¹ (X a curve of volume V) by blowing up
/// points of the zero fiber. Single-owner and mutable; model() hands out the
/// current immutable snapshot.
class SurfaceBuilder {
  public:
    static SurfaceBuilder trivial(const Rational& V) {
        if (V <= 0) throw InputError("trivial model needs V > 0");
        SurfaceBuilder b;
        b.model_.n = 1;
        b.model_.V = V;
        b.model_.tensor = IntersectionTensor(2);
        b.model_.components.push_back({"E1", 1});
        b.model_.tensor.set({kA, 1}, V);
        b.model_.faces = {{0}};
        return b;
    }

    const Model& model() const { return model_; }
    const std::vector<BlowupStep>& log() const { return log_; }
    const std::vector<HorizontalSection>& sections() const { return sections_; }

    /// The component mapping onto X (the only one with A·E_i = V).
    std::size_t dominant_component() const {
        for (std::size_t i = 0; i < model_.size(); ++i)
            if (model_.tensor.get({kA, basis_of(i)}) != 0) return i;
        throw InvariantError("no dominant component");
    }

    /// Adds a horizontal section {x}×ℙ¹ through a general point x; it meets
    /// the dominant component once and nothing else. Returns its id.
    std::size_t add_section(std::string name) {
        for (const auto& s : sections_)
            if (s.name == name) throw InputError("duplicate section name '" + name + "'");
        for (const auto& c : model_.components)
            if (c.name == name) throw InputError("section name clashes with component '" + name + "'");
        HorizontalSection s{std::move(name), RationalVector(model_.basis_size()), 0};
        s.pairing[static_cast<std::size_t>(basis_of(dominant_component()))] = 1;
        sections_.push_back(std::move(s));
        sync_curves();
        return sections_.size() - 1;
    }

    /// Applies one blow-up and returns the id of the exceptional component.
    std::size_t apply(BlowupStep step) {
        const std::size_t N = model_.size();
        auto check_component = [N](std::size_t k) {
            if (k >= N) throw InputError("blow-up center refers to unknown component " + std::to_string(k));
        };
        const std::size_t f = N;
        const BasisIndex F = basis_of(f);
        auto& t = model_.tensor;

        switch (step.kind) {
            case BlowupStep::Kind::interior:
            case BlowupStep::Kind::on_section: {
                check_component(step.i);
                if (step.kind == BlowupStep::Kind::on_section) {
                    if (step.section >= sections_.size())
                        throw InputError("unknown section " + std::to_string(step.section));
                    const auto& s = sections_[step.section];
                    if (s.pairing[static_cast<std::size_t>(basis_of(step.i))] != 1 || model_.components[step.i].b != 1)
                        throw InputError("section '" + s.name + "' does not cross component " +
                                         model_.components[step.i].name + " transversally");
                }
                const BasisIndex I = basis_of(step.i);
                add_component(model_.components[step.i].b);
                t.set({F, F}, -1);
                t.add({I, I}, -1);
                t.set({I, F}, 1);
                model_.faces.push_back({f});
                model_.faces.push_back({step.i, f});
                if (step.kind == BlowupStep::Kind::on_section) {
                    auto& s = sections_[step.section];
                    s.pairing[static_cast<std::size_t>(I)] -= 1;
                    s.pairing[static_cast<std::size_t>(F)] = 1;
                    s.self -= 1;
                }
                break;
            }
            case BlowupStep::Kind::intersection: {
                check_component(step.i);
                check_component(step.j);
                if (step.i == step.j) throw InputError("intersection blow-up needs two distinct components");
                const BasisIndex I = basis_of(step.i), J = basis_of(step.j);
                if (t.get({I, J}) != 1 || !model_.has_face({step.i, step.j}))
                    throw InputError("components " + model_.components[step.i].name + " and " +
                                     model_.components[step.j].name + " do not cross transversally");
                add_component(model_.components[step.i].b + model_.components[step.j].b);
                t.set({F, F}, -1);
                t.add({I, I}, -1);
                t.add({J, J}, -1);
                t.set({I, J}, 0);
                t.set({I, F}, 1);
                t.set({J, F}, 1);
                std::vector<std::size_t> edge{std::min(step.i, step.j), std::max(step.i, step.j)};
                std::erase_if(model_.faces, [&edge](std::vector<std::size_t> face) {
                    std::sort(face.begin(), face.end());
                    return face == edge;
                });
                model_.faces.push_back({f});
                model_.faces.push_back({step.i, f});
                model_.faces.push_back({step.j, f});
                break;
            }
        }
        sync_curves();
        step.result = f;
        log_.push_back(step);
        if (auto report = validate_model(model_); !report.empty())
            throw InvariantError("blow-up produced an invalid model: " + report.front().describe(model_));
        return f;
    }

  private:
    SurfaceBuilder() = default;

    void add_component(const Rational& b) {
        model_.components.push_back({"E" + std::to_string(model_.size() + 1), b});
        for (auto& s : sections_) s.pairing.push_back(0);
    }

    void sync_curves() {
        model_.curves.clear();
        for (const auto& s : sections_) model_.curves.push_back({s.name, s.pairing});
    }

    Model model_;
    std::vector<BlowupStep> log_;
    std::vector<HorizontalSection> sections_;
};

inline SurfaceBuilder trivial_model(const Rational& V) { return SurfaceBuilder::trivial(V); }

inline SurfaceBuilder blowup(SurfaceBuilder b, BlowupStep step) {
    b.apply(step);
    return b;
}

// ---------------------------------------------------------------------------
// Zariski decomposition and the quantities derived from it.

struct ZariskiDecomposition {
    ClassVector P;
    RationalVector N;
    std::vector<std::size_t> support;
    bool operator==(const ZariskiDecomposition&) const = default;
};

class BoundaryClassError : public NotBigError {
  public:
    using NotBigError::NotBigError;
};

namespace detail {

inline std::vector<std::size_t> support_of(const RationalVector& N) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < N.size(); ++i)
        if (N[i] > 0) s.push_back(i);
    return s;
}

/// Solves (β − Σ_{j∈S} N_j E_j)·E_k = 0 for k ∈ S.
inline std::optional<RationalVector> negative_part_on(const SurfaceForm& form, const ClassVector& beta,
                                                      const std::vector<std::size_t>& S) {
    RationalVector N(form.model().size());
    if (S.empty()) return N;
    RationalVector rhs(S.size());
    for (std::size_t r = 0; r < S.size(); ++r) rhs[r] = form.pair_component(beta, S[r]);
    auto x = solve(form.vertical_gram(S), rhs);
    if (!x) return std::nullopt;
    for (std::size_t r = 0; r < S.size(); ++r) N[S[r]] = (*x)[r];
    return N;
}

inline ClassVector subtract_vertical(ClassVector beta, const RationalVector& N) {
    for (std::size_t i = 0; i < N.size(); ++i) beta.d[i] -= N[i];
    return beta;
}

inline void certify_big(const SurfaceForm& form, const ClassVector& P) {
    Rational vol = form.pair(P, P);
    if (vol < 0) throw NotBigError("class is not big (P·P = " + to_string(vol) + " < 0)");
    if (vol == 0) throw BoundaryClassError("class lies on the boundary of the big cone (P·P = 0)");
}

}  // namespace detail

/// Zariski decomposition β = P + N with N supported on vertical components.
/// Negative-locus enlargement: all currently negative components join the
/// support at once, then N is re-solved on the support.
inline ZariskiDecomposition zariski(const SurfaceForm& form, const ClassVector& beta) {
    const Model& m = form.model();
    if (beta.size() != m.size()) throw StructuralError("class length does not match model");
    // N does not depend on the 𝒳_0-gauge since 𝒳_0·E_k = 0; the loop runs in
    // the D ≥ 𝒳_0 gauge where the non-Kähler locus is vertical.
    const ClassVector normalized = gauge_normalize(m, beta, GaugeMode::dominate_x0).D;

    std::vector<std::size_t> S;
    RationalVector N(m.size());
    for (std::size_t round = 0; round <= m.size(); ++round) {
        auto solved = detail::negative_part_on(form, normalized, S);
        if (!solved) throw InvariantError("singular Gram matrix on the negative support");
        N = std::move(*solved);
        const ClassVector P = detail::subtract_vertical(normalized, N);
        std::vector<std::size_t> negative;
        for (std::size_t k = 0; k < m.size(); ++k)
            if (!std::binary_search(S.begin(), S.end(), k) && form.pair_component(P, k) < 0) negative.push_back(k);
        if (negative.empty()) break;
        S.insert(S.end(), negative.begin(), negative.end());
        std::sort(S.begin(), S.end());
        if (S.size() == m.size()) throw NotBigError("negative support grew to the whole fiber");
    }
    for (const auto& x : N)
        if (x < 0) throw InvariantError("negative part has a negative coefficient");
    if (!S.empty() && !is_negative_definite(form.vertical_gram(S)))
        throw InvariantError("negative support Gram matrix is not negative definite");

    ZariskiDecomposition z{detail::subtract_vertical(beta, N), N, detail::support_of(N)};
    detail::certify_big(form, z.P);
    return z;
}

inline ZariskiDecomposition zariski(const Model& m, const ClassVector& beta) { return zariski(SurfaceForm(m), beta); }

/// vol(β) = P·P.
inline Rational volume(const SurfaceForm& form, const ClassVector& beta) {
    auto z = zariski(form, beta);
    return form.pair(z.P, z.P);
}
inline Rational volume(const Model& m, const ClassVector& beta) { return volume(SurfaceForm(m), beta); }

/// ⟨β⟩_{𝒳|E_i}: zero on the non-nef locus, P·E_i elsewhere.
inline Rational restricted_volume(const SurfaceForm& form, const ZariskiDecomposition& z, std::size_t i) {
    if (z.N.at(i) > 0) return 0;
    return form.pair_component(z.P, i);
}

inline Rational restricted_volume(const Model& m, const ClassVector& beta, std::size_t i) {
    SurfaceForm form(m);
    if (i >= m.size()) throw InputError("component index out of range");
    return restricted_volume(form, zariski(form, beta), i);
}

inline RationalVector restricted_volumes(const SurfaceForm& form, const ZariskiDecomposition& z) {
    RationalVector rv(form.model().size());
    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = restricted_volume(form, z, i);
    return rv;
}

/// Generic Lelong numbers ν_{E_i}(β) = N_i (divisor scale of E_i).
inline RationalVector lelong(const Model& m, const ClassVector& beta) { return zariski(m, beta).N; }

/// Big-case Monge-Ampère measure from a precomputed decomposition.
inline DivisorialMeasure ma_big(const SurfaceForm& form, const ZariskiDecomposition& z) {
    const Model& m = form.model();
    DivisorialMeasure mu{RationalVector(m.size())};
    for (std::size_t i = 0; i < m.size(); ++i)
        mu.masses[i] = m.components[i].b * restricted_volume(form, z, i) / m.V;
    return mu;
}

/// masses_i = V^{-1} b_i ⟨(A+D)⟩_{𝒳|E_i}.
inline DivisorialMeasure ma_big(const SurfaceForm& form, const ClassVector& D) {
    if (D.s != 1) throw InputError("ma_big expects a class A + D (s = 1)");
    return ma_big(form, zariski(form, D));
}
inline DivisorialMeasure ma_big(const Model& m, const ClassVector& D) { return ma_big(SurfaceForm(m), D); }

/// P_A(f_D)(v_{E_i}) = (d_i − ν_{E_i}) / b_i.
inline RationalVector envelope_values(const Model& m, const ClassVector& D) {
    auto z = zariski(m, D);
    RationalVector v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = (D.d[i] - z.N[i]) / m.components[i].b;
    return v;
}

/// ∫ (f_D − P_A(f_D)) MA(P_A(f_D)) evaluated on the divisorial atoms.
inline Rational orthogonality_pairing(const Model& m, const ClassVector& D) {
    SurfaceForm form(m);
    auto z = zariski(form, D);
    auto mu = ma_big(form, z);
    Rational total = 0;
    for (std::size_t i = 0; i < m.size(); ++i) total += (z.N[i] / m.components[i].b) * mu.masses[i];
    return total;
}

enum class ComponentStatus { kahler_locus, in_enk_not_enn, in_enn };

inline std::string to_string(ComponentStatus s) {
    switch (s) {
        case ComponentStatus::kahler_locus: return "kahler-locus";
        case ComponentStatus::in_enk_not_enn: return "in-EnK-not-Enn";
        case ComponentStatus::in_enn: return "in-Enn";
    }
    return "?";
}

inline std::vector<ComponentStatus> classify_components(const SurfaceForm& form, const ZariskiDecomposition& z) {
    std::vector<ComponentStatus> out(form.model().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (z.N[i] > 0)
            out[i] = ComponentStatus::in_enn;
        else if (form.pair_component(z.P, i) == 0)
            out[i] = ComponentStatus::in_enk_not_enn;
        else
            out[i] = ComponentStatus::kahler_locus;
    }
    return out;
}

inline std::vector<ComponentStatus> classify_components(const Model& m, const ClassVector& beta) {
    SurfaceForm form(m);
    return classify_components(form, zariski(form, beta));
}

// ---------------------------------------------------------------------------
// Volume along a divisorial direction: vol(β + tE_i) is a C¹ piecewise
// quadratic in t. Inside the chamber with negative support S,
//   vol(β + tE_i) = vol(β) + 2t·⟨β⟩_{𝒳|E_i} + q t²,  q = (E_i − Σ_S ν_j E_j)²
// where ν solves Gram_S ν = (E_i·E_j)_{j∈S}.

struct Chamber {
    std::vector<std::size_t> support;
    Rational q;  // quadratic coefficient
    std::optional<Rational> lower;  // nullopt: unbounded
    std::optional<Rational> upper;
};

/// Chamber of the line t ↦ β + tE_i that contains the parameter t, with the
/// exact extent on which its quadratic formula holds.
inline Chamber chamber_along(const SurfaceForm& form, const ClassVector& beta, std::size_t i, const Rational& t) {
    const Model& m = form.model();
    ClassVector bt = beta;
    bt.d.at(i) += t;
    auto z = zariski(form, bt);
    const auto& S = z.support;

    RationalVector nu(m.size());
    if (!S.empty()) {
        RationalVector rhs(S.size());
        for (std::size_t r = 0; r < S.size(); ++r) rhs[r] = form.component_pair(i, S[r]);
        auto x = solve(form.vertical_gram(S), rhs);
        if (!x) throw InvariantError("singular Gram matrix on chamber support");
        for (std::size_t r = 0; r < S.size(); ++r) nu[S[r]] = (*x)[r];
    }
    ClassVector dir = m.E(i);
    for (std::size_t j = 0; j < m.size(); ++j) dir.d[j] -= nu[j];

    Chamber ch{S, form.pair(dir, dir), std::nullopt, std::nullopt};
    // Constraints value + s·slope ≥ 0 for the offset s from t.
    auto clamp_by = [&ch, &t](const Rational& value, const Rational& slope) {
        if (slope == 0) return;
        Rational bound = t - value / slope;
        if (slope < 0) {
            if (!ch.upper || bound < *ch.upper) ch.upper = bound;
        } else {
            if (!ch.lower || bound > *ch.lower) ch.lower = bound;
        }
    };
    for (auto j : S) clamp_by(z.N[j], nu[j]);
    for (std::size_t k = 0; k < m.size(); ++k)
        if (!std::binary_search(S.begin(), S.end(), k)) clamp_by(form.pair_component(z.P, k), form.pair_component(dir, k));
    return ch;
}

struct CurvatureBound {
    Rational C;               // max |q| over chambers met on [−h, h]
    bool single_chamber;      // [−h, h] lies in the chamber of t = 0
    Rational q0;              // quadratic coefficient of that chamber
};

namespace detail {

/// max |q| over the chambers met when moving t from 0 to `end`.
inline Rational walk_chambers(const SurfaceForm& form, const ClassVector& beta, std::size_t i, const Rational& end) {
    Rational best = 0;
    Rational t = 0;
    const bool forward = end > 0;
    auto reached = [&](const Rational& x) { return forward ? x >= end : x <= end; };
    while (!reached(t)) {
        Rational probe = end;
        Chamber ch;
        for (int halvings = 0;; ++halvings) {
            if (halvings > 4096) throw InvariantError("chamber walk did not make progress");
            ch = chamber_along(form, beta, i, probe);
            bool covers_t = forward ? (!ch.lower || *ch.lower <= t) : (!ch.upper || *ch.upper >= t);
            if (covers_t) break;
            probe = t + (probe - t) / 2;
        }
        best = std::max(best, abs(ch.q));
        if (forward)
            t = ch.upper ? std::min<Rational>(*ch.upper, end) : end;
        else
            t = ch.lower ? std::max<Rational>(*ch.lower, end) : end;
    }
    return best;
}

}  // namespace detail

inline CurvatureBound curvature_bound(const Model& m, const ClassVector& beta, std::size_t i, const Rational& h) {
    if (h <= 0) throw InputError("step h must be positive");
    SurfaceForm form(m);
    Chamber c0 = chamber_along(form, beta, i, 0);
    Rational C = std::max(detail::walk_chambers(form, beta, i, h), detail::walk_chambers(form, beta, i, -h));
    bool single = (!c0.lower || *c0.lower <= -h) && (!c0.upper || *c0.upper >= h);
    return {C, single, c0.q};
}

struct DerivativeCheck {
    Rational left;    // (vol(β) − vol(β − hE_i)) / h
    Rational right;   // (vol(β + hE_i) − vol(β)) / h
    Rational target;  // (n+1)·⟨β⟩_{𝒳|E_i}, n+1 = dim 𝒳 = 2
    Rational left_error() const { return abs(left - target); }
    Rational right_error() const { return abs(right - target); }
};

/// One-sided difference quotients of the volume in the direction E_i
/// against the restricted-volume derivative formula. The caller picks h.
inline DerivativeCheck volume_derivative_check(const Model& m, const ClassVector& beta, std::size_t i,
                                               const Rational& h, bool allow_not_good = false) {
    if (h <= 0) throw InputError("step h must be positive");
    if (i >= m.size()) throw InputError("component index out of range");
    SurfaceForm form(m);
    auto z = zariski(form, beta);
    if (!allow_not_good && classify_components(form, z)[i] == ComponentStatus::in_enk_not_enn)
        throw DomainError("component " + m.components[i].name + " is not good for this class");
    const Rational vol0 = form.pair(z.P, z.P);
    auto shifted_volume = [&](const Rational& t) {
        ClassVector b = beta;
        b.d[i] += t;
        try {
            return volume(form, b);
        } catch (const NotBigError&) {
            throw DomainError("class leaves the big cone at step h = " + to_string(h) + "; shrink h");
        }
    };
    const Rational vol_plus = shifted_volume(h);
    const Rational vol_minus = shifted_volume(-h);
    return {(vol0 - vol_minus) / h, (vol_plus - vol0) / h, (m.n + 1) * restricted_volume(form, z, i)};
}

}  // namespace zerofiber
