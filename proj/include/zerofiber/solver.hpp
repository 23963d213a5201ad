#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "zerofiber/intersection.hpp"
#include "zerofiber/surface.hpp"

namespace zerofiber {

// ---------------------------------------------------------------------------
// Intersection graph of the zero fiber.

struct IntersectionGraph {
    std::vector<std::vector<std::size_t>> adjacency;
    std::vector<std::vector<std::size_t>> dist;  // graph distances l(i, j)
};

/// Edges come from dual-complex faces with at least two vertices; distances
/// by BFS from every vertex. Throws if 𝒳_0 is disconnected.
inline IntersectionGraph intersection_graph(const Model& m) {
    const std::size_t N = m.size();
    IntersectionGraph g{std::vector<std::vector<std::size_t>>(N), {}};
    for (const auto& face : m.faces)
        for (std::size_t a = 0; a < face.size(); ++a)
            for (std::size_t b = a + 1; b < face.size(); ++b) {
                g.adjacency.at(face[a]).push_back(face[b]);
                g.adjacency.at(face[b]).push_back(face[a]);
            }
    for (auto& adj : g.adjacency) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    constexpr auto unreached = std::numeric_limits<std::size_t>::max();
    g.dist.assign(N, std::vector<std::size_t>(N, unreached));
    for (std::size_t src = 0; src < N; ++src) {
        std::deque<std::size_t> queue{src};
        g.dist[src][src] = 0;
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            for (auto w : g.adjacency[v])
                if (g.dist[src][w] == unreached) {
                    g.dist[src][w] = g.dist[src][v] + 1;
                    queue.push_back(w);
                }
        }
        for (std::size_t j = 0; j < N; ++j)
            if (g.dist[src][j] == unreached) throw DomainError("intersection graph of the zero fiber is disconnected");
    }
    return g;
}

// ---------------------------------------------------------------------------
// Calibrated divisors: D_{i,t} = Σ_j (1 + t^N − t^{N−l(i,j)}) b_j E_j.

struct CalibratedFamily {
    Rational t0;
    std::vector<ClassVector> D;  // stored as the classes A + D_i (s = 1)
};

inline std::vector<ClassVector> calibrated_divisors_at(const Model& m, const IntersectionGraph& g, const Rational& t) {
    const std::size_t N = m.size();
    std::vector<Rational> powers(N + 1);
    powers[0] = 1;
    for (std::size_t k = 1; k <= N; ++k) powers[k] = powers[k - 1] * t;
    std::vector<ClassVector> out;
    out.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        ClassVector D = ClassVector::divisor(RationalVector(N));
        for (std::size_t j = 0; j < N; ++j)
            D.d[j] = (1 + powers[N] - powers[N - g.dist[i][j]]) * m.components[j].b;
        out.push_back(std::move(D));
    }
    return out;
}

/// (A + D_i)·E_k < 0 for all k ≠ i: on a curve E_k the restriction then has
/// negative degree, i.e. lies in the open half-space missing the
/// pseudoeffective cone.
inline bool is_calibrated(const SurfaceForm& form, const std::vector<ClassVector>& family) {
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t k = 0; k < family.size(); ++k)
            if (k != i && form.pair_component(family[i], k) >= 0) return false;
    return true;
}

/// Doubling search t = 2, 4, 8, ... up to t_cap.
inline CalibratedFamily build_calibrated_divisors(const Model& m, const Rational& t_cap) {
    SurfaceForm form(m);
    auto g = intersection_graph(m);
    for (Rational t = 2; t <= t_cap; t *= 2) {
        auto family = calibrated_divisors_at(m, g, t);
        if (is_calibrated(form, family)) return {t, std::move(family)};
    }
    throw DomainError("calibration failed below cap t = " + to_string(t_cap));
}

inline Rational default_t_cap() { return Rational(mpz_class(1) << 20); }

inline ClassVector combine(const CalibratedFamily& fam, const RationalVector& a) {
    if (a.size() != fam.D.size()) throw InputError("simplex point has wrong dimension");
    ClassVector D{Rational(0), RationalVector(fam.D.front().size())};
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) D += a[i] * fam.D[i];
    return D;
}

inline void require_simplex_point(const RationalVector& a) {
    for (const auto& x : a)
        if (x < 0) throw InputError("simplex point has a negative coordinate");
    if (sum(a) != 1) throw InputError("simplex point does not sum to 1");
}

/// f(a) = MA(𝒳, A + Σ a_i D_i).
inline DivisorialMeasure simplex_map(const Model& m, const CalibratedFamily& fam, const RationalVector& a) {
    require_simplex_point(a);
    return ma_big(m, combine(fam, a));
}

// ---------------------------------------------------------------------------
// Fixed-point solver for MA(𝒳, A + D) = μ.

struct SolveOptions {
    double tol = 1e-9;
    int max_iter = 1000;
    bool restrict_support = true;
    bool fallback = true;
    bool record_trace = true;
    Rational t_cap = default_t_cap();
};

struct SolveResult {
    std::vector<double> a;
    RationalVector a_exact;
    ClassVector D;
    DivisorialMeasure masses;
    Rational residual;  // exact max-norm of masses − μ at a_exact
    int iterations = 0;
    bool converged = false;
    bool used_fallback = false;
    Rational t0;
    std::vector<double> trace;
};

inline void require_probability(const DivisorialMeasure& mu, std::size_t N) {
    if (mu.masses.size() != N) throw InputError("target measure has wrong number of masses");
    for (const auto& x : mu.masses)
        if (x < 0) throw InputError("target measure has a negative mass");
    if (mu.total() != 1) throw InputError("target measure is not a probability vector (sum " + to_string(mu.total()) + ")");
}

namespace detail {

inline Rational residual_of(const DivisorialMeasure& f, const DivisorialMeasure& mu) {
    Rational r = 0;
    for (std::size_t i = 0; i < f.masses.size(); ++i) {
        Rational diff = f.masses[i] - mu.masses[i];
        r = std::max(r, abs(diff));
    }
    return r;
}

/// Euclidean projection of y onto {x ≥ 0, Σ x = 1}.
inline std::vector<double> project_to_simplex(std::vector<double> y) {
    std::vector<double> u = y;
    std::sort(u.rbegin(), u.rend());
    double cumulative = 0, theta = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        double candidate = (cumulative - 1) / static_cast<double>(k + 1);
        if (u[k] - candidate > 0) theta = candidate;
    }
    for (auto& x : y) x = std::max(0.0, x - theta);
    return y;
}

class FixedPointProblem {
  public:
    FixedPointProblem(const Model& m, const DivisorialMeasure& mu, CalibratedFamily fam, std::vector<std::size_t> active)
        : model_(m), form_(m), mu_(mu), fam_(std::move(fam)), active_(std::move(active)) {}

    std::size_t dim() const { return active_.size(); }
    const std::vector<std::size_t>& active() const { return active_; }
    const CalibratedFamily& family() const { return fam_; }

    RationalVector embed(const RationalVector& reduced) const {
        RationalVector a(model_.size());
        for (std::size_t k = 0; k < active_.size(); ++k) a[active_[k]] = reduced[k];
        return a;
    }

    struct Eval {
        RationalVector a;  // reduced coordinates
        ZariskiDecomposition z;
        DivisorialMeasure f;
        Rational residual;
    };

    Eval evaluate(const RationalVector& reduced) const {
        ++evaluations;
        auto z = zariski(form_, combine(fam_, embed(reduced)));
        auto f = ma_big(form_, z);
        return {reduced, z, f, residual_of(f, mu_)};
    }

    /// Exact Newton step inside the current Zariski chamber, where the
    /// masses are affine in a. Solves J δ = μ − f on the active rows (one
    /// dropped, as Σ f = 1) together with Σ δ = 0.
    std::optional<RationalVector> newton_step(const Eval& e) const {
        const std::size_t d = active_.size();
        if (d < 2) return std::nullopt;
        const auto& S = e.z.support;
        Matrix gram_S = form_.vertical_gram(S);
        Matrix J(d, d);
        RationalVector rhs(d);
        for (std::size_t col = 0; col < d; ++col) {
            const ClassVector& Dk = fam_.D[active_[col]];
            RationalVector dN(model_.size());
            if (!S.empty()) {
                RationalVector r(S.size());
                for (std::size_t q = 0; q < S.size(); ++q) r[q] = form_.pair_component(Dk, S[q]);
                auto x = solve(gram_S, r);
                if (!x) return std::nullopt;
                for (std::size_t q = 0; q < S.size(); ++q) dN[S[q]] = (*x)[q];
            }
            ClassVector dP = Dk;
            for (std::size_t j = 0; j < model_.size(); ++j) dP.d[j] -= dN[j];
            for (std::size_t row = 0; row + 1 < d; ++row) {
                std::size_t i = active_[row];
                J(row, col) = std::binary_search(S.begin(), S.end(), i)
                                  ? Rational(0)
                                  : model_.components[i].b * form_.pair_component(dP, i) / model_.V;
            }
            J(d - 1, col) = 1;
        }
        for (std::size_t row = 0; row + 1 < d; ++row) rhs[row] = mu_.masses[active_[row]] - e.f.masses[active_[row]];
        rhs[d - 1] = 0;
        return solve(J, rhs);
    }

    const Rational& target(std::size_t i) const { return mu_.masses[i]; }

    mutable long evaluations = 0;

  private:
    const Model& model_;
    SurfaceForm form_;
    const DivisorialMeasure& mu_;
    CalibratedFamily fam_;
    std::vector<std::size_t> active_;
};


inline bool in_simplex(const RationalVector& a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& x) { return x >= 0; });
}

/// Continued-fraction rounding of a float simplex point; the last coordinate
/// absorbs the rounding so the sum stays exactly 1.
inline RationalVector rationalize_on_simplex(const std::vector<double>& a) {
    RationalVector r(a.size());
    Rational acc = 0;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        r[k] = rationalize(std::max(0.0, a[k]), default_denominator_cap());
        acc += r[k];
    }
    r.back() = 1 - acc;
    if (r.back() < 0) {
        for (std::size_t k = 0; k + 1 < a.size(); ++k) r[k] /= acc;
        r.back() = 0;
    }
    return r;
}

inline RationalVector rationalize_on_simplex(const RationalVector& a) {
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) v[k] = to_double(a[k]);
    return rationalize_on_simplex(v);
}

inline std::vector<double> to_doubles(const RationalVector& v) {
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = to_double(v[k]);
    return out;
}

inline constexpr double kStagnation = 0x1p-40;

/// Damped projected residual iteration a ← Π(a + λ(μ − f(a))), λ halved on
/// failure to decrease the residual, with an exact chamber Newton step tried
/// first at every iterate.
inline FixedPointProblem::Eval local_iteration(const FixedPointProblem& prob, FixedPointProblem::Eval cur,
                                               const Rational& tol, int max_iter, int& iterations,
                                               std::vector<double>* trace) {
    double lambda = 0.5;
    while (iterations < max_iter && cur.residual > tol) {
        ++iterations;
        bool accepted = false;
        if (auto delta = prob.newton_step(cur)) {
            Rational step = 1;
            for (int k = 0; k < 12 && !accepted; ++k, step /= 2) {
                RationalVector cand = cur.a;
                for (std::size_t j = 0; j < cand.size(); ++j) cand[j] += step * (*delta)[j];
                if (!in_simplex(cand)) continue;
                try {
                    auto e = prob.evaluate(cand);
                    if (e.residual < cur.residual) {
                        cur = std::move(e);
                        accepted = true;
                    }
                } catch (const NotBigError&) {
                }
            }
        }
        while (!accepted && lambda >= kStagnation) {
            std::vector<double> y(cur.a.size());
            for (std::size_t k = 0; k < y.size(); ++k) {
                std::size_t i = prob.active()[k];
                y[k] = to_double(cur.a[k]) + lambda * to_double(prob.target(i) - cur.f.masses[i]);
            }
            auto cand = rationalize_on_simplex(project_to_simplex(std::move(y)));
            try {
                auto e = prob.evaluate(cand);
                if (e.residual < cur.residual) {
                    cur = std::move(e);
                    accepted = true;
                    lambda = std::min(0.5, lambda * 2);
                    break;
                }
            } catch (const NotBigError&) {
            }
            lambda /= 2;
        }
        if (trace) trace->push_back(to_double(cur.residual));
        if (!accepted) break;
    }
    return cur;
}

/// Sperner search on the Kuhn triangulation of the simplex at resolution R.
/// Label of a grid point: argmax over supp(a) of f_i(a) − μ_i. Returns the
/// barycenter of the fully labeled cell whose vertices have the smallest
/// residual, if any.
inline std::optional<RationalVector> sperner_cell(const FixedPointProblem& prob, int R) {
    const std::size_t dim = prob.dim();
    const std::size_t d = dim - 1;  // free coordinates y_1 ≤ ... ≤ y_d
    using Grid = std::vector<int>;
    auto to_simplex = [&](const Grid& y) {
        RationalVector a(dim);
        int prev = 0;
        for (std::size_t k = 0; k < d; ++k) {
            a[k] = Rational(y[k] - prev, R);
            prev = y[k];
        }
        a[d] = Rational(R - prev, R);
        for (auto& x : a) x.canonicalize();
        return a;
    };
    struct Label {
        int label;
        Rational residual;
    };
    std::map<Grid, Label> cache;
    auto label_of = [&](const Grid& y) -> const Label& {
        auto it = cache.find(y);
        if (it != cache.end()) return it->second;
        auto a = to_simplex(y);
        Label l{-1, 0};
        try {
            auto e = prob.evaluate(a);
            Rational best;
            for (std::size_t k = 0; k < dim; ++k) {
                if (a[k] == 0) continue;
                Rational excess = e.f.masses[prob.active()[k]] - prob.target(prob.active()[k]);
                if (l.label < 0 || excess > best) {
                    best = excess;
                    l.label = static_cast<int>(k);
                }
            }
            l.residual = e.residual;
        } catch (const NotBigError&) {
        }
        return cache.emplace(y, l).first->second;
    };
    auto ordered = [&](const Grid& y) {
        for (std::size_t k = 0; k < d; ++k)
            if (y[k] < 0 || y[k] > R || (k > 0 && y[k - 1] > y[k])) return false;
        return true;
    };

    std::optional<RationalVector> best_center;
    Rational best_residual;
    std::vector<std::size_t> perm(d);
    Grid base(d, 0);
    while (true) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        do {
            std::vector<Grid> cell{base};
            for (auto p : perm) {
                Grid next = cell.back();
                ++next[p];
                cell.push_back(std::move(next));
            }
            if (!std::all_of(cell.begin(), cell.end(), ordered)) continue;
            std::vector<bool> seen(dim, false);
            Rational worst = 0;
            bool ok = true;
            for (const auto& v : cell) {
                const auto& l = label_of(v);
                if (l.label < 0) {
                    ok = false;
                    break;
                }
                seen[static_cast<std::size_t>(l.label)] = true;
                worst = std::max(worst, l.residual);
            }
            if (!ok || !std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) continue;
            if (!best_center || worst < best_residual) {
                RationalVector center(dim);
                for (const auto& v : cell) {
                    auto a = to_simplex(v);
                    for (std::size_t k = 0; k < dim; ++k) center[k] += a[k] / static_cast<long>(cell.size());
                }
                best_center = std::move(center);
                best_residual = worst;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::size_t pos = 0;
        while (pos < d && ++base[pos] >= R) base[pos++] = 0;
        if (pos == d) break;
    }
    return best_center;
}

}  // namespace detail

/// Solves MA(𝒳, A + D) = μ on a surface model through the simplex map of a
/// calibrated family. Convergence is not guaranteed for the local iteration;
/// the result reports the exact residual either way.
inline SolveResult solve_ma(const Model& m, const DivisorialMeasure& mu, const SolveOptions& opt = {}) {
    require_valid(m);
    if (m.n != 1) throw InputError("solve_ma requires a surface model (n = 1)");
    require_probability(mu, m.size());
    if (opt.max_iter < 0) throw InputError("max_iter must be nonnegative");
    if (!(opt.tol >= 0)) throw InputError("tol must be nonnegative");

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (mu.masses[i] > 0) active.push_back(i);
    if (active.size() < m.size() && !opt.restrict_support)
        throw InputError("target has a zero mass and support restriction is disabled");

    auto fam = build_calibrated_divisors(m, opt.t_cap);
    const Rational t0 = fam.t0;
    detail::FixedPointProblem prob(m, mu, std::move(fam), active);
    const Rational tol = from_double(opt.tol);

    SolveResult out;
    out.t0 = t0;
    std::vector<double>* trace = opt.record_trace ? &out.trace : nullptr;
    RationalVector start(active.size(), Rational(1, static_cast<long>(active.size())));
    for (auto& x : start) x.canonicalize();
    auto best = prob.evaluate(start);
    if (trace) trace->push_back(to_double(best.residual));
    best = detail::local_iteration(prob, std::move(best), tol, opt.max_iter, out.iterations, trace);

    if (best.residual > tol && opt.fallback && active.size() >= 2 && active.size() <= 4) {
        out.used_fallback = true;
        for (int R = 8; R <= 64 && best.residual > tol && out.iterations < opt.max_iter; R *= 2) {
            auto center = detail::sperner_cell(prob, R);
            if (!center) continue;
            auto e = prob.evaluate(*center);
            if (trace) trace->push_back(to_double(e.residual));
            e = detail::local_iteration(prob, std::move(e), tol, opt.max_iter, out.iterations, trace);
            if (e.residual < best.residual) best = std::move(e);
        }
    }

    // Report at a rationalization of a; keep the exact iterate when rounding
    // would lose the tolerance.
    RationalVector a_red = best.a;
    auto rounded = detail::rationalize_on_simplex(a_red);
    if (detail::in_simplex(rounded)) {
        try {
            auto e = prob.evaluate(rounded);
            if (e.residual <= std::max(tol, best.residual)) best = std::move(e);
        } catch (const NotBigError&) {
        }
    }
    out.a_exact = prob.embed(best.a);
    out.a = detail::to_doubles(out.a_exact);
    out.D = combine(prob.family(), out.a_exact);
    out.masses = simplex_map(m, prob.family(), out.a_exact);
    out.residual = detail::residual_of(out.masses, mu);
    out.converged = out.residual <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Variational solver: maximize g(D) = E(D) − Σ μ_i d_i / b_i over the
// relatively Kähler region.

struct VariationalOptions {
    double tol = 1e-9;
    int max_iter = 200;
    std::optional<ClassVector> init;
};

struct VariationalResult {
    bool attained = false;
    std::string message;
    ClassVector D;                      // min-zero gauge plus a shift certifying horizontal curves
    DivisorialMeasure masses;
    Rational residual;
    Rational dual_energy_lower_bound;  // g(D)
    int iterations = 0;
};

inline constexpr const char* kNotAttainable = "target not attainable in Kähler chamber of this model";

/// g(D) = E(D) − Σ μ_i d_i / b_i. Invariant under D ↦ D + c𝒳_0.
inline Rational dual_objective(const Model& m, const DivisorialMeasure& mu, const ClassVector& D) {
    Rational g = energy(m, D);
    for (std::size_t i = 0; i < m.size(); ++i) g -= mu.masses[i] * D.d[i] / m.components[i].b;
    return g;
}

namespace detail {

inline bool certified(const Model& m, const ClassVector& D) {
    return !kahler_violation(m, D, CurveScope::vertical).has_value();
}

/// Smallest positivity value among the vertical-scope Kähler conditions.
inline Rational kahler_margin(const Model& m, const ClassVector& D) {
    const ClassVector x0 = m.zero_fiber();
    std::optional<Rational> margin;
    auto take = [&margin](const Rational& p) {
        if (!margin || p < *margin) margin = p;
    };
    for (const auto& curve : m.curves)
        if (pair_with_curve(x0, curve) == 0) take(pair_with_curve(D, curve));
    for (std::size_t i = 0; i < m.size(); ++i) take(power_times(m, D, m.n, {m.E(i)}));
    return *margin;
}

inline DivisorialMeasure gradient_masses(const Model& m, const ClassVector& D) {
    auto g = grad_energy(m, D);
    DivisorialMeasure out{RationalVector(m.size())};
    for (std::size_t i = 0; i < m.size(); ++i) out.masses[i] = m.components[i].b * g[i];
    return out;
}

/// Smallest nonnegative integer c such that D + c𝒳_0 pairs positively with
/// every horizontal catalog curve; nullopt if some curve cannot be fixed.
inline std::optional<Rational> horizontal_shift(const Model& m, const ClassVector& D) {
    const ClassVector x0 = m.zero_fiber();
    Rational c = 0;
    for (const auto& curve : m.curves) {
        Rational x = pair_with_curve(x0, curve);
        if (x == 0) continue;
        Rational p = pair_with_curve(D, curve);
        if (x < 0) {
            if (p <= 0) return std::nullopt;
            continue;
        }
        if (p + c * x <= 0) {
            Rational need = -p / x;
            mpz_class fl;
            mpz_fdiv_q(fl.get_mpz_t(), need.get_num_mpz_t(), need.get_den_mpz_t());
            c = Rational(fl + 1);
        }
    }
    for (const auto& curve : m.curves)
        if (pair_with_curve(D + c * x0, curve) <= 0) return std::nullopt;
    return c;
}

inline std::vector<ClassVector> variational_starts(const Model& m, const DivisorialMeasure& mu,
                                                   const std::optional<ClassVector>& init) {
    std::vector<ClassVector> starts;
    const std::size_t N = m.size();
    if (m.n == 1 && N >= 2) {
        // The energy is quadratic: the unique stationary point with d_0 = 0
        // solves a linear system.
        SurfaceForm form(m);
        std::vector<std::size_t> rest(N - 1);
        std::iota(rest.begin(), rest.end(), std::size_t{1});
        RationalVector rhs(N - 1);
        for (std::size_t r = 0; r < rest.size(); ++r) {
            auto i = rest[r];
            rhs[r] = m.V * mu.masses[i] / m.components[i].b - form.pair_component(m.A(), i);
        }
        if (auto x = solve(form.vertical_gram(rest), rhs)) {
            ClassVector D = ClassVector::divisor(RationalVector(N));
            for (std::size_t r = 0; r < rest.size(); ++r) D.d[rest[r]] = (*x)[r];
            starts.push_back(std::move(D));
        }
        return starts;
    }
    std::size_t dominant = 0;
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<BasisIndex> key(static_cast<std::size_t>(m.n), kA);
        key.push_back(basis_of(i));
        if (m.tensor.get(key) != 0) dominant = i;
    }
    for (Rational eps = Rational(1, 2); eps >= Rational(1, 1024); eps /= 2) {
        ClassVector D = ClassVector::divisor(RationalVector(N));
        Rational pw = 1;
        for (std::size_t i = 0; i < N; ++i) {
            if (i == dominant) continue;
            pw *= eps;
            D.d[i] = -pw;
        }
        starts.push_back(std::move(D));
    }
    if (init) starts.push_back(*init);
    return starts;
}

inline ClassVector rationalized(ClassVector D) {
    for (auto& x : D.d) x = rationalize(x, default_denominator_cap());
    return D;
}

}  // namespace detail

/// Works for any n. On surfaces the objective is a concave quadratic and the
/// answer is exact; for n ≥ 2 Newton steps on the pinned Hessian with
/// backtracking that keeps the iterate inside the certified region.
inline VariationalResult variational_solve(const Model& m, const DivisorialMeasure& mu,
                                           const VariationalOptions& opt = {}) {
    require_valid(m);
    require_probability(mu, m.size());
    const Rational tol = from_double(opt.tol);
    const std::size_t N = m.size();
    if (opt.init && (opt.init->size() != N || opt.init->s != 1))
        throw InputError("initial divisor must be a class A + D of the model's size");

    VariationalResult out;
    auto finish = [&](ClassVector D, const Rational& residual) {
        D = gauge_normalize(m, D, GaugeMode::min_zero).D;
        if (auto c = detail::horizontal_shift(m, D)) D += *c * m.zero_fiber();
        out.D = D;
        out.masses = detail::gradient_masses(m, D);
        out.residual = residual;
        out.dual_energy_lower_bound = dual_objective(m, mu, D);
    };
    auto residual_at = [&](const ClassVector& D) {
        return detail::residual_of(detail::gradient_masses(m, D), mu);
    };

    if (N == 1) {
        ClassVector D = ClassVector::divisor(RationalVector(1));
        out.attained = true;
        finish(D, residual_at(D));
        return out;
    }

    std::optional<ClassVector> cur;
    for (auto& s : detail::variational_starts(m, mu, opt.init)) {
        s.d[0] = 0;
        if (detail::certified(m, s) && detail::horizontal_shift(m, s)) {
            cur = std::move(s);
            break;
        }
    }
    if (!cur) {
        out.message = kNotAttainable;
        return out;
    }

    Rational res = residual_at(*cur);
    Rational g = dual_objective(m, mu, *cur);
    while (res > tol && out.iterations < opt.max_iter) {
        ++out.iterations;
        const auto grad = grad_energy(m, *cur);
        RationalVector gr(N - 1);
        for (std::size_t i = 1; i < N; ++i) gr[i - 1] = grad[i] - mu.masses[i] / m.components[i].b;
        std::vector<std::size_t> free_idx(N - 1);
        std::iota(free_idx.begin(), free_idx.end(), std::size_t{1});
        Matrix H = hessian_energy(m, *cur).principal(free_idx);
        // Newton direction when the pinned Hessian is negative definite,
        // plain gradient otherwise.
        RationalVector dir = gr;
        if (is_negative_definite(H)) {
            RationalVector neg(gr.size());
            for (std::size_t k = 0; k < gr.size(); ++k) neg[k] = -gr[k];
            if (auto x = solve(H, neg)) dir = std::move(*x);
        }
        bool accepted = false;
        for (Rational step = 1; step >= Rational(1, mpz_class(1) << 40); step /= 2) {
            ClassVector cand = *cur;
            for (std::size_t k = 0; k < dir.size(); ++k) cand.d[k + 1] += step * dir[k];
            if (m.n >= 2) cand = detail::rationalized(std::move(cand));
            if (!detail::certified(m, cand)) continue;
            Rational gc = dual_objective(m, mu, cand);
            if (gc > g) {
                cur = std::move(cand);
                g = gc;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        res = residual_at(*cur);
    }
    // An inexact iterate whose Kähler margin is not small against sqrt(residual)
    // is converging to the chamber boundary, so the target is not attained.
    out.attained = res <= tol;
    if (out.attained && res > 0) {
        Rational margin = detail::kahler_margin(m, *cur);
        out.attained = margin * margin > res;
    }
    if (!out.attained) out.message = kNotAttainable;
    finish(*cur, res);
    return out;
}

}  // namespace zerofiber
