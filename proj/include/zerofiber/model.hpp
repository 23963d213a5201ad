#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "zerofiber/error.hpp"
#include "zerofiber/rational.hpp"

namespace zerofiber {

/// Index into the basis {A, E_1, ..., E_N}: 0 is A, component i is i + 1.
using BasisIndex = int;
inline constexpr BasisIndex kA = 0;
inline constexpr BasisIndex basis_of(std::size_t component) { return static_cast<BasisIndex>(component) + 1; }

/// Irreducible component E_i of the zero fiber with multiplicity b_i.
struct Component {
    std::string name;
    Rational b;
    bool operator==(const Component&) const = default;
};

/// Fully symmetric multilinear form of fixed degree on the basis
/// {A, E_1..E_N}, stored sparsely by sorted multiset. Absent keys are zero
/// and zero values are never stored, so equality is structural.
class IntersectionTensor {
  public:
    using Key = std::vector<BasisIndex>;

    IntersectionTensor() = default;
    explicit IntersectionTensor(int degree) : degree_(degree) {
        if (degree < 2) throw StructuralError("tensor degree must be at least 2");
    }

    int degree() const { return degree_; }
    const std::map<Key, Rational>& entries() const { return entries_; }

    Rational get(Key key) const {
        check_key(key);
        std::sort(key.begin(), key.end());
        auto it = entries_.find(key);
        return it == entries_.end() ? Rational(0) : it->second;
    }

    void set(Key key, const Rational& value) {
        check_key(key);
        std::sort(key.begin(), key.end());
        if (value == 0)
            entries_.erase(key);
        else
            entries_[key] = value;
    }

    void add(Key key, const Rational& delta) { set(key, get(key) + delta); }

    bool operator==(const IntersectionTensor&) const = default;

  private:
    void check_key(const Key& key) const {
        if (static_cast<int>(key.size()) != degree_)
            throw StructuralError("tensor key of size " + std::to_string(key.size()) +
                                  " on a tensor of degree " + std::to_string(degree_));
        for (auto k : key)
            if (k < 0) throw StructuralError("negative basis index in tensor key");
    }

    int degree_ = 2;
    std::map<Key, Rational> entries_;
};

/// A curve given only through its intersection numbers with A, E_1..E_N.
struct Curve {
    std::string name;
    RationalVector pairing;
    bool operator==(const Curve&) const = default;
};
using CurveCatalog = std::vector<Curve>;

/// A class s·A + Σ d_i E_i. The test-configuration class A + D has s = 1.
struct ClassVector {
    Rational s = 1;
    RationalVector d;

    static ClassVector divisor(RationalVector coeffs) { return {Rational(1), std::move(coeffs)}; }
    static ClassVector component(std::size_t n_components, std::size_t i) {
        ClassVector c{Rational(0), RationalVector(n_components)};
        c.d.at(i) = 1;
        return c;
    }

    std::size_t size() const { return d.size(); }

    /// Coefficient on basis index k (0 = A).
    const Rational& coeff(BasisIndex k) const { return k == kA ? s : d.at(static_cast<std::size_t>(k - 1)); }

    ClassVector& operator+=(const ClassVector& o) {
        check_same(o);
        s += o.s;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += o.d[i];
        return *this;
    }
    ClassVector& operator-=(const ClassVector& o) {
        check_same(o);
        s -= o.s;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= o.d[i];
        return *this;
    }
    ClassVector& operator*=(const Rational& c) {
        s *= c;
        for (auto& x : d) x *= c;
        return *this;
    }
    friend ClassVector operator+(ClassVector a, const ClassVector& b) { return a += b; }
    friend ClassVector operator-(ClassVector a, const ClassVector& b) { return a -= b; }
    friend ClassVector operator*(const Rational& c, ClassVector a) { return a *= c; }

    bool operator==(const ClassVector&) const = default;

  private:
    void check_same(const ClassVector& o) const {
        if (o.d.size() != d.size()) throw StructuralError("class vectors of different length");
    }
};

/// Atoms at the divisorial points v_{E_i}.
struct DivisorialMeasure {
    RationalVector masses;
    Rational total() const { return sum(masses); }
    bool operator==(const DivisorialMeasure&) const = default;
};

/// Combinatorial SNC test configuration. Immutable in practice: every
/// operation takes it by const reference.
struct Model {
    int n = 1;
    Rational V = 1;
    std::vector<Component> components;
    IntersectionTensor tensor{2};
    std::vector<std::vector<std::size_t>> faces;
    CurveCatalog curves;

    std::size_t size() const { return components.size(); }
    std::size_t basis_size() const { return components.size() + 1; }

    /// 𝒳_0 = Σ b_i E_i as a class (s = 0).
    ClassVector zero_fiber() const {
        ClassVector c{Rational(0), RationalVector(size())};
        for (std::size_t i = 0; i < size(); ++i) c.d[i] = components[i].b;
        return c;
    }

    ClassVector A() const { return ClassVector{Rational(1), RationalVector(size())}; }
    ClassVector E(std::size_t i) const { return ClassVector::component(size(), i); }

    bool has_face(std::vector<std::size_t> face) const {
        std::sort(face.begin(), face.end());
        for (auto f : faces) {
            std::sort(f.begin(), f.end());
            if (f == face) return true;
        }
        return false;
    }

    std::string basis_name(BasisIndex k) const {
        return k == kA ? std::string("A") : components.at(static_cast<std::size_t>(k - 1)).name;
    }

    bool operator==(const Model&) const = default;
};

/// Structural sanity: degree, multiplicities, names, faces, curve lengths.
/// Throws StructuralError; the intersection identities are checked
/// separately by validate_model.
inline void check_structure(const Model& m) {
    if (m.n < 1) throw StructuralError("model dimension n must be >= 1");
    if (m.V <= 0) throw StructuralError("volume V must be positive");
    if (m.tensor.degree() != m.n + 1)
        throw StructuralError("tensor degree " + std::to_string(m.tensor.degree()) +
                              " does not match n + 1 = " + std::to_string(m.n + 1));
    if (m.components.empty()) throw StructuralError("model has no components");
    std::set<std::string> names;
    for (const auto& c : m.components) {
        if (c.name.empty() || c.name == "A" || c.name.find('.') != std::string::npos)
            throw StructuralError("invalid component name '" + c.name + "'");
        if (!names.insert(c.name).second) throw StructuralError("duplicate component name '" + c.name + "'");
    }
    const auto basis = static_cast<BasisIndex>(m.basis_size());
    for (const auto& [key, value] : m.tensor.entries())
        for (auto k : key)
            if (k >= basis) throw StructuralError("tensor key refers to a basis element outside the model");
    for (const auto& face : m.faces) {
        if (face.empty()) throw StructuralError("empty face");
        std::set<std::size_t> uniq(face.begin(), face.end());
        if (uniq.size() != face.size()) throw StructuralError("face with repeated index");
        for (auto i : face)
            if (i >= m.size()) throw StructuralError("face index " + std::to_string(i) + " out of range");
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m.has_face({i})) throw StructuralError("missing singleton face {" + std::to_string(i) + "}");
    for (const auto& c : m.curves)
        if (c.pairing.size() != m.basis_size())
            throw StructuralError("curve '" + c.name + "' pairing has wrong length");
}

}  // namespace zerofiber
