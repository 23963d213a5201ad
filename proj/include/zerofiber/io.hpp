#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "zerofiber/intersection.hpp"
#include "zerofiber/surface.hpp"

namespace zerofiber::io {

using Json = nlohmann::json;

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>()), 10));
    throw InputError("expected a rational as \"p/q\" string or integer, got " + j.dump());
}

inline Json rational_to_json(const Rational& r) { return to_string(r); }

inline RationalVector vector_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of rationals");
    RationalVector v;
    for (const auto& x : j) v.push_back(rational_from_json(x));
    return v;
}

inline Json vector_to_json(const RationalVector& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(rational_to_json(x));
    return out;
}

namespace detail {

inline const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw InputError(std::string("missing field '") + name + "'");
    return j.at(name);
}

inline std::string tensor_key_name(const Model& m, const IntersectionTensor::Key& key) {
    std::string s;
    for (auto k : key) {
        if (!s.empty()) s += '.';
        s += m.basis_name(k);
    }
    return s;
}

}  // namespace detail

/// {"n":1,"V":"1","components":[{"name":"E1","b":"1"}],
///  "tensor":{"A.E1":"1",...},"faces":[[0],[0,1]],"curves":[{"name":"G","pairing":[...]}]}
/// Tensor keys are dot-joined basis names ("A" or component names); faces use
/// 0-based component indices. With `validate` the intersection identities
/// are enforced; structural checks always run.
inline Model model_from_json(const Json& j, bool validate = true) {
    Model m;
    try {
        m.n = detail::field(j, "n").get<int>();
        m.V = rational_from_json(detail::field(j, "V"));
        for (const auto& c : detail::field(j, "components"))
            m.components.push_back({detail::field(c, "name").get<std::string>(), rational_from_json(detail::field(c, "b"))});
        if (m.n < 1) throw StructuralError("model dimension n must be >= 1");
        m.tensor = IntersectionTensor(m.n + 1);
        for (const auto& [name, value] : detail::field(j, "tensor").items()) {
            IntersectionTensor::Key key;
            std::stringstream ss(name);
            std::string part;
            while (std::getline(ss, part, '.')) {
                if (part == "A") {
                    key.push_back(kA);
                    continue;
                }
                auto it = std::find_if(m.components.begin(), m.components.end(),
                                       [&part](const Component& c) { return c.name == part; });
                if (it == m.components.end()) throw StructuralError("tensor key '" + name + "' names unknown class '" + part + "'");
                key.push_back(basis_of(static_cast<std::size_t>(it - m.components.begin())));
            }
            Rational v = rational_from_json(value);
            std::sort(key.begin(), key.end());
            if (m.tensor.get(key) != 0) throw StructuralError("tensor key '" + name + "' given twice");
            m.tensor.set(key, v);
        }
        if (j.contains("faces")) {
            for (const auto& f : j.at("faces")) m.faces.push_back(f.get<std::vector<std::size_t>>());
        } else {
            for (std::size_t i = 0; i < m.size(); ++i) m.faces.push_back({i});
        }
        if (j.contains("curves"))
            for (const auto& c : j.at("curves"))
                m.curves.push_back({detail::field(c, "name").get<std::string>(), vector_from_json(detail::field(c, "pairing"))});
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed model JSON: ") + e.what());
    }
    if (validate)
        require_valid(m);
    else
        check_structure(m);
    return m;
}

inline Json model_to_json(const Model& m) {
    Json j;
    j["n"] = m.n;
    j["V"] = rational_to_json(m.V);
    j["components"] = Json::array();
    for (const auto& c : m.components) j["components"].push_back({{"name", c.name}, {"b", rational_to_json(c.b)}});
    j["tensor"] = Json::object();
    for (const auto& [key, value] : m.tensor.entries()) j["tensor"][detail::tensor_key_name(m, key)] = rational_to_json(value);
    j["faces"] = m.faces;
    j["curves"] = Json::array();
    for (const auto& c : m.curves) j["curves"].push_back({{"name", c.name}, {"pairing", vector_to_json(c.pairing)}});
    return j;
}

/// {"s":"1","d":[...]}; "s" defaults to 1. A bare array is read as d.
inline ClassVector divisor_from_json(const Json& j) {
    if (j.is_array()) return ClassVector::divisor(vector_from_json(j));
    ClassVector D{Rational(1), vector_from_json(detail::field(j, "d"))};
    if (j.contains("s")) D.s = rational_from_json(j.at("s"));
    return D;
}

inline Json divisor_to_json(const ClassVector& D) { return {{"s", rational_to_json(D.s)}, {"d", vector_to_json(D.d)}}; }

inline DivisorialMeasure measure_from_json(const Json& j) {
    if (j.is_array()) return {vector_from_json(j)};
    return {vector_from_json(detail::field(j, "masses"))};
}

inline Json measure_to_json(const DivisorialMeasure& mu) { return {{"masses", vector_to_json(mu.masses)}}; }

/// {"V":"1","sections":["G"],"steps":[{"kind":"on-section","args":[0,0]},
///  {"kind":"intersection","args":[0,1]},{"kind":"interior","args":[2]}]}
/// on-section args are (section, component); indices are 0-based.
inline SurfaceBuilder builder_from_script(const Json& j) {
    try {
        auto b = SurfaceBuilder::trivial(rational_from_json(detail::field(j, "V")));
        if (j.contains("sections"))
            for (const auto& s : j.at("sections")) b.add_section(s.get<std::string>());
        if (j.contains("steps"))
            for (const auto& st : j.at("steps")) {
                auto kind = detail::field(st, "kind").get<std::string>();
                auto args = detail::field(st, "args").get<std::vector<std::size_t>>();
                auto need = [&](std::size_t k) {
                    if (args.size() != k) throw InputError("blow-up step '" + kind + "' takes " + std::to_string(k) + " arguments");
                };
                if (kind == "interior") {
                    need(1);
                    b.apply(BlowupStep::interior(args[0]));
                } else if (kind == "intersection") {
                    need(2);
                    b.apply(BlowupStep::intersection(args[0], args[1]));
                } else if (kind == "on-section") {
                    need(2);
                    b.apply(BlowupStep::on_section(args[0], args[1]));
                } else {
                    throw InputError("unknown blow-up kind '" + kind + "'");
                }
            }
        return b;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed blow-up script: ") + e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

}  // namespace zerofiber::io
