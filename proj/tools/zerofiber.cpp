// zerofiber: command-line front end for the intersection engine, the surface
// Zariski engine, the Monge-Ampère solvers and the verification suites.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "zerofiber/zerofiber.hpp"

namespace zf = zerofiber;
using zf::io::Json;

namespace {

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

/// Thrown for a computed negative answer (invalid model, rejected target):
/// the output has been printed, only the exit code is left.
struct DomainExit {};

std::string join(const zf::RationalVector& v) {
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += ", ";
        s += zf::to_string(x);
    }
    return "(" + s + ")";
}

zf::Model load_model(const std::string& path) { return zf::io::model_from_json(zf::io::read_json_file(path)); }

zf::ClassVector load_divisor(const zf::Model& m, const std::string& path) {
    auto D = zf::io::divisor_from_json(zf::io::read_json_file(path));
    if (D.size() != m.size())
        throw zf::InputError("divisor has " + std::to_string(D.size()) + " coefficients, model has " +
                             std::to_string(m.size()) + " components");
    return D;
}

void emit(const Json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        zf::io::write_text_file(out, j.dump(2) + "\n");
}

/// "a:step:b" (inclusive, exact rationals) or "x,y,z".
std::vector<zf::Rational> parse_grid(const std::string& spec) {
    std::vector<zf::Rational> grid;
    if (spec.empty()) return grid;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3) throw zf::InputError("grid must be 'start:step:stop'");
        zf::Rational a = zf::parse_rational(parts[0]), step = zf::parse_rational(parts[1]),
                     b = zf::parse_rational(parts[2]);
        if (step <= 0) throw zf::InputError("grid step must be positive");
        for (zf::Rational t = a; t <= b; t += step) grid.push_back(t);
        return grid;
    }
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) grid.push_back(zf::parse_rational(part));
    return grid;
}

// --- commands ----------------------------------------------------------------

void cmd_validate(const std::string& model_path, bool json) {
    auto m = zf::io::model_from_json(zf::io::read_json_file(model_path), false);
    auto report = zf::validate_model(m);
    if (json) {
        Json v = Json::array();
        for (const auto& x : report)
            v.push_back({{"identity", x.identity}, {"detail", x.describe(m)}});
        std::cout << Json{{"valid", report.empty()}, {"violations", v}}.dump(2) << "\n";
    } else if (report.empty()) {
        std::cout << "valid: n = " << m.n << ", V = " << m.V << ", " << m.size() << " components\n";
    } else {
        std::cout << "invalid: " << report.size() << " violation(s)\n";
        for (const auto& x : report) std::cout << "  " << x.describe(m) << "\n";
    }
    if (!report.empty()) throw DomainExit{};
}

void cmd_blowup(const std::string& script, const std::string& out) {
    auto b = zf::io::builder_from_script(zf::io::read_json_file(script));
    for (const auto& step : b.log()) {
        std::cerr << zf::to_string(step.kind) << " -> " << b.model().components[step.result].name << "\n";
    }
    emit(zf::io::model_to_json(b.model()), out);
}

void cmd_ma(const std::string& model_path, const std::string& divisor_path, const std::string& mode,
            const std::string& out, bool json) {
    auto m = load_model(model_path);
    auto D = load_divisor(m, divisor_path);
    zf::DivisorialMeasure mu;
    std::string used = mode;
    std::vector<std::string> status;
    zf::RationalVector lelong;
    if (mode == "kahler") {
        mu = zf::ma_kahler(m, D);
    } else if (mode == "big" || mode == "auto") {
        if (mode == "auto" && !zf::kahler_violation(m, D)) {
            mu = zf::ma_kahler(m, D);
            used = "kahler";
        } else {
            if (m.n != 1) throw zf::DomainError("big mode requires n = 1; class is not certified Kähler");
            zf::SurfaceForm form(m);
            auto z = zf::zariski(form, D);
            mu = zf::ma_big(form, z);
            used = "big";
            for (auto s : zf::classify_components(form, z)) status.push_back(zf::to_string(s));
            lelong = z.N;
        }
    } else {
        throw zf::InputError("unknown mode '" + mode + "'");
    }
    if (!out.empty()) zf::io::write_text_file(out, zf::io::measure_to_json(mu).dump(2) + "\n");
    if (json) {
        Json j = zf::io::measure_to_json(mu);
        j["mode"] = used;
        if (!status.empty()) {
            j["status"] = status;
            j["lelong"] = zf::io::vector_to_json(lelong);
        }
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << "mode: " << used << "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::cout << m.components[i].name << ": mass " << mu.masses[i];
        if (!status.empty()) std::cout << ", " << status[i] << ", lelong " << lelong[i];
        std::cout << "\n";
    }
}

void cmd_energy(const std::string& model_path, const std::string& divisor_path, bool json) {
    auto m = load_model(model_path);
    auto D = load_divisor(m, divisor_path);
    auto e = zf::energy(m, D);
    auto g = zf::grad_energy(m, D);
    if (json) {
        std::cout << Json{{"energy", zf::to_string(e)}, {"gradient", zf::io::vector_to_json(g)}}.dump(2) << "\n";
        return;
    }
    std::cout << "energy: " << e << "\ngradient: " << join(g) << "\n";
}

void cmd_zariski(const std::string& model_path, const std::string& divisor_path, bool json) {
    auto m = load_model(model_path);
    auto D = load_divisor(m, divisor_path);
    zf::SurfaceForm form(m);
    auto z = zf::zariski(form, D);
    auto vol = form.pair(z.P, z.P);
    auto rv = zf::restricted_volumes(form, z);
    std::vector<std::string> status;
    for (auto s : zf::classify_components(form, z)) status.push_back(zf::to_string(s));
    std::vector<std::string> support;
    for (auto i : z.support) support.push_back(m.components[i].name);
    if (json) {
        std::cout << Json{{"P", zf::io::divisor_to_json(z.P)}, {"N", zf::io::vector_to_json(z.N)},
                          {"support", support},                {"volume", zf::to_string(vol)},
                          {"restricted_volumes", zf::io::vector_to_json(rv)}, {"status", status}}
                         .dump(2)
                  << "\n";
        return;
    }
    std::cout << "P: s = " << z.P.s << ", d = " << join(z.P.d) << "\nN: " << join(z.N) << "\nsupport:";
    for (const auto& s : support) std::cout << " " << s;
    std::cout << "\nvolume: " << vol << "\nrestricted volumes: " << join(rv) << "\n";
    for (std::size_t i = 0; i < m.size(); ++i) std::cout << m.components[i].name << ": " << status[i] << "\n";
}

void cmd_envelope(const std::string& model_path, const std::string& divisor_path, bool json) {
    auto m = load_model(model_path);
    auto D = load_divisor(m, divisor_path);
    auto f = zf::pl_vertex_values(m, D);
    auto env = zf::envelope_values(m, D);
    auto nu = zf::lelong(m, D);
    auto pairing = zf::orthogonality_pairing(m, D);
    if (json) {
        std::cout << Json{{"vertex_values", zf::io::vector_to_json(f)}, {"envelope", zf::io::vector_to_json(env)},
                          {"lelong", zf::io::vector_to_json(nu)}, {"orthogonality", zf::to_string(pairing)}}
                         .dump(2)
                  << "\n";
        return;
    }
    std::cout << "vertex values: " << join(f) << "\nenvelope: " << join(env) << "\nlelong: " << join(nu)
              << "\northogonality pairing: " << pairing << "\n";
}

void cmd_solve(const std::string& model_path, const std::string& target_path, double tol, const std::string& method,
               int max_iter, const std::string& trace_path, bool json) {
    auto m = load_model(model_path);
    auto mu = zf::io::measure_from_json(zf::io::read_json_file(target_path));
    if (method == "fixed-point") {
        zf::SolveOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        auto r = zf::solve_ma(m, mu, opt);
        if (!trace_path.empty()) {
            std::ostringstream csv;
            csv << "iteration,residual\n";
            for (std::size_t k = 0; k < r.trace.size(); ++k) csv << k << "," << r.trace[k] << "\n";
            zf::io::write_text_file(trace_path, csv.str());
        }
        if (json) {
            std::cout << Json{{"method", method},
                              {"converged", r.converged},
                              {"a", zf::io::vector_to_json(r.a_exact)},
                              {"D", zf::io::divisor_to_json(r.D)},
                              {"masses", zf::io::vector_to_json(r.masses.masses)},
                              {"residual", zf::to_string(r.residual)},
                              {"iterations", r.iterations},
                              {"t0", zf::to_string(r.t0)}}
                             .dump(2)
                      << "\n";
        } else {
            std::cout << "method: fixed-point\nconverged: " << (r.converged ? "yes" : "no") << "\na:";
            for (double x : r.a) std::cout << " " << x;
            std::cout << "\nD: s = " << r.D.s << ", d = " << join(r.D.d) << "\nmasses: " << join(r.masses.masses)
                      << "\nresidual: " << r.residual << " (" << zf::to_double(r.residual) << ")\niterations: "
                      << r.iterations << "\ncalibration t0: " << r.t0 << "\n";
        }
        if (!r.converged) throw DomainExit{};
    } else if (method == "variational") {
        zf::VariationalOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        auto r = zf::variational_solve(m, mu, opt);
        if (json) {
            std::cout << Json{{"method", method},
                              {"attained", r.attained},
                              {"message", r.message},
                              {"D", zf::io::divisor_to_json(r.D)},
                              {"masses", zf::io::vector_to_json(r.masses.masses)},
                              {"residual", zf::to_string(r.residual)},
                              {"dual_energy_lower_bound", zf::to_string(r.dual_energy_lower_bound)},
                              {"iterations", r.iterations}}
                             .dump(2)
                      << "\n";
        } else if (r.attained) {
            std::cout << "method: variational\nD: s = " << r.D.s << ", d = " << join(r.D.d)
                      << "\nmasses: " << join(r.masses.masses) << "\nresidual: " << r.residual
                      << "\ndual energy lower bound: " << r.dual_energy_lower_bound << "\niterations: " << r.iterations
                      << "\n";
        } else {
            std::cout << "method: variational\n" << r.message << "\n";
        }
        if (!r.attained) throw DomainExit{};
    } else {
        throw zf::InputError("unknown method '" + method + "'");
    }
}

void cmd_check(const std::string& suite, std::uint64_t seed, int models, const std::string& out) {
    static const std::vector<std::string> suites{"probability", "corWN",       "orthogonality", "gauge",
                                                 "derivative",  "oracle",      "calibration",   "kahler-region"};
    if (suite != "all" && std::find(suites.begin(), suites.end(), suite) == suites.end())
        throw zf::InputError("unknown suite '" + suite + "'");
    zf::verify::FuzzSpec spec;
    spec.seed = seed;
    spec.models = models;
    auto corpus = zf::verify::generate_corpus(spec);
    std::vector<zf::verify::CheckReport> reports;
    auto want = [&suite](const char* name) { return suite == "all" || suite == name; };
    if (want("probability")) reports.push_back(zf::verify::check_probability(corpus));
    if (want("corWN")) reports.push_back(zf::verify::check_corWN(corpus));
    if (want("orthogonality")) reports.push_back(zf::verify::check_orthogonality(corpus));
    if (want("gauge")) reports.push_back(zf::verify::check_gauge(corpus, seed));
    if (want("derivative")) reports.push_back(zf::verify::check_derivative(spec));
    if (want("oracle")) reports.push_back(zf::verify::check_oracle(corpus));
    if (want("calibration")) reports.push_back(zf::verify::check_calibration(corpus));
    if (want("kahler-region")) reports.push_back(zf::verify::check_kahler_region(zf::verify::normal_cone_model()));

    bool ok = true;
    Json all = Json::array();
    for (const auto& r : reports) {
        ok = ok && r.passed();
        all.push_back(zf::verify::report_to_json(r));
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.instances << " instances, "
                  << r.failures.size() << " failures)\n";
        for (const auto& n : r.notes) std::cout << "     " << n << "\n";
    }
    if (!out.empty()) zf::io::write_text_file(out, Json{{"seed", seed}, {"reports", all}}.dump(2) + "\n");
    if (!ok) throw DomainExit{};
}

void cmd_scan(const std::string& model_path, const std::string& base_path, const std::string& direction_path,
              const std::string& grid_spec, const std::string& mode, const std::string& out) {
    auto m = load_model(model_path);
    auto base = load_divisor(m, base_path);
    auto dir = load_divisor(m, direction_path);
    dir.s = 0;
    if (mode != "kahler" && mode != "big" && mode != "auto") throw zf::InputError("unknown mode '" + mode + "'");
    if (mode == "big" && m.n != 1) throw zf::InputError("big mode requires n = 1");
    auto grid = parse_grid(grid_spec);

    std::ostringstream csv;
    csv << "t";
    for (const auto& c : m.components) csv << ",mass_" << c.name;
    csv << ",volume,big,status\n";
    for (const auto& t : grid) {
        const zf::ClassVector D = base + t * dir;
        csv << t;
        try {
            zf::DivisorialMeasure mu;
            zf::Rational vol;
            bool kahler = mode != "big" && !zf::kahler_violation(m, D);
            if (kahler) {
                mu = zf::ma_kahler(m, D);
                vol = zf::power_times(m, D, m.n + 1, {});
            } else if (mode == "kahler" || m.n != 1) {
                throw zf::NotKahlerError("not Kähler: " + *zf::kahler_violation(m, D), *zf::kahler_violation(m, D));
            } else {
                zf::SurfaceForm form(m);
                auto z = zf::zariski(form, D);
                mu = zf::ma_big(form, z);
                vol = form.pair(z.P, z.P);
            }
            for (const auto& x : mu.masses) csv << "," << x;
            csv << "," << vol << ",1,ok\n";
        } catch (const zf::Error& e) {
            for (std::size_t i = 0; i < m.size(); ++i) csv << ",";
            bool big = dynamic_cast<const zf::NotBigError*>(&e) == nullptr;
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            csv << ",," << (big ? 1 : 0) << "," << msg << "\n";
        }
    }
    if (out.empty())
        std::cout << csv.str();
    else
        zf::io::write_text_file(out, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zerofiber: Monge-Ampère measures of test configurations on SNC models"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "machine-readable output");

    std::string model, divisor, out, script, target, mode = "auto", method = "fixed-point", trace, suite = "all";
    std::string base, direction, grid;
    double tol = 1e-9;
    int max_iter = 1000, models = 200;
    std::uint64_t seed = 42;

    auto* validate = app.add_subcommand("validate", "check the intersection identities of a model");
    validate->add_option("--model", model, "model JSON")->required();

    auto* blowup = app.add_subcommand("blowup", "build a surface model from a blow-up script");
    blowup->add_option("--script", script, "blow-up script JSON")->required();
    blowup->add_option("--out", out, "output model JSON (default stdout)");

    auto* ma = app.add_subcommand("ma", "Monge-Ampère measure of A + D");
    ma->add_option("--model", model)->required();
    ma->add_option("--divisor", divisor)->required();
    ma->add_option("--mode", mode, "kahler | big | auto")->check(CLI::IsMember({"kahler", "big", "auto"}));
    ma->add_option("--out", out, "measure JSON");

    auto* energy = app.add_subcommand("energy", "energy and its gradient");
    energy->add_option("--model", model)->required();
    energy->add_option("--divisor", divisor)->required();

    auto* zariski = app.add_subcommand("zariski", "Zariski decomposition of A + D (surfaces)");
    zariski->add_option("--model", model)->required();
    zariski->add_option("--divisor", divisor)->required();

    auto* envelope = app.add_subcommand("envelope", "envelope values, Lelong numbers, orthogonality pairing");
    envelope->add_option("--model", model)->required();
    envelope->add_option("--divisor", divisor)->required();

    auto* solve = app.add_subcommand("solve", "solve MA(A + D) = mu");
    solve->add_option("--model", model)->required();
    solve->add_option("--target", target, "measure JSON")->required();
    solve->add_option("--tol", tol)->check(CLI::NonNegativeNumber);
    solve->add_option("--method", method)->check(CLI::IsMember({"fixed-point", "variational"}));
    solve->add_option("--max-iter", max_iter)->check(CLI::NonNegativeNumber);
    solve->add_option("--trace", trace, "per-iteration residual CSV");

    auto* check = app.add_subcommand("check", "run verification suites on a fuzzed corpus");
    check->add_option("--suite", suite, "all or one suite name");
    check->add_option("--seed", seed);
    check->add_option("--models", models, "fuzzed models")->check(CLI::PositiveNumber);
    check->add_option("--out", out, "report JSON");

    auto* scan = app.add_subcommand("scan", "masses along base + t * direction");
    scan->add_option("--model", model)->required();
    scan->add_option("--base", base, "divisor JSON")->required();
    scan->add_option("--direction", direction, "divisor JSON (s ignored)")->required();
    scan->add_option("--grid", grid, "start:step:stop or comma list")->required();
    scan->add_option("--mode", mode)->check(CLI::IsMember({"kahler", "big", "auto"}));
    scan->add_option("--out", out, "CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*validate) cmd_validate(model, json);
        if (*blowup) cmd_blowup(script, out);
        if (*ma) cmd_ma(model, divisor, mode, out, json);
        if (*energy) cmd_energy(model, divisor, json);
        if (*zariski) cmd_zariski(model, divisor, json);
        if (*envelope) cmd_envelope(model, divisor, json);
        if (*solve) cmd_solve(model, target, tol, method, max_iter, trace, json);
        if (*check) cmd_check(suite, seed, models, out);
        if (*scan) cmd_scan(model, base, direction, grid, mode, out);
    } catch (const DomainExit&) {
        return kDomainError;
    } catch (const zf::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const zf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainError;
    }
    return 0;
}
