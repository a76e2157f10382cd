// plgz: JSON front end for the library computations and verification suites.
//
// Exit status: 0 when every assertion of the invoked command holds, 1 when one
// fails (the report is still written), 2 for usage errors and bad input.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plgz/census.hpp"
#include "plgz/characters.hpp"
#include "plgz/diagrams.hpp"
#include "plgz/funceq.hpp"
#include "plgz/quadform.hpp"
#include "plgz/realizations.hpp"
#include "plgz/report.hpp"
#include "plgz/weil.hpp"

using namespace plgz;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    int p = 3;
    int precision = 12;
    int depth = 4;
    double tol = 1e-9;
    uint64_t seed = 1;
    std::string output;
    bool summary = false;
    bool timings = false;

    void validate() const {
        if (!is_odd_prime(p)) throw UsageError("p must be an odd prime");
        if (!(tol > 0 && tol <= 1e-6)) throw UsageError("tolerance must lie in (0, 1e-6]");
        if (precision < 2) throw UsageError("precision must be at least 2");
        if (depth < 1) throw UsageError("census depth must be positive");
    }
    json to_json() const {
        return {{"p", p}, {"precision", precision}, {"depth", depth}, {"tol", tol}, {"seed", seed}};
    }
};

struct Outcome {
    json inputs = json::object();
    json results = json::object();
    bool pass = true;
    std::string summary;
    bool summary_has_verdict = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: " + s);
    }
    if (used != s.size()) throw UsageError("not a number: " + s);
    return v;
}

// "re" or "re:im"
cplx parse_complex(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.empty() || parts.size() > 2) throw UsageError("complex numbers are written re or re:im, got " + s);
    return {parse_double(parts[0]), parts.size() > 1 ? parse_double(parts[1]) : 0.0};
}

std::vector<cplx> parse_complex_list(const std::string& s) {
    std::vector<cplx> out;
    for (const auto& t : split(s, ',')) out.push_back(parse_complex(t));
    return out;
}

// "t" or "t:re:im": tame exponent t, value re + i im at pi
TameMultChar parse_character(const Context& ctx, const std::string& s) {
    auto parts = split(s, ':');
    if (parts.empty() || parts.size() == 2 || parts.size() > 3)
        throw UsageError("characters are written t or t:re:im, got " + s);
    const int t = static_cast<int>(parse_double(parts[0]));
    cplx at_pi = parts.size() == 3 ? cplx(parse_double(parts[1]), parse_double(parts[2])) : cplx(1.0);
    return TameMultChar(ctx, at_pi, ((t % (ctx->p() - 1)) + (ctx->p() - 1)) % (ctx->p() - 1));
}

CharTuple parse_characters(const Context& ctx, const std::string& s) {
    CharTuple out;
    for (const auto& t : split(s, ',')) out.push_back(parse_character(ctx, t));
    return out;
}

std::vector<SquareClass> parse_classes(const std::string& s) {
    std::vector<SquareClass> out;
    for (const auto& t : split(s, ',')) out.push_back(SquareClass::parse(t));
    return out;
}

json class_list(const std::vector<SquareClass>& xs) {
    json a = json::array();
    for (auto x : xs) a.push_back(x.name());
    return a;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string rational_string(const mpq_class& x) { return x.get_str(); }

Outcome from_suite(const SuiteResult& r, bool timings) {
    Outcome o;
    o.results = r.to_json(timings);
    o.pass = r.pass;
    o.summary = r.summary();
    o.summary_has_verdict = true;
    return o;
}

WeightedSatakeDiagram diagram_input(const std::string& file, int row, int param) {
    if (!file.empty()) return parse_diagram(read_text(file));
    if (row <= 0) throw UsageError("give --diagram FILE or --row R --param X");
    auto D = table1_diagram(row, param);
    if (!D) throw UsageError("no table diagram for row " + std::to_string(row) + " at " + std::to_string(param));
    return *D;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic prehomogeneous zeta toolkit: computations and verification suites with JSON reports"};
    app.require_subcommand(1);
    CliConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-p,--prime", cfg.p, "odd prime p");
        sub->add_option("--precision", cfg.precision, "p-adic digits carried");
        sub->add_option("--tol", cfg.tol, "tolerance for exact identities, in (0, 1e-6]");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("-o,--output", cfg.output, "write the JSON report to this file");
        sub->add_flag("--summary", cfg.summary, "print a short human summary instead of JSON");
        sub->add_flag("--timings", cfg.timings, "include wall-clock timings in the report");
        return sub;
    };

    std::string diagram_file, form, a_str, c_str, chars, s_str, mu_str, scale, matrix, family = "SP", side = "plus";
    int row = 0, param = 0, d = 1, e = 1, n = 2, trials = 10, points = 5;
    double fe_tol = 1e-3;
    std::string z_str = "0.3:0.2";
    bool with_direct = false, operator_a = false;

    std::function<Outcome(const Context&)> action;

    auto* classify = common(app.add_subcommand("classify", "graded profile of a weighted Satake-Tits diagram"));
    classify->add_option("--diagram", diagram_file, "diagram JSON file");
    classify->add_option("--row", row, "table row instead of a file");
    classify->add_option("--param", param, "parameter of the table row");
    classify->callback([&] {
        action = [&](const Context&) {
            Outcome o;
            o.inputs = {{"diagram", diagram_file}, {"row", row}, {"param", param}};
            auto D = diagram_input(diagram_file, row, param);
            o.results = json::parse(profile_to_json(classify_profile(D)));
            o.summary = "rank " + std::to_string(o.results["rank"].get<int>()) + ", type " +
                        o.results["type"].get<std::string>() + ", 1-type " + o.results["one_type"].get<std::string>();
            return o;
        };
    });

    auto* descend = common(app.add_subcommand("descend", "descent sequence of a diagram"));
    descend->add_option("--diagram", diagram_file, "diagram JSON file");
    descend->add_option("--row", row, "table row instead of a file");
    descend->add_option("--param", param, "parameter of the table row");
    descend->callback([&] {
        action = [&](const Context&) {
            Outcome o;
            o.inputs = {{"diagram", diagram_file}, {"row", row}, {"param", param}};
            auto seq = descent_sequence(diagram_input(diagram_file, row, param));
            json steps = json::array();
            std::string shapes;
            for (const auto& D : seq) {
                steps.push_back({{"shape", shape_name(D)}, {"diagram", json::parse(diagram_to_json(D))}});
                shapes += (shapes.empty() ? "" : " -> ") + shape_name(D);
            }
            o.results = {{"steps", steps}, {"descent_rank", static_cast<int>(seq.size())}};
            o.summary = shapes;
            return o;
        };
    });

    auto* table1 = common(app.add_subcommand("table1", "regenerate the table constants and diff against the golden table"));
    table1->callback([&] { action = [&](const Context&) { return from_suite(check_table1(), cfg.timings); }; });

    auto* quadform = common(app.add_subcommand("quadform", "invariants of a diagonal quadratic form"));
    quadform->add_option("--form", form, "coefficients as square classes, e.g. 1,eps,pi")->required();
    quadform->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"form", form}};
            DiagonalForm f(ctx, parse_classes(form));
            auto inv = isotropy_and_witt(f);
            const bool h = isotropic_hensel(f), i = isotropic_invariant(f);
            o.results = {{"rank", f.rank()},
                         {"disc", f.disc().name()},
                         {"witt_index", inv.witt_index},
                         {"anisotropic_kernel", inv.anisotropic_kernel.to_string()},
                         {"represented", class_list(represented_classes(f))},
                         {"isotropic_hensel", h},
                         {"isotropic_invariant", i},
                         {"gamma", to_json(weil_gamma(f).value)}};
            o.pass = h == i;
            o.summary = f.to_string() + ": Witt index " + std::to_string(inv.witt_index) + ", kernel " +
                        inv.anisotropic_kernel.to_string();
            return o;
        };
    });

    auto* orbit = common(app.add_subcommand("orbit", "orbit label and relative invariants of a V+ payload"));
    orbit->add_option("--family", family, "SP, GL or SU");
    orbit->add_option("--n", n, "matrix size");
    orbit->add_option("--matrix", matrix, "JSON array of rows of scalar strings \"p^v*u\", or a file")->required();
    orbit->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"family", family}, {"n", n}, {"matrix", matrix}};
            RealizationContext R(parse_family(family), n, ctx);
            json M = json::parse(!matrix.empty() && matrix[0] == '[' ? matrix : read_text(matrix));
            if (!M.is_array() || static_cast<int>(M.size()) != n) throw UsageError("matrix needs n rows");
            QMat B(n, n);
            for (int i = 0; i < n; ++i) {
                if (!M[i].is_array() || static_cast<int>(M[i].size()) != n) throw UsageError("matrix needs n columns");
                for (int j = 0; j < n; ++j) {
                    std::string entry = M[i][j].is_string() ? M[i][j].get<std::string>() : M[i][j].dump();
                    B(i, j) = QE(PadicScalar::parse(ctx, entry).to_rational());
                }
            }
            if (!R.valid_payload(B)) throw UsageError("matrix is not a payload of this model");
            auto L = element_orbit(R, B);
            json deltas = json::array();
            for (const auto& x : delta_invariants(R, B)) deltas.push_back(rational_string(x));
            o.results = {{"label", L.to_string()},
                         {"rank", L.rank},
                         {"witt_index", L.witt_index},
                         {"kernel_rank", L.kernel_rank},
                         {"det_norm_class", L.det_norm_class},
                         {"p_tag", L.p_tag},
                         {"delta", deltas}};
            o.summary = L.to_string();
            return o;
        };
    });

    auto* gamma = common(app.add_subcommand("gamma", "Weil index of a form, or the constant gamma_k"));
    gamma->add_option("--form", form, "diagonal form as square classes");
    gamma->add_option("--a", a_str, "a_0..a_{k-1} for gamma_k");
    gamma->add_option("--c", c_str, "c_k for gamma_k");
    gamma->add_option("--d", d, "d");
    gamma->add_option("--e", e, "e");
    gamma->add_flag("--direct", with_direct, "compare gamma_k with the oscillatory sum in the symplectic model");
    gamma->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            if (!form.empty()) {
                DiagonalForm f(ctx, parse_classes(form));
                o.inputs = {{"form", form}};
                const cplx g = weil_gamma(f).value;
                o.results = {{"gamma", to_json(g)}, {"abs", std::abs(g)}};
                o.pass = std::abs(std::abs(g) - 1.0) <= cfg.tol;
                o.summary = "gamma = " + json(to_json(g)).dump();
                return o;
            }
            if (c_str.empty()) throw UsageError("give --form, or --a and --c");
            auto a = parse_classes(a_str);
            const SquareClass c = SquareClass::parse(c_str);
            o.inputs = {{"a", a_str}, {"c", c_str}, {"d", d}, {"e", e}, {"direct", with_direct}};
            const cplx g = gamma_k(a, c, e, d, ctx).value;
            o.results = {{"gamma_k", to_json(g)}};
            o.summary = "gamma_k = " + json(to_json(g)).dump();
            if (with_direct) {
                if (d != 1 || e != 1) throw UsageError("the direct oracle lives in the symplectic model, d = e = 1");
                const int k = static_cast<int>(a.size());
                RealizationContext R(Family::SP, k + 1, ctx);
                QMat u(k + 1, k + 1);
                for (int j = 0; j < k; ++j) u = u + R.Yj(j) * QE(a[j].representative(ctx).to_rational());
                QMat v = R.Xj(k) * QE(c.representative(ctx).to_rational());
                const cplx direct = weil_gamma_direct(ctx, gram_Q_uv(R, k - 1, u, v)).value;
                o.results["direct"] = to_json(direct);
                o.results["residual"] = std::abs(direct - g);
                o.pass = std::abs(direct - g) < 1e-6;
            }
            return o;
        };
    });

    auto* rho = common(app.add_subcommand("rho", "Tate rho factor and local factors of a tame character"));
    rho->add_option("--delta", chars, "character t or t:re:im")->required();
    rho->add_option("--s", s_str, "point re:im")->required();
    rho->add_option("--scale", scale, "additive character psi^a, a as \"p^v*u\"");
    rho->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"delta", chars}, {"s", s_str}, {"scale", scale}};
            const TameMultChar delta = parse_character(ctx, chars);
            const cplx s = parse_complex(s_str);
            const PadicScalar a = scale.empty() ? PadicScalar::from_int(ctx, 1) : PadicScalar::parse(ctx, scale);
            const cplx r = tate_rho(delta, s, a);
            const cplx refl = tate_rho(delta, s) * tate_rho(delta.inverse(), 1.0 - s);
            auto lf = local_factors(delta, s);
            o.results = {{"rho", to_json(r)},
                         {"reflection", to_json(refl)},
                         {"reflection_residual", std::abs(refl - delta.at_minus_one())},
                         {"L0", to_json(lf.L0)},
                         {"eps0", to_json(lf.eps0)}};
            o.pass = std::abs(refl - delta.at_minus_one()) <= cfg.tol;
            o.summary = "rho = " + json(to_json(r)).dump();
            return o;
        };
    });

    auto* dcoef = common(app.add_subcommand("dcoef", "coefficient D^k_{(a,c)}(omega, s)"));
    dcoef->add_option("--d", d, "d");
    dcoef->add_option("--e", e, "e");
    dcoef->add_option("--a", a_str, "a_0..a_k")->required();
    dcoef->add_option("--c", c_str, "c_0..c_k")->required();
    dcoef->add_option("--omega", chars, "omega_0..omega_k, each t or t:re:im")->required();
    dcoef->add_option("--s", s_str, "s_0..s_k, each re:im")->required();
    dcoef->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"d", d}, {"e", e}, {"a", a_str}, {"c", c_str}, {"omega", chars}, {"s", s_str}};
            auto a = parse_classes(a_str), c = parse_classes(c_str);
            auto w = parse_characters(ctx, chars);
            auto s = parse_complex_list(s_str);
            const cplx closed = D_closed(ctx, d, e, a, c, w, s);
            const cplx rec = D_recursive(ctx, d, e, a, c, w, s);
            double worst = std::abs(closed - rec);
            o.results = {{"closed", to_json(closed)}, {"recursive", to_json(rec)}};
            if (e % 2 == 0) {
                const cplx even = D_even_e(ctx, d, e, a, c, w, s);
                o.results["even_e"] = to_json(even);
                worst = std::max(worst, std::abs(closed - even));
            }
            o.results["residual"] = worst;
            o.pass = worst <= cfg.tol;
            o.summary = "D = " + json(to_json(closed)).dump();
            return o;
        };
    });

    auto* bcoef = common(app.add_subcommand("bcoef", "coefficient matrix B(delta, mu)(z), two routes"));
    bcoef->add_option("--d", d, "d");
    bcoef->add_option("--e", e, "e");
    bcoef->add_option("--delta", chars, "delta_0..delta_k")->required();
    bcoef->add_option("--mu", mu_str, "mu_0..mu_k")->required();
    bcoef->add_option("--z", z_str, "z as re:im");
    bcoef->add_flag("--operator", operator_a, "also report the operator A, with orbit blocks for d = e = 1");
    bcoef->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"d", d}, {"e", e}, {"delta", chars}, {"mu", mu_str}, {"z", z_str}, {"operator", operator_a}};
            auto delta = parse_characters(ctx, chars);
            auto mu = parse_complex_list(mu_str);
            auto sp = spectral_params(ctx, static_cast<int>(delta.size()) - 1, e, d, delta, mu);
            const cplx z = parse_complex(z_str);
            auto B1 = B_direct(sp, z), B2 = B_derived(sp, z);
            const double diff = B1.max_diff(B2);
            o.results = {{"spectral", sp.to_json()}, {"direct", B1.to_json()}, {"derived", B2.to_json()}, {"residual", diff}};
            if (operator_a) {
                if (d == 1 && e == 1 && sp.k >= 1) {
                    RealizationContext R(Family::SP, sp.k + 1, ctx);
                    o.results["A"] = A_operator(sp, &R).to_json();
                } else {
                    o.results["A"] = A_operator(sp).to_json();
                }
            }
            o.pass = diff <= cfg.tol;
            o.summary = "B direct against derived: " + std::to_string(diff);
            return o;
        };
    });

    auto* epsilon = common(app.add_subcommand("epsilon", "epsilon and L factors for e in {0, 4}"));
    epsilon->add_option("--d", d, "d");
    epsilon->add_option("--e", e, "e (0 or 4)");
    epsilon->add_option("--delta", chars, "delta_0..delta_k")->required();
    epsilon->add_option("--mu", mu_str, "mu_0..mu_k")->required();
    epsilon->add_option("--z", z_str, "z as re:im");
    epsilon->add_option("--scale", scale, "additive character psi^a, a as \"p^v*u\"");
    epsilon->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"d", d}, {"e", e}, {"delta", chars}, {"mu", mu_str}, {"z", z_str}, {"scale", scale}};
            auto delta = parse_characters(ctx, chars);
            auto sp = spectral_params(ctx, static_cast<int>(delta.size()) - 1, e, d, delta, parse_complex_list(mu_str));
            const cplx z = parse_complex(z_str);
            std::optional<PadicScalar> a;
            if (!scale.empty()) a = PadicScalar::parse(ctx, scale);
            auto E = epsilon_factors(sp, z, a);
            auto Er = epsilon_factors(sp, 1.0 - z, a);
            double sign = 1;
            for (const auto& x : delta) sign *= x.at_minus_one();
            const double refl = std::abs(E.eps_plus * Er.eps_minus - sign);
            const double closed = std::max(std::abs(E.eps_plus - E.eps_plus_closed), std::abs(E.eps_minus - E.eps_minus_closed));
            o.results = E.to_json();
            o.results["reflection_residual"] = refl;
            o.results["closed_form_residual"] = closed;
            o.pass = refl <= cfg.tol && closed <= cfg.tol && E.monomial_residual <= cfg.tol;
            o.summary = "eps+ = " + json(to_json(E.eps_plus)).dump() + ", eps- = " + json(to_json(E.eps_minus)).dump();
            return o;
        };
    });

    auto* vtate = common(app.add_subcommand("verify-tate", "rho reflection and the Tate functional equation"));
    vtate->add_option("--trials", trials, "random functions per character");
    vtate->callback([&] {
        action = [&](const Context&) {
            auto o = from_suite(check_tate_layer({cfg.p}, trials, cfg.seed, cfg.tol), cfg.timings);
            o.inputs = {{"trials", trials}};
            return o;
        };
    });

    auto* vfe1 = common(app.add_subcommand("verify-fe1", "graded rank one functional equation"));
    vfe1->callback([&] {
        action = [&](const Context&) { return from_suite(check_rank_one_fe({cfg.p}, cfg.seed, cfg.tol), cfg.timings); };
    });

    auto* vsp2 = common(app.add_subcommand("verify-fe-sp2", "census functional equation for symmetric 2 x 2 matrices"));
    vsp2->add_option("--depth", cfg.depth, "census depth V");
    vsp2->add_option("--points", points, "evaluation points");
    vsp2->add_option("--fe-tol", fe_tol, "tolerance of the identity");
    vsp2->callback([&] {
        action = [&](const Context&) {
            auto o = from_suite(check_census_fe(cfg.p, cfg.depth, points, fe_tol), cfg.timings);
            o.inputs = {{"points", points}, {"fe_tol", fe_tol}};
            return o;
        };
    });

    auto* vweil = common(app.add_subcommand("verify-weil", "Weil index identities and Weil's Fourier formula"));
    vweil->callback([&] {
        action = [&](const Context&) { return from_suite(check_weil_layer({cfg.p}, cfg.seed, cfg.tol), cfg.timings); };
    });

    auto* census = common(app.add_subcommand("census", "stratum counts of the lattice modulo p^(V+1)"));
    census->add_option("--family", family, "SP or GL");
    census->add_option("--n", n, "matrix size");
    census->add_option("--side", side, "plus or minus");
    census->add_option("--depth", cfg.depth, "census depth V");
    census->callback([&] {
        action = [&](const Context& ctx) {
            Outcome o;
            o.inputs = {{"family", family}, {"n", n}, {"side", side}};
            if (side != "plus" && side != "minus") throw UsageError("side is plus or minus");
            RealizationContext R(parse_family(family), n, ctx);
            Census C = cached_census(R, side == "plus" ? Side::Plus : Side::Minus, cfg.depth);
            int64_t counted = C.tail;
            for (const auto& [key, cnt] : C.counts) counted += cnt;
            o.results = C.to_json();
            o.results["strata"] = static_cast<int64_t>(C.counts.size());
            o.pass = counted == C.total;
            o.summary = std::to_string(C.counts.size()) + " strata, tail " + std::to_string(C.tail) + " of " +
                        std::to_string(C.total);
            return o;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    json report;
    report["command"] = command;
    report["config"] = cfg.to_json();
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        cfg.validate();
        out = action(make_context(cfg.p, cfg.precision));
    } catch (const UsageError& ex) {
        std::cerr << "plgz " << command << ": " << ex.what() << "\n";
        return 2;
    } catch (const DomainError& ex) {
        std::cerr << "plgz " << command << ": " << ex.what() << "\n";
        return 2;
    } catch (const json::exception& ex) {
        std::cerr << "plgz " << command << ": malformed JSON: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "plgz " << command << ": " << ex.what() << "\n";
        return 2;
    }
    report["inputs"] = out.inputs;
    report["results"] = out.results;
    report["pass"] = out.pass;
    if (cfg.timings)
        report["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string text = report.dump(2) + "\n";
    if (!cfg.output.empty()) {
        std::ofstream f(cfg.output);
        if (!f) {
            std::cerr << "plgz: cannot write " << cfg.output << "\n";
            return 2;
        }
        f << text;
    }
    if (cfg.summary && out.summary_has_verdict)
        std::cout << out.summary << "\n";
    else if (cfg.summary)
        std::cout << command << ": " << (out.pass ? "PASS" : "FAIL") << (out.summary.empty() ? "" : "\n") << out.summary
                  << "\n";
    else
        std::cout << text;
    return out.pass ? 0 : 1;
}
