#include "plgz/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "plgz/census.hpp"
#include "plgz/characters.hpp"
#include "plgz/diagrams.hpp"
#include "plgz/funceq.hpp"
#include "plgz/quadform.hpp"
#include "plgz/realizations.hpp"
#include "plgz/schwartz.hpp"
#include "plgz/weil.hpp"

namespace plgz {

namespace {

constexpr size_t kKeptMessages = 12;

class Stopwatch {
public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

mpq_class rep(const Context& ctx, SquareClass c) { return c.representative(ctx).to_rational(); }

std::string join_names(const std::vector<SquareClass>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i].name();
    return s;
}

QMat diagonal_payload(const std::vector<mpq_class>& xs) {
    const int n = static_cast<int>(xs.size());
    QMat D(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = QE(xs[i]);
    return D;
}

struct RandomSpectral {
    Context ctx;
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> U{0.0, 1.0};
    RandomSpectral(Context c, uint64_t seed) : ctx(std::move(c)), rng(seed) {}
    TameMultChar character() {
        return TameMultChar(ctx, std::polar(1.0, kTwoPi * U(rng)), static_cast<int>(rng() % (ctx->p() - 1)));
    }
    cplx point() { return cplx(2 * U(rng) - 1, 2 * U(rng) - 1); }
    cplx mu() { return cplx(0.3 * U(rng) - 0.15, 0.4 * U(rng)); }
};

// (d, e) with d - e even, one per value of e
const std::vector<std::pair<int, int>> kShapes = {{2, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};

// two modulated balls on the symmetric 2 x 2 coordinates whose K(0,2) coordinate is a unit
BallFunction unit_corner_function(int p, int t) {
    BallFunction f(p, 3);
    for (int k = 0; k < 2; ++k) {
        BallTerm bt;
        bt.level = 1 + (k + t) % 2;
        bt.center = {mpq_class(1 + k), mpq_class(k * p + t), mpq_class(2 * k + 1)};
        bt.modulation = {mpq_class(0), mpq_class(1, p), mpq_class(t, p)};
        for (auto& x : bt.modulation) x.canonicalize();
        bt.coeff = cplx(1.0 + k, 0.5 * t);
        f.add(bt);
    }
    return f;
}

}  // namespace

nlohmann::json to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

void SuiteResult::check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    pass = false;
    if (failure_messages.size() < kKeptMessages) failure_messages.push_back(what);
}

void SuiteResult::residual(double r, double tol, const std::string& what) {
    if (std::isfinite(r)) max_residual = std::max(max_residual, r);
    else max_residual = INFINITY;
    std::ostringstream os;
    os << what << ": residual " << r;
    check(std::isfinite(r) && r <= tol, os.str());
}

std::string SuiteResult::summary() const {
    std::ostringstream os;
    os << name << ": " << (pass ? "PASS" : "FAIL") << " (" << checks - failures << "/" << checks << " checks";
    if (tolerance > 0) os << ", max residual " << max_residual << " vs tol " << tolerance;
    os << ")";
    for (const auto& m : failure_messages) os << "\n  failed: " << m;
    for (const auto& w : warnings) os << "\n  warning: " << w;
    return os.str();
}

nlohmann::json SuiteResult::to_json(bool with_timing) const {
    nlohmann::json j;
    j["suite"] = name;
    j["pass"] = pass;
    j["checks"] = checks;
    j["failures"] = failures;
    j["max_residual"] = max_residual;
    j["tolerance"] = tolerance;
    j["failure_messages"] = failure_messages;
    j["warnings"] = warnings;
    j["details"] = details;
    if (with_timing) j["seconds"] = seconds;
    return j;
}

SuiteResult check_table1() {
    Stopwatch sw;
    SuiteResult out;
    out.name = "table1";
    auto rows = nlohmann::json::array();
    for (const auto& [row, params] : table1_sample_parameters())
        for (int x : params) {
            auto D = table1_diagram(row, x);
            auto T = table1_entry(row, x);
            std::string tag = "row " + std::to_string(row) + " param " + std::to_string(x);
            out.check(D && T, tag + ": golden entry and diagram exist");
            if (!D || !T) continue;
            GradedProfile P = classify_profile(*D);
            // D4 triality identifies some rows; the matched entry must carry the same constants
            const Table1Entry M = P.row == row ? *T : *table1_entry(P.row, P.param);
            bool ok = M.rank == T->rank && M.d == T->d && M.e == T->e && M.type == T->type;
            ok = ok && P.rank == T->rank && P.descent_rank == T->rank && P.ell == T->ell;
            if (P.rank >= 2) ok = ok && P.d == T->d && P.e == T->e;
            ok = ok && P.type == T->type && P.one_type == T->one_type && P.kappa == (T->one_type == "B" ? 2 : 1);
            out.check(ok, tag + ": profile differs from the golden table");
            rows.push_back({{"row", row},
                            {"param", x},
                            {"rank", P.rank},
                            {"ell", P.ell},
                            {"d", P.d},
                            {"e", P.e},
                            {"kappa", P.kappa},
                            {"type", P.type},
                            {"one_type", P.one_type},
                            {"descent_rank", P.descent_rank},
                            {"matches", ok}});
        }
    out.details["rows"] = rows;
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_quadratic_forms(const std::vector<int>& primes) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "quadratic_forms";
    for (int p : primes) {
        auto ctx = make_context(p);
        const std::string P = "p=" + std::to_string(p);
        long forms = 0, agree = 0;
        for (int r = 1; r <= 5; ++r)
            for (const auto& f : all_class_forms(ctx, r)) {
                const bool h = isotropic_hensel(f);
                ++forms;
                agree += h == isotropic_invariant(f);
                out.check(h == isotropic_invariant(f), P + " isotropy oracles disagree on " + f.to_string());
            }
        // anisotropic rank 4: one class
        std::vector<DiagonalForm> aniso4;
        for (const auto& f : all_class_forms(ctx, 4))
            if (!isotropic_hensel(f)) {
                bool fresh = true;
                for (const auto& g : aniso4) fresh = fresh && !forms_equivalent(f, g);
                if (fresh) aniso4.push_back(f);
            }
        out.check(aniso4.size() == 1, P + " anisotropic rank-4 classes: " + std::to_string(aniso4.size()));
        int aniso2 = 0;
        for (const auto& f : all_class_forms(ctx, 2))
            if (!isotropic_hensel(f)) {
                ++aniso2;
                out.check(represented_classes(f).size() == 2, P + " anisotropic " + f.to_string() +
                                                                  " does not represent exactly 2 classes");
            }
        // S_e is the group of scalings fixing q_e, of index 1, 4, 2, 4, 1
        const int expected_index[5] = {1, 4, 2, 4, 1};
        auto se = nlohmann::json::array();
        for (int e = 0; e <= 4; ++e) {
            auto [q, S] = build_qe_and_Se(e + 2, e, ctx);
            const std::string E = P + " e=" + std::to_string(e);
            out.check(S.index() == expected_index[e], E + ": index of S_e");
            auto inv = isotropy_and_witt(q);
            out.check(inv.anisotropic_kernel.rank() == e && 2 * inv.witt_index == 2, E + ": q_e split");
            for (auto t : kAllClasses)
                out.check(S.contains(t) == forms_equivalent(q.scaled(t), q), E + ": S_e against scalings of q_e");
            se.push_back({{"e", e}, {"kind", S.kind_name()}, {"index", S.index()}, {"reps", join_names(S.reps())}});
        }
        out.details[P] = {{"forms", forms},
                          {"isotropy_agreement", agree},
                          {"anisotropic_rank2_forms", aniso2},
                          {"anisotropic_rank4_classes", static_cast<int>(aniso4.size())},
                          {"S_e", se}};
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_weil_layer(const std::vector<int>& primes, uint64_t seed, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "weil";
    out.tolerance = 1e-6;
    std::mt19937_64 rng(seed);
    for (int p : primes) {
        auto ctx = make_context(p);
        const std::string P = "p=" + std::to_string(p);
        const SquareClass m1 = SquareClass::minus_one(*ctx);
        double worst_alg = 0, worst_formula = 0;
        auto note = [&](double r, double t, const std::string& what, double& worst) {
            worst = std::max(worst, r);
            out.residual(r, t, P + " " + what);
        };
        for (auto a : kAllClasses) {
            cplx x = weil_alpha(*ctx, a).value, y = weil_alpha(*ctx, m1 * a).value;
            note(std::abs(x * y - 1.0), tol, "alpha(a) alpha(-a) at a=" + a.name(), worst_alg);
        }
        note(std::abs(weil_gamma(DiagonalForm::hyperbolic(ctx, 1)).value - 1.0), tol, "gamma(hyperbolic)", worst_alg);
        const cplx am1 = weil_alpha(*ctx, m1).value;
        for (int r = 1; r <= 4; ++r)
            for (const auto& Q : all_class_forms(ctx, r)) {
                const cplx g = weil_gamma(Q).value;
                note(std::abs(std::abs(g) - 1.0), tol, "|gamma| of " + Q.to_string(), worst_alg);
                const SquareClass tw = ((r / 2) % 2 ? m1 : SquareClass::one()) * Q.disc();
                for (auto x : kAllClasses) {
                    cplx expect = g * static_cast<double>(hilbert_symbol(*ctx, x, tw));
                    if (r % 2) expect *= weil_alpha(*ctx, x).value * am1;
                    note(std::abs(weil_gamma(Q.scaled(x)).value - expect), tol,
                         "scaling law for " + Q.to_string() + " by " + x.name(), worst_alg);
                }
            }
        RandomBallOptions o;
        o.terms = 2;
        o.level_max = 1;
        o.center_vmin = 0;
        o.modulation_vmin = 0;
        int formulas = 0;
        for (int r = 1; r <= 2; ++r)
            for (const auto& Q : all_class_forms(ctx, r)) {
                RatVec diag;
                for (auto c : Q.coeffs()) diag.push_back(rep(ctx, c));
                for (int i = 0; i < 5; ++i) {
                    auto f = random_ball_function(p, r, rng, o);
                    note(weil_formula_check(ctx, diag, f).residual, 1e-6, "Weil formula on " + Q.to_string(),
                         worst_formula);
                    ++formulas;
                }
            }
        out.details[P] = {{"identity_residual", worst_alg}, {"formula_residual", worst_formula}, {"formula_checks", formulas}};
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_tate_layer(const std::vector<int>& primes, int trials, uint64_t seed, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "tate";
    out.tolerance = tol;
    std::mt19937_64 rng(seed);
    const double sigmas[4] = {-0.75, 0.25, 0.5, 1.25};
    const double taus[5] = {-2.0, -0.5, 0.0, 0.7, 3.0};
    for (int p : primes) {
        auto ctx = make_context(p);
        const std::string P = "p=" + std::to_string(p);
        double worst_reflection = 0, worst_fe = 0;
        int characters = 0;
        for (cplx at_pi : {cplx(1.0), std::polar(1.0, 0.9)})
            for (const auto& d : all_tame_characters(ctx, at_pi)) {
                ++characters;
                for (double sg : sigmas)
                    for (double tau : taus) {
                        const cplx s(sg, tau);
                        double r = std::abs(tate_rho(d, s) * tate_rho(d.inverse(), 1.0 - s) - d.at_minus_one());
                        worst_reflection = std::max(worst_reflection, r);
                        out.residual(r, tol, P + " rho reflection");
                    }
            }
        for (const auto& d : all_tame_characters(ctx, std::polar(1.0, 0.3))) {
            // rho(delta, s + 1) in T = q^{-s}
            auto rho = tate_rho_symbolic(d).scale_var(0, 1.0 / p);
            for (int i = 0; i < trials; ++i) {
                auto f = random_ball_function(p, 1, rng);
                auto lhs = tate_zeta(ctx, f, d);
                auto rhs = rho * tate_zeta(ctx, fourier(f), d.inverse()).scale_var(0, p).invert_var(0);
                double r = rational_residual(lhs, rhs, 1.0);
                worst_fe = std::max(worst_fe, r);
                out.residual(r, tol, P + " Tate functional equation, tame exponent " + std::to_string(d.tame_exponent));
            }
        }
        out.details[P] = {{"characters", characters},
                          {"grid_points", 20},
                          {"reflection_residual", worst_reflection},
                          {"functional_equation_residual", worst_fe},
                          {"trials_per_character", trials}};
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_rank_one_fe(const std::vector<int>& primes, uint64_t seed, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "rank_one_fe";
    out.tolerance = tol;
    std::mt19937_64 rng(seed);
    for (int p : primes) {
        auto ctx = make_context(p);
        for (int e : {0, 1, 2}) {
            SeGroup S(ctx, e);
            const std::string tag = "p=" + std::to_string(p) + " S_e " + S.kind_name();
            double worst = 0;
            for (const auto& d : all_tame_characters(ctx, std::polar(1.0, -0.4)))
                for (int trial = 0; trial < 2; ++trial) {
                    auto f = random_ball_function(p, 1, rng);
                    auto Ff = fourier(f);
                    for (auto a : S.reps()) {
                        auto lhs = strata_zeta(ctx, f, d, a, S);
                        auto rhs = LaurentRational::constant(1, 0.0);
                        for (auto c : S.reps())
                            rhs = rhs + rho_tilde_symbolic(d, a * c, S).scale_var(0, 1.0 / p) *
                                            strata_zeta(ctx, Ff, d.inverse(), c, S).scale_var(0, p).invert_var(0);
                        double r = rational_residual(lhs, rhs, 1.0);
                        worst = std::max(worst, r);
                        out.residual(r, tol, tag + " class " + a.name());
                    }
                }
            out.details[tag] = worst;
        }
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_coefficients(const std::vector<int>& primes, uint64_t seed, int points, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "coefficients";
    out.tolerance = tol;
    for (int p : primes) {
        auto ctx = make_context(p);
        RandomSpectral g(ctx, seed + p);
        const std::string P = "p=" + std::to_string(p);
        double worst_D = 0, worst_even = 0, worst_B = 0, worst_twist = 0, worst_eps = 0, worst_psi = 0;
        long pairs = 0;
        for (auto [d, e] : kShapes) {
            const auto S = scaling_group(ctx, d, e);
            const std::string shape = P + " d=" + std::to_string(d) + " e=" + std::to_string(e);
            for (int k = 0; k <= 3; ++k) {
                const auto tuples = all_tuples(S, k + 1);
                for (int pt = 0; pt < points; ++pt) {
                    CharTuple w;
                    std::vector<cplx> s;
                    for (int j = 0; j <= k; ++j) {
                        w.push_back(g.character());
                        s.push_back(g.point());
                    }
                    for (const auto& a : tuples)
                        for (const auto& c : tuples) {
                            ++pairs;
                            const cplx x = D_closed(ctx, d, e, a, c, w, s);
                            double r = std::abs(x - D_recursive(ctx, d, e, a, c, w, s));
                            worst_D = std::max(worst_D, r);
                            out.residual(r, tol, shape + " D recursion, k=" + std::to_string(k));
                            if (e % 2 == 0) {
                                r = std::abs(x - D_even_e(ctx, d, e, a, c, w, s));
                                worst_even = std::max(worst_even, r);
                                out.residual(r, tol, shape + " D even-e form, k=" + std::to_string(k));
                            }
                        }
                }
            }
            // B: stated sum against the value read off D, and retwists by characters trivial on S_e
            const auto chis = characters_trivial_on(S);
            for (int k = 1; k <= 2; ++k) {
                CharTuple delta;
                std::vector<cplx> mu;
                for (int j = 0; j <= k; ++j) {
                    delta.push_back(g.character());
                    mu.push_back(g.mu());
                }
                const cplx z(0.3, 0.7);
                auto sp = spectral_params(ctx, k, e, d, delta, mu);
                auto B = B_direct(sp, z);
                double r = B.max_diff(B_derived(sp, z));
                worst_B = std::max(worst_B, r);
                out.residual(r, tol, shape + " B direct against derived, k=" + std::to_string(k));
                for (const auto& c1 : chis)
                    for (const auto& c2 : chis) {
                        CharTuple tw = delta;
                        tw[0] = tw[0] * c1;
                        if (k == 1) {
                            tw[1] = tw[1] * c1.inverse();
                        } else {
                            tw[1] = tw[1] * c2;
                            tw[2] = tw[2] * (c1 * c2).inverse();
                        }
                        r = B.max_diff(B_direct(spectral_params(ctx, k, e, d, tw, mu), z));
                        worst_twist = std::max(worst_twist, r);
                        out.residual(r, tol, shape + " B retwist, k=" + std::to_string(k));
                    }
            }
        }
        // epsilon factors where S_e is everything
        const std::vector<PadicScalar> scales = {PadicScalar::make(ctx, 1, 2), PadicScalar::make(ctx, 0, 2),
                                                 PadicScalar::make(ctx, -1, 1)};
        for (auto [d, e] : std::vector<std::pair<int, int>>{{2, 0}, {4, 4}}) {
            const std::string shape = P + " d=" + std::to_string(d) + " e=" + std::to_string(e);
            for (int k = 0; k <= 2; ++k)
                for (int pt = 0; pt < points; ++pt) {
                    CharTuple delta;
                    std::vector<cplx> mu;
                    double sign = 1;
                    for (int j = 0; j <= k; ++j) {
                        delta.push_back(g.character());
                        mu.push_back(g.mu());
                        sign *= delta.back().at_minus_one();
                    }
                    auto sp = spectral_params(ctx, k, e, d, delta, mu);
                    const cplx z = cplx(0.5, 0.0) + 0.4 * g.point();
                    auto E = epsilon_factors(sp, z);
                    auto Er = epsilon_factors(sp, 1.0 - z);
                    for (double r : {std::abs(E.eps_plus * Er.eps_minus - sign), std::abs(E.eps_plus - E.eps_plus_closed),
                                     std::abs(E.eps_minus - E.eps_minus_closed), E.monomial_residual}) {
                        worst_eps = std::max(worst_eps, r);
                        out.residual(r, tol, shape + " epsilon identities, k=" + std::to_string(k));
                    }
                    for (const auto& a : scales) {
                        auto Ea = epsilon_factors(sp, z, a);
                        cplx pred = E.eps_plus / varpi(sp, a) *
                                    std::exp(static_cast<double>(k + 1) * (z - 0.5) * std::log(a.abs()));
                        double r = std::abs(Ea.eps_plus - pred);
                        worst_psi = std::max(worst_psi, r);
                        out.residual(r, tol, shape + " psi-scaling by " + a.to_string());
                    }
                }
        }
        out.details[P] = {{"D_pairs", pairs},
                          {"D_recursion_residual", worst_D},
                          {"D_even_e_residual", worst_even},
                          {"B_direct_vs_derived", worst_B},
                          {"B_retwist", worst_twist},
                          {"epsilon_identities", worst_eps},
                          {"psi_scaling", worst_psi}};
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_realizations(int p, uint64_t seed, int orbit_elements, int moves) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "realizations";
    auto ctx = make_context(p);
    std::mt19937_64 rng(seed);
    const std::vector<std::pair<Family, int>> models = {{Family::SP, 2}, {Family::SP, 3}, {Family::SP, 4},
                                                        {Family::GL, 2}, {Family::GL, 3}, {Family::SU, 2}};
    const int per_model = (orbit_elements + static_cast<int>(models.size()) - 1) / static_cast<int>(models.size());
    const std::vector<mpq_class> diag_values = {0, 1, rep(ctx, SquareClass::eps()), mpq_class(p),
                                                p * rep(ctx, SquareClass::eps())};
    for (auto [fam, n] : models) {
        RealizationContext R(fam, n, ctx);
        const int k = R.k();
        const std::string M = family_name(fam) + std::to_string(n);
        out.check(2 * R.dim_vplus() == (k + 1) * (2 * R.ell() + k * R.d()), M + ": dim V+");
        for (auto x : delta_invariants(R, R.I_plus())) out.check(x == 1, M + ": Delta_j(I+) = 1");
        out.check(iota_map(R, R.I_plus()) == R.I_minus(), M + ": iota(I+) = I-");

        // rank of Q_X on diagonal class elements
        long rank_cases = 0;
        std::vector<int> idx(n, 0);
        while (true) {
            std::vector<mpq_class> xs;
            int m = 0;
            for (int i : idx) {
                xs.push_back(diag_values[i]);
                m += i != 0;
            }
            ++rank_cases;
            out.check(rational_rank(gram_QX(R, diagonal_payload(xs))) == m * R.ell() + m * (m - 1) * R.d() / 2,
                      M + ": rank Q_X");
            int c = 0;
            while (c < n && ++idx[c] == static_cast<int>(diag_values.size())) idx[c++] = 0;
            if (c == n) break;
        }
        for (int i = 0; i <= k; ++i)
            for (int j = i + 1; j <= k; ++j) {
                auto G = gram_q_pair(R, i, j);
                const std::string tag = M + ": q pair (" + std::to_string(i) + "," + std::to_string(j) + ")";
                out.check(static_cast<int>(G.size()) == R.d() && rational_rank(G) == R.d(), tag + " rank d");
                auto q = form_of_gram(ctx, G);
                auto reps = represented_classes(q);
                out.check(std::find(reps.begin(), reps.end(), SquareClass::one()) != reps.end(), tag + " represents 1");
                auto inv = isotropy_and_witt(q);
                out.check(inv.anisotropic_kernel.rank() == R.e() && 2 * inv.witt_index == R.d() - R.e(),
                          tag + " hyperbolic and anisotropic parts");
            }

        // relative invariance
        for (int t = 0; t < 100; ++t) {
            QMat B = random_payload(R, rng);
            auto D = delta_invariants(R, B);
            GroupMove tm = random_move(R, rng, MoveKind::Torus);
            auto x = torus_characters(R, tm);
            auto Dt = delta_invariants(R, apply_move(R, tm, B));
            bool ok = true;
            for (int j = 0; j <= k; ++j) {
                mpq_class c = 1;
                for (int s = j; s <= k; ++s) c *= x[s];
                ok = ok && Dt[j] == c * D[j];
            }
            out.check(ok, M + ": Delta_j under a torus move");
            GroupMove um = random_move(R, rng, MoveKind::Unipotent);
            out.check(delta_invariants(R, apply_move(R, um, B)) == D, M + ": Delta_j under a unipotent move");
        }

        // orbit labels under general moves
        for (int t = 0; t < per_model; ++t) {
            QMat B = random_payload(R, rng, t % 4 != 0);
            auto base = element_orbit(R, B);
            int moved_ok = 0;
            for (int mv = 0; mv < moves; ++mv)
                moved_ok += element_orbit(R, apply_move(R, random_move(R, rng, MoveKind::General), B)).same_G_orbit(base);
            out.check(moved_ok == moves, M + ": orbit label moved by the group, element " + base.to_string());
        }

        // nabla(iota X) against Delta(X), and the exchange of exponents t(s)
        for (int t = 0; t < 20; ++t) {
            QMat B = random_payload(R, rng);
            auto D = delta_invariants(R, B);
            auto Nb = nabla_invariants(R, iota_map(R, B));
            bool ok = Nb[0] == 1 / D[0];
            for (int j = 1; j <= k; ++j) ok = ok && Nb[j] == D[k + 1 - j] / D[0];
            std::vector<int> s(k + 1), ts(k + 1);
            for (auto& x : s) x = static_cast<int>(rng() % 7) - 3;
            for (int x : s) ts[0] -= x;
            for (int i = 1; i <= k; ++i) ts[i] = s[k + 1 - i];
            mpq_class lhs = 1, rhs = 1;
            for (int j = 0; j <= k; ++j) {
                for (int r = 0; r < std::abs(s[j]); ++r) lhs = s[j] > 0 ? mpq_class(lhs * Nb[j]) : mpq_class(lhs / Nb[j]);
                for (int r = 0; r < std::abs(ts[j]); ++r) rhs = ts[j] > 0 ? mpq_class(rhs * D[j]) : mpq_class(rhs / D[j]);
            }
            out.check(ok && lhs == rhs, M + ": nabla of iota and t(s)");
        }
        out.details[M] = {{"dim_vplus", R.dim_vplus()},
                          {"ell", R.ell()},
                          {"d", R.d()},
                          {"e", R.e()},
                          {"rank_cases", rank_cases},
                          {"orbit_elements", per_model},
                          {"moves_per_element", moves}};
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_gamma_oracle(const std::vector<int>& primes, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "gamma_oracle";
    out.tolerance = tol;
    for (int p : primes) {
        auto ctx = make_context(p);
        for (int k = 1; k <= 2; ++k) {
            RealizationContext R(Family::SP, k + 1, ctx);
            const SeGroup S = scaling_group(ctx, R.d(), R.e());
            const auto& reps = S.reps();
            const std::string tag = "p=" + std::to_string(p) + " k=" + std::to_string(k);
            double worst = 0;
            int cases = 0;
            for (const auto& a : all_tuples(S, k))
                for (auto c : reps) {
                    QMat u(k + 1, k + 1);
                    for (int j = 0; j < k; ++j) u = u + R.Yj(j) * QE(rep(ctx, a[j]));
                    QMat v = R.Xj(k) * QE(rep(ctx, c));
                    cplx direct = weil_gamma_direct(ctx, gram_Q_uv(R, k - 1, u, v)).value;
                    cplx formula = gamma_k(a, c, R.e(), R.d(), ctx).value;
                    double r = std::abs(direct - formula);
                    worst = std::max(worst, r);
                    ++cases;
                    out.residual(r, tol, tag + " a=(" + join_names(a) + ") c=" + c.name());
                }
            out.details[tag] = {{"cases", cases}, {"residual", worst}};
        }
    }
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_mean_identity(int p, int functions, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "mean_identity";
    out.tolerance = tol;
    auto ctx = make_context(p);
    RealizationContext R(Family::SP, 2, ctx);
    auto rows = nlohmann::json::array();
    for (int t = 0; t < functions; ++t) {
        auto chk = mean_T_identity(R, 0, unit_corner_function(p, t));
        out.residual(chk.residual, tol, "function " + std::to_string(t));
        out.check(std::abs(chk.lhs) > 1e-6, "function " + std::to_string(t) + " has a nonzero integral");
        rows.push_back({{"lhs", to_json(chk.lhs)}, {"rhs", to_json(chk.rhs)}, {"residual", chk.residual}});
    }
    out.details["p"] = p;
    out.details["functions"] = rows;
    out.seconds = sw.seconds();
    return out;
}

SuiteResult check_census_fe(int p, int depth, int points, double tol) {
    Stopwatch sw;
    SuiteResult out;
    out.name = "census_fe";
    out.tolerance = tol;
    auto ctx = make_context(p);
    RealizationContext R(Family::SP, 2, ctx);
    std::vector<std::vector<cplx>> pts = {{cplx(0.3, 0.2), cplx(0.45, -0.1)}, {cplx(0.7, 0.0), cplx(0.2, 0.5)},
                                          {cplx(1.1, -0.3), cplx(0.35, 0.0)}, {cplx(0.55, 0.4), cplx(0.8, -0.2)},
                                          {cplx(0.25, -0.6), cplx(0.6, 0.3)}};
    for (int i = static_cast<int>(pts.size()); i < points; ++i)
        pts.push_back({cplx(0.2 + 0.1 * (i % 7), 0.3 - 0.05 * i), cplx(0.4 + 0.07 * (i % 5), 0.1 * (i % 3))});
    pts.resize(points);
    // omega(pi) among the roots of unity the reconstruction searches
    const std::vector<std::pair<std::string, CharTuple>> omegas = {
        {"trivial", {TameMultChar::trivial(ctx), TameMultChar::trivial(ctx)}},
        {"ramified", {TameMultChar(ctx, -1.0, 1), TameMultChar(ctx, cplx(0, 1), 0)}}};
    double worst_relative = 0;
    for (const auto& [label, omega] : omegas) {
        auto chk = verify_fe_census(R, depth, omega, pts);
        out.details[label] = chk.to_json();
        if (!chk.reconstructed) {
            for (const auto& w : chk.warnings) out.warnings.push_back(label + ": " + w);
            out.warnings.push_back(label + ": reconstruction incomplete, identity not evaluated");
            continue;
        }
        worst_relative = std::max(worst_relative, chk.max_relative);
        out.residual(chk.max_residual, tol, "omega " + label);
    }
    out.details["p"] = p;
    out.details["depth"] = depth;
    out.details["max_relative"] = worst_relative;
    out.seconds = sw.seconds();
    return out;
}

}  // namespace plgz
