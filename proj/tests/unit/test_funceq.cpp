#include "doctest.h"

#include <random>

#include "plgz/funceq.hpp"
#include "plgz/schwartz.hpp"

using namespace plgz;

namespace {

struct Gen {
    Context ctx;
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> U{0.0, 1.0};
    Gen(Context c, uint64_t seed) : ctx(std::move(c)), rng(seed) {}
    TameMultChar chr() {
        return TameMultChar(ctx, std::polar(1.0, kTwoPi * U(rng)), static_cast<int>(rng() % (ctx->p() - 1)));
    }
    cplx point() { return cplx(2 * U(rng) - 1, 2 * U(rng) - 1); }
    cplx mu() { return cplx(0.3 * U(rng) - 0.15, U(rng)); }
};

// (d, e) pairs with d - e even
const std::vector<std::pair<int, int>> kShapes = {{2, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};

}  // namespace

TEST_CASE("spectral parameters") {
    auto ctx = make_context(3);
    auto triv = TameMultChar::trivial(ctx);
    auto sp = spectral_params(ctx, 1, 1, 1, {triv, triv}, {0.0, 0.0});
    CHECK(std::abs(sp.s[0] - 0.25) < 1e-15);
    CHECK(std::abs(sp.s[1] + 0.5) < 1e-15);
    CHECK(sp.rho[0] == doctest::Approx(0.25));
    CHECK(sp.rho[1] == doctest::Approx(-0.25));
    CHECK(sp.m == doctest::Approx(1.5));
    CHECK_THROWS_AS(spectral_params(ctx, 1, 1, 1, {triv}, {0.0, 0.0}), DomainError);

    Gen g(ctx, 1);
    for (int k = 0; k <= 3; ++k) {
        CharTuple delta;
        std::vector<cplx> mu;
        for (int j = 0; j <= k; ++j) {
            delta.push_back(g.chr());
            mu.push_back(g.mu());
        }
        auto P = spectral_params(ctx, k, 0, 2, delta, mu);
        TameMultChar w = P.omega[0];
        cplx acc = P.s[0];
        for (int j = 0; j <= k; ++j) {
            if (j) {
                w = w * P.omega[j];
                acc += P.s[j];
            }
            CHECK(w.same(delta[j].inverse()));
            CHECK(std::abs(acc - (P.rho[j] - mu[j])) < 1e-12);
        }
        auto [w1, s1] = sharp(P.omega, P.s);
        auto [w2, s2] = sharp(w1, s1);
        for (int j = 0; j <= k; ++j) {
            CHECK(w2[j].same(P.omega[j]));
            CHECK(std::abs(s2[j] - P.s[j]) < 1e-12);
        }
        // (s + z)^# = s^# - z on the first entry
        auto [w3, s3] = sharp(P.omega, shift_first(P.s, -0.7));
        CHECK(std::abs(s3[0] - (s1[0] - 0.7)) < 1e-12);
    }
}

TEST_CASE("D coefficients: recursion and closed product agree") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        Gen g(ctx, 10 + p);
        for (auto [d, e] : kShapes) {
            auto S = scaling_group(ctx, d, e);
            for (int k = 0; k <= (p == 3 ? 3 : 2); ++k) {
                auto tuples = all_tuples(S, k + 1);
                CharTuple w;
                std::vector<cplx> s;
                for (int j = 0; j <= k; ++j) {
                    w.push_back(g.chr());
                    s.push_back(g.point());
                }
                for (const auto& a : tuples)
                    for (const auto& c : tuples) {
                        cplx x = D_closed(ctx, d, e, a, c, w, s);
                        CHECK(std::abs(x - D_recursive(ctx, d, e, a, c, w, s)) < 1e-9);
                        if (e % 2 == 0) CHECK(std::abs(x - D_even_e(ctx, d, e, a, c, w, s)) < 1e-9);
                    }
            }
        }
    }
}

TEST_CASE("D index symmetry") {
    auto ctx = make_context(3);
    Gen g(ctx, 4);
    for (auto [d, e] : kShapes) {
        auto S = scaling_group(ctx, d, e);
        for (int k = 1; k <= 2; ++k) {
            CharTuple w;
            std::vector<cplx> s;
            for (int j = 0; j <= k; ++j) {
                w.push_back(g.chr());
                s.push_back(g.point());
            }
            for (const auto& a : all_tuples(S, k))
                for (const auto& c : all_tuples(S, k + 1))
                    for (auto x : S.reps()) {
                        ClassTuple xa, a1 = a, xc;
                        for (auto t : a) xa.push_back(S.coset_rep(x * t));
                        xa.push_back(x);
                        a1.push_back(SquareClass::one());
                        for (auto t : c) xc.push_back(S.coset_rep(x * t));
                        CHECK(std::abs(D_closed(ctx, d, e, xa, c, w, s) - D_closed(ctx, d, e, a1, xc, w, s)) < 1e-9);
                    }
        }
    }
}

TEST_CASE("D0 gives the rank one functional equation on strata zeta functions") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        std::mt19937_64 rng(70 + p);
        for (auto [d, e] : std::vector<std::pair<int, int>>{{2, 0}, {1, 1}, {2, 2}}) {
            auto S = scaling_group(ctx, d, e);
            for (const auto& w : all_tame_characters(ctx, std::polar(1.0, 0.7))) {
                auto f = random_ball_function(p, 1, rng);
                auto Ff = fourier(f);
                for (auto a : S.reps()) {
                    // K(Ff, w^{-1}, -s0-1) in T = q^{-s0}
                    auto lhs = strata_zeta(ctx, Ff, w.inverse(), a, S).scale_var(0, p).invert_var(0);
                    auto rhs = LaurentRational::constant(1, 0.0);
                    for (auto c : S.reps()) rhs = rhs + D0_symbolic(ctx, d, e, a, c, w) * strata_zeta(ctx, f, w, c, S);
                    for (cplx T : {cplx(0.3, 0.2), cplx(-0.25, 0.1), cplx(0.1, -0.45)})
                        CHECK(std::abs(lhs.eval1(T) - rhs.eval1(T)) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("B: the stated sum equals the value read off D") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        Gen g(ctx, 20 + p);
        for (auto [d, e] : kShapes) {
            for (int k = 1; k <= 2; ++k) {
                CharTuple delta;
                std::vector<cplx> mu;
                for (int j = 0; j <= k; ++j) {
                    delta.push_back(g.chr());
                    mu.push_back(g.mu());
                }
                auto sp = spectral_params(ctx, k, e, d, delta, mu);
                cplx z(0.3, 0.7);
                auto B1 = B_direct(sp, z);
                CHECK(B1.max_diff(B_derived(sp, z)) < 1e-9);
                CHECK(B1.rows.size() == static_cast<size_t>(std::pow(scaling_group(ctx, d, e).index(), k)));
                if (e == 0 || e == 4) {
                    CHECK(B1.rows.size() == 1);
                    CHECK(std::abs(B1.entries[0][0] - d_factor(sp, z)) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("B does not see admissible retwists") {
    auto ctx = make_context(3);
    Gen g(ctx, 31);
    for (auto [d, e] : kShapes) {
        auto S = scaling_group(ctx, d, e);
        auto chis = characters_trivial_on(S);
        for (int k = 1; k <= 2; ++k) {
            CharTuple delta;
            std::vector<cplx> mu;
            for (int j = 0; j <= k; ++j) {
                delta.push_back(g.chr());
                mu.push_back(g.mu());
            }
            auto base = B_direct(spectral_params(ctx, k, e, d, delta, mu), cplx(0.2, -0.4));
            for (const auto& c1 : chis)
                for (const auto& c2 : chis) {
                    // chi_0 ... chi_k = 1
                    CharTuple tw = delta;
                    tw[0] = tw[0] * c1;
                    if (k == 1) {
                        tw[1] = tw[1] * c1.inverse();
                    } else {
                        tw[1] = tw[1] * c2;
                        tw[2] = tw[2] * (c1 * c2).inverse();
                    }
                    auto B = B_direct(spectral_params(ctx, k, e, d, tw, mu), cplx(0.2, -0.4));
                    CHECK(base.max_diff(B) < 1e-9);
                }
        }
    }
}

TEST_CASE("A operator and orbit blocks") {
    auto ctx = make_context(3);
    Gen g(ctx, 5);
    RealizationContext R(Family::SP, 2, ctx);
    auto S = scaling_group(ctx, R.d(), R.e());
    CharTuple delta{g.chr(), g.chr()};
    auto sp = spectral_params(ctx, R.k(), R.e(), R.d(), delta, {g.mu(), g.mu()});
    auto A = A_operator(sp, &R);
    CHECK(A.matrix.kind == "A");
    CHECK(A.matrix.max_diff(B_direct(sp, (sp.m + 1) / 2)) < 1e-12);
    CHECK(A.row_orbit.size() == A.matrix.rows.size());
    CHECK(A.orbit_count >= 1);
    CHECK(A.orbit_count <= S.index());
    auto j = A.to_json();
    CHECK(j["entries"].size() == A.matrix.rows.size());
}

TEST_CASE("epsilon factors") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        Gen g(ctx, 40 + p);
        for (auto [d, e] : std::vector<std::pair<int, int>>{{2, 0}, {4, 4}}) {
            for (int k = 0; k <= 2; ++k) {
                CharTuple delta;
                std::vector<cplx> mu;
                double sign = 1;
                for (int j = 0; j <= k; ++j) {
                    delta.push_back(g.chr());
                    mu.push_back(cplx(0.3 * g.U(g.rng) - 0.15, 0.4 * g.U(g.rng)));
                    sign *= delta.back().at_minus_one();
                }
                auto sp = spectral_params(ctx, k, e, d, delta, mu);
                const cplx z(0.31, 0.23);
                auto E = epsilon_factors(sp, z);
                auto Er = epsilon_factors(sp, 1.0 - z);
                CHECK(std::abs(E.eps_plus * Er.eps_minus - sign) < 1e-9);
                CHECK(std::abs(E.eps_plus - E.eps_plus_closed) < 1e-9);
                CHECK(std::abs(E.eps_minus - E.eps_minus_closed) < 1e-9);
                CHECK(E.monomial_residual < 1e-9);
                for (auto a : {PadicScalar::make(ctx, 1, 2), PadicScalar::make(ctx, 0, 2), PadicScalar::make(ctx, -1, 1)}) {
                    auto Ea = epsilon_factors(sp, z, a);
                    cplx pred = E.eps_plus / varpi(sp, a) * std::exp(static_cast<double>(k + 1) * (z - 0.5) * std::log(a.abs()));
                    CHECK(std::abs(Ea.eps_plus - pred) < 1e-9);
                }
            }
        }
    }
    auto ctx = make_context(3);
    auto triv = TameMultChar::trivial(ctx);
    CHECK_THROWS_AS(epsilon_factors(spectral_params(ctx, 1, 2, 2, {triv, triv}, {0.0, 0.0}), 0.3), DomainError);
}

TEST_CASE("correction polynomials leave the product identity intact") {
    auto ctx = make_context(3);
    Gen g(ctx, 77);
    CharTuple delta{g.chr(), g.chr()};
    auto sp = spectral_params(ctx, 1, 0, 2, delta, {g.mu(), g.mu()});
    // Q+(T) = 1 - T/2 and Q-(T) = 1 + T/3; eps^+(z) eps^-(1-z) does not involve them
    LaurentPoly Qp = LaurentPoly::constant(1, 1.0) + LaurentPoly::var(1, 0, 1, -0.5);
    LaurentPoly Qm = LaurentPoly::constant(1, 1.0) + LaurentPoly::var(1, 0, 1, 1.0 / 3);
    const cplx z(0.2, 0.35);
    auto E = epsilon_factors(sp, z, std::nullopt, &Qp, &Qm);
    auto Er = epsilon_factors(sp, 1.0 - z, std::nullopt, &Qp, &Qm);
    CHECK(std::abs(E.eps_plus * Er.eps_minus - delta[0].at_minus_one() * delta[1].at_minus_one()) < 1e-9);
}

TEST_CASE("coefficient matrices serialize with tuple keys") {
    auto ctx = make_context(5);
    Gen g(ctx, 3);
    auto sp = spectral_params(ctx, 1, 2, 2, {g.chr(), g.chr()}, {g.mu(), g.mu()});
    auto B = B_direct(sp, 0.4);
    auto j = B.to_json();
    CHECK(j["kind"] == "B");
    CHECK(j["entries"].size() == 2);
    CHECK(j["entries"].contains("1"));
    CHECK(sp.to_json()["k"] == 1);
}
