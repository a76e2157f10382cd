#include "doctest.h"

#include <random>

#include "plgz/weil.hpp"

using namespace plgz;

namespace {

bool close(cplx a, cplx b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// quadratic Gauss sum over Z/p, normalized
cplx normalized_gauss(int p, int64_t u) {
    cplx s = 0;
    for (int64_t j = 0; j < p; ++j) s += std::polar(1.0, kTwoPi * static_cast<double>(u * j * j % p) / p);
    return s / std::abs(s);
}

}  // namespace

TEST_CASE("alpha: units give 1, odd valuation gives a normalized Gauss sum") {
    for (int p : {3, 5, 7, 11}) {
        auto ctx = make_context(p);
        CHECK(close(weil_alpha(*ctx, SquareClass::one()).value, 1.0));
        CHECK(close(weil_alpha(*ctx, SquareClass::eps()).value, 1.0));
        CHECK(close(weil_alpha(*ctx, SquareClass::pi()).value, normalized_gauss(p, 1)));
        CHECK(close(weil_alpha(*ctx, SquareClass::eps_pi()).value, normalized_gauss(p, ctx->eps() % p)));
    }
}

TEST_CASE("alpha identities") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        SquareClass m1 = SquareClass::minus_one(*ctx);
        for (auto a : kAllClasses) {
            CHECK(close(weil_alpha(*ctx, a).value * weil_alpha(*ctx, m1 * a).value, 1.0));
            CHECK(std::abs(std::abs(weil_alpha(*ctx, a).value) - 1.0) < 1e-9);
            // alpha(c^2 a) through the direct sum with an actual square factor
            mpq_class rep = a.representative(ctx).to_rational();
            for (int c : {2, p, 2 * p}) {
                auto w = weil_gamma_direct(ctx, {{rep * c * c}});
                CHECK(close(w.value, weil_alpha(*ctx, a).value));
            }
        }
        // phi(ab) = phi(a) phi(b) (a,b)
        cplx a1 = weil_alpha(*ctx, SquareClass::one()).value;
        for (auto a : kAllClasses)
            for (auto b : kAllClasses) {
                cplx lhs = weil_alpha(*ctx, a * b).value / a1;
                cplx rhs = weil_alpha(*ctx, a).value / a1 * weil_alpha(*ctx, b).value / a1 *
                           static_cast<double>(hilbert_symbol(*ctx, a, b));
                CHECK(close(lhs, rhs));
            }
    }
}

TEST_CASE("gamma of forms: hyperbolic, scaling law, equivalence invariance") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        SquareClass m1 = SquareClass::minus_one(*ctx);
        CHECK(close(weil_gamma(DiagonalForm::hyperbolic(ctx, 1)).value, 1.0));
        cplx am1 = weil_alpha(*ctx, m1).value;
        for (int r = 1; r <= 4; ++r)
            for (const auto& Q : all_class_forms(ctx, r)) {
                cplx g = weil_gamma(Q).value;
                CHECK(std::abs(std::abs(g) - 1.0) < 1e-9);
                int half = r / 2;
                SquareClass tw = (half % 2 ? m1 : SquareClass::one()) * Q.disc();
                for (auto x : kAllClasses) {
                    cplx expect = g * static_cast<double>(hilbert_symbol(*ctx, x, tw));
                    if (r % 2) expect *= weil_alpha(*ctx, x).value * am1;
                    CHECK(close(weil_gamma(Q.scaled(x)).value, expect));
                }
                for (const auto& Q2 : all_class_forms(ctx, r))
                    if (forms_equivalent(Q, Q2)) CHECK(close(weil_gamma(Q2).value, g));
            }
    }
}

TEST_CASE("gamma is additive, and the direct sum on non-diagonal Gram matrices agrees") {
    std::mt19937 rng(17);
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        std::uniform_int_distribution<int> cls(0, 3), rk(1, 3);
        for (int i = 0; i < 1000; ++i) {
            std::vector<SquareClass> a, b;
            for (int j = rk(rng); j > 0; --j) a.push_back(SquareClass(cls(rng)));
            for (int j = rk(rng); j > 0; --j) b.push_back(SquareClass(cls(rng)));
            DiagonalForm A(ctx, a), B(ctx, b);
            CHECK(close(weil_gamma(A + B).value, weil_gamma(A).value * weil_gamma(B).value));
        }
        std::uniform_int_distribution<int> ent(-4, 4);
        int done = 0;
        while (done < 40) {
            mpq_class g00 = ent(rng) * (rng() % 2 ? p : 1), g01 = ent(rng), g11 = ent(rng) * (rng() % 2 ? p : 1);
            mpq_class det = g00 * g11 - g01 * g01;
            if (det == 0 || g00 == 0 && g01 == 0) continue;
            if (rational_valuation(det, p) > 2) continue;
            ScalarMatrix G = {{PadicScalar::from_rational(ctx, g00), PadicScalar::from_rational(ctx, g01)},
                              {PadicScalar::from_rational(ctx, g01), PadicScalar::from_rational(ctx, g11)}};
            auto diag = diagonalize_gram(G);
            auto direct = weil_gamma_direct(ctx, {{g00, g01}, {g01, g11}});
            CHECK(close(direct.value, weil_gamma(diag.form).value, 1e-8));
            ++done;
        }
    }
}

TEST_CASE("gamma_k formula cases") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        for (int e : {0, 4}) {
            auto q = build_qe_and_Se(e + 2, e, ctx).first;
            cplx g = weil_gamma(q).value;
            CHECK(close(gamma_k({SquareClass::one(), SquareClass::one()}, SquareClass::one(), e, e + 2, ctx).value,
                        g * g));
        }
        auto q2 = build_qe_and_Se(2, 2, ctx).first;
        CHECK(close(gamma_k({SquareClass::one()}, SquareClass::one(), 2, 2, ctx).value, weil_gamma(q2).value));
        for (int e : {0, 2, 4}) {
            int d = e == 0 ? 2 : e;
            auto q = build_qe_and_Se(d, e, ctx).first;
            for (int k = 1; k <= 4; ++k) {
                cplx prod = 1.0;
                for (int j = 1; j <= k; ++j)
                    prod *= gamma_k(std::vector<SquareClass>(j, SquareClass::one()), SquareClass::one(), e, d, ctx).value;
                CHECK(close(prod, std::pow(weil_gamma(q).value, k * (k + 1) / 2)));
            }
        }
        CHECK_THROWS_AS(gamma_k({SquareClass::one()}, SquareClass::eps(), 2, 2, ctx), DomainError);
    }
}
