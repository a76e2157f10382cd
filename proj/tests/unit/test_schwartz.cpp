#include "doctest.h"

#include <random>

#include "plgz/schwartz.hpp"

using namespace plgz;

namespace {

double worst_gap(const LaurentRational& a, const LaurentRational& b) {
    double w = 0;
    for (cplx T : {cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.05, -0.3), cplx(0.41, 0.0)})
        w = std::max(w, std::abs(a.eval1(T) - b.eval1(T)));
    return w;
}

BallFunction translate(const BallFunction& f, const RatVec& shift) {
    BallFunction g(f.p(), f.dim());
    for (auto t : f.terms()) {
        mpq_class pair = 0;
        for (int i = 0; i < f.dim(); ++i) {
            t.center[i] += shift[i];
            pair += t.modulation[i] * shift[i];
        }
        t.phase -= pair;
        g.add(t);
    }
    return g;
}

// two modulated balls on Sym(2) coordinates whose K(0,2) coordinate is a unit
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

TEST_CASE("ball functions: evaluation, canonical form, JSON") {
    std::mt19937_64 rng(11);
    for (int p : {3, 5}) {
        auto f = random_ball_function(p, 2, rng);
        auto g = BallFunction::from_json(f.to_json());
        CHECK(same_function(f, g));
        CHECK(same_function(f, f.canonical()));
        std::uniform_int_distribution<int> pick(-20, 20);
        for (int i = 0; i < 20; ++i) {
            RatVec x{mpq_class(pick(rng), p), mpq_class(pick(rng))};
            x[0].canonicalize();
            CHECK(std::abs(f(x) - f.canonical()(x)) < 1e-9);
        }
    }
}

TEST_CASE("Fourier transform of the standard lattice and inversion") {
    for (int p : {3, 5}) {
        for (int dim : {1, 2}) {
            auto one = BallFunction::indicator(p, RatVec(dim, 0), 0);
            CHECK(same_function(fourier(one), one));
            auto ball = BallFunction::indicator(p, RatVec(dim, 0), 2);
            auto fb = fourier(ball);
            CHECK(std::abs(fb(RatVec(dim, 0)) - std::pow(static_cast<double>(p), -2.0 * dim)) < 1e-12);
        }
        std::mt19937_64 rng(5 + p);
        for (int i = 0; i < 10; ++i) {
            auto f = random_ball_function(p, 1 + i % 3, rng);
            CHECK(same_function(fourier_bar(fourier(f)), f));
            // FF f(x) = f(-x)
            auto ff = fourier(fourier(f));
            std::uniform_int_distribution<int> pick(-30, 30);
            for (int j = 0; j < 5; ++j) {
                RatVec x, mx;
                for (int c = 0; c < f.dim(); ++c) {
                    mpq_class v(pick(rng), p);
                    v.canonicalize();
                    x.push_back(v);
                    mx.push_back(-v);
                }
                CHECK(std::abs(ff(x) - f(mx)) < 1e-9);
            }
        }
    }
}

TEST_CASE("Fourier translation law") {
    std::mt19937_64 rng(17);
    for (int p : {3, 5}) {
        for (int i = 0; i < 5; ++i) {
            auto f = random_ball_function(p, 2, rng);
            RatVec a{mpq_class(1, p), mpq_class(2)};
            a[0].canonicalize();
            auto lhs = fourier(translate(f, a));
            auto Ff = fourier(f);
            std::uniform_int_distribution<int> pick(-30, 30);
            for (int j = 0; j < 8; ++j) {
                RatVec y{mpq_class(pick(rng), p * p), mpq_class(pick(rng), p)};
                for (auto& v : y) v.canonicalize();
                cplx expected = psi(a[0] * y[0] + a[1] * y[1], p) * Ff(y);
                CHECK(std::abs(lhs(y) - expected) < 1e-9);
            }
        }
    }
}

TEST_CASE("grid integral agrees with the closed-form integral") {
    std::mt19937_64 rng(23);
    for (int p : {3, 5}) {
        auto f = random_ball_function(p, 2, rng);
        cplx g = grid_integral(p, 2, f.support_level(), f.constancy_level(), [&](const RatVec& x) { return f(x); });
        CHECK(std::abs(g - f.integral()) < 1e-9);
    }
}

TEST_CASE("Tate zeta of the unit ball") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        auto one = BallFunction::indicator(p, {mpq_class(0)}, 0);
        const double q = p;
        auto K = tate_zeta(ctx, one, TameMultChar::trivial(ctx));
        for (cplx T : {cplx(0.3, 0.1), cplx(-0.5, 0.2)})
            CHECK(std::abs(K.eval1(T) - (1.0 - 1.0 / q) / (1.0 - T / q)) < 1e-12);
        for (int t = 1; t < p - 1; ++t) {
            auto Kr = tate_zeta(ctx, one, TameMultChar(ctx, 1.0, t));
            CHECK(std::abs(Kr.eval1(cplx(0.3, 0.1))) < 1e-12);
        }
    }
}

TEST_CASE("Tate functional equation on random ball functions") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        std::mt19937_64 rng(100 + p);
        for (const auto& d : all_tame_characters(ctx, std::polar(1.0, 0.3))) {
            // rho(delta, s+1) in T = q^{-s}
            auto rho = tate_rho_symbolic(d).scale_var(0, 1.0 / p);
            for (int i = 0; i < 10; ++i) {
                auto f = random_ball_function(p, 1, rng);
                auto K = tate_zeta(ctx, f, d);
                auto rhs = rho * tate_zeta(ctx, fourier(f), d.inverse()).scale_var(0, p).invert_var(0);
                CHECK(worst_gap(K, rhs) < 1e-9);
            }
        }
    }
}

TEST_CASE("graded rank one functional equation for each kind of S_e") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        std::mt19937_64 rng(300 + p);
        for (int e : {0, 1, 2}) {
            SeGroup S(ctx, e);
            for (const auto& d : all_tame_characters(ctx, std::polar(1.0, -0.4))) {
                auto f = random_ball_function(p, 1, rng);
                auto Ff = fourier(f);
                for (auto a : S.reps()) {
                    auto lhs = strata_zeta(ctx, f, d, a, S);
                    auto rhs = LaurentRational::constant(1, 0.0);
                    for (auto c : S.reps())
                        rhs = rhs + rho_tilde_symbolic(d, a * c, S).scale_var(0, 1.0 / p) *
                                        strata_zeta(ctx, Ff, d.inverse(), c, S).scale_var(0, p).invert_var(0);
                    CHECK(worst_gap(lhs, rhs) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("strata zeta functions add up to the Tate zeta function") {
    auto ctx = make_context(5);
    std::mt19937_64 rng(41);
    for (int e : {0, 1, 2}) {
        SeGroup S(ctx, e);
        auto f = random_ball_function(5, 1, rng);
        for (const auto& d : all_tame_characters(ctx)) {
            auto total = LaurentRational::constant(1, 0.0);
            for (auto a : S.reps()) total = total + strata_zeta(ctx, f, d, a, S);
            CHECK(worst_gap(total, tate_zeta(ctx, f, d)) < 1e-9);
        }
    }
}

TEST_CASE("measure normalizer does not depend on the base point") {
    auto ctx = make_context(3);
    std::mt19937_64 rng(8);
    for (auto fam : {Family::SP, Family::GL, Family::SU}) {
        for (int n : {2, 3}) {
            if (fam == Family::SU && n != 2) continue;
            RealizationContext R(fam, n, ctx);
            auto base = measure_normalizer(R);
            CHECK(base.abs_c > 0);
            CHECK(base.lambda == doctest::Approx(std::sqrt(base.abs_c)));
            for (int i = 0; i < 3; ++i) {
                auto X0 = random_payload(R, rng);
                CHECK(measure_normalizer(R, X0).c == base.c);
            }
            QMat scaled = R.I_plus() * QE(mpq_class(3));
            CHECK(measure_normalizer(R, scaled).c == base.c);
        }
    }
}

TEST_CASE("theta change of variables at the base point") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        std::mt19937_64 rng(60 + p);
        for (auto fam : {Family::SP, Family::SU}) {
            RealizationContext R(fam, 2, ctx);
            RandomBallOptions o;
            o.terms = 2;
            o.level_max = 1;
            o.center_vmin = 0;
            for (int i = 0; i < 5; ++i) {
                auto f = random_ball_function(p, R.dim_vplus(), rng, o);
                auto chk = theta_measure_check(R, R.I_plus(), f);
                CHECK(chk.residual < 1e-9);
            }
        }
    }
}

TEST_CASE("mean function identity for SP n = 2") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        RealizationContext R(Family::SP, 2, ctx);
        for (int t = 0; t < (p == 3 ? 5 : 1); ++t) {
            auto chk = mean_T_identity(R, 0, unit_corner_function(p, t));
            CHECK(chk.residual < 1e-6);
            CHECK(std::abs(chk.lhs) > 1e-6);
        }
    }
}

TEST_CASE("mean function: translation in u and support") {
    const int p = 3;
    auto ctx = make_context(p);
    RealizationContext R(Family::SP, 2, ctx);
    const int iu = plus_indices(R, 0, 2, 0).at(0);
    const int iv = plus_indices(R, 0, 0, 2).at(0);
    auto f = unit_corner_function(p, 1);
    RatVec shift(3, 0);
    shift[iu] = mpq_class(1, 3);
    auto g = translate(f, shift);
    for (int uu : {0, 1, 2, 5}) {
        for (int vv : {1, 2, 4}) {
            std::vector<mpq_class> ucoord(3, 0), ushift(3, 0), vcoord(3, 0);
            ucoord[iu] = mpq_class(uu, 3);
            ucoord[iu].canonicalize();
            ushift[iu] = ucoord[iu] - shift[iu];
            vcoord[iv] = vv;
            QMat u = R.plus_from_coords(ucoord), us = R.plus_from_coords(ushift), v = R.plus_from_coords(vcoord);
            CHECK(std::abs(mean_T(R, 0, g, u, v) - mean_T(R, 0, f, us, v)) < 1e-9);
        }
    }
    // the K(0,2) coordinate of supp f is a unit, so T vanishes at v of positive valuation
    std::vector<mpq_class> vc(3, 0);
    vc[iv] = 3;
    CHECK(std::abs(mean_T(R, 0, f, R.plus_from_coords(std::vector<mpq_class>(3, 0)), R.plus_from_coords(vc))) < 1e-12);
}

TEST_CASE("Weil formula for rank one and two forms") {
    for (int p : {3, 5}) {
        auto ctx = make_context(p);
        std::mt19937_64 rng(90 + p);
        // <1> against the unit lattice
        auto one = BallFunction::indicator(p, {mpq_class(0)}, 0);
        CHECK(weil_formula_check(ctx, {mpq_class(1)}, one).residual < 1e-6);
        // hyperbolic plane <1, -1>
        auto hyp = weil_formula_check(ctx, {mpq_class(1), mpq_class(-1)},
                                      BallFunction::indicator(p, {mpq_class(0), mpq_class(0)}, 1));
        CHECK(hyp.residual < 1e-6);
        RandomBallOptions o;
        o.terms = 2;
        o.level_max = 1;
        o.center_vmin = 0;
        o.modulation_vmin = 0;
        for (int r : {1, 2}) {
            for (int t = 0; t < 3; ++t) {
                RatVec a;
                for (int i = 0; i < r; ++i) a.push_back(mpq_class((i + t) % 2 ? p : 1) * mpq_class(1 + (t + i) % (p - 1)));
                auto f = random_ball_function(p, r, rng, o);
                CHECK(weil_formula_check(ctx, a, f).residual < 1e-6);
                // f(p x)
                BallFunction fp(p, r);
                for (auto term : f.terms()) {
                    for (auto& c : term.center) c /= p;
                    for (auto& m : term.modulation) m *= p;
                    term.level -= 1;
                    fp.add(term);
                }
                CHECK(weil_formula_check(ctx, a, fp).residual < 1e-6);
            }
        }
    }
}
