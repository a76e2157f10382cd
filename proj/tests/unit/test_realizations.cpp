#include <doctest.h>

#include <cmath>

#include "plgz/realizations.hpp"
#include "plgz/weil.hpp"

using namespace plgz;

namespace {

QMat diag(const std::vector<mpq_class>& xs) {
    QMat D(static_cast<int>(xs.size()), static_cast<int>(xs.size()));
    for (size_t i = 0; i < xs.size(); ++i) D(static_cast<int>(i), static_cast<int>(i)) = QE(xs[i]);
    return D;
}

mpq_class rep(const Context& ctx, SquareClass c) { return c.representative(ctx).to_rational(); }

std::vector<std::pair<Family, int>> small_models() {
    return {{Family::SP, 2}, {Family::SP, 3}, {Family::GL, 2}, {Family::GL, 3}, {Family::SU, 2}};
}

}  // namespace

TEST_CASE("realizations carry the table constants") {
    auto ctx = make_context(3);
    RealizationContext sp2(Family::SP, 2, ctx);
    CHECK(sp2.dim_vplus() == 3);
    CHECK(sp2.m_const() == mpq_class(3, 2));
    RealizationContext gl3(Family::GL, 3, ctx);
    CHECK(gl3.dim_vplus() == 9);
    CHECK(gl3.m_const() == 3);
    CHECK(gl3.d() == 2);
    CHECK(gl3.e() == 0);
    RealizationContext su2(Family::SU, 2, ctx);
    CHECK(su2.dim_vplus() == 4);
    CHECK(su2.d() == 2);
    CHECK(su2.e() == 2);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        CAPTURE(family_name(f));
        CAPTURE(n);
        CHECK(R.b_scale() == -1);
        CHECK(2 * R.dim_vplus() == (R.k() + 1) * (2 * R.ell() + R.k() * R.d()));
        CHECK((R.d() - R.e()) % 2 == 0);
    }
    CHECK_THROWS_AS(RealizationContext(Family::SP, 1, ctx), DomainError);
}

TEST_CASE("bracket sanity on basis triples") {
    auto ctx = make_context(3);
    for (auto [f, n] : std::vector<std::pair<Family, int>>{{Family::SP, 2}, {Family::SU, 2}, {Family::GL, 2}}) {
        RealizationContext R(f, n, ctx);
        std::vector<QMat> all = R.levi_basis();
        for (const auto& B : R.plus_basis()) all.push_back(R.X(B));
        for (const auto& C : R.minus_basis()) all.push_back(R.Y(C));
        int bad = 0;
        for (size_t a = 0; a < all.size(); a += 2)
            for (size_t b = 1; b < all.size(); b += 3)
                for (size_t c = 0; c < all.size(); c += 5) {
                    QMat j = bracket(all[a], bracket(all[b], all[c])) + bracket(all[b], bracket(all[c], all[a])) +
                             bracket(all[c], bracket(all[a], all[b]));
                    bad += !j.is_zero();
                }
        CHECK(bad == 0);
        // b is invariant: b([x,y],z) = b(x,[y,z])
        for (size_t a = 0; a < all.size(); a += 3)
            for (size_t b = 0; b < all.size(); b += 4)
                for (size_t c = 0; c < all.size(); c += 5)
                    CHECK(R.b(bracket(all[a], all[b]), all[c]) == R.b(all[a], bracket(all[b], all[c])));
    }
}

TEST_CASE("relative invariants and iota") {
    auto ctx = make_context(3);
    const mpq_class eps = rep(ctx, SquareClass::eps());
    const mpq_class pi = 3;
    RealizationContext sp2(Family::SP, 2, ctx);
    auto d = delta_invariants(sp2, diag({1, -eps}));
    CHECK(d[0] == -eps);
    CHECK(d[1] == 1);

    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        for (auto x : delta_invariants(R, R.I_plus())) CHECK(x == 1);
        for (auto x : nabla_invariants(R, R.I_minus())) CHECK(x == 1);
        CHECK(iota_map(R, R.I_plus()) == R.I_minus());
        mpq_class a(5, 9);
        CHECK(iota_map(R, R.I_plus() * QE(a)) == R.I_minus() * QE(1 / a));
        auto da = delta_invariants(R, R.I_plus() * QE(a));
        for (int j = 0; j <= R.k(); ++j) {
            mpq_class pw = 1;
            for (int t = 0; t < R.k() + 1 - j; ++t) pw *= a;
            CHECK(da[j] == pw);
        }
    }
    CHECK(iota_map(sp2, diag({1, pi})) == diag({-1, -1 / pi}));
    CHECK_THROWS_AS(iota_map(sp2, diag({1, 0})), DomainError);
}

TEST_CASE("nabla of iota and the t(s) exchange") {
    auto ctx = make_context(3);
    std::mt19937_64 rng(11);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        const int k = R.k();
        for (int trial = 0; trial < 20; ++trial) {
            QMat B = random_payload(R, rng);
            auto D = delta_invariants(R, B);
            auto Nb = nabla_invariants(R, iota_map(R, B));
            CHECK(Nb[0] == 1 / D[0]);
            for (int j = 1; j <= k; ++j) CHECK(Nb[j] == D[k + 1 - j] / D[0]);
            // prod nabla_j^{s_j}(iota X) = prod Delta_j^{t(s)_j}(X)
            std::vector<int> s(k + 1);
            for (auto& x : s) x = static_cast<int>(rng() % 7) - 3;
            std::vector<int> t(k + 1);
            t[0] = 0;
            for (int x : s) t[0] -= x;
            for (int i = 1; i <= k; ++i) t[i] = s[k + 1 - i];
            mpq_class lhs = 1, rhs = 1;
            for (int j = 0; j <= k; ++j) {
                for (int r = 0; r < std::abs(s[j]); ++r) lhs = s[j] > 0 ? mpq_class(lhs * Nb[j]) : mpq_class(lhs / Nb[j]);
                for (int r = 0; r < std::abs(t[j]); ++r) rhs = t[j] > 0 ? mpq_class(rhs * D[j]) : mpq_class(rhs / D[j]);
            }
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("Delta_j transforms by the torus characters and is fixed by the nilradical") {
    auto ctx = make_context(3);
    std::mt19937_64 rng(5);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        for (int trial = 0; trial < 20; ++trial) {
            QMat B = random_payload(R, rng);
            auto D = delta_invariants(R, B);
            GroupMove t = random_move(R, rng, MoveKind::Torus);
            auto x = torus_characters(R, t);
            auto Dt = delta_invariants(R, apply_move(R, t, B));
            for (int j = 0; j <= R.k(); ++j) {
                mpq_class c = 1;
                for (int s = j; s <= R.k(); ++s) c *= x[s];
                CHECK(Dt[j] == c * D[j]);
            }
            GroupMove u = random_move(R, rng, MoveKind::Unipotent);
            CHECK(delta_invariants(R, apply_move(R, u, B)) == D);
        }
    }
}

TEST_CASE("orbit labels") {
    auto ctx = make_context(3);
    const mpq_class eps = rep(ctx, SquareClass::eps());
    RealizationContext sp2(Family::SP, 2, ctx);
    auto L = element_orbit(sp2, diag({1, -eps}));
    CHECK(L.rank == 2);
    CHECK(L.witt_index == 0);
    CHECK(L.kernel_rank == 2);
    auto H = element_orbit(sp2, diag({1, -1}));
    CHECK(H.witt_index == 1);
    CHECK(H.kernel_rank == 0);
    auto low = element_orbit(sp2, diag({1, 0}));
    CHECK(low.rank == 1);
    CHECK(low.p_tag.empty());

    RealizationContext su2(Family::SU, 2, ctx);
    auto eta = element_orbit(su2, diag({1, 3}));
    auto id = element_orbit(su2, su2.I_plus());
    CHECK(eta.det_norm_class == -1);
    CHECK(id.det_norm_class == 1);
    CHECK(!eta.same_G_orbit(id));

    // P-tilde tag of I+(a) is a
    SeGroup S(ctx, 1);
    for (auto a0 : S.reps())
        for (auto a1 : S.reps()) {
            auto T = element_orbit(sp2, diag({rep(ctx, a1), rep(ctx, a0)}));
            CHECK(T.p_tag == std::vector<int>{a0.bits(), a1.bits()});
        }

    std::mt19937_64 rng(3);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        for (int trial = 0; trial < 15; ++trial) {
            QMat B = random_payload(R, rng, trial % 2);
            auto base = element_orbit(R, B);
            CHECK(base.rank <= n);
            for (int mv = 0; mv < 5; ++mv) {
                auto moved = element_orbit(R, apply_move(R, random_move(R, rng, MoveKind::General), B));
                CHECK(moved.same_G_orbit(base));
            }
        }
    }
}

TEST_CASE("quadratic forms Q_X and q_{X_i,X_j}") {
    auto ctx = make_context(3);
    RealizationContext sp2(Family::SP, 2, ctx);
    CHECK(rational_rank(gram_QX(sp2, sp2.I_plus())) == 3);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        CAPTURE(family_name(f));
        // diagonal elements with m nonzero class entries
        std::vector<mpq_class> vals = {0, 1, rep(ctx, SquareClass::eps()), 3, 3 * rep(ctx, SquareClass::eps())};
        std::vector<int> idx(n, 0);
        while (true) {
            std::vector<mpq_class> xs;
            int m = 0;
            for (int i : idx) {
                xs.push_back(vals[i]);
                m += i != 0;
            }
            CHECK(rational_rank(gram_QX(R, diag(xs))) == m * R.ell() + m * (m - 1) * R.d() / 2);
            int c = 0;
            while (c < n && ++idx[c] == static_cast<int>(vals.size())) idx[c++] = 0;
            if (c == n) break;
        }
        for (int i = 0; i <= R.k(); ++i)
            for (int j = i + 1; j <= R.k(); ++j) {
                auto G = gram_q_pair(R, i, j);
                CHECK(static_cast<int>(G.size()) == R.d());
                CHECK(rational_rank(G) == R.d());
                auto q = form_of_gram(ctx, G);
                auto reps = represented_classes(q);
                CHECK(std::find(reps.begin(), reps.end(), SquareClass::one()) != reps.end());
                auto inv = isotropy_and_witt(q);
                CHECK(inv.anisotropic_kernel.rank() == R.e());
                CHECK(2 * inv.witt_index == R.d() - R.e());
            }
    }
}

TEST_CASE("2 rho_P from the nilradical") {
    auto ctx = make_context(3);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        auto r = R.two_rho_P();
        for (int s = 0; s <= R.k(); ++s) CHECK(r[s] == R.d() * (R.k() - 2 * s));
    }
}

TEST_CASE("theta determinant is c Delta_0^{-2m}") {
    auto ctx = make_context(3);
    std::mt19937_64 rng(8);
    for (auto [f, n] : small_models()) {
        RealizationContext R(f, n, ctx);
        mpq_class two_m = 2 * R.m_const();
        REQUIRE(two_m.get_den() == 1);
        const long e2m = two_m.get_num().get_si();
        auto c_at = [&](const QMat& B) -> mpq_class {
            mpq_class d0 = delta_invariants(R, B)[0], pw = 1;
            for (long i = 0; i < e2m; ++i) pw *= d0;
            return rational_det(theta_matrix(R, B)) * pw;
        };
        mpq_class c = c_at(R.I_plus());
        CHECK(c != 0);
        CHECK(c_at(R.I_plus() * QE(mpq_class(7, 3))) == c);
        for (int t = 0; t < 3; ++t) CHECK(c_at(random_payload(R, rng)) == c);
    }
}

TEST_CASE("gamma_k agrees with the direct Weil index of Q_{u',v} for k = 1") {
    auto ctx = make_context(3);
    RealizationContext R(Family::SP, 2, ctx);
    SeGroup S(ctx, 1);
    for (auto a0 : S.reps())
        for (auto c1 : S.reps()) {
            QMat u = R.Yj(0) * QE(rep(ctx, a0));
            QMat v = R.Xj(1) * QE(rep(ctx, c1));
            auto G = gram_Q_uv(R, 0, u, v);
            CHECK(G.size() == 1);
            cplx direct = weil_gamma_direct(ctx, G).value;
            cplx formula = gamma_k({a0}, c1, 1, 1, ctx).value;
            CAPTURE(a0.name());
            CAPTURE(c1.name());
            CHECK(std::abs(direct - formula) < 1e-6);
        }
}
