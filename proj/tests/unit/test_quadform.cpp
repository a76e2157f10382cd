#include "doctest.h"

#include <algorithm>
#include <set>

#include "plgz/quadform.hpp"

using namespace plgz;

namespace {

ScalarMatrix mat(const Context& ctx, std::vector<std::vector<int>> rows) {
    ScalarMatrix m;
    for (auto& r : rows) {
        std::vector<PadicScalar> row;
        for (int v : r) row.push_back(PadicScalar::from_int(ctx, v));
        m.push_back(row);
    }
    return m;
}

void check_witness(const ScalarMatrix& G, const Diagonalization& d) {
    size_t n = G.size();
    auto ctx = G[0][0].ctx();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            PadicScalar s = PadicScalar::zero(ctx);
            for (size_t a = 0; a < n; ++a)
                for (size_t b = 0; b < n; ++b) s = s + d.witness[i][a] * G[a][b] * d.witness[j][b];
            if (i == j)
                CHECK(s.equals(d.diagonal[i]));
            else
                CHECK(s.is_zero());
        }
}

}  // namespace

TEST_CASE("diagonalize_gram examples") {
    auto ctx = make_context(3);
    auto I = mat(ctx, {{1, 0}, {0, 1}});
    auto d1 = diagonalize_gram(I);
    CHECK(d1.form.to_string() == "<1,1>");
    check_witness(I, d1);

    auto H = mat(ctx, {{0, 1}, {1, 0}});
    auto d2 = diagonalize_gram(H);
    check_witness(H, d2);
    CHECK(forms_equivalent(d2.form, DiagonalForm::hyperbolic(ctx, 1)));
    CHECK(isotropy_and_witt(d2.form).witt_index == 1);

    auto G = mat(ctx, {{1, 1}, {1, 4}});
    auto d3 = diagonalize_gram(G);
    check_witness(G, d3);
    CHECK(d3.diagonal[0].valuation() == 0);
    CHECK(d3.diagonal[1].valuation() == 1);

    CHECK_THROWS_AS(diagonalize_gram(mat(ctx, {{1, 1}, {1, 1}})), DomainError);
}

TEST_CASE("isotropy: Hensel search agrees with invariants on all class forms of rank <= 5") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        for (int r = 1; r <= 5; ++r)
            for (const auto& f : all_class_forms(ctx, r)) {
                bool h = isotropic_hensel(f);
                CHECK_MESSAGE(h == isotropic_invariant(f), "p=", p, " form ", f.to_string());
                if (r == 5) CHECK(h);
            }
    }
}

TEST_CASE("anisotropic forms: rank-2 representation, unique rank-4 class, rank-3 values") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        SquareClass m1 = SquareClass::minus_one(*ctx);
        for (const auto& f : all_class_forms(ctx, 2))
            if (!isotropic_hensel(f)) CHECK(represented_classes(f).size() == 2);
            else CHECK(represented_classes(f).size() == 4);
        std::vector<DiagonalForm> aniso4;
        for (const auto& f : all_class_forms(ctx, 4))
            if (!isotropic_hensel(f)) aniso4.push_back(f);
        REQUIRE(!aniso4.empty());
        for (const auto& f : aniso4) CHECK(forms_equivalent(f, aniso4.front()));
        CHECK(!isotropic_hensel(anisotropic_reference_form(ctx, 4)));
        for (const auto& f : all_class_forms(ctx, 3)) {
            if (isotropic_hensel(f)) continue;
            auto rep = represented_classes(f);
            CHECK(rep.size() == 3);
            CHECK(std::find(rep.begin(), rep.end(), m1 * f.disc()) == rep.end());
        }
    }
}

TEST_CASE("Witt decomposition examples and round trip") {
    auto ctx = make_context(5);
    SquareClass m1 = SquareClass::minus_one(*ctx);
    DiagonalForm f(ctx, {SquareClass::one(), m1, SquareClass::pi()});
    auto inv = isotropy_and_witt(f);
    CHECK(inv.witt_index == 1);
    CHECK(inv.anisotropic_kernel.to_string() == "<pi>");

    auto q4 = anisotropic_reference_form(ctx, 4);
    auto inv4 = isotropy_and_witt(q4);
    CHECK(inv4.witt_index == 0);
    CHECK(inv4.anisotropic_kernel.rank() == 4);

    auto ctx3 = make_context(3);
    DiagonalForm g(ctx3, {SquareClass::one(), SquareClass::one()});
    CHECK(!isotropic_hensel(g));
    auto rep = represented_classes(g);
    CHECK(rep == std::vector<SquareClass>{SquareClass::one(), SquareClass::minus_one(*ctx3)});

    for (int p : {3, 5, 7}) {
        auto c = make_context(p);
        for (int r = 1; r <= 5; ++r)
            for (const auto& h : all_class_forms(c, r)) {
                auto i = isotropy_and_witt(h);
                CHECK(h.rank() == 2 * i.witt_index + i.anisotropic_kernel.rank());
                CHECK(i.anisotropic_kernel.rank() <= 4);
                if (i.anisotropic_kernel.rank() > 0) CHECK(!isotropic_hensel(i.anisotropic_kernel));
                auto back = i.anisotropic_kernel + DiagonalForm::hyperbolic(c, i.witt_index);
                CHECK(back.disc() == h.disc());
                CHECK(forms_equivalent(back, h));
            }
    }
}

TEST_CASE("form relations") {
    auto ctx = make_context(5);
    SquareClass m1 = SquareClass::minus_one(*ctx);
    DiagonalForm f(ctx, {SquareClass::one(), m1 * SquareClass::eps()});
    CHECK(form_relation(f, f) == FormRelation::Equivalent);
    // mu f ~ f iff mu = 1 or mu = ab
    for (auto t : kAllClasses) {
        bool eq = forms_equivalent(f.scaled(t), f);
        CHECK(eq == (t == SquareClass::one() || t == m1 * SquareClass::eps()));
    }
    DiagonalForm a(ctx, {SquareClass::one(), SquareClass::pi()});
    DiagonalForm b(ctx, {SquareClass::one(), SquareClass::eps()});
    CHECK(!forms_equivalent(a, b));
    // exhaustive scaling check as the oracle for similarity
    bool sim = false;
    for (auto t : kAllClasses)
        if (a.scaled(t).disc() == b.disc() && represented_classes(a.scaled(t)) == represented_classes(b))
            sim = true;
    CHECK(form_relation(a, b) == (sim ? FormRelation::SimilarNotEquivalent : FormRelation::Inequivalent));
}

TEST_CASE("similarity classes of nondegenerate forms of each rank") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        std::vector<int> counts;
        for (int r = 1; r <= 5; ++r) {
            std::vector<DiagonalForm> reps;
            for (const auto& f : all_class_forms(ctx, r)) {
                bool seen = false;
                for (const auto& g : reps)
                    if (form_relation(f, g) != FormRelation::Inequivalent) seen = true;
                if (!seen) reps.push_back(f);
            }
            counts.push_back(static_cast<int>(reps.size()));
        }
        CHECK(counts == std::vector<int>{1, 4, 2, 5, 2});
    }
}

TEST_CASE("q_e and S_e") {
    for (int p : {3, 5, 7}) {
        auto ctx = make_context(p);
        for (int e = 0; e <= 4; ++e) {
            int d = e + 2;
            auto [q, S] = build_qe_and_Se(d, e, ctx);
            CHECK(q.rank() == d);
            auto inv = isotropy_and_witt(q);
            CHECK(inv.witt_index == (d - e) / 2);
            CHECK(inv.anisotropic_kernel.rank() == e);
            for (auto a : kAllClasses)
                for (auto b : kAllClasses)
                    if (S.contains(a) && S.contains(b)) CHECK(S.contains(a * b));
            int in = 0;
            for (auto a : kAllClasses) in += S.contains(a);
            CHECK(in * S.index() == 4);
            // S_e is exactly the set of scalings fixing q_e up to equivalence
            for (auto t : kAllClasses) CHECK(S.contains(t) == forms_equivalent(q.scaled(t), q));
            for (auto t : kAllClasses) CHECK(S.contains(t * S.coset_rep(t)));
            if (e > 0) {
                auto an = anisotropic_reference_form(ctx, e);
                auto rep = represented_classes(an);
                CHECK(std::find(rep.begin(), rep.end(), SquareClass::one()) != rep.end());
            }
            if (e == 2) {
                auto rep = represented_classes(anisotropic_reference_form(ctx, 2));
                for (auto t : kAllClasses)
                    CHECK(S.contains(t) == (std::find(rep.begin(), rep.end(), t) != rep.end()));
            }
        }
        CHECK(SeGroup(ctx, 0).index() == 1);
        CHECK(SeGroup(ctx, 1).index() == 4);
        CHECK(SeGroup(ctx, 2).index() == 2);
        CHECK_THROWS_AS(build_qe_and_Se(3, 2, ctx), DomainError);
        CHECK_THROWS_AS(build_qe_and_Se(1, 3, ctx), DomainError);
    }
}
