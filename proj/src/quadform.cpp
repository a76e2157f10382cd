#include "plgz/quadform.hpp"

#include <algorithm>
#include <bitset>
#include <set>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace plgz {

DiagonalForm::DiagonalForm(Context ctx, std::vector<SquareClass> coeffs)
    : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {}

DiagonalForm DiagonalForm::from_scalars(const std::vector<PadicScalar>& coeffs) {
    if (coeffs.empty()) throw DomainError("empty form");
    std::vector<SquareClass> c;
    for (const auto& a : coeffs) c.push_back(square_class_of(a));
    return DiagonalForm(coeffs.front().ctx(), std::move(c));
}

DiagonalForm DiagonalForm::hyperbolic(Context ctx, int planes) {
    SquareClass m1 = SquareClass::minus_one(*ctx);
    std::vector<SquareClass> c;
    for (int i = 0; i < planes; ++i) {
        c.push_back(SquareClass::one());
        c.push_back(m1);
    }
    return DiagonalForm(std::move(ctx), std::move(c));
}

SquareClass DiagonalForm::disc() const {
    SquareClass d;
    for (auto c : coeffs_) d = d * c;
    return d;
}

DiagonalForm DiagonalForm::scaled(SquareClass t) const {
    std::vector<SquareClass> c;
    for (auto a : coeffs_) c.push_back(a * t);
    return DiagonalForm(ctx_, std::move(c));
}

DiagonalForm DiagonalForm::operator+(const DiagonalForm& o) const {
    std::vector<SquareClass> c = coeffs_;
    c.insert(c.end(), o.coeffs_.begin(), o.coeffs_.end());
    return DiagonalForm(ctx_ ? ctx_ : o.ctx_, std::move(c));
}

DiagonalForm DiagonalForm::sorted() const {
    auto c = coeffs_;
    std::sort(c.begin(), c.end());
    return DiagonalForm(ctx_, std::move(c));
}

std::string DiagonalForm::to_string() const {
    std::ostringstream os;
    os << "<";
    for (size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i].name();
    os << ">";
    return os.str();
}

// ---------------------------------------------------------------------------

Diagonalization diagonalize_gram(const ScalarMatrix& G) {
    const size_t n = G.size();
    if (n == 0) throw DomainError("empty Gram matrix");
    const Context ctx = G[0][0].ctx();
    for (size_t i = 0; i < n; ++i) {
        if (G[i].size() != n) throw DomainError("Gram matrix not square");
        for (size_t j = 0; j < n; ++j)
            if (!G[i][j].equals(G[j][i])) throw DomainError("Gram matrix not symmetric");
    }
    ScalarMatrix A = G;
    ScalarMatrix P(n, std::vector<PadicScalar>(n, PadicScalar::zero(ctx)));
    for (size_t i = 0; i < n; ++i) P[i][i] = PadicScalar::from_int(ctx, 1);

    auto add_row_col = [&](size_t dst, size_t src, const PadicScalar& c) {
        // basis change e_dst += c e_src
        for (size_t j = 0; j < n; ++j) A[dst][j] = A[dst][j] + c * A[src][j];
        for (size_t j = 0; j < n; ++j) A[j][dst] = A[j][dst] + c * A[j][src];
        for (size_t j = 0; j < n; ++j) P[dst][j] = P[dst][j] + c * P[src][j];
    };
    auto swap_rc = [&](size_t a, size_t b) {
        std::swap(A[a], A[b]);
        for (size_t j = 0; j < n; ++j) std::swap(A[j][a], A[j][b]);
        std::swap(P[a], P[b]);
    };

    for (size_t k = 0; k < n; ++k) {
        int64_t best_diag = PadicScalar::kInfinity, best_off = PadicScalar::kInfinity;
        size_t di = k, oi = k, oj = k;
        for (size_t i = k; i < n; ++i) {
            if (A[i][i].valuation() < best_diag) {
                best_diag = A[i][i].valuation();
                di = i;
            }
            for (size_t j = i + 1; j < n; ++j)
                if (A[i][j].valuation() < best_off) {
                    best_off = A[i][j].valuation();
                    oi = i;
                    oj = j;
                }
        }
        if (best_diag == PadicScalar::kInfinity && best_off == PadicScalar::kInfinity)
            throw DomainError("singular Gram matrix");
        if (best_off < best_diag) {
            add_row_col(oi, oj, PadicScalar::from_int(ctx, 1));
            di = oi;
        }
        if (di != k) swap_rc(di, k);
        for (size_t r = k + 1; r < n; ++r) {
            if (A[r][k].is_zero()) continue;
            PadicScalar c = -(A[r][k] / A[k][k]);
            add_row_col(r, k, c);
            A[r][k] = A[k][r] = PadicScalar::zero(ctx);
        }
    }
    Diagonalization out;
    for (size_t i = 0; i < n; ++i) out.diagonal.push_back(A[i][i]);
    out.form = DiagonalForm::from_scalars(out.diagonal);
    out.witness = std::move(P);
    return out;
}

// ---------------------------------------------------------------------------

static bool isotropic_hensel_search(const DiagonalForm& f);

bool isotropic_hensel(const DiagonalForm& f) {
    // isotropy depends only on the multiset of classes; memoize on it
    uint64_t key = static_cast<uint64_t>(f.ctx()->p());
    int counts[4] = {0, 0, 0, 0};
    for (auto c : f.coeffs()) ++counts[c.bits()];
    for (int c : counts) key = key * 1024 + static_cast<uint64_t>(c);
    static std::mutex mu;
    static std::unordered_map<uint64_t, bool> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    bool r = isotropic_hensel_search(f);
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(key, r);
    return r;
}

static bool isotropic_hensel_search(const DiagonalForm& f) {
    const auto& ctx = *f.ctx();
    const int64_t p = ctx.p();
    const int64_t M = p * p * p;
    // reachable states (value mod p^3, min valuation of a_i x_i capped at 2)
    const size_t S = static_cast<size_t>(M) * 3;
    std::vector<char> cur(S, 0), nxt(S, 0);
    cur[0 * 3 + 2] = 1;
    for (SquareClass a : f.coeffs()) {
        int64_t ai = posmod(a.unit_nonsquare() ? ctx.eps() : 1, M);
        int b = a.odd_valuation() ? 1 : 0;
        if (b) ai = ai * p % M;
        std::set<std::pair<int64_t, int>> moves;
        for (int64_t x = 0; x < M; ++x) {
            int vx = 0;
            if (x == 0) {
                vx = 3;
            } else {
                for (int64_t y = x; y % p == 0; y /= p) ++vx;
            }
            int tv = std::min(2, b + vx);
            moves.insert({ai * (x * x % M) % M, tv});
        }
        std::fill(nxt.begin(), nxt.end(), 0);
        for (int64_t val = 0; val < M; ++val)
            for (int t = 0; t < 3; ++t) {
                if (!cur[val * 3 + t]) continue;
                for (auto [term, tv] : moves) nxt[((val + term) % M) * 3 + std::min(t, tv)] = 1;
            }
        std::swap(cur, nxt);
    }
    for (int64_t val = 0; val < M; ++val)
        for (int t = 0; t <= 1; ++t) {
            int64_t need = (t == 0) ? p : p * p * p;
            if (cur[val * 3 + t] && val % need == 0) return true;
        }
    return false;
}

static std::vector<SquareClass> represented_binary(const LocalFieldContext& ctx, SquareClass a,
                                                   SquareClass b) {
    // t is represented by <a,b> iff <a,b,-t> is isotropic iff (at, bt) = 1
    std::vector<SquareClass> out;
    for (auto t : kAllClasses)
        if (hilbert_symbol(ctx, a * t, b * t) == 1) out.push_back(t);
    return out;
}

bool isotropic_invariant(const DiagonalForm& f) {
    const auto& ctx = *f.ctx();
    const auto& c = f.coeffs();
    SquareClass m1 = SquareClass::minus_one(ctx);
    switch (c.size()) {
        case 1: return false;
        case 2: return (m1 * f.disc()) == SquareClass::one();
        case 3: return hilbert_symbol(ctx, m1 * c[0] * c[2], m1 * c[1] * c[2]) == 1;
        case 4: {
            auto r1 = represented_binary(ctx, c[0], c[1]);
            auto r2 = represented_binary(ctx, m1 * c[2], m1 * c[3]);
            for (auto t : r1)
                if (std::find(r2.begin(), r2.end(), t) != r2.end()) return true;
            return false;
        }
        default: return true;
    }
}

FormInvariants isotropy_and_witt(const DiagonalForm& f) {
    const auto& ctx = f.ctx();
    SquareClass m1 = SquareClass::minus_one(*ctx);
    FormInvariants inv;
    inv.rank = f.rank();
    inv.disc = f.disc();
    std::vector<SquareClass> c = f.coeffs();
    while (c.size() >= 2 && isotropic_hensel(DiagonalForm(ctx, c))) {
        bool done = false;
        for (size_t i = 0; i < c.size() && !done; ++i)
            for (size_t j = i + 1; j < c.size() && !done; ++j)
                if (c[j] == m1 * c[i]) {
                    c.erase(c.begin() + j);
                    c.erase(c.begin() + i);
                    done = true;
                }
        for (size_t i = 0; i < c.size() && !done; ++i)
            for (size_t j = i + 1; j < c.size() && !done; ++j)
                for (size_t l = j + 1; l < c.size() && !done; ++l) {
                    if (!isotropic_hensel(DiagonalForm(ctx, {c[i], c[j], c[l]}))) continue;
                    // <a,b,c> = H + <-abc>
                    SquareClass rest = m1 * c[i] * c[j] * c[l];
                    c.erase(c.begin() + l);
                    c.erase(c.begin() + j);
                    c[i] = rest;
                    done = true;
                }
        if (!done) throw std::logic_error("isotropic form without a splittable sub-form");
        ++inv.witt_index;
    }
    inv.anisotropic_kernel = DiagonalForm(ctx, c);
    return inv;
}

std::vector<SquareClass> represented_classes(const DiagonalForm& f) {
    std::vector<SquareClass> out;
    SquareClass m1 = SquareClass::minus_one(*f.ctx());
    for (auto t : kAllClasses)
        if (isotropic_hensel(f + DiagonalForm(f.ctx(), {m1 * t}))) out.push_back(t);
    return out;
}

static bool kernels_equivalent(const DiagonalForm& a, const DiagonalForm& b) {
    if (a.rank() != b.rank()) return false;
    if (a.rank() == 0) return true;
    if (a.disc() != b.disc()) return false;
    return represented_classes(a) == represented_classes(b);
}

bool forms_equivalent(const DiagonalForm& f, const DiagonalForm& g) {
    if (f.rank() != g.rank()) return false;
    auto a = isotropy_and_witt(f), b = isotropy_and_witt(g);
    return a.witt_index == b.witt_index && kernels_equivalent(a.anisotropic_kernel, b.anisotropic_kernel);
}

FormRelation form_relation(const DiagonalForm& f, const DiagonalForm& g) {
    if (forms_equivalent(f, g)) return FormRelation::Equivalent;
    for (auto t : kAllClasses)
        if (forms_equivalent(f.scaled(t), g)) return FormRelation::SimilarNotEquivalent;
    return FormRelation::Inequivalent;
}

std::string to_string(FormRelation r) {
    switch (r) {
        case FormRelation::Equivalent: return "equivalent";
        case FormRelation::SimilarNotEquivalent: return "similar-not-equivalent";
        case FormRelation::Inequivalent: return "inequivalent";
    }
    return "?";
}

// ---------------------------------------------------------------------------

SeGroup::SeGroup(Context ctx, int e) : ctx_(std::move(ctx)), e_(e) {
    if (e < 0 || e > 4) throw DomainError("e must lie in [0,4]");
    if (e == 0 || e == 4) {
        kind_ = SeKind::Full;
        reps_ = {SquareClass::one()};
    } else if (e == 1 || e == 3) {
        kind_ = SeKind::Squares;
        reps_ = {kAllClasses[0], kAllClasses[1], kAllClasses[2], kAllClasses[3]};
    } else {
        kind_ = SeKind::Norm;
        xi_ = SquareClass::eps();
        reps_ = {SquareClass::one(), SquareClass::pi()};
    }
}

bool SeGroup::contains(SquareClass t) const {
    switch (kind_) {
        case SeKind::Full: return true;
        case SeKind::Squares: return t == SquareClass::one();
        case SeKind::Norm: return hilbert_symbol(*ctx_, xi_, t) == 1;
    }
    return false;
}

int SeGroup::norm_character(SquareClass t) const { return contains(t) ? 1 : -1; }

SquareClass SeGroup::coset_rep(SquareClass t) const {
    for (auto r : reps_)
        if (contains(t * r)) return r;
    throw std::logic_error("coset representative not found");
}

std::string SeGroup::kind_name() const {
    switch (kind_) {
        case SeKind::Full: return "full";
        case SeKind::Squares: return "squares";
        case SeKind::Norm: return "norm";
    }
    return "?";
}

DiagonalForm anisotropic_reference_form(const Context& ctx, int e) {
    SquareClass m1 = SquareClass::minus_one(*ctx);
    SquareClass eps = SquareClass::eps(), pi = SquareClass::pi();
    switch (e) {
        case 0: return DiagonalForm(ctx, {});
        case 1: return DiagonalForm(ctx, {SquareClass::one()});
        case 2: return DiagonalForm(ctx, {SquareClass::one(), m1 * eps});
        case 3: return DiagonalForm(ctx, {SquareClass::one(), m1 * eps, m1 * pi});
        case 4: return DiagonalForm(ctx, {SquareClass::one(), m1 * eps, m1 * pi, eps * pi});
        default: throw DomainError("e must lie in [0,4]");
    }
}

std::pair<DiagonalForm, SeGroup> build_qe_and_Se(int d, int e, const Context& ctx) {
    if (e < 0 || e > 4) throw DomainError("e must lie in [0,4]");
    if (e > d) throw DomainError("e exceeds d");
    if ((d - e) % 2 != 0) throw DomainError("d - e must be even");
    DiagonalForm q = anisotropic_reference_form(ctx, e) + DiagonalForm::hyperbolic(ctx, (d - e) / 2);
    return {DiagonalForm(ctx, q.coeffs()), SeGroup(ctx, e)};
}

std::vector<DiagonalForm> all_class_forms(const Context& ctx, int rank) {
    std::vector<DiagonalForm> out;
    std::vector<int> idx(rank, 0);
    while (true) {
        std::vector<SquareClass> c;
        for (int i : idx) c.push_back(SquareClass(i));
        out.emplace_back(ctx, c);
        int pos = rank - 1;
        while (pos >= 0 && idx[pos] == 3) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < rank; ++j) idx[j] = idx[pos];
    }
    return out;
}

}  // namespace plgz
