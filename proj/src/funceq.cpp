#include "plgz/funceq.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "plgz/schwartz.hpp"
#include "plgz/weil.hpp"

namespace plgz {

namespace {

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

std::string tuple_key(const ClassTuple& t) {
    std::string s;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += t[i].name();
    }
    return s;
}

double class_abs(const Context& ctx, SquareClass a) {
    return a.odd_valuation() ? 1.0 / ctx->p() : 1.0;
}

// q^{-s} |x|^s style powers
cplx abs_pow(double absval, cplx s) { return std::exp(s * std::log(absval)); }

// omega_0 ... omega_j
TameMultChar partial_product(const CharTuple& omega, int j) {
    TameMultChar w = omega[0];
    for (int i = 1; i <= j; ++i) w = w * omega[i];
    return w;
}

cplx partial_sum(const std::vector<cplx>& s, int j) {
    cplx t = 0;
    for (int i = 0; i <= j; ++i) t += s[i];
    return t;
}

void check_indices(const ClassTuple& a, const ClassTuple& c, const CharTuple& omega, const std::vector<cplx>& s) {
    if (a.empty() || a.size() != c.size() || a.size() != omega.size() || a.size() != s.size())
        throw DomainError("D coefficient: index and parameter lengths differ");
}

// D entries reuse a handful of rho~ and gamma_k values across all index pairs
cplx memo_rho_tilde(const TameMultChar& w, cplx arg, SquareClass x, const SeGroup& S) {
    using Key = std::tuple<int, int, int, double, double, double, double, int>;
    thread_local std::map<Key, cplx> memo;
    const Key key{w.ctx->p(), S.e(), w.tame_exponent, w.value_at_pi.real(), w.value_at_pi.imag(),
                  arg.real(), arg.imag(), x.bits()};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (memo.size() > (1u << 14)) memo.clear();
    return memo[key] = rho_tilde(w, arg, x, S);
}

cplx memo_gamma_k(const ClassTuple& a, SquareClass c, int e, int d, const Context& ctx) {
    using Key = std::tuple<int, int, int, std::vector<int>, int>;
    thread_local std::map<Key, cplx> memo;
    std::vector<int> bits;
    for (auto x : a) bits.push_back(x.bits());
    const Key key{ctx->p(), e, d, bits, c.bits()};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    return memo[key] = gamma_k(a, c, e, d, ctx).value;
}

// (omega_0..omega_j)(-1) rho~((omega_0..omega_j)^{-1}, -(s_0+..+s_j + jd/2); -a_j c_j)
cplx level_factor(const Context& ctx, int d, const SeGroup& S, const ClassTuple& a, const ClassTuple& c,
                  const CharTuple& omega, const std::vector<cplx>& s, int j) {
    const TameMultChar w = partial_product(omega, j);
    const cplx arg = -(partial_sum(s, j) + 0.5 * j * d);
    const SquareClass x = SquareClass::minus_one(*ctx) * a[j] * c[j];
    return w.at_minus_one() * memo_rho_tilde(w.inverse(), arg, x, S);
}

ClassTuple prefix(const ClassTuple& a, int len) { return ClassTuple(a.begin(), a.begin() + len); }

}  // namespace

cplx SpectralParams::c_factor(const ClassTuple& a) const {
    if (static_cast<int>(a.size()) != k) throw DomainError("c factor needs k indices");
    cplx v = 1.0;
    for (int j = 0; j < k; ++j) v *= delta[j](a[j]) * abs_pow(class_abs(ctx, a[j]), -(rho[j] - mu[j]));
    return v;
}

nlohmann::json SpectralParams::to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["d"] = d;
    j["e"] = e;
    j["kappa"] = kappa;
    j["m"] = m;
    j["p"] = ctx->p();
    auto chars = nlohmann::json::array();
    for (const auto& x : delta)
        chars.push_back({{"at_pi", cjson(x.value_at_pi)}, {"tame_exponent", x.tame_exponent}});
    j["delta"] = chars;
    auto mus = nlohmann::json::array(), ss = nlohmann::json::array();
    for (auto z : mu) mus.push_back(cjson(z));
    for (auto z : s) ss.push_back(cjson(z));
    j["mu"] = mus;
    j["s"] = ss;
    j["rho"] = rho;
    return j;
}

SpectralParams spectral_params(const Context& ctx, int k, int e, int d, CharTuple delta, std::vector<cplx> mu) {
    if (k < 0) throw DomainError("k must be non-negative");
    if (static_cast<int>(delta.size()) != k + 1 || static_cast<int>(mu.size()) != k + 1)
        throw DomainError("spectral parameters need k+1 characters and k+1 exponents");
    SpectralParams sp;
    sp.ctx = ctx;
    sp.k = k;
    sp.e = e;
    sp.d = d;
    sp.m = 1.0 + 0.5 * k * d;
    sp.delta = std::move(delta);
    sp.mu = std::move(mu);
    sp.omega.push_back(sp.delta[0].inverse());
    for (int j = 1; j <= k; ++j) sp.omega.push_back(sp.delta[j - 1] * sp.delta[j].inverse());
    sp.s.push_back(0.25 * k * d - sp.mu[0]);
    for (int j = 1; j <= k; ++j) sp.s.push_back(sp.mu[j - 1] - sp.mu[j] - 0.5 * d);
    for (int j = 0; j <= k; ++j) sp.rho.push_back(0.25 * d * (k - 2 * j));
    return sp;
}

std::pair<CharTuple, std::vector<cplx>> sharp(const CharTuple& omega, const std::vector<cplx>& s) {
    const int k = static_cast<int>(omega.size()) - 1;
    if (k < 0 || s.size() != omega.size()) throw DomainError("sharp: length mismatch");
    CharTuple w{partial_product(omega, k).inverse()};
    std::vector<cplx> t{-partial_sum(s, k)};
    for (int j = k; j >= 1; --j) {
        w.push_back(omega[j]);
        t.push_back(s[j]);
    }
    return {w, t};
}

std::vector<cplx> shift_first(std::vector<cplx> s, cplx z) {
    s.at(0) -= z;
    return s;
}

std::vector<ClassTuple> all_tuples(const SeGroup& S, int len) {
    std::vector<ClassTuple> out{ClassTuple{}};
    for (int i = 0; i < len; ++i) {
        std::vector<ClassTuple> next;
        for (const auto& t : out)
            for (auto r : S.reps()) {
                ClassTuple u = t;
                u.push_back(r);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

SeGroup scaling_group(const Context& ctx, int d, int e) { return build_qe_and_Se(d, e, ctx).second; }

cplx D_closed(const Context& ctx, int d, int e, const ClassTuple& a, const ClassTuple& c, const CharTuple& omega,
              const std::vector<cplx>& s) {
    check_indices(a, c, omega, s);
    const int k = static_cast<int>(a.size()) - 1;
    const SeGroup S = scaling_group(ctx, d, e);
    cplx v = 1.0;
    for (int j = 1; j <= k; ++j) v *= memo_gamma_k(prefix(a, j), c[j], e, d, ctx);
    for (int j = 0; j <= k; ++j) v *= level_factor(ctx, d, S, a, c, omega, s, j);
    return v;
}

cplx D_recursive(const Context& ctx, int d, int e, const ClassTuple& a, const ClassTuple& c, const CharTuple& omega,
                 const std::vector<cplx>& s) {
    check_indices(a, c, omega, s);
    const int k = static_cast<int>(a.size()) - 1;
    const SeGroup S = scaling_group(ctx, d, e);
    if (k == 0) {
        const SquareClass x = SquareClass::minus_one(*ctx) * a[0] * c[0];
        return omega[0].at_minus_one() * rho_tilde(omega[0].inverse(), -s[0], x, S);
    }
    const cplx top = memo_gamma_k(prefix(a, k), c[k], e, d, ctx) * level_factor(ctx, d, S, a, c, omega, s, k);
    return top * D_recursive(ctx, d, e, prefix(a, k), prefix(c, k), CharTuple(omega.begin(), omega.end() - 1),
                             std::vector<cplx>(s.begin(), s.end() - 1));
}

cplx D_even_e(const Context& ctx, int d, int e, const ClassTuple& a, const ClassTuple& c, const CharTuple& omega,
              const std::vector<cplx>& s) {
    check_indices(a, c, omega, s);
    if (e != 0 && e != 2 && e != 4) throw DomainError("even-e closed form needs e in {0, 2, 4}");
    const int k = static_cast<int>(a.size()) - 1;
    auto [q, S] = build_qe_and_Se(d, e, ctx);
    cplx v = std::pow(weil_gamma(q).value, k * (k + 1) / 2);
    if (e == 2) {
        for (int j = 1; j <= k; ++j) {
            SquareClass prod = SquareClass::one();
            for (int i = 0; i < j; ++i) prod = prod * a[i];
            v *= std::pow(static_cast<double>(S.norm_character(c[j])), j) * static_cast<double>(S.norm_character(prod));
        }
    }
    for (int j = 0; j <= k; ++j) {
        const TameMultChar w = partial_product(omega, j);
        const cplx arg = -(partial_sum(s, j) + 0.5 * j * d);
        if (e == 2)
            v *= w.at_minus_one() * memo_rho_tilde(w.inverse(), arg, SquareClass::minus_one(*ctx) * a[j] * c[j], S);
        else
            v *= w.at_minus_one() * tate_rho(w.inverse(), arg);
    }
    return v;
}

LaurentRational D0_symbolic(const Context& ctx, int d, int e, SquareClass a, SquareClass c,
                            const TameMultChar& omega0) {
    const SeGroup S = scaling_group(ctx, d, e);
    // rho~ in q^{-s'} with s' = -s_0, so q^{-s'} = T^{-1}
    LaurentRational r = rho_tilde_symbolic(omega0.inverse(), SquareClass::minus_one(*ctx) * a * c, S);
    return r.invert_var(0) * cplx(omega0.at_minus_one());
}

nlohmann::json CoeffMatrix::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    nlohmann::json ent = nlohmann::json::object();
    for (size_t r = 0; r < rows.size(); ++r) {
        nlohmann::json row = nlohmann::json::object();
        for (size_t c = 0; c < cols.size(); ++c) row[tuple_key(cols[c])] = cjson(entries[r][c]);
        ent[tuple_key(rows[r])] = row;
    }
    j["entries"] = ent;
    return j;
}

double CoeffMatrix::max_diff(const CoeffMatrix& o) const {
    if (rows.size() != o.rows.size() || cols.size() != o.cols.size()) return INFINITY;
    double m = 0;
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < cols.size(); ++c) m = std::max(m, std::abs(entries[r][c] - o.entries[r][c]));
    return m;
}

CoeffMatrix B_direct(const SpectralParams& sp, cplx z) {
    if (sp.k < 1) throw DomainError("B needs k >= 1");
    const Context& ctx = sp.ctx;
    const int k = sp.k;
    const SeGroup S = scaling_group(ctx, sp.d, sp.e);
    const SquareClass m1 = SquareClass::minus_one(*ctx);
    CoeffMatrix B;
    B.kind = "B";
    B.rows = B.cols = all_tuples(S, k);
    for (const auto& a : B.rows) {
        std::vector<cplx> row;
        for (const auto& c : B.cols) {
            cplx sum = 0;
            for (auto y : S.reps()) {
                cplx t = gamma_k(a, y, sp.e, sp.d, ctx).value * sp.delta[k].at_minus_one() *
                         rho_tilde(sp.delta[k], sp.mu[k] - z + 1.0, m1 * y, S);
                for (int j = 1; j <= k - 1; ++j)
                    t *= gamma_k(prefix(a, j), S.coset_rep(y * c[j]), sp.e, sp.d, ctx).value;
                for (int j = 0; j <= k - 1; ++j)
                    t *= sp.delta[j].at_minus_one() * rho_tilde(sp.delta[j], sp.mu[j] - z + 1.0, m1 * a[j] * c[j] * y, S);
                sum += t;
            }
            row.push_back(sp.c_factor(a) / sp.c_factor(c) * sum);
        }
        B.entries.push_back(std::move(row));
    }
    return B;
}

CoeffMatrix B_derived(const SpectralParams& sp, cplx z) {
    if (sp.k < 1) throw DomainError("B needs k >= 1");
    const Context& ctx = sp.ctx;
    const int k = sp.k;
    const SeGroup S = scaling_group(ctx, sp.d, sp.e);
    const std::vector<cplx> s_shift = shift_first(sp.s, (sp.m + 1) / 2 - z);
    CoeffMatrix B;
    B.kind = "B";
    B.rows = B.cols = all_tuples(S, k);
    for (const auto& a : B.rows) {
        std::vector<cplx> row;
        for (const auto& c : B.cols) {
            ClassTuple cc = c;
            cc.push_back(SquareClass::one());
            cplx sum = 0;
            for (auto x : S.reps()) {
                ClassTuple xa;
                for (auto t : a) xa.push_back(S.coset_rep(x * t));
                xa.push_back(x);
                sum += D_recursive(ctx, sp.d, sp.e, xa, cc, sp.omega, s_shift);
            }
            row.push_back(sp.c_factor(a) / sp.c_factor(c) * sum);
        }
        B.entries.push_back(std::move(row));
    }
    return B;
}

nlohmann::json OperatorA::to_json() const {
    nlohmann::json j = matrix.to_json();
    j["orbit_count"] = orbit_count;
    nlohmann::json orb = nlohmann::json::object();
    for (size_t r = 0; r < matrix.rows.size(); ++r) orb[tuple_key(matrix.rows[r])] = row_orbit[r];
    j["row_orbit"] = orb;
    return j;
}

OperatorA A_operator(const SpectralParams& sp, const RealizationContext* R) {
    OperatorA A;
    A.matrix = B_direct(sp, (sp.m + 1) / 2);
    A.matrix.kind = "A";
    std::vector<OrbitLabel> seen;
    for (const auto& a : A.matrix.rows) {
        int idx = 1;
        if (R) {
            if (R->k() != sp.k) throw DomainError("realization rank differs from the spectral data");
            QMat B = R->Xj(sp.k);
            for (int j = 0; j < sp.k; ++j) B = B + R->Xj(j) * QE(a[j].representative(sp.ctx).to_rational());
            const OrbitLabel lab = element_orbit(*R, B);
            idx = 0;
            for (size_t i = 0; i < seen.size(); ++i)
                if (seen[i].same_G_orbit(lab)) idx = static_cast<int>(i) + 1;
            if (!idx) {
                seen.push_back(lab);
                idx = static_cast<int>(seen.size());
            }
        }
        A.row_orbit.push_back(idx);
    }
    A.orbit_count = R ? static_cast<int>(seen.size()) : 1;
    return A;
}

namespace {

cplx gamma_q(const SpectralParams& sp, const std::optional<PadicScalar>& a) {
    auto [q, S] = build_qe_and_Se(sp.d, sp.e, sp.ctx);
    if (a) q = q.scaled(square_class_of(*a));
    return weil_gamma(q).value;
}

cplx rho_psi(const TameMultChar& delta, cplx s, const std::optional<PadicScalar>& a) {
    return a ? tate_rho(delta, s, *a) : tate_rho(delta, s);
}

cplx eval_poly(const LaurentPoly* P, const Context& ctx, cplx z) {
    if (!P) return 1.0;
    return P->eval({std::pow(cplx(ctx->p()), -z)});
}

struct EpsPoint {
    cplx eps_plus, eps_minus, L_plus, L_minus;
};

EpsPoint eps_at(const SpectralParams& sp, cplx z, const std::optional<PadicScalar>& a, const LaurentPoly* Qp,
                const LaurentPoly* Qm) {
    auto Lp = [&](cplx w) {
        cplx v = 1.0 / eval_poly(Qp, sp.ctx, w);
        for (int j = 0; j <= sp.k; ++j) v *= L0(sp.delta[j].inverse(), w - sp.mu[j]);
        return v;
    };
    auto Lm = [&](cplx w) {
        cplx v = 1.0 / eval_poly(Qm, sp.ctx, w);
        for (int j = 0; j <= sp.k; ++j) v *= L0(sp.delta[j], w + sp.mu[j]);
        return v;
    };
    double sign = 1;
    for (const auto& d : sp.delta) sign *= d.at_minus_one();
    EpsPoint e;
    e.L_plus = Lp(z);
    e.L_minus = Lm(z);
    e.eps_plus = d_factor(sp, z, a) * e.L_plus / Lm(1.0 - z);
    e.eps_minus = sign / d_factor(sp, 1.0 - z, a) * e.L_minus / Lp(1.0 - z);
    return e;
}

cplx eps0_psi(const TameMultChar& delta, cplx z, const std::optional<PadicScalar>& a) {
    return a ? local_factors(delta, z, *a).eps0 : epsilon0(delta, z);
}

}  // namespace

cplx d_factor(const SpectralParams& sp, cplx z, const std::optional<PadicScalar>& a) {
    if (sp.e != 0 && sp.e != 4) throw DomainError("d(delta, mu, z) is defined for e in {0, 4}");
    cplx v = std::pow(gamma_q(sp, a), sp.k * (sp.k + 1) / 2);
    for (int j = 0; j <= sp.k; ++j) v *= sp.delta[j].at_minus_one() * rho_psi(sp.delta[j], sp.mu[j] + 1.0 - z, a);
    return v;
}

cplx varpi(const SpectralParams& sp, const PadicScalar& a) {
    cplx v = 1.0, mus = 0;
    for (int j = 0; j <= sp.k; ++j) {
        v *= sp.delta[j](a);
        mus += sp.mu[j];
    }
    return v * abs_pow(a.abs(), mus);
}

nlohmann::json EpsilonFactors::to_json() const {
    return {{"eps_plus", cjson(eps_plus)},
            {"eps_minus", cjson(eps_minus)},
            {"L_plus", cjson(L_plus)},
            {"L_minus", cjson(L_minus)},
            {"eps_plus_closed", cjson(eps_plus_closed)},
            {"eps_minus_closed", cjson(eps_minus_closed)},
            {"n_plus", n_plus},
            {"n_minus", n_minus},
            {"c_plus", cjson(c_plus)},
            {"c_minus", cjson(c_minus)},
            {"monomial_residual", monomial_residual}};
}

EpsilonFactors epsilon_factors(const SpectralParams& sp, cplx z, const std::optional<PadicScalar>& a,
                               const LaurentPoly* Q_plus, const LaurentPoly* Q_minus) {
    if (sp.e != 0 && sp.e != 4) throw DomainError("epsilon factors are defined for e in {0, 4}");
    EpsilonFactors out;
    const EpsPoint here = eps_at(sp, z, a, Q_plus, Q_minus);
    out.eps_plus = here.eps_plus;
    out.eps_minus = here.eps_minus;
    out.L_plus = here.L_plus;
    out.L_minus = here.L_minus;

    const int tri = sp.k * (sp.k + 1) / 2;
    const cplx g = gamma_q(sp, a);
    out.eps_plus_closed = std::pow(g, tri);
    out.eps_minus_closed = std::pow(g, -tri);
    for (int j = 0; j <= sp.k; ++j) {
        out.eps_plus_closed *= eps0_psi(sp.delta[j].inverse(), z - sp.mu[j], a);
        out.eps_minus_closed *= eps0_psi(sp.delta[j], z + sp.mu[j], a);
    }

    // eps(z) = c q^{-n z}: n from a unit real step, then tested at an off-line point
    const double lq = std::log(static_cast<double>(sp.ctx->p()));
    const EpsPoint step = eps_at(sp, z + 1.0, a, Q_plus, Q_minus);
    const cplx probe_z = z + cplx(0.37, 0.61);
    const EpsPoint probe = eps_at(sp, probe_z, a, Q_plus, Q_minus);
    auto fit = [&](cplx e0, cplx e1, cplx e2, double& n, cplx& c) {
        n = -std::log(std::abs(e1 / e0)) / lq;
        c = e0 * std::exp(n * z * lq);
        return std::abs(e2 - c * std::exp(-n * probe_z * lq)) / std::max(1.0, std::abs(e2));
    };
    const double rp = fit(here.eps_plus, step.eps_plus, probe.eps_plus, out.n_plus, out.c_plus);
    const double rm = fit(here.eps_minus, step.eps_minus, probe.eps_minus, out.n_minus, out.c_minus);
    out.monomial_residual = std::max(rp, rm);
    return out;
}

}  // namespace plgz
