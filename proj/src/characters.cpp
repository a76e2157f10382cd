#include "plgz/characters.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace plgz {

mpq_class frac_p(const mpq_class& x, int p) {
    mpz_class den = x.get_den();
    mpz_class pk = 1;
    while (mpz_divisible_ui_p(den.get_mpz_t(), p)) {
        den /= p;
        pk *= p;
    }
    if (pk == 1) return 0;
    mpz_class inv, num = x.get_num();
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pk.get_mpz_t());
    mpz_class r = num * inv;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), pk.get_mpz_t());
    return mpq_class(r, pk);
}

cplx psi(const mpq_class& x, int p) {
    double f = frac_p(x, p).get_d();
    return std::polar(1.0, kTwoPi * f);
}

cplx psi(const PadicScalar& x) {
    if (x.is_zero() || x.valuation() >= 0) return 1.0;
    int k = static_cast<int>(-x.valuation());
    const auto& ctx = *x.ctx();
    if (k > ctx.N()) throw PrecisionError("psi: not enough digits below the integers");
    int64_t pk = ctx.pow_p(k);
    double f = static_cast<double>(x.unit() % pk) / static_cast<double>(pk);
    return std::polar(1.0, kTwoPi * f);
}

// ---------------------------------------------------------------------------

TameMultChar::TameMultChar(Context c, cplx at_pi, int t) : ctx(std::move(c)), value_at_pi(at_pi) {
    int m = ctx->p() - 1;
    tame_exponent = static_cast<int>(posmod(t, m));
}

cplx TameMultChar::on_unit(int64_t u) const {
    int m = ctx->p() - 1;
    int k = static_cast<int>(static_cast<int64_t>(tame_exponent) * ctx->dlog(u) % m);
    return std::polar(1.0, kTwoPi * k / m);
}

cplx TameMultChar::operator()(const PadicScalar& x) const {
    if (x.is_zero()) throw DomainError("character at zero");
    return std::pow(value_at_pi, static_cast<double>(x.valuation())) * on_unit(x.unit());
}

cplx TameMultChar::operator()(SquareClass c) const {
    cplx v = c.odd_valuation() ? value_at_pi : cplx(1.0);
    if (c.unit_nonsquare()) v *= on_unit(ctx->eps());
    return v;
}

cplx TameMultChar::operator()(const mpq_class& x) const {
    if (x == 0) throw DomainError("character at zero");
    int p = ctx->p();
    int64_t v = rational_valuation(x, p);
    mpz_class n = x.get_num(), d = x.get_den();
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    while (mpz_divisible_ui_p(d.get_mpz_t(), p)) d /= p;
    int64_t nu = mpz_fdiv_ui(n.get_mpz_t(), p), du = mpz_fdiv_ui(d.get_mpz_t(), p);
    int64_t u = mulmod(nu, invmod(du, p), p);
    return std::pow(value_at_pi, static_cast<double>(v)) * on_unit(u);
}

TameMultChar TameMultChar::inverse() const { return TameMultChar(ctx, 1.0 / value_at_pi, -tame_exponent); }

TameMultChar TameMultChar::operator*(const TameMultChar& o) const {
    return TameMultChar(ctx, value_at_pi * o.value_at_pi, tame_exponent + o.tame_exponent);
}

TameMultChar TameMultChar::twist_abs(cplx s) const {
    return TameMultChar(ctx, value_at_pi * std::pow(static_cast<double>(ctx->q()), -s), tame_exponent);
}

bool TameMultChar::same(const TameMultChar& o, double tol) const {
    return tame_exponent == o.tame_exponent && std::abs(value_at_pi - o.value_at_pi) < tol;
}

std::vector<TameMultChar> all_tame_characters(const Context& ctx, cplx at_pi) {
    std::vector<TameMultChar> out;
    for (int t = 0; t < ctx->p() - 1; ++t) out.emplace_back(ctx, at_pi, t);
    return out;
}

std::vector<TameMultChar> characters_trivial_on(const SeGroup& S) {
    const auto& ctx = S.ctx();
    std::vector<TameMultChar> out;
    // characters trivial on S are trivial on squares, hence quadratic
    for (int half : {0, 1})
        for (double sgn : {1.0, -1.0}) {
            TameMultChar chi(ctx, sgn, half * (ctx->p() - 1) / 2);
            bool ok = true;
            for (auto c : kAllClasses)
                if (S.contains(c) && std::abs(chi(c) - 1.0) > 1e-12) ok = false;
            if (ok) out.push_back(chi);
        }
    if (static_cast<int>(out.size()) != S.index())
        throw std::logic_error("dual of F*/S has the wrong size");
    return out;
}

cplx char_eval(const TameMultChar& d, const PadicScalar& x) { return d(x); }

cplx gauss_sum(const TameMultChar& d, const AdditiveCharacter& ps) {
    if (!d.ramified()) throw DomainError("gauss_sum: character is unramified");
    if (ps.scale.is_zero() || ps.scale.valuation() != 0)
        throw DomainError("gauss_sum: additive character must have conductor the integers");
    int p = d.ctx->p();
    cplx s = 0;
    mpq_class a = ps.scale.to_rational();
    for (int u = 1; u < p; ++u) s += d.on_unit(u) * psi(a * mpq_class(u, p), p);
    return s;
}

// ---------------------------------------------------------------------------

cplx ResidueFunction::at(int64_t x) const {
    int64_t m = static_cast<int64_t>(values.size());
    return values[posmod(x, m)];
}

namespace {

int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

cplx unit_integral_of_char(const TameMultChar& d, double q) { return d.ramified() ? cplx(0) : cplx(1.0 - 1.0 / q); }

// F f(y) for y = p^n * u with the measure |a|^{1/2} dx, f read at the given refinement level
cplx fourier_at(const Context& ctx, const ResidueFunction& f, int level, const mpq_class& a, int alpha, int n,
                int64_t u) {
    const int p = ctx->p();
    int64_t M = ipow(p, level);
    mpq_class y = mpq_class(u);
    if (n >= 0)
        y *= mpq_class(ipow(p, n));
    else
        y /= mpq_class(ipow(p, -n));
    cplx s = 0;
    for (int64_t x = 0; x < M; ++x) {
        cplx fx = f.at(x);
        if (fx == cplx(0)) continue;
        s += fx * psi(a * mpq_class(x) * y, p);
    }
    return s * std::pow(static_cast<double>(p), -alpha / 2.0) / static_cast<double>(M);
}

}  // namespace

LaurentRational tate_integral(const Context& ctx, const ResidueFunction& f, const TameMultChar& delta) {
    const int p = ctx->p();
    const int L = f.level;
    if (static_cast<int64_t>(f.values.size()) != ipow(p, L)) throw DomainError("residue function size mismatch");
    LaurentPoly head(1);
    for (int n = 0; n < L; ++n) {
        int Mlev = L - n;
        int64_t M = ipow(p, Mlev);
        cplx s = 0;
        for (int64_t u = 1; u < M; ++u) {
            if (u % p == 0) continue;
            s += f.at(ipow(p, n) * u) * delta.on_unit(u);
        }
        s /= static_cast<double>(M);
        head.add_term({n}, s * std::pow(delta.value_at_pi, n));
    }
    LaurentRational out = LaurentRational::from_poly(head);
    cplx c = f.at(0) * unit_integral_of_char(delta, p);
    if (c != cplx(0)) {
        cplx w = delta.value_at_pi;
        out = out + LaurentRational::geometric(1, c * std::pow(w, L), {L}, w, {1});
    }
    return out;
}

LaurentRational tate_integral_dual(const Context& ctx, const ResidueFunction& f, const TameMultChar& delta,
                                   const PadicScalar& a) {
    const int p = ctx->p();
    const double q = p;
    const int L = f.level;
    const int alpha = static_cast<int>(a.valuation());
    const mpq_class ar = a.to_rational();
    const TameMultChar dinv = delta.inverse();

    auto shell = [&](int n, int level) {
        int Mlev = std::max(1, -alpha - n);
        int64_t M = ipow(p, Mlev);
        cplx s = 0;
        for (int64_t u = 1; u < M; ++u) {
            if (u % p == 0) continue;
            s += fourier_at(ctx, f, level, ar, alpha, n, u) * dinv.on_unit(u);
        }
        return s / static_cast<double>(M);
    };

    // f is invariant under p^L, so F f vanishes below valuation -alpha-L
    if (std::abs(shell(-alpha - L - 1, L + 1)) > 1e-9)
        throw std::logic_error("Fourier transform does not vanish below the dual lattice");

    LaurentPoly head(1);
    for (int n = -alpha - L; n < -alpha; ++n) {
        cplx I = shell(n, L);
        head.add_term({-n}, I * std::pow(q, -n) * std::pow(delta.value_at_pi, -n));
    }
    LaurentRational out = LaurentRational::from_poly(head);
    // for v(y) >= -alpha the transform is the constant |a|^{1/2} * int f
    cplx C = 0;
    for (cplx v : f.values) C += v;
    C *= std::pow(q, -alpha / 2.0) / static_cast<double>(f.values.size());
    cplx c = C * unit_integral_of_char(dinv, q);
    if (c != cplx(0)) {
        cplx w = 1.0 / (q * delta.value_at_pi);
        int nc = -alpha;
        out = out + LaurentRational::geometric(1, c * std::pow(w, nc), {-nc}, w, {-1});
    }
    return out;
}

ResidueFunction default_tate_test_function(const TameMultChar& delta) {
    const int p = delta.ctx->p();
    ResidueFunction f{1, std::vector<cplx>(p, 1.0)};
    if (delta.ramified()) {
        f.values[0] = 0;
        TameMultChar dinv = delta.inverse();
        for (int u = 1; u < p; ++u) f.values[u] = dinv.on_unit(u);
    }
    return f;
}

LaurentRational tate_rho_symbolic_with(const TameMultChar& delta, const ResidueFunction& f, const PadicScalar& a) {
    LaurentRational z = tate_integral(delta.ctx, f, delta);
    LaurentRational zd = tate_integral_dual(delta.ctx, f, delta, a);
    if (zd.num().chopped(1e-13).is_zero()) throw DomainError("test function gives a vanishing dual integral");
    return z / zd;
}

LaurentRational tate_rho_symbolic(const TameMultChar& delta, const PadicScalar& a) {
    using Key = std::tuple<int, int, double, double, int, int64_t, int64_t>;
    static std::mutex mu;
    static std::map<Key, LaurentRational> cache;
    Key key{delta.ctx->p(), delta.ctx->N(), delta.value_at_pi.real(), delta.value_at_pi.imag(),
            delta.tame_exponent, a.valuation(), a.unit()};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    LaurentRational r = tate_rho_symbolic_with(delta, default_tate_test_function(delta), a);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, r);
    return r;
}

LaurentRational tate_rho_symbolic(const TameMultChar& delta) {
    return tate_rho_symbolic(delta, PadicScalar::from_int(delta.ctx, 1));
}

cplx tate_rho(const TameMultChar& delta, cplx s, const PadicScalar& a) {
    double q = delta.ctx->q();
    return tate_rho_symbolic(delta, a).eval1(std::pow(q, -s));
}

cplx tate_rho(const TameMultChar& delta, cplx s) { return tate_rho(delta, s, PadicScalar::from_int(delta.ctx, 1)); }

cplx L0(const TameMultChar& delta, cplx z) {
    if (delta.ramified()) return 1.0;
    cplx d = 1.0 - delta.value_at_pi * std::pow(static_cast<double>(delta.ctx->q()), -z);
    if (std::abs(d) < 1e-14) throw DomainError("pole of L0");
    return 1.0 / d;
}

static cplx eps0_raw(const TameMultChar& delta, cplx z, const PadicScalar& a) {
    return L0(delta, z) / (tate_rho(delta, z, a) * L0(delta.inverse(), 1.0 - z));
}

LocalFactors local_factors(const TameMultChar& delta, cplx z, const PadicScalar& a) {
    LocalFactors r;
    r.L0 = L0(delta, z);
    r.eps0 = eps0_raw(delta, z, a);
    const double lq = std::log(static_cast<double>(delta.ctx->q()));
    cplx z1 = z + 0.37, z2 = z + 1.21;
    cplx e1 = eps0_raw(delta, z1, a), e2 = eps0_raw(delta, z2, a);
    cplx ratio = e2 / e1;
    r.n0 = -std::log(std::abs(ratio)) / ((z2 - z1).real() * lq);
    r.c0 = e1 * std::exp(r.n0 * z1 * lq);
    cplx pred = r.c0 * std::exp(-r.n0 * z * lq);
    r.fit_residual = std::abs(pred - r.eps0) / std::abs(r.eps0) + std::abs(std::arg(ratio));
    if (r.fit_residual > 1e-9) throw std::runtime_error("epsilon0 is not a monomial in q^{-z}");
    return r;
}

LocalFactors local_factors(const TameMultChar& delta, cplx z) {
    return local_factors(delta, z, PadicScalar::from_int(delta.ctx, 1));
}

cplx epsilon0(const TameMultChar& delta, cplx z) {
    return eps0_raw(delta, z, PadicScalar::from_int(delta.ctx, 1));
}

cplx rho_tilde(const TameMultChar& delta, cplx s, SquareClass x, const SeGroup& S) {
    auto chars = characters_trivial_on(S);
    cplx sum = 0;
    for (const auto& chi : chars) sum += chi(x) * tate_rho(delta * chi, s);
    return sum / static_cast<double>(chars.size());
}

}  // namespace plgz
