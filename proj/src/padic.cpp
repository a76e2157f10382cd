#include "plgz/padic.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace plgz {

int64_t posmod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

int64_t mulmod(int64_t a, int64_t b, int64_t m) {
    return static_cast<int64_t>(static_cast<__int128>(a) * b % m);
}

int64_t powmod(int64_t a, int64_t e, int64_t m) {
    int64_t r = 1 % m;
    a = posmod(a, m);
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

int64_t invmod(int64_t a, int64_t m) {
    // extended Euclid
    int64_t g = m, x = 0, r = posmod(a, m), y = 1;
    while (r != 0) {
        int64_t t = g / r;
        g -= t * r;
        std::swap(g, r);
        x -= t * y;
        std::swap(x, y);
    }
    if (g != 1) throw DomainError("invmod: not invertible");
    return posmod(x, m);
}

bool is_odd_prime(int64_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (int64_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

int64_t rational_valuation(const mpq_class& x, int p) {
    if (x == 0) return PadicScalar::kInfinity;
    int64_t v = 0;
    mpz_class n = x.get_num(), d = x.get_den();
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        n /= p;
        ++v;
    }
    while (mpz_divisible_ui_p(d.get_mpz_t(), p)) {
        d /= p;
        --v;
    }
    return v;
}

// ---------------------------------------------------------------------------

LocalFieldContext::LocalFieldContext(int p, int N) : p_(p), N_(N) {
    if (!is_odd_prime(p)) throw DomainError("p must be an odd prime");
    if (N < 4) throw DomainError("precision N must be at least 4");
    __int128 m = 1;
    for (int i = 0; i < N; ++i) {
        m *= p;
        if (m >= (static_cast<__int128>(1) << 62))
            throw DomainError("p^N must stay below 2^62");
    }
    pN_ = static_cast<int64_t>(m);

    std::vector<int> prime_factors;
    for (int m = p - 1, r = 2; m > 1; ++r) {
        if (m % r) continue;
        prime_factors.push_back(r);
        while (m % r == 0) m /= r;
    }
    for (gen_ = 2; gen_ < p; ++gen_) {
        bool prim = true;
        for (int r : prime_factors)
            if (powmod(gen_, (p - 1) / r, p) == 1) prim = false;
        if (prim) break;
    }
    dlog_.assign(p, -1);
    int64_t g = 1;
    for (int k = 0; k < p - 1; ++k) {
        dlog_[g] = k;
        g = g * gen_ % p;
    }
    for (int r = 1; r < p; ++r)
        if (dlog_[r] < 0) throw DomainError("failed to find a primitive root");

    if (p % 4 == 3) {
        eps_ = pN_ - 1;
    } else {
        int r = 2;
        while (legendre(r) != -1) ++r;
        eps_ = r;
    }
}

int64_t LocalFieldContext::pow_p(int k) const {
    int64_t r = 1;
    for (int i = 0; i < k; ++i) r *= p_;
    return r;
}

int LocalFieldContext::dlog(int64_t u) const {
    int64_t r = posmod(u, p_);
    if (r == 0) throw DomainError("dlog of a non-unit");
    return dlog_[r];
}

int LocalFieldContext::legendre(int64_t u) const {
    int64_t r = posmod(u, p_);
    if (r == 0) return 0;
    return powmod(r, (p_ - 1) / 2, p_) == 1 ? 1 : -1;
}

Context make_context(int p, int N) { return std::make_shared<const LocalFieldContext>(p, N); }

// ---------------------------------------------------------------------------

PadicScalar PadicScalar::zero(const Context& ctx) { return PadicScalar(ctx, kInfinity, 0, ctx->N()); }

PadicScalar PadicScalar::make(const Context& ctx, int64_t val, int64_t unit, int prec) {
    if (prec < 0) prec = ctx->N();
    unit = posmod(unit, ctx->modulus());
    if (unit % ctx->p() == 0) throw DomainError("unit part divisible by p");
    return PadicScalar(ctx, val, unit, prec);
}

PadicScalar PadicScalar::from_int(const Context& ctx, int64_t n) {
    return from_rational(ctx, mpq_class(mpz_class(static_cast<long>(n))));
}

PadicScalar PadicScalar::from_rational(const Context& ctx, const mpq_class& r) {
    if (r == 0) return zero(ctx);
    int p = ctx->p();
    int64_t v = rational_valuation(r, p);
    mpz_class n = r.get_num(), d = r.get_den();
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    while (mpz_divisible_ui_p(d.get_mpz_t(), p)) d /= p;
    mpz_class m(static_cast<long>(ctx->modulus()));
    mpz_class nm = n % m, dm = d % m;
    if (nm < 0) nm += m;
    if (dm < 0) dm += m;
    int64_t u = mulmod(nm.get_si(), invmod(dm.get_si(), ctx->modulus()), ctx->modulus());
    return PadicScalar(ctx, v, u, ctx->N());
}

PadicScalar PadicScalar::pi(const Context& ctx, int power) { return PadicScalar(ctx, power, 1, ctx->N()); }

PadicScalar PadicScalar::eps(const Context& ctx) { return PadicScalar(ctx, 0, ctx->eps(), ctx->N()); }

PadicScalar PadicScalar::parse(const Context& ctx, const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw DomainError("empty scalar string");
    if (s == "0") return zero(ctx);
    auto star = s.find('*');
    if (s.rfind("p^", 0) == 0) {
        std::string vpart = star == std::string::npos ? s.substr(2) : s.substr(2, star - 2);
        int64_t v = std::stoll(vpart);
        mpq_class u(1);
        if (star != std::string::npos) u = mpq_class(s.substr(star + 1));
        u.canonicalize();
        PadicScalar x = from_rational(ctx, u);
        if (x.is_zero()) return x;
        x.val_ += v;
        return x;
    }
    if (s == "p") return pi(ctx);
    if (s == "eps") return eps(ctx);
    mpq_class r(s);
    r.canonicalize();
    return from_rational(ctx, r);
}

double PadicScalar::abs() const {
    if (is_zero()) return 0.0;
    return std::pow(static_cast<double>(ctx_->p()), -static_cast<double>(val_));
}

void PadicScalar::check_floor(const char* op) const {
    if (!is_zero() && prec_ < ctx_->N() - 2) {
        std::ostringstream os;
        os << op << ": result keeps only " << prec_ << " of " << ctx_->N() << " digits";
        throw PrecisionError(os.str());
    }
}

PadicScalar PadicScalar::operator-() const {
    if (is_zero()) return *this;
    return PadicScalar(ctx_, val_, ctx_->modulus() - unit_, prec_);
}

PadicScalar PadicScalar::inverse() const {
    if (is_zero()) throw DomainError("division by zero");
    return PadicScalar(ctx_, -val_, invmod(unit_, ctx_->modulus()), prec_);
}

static void same_context(const PadicScalar& a, const PadicScalar& b) {
    if (a.ctx() != b.ctx() && (a.ctx()->p() != b.ctx()->p() || a.ctx()->N() != b.ctx()->N()))
        throw DomainError("scalars from different contexts");
}

PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) {
    same_context(a, b);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const auto& ctx = a.ctx_;
    int64_t vmin = std::min(a.val_, b.val_);
    int64_t absprec = std::min(a.val_ + a.prec_, b.val_ + b.prec_);
    int width = static_cast<int>(absprec - vmin);
    int64_t mod = ctx->pow_p(width);
    auto shifted = [&](const PadicScalar& x) -> int64_t {
        int64_t sh = x.val_ - vmin;
        if (sh >= width) return 0;
        return mulmod(x.unit_ % mod, ctx->pow_p(static_cast<int>(sh)), mod);
    };
    int64_t s = (shifted(a) + shifted(b)) % mod;
    if (s == 0) {
        if (a.prec_ == ctx->N() && b.prec_ == ctx->N()) return PadicScalar::zero(ctx);
        throw PrecisionError("add: cancellation consumed all carried digits");
    }
    int k = 0;
    while (s % ctx->p() == 0) {
        s /= ctx->p();
        ++k;
    }
    PadicScalar r(ctx, vmin + k, s, width - k);
    r.check_floor("add");
    return r;
}

PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) { return a + (-b); }

PadicScalar operator*(const PadicScalar& a, const PadicScalar& b) {
    same_context(a, b);
    if (a.is_zero() || b.is_zero()) return PadicScalar::zero(a.ctx_);
    return PadicScalar(a.ctx_, a.val_ + b.val_, mulmod(a.unit_, b.unit_, a.ctx_->modulus()),
                       std::min(a.prec_, b.prec_));
}

PadicScalar operator/(const PadicScalar& a, const PadicScalar& b) {
    same_context(a, b);
    if (b.is_zero()) throw DomainError("division by zero");
    return a * b.inverse();
}

bool PadicScalar::equals(const PadicScalar& o) const {
    if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
    if (val_ != o.val_) return false;
    int64_t m = ctx_->pow_p(std::min(prec_, o.prec_));
    return unit_ % m == o.unit_ % m;
}

mpq_class PadicScalar::to_rational() const {
    if (is_zero()) return 0;
    mpz_class pv;
    mpz_ui_pow_ui(pv.get_mpz_t(), ctx_->p(), static_cast<unsigned long>(std::llabs(val_)));
    mpq_class u(mpz_class(static_cast<long>(unit_)));
    if (val_ >= 0) return u * pv;
    return u / pv;
}

std::string PadicScalar::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    os << "p^" << val_ << "*" << unit_;
    return os.str();
}

PadicScalar field_arithmetic(const PadicScalar& x, const PadicScalar& y, FieldOp op) {
    switch (op) {
        case FieldOp::Add: return x + y;
        case FieldOp::Sub: return x - y;
        case FieldOp::Mul: return x * y;
        case FieldOp::Div: return x / y;
        case FieldOp::Neg: return -x;
    }
    throw DomainError("unknown field operation");
}

// ---------------------------------------------------------------------------

SquareClass SquareClass::minus_one(const LocalFieldContext& ctx) {
    return ctx.minus_one_square() ? one() : eps();
}

SquareClass SquareClass::parse(const std::string& s) {
    if (s == "1") return one();
    if (s == "eps" || s == "e") return eps();
    if (s == "pi" || s == "p") return pi();
    if (s == "eps*pi" || s == "epspi" || s == "pi*eps") return eps_pi();
    throw DomainError("unknown square class tag: " + s);
}

PadicScalar SquareClass::representative(const Context& ctx) const {
    int64_t u = unit_nonsquare() ? ctx->eps() : 1;
    return PadicScalar::make(ctx, odd_valuation() ? 1 : 0, u);
}

std::string SquareClass::name() const {
    static const char* names[4] = {"1", "eps", "pi", "eps*pi"};
    return names[bits_];
}

SquareClass square_class_of(const PadicScalar& x) {
    if (x.is_zero()) throw DomainError("square class of zero");
    int bits = 0;
    if (x.ctx()->legendre(x.unit()) == -1) bits |= 1;
    if (x.valuation() % 2 != 0) bits |= 2;
    return SquareClass(bits);
}

SquareClass square_class_of(const LocalFieldContext& ctx, const mpq_class& x) {
    if (x == 0) throw DomainError("square class of zero");
    int p = ctx.p();
    int64_t v = rational_valuation(x, p);
    mpz_class n = x.get_num(), d = x.get_den();
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    while (mpz_divisible_ui_p(d.get_mpz_t(), p)) d /= p;
    int64_t nu = mpz_fdiv_ui(n.get_mpz_t(), p);
    int64_t du = mpz_fdiv_ui(d.get_mpz_t(), p);
    int bits = 0;
    if (ctx.legendre(nu) * ctx.legendre(du) == -1) bits |= 1;
    if (v % 2 != 0) bits |= 2;
    return SquareClass(bits);
}

int hilbert_symbol(const LocalFieldContext& ctx, SquareClass a, SquareClass b) {
    int alpha = a.odd_valuation(), beta = b.odd_valuation();
    int s = 1;
    if (alpha && beta && ((ctx.p() - 1) / 2) % 2 == 1) s = -s;
    if (beta && a.unit_nonsquare()) s = -s;
    if (alpha && b.unit_nonsquare()) s = -s;
    return s;
}

int hilbert_symbol(const PadicScalar& a, const PadicScalar& b) {
    return hilbert_symbol(*a.ctx(), square_class_of(a), square_class_of(b));
}

int hilbert_symbol_bruteforce(const LocalFieldContext& ctx, SquareClass a, SquareClass b) {
    const int64_t p = ctx.p();
    int M = 1;
    while (M < 6) {
        double next = std::pow(static_cast<double>(p), 2.0 * (M + 1));
        if (next > 2e7) break;
        ++M;
    }
    int64_t mod = 1;
    for (int i = 0; i < M; ++i) mod *= p;
    int64_t ra = posmod(a.unit_nonsquare() ? ctx.eps() : 1, mod);
    if (a.odd_valuation()) ra = ra * p % mod;
    // the value set of x^2 - a y^2 only depends on the squares x^2, y^2 mod p^M
    std::vector<char> is_sq(mod, 0);
    for (int64_t x = 0; x < mod; ++x) is_sq[x * x % mod] = 1;
    std::vector<int64_t> sq;
    for (int64_t x = 0; x < mod; ++x)
        if (is_sq[x]) sq.push_back(x);
    std::vector<int> leg(p);
    for (int64_t r = 0; r < p; ++r) leg[r] = ctx.legendre(r);
    bool found[4] = {false, false, false, false};
    for (int64_t x2 : sq)
        for (int64_t y2 : sq) {
            int64_t z = posmod(x2 - ra * y2 % mod, mod);
            if (z == 0) continue;
            int v = 0;
            while (z % p == 0) {
                z /= p;
                ++v;
            }
            // v < M guarantees at least one known unit digit
            found[(leg[z % p] == -1 ? 1 : 0) | (v % 2 ? 2 : 0)] = true;
        }
    return found[b.bits()] ? 1 : -1;
}

std::optional<PadicScalar> padic_sqrt(const PadicScalar& x) {
    if (x.is_zero()) throw DomainError("sqrt of zero");
    if (square_class_of(x) != SquareClass::one()) return std::nullopt;
    const auto& ctx = x.ctx();
    int64_t p = ctx->p();
    int64_t u0 = posmod(x.unit(), p);
    int64_t r = 1;
    while (r * r % p != u0) ++r;
    int64_t mod = ctx->modulus();
    // Newton: r <- r - (r^2 - u)/(2r)
    for (int it = 0; it < 2 * ctx->N() + 2; ++it) {
        int64_t f = posmod(mulmod(r, r, mod) - x.unit(), mod);
        if (f == 0) break;
        int64_t step = mulmod(f, invmod(2 * r % mod, mod), mod);
        r = posmod(r - step, mod);
    }
    return PadicScalar::make(ctx, x.valuation() / 2, r, x.precision());
}

}  // namespace plgz
