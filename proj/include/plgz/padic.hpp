#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace plgz {

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integer helpers modulo m < 2^62.
int64_t mulmod(int64_t a, int64_t b, int64_t m);
int64_t powmod(int64_t a, int64_t e, int64_t m);
int64_t invmod(int64_t a, int64_t m);
int64_t posmod(int64_t a, int64_t m);
bool is_odd_prime(int64_t p);

/**
 * The field Q_p at a fixed number of unit digits.
 *
 * Holds the residue data everything else needs: p^N, the distinguished
 * non-square unit eps, a primitive root mod p with its discrete log table.
 */
class LocalFieldContext {
public:
    explicit LocalFieldContext(int p, int N = 12);

    int p() const { return p_; }
    int q() const { return p_; }
    int N() const { return N_; }
    int64_t modulus() const { return pN_; }
    int64_t pow_p(int k) const;

    // eps as an integer in [1, p^N)
    int64_t eps() const { return eps_; }
    int generator() const { return gen_; }
    // discrete log base generator() of a unit mod p, in [0, p-1)
    int dlog(int64_t u) const;
    int legendre(int64_t u) const;
    bool minus_one_square() const { return p_ % 4 == 1; }

private:
    int p_;
    int N_;
    int64_t pN_;
    int64_t eps_;
    int gen_;
    std::vector<int> dlog_;
};

using Context = std::shared_ptr<const LocalFieldContext>;
Context make_context(int p, int N = 12);

class SquareClass;

/**
 * x = p^v * u with u a unit known modulo p^prec.
 * Zero has v = +inf. Arithmetic tracks relative precision and throws
 * PrecisionError instead of returning digits it does not know.
 */
class PadicScalar {
public:
    static constexpr int64_t kInfinity = INT64_MAX;

    PadicScalar() = default;
    static PadicScalar zero(const Context& ctx);
    static PadicScalar from_int(const Context& ctx, int64_t n);
    static PadicScalar from_rational(const Context& ctx, const mpq_class& r);
    static PadicScalar make(const Context& ctx, int64_t val, int64_t unit, int prec = -1);
    static PadicScalar pi(const Context& ctx, int power = 1);
    static PadicScalar eps(const Context& ctx);
    // "p^v*u", "u", "0"
    static PadicScalar parse(const Context& ctx, const std::string& s);

    const Context& ctx() const { return ctx_; }
    bool is_zero() const { return val_ == kInfinity; }
    int64_t valuation() const { return val_; }
    int64_t unit() const { return unit_; }
    int precision() const { return prec_; }
    double abs() const;  // |x| = q^{-v}

    PadicScalar operator-() const;
    PadicScalar inverse() const;
    friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b);
    friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b);
    friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b);
    friend PadicScalar operator/(const PadicScalar& a, const PadicScalar& b);
    bool equals(const PadicScalar& o) const;  // equal at common precision

    // value as a rational p^v * u (u taken as its integer lift)
    mpq_class to_rational() const;
    std::string to_string() const;

private:
    PadicScalar(Context c, int64_t v, int64_t u, int prec)
        : ctx_(std::move(c)), val_(v), unit_(u), prec_(prec) {}
    void check_floor(const char* op) const;

    Context ctx_;
    int64_t val_ = kInfinity;
    int64_t unit_ = 0;
    int prec_ = 0;
};

enum class FieldOp { Add, Sub, Mul, Div, Neg };
PadicScalar field_arithmetic(const PadicScalar& x, const PadicScalar& y, FieldOp op);

/**
 * Element of F^* mod squares for odd p: bit 0 = non-square unit, bit 1 = odd valuation.
 * Tags 0,1,2,3 stand for 1, eps, pi, eps*pi.
 */
class SquareClass {
public:
    constexpr SquareClass() = default;
    constexpr explicit SquareClass(int bits) : bits_(bits & 3) {}
    static constexpr SquareClass one() { return SquareClass(0); }
    static constexpr SquareClass eps() { return SquareClass(1); }
    static constexpr SquareClass pi() { return SquareClass(2); }
    static constexpr SquareClass eps_pi() { return SquareClass(3); }
    static SquareClass minus_one(const LocalFieldContext& ctx);
    static SquareClass parse(const std::string& s);

    int bits() const { return bits_; }
    bool unit_nonsquare() const { return bits_ & 1; }
    bool odd_valuation() const { return bits_ & 2; }

    PadicScalar representative(const Context& ctx) const;
    std::string name() const;

    friend constexpr SquareClass operator*(SquareClass a, SquareClass b) {
        return SquareClass(a.bits_ ^ b.bits_);
    }
    friend constexpr bool operator==(SquareClass a, SquareClass b) { return a.bits_ == b.bits_; }
    friend constexpr bool operator<(SquareClass a, SquareClass b) { return a.bits_ < b.bits_; }

private:
    int bits_ = 0;
};

inline constexpr SquareClass kAllClasses[4] = {SquareClass(0), SquareClass(1), SquareClass(2),
                                               SquareClass(3)};

SquareClass square_class_of(const PadicScalar& x);
SquareClass square_class_of(const LocalFieldContext& ctx, const mpq_class& x);

int hilbert_symbol(const PadicScalar& a, const PadicScalar& b);
int hilbert_symbol(const LocalFieldContext& ctx, SquareClass a, SquareClass b);
// Exhaustive norm-group search: is b a value of x^2 - a y^2 up to squares?
int hilbert_symbol_bruteforce(const LocalFieldContext& ctx, SquareClass a, SquareClass b);

std::optional<PadicScalar> padic_sqrt(const PadicScalar& x);

// p-adic valuation and unit part of a nonzero rational
int64_t rational_valuation(const mpq_class& x, int p);

}  // namespace plgz
