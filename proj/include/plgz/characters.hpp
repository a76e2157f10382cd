#pragma once

#include <functional>
#include <vector>

#include "plgz/laurent.hpp"
#include "plgz/padic.hpp"
#include "plgz/quadform.hpp"

namespace plgz {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// p-adic fractional part of a rational, in [0,1)
mpq_class frac_p(const mpq_class& x, int p);
// psi(x) = exp(2 pi i frac_p(x)); conductor is the ring of integers
cplx psi(const mpq_class& x, int p);
cplx psi(const PadicScalar& x);

/**
 * psi^a(x) = psi(a x).
 */
struct AdditiveCharacter {
    PadicScalar scale;
    explicit AdditiveCharacter(PadicScalar a) : scale(std::move(a)) {}
    static AdditiveCharacter standard(const Context& ctx) {
        return AdditiveCharacter(PadicScalar::from_int(ctx, 1));
    }
    cplx operator()(const PadicScalar& x) const { return psi(scale * x); }
    cplx operator()(const mpq_class& x) const { return psi(x * scale.to_rational(), scale.ctx()->p()); }
};

/**
 * Tame character of F^*: delta(pi) = value_at_pi, delta(u) = zeta^{t dlog(u mod p)}.
 */
struct TameMultChar {
    Context ctx;
    cplx value_at_pi = 1.0;
    int tame_exponent = 0;  // mod p-1

    TameMultChar() = default;
    TameMultChar(Context c, cplx at_pi, int t);
    static TameMultChar trivial(const Context& ctx) { return TameMultChar(ctx, 1.0, 0); }

    bool ramified() const { return tame_exponent != 0; }
    bool unitary(double tol = 1e-12) const { return std::abs(std::abs(value_at_pi) - 1.0) < tol; }
    cplx on_unit(int64_t u) const;
    cplx operator()(const PadicScalar& x) const;
    cplx operator()(SquareClass c) const;
    cplx operator()(const mpq_class& x) const;
    double at_minus_one() const { return tame_exponent % 2 ? -1.0 : 1.0; }
    TameMultChar inverse() const;
    TameMultChar operator*(const TameMultChar& o) const;
    // delta |.|^s
    TameMultChar twist_abs(cplx s) const;
    bool same(const TameMultChar& o, double tol = 1e-12) const;
};

// all tame characters with the given value at pi
std::vector<TameMultChar> all_tame_characters(const Context& ctx, cplx at_pi = 1.0);
// characters of F^* trivial on S
std::vector<TameMultChar> characters_trivial_on(const SeGroup& S);

cplx char_eval(const TameMultChar& d, const PadicScalar& x);
cplx gauss_sum(const TameMultChar& d, const AdditiveCharacter& psi);

/**
 * A function on F supported in the integers and constant on cosets of p^level,
 * given by its values on residues mod p^level.
 */
struct ResidueFunction {
    int level = 1;
    std::vector<cplx> values;
    cplx at(int64_t x) const;  // x any integer representative
};

// Z(f, delta, s) = int f(x) delta(x) |x|^s d*x as a rational function of t = q^{-s}
LaurentRational tate_integral(const Context& ctx, const ResidueFunction& f, const TameMultChar& delta);
// Z(F f, delta^{-1}, 1-s) in t = q^{-s}, with F the Fourier transform for psi^a and its self-dual measure
LaurentRational tate_integral_dual(const Context& ctx, const ResidueFunction& f, const TameMultChar& delta,
                                   const PadicScalar& a);

// rho(delta, s) = Z(f, delta, s) / Z(Ff, delta^{-1}, 1-s), symbolic in t = q^{-s}
LaurentRational tate_rho_symbolic(const TameMultChar& delta, const PadicScalar& a);
LaurentRational tate_rho_symbolic(const TameMultChar& delta);
LaurentRational tate_rho_symbolic_with(const TameMultChar& delta, const ResidueFunction& f, const PadicScalar& a);
cplx tate_rho(const TameMultChar& delta, cplx s);
cplx tate_rho(const TameMultChar& delta, cplx s, const PadicScalar& a);
ResidueFunction default_tate_test_function(const TameMultChar& delta);

cplx L0(const TameMultChar& delta, cplx z);

struct LocalFactors {
    cplx L0;
    cplx eps0;
    double n0 = 0;  // eps0(z) = c0 q^{-n0 z}
    cplx c0;
    double fit_residual = 0;
};
LocalFactors local_factors(const TameMultChar& delta, cplx z);
LocalFactors local_factors(const TameMultChar& delta, cplx z, const PadicScalar& a);
cplx epsilon0(const TameMultChar& delta, cplx z);

cplx rho_tilde(const TameMultChar& delta, cplx s, SquareClass x, const SeGroup& S);

}  // namespace plgz
