#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace plgz {

using cplx = std::complex<double>;
using Exponents = std::vector<int>;

/**
 * Laurent polynomial in nvars formal variables with complex coefficients.
 */
class LaurentPoly {
public:
    LaurentPoly() = default;
    explicit LaurentPoly(int nvars) : nvars_(nvars) {}
    static LaurentPoly constant(int nvars, cplx c);
    static LaurentPoly monomial(int nvars, const Exponents& e, cplx c = 1.0);
    // c * t_var^power
    static LaurentPoly var(int nvars, int v, int power = 1, cplx c = 1.0);

    int nvars() const { return nvars_; }
    const std::map<Exponents, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    cplx coeff(const Exponents& e) const;
    double max_abs() const;

    void add_term(const Exponents& e, cplx c);
    LaurentPoly operator+(const LaurentPoly& o) const;
    LaurentPoly operator-(const LaurentPoly& o) const;
    LaurentPoly operator*(const LaurentPoly& o) const;
    LaurentPoly operator*(cplx c) const;
    LaurentPoly operator-() const { return *this * cplx(-1.0); }

    cplx eval(const std::vector<cplx>& t) const;
    // t_v -> c * t_v
    LaurentPoly scale_var(int v, cplx c) const;
    // t_v -> t_v^{-1}
    LaurentPoly invert_var(int v) const;
    // multiply by the monomial t^e
    LaurentPoly shift(const Exponents& e) const;
    // drop coefficients below tol * max_abs
    LaurentPoly chopped(double tol) const;
    Exponents min_exponents() const;
    std::string to_string() const;

private:
    int nvars_ = 1;
    std::map<Exponents, cplx> terms_;
};

/**
 * Quotient of Laurent polynomials. Reduction is limited to removing the
 * common monomial content and normalizing one denominator coefficient to 1;
 * equality is decided by cross multiplication.
 */
class LaurentRational {
public:
    LaurentRational() = default;
    explicit LaurentRational(int nvars);
    LaurentRational(LaurentPoly num, LaurentPoly den);
    static LaurentRational constant(int nvars, cplx c);
    static LaurentRational from_poly(const LaurentPoly& p);
    // c * m / (1 - w) with m, w monomials: the sum of c * m * w^k over k >= 0
    static LaurentRational geometric(int nvars, cplx c, const Exponents& first, cplx ratio_coeff,
                                     const Exponents& ratio_exp);

    int nvars() const { return num_.nvars(); }
    const LaurentPoly& num() const { return num_; }
    const LaurentPoly& den() const { return den_; }

    LaurentRational operator+(const LaurentRational& o) const;
    LaurentRational operator-(const LaurentRational& o) const;
    LaurentRational operator*(const LaurentRational& o) const;
    LaurentRational operator/(const LaurentRational& o) const;
    LaurentRational operator*(cplx c) const;

    cplx eval(const std::vector<cplx>& t) const;
    cplx eval1(cplx t) const { return eval({t}); }
    LaurentRational scale_var(int v, cplx c) const;
    LaurentRational invert_var(int v) const;
    LaurentRational reduced() const;

    std::string to_string() const;

private:
    LaurentPoly num_, den_;
};

// num_a * den_b - num_b * den_a vanishes up to tol relative to the largest coefficient
bool rational_equal(const LaurentRational& a, const LaurentRational& b, double tol = 1e-9);
// largest coefficient of the cross difference over max(largest cross coefficient, floor)
double rational_residual(const LaurentRational& a, const LaurentRational& b, double floor = 0);

}  // namespace plgz
