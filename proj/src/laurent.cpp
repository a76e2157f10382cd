#include "plgz/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plgz {

LaurentPoly LaurentPoly::constant(int nvars, cplx c) {
    LaurentPoly p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

LaurentPoly LaurentPoly::monomial(int nvars, const Exponents& e, cplx c) {
    LaurentPoly p(nvars);
    p.add_term(e, c);
    return p;
}

LaurentPoly LaurentPoly::var(int nvars, int v, int power, cplx c) {
    Exponents e(nvars, 0);
    e[v] = power;
    return monomial(nvars, e, c);
}

cplx LaurentPoly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? cplx(0) : it->second;
}

double LaurentPoly::max_abs() const {
    double m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void LaurentPoly::add_term(const Exponents& e, cplx c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent arity mismatch");
    if (c == cplx(0)) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == cplx(0)) terms_.erase(it);
    }
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
    LaurentPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const { return *this + (-o); }

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
    LaurentPoly r(nvars_);
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) {
            Exponents e(nvars_);
            for (int i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    return r;
}

LaurentPoly LaurentPoly::operator*(cplx c) const {
    LaurentPoly r(nvars_);
    for (const auto& [e, v] : terms_) r.add_term(e, v * c);
    return r;
}

cplx LaurentPoly::eval(const std::vector<cplx>& t) const {
    cplx s = 0;
    for (const auto& [e, c] : terms_) {
        cplx m = c;
        for (int i = 0; i < nvars_; ++i) m *= std::pow(t[i], e[i]);
        s += m;
    }
    return s;
}

LaurentPoly LaurentPoly::scale_var(int v, cplx c) const {
    LaurentPoly r(nvars_);
    for (const auto& [e, val] : terms_) r.add_term(e, val * std::pow(c, e[v]));
    return r;
}

LaurentPoly LaurentPoly::invert_var(int v) const {
    LaurentPoly r(nvars_);
    for (const auto& [e0, val] : terms_) {
        Exponents e = e0;
        e[v] = -e[v];
        r.add_term(e, val);
    }
    return r;
}

LaurentPoly LaurentPoly::shift(const Exponents& s) const {
    LaurentPoly r(nvars_);
    for (const auto& [e0, val] : terms_) {
        Exponents e = e0;
        for (int i = 0; i < nvars_; ++i) e[i] += s[i];
        r.add_term(e, val);
    }
    return r;
}

LaurentPoly LaurentPoly::chopped(double tol) const {
    double m = max_abs();
    LaurentPoly r(nvars_);
    for (const auto& [e, c] : terms_)
        if (std::abs(c) > tol * m) r.add_term(e, c);
    return r;
}

Exponents LaurentPoly::min_exponents() const {
    Exponents m(nvars_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        for (int i = 0; i < nvars_; ++i) m[i] = first ? e[i] : std::min(m[i], e[i]);
        first = false;
    }
    return m;
}

std::string LaurentPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
        for (int i = 0; i < nvars_; ++i)
            if (e[i] != 0) os << "*t" << i << "^" << e[i];
    }
    return os.str();
}

// ---------------------------------------------------------------------------

LaurentRational::LaurentRational(int nvars)
    : num_(nvars), den_(LaurentPoly::constant(nvars, 1.0)) {}

LaurentRational::LaurentRational(LaurentPoly num, LaurentPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("zero denominator");
}

LaurentRational LaurentRational::constant(int nvars, cplx c) {
    return LaurentRational(LaurentPoly::constant(nvars, c), LaurentPoly::constant(nvars, 1.0));
}

LaurentRational LaurentRational::from_poly(const LaurentPoly& p) {
    return LaurentRational(p, LaurentPoly::constant(p.nvars(), 1.0));
}

LaurentRational LaurentRational::geometric(int nvars, cplx c, const Exponents& first, cplx ratio_coeff,
                                           const Exponents& ratio_exp) {
    LaurentPoly den = LaurentPoly::constant(nvars, 1.0) - LaurentPoly::monomial(nvars, ratio_exp, ratio_coeff);
    return LaurentRational(LaurentPoly::monomial(nvars, first, c), den);
}

LaurentRational LaurentRational::operator+(const LaurentRational& o) const {
    if (den_.terms() == o.den_.terms()) return LaurentRational(num_ + o.num_, den_).reduced();
    return LaurentRational(num_ * o.den_ + o.num_ * den_, den_ * o.den_).reduced();
}

LaurentRational LaurentRational::operator-(const LaurentRational& o) const { return *this + o * cplx(-1.0); }

LaurentRational LaurentRational::operator*(const LaurentRational& o) const {
    return LaurentRational(num_ * o.num_, den_ * o.den_).reduced();
}

LaurentRational LaurentRational::operator/(const LaurentRational& o) const {
    if (o.num_.is_zero()) throw std::domain_error("division by zero rational function");
    return LaurentRational(num_ * o.den_, den_ * o.num_).reduced();
}

LaurentRational LaurentRational::operator*(cplx c) const { return LaurentRational(num_ * c, den_); }

cplx LaurentRational::eval(const std::vector<cplx>& t) const {
    cplx d = den_.eval(t);
    if (d == cplx(0)) throw std::domain_error("pole of rational function");
    return num_.eval(t) / d;
}

LaurentRational LaurentRational::scale_var(int v, cplx c) const {
    return LaurentRational(num_.scale_var(v, c), den_.scale_var(v, c));
}

LaurentRational LaurentRational::invert_var(int v) const {
    return LaurentRational(num_.invert_var(v), den_.invert_var(v)).reduced();
}

LaurentRational LaurentRational::reduced() const {
    if (num_.is_zero()) return LaurentRational(num_, LaurentPoly::constant(nvars(), 1.0));
    // move the denominator's minimal monomial to the numerator and normalize
    Exponents md = den_.min_exponents();
    Exponents neg(md.size());
    for (size_t i = 0; i < md.size(); ++i) neg[i] = -md[i];
    LaurentPoly den = den_.shift(neg);
    LaurentPoly num = num_.shift(neg);
    cplx lead = den.terms().begin()->second;
    return LaurentRational(num * (1.0 / lead), den * (1.0 / lead));
}

std::string LaurentRational::to_string() const { return "(" + num_.to_string() + ") / (" + den_.to_string() + ")"; }

double rational_residual(const LaurentRational& a, const LaurentRational& b, double floor) {
    LaurentPoly l = a.num() * b.den();
    LaurentPoly r = b.num() * a.den();
    double scale = std::max({l.max_abs(), r.max_abs(), floor, 1e-300});
    return (l - r).max_abs() / scale;
}

bool rational_equal(const LaurentRational& a, const LaurentRational& b, double tol) {
    return rational_residual(a, b) <= tol;
}

}  // namespace plgz
