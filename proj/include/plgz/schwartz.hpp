#pragma once

#include <functional>
#include <random>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "plgz/characters.hpp"
#include "plgz/laurent.hpp"
#include "plgz/quadform.hpp"
#include "plgz/realizations.hpp"

namespace plgz {

using RatVec = std::vector<mpq_class>;

/**
 * coeff * psi(phase) * 1[x in center + p^level O^N] * psi(<x, modulation>)
 */
struct BallTerm {
    RatVec center;
    int level = 0;
    RatVec modulation;
    cplx coeff = 1.0;
    mpq_class phase = 0;
};

/**
 * Finite sum of ball terms: a Schwartz-Bruhat function on Q_p^N in closed form.
 * Fourier transforms stay in the class, so transforms and integrals are exact
 * up to the final complex exponentials.
 */
class BallFunction {
public:
    BallFunction() = default;
    BallFunction(int p, int dim) : p_(p), dim_(dim) {}
    static BallFunction indicator(int p, RatVec center, int level);

    int p() const { return p_; }
    int dim() const { return dim_; }
    const std::vector<BallTerm>& terms() const { return terms_; }
    void add(BallTerm t);

    BallFunction operator+(const BallFunction& o) const;
    BallFunction operator*(cplx c) const;

    cplx operator()(const RatVec& x) const;
    // supp f lies in p^L O^N
    int support_level() const;
    // f is constant on cosets of p^L O^N
    int constancy_level() const;
    // against the self-dual measure for psi(<x,y>)
    cplx integral() const;

    // centers reduced mod p^level, modulations mod p^{-level}, equal balls merged
    BallFunction canonical() const;

    nlohmann::json to_json() const;
    static BallFunction from_json(const nlohmann::json& j);

private:
    int p_ = 3, dim_ = 1;
    std::vector<BallTerm> terms_;
};

// F f(y) = int f(x) psi(<x,y>) dx and the conjugate transform with psi(-<x,y>)
BallFunction fourier(const BallFunction& f);
BallFunction fourier_bar(const BallFunction& f);
// term-by-term comparison of canonical forms
bool same_function(const BallFunction& f, const BallFunction& g, double tol = 1e-10);

struct RandomBallOptions {
    int terms = 3;
    int level_min = 0, level_max = 2;
    int center_vmin = -1;
    int modulation_vmin = -1;
    bool modulate = true;
};
BallFunction random_ball_function(int p, int dim, std::mt19937_64& rng, const RandomBallOptions& opt = {});

// representative of x modulo p^m, in p^{-s} [0, p^{m+s})
mpq_class reduce_mod(const mpq_class& x, int p, int m);
int valuation_or(const mpq_class& x, int p, int if_zero);

/**
 * Sum of g over the points p^box * k, 0 <= k_i < p^{cell-box}, times the cell volume.
 * Exact for g supported in p^box O^N and constant on cosets of p^cell O^N.
 */
cplx grid_integral(int p, int dim, int box, int cell, const std::function<cplx(const RatVec&)>& g,
                   long long budget = 20'000'000);
// the same with a box and a cell level for each coordinate
cplx grid_integral(int p, const std::vector<int>& box, std::vector<int> cell,
                   const std::function<cplx(const RatVec&)>& g, long long budget = 20'000'000);

/**
 * Rank one zeta integrals as rational functions of T = q^{-s}:
 * K(f, delta, s) = int f(t) |t|^s delta(t) dt, and its restriction to {t : t a in S}.
 */
LaurentRational tate_zeta(const Context& ctx, const BallFunction& f, const TameMultChar& delta);
LaurentRational strata_zeta(const Context& ctx, const BallFunction& f, const TameMultChar& delta, SquareClass a,
                            const SeGroup& S);
// rho~(delta, s; x) = |S^|^{-1} sum_chi chi(x) rho(delta chi, s), in T = q^{-s}
LaurentRational rho_tilde_symbolic(const TameMultChar& delta, SquareClass x, const SeGroup& S);

struct IntegralCheck {
    cplx lhs, rhs;
    double residual = 0;
};

struct MeasureNormalization {
    mpq_class c;        // det(theta_X0 on V+) * Delta_0(X0)^{2m}
    double abs_c = 1;
    double lambda = 1;  // dX = lambda d_1 X
};
MeasureNormalization measure_normalizer(const RealizationContext& R, const QMat& X0);
MeasureNormalization measure_normalizer(const RealizationContext& R);

// int_{V+} f(theta_X0 X) dX against |Delta_0(X0)|^{2m} int_{V-} f(Y) dY, f given on V- coordinates
IntegralCheck theta_measure_check(const RealizationContext& R, const QMat& X0, const BallFunction& f);

/**
 * T_f^{cut,+}(u, v) = |Delta_{cut+1}(v)|^{(cut+1)d/2} int_{K(1,-1)} f(e^{ad A}(u+v)) dA,
 * f given on V+ coordinates, u in K(2,0), v in K(0,2) as payloads.
 */
cplx mean_T(const RealizationContext& R, int cut, const BallFunction& f, const QMat& u, const QMat& v);
// int_{V+} f against int int T_f(u,v) |Delta_{cut+1}(v)|^{(cut+1)d/2} du dv
IntegralCheck mean_T_identity(const RealizationContext& R, int cut, const BallFunction& f);

// coordinates of V+ that lie in K_cut(i, j)
std::vector<int> plus_indices(const RealizationContext& R, int cut, int i, int j);

/**
 * For Q(A) = sum a_i A_i^2 on F^r, beta its polar form and alpha_beta(A) = (2 a_i A_i):
 * int Ff(alpha_beta A) psi(Q(A)) dA against C^{-1/2} gamma_psi(Q) int f(A) psi(-Q(A)) dA.
 */
IntegralCheck weil_formula_check(const Context& ctx, const RatVec& diag, const BallFunction& f);

}  // namespace plgz
