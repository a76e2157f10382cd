#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plgz/funceq.hpp"
#include "plgz/realizations.hpp"

namespace plgz {

enum class Side { Plus, Minus };

/**
 * Exhaustive count of the lattice O^N (coordinates in plus_basis for V+, in
 * minus_dual_basis for V-) modulo p^{V+1}, sorted by the valuations and the
 * leading unit digits of the relative invariants. Points where some invariant
 * vanishes modulo p^{V+1} are only counted in the tail.
 */
struct Census {
    std::string family;
    int n = 0, p = 3, depth = 0, dim = 0;
    Side side = Side::Plus;
    // key: v_0..v_k then u_0..u_k (unit digit mod p) of Delta_j (or nabla_j)
    std::map<std::vector<int>, int64_t> counts;
    int64_t tail = 0;
    int64_t total = 0;  // p^{(V+1) dim}

    double cell_volume() const;
    double tail_volume() const { return tail * cell_volume(); }
    nlohmann::json to_json() const;
    static Census from_json(const nlohmann::json& j);
};

Census run_census(const RealizationContext& R, Side side, int depth);
// reads and writes $PLGZ_CACHE/census-<family>-n-p-V-side.json when the variable is set
Census cached_census(const RealizationContext& R, Side side, int depth);

// orbit tuple a_0..a_k of a census key: Delta_j / Delta_{j+1} for V+, nabla_{k-j} / nabla_{k-j+1} for V-
ClassTuple census_orbit(const Census& C, const std::vector<int>& key, const SeGroup& S);

/**
 * Truncated zeta function K_a(1_lattice, omega, s) = sum over strata with all v_j <= V of
 * vol * omega(Delta) T^v, T_j = q^{-s_j}; exact in every monomial of degree <= V in each variable.
 */
struct TruncatedZeta {
    int nvars = 0, depth = 0;
    std::map<std::vector<int>, cplx> coeffs;  // exponent vector -> coefficient
    double tail_volume = 0;
    cplx eval(const std::vector<cplx>& T) const;
    // |K - truncated| <= tail_volume * q^{-(V+1) min Re s_j} for Re s_j > 0
    double tail_bound(const std::vector<cplx>& s, int p) const;
};
TruncatedZeta zeta_K(const Census& C, const ClassTuple& a, const CharTuple& omega, const SeGroup& S);

/**
 * A rational function N(T) / prod_i (1 - u_i T^{a_i}) found by searching denominators
 * whose product with the truncated series leaves a polynomial inside the truncation box.
 */
struct ReconstructedZeta {
    bool ok = false;
    std::vector<std::pair<cplx, std::vector<int>>> factors;
    std::map<std::vector<int>, cplx> numerator;
    double fit_residual = 0;
    cplx eval(const std::vector<cplx>& T) const;
    nlohmann::json to_json() const;
};

struct ReconstructOptions {
    int max_exponent = 3;      // |a| <= 3
    int max_half_power = 8;    // u = zeta q^{-h/2}, 0 <= h <= max_half_power
    int max_factors = 6;
    int numerator_degree = -1; // per variable; default depth - 2
    double tol = 1e-9;
    std::vector<cplx> roots;   // candidate unit parts; default: 2(p-1)-th roots of unity and character values
};
ReconstructedZeta reconstruct(const TruncatedZeta& Z, int p, const ReconstructOptions& opt = {});

struct FunctionalEquationCheck {
    bool reconstructed = false;
    // |lhs - rhs| / max(1, |lhs|) and |lhs - rhs| / |lhs|, worst over orbits and points
    double max_residual = 0;
    double max_relative = 0;
    std::vector<std::vector<cplx>> points;  // s values
    std::vector<double> residuals;
    std::vector<std::string> warnings;
    nlohmann::json to_json() const;
};

/**
 * For k = 1 SP: K^-_a(F Phi, omega^#, s^# - m) = sum_c D^1_{(a,c)}(omega, s) K^+_c(Phi, omega, s),
 * Phi the indicator of the coordinate lattice, both sides rebuilt from the census.
 */
FunctionalEquationCheck verify_fe_census(const RealizationContext& R, int depth, const CharTuple& omega,
                                         const std::vector<std::vector<cplx>>& points,
                                         const ReconstructOptions& opt = {});

}  // namespace plgz
