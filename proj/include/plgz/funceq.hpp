#pragma once

#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "plgz/characters.hpp"
#include "plgz/laurent.hpp"
#include "plgz/quadform.hpp"
#include "plgz/realizations.hpp"

namespace plgz {

using CharTuple = std::vector<TameMultChar>;
using ClassTuple = std::vector<SquareClass>;

/**
 * Spectral data of a minimal principal series: delta, mu and the derived
 * (omega, s) with omega_0...omega_j = delta_j^{-1} and s_0 + ... + s_j = rho_j - mu_j.
 */
struct SpectralParams {
    Context ctx;
    int k = 0, d = 1, e = 0;
    int kappa = 1;
    double m = 1;  // 1 + kd/2
    CharTuple delta;
    std::vector<cplx> mu;
    CharTuple omega;
    std::vector<cplx> s;
    std::vector<double> rho;

    // c_{delta,mu}(a) = prod_{j<k} delta_j(a_j) |a_j|^{-(rho_j - mu_j)}
    cplx c_factor(const ClassTuple& a) const;
    nlohmann::json to_json() const;
};

SpectralParams spectral_params(const Context& ctx, int k, int e, int d, CharTuple delta, std::vector<cplx> mu);

// (omega, s) -> (omega^#, s^#)
std::pair<CharTuple, std::vector<cplx>> sharp(const CharTuple& omega, const std::vector<cplx>& s);
// (s_0 - z, s_1, ..., s_k)
std::vector<cplx> shift_first(std::vector<cplx> s, cplx z);

std::vector<ClassTuple> all_tuples(const SeGroup& S, int len);

// the group S_e and its representative set for (d, e)
SeGroup scaling_group(const Context& ctx, int d, int e);

/**
 * Coefficients of the explicit functional equation of the P-zeta functions,
 * D^k_{(a,c)}(omega, s) for a, c in Sigma_e^{k+1}. Closed product and recursion.
 */
cplx D_closed(const Context& ctx, int d, int e, const ClassTuple& a, const ClassTuple& c, const CharTuple& omega,
              const std::vector<cplx>& s);
cplx D_recursive(const Context& ctx, int d, int e, const ClassTuple& a, const ClassTuple& c, const CharTuple& omega,
                 const std::vector<cplx>& s);
// the closed forms for even e, written with gamma_psi(q_e) and the norm character
cplx D_even_e(const Context& ctx, int d, int e, const ClassTuple& a, const ClassTuple& c, const CharTuple& omega,
              const std::vector<cplx>& s);
// D^0 in T = q^{-s_0}
LaurentRational D0_symbolic(const Context& ctx, int d, int e, SquareClass a, SquareClass c, const TameMultChar& omega0);

struct CoeffMatrix {
    std::string kind;
    std::vector<ClassTuple> rows, cols;
    std::vector<std::vector<cplx>> entries;
    nlohmann::json to_json() const;
    double max_diff(const CoeffMatrix& o) const;
};

// B_{a,c}(delta, mu)(z) for a, c in Sigma_e^k: the stated sum over y, and the value read off D^k
CoeffMatrix B_direct(const SpectralParams& sp, cplx z);
CoeffMatrix B_derived(const SpectralParams& sp, cplx z);

struct OperatorA {
    CoeffMatrix matrix;               // B at z = (m+1)/2
    std::vector<int> row_orbit;       // open G-orbit index of P.I+(a,1)
    int orbit_count = 0;
    nlohmann::json to_json() const;
};
// orbit indices come from the realization when one is given, otherwise all tuples share orbit 1
OperatorA A_operator(const SpectralParams& sp, const RealizationContext* R = nullptr);

// d(delta, mu, z) for e in {0, 4}; with psi^a when a is given
cplx d_factor(const SpectralParams& sp, cplx z, const std::optional<PadicScalar>& a = std::nullopt);

struct EpsilonFactors {
    cplx eps_plus, eps_minus, L_plus, L_minus;
    // the product formulas with eps_0 and L_0 of the characters
    cplx eps_plus_closed, eps_minus_closed;
    double n_plus = 0, n_minus = 0;  // eps(z) = c q^{-n z}
    cplx c_plus, c_minus;
    double monomial_residual = 0;
    nlohmann::json to_json() const;
};

/**
 * L^+(z) = Q+(q^{-z})^{-1} prod L_0(delta_j^{-1}, z - mu_j), L^-(z) = Q-(q^{-z})^{-1} prod L_0(delta_j, z + mu_j),
 * eps^+ = d L^+(z) / L^-(1-z), eps^- = (delta_0...delta_k)(-1) / d(1-z) * L^-(z) / L^+(1-z).
 */
EpsilonFactors epsilon_factors(const SpectralParams& sp, cplx z, const std::optional<PadicScalar>& a = std::nullopt,
                               const LaurentPoly* Q_plus = nullptr, const LaurentPoly* Q_minus = nullptr);

// varpi(a) = (delta_0...delta_k)(a) |a|^{mu_0 + ... + mu_k}
cplx varpi(const SpectralParams& sp, const PadicScalar& a);

}  // namespace plgz
