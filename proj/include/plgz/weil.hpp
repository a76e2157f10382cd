#pragma once

#include <vector>

#include "plgz/characters.hpp"
#include "plgz/quadform.hpp"

namespace plgz {

enum class WeilProvenance { GaussOracle, ProductFormula, GammaKFormula, DirectSum };

struct WeilIndex {
    cplx value = 1.0;
    WeilProvenance provenance = WeilProvenance::GaussOracle;
};

// gamma_psi(a x^2) from the stabilized normalized sum of psi(a x^2)
WeilIndex weil_alpha(const PadicScalar& a);
WeilIndex weil_alpha(const LocalFieldContext& ctx, SquareClass a);
WeilIndex weil_gamma(const DiagonalForm& Q);

/**
 * The constant gamma_k(a_0..a_{k-1}, c_k) for the reference form of (d, e).
 */
WeilIndex gamma_k(const std::vector<SquareClass>& a, SquareClass c_k, int e, int d, const Context& ctx);

// Normalized oscillatory sum of psi over a lattice for an integral quadratic form
// given by a symmetric Gram matrix G with Q(x) = x^T G x (rational entries);
// sums over p^{-m} Z^n modulo p^{m'} Z^n with growing m until stable.
WeilIndex weil_gamma_direct(const Context& ctx, const std::vector<std::vector<mpq_class>>& G);

}  // namespace plgz
