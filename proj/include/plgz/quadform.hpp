#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plgz/padic.hpp"

namespace plgz {

using ScalarMatrix = std::vector<std::vector<PadicScalar>>;

/**
 * Diagonal quadratic form <a_1,...,a_r>, stored by square classes.
 */
class DiagonalForm {
public:
    DiagonalForm() = default;
    DiagonalForm(Context ctx, std::vector<SquareClass> coeffs);
    static DiagonalForm from_scalars(const std::vector<PadicScalar>& coeffs);
    static DiagonalForm hyperbolic(Context ctx, int planes);

    const Context& ctx() const { return ctx_; }
    const std::vector<SquareClass>& coeffs() const { return coeffs_; }
    int rank() const { return static_cast<int>(coeffs_.size()); }
    SquareClass disc() const;
    DiagonalForm scaled(SquareClass t) const;
    DiagonalForm operator+(const DiagonalForm& o) const;  // orthogonal sum
    DiagonalForm sorted() const;
    std::string to_string() const;

private:
    Context ctx_;
    std::vector<SquareClass> coeffs_;
};

struct FormInvariants {
    int rank = 0;
    SquareClass disc;
    int witt_index = 0;
    DiagonalForm anisotropic_kernel;
};

struct Diagonalization {
    DiagonalForm form;
    std::vector<PadicScalar> diagonal;
    ScalarMatrix witness;  // witness * G * witness^T = diag(diagonal)
};

Diagonalization diagonalize_gram(const ScalarMatrix& G);

// Zero search modulo p^3 with the Hensel criterion.
bool isotropic_hensel(const DiagonalForm& f);
// Rank / disc / Hilbert symbol criteria.
bool isotropic_invariant(const DiagonalForm& f);

FormInvariants isotropy_and_witt(const DiagonalForm& f);
std::vector<SquareClass> represented_classes(const DiagonalForm& f);

enum class FormRelation { Equivalent, SimilarNotEquivalent, Inequivalent };
std::string to_string(FormRelation r);
FormRelation form_relation(const DiagonalForm& f, const DiagonalForm& g);
bool forms_equivalent(const DiagonalForm& f, const DiagonalForm& g);

enum class SeKind { Full, Squares, Norm };

/**
 * The scaling group S_e of q_e inside the square-class group, and the representative set.
 */
class SeGroup {
public:
    SeGroup() = default;
    SeGroup(Context ctx, int e);

    int e() const { return e_; }
    SeKind kind() const { return kind_; }
    SquareClass xi() const { return xi_; }
    const std::vector<SquareClass>& reps() const { return reps_; }
    const Context& ctx() const { return ctx_; }
    int index() const { return static_cast<int>(reps_.size()); }
    bool contains(SquareClass t) const;
    // the element of reps() in the coset t.S
    SquareClass coset_rep(SquareClass t) const;
    // quadratic character with kernel S (for kind Norm); +1 otherwise on S
    int norm_character(SquareClass t) const;
    std::string kind_name() const;

private:
    Context ctx_;
    int e_ = 0;
    SeKind kind_ = SeKind::Full;
    SquareClass xi_;
    std::vector<SquareClass> reps_;
};

DiagonalForm anisotropic_reference_form(const Context& ctx, int e);
std::pair<DiagonalForm, SeGroup> build_qe_and_Se(int d, int e, const Context& ctx);

// Every diagonal class form of the given rank, coefficients non-decreasing.
std::vector<DiagonalForm> all_class_forms(const Context& ctx, int rank);

}  // namespace plgz
