#pragma once

#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "plgz/padic.hpp"
#include "plgz/quadform.hpp"

namespace plgz {

/**
 * Element a + b sqrt(eps) of Q(sqrt(eps)); eps = 0 marks a plain rational.
 */
struct QE {
    mpq_class a = 0, b = 0;
    long eps = 0;

    QE() = default;
    QE(long x) : a(x) {}
    QE(mpq_class x) : a(std::move(x)) {}
    QE(mpq_class x, mpq_class y, long e) : a(std::move(x)), b(std::move(y)), eps(e) {}
    static QE sqrt_eps(long e) { return QE(0, 1, e); }

    bool is_zero() const { return a == 0 && b == 0; }
    bool in_F() const { return b == 0; }
    QE conj() const { return QE(a, -b, eps); }
    mpq_class norm() const { return a * a - mpq_class(eps) * b * b; }

    QE operator+(const QE& o) const;
    QE operator-(const QE& o) const;
    QE operator*(const QE& o) const;
    QE operator/(const QE& o) const;
    QE operator-() const { return QE(-a, -b, eps); }
    bool operator==(const QE& o) const { return a == o.a && b == o.b; }
    bool operator!=(const QE& o) const { return !(*this == o); }
    std::string to_string() const;
};

class QMat {
public:
    QMat() = default;
    QMat(int rows, int cols) : r_(rows), c_(cols), v_(static_cast<size_t>(rows) * cols) {}
    static QMat identity(int n);
    static QMat unit(int n, int i, int j, QE value = QE(1));  // value at (i,j), zero elsewhere

    int rows() const { return r_; }
    int cols() const { return c_; }
    QE& operator()(int i, int j) { return v_[static_cast<size_t>(i) * c_ + j]; }
    const QE& operator()(int i, int j) const { return v_[static_cast<size_t>(i) * c_ + j]; }

    QMat operator+(const QMat& o) const;
    QMat operator-(const QMat& o) const;
    QMat operator*(const QMat& o) const;
    QMat operator*(const QE& s) const;
    bool operator==(const QMat& o) const;
    bool is_zero() const;

    QMat transpose() const;
    QMat adjoint() const;  // conjugate transpose
    QE trace() const;
    QE det() const;
    QMat inverse() const;
    QMat block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const QMat& b);
    QE leading_minor(int size) const;
    QE trailing_minor(int size) const;
    int rank() const;
    std::string to_string() const;

private:
    int r_ = 0, c_ = 0;
    std::vector<QE> v_;
};

QMat bracket(const QMat& x, const QMat& y);

// Congruence diagonalization of a symmetric (or hermitian, over E) matrix; zeros mark the radical.
std::vector<mpq_class> hermitian_diagonal(const QMat& M);
// Rank of a rational Gram matrix.
int rational_rank(const std::vector<std::vector<mpq_class>>& G);
// Square-class form of a nondegenerate rational Gram matrix.
DiagonalForm form_of_gram(const Context& ctx, const std::vector<std::vector<mpq_class>>& G);

enum class Family { GL, SP, SU };
std::string family_name(Family f);
Family parse_family(const std::string& s);

/**
 * Matrix model of a graded algebra. Elements of V+ and V- are stored by their
 * n x n payloads B, C; the full 2n x 2n matrices are X(B) = [[0,B],[0,0]] and
 * Y(C) = [[0,0],[C,0]]. lambda_j sits at diagonal position n-1-j (0-based).
 */
class RealizationContext {
public:
    RealizationContext(Family family, int n, Context ctx);

    Family family() const { return family_; }
    int n() const { return n_; }
    int k() const { return n_ - 1; }
    const Context& ctx() const { return ctx_; }
    long xi() const { return xi_; }  // E = F(sqrt(xi)) for SU, 0 otherwise
    int dim_vplus() const { return static_cast<int>(plus_basis_.size()); }
    int ell() const { return ell_; }
    int d() const { return d_; }
    int e() const { return e_; }
    int kappa() const { return 1; }
    mpq_class m_const() const {
        mpq_class m(dim_vplus(), n_);
        m.canonicalize();
        return m;
    }
    // b(M, N) = b_scale * tr(MN), derived from the Killing normalization
    const mpq_class& b_scale() const { return b_scale_; }

    QMat X(const QMat& B) const;
    QMat Y(const QMat& C) const;
    QMat plus_payload(const QMat& M) const { return M.block(0, n_, n_, n_); }
    QMat minus_payload(const QMat& M) const { return M.block(n_, 0, n_, n_); }
    QMat levi(const QMat& A, const QMat& D) const;  // diag(A, D)
    QMat H0() const;
    QMat H_lambda(int j) const;
    QMat Xj(int j) const;  // payloads
    QMat Yj(int j) const;
    QMat I_plus() const;
    QMat I_minus() const;

    mpq_class b(const QMat& M, const QMat& N) const;
    mpq_class b_pm(const QMat& B, const QMat& C) const { return b(X(B), Y(C)); }

    // F-bases: payloads for V+, V-, and full matrices for the Levi part
    const std::vector<QMat>& plus_basis() const { return plus_basis_; }
    const std::vector<QMat>& minus_basis() const { return minus_basis_; }
    // the V- basis dual to plus_basis() under b
    const std::vector<QMat>& minus_dual_basis() const { return minus_dual_; }
    const std::vector<QMat>& levi_basis() const { return levi_basis_; }
    // coordinates of B in plus_basis(), of C in minus_dual_basis()
    std::vector<mpq_class> plus_coords(const QMat& B) const;
    std::vector<mpq_class> minus_coords(const QMat& C) const;
    QMat plus_from_coords(const std::vector<mpq_class>& x) const;
    QMat minus_from_coords(const std::vector<mpq_class>& y) const;

    bool valid_payload(const QMat& B) const;

    // eigenvalue of ad H on a full matrix that is known to be an eigenvector
    static mpq_class eigenvalue(const QMat& H, const QMat& M);
    // Levi basis elements in K_p(i, j)
    std::vector<QMat> K_space(int p, int i, int j) const;
    // V- basis elements in E_{i,j}(-1,-1)
    std::vector<QMat> E_minus_pair(int i, int j) const;

    // 2 rho_P evaluated on H_{lambda_s}, read off the nilradical
    std::vector<mpq_class> two_rho_P() const;

private:
    Family family_;
    int n_;
    Context ctx_;
    long xi_ = 0;
    int ell_ = 0, d_ = 0, e_ = 0;
    mpq_class b_scale_;
    std::vector<QMat> plus_basis_, minus_basis_, minus_dual_, levi_basis_;
};

// Delta_0..Delta_k on V+ (leading minors), nabla_0..nabla_k on V- (trailing minors of -C)
std::vector<mpq_class> delta_invariants(const RealizationContext& R, const QMat& B);
std::vector<mpq_class> nabla_invariants(const RealizationContext& R, const QMat& C);

// the V- payload completing (Y, H_0, X) to an sl2-triple; checked by brackets
QMat iota_map(const RealizationContext& R, const QMat& B);

struct OrbitLabel {
    int rank = 0;
    // SP: Witt index and anisotropic-kernel similarity data; SU: determinant class; GL: nothing more
    int witt_index = -1;
    int kernel_rank = -1;
    int kernel_disc = -1;     // square-class bits, only for kernel rank 2
    int det_norm_class = 0;  // SU, even rank: +1 norm, -1 non-norm
    // P-tilde tag when all Delta_j are nonzero: bits of a_0..a_k in the representative set
    std::vector<int> p_tag;
    std::string to_string() const;
    bool same_G_orbit(const OrbitLabel& o) const;
};

OrbitLabel element_orbit(const RealizationContext& R, const QMat& B);

/**
 * Group element acting on payloads: SP B -> mu^{-1} g B g^T, GL B -> g B h^{-1},
 * SU B -> mu^{-1} g B g^*.
 */
struct GroupMove {
    QMat g, h;
    QE mu = QE(1);
};
QMat apply_move(const RealizationContext& R, const GroupMove& m, const QMat& B);

enum class MoveKind { Torus, Unipotent, General };
GroupMove random_move(const RealizationContext& R, std::mt19937_64& rng, MoveKind kind);
// torus characters x_j(l) for a diagonal move
std::vector<mpq_class> torus_characters(const RealizationContext& R, const GroupMove& m);
QMat random_payload(const RealizationContext& R, std::mt19937_64& rng, bool generic = true);
mpq_class random_padic_rational(const Context& ctx, std::mt19937_64& rng, int vmin = -1, int vmax = 2);

// Q_X(Y) = b(e^{ad X} Y, Y) on V-
std::vector<std::vector<mpq_class>> gram_QX(const RealizationContext& R, const QMat& B);
// q_{X_i,X_j}(Y) = -1/2 b([X_i,Y],[X_j,Y]) on E_{i,j}(-1,-1)
std::vector<std::vector<mpq_class>> gram_q_pair(const RealizationContext& R, int i, int j);
// Q_{u',v}(A) = 1/2 b((ad A)^2 u', v) on K_p(1,-1); u' a V- payload, v a V+ payload
std::vector<std::vector<mpq_class>> gram_Q_uv(const RealizationContext& R, int p, const QMat& u, const QMat& v);

// matrix of theta_X = e^{-ad X} e^{-ad iota(X)} e^{-ad X} from V+ to V-, in the bases (plus, dual minus)
std::vector<std::vector<mpq_class>> theta_matrix(const RealizationContext& R, const QMat& B);
mpq_class rational_det(std::vector<std::vector<mpq_class>> A);

}  // namespace plgz
