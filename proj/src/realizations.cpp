#include "plgz/realizations.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace plgz {

namespace {

long merge_eps(long x, long y) {
    if (x && y && x != y) throw std::logic_error("mixing two quadratic fields");
    return x ? x : y;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::logic_error("realization check failed: " + what);
}

mpq_class as_F(const QE& x, const char* what) {
    if (!x.in_F()) throw std::logic_error(std::string(what) + " is not in F");
    return x.a;
}

}  // namespace

QE QE::operator+(const QE& o) const { return QE(a + o.a, b + o.b, merge_eps(eps, o.eps)); }
QE QE::operator-(const QE& o) const { return QE(a - o.a, b - o.b, merge_eps(eps, o.eps)); }
QE QE::operator*(const QE& o) const {
    long e = merge_eps(eps, o.eps);
    return QE(a * o.a + mpq_class(e) * b * o.b, a * o.b + b * o.a, e);
}
QE QE::operator/(const QE& o) const {
    mpq_class nrm = o.norm();
    if (nrm == 0) throw std::domain_error("division by zero in Q(sqrt eps)");
    QE num = *this * o.conj();
    return QE(num.a / nrm, num.b / nrm, num.eps);
}
std::string QE::to_string() const {
    if (b == 0) return a.get_str();
    std::ostringstream os;
    os << a.get_str() << (b < 0 ? "-" : "+") << mpq_class(abs(b)).get_str() << "*sqrt(" << eps << ")";
    return os.str();
}

QMat QMat::identity(int n) {
    QMat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = QE(1);
    return I;
}

QMat QMat::unit(int n, int i, int j, QE value) {
    QMat M(n, n);
    M(i, j) = std::move(value);
    return M;
}

QMat QMat::operator+(const QMat& o) const {
    QMat r(r_, c_);
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = v_[i] + o.v_[i];
    return r;
}
QMat QMat::operator-(const QMat& o) const {
    QMat r(r_, c_);
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = v_[i] - o.v_[i];
    return r;
}
QMat QMat::operator*(const QMat& o) const {
    if (c_ != o.r_) throw std::logic_error("matrix shape mismatch");
    QMat r(r_, o.c_);
    for (int i = 0; i < r_; ++i)
        for (int l = 0; l < c_; ++l) {
            const QE& x = (*this)(i, l);
            if (x.is_zero()) continue;
            for (int j = 0; j < o.c_; ++j)
                if (!o(l, j).is_zero()) r(i, j) = r(i, j) + x * o(l, j);
        }
    return r;
}
QMat QMat::operator*(const QE& s) const {
    QMat r(r_, c_);
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = v_[i] * s;
    return r;
}
bool QMat::operator==(const QMat& o) const {
    if (r_ != o.r_ || c_ != o.c_) return false;
    for (size_t i = 0; i < v_.size(); ++i)
        if (v_[i] != o.v_[i]) return false;
    return true;
}
bool QMat::is_zero() const {
    for (const auto& x : v_)
        if (!x.is_zero()) return false;
    return true;
}
QMat QMat::transpose() const {
    QMat t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}
QMat QMat::adjoint() const {
    QMat t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j).conj();
    return t;
}
QE QMat::trace() const {
    QE t;
    for (int i = 0; i < std::min(r_, c_); ++i) t = t + (*this)(i, i);
    return t;
}
QE QMat::det() const {
    if (r_ != c_) throw std::logic_error("det of a non-square matrix");
    QMat a = *this;
    QE d(1);
    for (int c = 0; c < r_; ++c) {
        int piv = -1;
        for (int r = c; r < r_; ++r)
            if (!a(r, c).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) return QE(0);
        if (piv != c) {
            for (int j = 0; j < c_; ++j) std::swap(a(piv, j), a(c, j));
            d = -d;
        }
        d = d * a(c, c);
        for (int r = c + 1; r < r_; ++r) {
            if (a(r, c).is_zero()) continue;
            QE f = a(r, c) / a(c, c);
            for (int j = c; j < c_; ++j) a(r, j) = a(r, j) - f * a(c, j);
        }
    }
    return d;
}
QMat QMat::inverse() const {
    if (r_ != c_) throw std::logic_error("inverse of a non-square matrix");
    const int n = r_;
    QMat a = *this, inv = identity(n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!a(r, c).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("singular matrix");
        for (int j = 0; j < n; ++j) {
            std::swap(a(piv, j), a(c, j));
            std::swap(inv(piv, j), inv(c, j));
        }
        QE s = QE(1) / a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) = a(c, j) * s;
            inv(c, j) = inv(c, j) * s;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || a(r, c).is_zero()) continue;
            QE f = a(r, c);
            for (int j = 0; j < n; ++j) {
                a(r, j) = a(r, j) - f * a(c, j);
                inv(r, j) = inv(r, j) - f * inv(c, j);
            }
        }
    }
    return inv;
}
QMat QMat::block(int r0, int c0, int nr, int nc) const {
    QMat b(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}
void QMat::set_block(int r0, int c0, const QMat& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}
QE QMat::leading_minor(int size) const {
    if (size == 0) return QE(1);
    return block(0, 0, size, size).det();
}
QE QMat::trailing_minor(int size) const {
    if (size == 0) return QE(1);
    return block(r_ - size, c_ - size, size, size).det();
}
int QMat::rank() const {
    QMat a = *this;
    int rank = 0;
    for (int c = 0; c < c_ && rank < r_; ++c) {
        int piv = -1;
        for (int r = rank; r < r_; ++r)
            if (!a(r, c).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        for (int j = 0; j < c_; ++j) std::swap(a(piv, j), a(rank, j));
        for (int r = rank + 1; r < r_; ++r) {
            if (a(r, c).is_zero()) continue;
            QE f = a(r, c) / a(rank, c);
            for (int j = c; j < c_; ++j) a(r, j) = a(r, j) - f * a(rank, j);
        }
        ++rank;
    }
    return rank;
}
std::string QMat::to_string() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < r_; ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < c_; ++j) os << (j ? ", " : "") << (*this)(i, j).to_string();
        os << "]";
    }
    os << "]";
    return os.str();
}

QMat bracket(const QMat& x, const QMat& y) { return x * y - y * x; }

std::vector<mpq_class> hermitian_diagonal(const QMat& M0) {
    const int n = M0.rows();
    QMat M = M0;
    std::vector<mpq_class> out;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!M(r, r).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) {
            // all remaining diagonal entries vanish; create one from an off-diagonal entry
            int ri = -1, rj = -1;
            for (int r = c; r < n && ri < 0; ++r)
                for (int s = r + 1; s < n; ++s)
                    if (!M(r, s).is_zero()) {
                        ri = r;
                        rj = s;
                        break;
                    }
            if (ri < 0) {
                for (int r = c; r < n; ++r) out.push_back(0);
                return out;
            }
            // row/col ri += t * row/col rj, new diagonal 2 Re(t M(ri,rj))
            QE t(1);
            if ((M(ri, rj) + M(ri, rj).conj()).is_zero()) t = QE::sqrt_eps(M(ri, rj).eps);
            for (int j = 0; j < n; ++j) M(ri, j) = M(ri, j) + t * M(rj, j);
            for (int i = 0; i < n; ++i) M(i, ri) = M(i, ri) + M(i, rj) * t.conj();
            piv = ri;
        }
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(M(piv, j), M(c, j));
            for (int i = 0; i < n; ++i) std::swap(M(i, piv), M(i, c));
        }
        QE dcc = M(c, c);
        out.push_back(as_F(dcc, "hermitian diagonal entry"));
        for (int r = c + 1; r < n; ++r) {
            if (M(r, c).is_zero()) continue;
            QE f = M(r, c) / dcc;
            for (int j = 0; j < n; ++j) M(r, j) = M(r, j) - f * M(c, j);
            for (int i = 0; i < n; ++i) M(i, r) = M(i, r) - M(i, c) * f.conj();
        }
    }
    return out;
}

namespace {
QMat to_qmat(const std::vector<std::vector<mpq_class>>& G) {
    const int n = static_cast<int>(G.size());
    QMat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = QE(G[i][j]);
    return M;
}
}  // namespace

int rational_rank(const std::vector<std::vector<mpq_class>>& G) { return to_qmat(G).rank(); }

DiagonalForm form_of_gram(const Context& ctx, const std::vector<std::vector<mpq_class>>& G) {
    std::vector<SquareClass> cls;
    for (const auto& x : hermitian_diagonal(to_qmat(G))) {
        if (x == 0) throw DomainError("degenerate Gram matrix");
        cls.push_back(square_class_of(*ctx, x));
    }
    return DiagonalForm(ctx, cls);
}

mpq_class rational_det(std::vector<std::vector<mpq_class>> A) { return as_F(to_qmat(A).det(), "determinant"); }

std::string family_name(Family f) {
    switch (f) {
        case Family::GL: return "GL";
        case Family::SP: return "SP";
        case Family::SU: return "SU";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    std::string u;
    for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "GL") return Family::GL;
    if (u == "SP") return Family::SP;
    if (u == "SU") return Family::SU;
    throw DomainError("unknown family '" + s + "' (expected GL, SP or SU)");
}

// ---------------------------------------------------------------------------

mpq_class RealizationContext::eigenvalue(const QMat& H, const QMat& M) {
    QMat br = bracket(H, M);
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (!M(i, j).is_zero()) {
                QE c = br(i, j) / M(i, j);
                mpq_class v = as_F(c, "ad eigenvalue");
                require(br == M * QE(v), "basis element is not an ad-eigenvector");
                return v;
            }
    throw std::logic_error("eigenvalue of the zero matrix");
}

RealizationContext::RealizationContext(Family family, int n, Context ctx)
    : family_(family), n_(n), ctx_(std::move(ctx)) {
    if (n < 2 || n > 8) throw DomainError("realizations need 2 <= n <= 8");
    if (family == Family::SU) {
        // smallest positive integer in the class of xi
        SeGroup S(ctx_, 2);
        for (long r = 2; !xi_; ++r)
            if (square_class_of(*ctx_, mpq_class(r)) == S.xi()) xi_ = r;
    }
    // V+ / V- payload bases
    for (int r = 0; r < n; ++r)
        for (int s = r; s < n; ++s) {
            if (family == Family::GL) break;
            if (r == s) {
                plus_basis_.push_back(QMat::unit(n, r, r));
            } else {
                plus_basis_.push_back(QMat::unit(n, r, s) + QMat::unit(n, s, r));
                if (family == Family::SU) {
                    QE w = QE::sqrt_eps(xi_);
                    plus_basis_.push_back(QMat::unit(n, r, s, w) - QMat::unit(n, s, r, w));
                }
            }
        }
    if (family == Family::GL)
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) plus_basis_.push_back(QMat::unit(n, r, s));
    minus_basis_ = plus_basis_;

    // Levi part
    QMat Z(n, n);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
            QMat E = QMat::unit(n, r, s);
            switch (family) {
                case Family::GL:
                    levi_basis_.push_back(levi(E, Z));
                    levi_basis_.push_back(levi(Z, E));
                    break;
                case Family::SP: levi_basis_.push_back(levi(E, E.transpose() * QE(-1))); break;
                case Family::SU: {
                    levi_basis_.push_back(levi(E, E.transpose() * QE(-1)));
                    QMat W = QMat::unit(n, r, s, QE::sqrt_eps(xi_));
                    levi_basis_.push_back(levi(W, W.adjoint() * QE(-1)));
                    break;
                }
            }
        }

    // b from the Killing normalization: b = -(k+1)/(4 dim V+) Killing, Killing(H0,H0) = tr (ad H0)^2
    const QMat h0 = H0();
    mpq_class killing = 0;
    for (const auto& B : plus_basis_) killing += 2 * mpq_class(eigenvalue(h0, X(B)) * eigenvalue(h0, X(B)));
    for (const auto& L : levi_basis_) require(eigenvalue(h0, L) == 0, "Levi part has H0-degree 0");
    for (const auto& C : minus_basis_) require(eigenvalue(h0, Y(C)) == -2, "V- has H0-degree -2");
    const mpq_class tr_h0 = as_F((h0 * h0).trace(), "tr H0^2");
    b_scale_ = mpq_class(-(k() + 1), 4 * dim_vplus()) * killing / tr_h0;

    // sl2 triples and the normalization of b on them
    for (int j = 0; j <= k(); ++j) {
        QMat x = X(Xj(j)), y = Y(Yj(j)), h = H_lambda(j);
        require(bracket(y, x) == h, "[Y_j, X_j] = H_lambda_j");
        require(bracket(h, x) == x * QE(2), "[H_j, X_j] = 2 X_j");
        require(bracket(h, y) == y * QE(-2), "[H_j, Y_j] = -2 Y_j");
        require(bracket(h0, x) == x * QE(2), "[H0, X_j] = 2 X_j");
        require(b(x, y) == 1, "b(X_j, Y_j) = 1");
        require(b(h, h) == -2, "b(H_j, H_j) = -2");
    }

    // ell, d, e from eigenspaces
    auto weights = [&](const QMat& M) {
        std::vector<mpq_class> w;
        for (int j = 0; j <= k(); ++j) w.push_back(eigenvalue(H_lambda(j), M));
        return w;
    };
    for (int j = 0; j <= k(); ++j) {
        int cnt = 0;
        for (const auto& B : plus_basis_) {
            auto w = weights(X(B));
            bool hit = true;
            for (int s = 0; s <= k(); ++s) hit = hit && w[s] == (s == j ? 2 : 0);
            cnt += hit;
        }
        if (j == 0) ell_ = cnt;
        require(cnt == ell_, "every lambda_j has the same multiplicity");
    }
    int d_levi = 0, d_plus = 0;
    for (const auto& L : levi_basis_) {
        auto w = weights(L);
        bool hit = w[0] == -1 && w[1] == 1;
        for (int s = 2; s <= k(); ++s) hit = hit && w[s] == 0;
        d_levi += hit;
    }
    for (const auto& B : plus_basis_) {
        auto w = weights(X(B));
        bool hit = w[0] == 1 && w[1] == 1;
        for (int s = 2; s <= k(); ++s) hit = hit && w[s] == 0;
        d_plus += hit;
    }
    require(d_levi == d_plus, "dim E_{0,1}(-1,1) = dim E_{0,1}(1,1)");
    d_ = d_levi;

    // e: weight (lambda_0 + lambda_1)/2 for the split torus
    std::vector<QMat> torus;
    if (family == Family::GL) {
        for (int r = 0; r < n; ++r) {
            torus.push_back(levi(QMat::unit(n, r, r), Z));
            torus.push_back(levi(Z, QMat::unit(n, r, r)));
        }
    } else {
        for (int j = 0; j <= k(); ++j) torus.push_back(H_lambda(j));
    }
    auto aweight = [&](const QMat& M) {
        std::vector<mpq_class> w;
        for (const auto& T : torus) w.push_back(eigenvalue(T, M));
        return w;
    };
    auto w0 = aweight(X(Xj(0))), w1 = aweight(X(Xj(1)));
    std::vector<mpq_class> half(w0.size());
    for (size_t i = 0; i < w0.size(); ++i) half[i] = (w0[i] + w1[i]) / 2;
    e_ = 0;
    for (const auto& B : plus_basis_) e_ += aweight(X(B)) == half;

    require(dim_vplus() * 2 == (k() + 1) * (2 * ell_ + k() * d_), "dim V+ = (k+1)(ell + kd/2)");
    struct Expect {
        int ell, d, e;
    };
    Expect ex = family == Family::SP ? Expect{1, 1, 1} : family == Family::GL ? Expect{1, 2, 0} : Expect{1, 2, 2};
    require(ell_ == ex.ell && d_ == ex.d && e_ == ex.e, "(ell, d, e) of the family row");

    // V- basis dual to V+ under b
    const int N = dim_vplus();
    std::vector<std::vector<mpq_class>> P(N, std::vector<mpq_class>(N));
    for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) P[a][c] = b_pm(plus_basis_[a], minus_basis_[c]);
    QMat T = to_qmat(P).inverse();
    for (int a = 0; a < N; ++a) {
        QMat f(n, n);
        for (int c = 0; c < N; ++c)
            if (!T(c, a).is_zero()) f = f + minus_basis_[c] * T(c, a);
        minus_dual_.push_back(f);
    }
}

QMat RealizationContext::X(const QMat& B) const {
    QMat M(2 * n_, 2 * n_);
    M.set_block(0, n_, B);
    return M;
}
QMat RealizationContext::Y(const QMat& C) const {
    QMat M(2 * n_, 2 * n_);
    M.set_block(n_, 0, C);
    return M;
}
QMat RealizationContext::levi(const QMat& A, const QMat& D) const {
    QMat M(2 * n_, 2 * n_);
    M.set_block(0, 0, A);
    M.set_block(n_, n_, D);
    return M;
}
QMat RealizationContext::H0() const {
    QMat I = QMat::identity(n_);
    return levi(I, I * QE(-1));
}
QMat RealizationContext::H_lambda(int j) const {
    QMat E = QMat::unit(n_, n_ - 1 - j, n_ - 1 - j);
    return levi(E, E * QE(-1));
}
QMat RealizationContext::Xj(int j) const { return QMat::unit(n_, n_ - 1 - j, n_ - 1 - j); }
QMat RealizationContext::Yj(int j) const { return QMat::unit(n_, n_ - 1 - j, n_ - 1 - j, QE(-1)); }
QMat RealizationContext::I_plus() const { return QMat::identity(n_); }
QMat RealizationContext::I_minus() const { return QMat::identity(n_) * QE(-1); }

mpq_class RealizationContext::b(const QMat& M, const QMat& N) const {
    return b_scale_ * as_F((M * N).trace(), "trace form");
}

std::vector<mpq_class> RealizationContext::plus_coords(const QMat& B) const {
    std::vector<mpq_class> x;
    for (const auto& f : minus_dual_) x.push_back(b_pm(B, f));
    return x;
}
std::vector<mpq_class> RealizationContext::minus_coords(const QMat& C) const {
    std::vector<mpq_class> y;
    for (const auto& e : plus_basis_) y.push_back(b_pm(e, C));
    return y;
}
QMat RealizationContext::plus_from_coords(const std::vector<mpq_class>& x) const {
    QMat B(n_, n_);
    for (size_t a = 0; a < x.size(); ++a)
        if (x[a] != 0) B = B + plus_basis_[a] * QE(x[a]);
    return B;
}
QMat RealizationContext::minus_from_coords(const std::vector<mpq_class>& y) const {
    QMat C(n_, n_);
    for (size_t a = 0; a < y.size(); ++a)
        if (y[a] != 0) C = C + minus_dual_[a] * QE(y[a]);
    return C;
}

bool RealizationContext::valid_payload(const QMat& B) const {
    if (B.rows() != n_ || B.cols() != n_) return false;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const QE& x = B(i, j);
            if (family_ != Family::SU && !x.in_F()) return false;
            if (family_ == Family::SU && !x.in_F() && x.eps != xi_) return false;
            if (family_ == Family::SP && x != B(j, i)) return false;
            if (family_ == Family::SU && x != B(j, i).conj()) return false;
        }
    return true;
}

std::vector<QMat> RealizationContext::K_space(int p, int i, int j) const {
    QMat h1(2 * n_, 2 * n_), h2(2 * n_, 2 * n_);
    for (int s = 0; s <= k(); ++s) (s <= p ? h1 : h2) = (s <= p ? h1 : h2) + H_lambda(s);
    std::vector<QMat> out;
    for (const auto& L : levi_basis_)
        if (eigenvalue(h1, L) == i && eigenvalue(h2, L) == j) out.push_back(L);
    return out;
}

std::vector<QMat> RealizationContext::E_minus_pair(int i, int j) const {
    std::vector<QMat> out;
    for (const auto& C : minus_basis_) {
        QMat y = Y(C);
        bool hit = true;
        for (int s = 0; s <= k(); ++s) {
            mpq_class w = eigenvalue(H_lambda(s), y);
            hit = hit && w == ((s == i || s == j) ? -1 : 0);
        }
        if (hit) out.push_back(y);
    }
    return out;
}

std::vector<mpq_class> RealizationContext::two_rho_P() const {
    std::vector<mpq_class> out(k() + 1, 0);
    for (int i = 0; i <= k(); ++i)
        for (int j = i + 1; j <= k(); ++j)
            for (const auto& L : levi_basis_) {
                bool hit = true;
                for (int s = 0; s <= k(); ++s) {
                    mpq_class w = eigenvalue(H_lambda(s), L);
                    hit = hit && w == (s == i ? 1 : s == j ? -1 : 0);
                }
                if (!hit) continue;
                for (int s = 0; s <= k(); ++s) out[s] += eigenvalue(H_lambda(s), L);
            }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<mpq_class> delta_invariants(const RealizationContext& R, const QMat& B) {
    std::vector<mpq_class> out;
    for (int j = 0; j <= R.k(); ++j) out.push_back(as_F(B.leading_minor(R.n() - j), "Delta_j"));
    return out;
}

std::vector<mpq_class> nabla_invariants(const RealizationContext& R, const QMat& C) {
    QMat m = C * QE(-1);
    std::vector<mpq_class> out;
    for (int j = 0; j <= R.k(); ++j) out.push_back(as_F(m.trailing_minor(R.n() - j), "nabla_j"));
    return out;
}

QMat iota_map(const RealizationContext& R, const QMat& B) {
    if (B.det().is_zero()) throw DomainError("iota needs Delta_0(X) != 0");
    QMat C = B.inverse() * QE(-1);
    QMat x = R.X(B), y = R.Y(C), h = R.H0();
    require(bracket(y, x) == h, "[iota(X), X] = H0");
    require(bracket(h, x) == x * QE(2), "[H0, X] = 2X");
    require(bracket(h, y) == y * QE(-2), "[H0, iota(X)] = -2 iota(X)");
    return C;
}

// ---------------------------------------------------------------------------

std::string OrbitLabel::to_string() const {
    std::ostringstream os;
    os << "rank=" << rank;
    if (witt_index >= 0) {
        os << " witt=" << witt_index << " kernel_rank=" << kernel_rank;
        if (kernel_rank == 2) os << " kernel_disc=" << SquareClass(kernel_disc).name();
    }
    if (det_norm_class) os << " det=" << (det_norm_class > 0 ? "norm" : "non-norm");
    if (!p_tag.empty()) {
        os << " a=(";
        for (size_t i = 0; i < p_tag.size(); ++i) os << (i ? "," : "") << SquareClass(p_tag[i]).name();
        os << ")";
    }
    return os.str();
}

bool OrbitLabel::same_G_orbit(const OrbitLabel& o) const {
    return rank == o.rank && witt_index == o.witt_index && kernel_rank == o.kernel_rank &&
           kernel_disc == o.kernel_disc && det_norm_class == o.det_norm_class;
}

namespace {
struct SimilarityData {
    int witt, kernel_rank, kernel_disc;
};

SimilarityData similarity_data(const DiagonalForm& f) {
    static std::mutex mu;
    static std::map<std::pair<int, std::vector<int>>, SimilarityData> memo;
    std::vector<int> key;
    const DiagonalForm sorted = f.sorted();
    for (auto c : sorted.coeffs()) key.push_back(c.bits());
    std::pair<int, std::vector<int>> k{f.ctx()->p(), key};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(k);
        if (it != memo.end()) return it->second;
    }
    FormInvariants inv = isotropy_and_witt(f);
    SimilarityData s{inv.witt_index, inv.anisotropic_kernel.rank(), -1};
    if (s.kernel_rank == 2) s.kernel_disc = inv.anisotropic_kernel.disc().bits();
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(k, s);
    return s;
}
}  // namespace

OrbitLabel element_orbit(const RealizationContext& R, const QMat& B) {
    OrbitLabel L;
    const Context& ctx = R.ctx();
    if (R.family() == Family::GL) {
        L.rank = B.rank();
    } else {
        std::vector<SquareClass> cls;
        for (const auto& x : hermitian_diagonal(B))
            if (x != 0) cls.push_back(square_class_of(*ctx, x));
        L.rank = static_cast<int>(cls.size());
        if (R.family() == Family::SP && L.rank > 0) {
            auto s = similarity_data(DiagonalForm(ctx, cls));
            L.witt_index = s.witt;
            L.kernel_rank = s.kernel_rank;
            L.kernel_disc = s.kernel_disc;
        }
        if (R.family() == Family::SU && L.rank > 0 && L.rank % 2 == 0) {
            SquareClass det = SquareClass::one();
            for (auto c : cls) det = det * c;
            L.det_norm_class = hilbert_symbol(*ctx, SquareClass(SeGroup(ctx, 2).xi()), det);
        }
    }
    auto delta = delta_invariants(R, B);
    bool generic = true;
    for (const auto& x : delta) generic = generic && x != 0;
    if (generic) {
        SeGroup S(ctx, R.e());
        for (int j = 0; j <= R.k(); ++j) {
            mpq_class t = j < R.k() ? delta[j] * delta[j + 1] : delta[j];
            L.p_tag.push_back(S.coset_rep(square_class_of(*ctx, t)).bits());
        }
    }
    return L;
}

// ---------------------------------------------------------------------------

mpq_class random_padic_rational(const Context& ctx, std::mt19937_64& rng, int vmin, int vmax) {
    const int p = ctx->p();
    std::uniform_int_distribution<int> vd(vmin, vmax);
    std::uniform_int_distribution<long> ud(1, static_cast<long>(p) * p - 1);
    long u;
    do u = ud(rng);
    while (u % p == 0);
    if (rng() & 1) u = -u;
    int v = vd(rng);
    mpq_class r(u);
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(std::abs(v)));
    if (v >= 0) r *= pw;
    else r /= pw;
    return r;
}

namespace {
QE random_scalar(const RealizationContext& R, std::mt19937_64& rng, bool in_E, bool allow_zero) {
    if (allow_zero && rng() % 3 == 0) return QE(0);
    if (!in_E) return QE(random_padic_rational(R.ctx(), rng));
    if (rng() % 3 == 0) return QE(random_padic_rational(R.ctx(), rng), 0, R.xi());
    return QE(random_padic_rational(R.ctx(), rng), random_padic_rational(R.ctx(), rng), R.xi());
}

QMat random_invertible(const RealizationContext& R, std::mt19937_64& rng, bool in_E) {
    const int n = R.n();
    while (true) {
        QMat g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = random_scalar(R, rng, in_E, true);
        if (!g.det().is_zero()) return g;
    }
}
}  // namespace

QMat apply_move(const RealizationContext& R, const GroupMove& m, const QMat& B) {
    switch (R.family()) {
        case Family::SP: return m.g * B * m.g.transpose() * (QE(1) / m.mu);
        case Family::GL: return m.g * B * m.h.inverse();
        case Family::SU: return m.g * B * m.g.adjoint() * (QE(1) / m.mu);
    }
    return B;
}

GroupMove random_move(const RealizationContext& R, std::mt19937_64& rng, MoveKind kind) {
    const int n = R.n();
    const bool in_E = R.family() == Family::SU;
    GroupMove m;
    m.g = QMat::identity(n);
    m.h = QMat::identity(n);
    switch (kind) {
        case MoveKind::Torus:
            for (int i = 0; i < n; ++i) {
                m.g(i, i) = random_scalar(R, rng, in_E, false);
                m.h(i, i) = random_scalar(R, rng, false, false);
            }
            if (R.family() != Family::GL) m.mu = QE(random_padic_rational(R.ctx(), rng));
            break;
        case MoveKind::Unipotent:
            // the nilradical acts through lower unitriangular g (and upper unitriangular h for GL)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j) {
                    m.g(i, j) = random_scalar(R, rng, in_E, true);
                    m.h(j, i) = random_scalar(R, rng, false, true);
                }
            break;
        case MoveKind::General:
            m.g = random_invertible(R, rng, in_E);
            m.h = random_invertible(R, rng, false);
            if (R.family() != Family::GL) m.mu = QE(random_padic_rational(R.ctx(), rng));
            break;
    }
    return m;
}

std::vector<mpq_class> torus_characters(const RealizationContext& R, const GroupMove& m) {
    std::vector<mpq_class> x;
    for (int j = 0; j <= R.k(); ++j) {
        int r = R.n() - 1 - j;
        switch (R.family()) {
            case Family::SP: x.push_back(as_F(m.g(r, r) * m.g(r, r) / m.mu, "x_j")); break;
            case Family::GL: x.push_back(as_F(m.g(r, r) / m.h(r, r), "x_j")); break;
            case Family::SU: x.push_back(as_F(QE(m.g(r, r).norm()) / m.mu, "x_j")); break;
        }
    }
    return x;
}

QMat random_payload(const RealizationContext& R, std::mt19937_64& rng, bool generic) {
    const int n = R.n();
    const bool in_E = R.family() == Family::SU;
    while (true) {
        QMat B(n, n);
        if (generic) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (R.family() != Family::GL && j < i) continue;
                    QE x = random_scalar(R, rng, in_E && i != j, true);
                    B(i, j) = x;
                    if (R.family() != Family::GL) B(j, i) = x.conj();
                }
            bool ok = true;
            for (const auto& d : delta_invariants(R, B)) ok = ok && d != 0;
            if (ok) return B;
        } else {
            // random rank r in [1, n] transported by a random group element
            int r = 1 + static_cast<int>(rng() % n);
            QMat D(n, n);
            for (int i = 0; i < r; ++i) D(i, i) = QE(random_padic_rational(R.ctx(), rng));
            GroupMove m = random_move(R, rng, MoveKind::General);
            m.mu = QE(1);
            return apply_move(R, m, D);
        }
    }
}

// ---------------------------------------------------------------------------

std::vector<std::vector<mpq_class>> gram_QX(const RealizationContext& R, const QMat& B) {
    const QMat x = R.X(B);
    const auto& basis = R.minus_basis();
    const size_t N = basis.size();
    std::vector<QMat> xxy;
    for (const auto& C : basis) xxy.push_back(bracket(x, bracket(x, R.Y(C))));
    std::vector<std::vector<mpq_class>> G(N, std::vector<mpq_class>(N));
    for (size_t a = 0; a < N; ++a)
        for (size_t c = 0; c < N; ++c) G[a][c] = R.b(xxy[a], R.Y(basis[c])) / 2;
    for (size_t a = 0; a < N; ++a)
        for (size_t c = 0; c < a; ++c) require(G[a][c] == G[c][a], "Q_X Gram is symmetric");
    return G;
}

std::vector<std::vector<mpq_class>> gram_q_pair(const RealizationContext& R, int i, int j) {
    const auto basis = R.E_minus_pair(i, j);
    const QMat xi = R.X(R.Xj(i)), xj = R.X(R.Xj(j));
    const size_t N = basis.size();
    std::vector<std::vector<mpq_class>> G(N, std::vector<mpq_class>(N));
    for (size_t a = 0; a < N; ++a)
        for (size_t c = 0; c < N; ++c)
            G[a][c] = -(R.b(bracket(xi, basis[a]), bracket(xj, basis[c])) +
                        R.b(bracket(xi, basis[c]), bracket(xj, basis[a]))) /
                      4;
    return G;
}

std::vector<std::vector<mpq_class>> gram_Q_uv(const RealizationContext& R, int p, const QMat& u, const QMat& v) {
    const auto basis = R.K_space(p, 1, -1);
    const QMat uu = R.Y(u), vv = R.X(v);
    const size_t N = basis.size();
    std::vector<std::vector<mpq_class>> G(N, std::vector<mpq_class>(N));
    for (size_t a = 0; a < N; ++a)
        for (size_t c = 0; c < N; ++c)
            G[a][c] = (R.b(bracket(basis[a], bracket(basis[c], uu)), vv) +
                       R.b(bracket(basis[c], bracket(basis[a], uu)), vv)) /
                      4;
    return G;
}

std::vector<std::vector<mpq_class>> theta_matrix(const RealizationContext& R, const QMat& B) {
    const int n2 = 2 * R.n();
    QMat I = QMat::identity(n2);
    QMat x = R.X(B), y = R.Y(iota_map(R, B));
    QMat w = (I - x) * (I - y) * (I - x);
    QMat winv = w.inverse();
    require(w * x * winv == y, "theta_X(X) = iota(X)");
    const auto& basis = R.plus_basis();
    const size_t N = basis.size();
    std::vector<std::vector<mpq_class>> M(N, std::vector<mpq_class>(N));
    for (size_t a = 0; a < N; ++a) {
        QMat img = w * R.X(basis[a]) * winv;
        require(R.Y(R.minus_payload(img)) == img, "theta maps V+ to V-");
        for (size_t c = 0; c < N; ++c) M[c][a] = R.b(R.X(basis[c]), img);
    }
    return M;
}

}  // namespace plgz
