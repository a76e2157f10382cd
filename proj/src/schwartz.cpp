#include "plgz/schwartz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "plgz/weil.hpp"

namespace plgz {

namespace {

constexpr int kInfVal = 1 << 28;

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int ceil_div(int a, int b) { return -floor_div(-a, b); }

mpq_class ppow(int p, int e) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::abs(e)));
    return e >= 0 ? mpq_class(z) : mpq_class(mpz_class(1), z);
}

double dpow(int p, double e) { return std::pow(static_cast<double>(p), e); }

mpq_class dot(const RatVec& a, const RatVec& b) {
    mpq_class s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool in_ball(const RatVec& x, const RatVec& c, int level, int p) {
    for (size_t i = 0; i < x.size(); ++i) {
        mpq_class d = x[i] - c[i];
        if (d != 0 && rational_valuation(d, p) < level) return false;
    }
    return true;
}

int min_valuation(const RatVec& v, int p) {
    int m = kInfVal;
    for (const auto& x : v) m = std::min(m, valuation_or(x, p, kInfVal));
    return m;
}

using RatMat = std::vector<RatVec>;

int min_valuation(const RatMat& M, int p) {
    int m = kInfVal;
    for (const auto& row : M) m = std::min(m, min_valuation(row, p));
    return m;
}

RatMat rat_inverse(RatMat A) {
    const size_t n = A.size();
    RatMat I(n, RatVec(n, 0));
    for (size_t i = 0; i < n; ++i) I[i][i] = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && A[piv][c] == 0) ++piv;
        if (piv == n) throw DomainError("singular matrix");
        std::swap(A[piv], A[c]);
        std::swap(I[piv], I[c]);
        mpq_class inv = 1 / A[c][c];
        for (size_t j = 0; j < n; ++j) {
            A[c][j] *= inv;
            I[c][j] *= inv;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0) continue;
            mpq_class f = A[r][c];
            for (size_t j = 0; j < n; ++j) {
                A[r][j] -= f * A[c][j];
                I[r][j] -= f * I[c][j];
            }
        }
    }
    return I;
}

std::string term_key(const BallTerm& t) {
    std::ostringstream os;
    os << t.level << "|";
    for (const auto& c : t.center) os << c.get_str() << ",";
    os << "|";
    for (const auto& y : t.modulation) os << y.get_str() << ",";
    return os.str();
}

SquareClass class_of_shell(const LocalFieldContext& ctx, int v, int64_t u) {
    int bits = (v & 1) ? 2 : 0;
    if (ctx.legendre(u) < 0) bits |= 1;
    return SquareClass(bits);
}

}  // namespace

mpq_class reduce_mod(const mpq_class& x, int p, int m) {
    if (x == 0) return 0;
    mpz_class num = x.get_num(), den = x.get_den();
    int s = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), p)) {
        den /= p;
        ++s;
    }
    int e = m + s;
    if (e <= 0) return 0;
    mpz_class M;
    mpz_ui_pow_ui(M.get_mpz_t(), p, e);
    mpz_class inv, r;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), M.get_mpz_t());
    r = num * inv;
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), M.get_mpz_t());
    mpq_class out = mpq_class(r) * ppow(p, -s);
    out.canonicalize();
    return out;
}

int valuation_or(const mpq_class& x, int p, int if_zero) {
    if (x == 0) return if_zero;
    return static_cast<int>(rational_valuation(x, p));
}

// ---------------------------------------------------------------------------

BallFunction BallFunction::indicator(int p, RatVec center, int level) {
    BallFunction f(p, static_cast<int>(center.size()));
    BallTerm t;
    t.modulation.assign(center.size(), 0);
    t.center = std::move(center);
    t.level = level;
    f.add(std::move(t));
    return f;
}

void BallFunction::add(BallTerm t) {
    if (static_cast<int>(t.center.size()) != dim_ || static_cast<int>(t.modulation.size()) != dim_)
        throw DomainError("ball term dimension mismatch");
    terms_.push_back(std::move(t));
}

BallFunction BallFunction::operator+(const BallFunction& o) const {
    if (o.p_ != p_ || o.dim_ != dim_) throw DomainError("adding functions on different spaces");
    BallFunction r = *this;
    for (const auto& t : o.terms_) r.terms_.push_back(t);
    return r;
}

BallFunction BallFunction::operator*(cplx c) const {
    BallFunction r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
}

cplx BallFunction::operator()(const RatVec& x) const {
    cplx s = 0.0;
    for (const auto& t : terms_)
        if (in_ball(x, t.center, t.level, p_)) s += t.coeff * psi(t.phase + dot(x, t.modulation), p_);
    return s;
}

int BallFunction::support_level() const {
    int L = kInfVal;
    for (const auto& t : terms_) L = std::min({L, t.level, min_valuation(t.center, p_)});
    return L;
}

int BallFunction::constancy_level() const {
    int L = -kInfVal;
    for (const auto& t : terms_) {
        int vy = min_valuation(t.modulation, p_);
        L = std::max({L, t.level, vy == kInfVal ? t.level : -vy});
    }
    return L;
}

cplx BallFunction::integral() const {
    cplx s = 0.0;
    for (const auto& t : terms_) {
        if (min_valuation(t.modulation, p_) < -t.level) continue;
        s += t.coeff * psi(t.phase + dot(t.center, t.modulation), p_) * dpow(p_, -1.0 * t.level * dim_);
    }
    return s;
}

BallFunction BallFunction::canonical() const {
    std::map<std::string, std::pair<BallTerm, cplx>> merged;
    for (const auto& t : terms_) {
        BallTerm c;
        c.level = t.level;
        c.center.resize(dim_);
        c.modulation.resize(dim_);
        mpq_class phase = t.phase;
        for (int i = 0; i < dim_; ++i) {
            c.center[i] = reduce_mod(t.center[i], p_, t.level);
            c.modulation[i] = reduce_mod(t.modulation[i], p_, -t.level);
            phase += t.center[i] * (t.modulation[i] - c.modulation[i]);
        }
        cplx w = t.coeff * psi(phase, p_);
        auto key = term_key(c);
        auto it = merged.find(key);
        if (it == merged.end()) merged.emplace(key, std::make_pair(c, w));
        else it->second.second += w;
    }
    BallFunction r(p_, dim_);
    for (auto& [key, tw] : merged) {
        if (std::abs(tw.second) < 1e-14) continue;
        tw.first.coeff = tw.second;
        tw.first.phase = 0;
        r.terms_.push_back(tw.first);
    }
    return r;
}

nlohmann::json BallFunction::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : terms_) {
        nlohmann::json c = nlohmann::json::array(), y = nlohmann::json::array();
        for (const auto& x : t.center) c.push_back(x.get_str());
        for (const auto& x : t.modulation) y.push_back(x.get_str());
        terms.push_back({{"center", c},
                         {"level", t.level},
                         {"modulation", y},
                         {"coeff", {t.coeff.real(), t.coeff.imag()}},
                         {"phase", t.phase.get_str()}});
    }
    return {{"p", p_}, {"dim", dim_}, {"terms", terms}};
}

BallFunction BallFunction::from_json(const nlohmann::json& j) {
    BallFunction f(j.at("p").get<int>(), j.at("dim").get<int>());
    for (const auto& tj : j.at("terms")) {
        BallTerm t;
        for (const auto& x : tj.at("center")) t.center.emplace_back(x.get<std::string>());
        t.level = tj.at("level").get<int>();
        if (tj.contains("modulation"))
            for (const auto& x : tj.at("modulation")) t.modulation.emplace_back(x.get<std::string>());
        else
            t.modulation.assign(t.center.size(), 0);
        if (tj.contains("coeff")) {
            const auto& c = tj.at("coeff");
            t.coeff = c.is_array() ? cplx(c[0].get<double>(), c[1].get<double>()) : cplx(c.get<double>(), 0);
        }
        if (tj.contains("phase")) t.phase = mpq_class(tj.at("phase").get<std::string>());
        for (auto& x : t.center) x.canonicalize();
        for (auto& x : t.modulation) x.canonicalize();
        t.phase.canonicalize();
        f.add(std::move(t));
    }
    return f;
}

static BallFunction fourier_signed(const BallFunction& f, int sign) {
    BallFunction r(f.p(), f.dim());
    for (const auto& t : f.terms()) {
        BallTerm n;
        n.level = -t.level;
        n.center.resize(f.dim());
        n.modulation.resize(f.dim());
        for (int i = 0; i < f.dim(); ++i) {
            n.center[i] = -sign * t.modulation[i];
            n.modulation[i] = sign * t.center[i];
        }
        n.coeff = t.coeff * dpow(f.p(), -1.0 * t.level * f.dim());
        n.phase = t.phase + dot(t.center, t.modulation);
        r.add(std::move(n));
    }
    return r;
}

BallFunction fourier(const BallFunction& f) { return fourier_signed(f, 1); }
BallFunction fourier_bar(const BallFunction& f) { return fourier_signed(f, -1); }

bool same_function(const BallFunction& f, const BallFunction& g, double tol) {
    if (f.p() != g.p() || f.dim() != g.dim()) return false;
    std::map<std::string, cplx> diff;
    const BallFunction cf = f.canonical(), cg = g.canonical();
    for (const auto& t : cf.terms()) diff[term_key(t)] += t.coeff;
    for (const auto& t : cg.terms()) diff[term_key(t)] -= t.coeff;
    for (const auto& [k, d] : diff)
        if (std::abs(d) > tol) return false;
    return true;
}

BallFunction random_ball_function(int p, int dim, std::mt19937_64& rng, const RandomBallOptions& opt) {
    BallFunction f(p, dim);
    std::uniform_int_distribution<int> lev(opt.level_min, opt.level_max);
    std::uniform_real_distribution<double> re(-1.0, 1.0);
    std::uniform_int_distribution<int> ph(0, p * p - 1);
    for (int k = 0; k < opt.terms; ++k) {
        BallTerm t;
        t.level = lev(rng);
        for (int i = 0; i < dim; ++i) {
            std::uniform_int_distribution<int> digit(0, p * p - 1);
            t.center.push_back(mpq_class(digit(rng)) * ppow(p, opt.center_vmin));
            if (opt.modulate) {
                std::uniform_int_distribution<int> md(0, p - 1);
                t.modulation.push_back(mpq_class(md(rng)) * ppow(p, std::max(opt.modulation_vmin, -t.level - 1)));
            } else {
                t.modulation.push_back(0);
            }
        }
        for (auto& x : t.center) x.canonicalize();
        for (auto& x : t.modulation) x.canonicalize();
        t.coeff = cplx(re(rng), re(rng));
        t.phase = mpq_class(ph(rng), p * p);
        t.phase.canonicalize();
        f.add(std::move(t));
    }
    return f;
}

cplx grid_integral(int p, int dim, int box, int cell, const std::function<cplx(const RatVec&)>& g,
                   long long budget) {
    return grid_integral(p, std::vector<int>(dim, box), std::vector<int>(dim, cell), g, budget);
}

cplx grid_integral(int p, const std::vector<int>& box, std::vector<int> cell,
                   const std::function<cplx(const RatVec&)>& g, long long budget) {
    const int dim = static_cast<int>(box.size());
    if (static_cast<int>(cell.size()) != dim) throw DomainError("grid integral: box and cell lengths differ");
    std::vector<long long> per(dim, 1);
    std::vector<mpq_class> step(dim);
    long long total = 1;
    int cells = 0;
    for (int i = 0; i < dim; ++i) {
        cell[i] = std::max(cell[i], box[i]);
        for (int j = box[i]; j < cell[i]; ++j) {
            per[i] *= p;
            if (per[i] > budget) throw PrecisionError("grid integral exceeds its budget");
        }
        total *= per[i];
        if (total > budget) throw PrecisionError("grid integral exceeds its budget");
        step[i] = ppow(p, box[i]);
        cells += cell[i];
    }
    std::vector<long long> k(dim, 0);
    RatVec x(dim, 0);
    cplx s = 0.0;
    for (long long it = 0; it < total; ++it) {
        for (int i = 0; i < dim; ++i) x[i] = step[i] * static_cast<long>(k[i]);
        s += g(x);
        for (int i = 0; i < dim; ++i) {
            if (++k[i] < per[i]) break;
            k[i] = 0;
        }
    }
    return s * dpow(p, -1.0 * cells);
}

// ---------------------------------------------------------------------------

static LaurentRational zeta_rank1(const Context& ctx, const BallFunction& f, const TameMultChar& delta,
                                  const std::function<bool(SquareClass)>& keep) {
    if (f.dim() != 1) throw DomainError("rank one zeta needs a function on F");
    const int p = ctx->p();
    if (f.p() != p) throw DomainError("function and field disagree on p");
    const cplx dpi = delta.value_at_pi;
    const cplx r = dpi / static_cast<double>(p);
    LaurentPoly poly(1), tail(1);
    for (const auto& t : f.terms()) {
        const cplx kappa = t.coeff * psi(t.phase, p);
        const mpq_class& c = t.center[0];
        const mpq_class& y = t.modulation[0];
        const int m = t.level;
        const int vc = valuation_or(c, p, kInfVal);
        const int w = valuation_or(y, p, kInfVal);
        if (vc < m) {
            if (!keep(square_class_of(*ctx, c))) continue;
            if (w != kInfVal && w < -m) continue;
            poly.add_term({vc}, kappa * delta(c) * psi(c * y, p) * dpow(p, -m));
            continue;
        }
        auto shell_sum = [&](int v, bool oscillating) {
            cplx s = 0.0;
            mpq_class py = oscillating ? y * ppow(p, v) : mpq_class(0);
            for (int u = 1; u < p; ++u) {
                if (!keep(class_of_shell(*ctx, v, u))) continue;
                s += delta.on_unit(u) * (oscillating ? psi(py * u, p) : cplx(1.0));
            }
            return s / static_cast<double>(p);
        };
        int v0 = m;
        if (w != kInfVal) {
            v0 = std::max(m, -w);
            int g = -w - 1;
            if (g >= m) poly.add_term({g}, kappa * std::pow(r, g) * shell_sum(g, true));
        }
        for (int j = 0; j < 2; ++j) {
            int v = v0 + j;
            tail.add_term({v}, kappa * std::pow(r, v) * shell_sum(v, false));
        }
    }
    LaurentPoly den = LaurentPoly::constant(1, 1.0) - LaurentPoly::var(1, 0, 2, r * r);
    return LaurentRational(tail, den) + LaurentRational::from_poly(poly);
}

LaurentRational tate_zeta(const Context& ctx, const BallFunction& f, const TameMultChar& delta) {
    return zeta_rank1(ctx, f, delta, [](SquareClass) { return true; });
}

LaurentRational strata_zeta(const Context& ctx, const BallFunction& f, const TameMultChar& delta, SquareClass a,
                            const SeGroup& S) {
    return zeta_rank1(ctx, f, delta, [&](SquareClass c) { return S.contains(c * a); });
}

LaurentRational rho_tilde_symbolic(const TameMultChar& delta, SquareClass x, const SeGroup& S) {
    auto chars = characters_trivial_on(S);
    LaurentRational sum = LaurentRational::constant(1, 0.0);
    for (const auto& chi : chars) sum = sum + tate_rho_symbolic(delta * chi) * chi(x);
    return sum * cplx(1.0 / static_cast<double>(chars.size()));
}

// ---------------------------------------------------------------------------

MeasureNormalization measure_normalizer(const RealizationContext& R, const QMat& X0) {
    const int p = R.ctx()->p();
    mpq_class det = rational_det(theta_matrix(R, X0));
    mpq_class d0 = delta_invariants(R, X0)[0];
    mpq_class two_m = 2 * R.m_const();
    two_m.canonicalize();
    if (two_m.get_den() != 1) throw DomainError("2m is not an integer");
    const long e = two_m.get_num().get_si();
    mpq_class pw = 1;
    for (long i = 0; i < e; ++i) pw *= d0;
    MeasureNormalization mn;
    mn.c = det * pw;
    mn.c.canonicalize();
    if (mn.c == 0) throw DomainError("degenerate theta");
    mn.abs_c = dpow(p, -static_cast<double>(rational_valuation(mn.c, p)));
    mn.lambda = std::sqrt(mn.abs_c);
    return mn;
}

MeasureNormalization measure_normalizer(const RealizationContext& R) { return measure_normalizer(R, R.I_plus()); }

static double abs_p(const mpq_class& x, int p) { return dpow(p, -static_cast<double>(rational_valuation(x, p))); }

IntegralCheck theta_measure_check(const RealizationContext& R, const QMat& X0, const BallFunction& f) {
    const int p = R.ctx()->p();
    const int N = R.dim_vplus();
    if (f.dim() != N) throw DomainError("function dimension differs from dim V-");
    RatMat M = theta_matrix(R, X0);
    RatMat Minv = rat_inverse(M);
    const int box = f.support_level() + min_valuation(Minv, p);
    const int cell = std::max(box, f.constancy_level() - min_valuation(M, p));
    auto g = [&](const RatVec& x) {
        RatVec y(N, 0);
        for (int b = 0; b < N; ++b)
            for (int a = 0; a < N; ++a)
                if (M[b][a] != 0) y[b] += M[b][a] * x[a];
        return f(y);
    };
    auto mn = measure_normalizer(R, X0);
    mpq_class d0 = delta_invariants(R, X0)[0];
    mpq_class two_m = 2 * R.m_const();
    double dpw = std::pow(abs_p(d0, p), two_m.get_d());
    IntegralCheck r;
    r.lhs = mn.lambda * grid_integral(p, N, box, cell, g);
    r.rhs = dpw / mn.lambda * f.integral();
    r.residual = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.rhs));
    return r;
}

// ---------------------------------------------------------------------------

std::vector<int> plus_indices(const RealizationContext& R, int cut, int i, int j) {
    QMat H1(2 * R.n(), 2 * R.n()), H2(2 * R.n(), 2 * R.n());
    for (int s = 0; s <= R.k(); ++s) {
        if (s <= cut) H1 = H1 + R.H_lambda(s);
        else H2 = H2 + R.H_lambda(s);
    }
    std::vector<int> out;
    const auto& basis = R.plus_basis();
    for (size_t a = 0; a < basis.size(); ++a) {
        QMat x = R.X(basis[a]);
        if (RealizationContext::eigenvalue(H1, x) == i && RealizationContext::eigenvalue(H2, x) == j)
            out.push_back(static_cast<int>(a));
    }
    return out;
}

namespace {

// e^{ad A(t)}(u+v) in V+ coordinates: z0 + sum t_a L_a + 1/2 sum t_a t_b Q_ab
struct MeanSetup {
    int p = 3, D = 0, N = 0;
    RatVec z0;
    RatMat L;                 // L[a] = coords [A_a, Z]
    std::vector<RatMat> Q;    // Q[a][b] = coords [A_a, [A_b, Z]] / 2
    int box = 0, cell = 0, vQ = kInfVal, vL = kInfVal;
    double prefactor = 1;     // |Delta_{cut+1}(v)|^{(cut+1)d/2}
    double delta_abs = 1;

    RatVec point(const RatVec& t) const {
        RatVec x = z0;
        for (int a = 0; a < D; ++a) {
            if (t[a] == 0) continue;
            for (int i = 0; i < N; ++i) x[i] += t[a] * L[a][i];
            for (int b = 0; b < D; ++b) {
                if (t[b] == 0) continue;
                mpq_class tt = t[a] * t[b];
                for (int i = 0; i < N; ++i)
                    if (Q[a][b][i] != 0) x[i] += tt * Q[a][b][i];
            }
        }
        return x;
    }
};

MeanSetup prepare_mean(const RealizationContext& R, int cut, const BallFunction& f, const QMat& u, const QMat& v) {
    if (cut < 0 || cut >= R.k()) throw DomainError("cut must lie in [0, k)");
    MeanSetup S;
    S.p = R.ctx()->p();
    S.N = R.dim_vplus();
    if (f.dim() != S.N) throw DomainError("function dimension differs from dim V+");
    auto A = R.K_space(cut, 1, -1);
    S.D = static_cast<int>(A.size());
    auto i11 = plus_indices(R, cut, 1, 1);
    if (static_cast<int>(i11.size()) != S.D) throw std::logic_error("dim K(1,-1) != dim K(1,1)");

    mpq_class dv = delta_invariants(R, v)[cut + 1];
    if (dv == 0) throw DomainError("Delta_{cut+1}(v) = 0");
    S.delta_abs = abs_p(dv, S.p);
    S.prefactor = std::pow(S.delta_abs, (cut + 1) * R.d() / (2.0 * R.kappa()));

    QMat Z = R.X(u) + R.X(v);
    S.z0 = R.plus_coords(u + v);
    S.L.resize(S.D);
    S.Q.assign(S.D, RatMat(S.D));
    for (int a = 0; a < S.D; ++a) {
        QMat la = bracket(A[a], Z);
        S.L[a] = R.plus_coords(R.plus_payload(la));
        for (int b = 0; b < S.D; ++b) {
            QMat q = bracket(A[a], bracket(A[b], Z));
            RatVec c = R.plus_coords(R.plus_payload(q));
            for (auto& x : c) x /= 2;
            S.Q[a][b] = c;
            S.vQ = std::min(S.vQ, min_valuation(c, S.p));
        }
        S.vL = std::min(S.vL, min_valuation(S.L[a], S.p));
    }
    RatMat M(S.D, RatVec(S.D));
    for (int r = 0; r < S.D; ++r)
        for (int a = 0; a < S.D; ++a) M[r][a] = S.L[a][i11[r]];
    RatMat Minv = rat_inverse(M);
    const int sb = f.support_level(), rc = f.constancy_level();
    S.box = sb + min_valuation(Minv, S.p);
    int cell = std::max(S.box, rc - S.vL);
    if (S.vQ != kInfVal) cell = std::max({cell, rc - S.box - S.vQ, ceil_div(rc - S.vQ, 2)});
    S.cell = cell;
    return S;
}

}  // namespace

cplx mean_T(const RealizationContext& R, int cut, const BallFunction& f, const QMat& u, const QMat& v) {
    MeanSetup S = prepare_mean(R, cut, f, u, v);
    auto g = [&](const RatVec& t) { return f(S.point(t)); };
    return S.prefactor * grid_integral(S.p, S.D, S.box, S.cell, g);
}

IntegralCheck mean_T_identity(const RealizationContext& R, int cut, const BallFunction& f) {
    const int p = R.ctx()->p();
    auto i20 = plus_indices(R, cut, 2, 0), i02 = plus_indices(R, cut, 0, 2);
    const int du = static_cast<int>(i20.size()), dv = static_cast<int>(i02.size());
    const int sb = f.support_level();
    const int N = R.dim_vplus();

    auto rhs_at = [&](int level) {
        auto outer_v = [&](const RatVec& vc) -> cplx {
            RatVec x(N, 0);
            for (int i = 0; i < dv; ++i) x[i02[i]] = vc[i];
            QMat v = R.plus_from_coords(x);
            if (delta_invariants(R, v)[cut + 1] == 0) return 0.0;
            QMat zero = R.plus_from_coords(RatVec(N, 0));
            MeanSetup S0 = prepare_mean(R, cut, f, zero, v);
            int ubox = sb;
            if (S0.vQ != kInfVal) ubox = std::min(ubox, 2 * S0.box + S0.vQ);
            // [A, u] = 0 for u in K(2,0): only the base point moves with u
            auto inner_u = [&](const RatVec& uc) -> cplx {
                MeanSetup S = S0;
                for (int i = 0; i < du; ++i) S.z0[i20[i]] += uc[i];
                auto g = [&](const RatVec& t) { return f(S.point(t)); };
                return S.prefactor * grid_integral(S.p, S.D, S.box, S.cell, g);
            };
            cplx s = grid_integral(p, du, ubox, std::max(ubox, level), inner_u);
            return s * std::pow(S0.delta_abs, (cut + 1) * R.d() / (2.0 * R.kappa()));
        };
        return grid_integral(p, dv, sb, std::max(sb, level), outer_v);
    };

    IntegralCheck r;
    r.lhs = f.integral();
    int level = f.constancy_level();
    cplx prev = rhs_at(level);
    for (int step = 0; step < 4; ++step) {
        cplx next = rhs_at(level + 1);
        ++level;
        bool stable = std::abs(next - prev) <= 1e-12 * std::max(1.0, std::abs(next));
        prev = next;
        if (stable) break;
    }
    r.rhs = prev;
    r.residual = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.lhs));
    return r;
}

// ---------------------------------------------------------------------------

IntegralCheck weil_formula_check(const Context& ctx, const RatVec& diag, const BallFunction& f) {
    const int p = ctx->p();
    const int r = static_cast<int>(diag.size());
    if (r == 0 || f.dim() != r) throw DomainError("form and function dimensions differ");
    std::vector<int> va(r);
    std::vector<SquareClass> classes;
    int sum_va = 0;
    for (int i = 0; i < r; ++i) {
        if (diag[i] == 0) throw DomainError("degenerate form");
        va[i] = static_cast<int>(rational_valuation(diag[i], p));
        sum_va += va[i];
        classes.push_back(square_class_of(*ctx, diag[i]));
    }
    auto Qof = [&](const RatVec& A) {
        mpq_class s = 0;
        for (int i = 0; i < r; ++i) s += diag[i] * A[i] * A[i];
        return s;
    };
    BallFunction Ff = fourier(f);

    // per coordinate: support of the integrand and a level on whose cosets it is constant
    const int sF = Ff.support_level(), rF = Ff.constancy_level();
    std::vector<int> box1(r), cell1(r);
    for (int i = 0; i < r; ++i) {
        box1[i] = sF - va[i];
        cell1[i] = std::max({box1[i], rF - va[i], -va[i] - box1[i], ceil_div(-va[i], 2)});
    }
    auto g1 = [&](const RatVec& A) {
        RatVec B(r);
        for (int i = 0; i < r; ++i) B[i] = 2 * diag[i] * A[i];
        return Ff(B) * psi(Qof(A), p);
    };

    const int s2 = f.support_level();
    std::vector<int> box2(r, s2), cell2(r);
    for (int i = 0; i < r; ++i)
        cell2[i] = std::max({s2, f.constancy_level(), -va[i] - s2, ceil_div(-va[i], 2)});
    auto g2 = [&](const RatVec& A) { return f(A) * psi(-Qof(A), p); };

    const double C = dpow(p, -static_cast<double>(sum_va));
    const cplx gamma = weil_gamma(DiagonalForm(ctx, classes)).value;
    IntegralCheck out;
    out.lhs = grid_integral(p, box1, cell1, g1);
    out.rhs = gamma / std::sqrt(C) * grid_integral(p, box2, cell2, g2);
    out.residual = std::abs(out.lhs - out.rhs) / std::max(1.0, std::abs(out.rhs));
    return out;
}

}  // namespace plgz
