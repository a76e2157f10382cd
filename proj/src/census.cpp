#include "plgz/census.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace plgz {

namespace {

using IntMat = std::vector<std::vector<int64_t>>;

int64_t mod(int64_t x, int64_t M) {
    x %= M;
    return x < 0 ? x + M : x;
}

int64_t inv_mod(int64_t a, int64_t M) {
    int64_t g = M, x = 0, x1 = 1, r = mod(a, M);
    while (r) {
        int64_t q = g / r;
        std::tie(g, r) = std::make_pair(r, g - q * r);
        std::tie(x, x1) = std::make_pair(x1, x - q * x1);
    }
    if (g != 1) throw DomainError("not invertible modulo p^{V+1}");
    return mod(x, M);
}

int64_t rational_mod(const mpq_class& q, int64_t M) {
    mpz_class num = q.get_num() % M, den = q.get_den() % M;
    return mod(num.get_si() * inv_mod(den.get_si(), M), M);
}

int64_t det_mod(const IntMat& A, int64_t M) {
    const size_t n = A.size();
    if (n == 0) return 1;
    if (n == 1) return mod(A[0][0], M);
    if (n == 2) return mod(A[0][0] * A[1][1] - A[0][1] * A[1][0], M);
    int64_t s = 0;
    for (size_t c = 0; c < n; ++c) {
        IntMat minor;
        for (size_t r = 1; r < n; ++r) {
            std::vector<int64_t> row;
            for (size_t cc = 0; cc < n; ++cc)
                if (cc != c) row.push_back(A[r][cc]);
            minor.push_back(row);
        }
        int64_t term = mod(A[0][c] * det_mod(minor, M), M);
        s = mod(c % 2 ? s - term : s + term, M);
    }
    return s;
}

IntMat sub_block(const IntMat& A, size_t r0, size_t size) {
    IntMat B(size, std::vector<int64_t>(size));
    for (size_t i = 0; i < size; ++i)
        for (size_t j = 0; j < size; ++j) B[i][j] = A[r0 + i][r0 + j];
    return B;
}

int legendre(int64_t u, int p) {
    int64_t r = 1, b = mod(u, p), e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

SquareClass class_of(int v, int64_t u, int p) {
    return SquareClass(((v & 1) << 1) | (legendre(u, p) == -1 ? 1 : 0));
}

std::string side_name(Side s) { return s == Side::Plus ? "plus" : "minus"; }

}  // namespace

double Census::cell_volume() const { return std::pow(static_cast<double>(p), -static_cast<double>((depth + 1) * dim)); }

nlohmann::json Census::to_json() const {
    nlohmann::json j;
    j["family"] = family;
    j["n"] = n;
    j["p"] = p;
    j["depth"] = depth;
    j["dim"] = dim;
    j["side"] = side_name(side);
    j["tail"] = tail;
    j["total"] = total;
    auto rows = nlohmann::json::array();
    for (const auto& [k, c] : counts) rows.push_back({{"key", k}, {"count", c}});
    j["counts"] = rows;
    return j;
}

Census Census::from_json(const nlohmann::json& j) {
    Census C;
    C.family = j.at("family").get<std::string>();
    C.n = j.at("n");
    C.p = j.at("p");
    C.depth = j.at("depth");
    C.dim = j.at("dim");
    C.side = j.at("side") == "plus" ? Side::Plus : Side::Minus;
    C.tail = j.at("tail");
    C.total = j.at("total");
    for (const auto& r : j.at("counts")) C.counts[r.at("key").get<std::vector<int>>()] = r.at("count").get<int64_t>();
    return C;
}

Census run_census(const RealizationContext& R, Side side, int depth) {
    if (R.family() == Family::SU) throw DomainError("census needs F-rational payloads (SP or GL)");
    const int p = R.ctx()->p();
    const int n = R.n(), k = R.k();
    int64_t M = 1;
    for (int i = 0; i <= depth; ++i) M *= p;
    const auto& basis = side == Side::Plus ? R.plus_basis() : R.minus_dual_basis();
    const int N = static_cast<int>(basis.size());
    double points = std::pow(static_cast<double>(M), N);
    if (points > 2e9) throw DomainError("census budget exceeded");

    // payload entries as residues; the V- side works with -C
    std::vector<IntMat> B(N, IntMat(n, std::vector<int64_t>(n)));
    for (int i = 0; i < N; ++i)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                const QE& x = basis[i](r, c);
                if (!x.in_F()) throw DomainError("census needs F-rational payloads");
                mpq_class v = side == Side::Plus ? x.a : mpq_class(-x.a);
                B[i][r][c] = rational_mod(v, M);
            }

    Census C;
    C.family = family_name(R.family());
    C.n = n;
    C.p = p;
    C.depth = depth;
    C.dim = N;
    C.side = side;
    C.total = static_cast<int64_t>(points);

    std::vector<int64_t> y(N, 0);
    IntMat P(n, std::vector<int64_t>(n));
    std::vector<int> key(2 * (k + 1));
    for (int64_t idx = 0; idx < C.total; ++idx) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                int64_t s = 0;
                for (int i = 0; i < N; ++i) s += y[i] * B[i][r][c];
                P[r][c] = s % M;
            }
        bool deep = false;
        for (int j = 0; j <= k && !deep; ++j) {
            // Delta_j: leading minor of size n-j; nabla_j: trailing minor of size n-j
            int64_t m = side == Side::Plus ? det_mod(sub_block(P, 0, n - j), M) : det_mod(sub_block(P, j, n - j), M);
            if (m == 0) {
                deep = true;
                break;
            }
            int v = 0;
            while (m % p == 0) {
                m /= p;
                ++v;
            }
            key[j] = v;
            key[k + 1 + j] = static_cast<int>(m % p);
        }
        if (deep)
            ++C.tail;
        else
            ++C.counts[key];
        for (int i = 0; i < N; ++i) {
            if (++y[i] < M) break;
            y[i] = 0;
        }
    }
    return C;
}

Census cached_census(const RealizationContext& R, Side side, int depth) {
    const char* dir = std::getenv("PLGZ_CACHE");
    if (!dir || !*dir) return run_census(R, side, depth);
    namespace fs = std::filesystem;
    fs::path path = fs::path(dir) / ("census-" + family_name(R.family()) + "-" + std::to_string(R.n()) + "-" +
                                     std::to_string(R.ctx()->p()) + "-" + std::to_string(depth) + "-" +
                                     side_name(side) + ".json");
    if (fs::exists(path)) {
        std::ifstream in(path);
        try {
            return Census::from_json(nlohmann::json::parse(in));
        } catch (const std::exception&) {
            // unreadable cache entry: recompute below
        }
    }
    Census C = run_census(R, side, depth);
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(path);
    if (out) out << C.to_json().dump();
    return C;
}

ClassTuple census_orbit(const Census& C, const std::vector<int>& key, const SeGroup& S) {
    const int k = static_cast<int>(key.size()) / 2 - 1;
    // classes of the invariants, with an extra trivial one at index k+1
    std::vector<int> v(key.begin(), key.begin() + k + 1);
    std::vector<int64_t> u(key.begin() + k + 1, key.end());
    v.push_back(0);
    u.push_back(1);
    ClassTuple a(k + 1);
    for (int j = 0; j <= k; ++j) {
        int vv = v[j] - v[j + 1];
        int64_t uu = u[j] * inv_mod(u[j + 1], C.p) % C.p;
        SquareClass cls = S.coset_rep(class_of(vv, uu, C.p));
        if (C.side == Side::Plus)
            a[j] = cls;
        else
            a[k - j] = cls;
    }
    return a;
}

cplx TruncatedZeta::eval(const std::vector<cplx>& T) const {
    cplx s = 0;
    for (const auto& [e, c] : coeffs) {
        cplx t = c;
        for (int i = 0; i < nvars; ++i) t *= std::pow(T[i], e[i]);
        s += t;
    }
    return s;
}

double TruncatedZeta::tail_bound(const std::vector<cplx>& s, int p) const {
    double m = INFINITY;
    for (auto z : s) m = std::min(m, z.real());
    if (!(m > 0)) throw DomainError("tail bound needs Re s_j > 0");
    return tail_volume * std::pow(static_cast<double>(p), -(depth + 1) * m);
}

TruncatedZeta zeta_K(const Census& C, const ClassTuple& a, const CharTuple& omega, const SeGroup& S) {
    const int k = C.n - 1;
    if (static_cast<int>(a.size()) != k + 1 || static_cast<int>(omega.size()) != k + 1)
        throw DomainError("zeta_K: tuple lengths must be k+1");
    TruncatedZeta Z;
    Z.nvars = k + 1;
    Z.depth = C.depth;
    Z.tail_volume = C.tail_volume();
    const double vol = C.cell_volume();
    for (const auto& [key, count] : C.counts) {
        if (census_orbit(C, key, S) != a) continue;
        std::vector<int> e(key.begin(), key.begin() + k + 1);
        cplx w = vol * static_cast<double>(count);
        for (int j = 0; j <= k; ++j) w *= std::pow(omega[j].value_at_pi, e[j]) * omega[j].on_unit(key[k + 1 + j]);
        Z.coeffs[e] += w;
    }
    return Z;
}

}  // namespace plgz

namespace plgz {

namespace {

using Series = std::map<std::vector<int>, cplx>;

bool in_box(const std::vector<int>& e, int hi) {
    for (int x : e)
        if (x > hi) return false;
    return true;
}

// N - u T^a N, truncated to the box [0, depth]^nvars
Series times_factor(const Series& N, cplx u, const std::vector<int>& a, int depth) {
    Series out = N;
    for (const auto& [e, c] : N) {
        std::vector<int> f = e;
        for (size_t i = 0; i < f.size(); ++i) f[i] += a[i];
        if (!in_box(f, depth)) continue;
        out[f] -= u * c;
    }
    return out;
}

double outside_mass(const Series& N, int num_degree) {
    double s = 0;
    for (const auto& [e, c] : N)
        if (!in_box(e, num_degree)) s += std::abs(c);
    return s;
}

std::vector<std::vector<int>> exponent_vectors(int nvars, int hi) {
    std::vector<std::vector<int>> out{{}};
    for (int i = 0; i < nvars; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& v : out)
            for (int x = 0; x <= hi; ++x) {
                auto w = v;
                w.push_back(x);
                next.push_back(w);
            }
        out = next;
    }
    out.erase(out.begin());  // the zero vector
    return out;
}

}  // namespace

cplx ReconstructedZeta::eval(const std::vector<cplx>& T) const {
    cplx num = 0;
    for (const auto& [e, c] : numerator) {
        cplx t = c;
        for (size_t i = 0; i < e.size(); ++i) t *= std::pow(T[i], e[i]);
        num += t;
    }
    cplx den = 1;
    for (const auto& [u, a] : factors) {
        cplx t = u;
        for (size_t i = 0; i < a.size(); ++i) t *= std::pow(T[i], a[i]);
        den *= 1.0 - t;
    }
    return num / den;
}

nlohmann::json ReconstructedZeta::to_json() const {
    nlohmann::json j;
    j["ok"] = ok;
    j["fit_residual"] = fit_residual;
    auto fs = nlohmann::json::array();
    for (const auto& [u, a] : factors) fs.push_back({{"u", {u.real(), u.imag()}}, {"a", a}});
    j["denominator"] = fs;
    auto num = nlohmann::json::array();
    for (const auto& [e, c] : numerator)
        if (std::abs(c) > 1e-15) num.push_back({{"e", e}, {"c", {c.real(), c.imag()}}});
    j["numerator"] = num;
    return j;
}

ReconstructedZeta reconstruct(const TruncatedZeta& Z, int p, const ReconstructOptions& opt) {
    if (opt.numerator_degree < 0) {
        // smallest numerator box first, so that as many truncated coefficients as possible are tested
        ReconstructedZeta r;
        for (int nd = std::max(0, Z.depth - 2); nd < Z.depth; ++nd) {
            ReconstructOptions o = opt;
            o.numerator_degree = nd;
            r = reconstruct(Z, p, o);
            if (r.ok) return r;
        }
        return r;
    }
    const int nd = opt.numerator_degree;
    std::vector<cplx> roots = opt.roots;
    if (roots.empty())
        for (int i = 0; i < 4 * (p - 1); ++i) roots.push_back(std::polar(1.0, kTwoPi * i / (4.0 * (p - 1))));
    double scale = 0;
    for (const auto& [e, c] : Z.coeffs) scale += std::abs(c);

    ReconstructedZeta best;
    if (scale == 0) {
        best.ok = true;
        return best;
    }
    struct State {
        Series N;
        std::vector<std::pair<cplx, std::vector<int>>> factors;
        double mass;
    };
    std::vector<State> beam{{Z.coeffs, {}, outside_mass(Z.coeffs, nd) / scale}};
    const auto exps = exponent_vectors(Z.nvars, opt.max_exponent);
    const size_t width = 6;
    auto finish = [&](const State& s) {
        best.factors = s.factors;
        best.numerator = s.N;
        for (auto it = best.numerator.begin(); it != best.numerator.end();)
            it = in_box(it->first, nd) ? std::next(it) : best.numerator.erase(it);
        best.fit_residual = s.mass;
        best.ok = s.mass <= opt.tol;
    };
    if (beam[0].mass <= opt.tol) {
        finish(beam[0]);
        return best;
    }
    for (int step = 0; step < opt.max_factors; ++step) {
        std::vector<State> next;
        for (const auto& st : beam)
            for (const auto& a : exps)
                for (int h = 0; h <= opt.max_half_power; ++h)
                    for (cplx r : roots) {
                        cplx u = r * std::pow(static_cast<double>(p), -0.5 * h);
                        State s;
                        s.N = times_factor(st.N, u, a, Z.depth);
                        s.mass = outside_mass(s.N, nd) / scale;
                        if (s.mass >= st.mass * (1 - 1e-9)) continue;
                        s.factors = st.factors;
                        s.factors.push_back({u, a});
                        next.push_back(std::move(s));
                    }
        if (next.empty()) break;
        std::partial_sort(next.begin(), next.begin() + std::min(width, next.size()), next.end(),
                          [](const State& x, const State& y) { return x.mass < y.mass; });
        if (next.size() > width) next.resize(width);
        beam = std::move(next);
        if (beam[0].mass <= opt.tol) break;
    }
    finish(beam[0]);
    return best;
}

nlohmann::json FunctionalEquationCheck::to_json() const {
    nlohmann::json j;
    j["reconstructed"] = reconstructed;
    j["max_residual"] = max_residual;
    j["max_relative"] = max_relative;
    j["residuals"] = residuals;
    auto pts = nlohmann::json::array();
    for (const auto& s : points) {
        auto row = nlohmann::json::array();
        for (auto z : s) row.push_back({z.real(), z.imag()});
        pts.push_back(row);
    }
    j["points"] = pts;
    j["warnings"] = warnings;
    return j;
}

FunctionalEquationCheck verify_fe_census(const RealizationContext& R, int depth, const CharTuple& omega,
                                         const std::vector<std::vector<cplx>>& points,
                                         const ReconstructOptions& opt) {
    if (R.family() != Family::SP || R.k() != 1) throw DomainError("census functional equation is set up for SP, k = 1");
    const Context& ctx = R.ctx();
    const int p = ctx->p(), d = R.d(), e = R.e();
    const double m = 1.0 + 0.5 * R.k() * d;
    const SeGroup S = scaling_group(ctx, d, e);
    const Census Cp = cached_census(R, Side::Plus, depth);
    const Census Cm = cached_census(R, Side::Minus, depth);
    auto [omega_sharp, unused] = sharp(omega, std::vector<cplx>(omega.size(), 0.0));

    FunctionalEquationCheck out;
    out.points = points;
    const auto tuples = all_tuples(S, R.k() + 1);
    std::map<ClassTuple, ReconstructedZeta> plus, minus;
    out.reconstructed = true;
    for (const auto& a : tuples) {
        plus[a] = reconstruct(zeta_K(Cp, a, omega, S), p, opt);
        minus[a] = reconstruct(zeta_K(Cm, a, omega_sharp, S), p, opt);
        for (auto* z : {&plus[a], &minus[a]})
            if (!z->ok) {
                out.reconstructed = false;
                out.warnings.push_back("no denominator found for orbit " + a[0].name() + "," + a[1].name() + " (" +
                                       (z == &plus[a] ? "plus" : "minus") + ")");
            }
    }
    if (!out.reconstructed) return out;

    auto q_pow = [&](cplx s) { return std::pow(cplx(p), -s); };
    for (const auto& s : points) {
        auto [ws, ssharp] = sharp(omega, s);
        const auto s_minus = shift_first(ssharp, m);
        std::vector<cplx> T, Tm;
        for (auto z : s) T.push_back(q_pow(z));
        for (auto z : s_minus) Tm.push_back(q_pow(z));
        double worst = 0;
        for (const auto& a : tuples) {
            cplx lhs = minus[a].eval(Tm);
            cplx rhs = 0;
            for (const auto& c : tuples) rhs += D_closed(ctx, d, e, a, c, omega, s) * plus[c].eval(T);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
            if (std::abs(lhs) > 0) out.max_relative = std::max(out.max_relative, std::abs(lhs - rhs) / std::abs(lhs));
        }
        out.residuals.push_back(worst);
        out.max_residual = std::max(out.max_residual, worst);
    }
    return out;
}

}  // namespace plgz
