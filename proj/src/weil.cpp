#include "plgz/weil.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace plgz {

WeilIndex weil_gamma_direct(const Context& ctx, const std::vector<std::vector<mpq_class>>& G) {
    const int p = ctx->p();
    const size_t n = G.size();
    int64_t vmin = PadicScalar::kInfinity;
    for (const auto& row : G)
        for (const auto& g : row)
            if (g != 0) vmin = std::min<int64_t>(vmin, rational_valuation(g, p));
    if (vmin == PadicScalar::kInfinity) throw DomainError("zero quadratic form");
    if (vmin < 0) throw DomainError("weil_gamma_direct expects a p-integral Gram matrix");

    cplx prev = 0;
    bool have_prev = false;
    for (int m = 1;; ++m) {
        int R = static_cast<int>(2 * m - vmin);
        if (R < 1) continue;
        double cells = std::pow(static_cast<double>(p), static_cast<double>(R) * n);
        if (cells > 6e7 || 2 * m > ctx->N())
            throw PrecisionError("oscillatory sum did not stabilize within budget");
        const int64_t P2 = ctx->pow_p(2 * m);
        const int64_t PR = ctx->pow_p(R);
        std::vector<std::vector<int64_t>> g(n, std::vector<int64_t>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                PadicScalar s = PadicScalar::from_rational(ctx, G[i][j]);
                if (s.is_zero()) {
                    g[i][j] = 0;
                } else {
                    // p^v u mod p^{2m}
                    int64_t v = s.valuation();
                    g[i][j] = v >= 2 * m ? 0 : mulmod(s.unit() % P2, ctx->pow_p(static_cast<int>(v)), P2);
                }
            }
        std::vector<int64_t> x(n, 0);
        cplx sum = 0;
        const double inv = 1.0 / static_cast<double>(P2);
        while (true) {
            int64_t val = 0;
            for (size_t i = 0; i < n; ++i) {
                if (x[i] == 0) continue;
                int64_t row = 0;
                for (size_t j = 0; j < n; ++j) row = (row + mulmod(g[i][j], x[j], P2)) % P2;
                val = (val + mulmod(row, x[i], P2)) % P2;
            }
            sum += std::polar(1.0, kTwoPi * static_cast<double>(val) * inv);
            size_t k = 0;
            while (k < n && ++x[k] == PR) x[k++] = 0;
            if (k == n) break;
        }
        if (std::abs(sum) < 1e-6 * std::sqrt(cells)) continue;
        cplx cur = sum / std::abs(sum);
        if (have_prev && std::abs(cur - prev) < 1e-9) return {cur, WeilProvenance::DirectSum};
        prev = cur;
        have_prev = true;
    }
}

WeilIndex weil_alpha(const LocalFieldContext& ctx, SquareClass a) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, cplx> memo;
    std::pair<int, int> key{ctx.p(), a.bits()};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return {it->second, WeilProvenance::GaussOracle};
    }
    auto c = make_context(ctx.p(), ctx.N());
    WeilIndex w = weil_gamma_direct(c, {{a.representative(c).to_rational()}});
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(key, w.value);
    return {w.value, WeilProvenance::GaussOracle};
}

WeilIndex weil_alpha(const PadicScalar& a) { return weil_alpha(*a.ctx(), square_class_of(a)); }

WeilIndex weil_gamma(const DiagonalForm& Q) {
    cplx v = 1.0;
    for (auto c : Q.coeffs()) v *= weil_alpha(*Q.ctx(), c).value;
    return {v, WeilProvenance::ProductFormula};
}

WeilIndex gamma_k(const std::vector<SquareClass>& a, SquareClass c_k, int e, int d, const Context& ctx) {
    const int k = static_cast<int>(a.size());
    if (k < 1) throw DomainError("gamma_k needs k >= 1");
    auto [q, S] = build_qe_and_Se(d, e, ctx);
    auto in_reps = [&](SquareClass t) {
        for (auto r : S.reps())
            if (r == t) return true;
        return false;
    };
    if (!in_reps(c_k)) throw DomainError("c_k is not in the representative set");
    for (auto t : a)
        if (!in_reps(t)) throw DomainError("a_j is not in the representative set");
    const cplx gq = weil_gamma(q).value;
    cplx v = 1.0;
    if (e == 0 || e == 4) {
        v = std::pow(gq, k);
    } else if (e == 2) {
        v = std::pow(gq, k) * std::pow(static_cast<double>(S.norm_character(c_k)), k);
        for (auto t : a) v *= static_cast<double>(S.norm_character(t));
    } else {
        // (-1)^{(d-1)/2} disc(q_e)
        SquareClass sign = ((d - 1) / 2) % 2 ? SquareClass::minus_one(*ctx) : SquareClass::one();
        SquareClass twist = sign * q.disc();
        cplx am1 = weil_alpha(*ctx, SquareClass::minus_one(*ctx)).value;
        for (auto t : a) {
            SquareClass ac = t * c_k;
            v *= gq * static_cast<double>(hilbert_symbol(*ctx, twist, ac)) * weil_alpha(*ctx, ac).value * am1;
        }
    }
    return {v, WeilProvenance::GammaKFormula};
}

}  // namespace plgz
