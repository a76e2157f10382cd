#include "plgz/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "plgz/padic.hpp"

namespace plgz {

using nlohmann::json;

bool WeightedSatakeDiagram::has(int id) const {
    for (const auto& v : vertices)
        if (v.id == id) return true;
    return false;
}

Color WeightedSatakeDiagram::color(int id) const {
    for (const auto& v : vertices)
        if (v.id == id) return v.color;
    throw DomainError("no vertex " + std::to_string(id));
}

std::vector<int> WeightedSatakeDiagram::neighbors(int id) const {
    std::vector<int> out;
    for (const auto& b : bonds) {
        if (b.a == id) out.push_back(b.b);
        if (b.b == id) out.push_back(b.a);
    }
    return out;
}

int WeightedSatakeDiagram::partner(int id) const {
    for (auto [x, y] : arrows) {
        if (x == id) return y;
        if (y == id) return x;
    }
    return id;
}

const DiagramBond* WeightedSatakeDiagram::bond(int a, int b) const {
    for (const auto& e : bonds)
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return &e;
    return nullptr;
}

// ---------------------------------------------------------------------------

int RootData::index_of(int id) const {
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    throw DomainError("no vertex " + std::to_string(id));
}

mpq_class RootData::form2(const std::vector<mpq_class>& x, const std::vector<mpq_class>& y) const {
    mpq_class s = 0;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (x[i] == 0) continue;
        for (size_t j = 0; j < ids.size(); ++j)
            if (cartan[i][j] != 0 && y[j] != 0) s += x[i] * y[j] * cartan[i][j] * len2[i];
    }
    return s;
}

std::vector<int> RootData::highest_root() const {
    const std::vector<int>* best = nullptr;
    int hb = -1;
    for (const auto& r : positive) {
        int h = 0;
        for (int c : r) h += c;
        if (h > hb) hb = h, best = &r;
    }
    return *best;
}

RootData root_data(const WeightedSatakeDiagram& D) {
    RootData R;
    const int r = D.size();
    if (r == 0) throw DomainError("empty diagram");
    for (const auto& v : D.vertices) R.ids.push_back(v.id);
    R.cartan.assign(r, std::vector<int>(r, 0));
    for (int i = 0; i < r; ++i) R.cartan[i][i] = 2;
    for (const auto& b : D.bonds) {
        int i = R.index_of(b.a), j = R.index_of(b.b);
        if (b.mult == 1) {
            R.cartan[i][j] = R.cartan[j][i] = -1;
        } else if (b.mult == 2) {
            int s = R.index_of(b.shorter);
            int l = s == i ? j : i;
            R.cartan[s][l] = -2;
            R.cartan[l][s] = -1;
        } else {
            throw DomainError("bond multiplicity " + std::to_string(b.mult) + " is not of finite type here");
        }
    }
    // root lengths by propagation along bonds
    std::vector<double> len(r, 0.0);
    len[0] = 1.0;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < r; ++j) {
            if (j == i || R.cartan[i][j] == 0) continue;
            double lj = len[i] * R.cartan[i][j] / R.cartan[j][i];  // |a_j|^2 / |a_i|^2 = A_ij / A_ji
            if (len[j] == 0.0) {
                len[j] = lj;
                stack.push_back(j);
            } else if (std::abs(len[j] - lj) > 1e-9) {
                throw DomainError("inconsistent root lengths (diagram has a cycle)");
            }
        }
    }
    double mn = *std::min_element(len.begin(), len.end());
    if (mn == 0.0) throw DomainError("diagram is not connected");
    for (int i = 0; i < r; ++i) R.len2.push_back(static_cast<int>(std::lround(len[i] / mn)));

    // positive roots by simple-root strings, layer by layer
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> layer;
    for (int i = 0; i < r; ++i) {
        std::vector<int> e(r, 0);
        e[i] = 1;
        layer.push_back(e);
        seen.insert(e);
    }
    while (!layer.empty()) {
        std::vector<std::vector<int>> next;
        for (const auto& beta : layer) {
            R.positive.push_back(beta);
            for (int i = 0; i < r; ++i) {
                int p = 0;
                std::vector<int> down = beta;
                while (true) {
                    down[i] -= 1;
                    if (down[i] < 0 || !seen.count(down)) break;
                    ++p;
                }
                int pair = 0;
                for (int j = 0; j < r; ++j) pair += beta[j] * R.cartan[i][j];
                if (p - pair > 0) {
                    std::vector<int> up = beta;
                    up[i] += 1;
                    if (seen.insert(up).second) next.push_back(up);
                }
            }
        }
        if (R.positive.size() > 400) throw DomainError("diagram is not of finite type");
        layer = std::move(next);
    }
    return R;
}

std::string shape_name(const WeightedSatakeDiagram& D) {
    const int r = D.size();
    if (r == 1) return "A1";
    int doubles = 0, other = 0;
    const DiagramBond* dbl = nullptr;
    for (const auto& b : D.bonds) {
        if (b.mult == 2) ++doubles, dbl = &b;
        else if (b.mult != 1) ++other;
    }
    if (other) return "?";
    int branch = 0, branch_id = 0;
    for (const auto& v : D.vertices) {
        auto nb = D.neighbors(v.id);
        if (nb.size() > 3) return "?";
        if (nb.size() == 3) ++branch, branch_id = v.id;
    }
    if (static_cast<int>(D.bonds.size()) != r - 1) return "?";
    if (doubles > 1 || branch > 1 || (doubles && branch)) return "?";
    if (doubles == 1) {
        if (r == 2) return "B2";
        int ea = static_cast<int>(D.neighbors(dbl->a).size());
        int eb = static_cast<int>(D.neighbors(dbl->b).size());
        if (ea == 1 || eb == 1) {
            int end = ea == 1 ? dbl->a : dbl->b;
            return (end == dbl->shorter ? "B" : "C") + std::to_string(r);
        }
        return r == 4 ? "F4" : "?";
    }
    if (branch == 0) return "A" + std::to_string(r);
    std::vector<int> legs;
    for (int start : D.neighbors(branch_id)) {
        int len = 1, prev = branch_id, cur = start;
        while (true) {
            int nxt = 0;
            for (int w : D.neighbors(cur))
                if (w != prev) nxt = w;
            if (!nxt) break;
            prev = cur, cur = nxt, ++len;
        }
        legs.push_back(len);
    }
    std::sort(legs.begin(), legs.end());
    if (legs[0] == 1 && legs[1] == 1) return "D" + std::to_string(r);
    if (legs[0] == 1 && legs[1] == 2 && legs[2] <= 4) return "E" + std::to_string(r);
    return "?";
}

// ---------------------------------------------------------------------------

void validate_structure(const WeightedSatakeDiagram& D) {
    if (D.vertices.empty()) throw DomainError("empty diagram");
    std::set<int> ids;
    for (const auto& v : D.vertices)
        if (!ids.insert(v.id).second) throw DomainError("duplicate vertex " + std::to_string(v.id));
    if (!ids.count(D.circled)) throw DomainError("circled vertex is not in the diagram");
    if (D.color(D.circled) != Color::White) throw DomainError("circled vertex must be white");
    std::set<std::pair<int, int>> edges;
    for (const auto& b : D.bonds) {
        if (!ids.count(b.a) || !ids.count(b.b) || b.a == b.b) throw DomainError("bond with unknown endpoint");
        if (!edges.insert({std::min(b.a, b.b), std::max(b.a, b.b)}).second) throw DomainError("repeated bond");
        if (b.mult == 3) throw DomainError("triple bond: G2 does not occur");
        if (b.mult != 1 && b.mult != 2) throw DomainError("bond multiplicity must be 1 or 2");
        if (b.mult == 2 && b.shorter != b.a && b.shorter != b.b)
            throw DomainError("double bond needs a direction toward its shorter end");
    }
    std::set<int> moved;
    for (auto [x, y] : D.arrows) {
        if (!ids.count(x) || !ids.count(y) || x == y) throw DomainError("arrow with invalid endpoints");
        if (!moved.insert(x).second || !moved.insert(y).second) throw DomainError("arrows are not an involution");
        if (D.color(x) != Color::White || D.color(y) != Color::White)
            throw DomainError("arrows pair white vertices only");
    }
    if (D.partner(D.circled) != D.circled) throw DomainError("circled vertex is moved by an arrow");
    for (const auto& b : D.bonds) {
        const DiagramBond* img = D.bond(D.partner(b.a), D.partner(b.b));
        if (!img || img->mult != b.mult || (b.mult == 2 && img->shorter != D.partner(b.shorter)))
            throw DomainError("arrows do not preserve the diagram");
    }
    // connectivity
    std::set<int> seen{D.vertices[0].id};
    std::vector<int> stack{D.vertices[0].id};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : D.neighbors(v))
            if (seen.insert(w).second) stack.push_back(w);
    }
    if (seen.size() != ids.size()) throw DomainError("diagram is not connected");
    if (shape_name(D) == "?") throw DomainError("not a Dynkin diagram of finite type");
    root_data(D);
}

WeightedSatakeDiagram standard_diagram(const std::string& type, int n, const std::vector<int>& black,
                                       const std::vector<std::pair<int, int>>& arrows, int circled) {
    WeightedSatakeDiagram D;
    D.type = type;
    D.n = n;
    for (int i = 1; i <= n; ++i) {
        Color c = std::find(black.begin(), black.end(), i) != black.end() ? Color::Black : Color::White;
        D.vertices.push_back({i, c});
    }
    auto simple = [&](int a, int b) { D.bonds.push_back({a, b, 1, 0}); };
    if (type == "A") {
        for (int i = 1; i < n; ++i) simple(i, i + 1);
    } else if (type == "B" || type == "C") {
        if (n < 2) throw DomainError(type + " needs n >= 2");
        for (int i = 1; i < n - 1; ++i) simple(i, i + 1);
        D.bonds.push_back({n - 1, n, 2, type == "B" ? n : n - 1});
    } else if (type == "D") {
        if (n < 4) throw DomainError("D needs n >= 4");
        for (int i = 1; i < n - 1; ++i) simple(i, i + 1);
        simple(n - 2, n);
    } else if (type == "E" && n == 7) {
        simple(1, 3), simple(3, 4), simple(4, 5), simple(5, 6), simple(6, 7), simple(2, 4);
    } else {
        throw DomainError("unsupported type " + type + std::to_string(n));
    }
    D.arrows = arrows;
    D.circled = circled;
    return D;
}

static Color parse_color(const json& c) {
    std::string s = c.get<std::string>();
    if (s == "w" || s == "white") return Color::White;
    if (s == "b" || s == "black") return Color::Black;
    throw DomainError("unknown color '" + s + "'");
}

WeightedSatakeDiagram parse_diagram(const std::string& json_text) {
    static const std::regex toward(R"(,\s*"toward"\s*:\s*)");
    std::string text = std::regex_replace(json_text, toward, ",");
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("diagram JSON: ") + e.what());
    }
    WeightedSatakeDiagram D;
    try {
        D.type = j.at("type").get<std::string>();
        D.n = j.at("n").get<int>();
        if (D.type == "F" || D.type == "G" || (D.type == "E" && D.n != 7))
            throw DomainError("unsupported type " + D.type + std::to_string(D.n) + " (not among the graded families)");
        if (D.type != "A" && D.type != "B" && D.type != "C" && D.type != "D" && D.type != "E")
            throw DomainError("unknown type " + D.type);
        const auto& colors = j.at("colors");
        std::vector<int> ids;
        if (j.contains("vertices")) {
            ids = j.at("vertices").get<std::vector<int>>();
        } else {
            for (int i = 1; i <= static_cast<int>(colors.size()); ++i) ids.push_back(i);
        }
        if (ids.size() != colors.size()) throw DomainError("colors and vertices differ in length");
        if (static_cast<int>(ids.size()) != D.n) throw DomainError("vertex count does not match n");
        for (size_t i = 0; i < ids.size(); ++i) D.vertices.push_back({ids[i], parse_color(colors[i])});
        for (const auto& b : j.at("bonds")) {
            DiagramBond e;
            if (b.is_object()) {
                e.a = b.at("a").get<int>();
                e.b = b.at("b").get<int>();
                e.mult = b.value("bond", 1);
                e.shorter = b.value("toward", 0);
            } else {
                if (b.size() < 3 || b.size() > 4) throw DomainError("bond must be [a, b, mult], [a, b, 2, shorter] or [a, b, 2, {\"toward\": shorter}]");
                e.a = b[0].get<int>();
                e.b = b[1].get<int>();
                e.mult = b[2].get<int>();
                if (b.size() == 4) e.shorter = b[3].is_object() ? b[3].at("toward").get<int>() : b[3].get<int>();
            }
            D.bonds.push_back(e);
        }
        if (j.contains("arrows"))
            for (const auto& a : j.at("arrows")) D.arrows.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
        D.circled = j.at("circled").get<int>();
    } catch (const json::exception& e) {
        throw DomainError(std::string("diagram JSON: ") + e.what());
    }
    validate_structure(D);
    std::string shape = shape_name(D);
    std::string declared = D.type + std::to_string(D.n);
    if (declared == "C2") declared = "B2";
    if (shape != declared) throw DomainError("bonds describe " + shape + ", not the declared " + D.type + std::to_string(D.n));
    return D;
}

std::string diagram_to_json(const WeightedSatakeDiagram& D) {
    json j;
    j["type"] = D.type;
    j["n"] = D.n;
    json ids = json::array(), colors = json::array(), bonds = json::array(), arrows = json::array();
    for (const auto& v : D.vertices) {
        ids.push_back(v.id);
        colors.push_back(v.color == Color::White ? "w" : "b");
    }
    for (const auto& b : D.bonds) {
        if (b.mult == 2) bonds.push_back({b.a, b.b, 2, b.shorter});
        else bonds.push_back({b.a, b.b, b.mult});
    }
    for (auto [x, y] : D.arrows) arrows.push_back({x, y});
    j["vertices"] = ids;
    j["colors"] = colors;
    j["bonds"] = bonds;
    j["arrows"] = arrows;
    j["circled"] = D.circled;
    return j.dump();
}

bool diagrams_isomorphic(const WeightedSatakeDiagram& x, const WeightedSatakeDiagram& y) {
    const int r = x.size();
    if (r != y.size() || x.bonds.size() != y.bonds.size() || x.arrows.size() != y.arrows.size()) return false;
    std::map<int, int> f;
    std::set<int> used;
    std::function<bool(int)> extend = [&](int i) -> bool {
        if (i == r) {
            for (auto [a, b] : x.arrows)
                if (y.partner(f[a]) != f[b]) return false;
            return true;
        }
        int u = x.vertices[i].id;
        for (const auto& w : y.vertices) {
            if (used.count(w.id) || w.color != x.vertices[i].color) continue;
            if ((u == x.circled) != (w.id == y.circled)) continue;
            if (x.neighbors(u).size() != y.neighbors(w.id).size()) continue;
            bool ok = true;
            for (int j = 0; j < i && ok; ++j) {
                int u2 = x.vertices[j].id;
                const DiagramBond* bx = x.bond(u, u2);
                const DiagramBond* by = y.bond(w.id, f[u2]);
                if (!bx != !by) ok = false;
                else if (bx && bx->mult != by->mult) ok = false;
                else if (bx && bx->mult == 2 && (bx->shorter == u ? w.id : f[u2]) != by->shorter) ok = false;
            }
            if (!ok) continue;
            f[u] = w.id;
            used.insert(w.id);
            if (extend(i + 1)) return true;
            used.erase(w.id);
            f.erase(u);
        }
        return false;
    };
    return extend(0);
}

// ---------------------------------------------------------------------------

std::optional<WeightedSatakeDiagram> descend_once(const WeightedSatakeDiagram& D) {
    validate_structure(D);
    RootData R = root_data(D);
    std::vector<int> theta = R.highest_root();
    const int r = D.size();

    WeightedSatakeDiagram X = D;
    int new_id = 0;
    for (const auto& v : D.vertices) new_id = std::min(new_id, v.id);
    --new_id;
    X.vertices.push_back({new_id, Color::White});
    std::vector<mpq_class> th(r);
    for (int i = 0; i < r; ++i) th[i] = theta[i];
    int theta_len = static_cast<int>(mpq_class(R.form2(th, th) / 2).get_num().get_si());
    for (int i = 0; i < r; ++i) {
        int c = 0;  // <theta, alpha_i^vee>
        for (int j = 0; j < r; ++j) c += theta[j] * R.cartan[i][j];
        if (c == 0) continue;
        int c_dual = c * R.len2[i] / theta_len;  // <alpha_i, theta^vee>
        int mult = c * c_dual;
        int shorter = R.len2[i] < theta_len ? R.ids[i] : 0;
        X.bonds.push_back({new_id, R.ids[i], mult, shorter});
    }

    // delete the circled vertex, the white vertices reached through black chains, and those chains
    std::set<int> dead{D.circled};
    std::vector<int> stack{D.circled};
    std::set<int> visited{D.circled};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : X.neighbors(v)) {
            if (!visited.insert(w).second) continue;
            dead.insert(w);
            if (X.color(w) == Color::Black) stack.push_back(w);
        }
    }
    if (dead.count(new_id)) return std::nullopt;

    // component of the new circled vertex
    std::set<int> keep{new_id};
    stack = {new_id};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : X.neighbors(v))
            if (!dead.count(w) && keep.insert(w).second) stack.push_back(w);
    }
    WeightedSatakeDiagram Y;
    for (const auto& v : X.vertices)
        if (keep.count(v.id)) Y.vertices.push_back(v);
    for (const auto& b : X.bonds)
        if (keep.count(b.a) && keep.count(b.b)) Y.bonds.push_back(b);
    for (auto [a, b] : X.arrows) {
        if (keep.count(a) != keep.count(b)) throw std::logic_error("descent separated a Galois pair");
        if (keep.count(a)) Y.arrows.push_back({a, b});
    }
    Y.circled = new_id;
    std::string shape = shape_name(Y);
    Y.type = shape.substr(0, 1);
    Y.n = Y.size();
    validate_structure(Y);
    return Y;
}

std::vector<WeightedSatakeDiagram> descent_sequence(const WeightedSatakeDiagram& D) {
    std::vector<WeightedSatakeDiagram> seq{D};
    while (true) {
        auto next = descend_once(seq.back());
        if (!next) break;
        if (static_cast<int>(seq.size()) > D.size() + 1) throw std::logic_error("descent does not terminate");
        seq.push_back(std::move(*next));
    }
    return seq;
}

// ---------------------------------------------------------------------------

namespace {

using QVec = std::vector<mpq_class>;

// orthogonal projection onto the split part: kill black roots and arrow differences
struct Restriction {
    const RootData& R;
    std::vector<QVec> U;
    std::vector<std::vector<mpq_class>> gram_inv;

    Restriction(const RootData& R_, const WeightedSatakeDiagram& D) : R(R_) {
        const int r = static_cast<int>(R.ids.size());
        for (const auto& v : D.vertices)
            if (v.color == Color::Black) {
                QVec u(r, 0);
                u[R.index_of(v.id)] = 1;
                U.push_back(u);
            }
        for (auto [a, b] : D.arrows) {
            QVec u(r, 0);
            u[R.index_of(a)] = 1;
            u[R.index_of(b)] = -1;
            U.push_back(u);
        }
        const size_t m = U.size();
        // invert the Gram matrix of U by Gauss-Jordan
        std::vector<std::vector<mpq_class>> A(m, std::vector<mpq_class>(2 * m, 0));
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < m; ++j) A[i][j] = R.form2(U[i], U[j]);
            A[i][m + i] = 1;
        }
        for (size_t c = 0; c < m; ++c) {
            size_t piv = c;
            while (piv < m && A[piv][c] == 0) ++piv;
            if (piv == m) throw std::logic_error("degenerate anisotropic subspace");
            std::swap(A[piv], A[c]);
            mpq_class inv = 1 / A[c][c];
            for (auto& x : A[c]) x *= inv;
            for (size_t i = 0; i < m; ++i) {
                if (i == c || A[i][c] == 0) continue;
                mpq_class f = A[i][c];
                for (size_t j = 0; j < 2 * m; ++j) A[i][j] -= f * A[c][j];
            }
        }
        gram_inv.assign(m, std::vector<mpq_class>(m));
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) gram_inv[i][j] = A[i][m + j];
    }

    QVec operator()(const std::vector<int>& root, int sign) const {
        const size_t r = root.size(), m = U.size();
        QVec x(r);
        for (size_t i = 0; i < r; ++i) x[i] = sign * root[i];
        std::vector<mpq_class> b(m);
        for (size_t a = 0; a < m; ++a) b[a] = R.form2(U[a], x);
        for (size_t a = 0; a < m; ++a) {
            mpq_class c = 0;
            for (size_t s = 0; s < m; ++s) c += gram_inv[a][s] * b[s];
            for (size_t i = 0; i < r; ++i) x[i] -= c * U[a][i];
        }
        return x;
    }
};

bool is_zero(const QVec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

QVec add(const QVec& a, const QVec& b, int sb) {
    QVec c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + sb * b[i];
    return c;
}

}  // namespace

RootConstants root_constants(const WeightedSatakeDiagram& D) {
    validate_structure(D);
    RootData R = root_data(D);
    Restriction res(R, D);
    const int ci = R.index_of(D.circled);
    std::vector<int> theta = R.highest_root();
    if (theta[ci] != 1) throw DomainError("the grading defined by the circled vertex is not short");

    std::map<QVec, int> mult;           // every restricted root
    std::map<QVec, int> plus_mult;      // restricted roots occurring in V+
    std::map<QVec, int> height;
    RootConstants out;
    for (const auto& a : R.positive) {
        for (int sign : {1, -1}) {
            QVec v = res(a, sign);
            if (is_zero(v)) continue;
            ++mult[v];
            if (sign == 1 && a[ci] == 1) {
                ++plus_mult[v];
                ++out.dim_vplus;
                int h = 0;
                for (size_t i = 0; i < a.size(); ++i)
                    if (D.color(R.ids[i]) == Color::White) h += a[i];
                height[v] = h;
            }
        }
    }
    auto strongly_orthogonal = [&](const QVec& x, const QVec& y) {
        QVec s = add(x, y, 1), d = add(x, y, -1);
        return !is_zero(d) && !mult.count(s) && !mult.count(d);
    };
    std::vector<QVec> lambdas;
    while (true) {
        int best = -1, ties = 0;
        const QVec* pick = nullptr;
        for (const auto& [v, m] : plus_mult) {
            bool ok = true;
            for (const auto& l : lambdas)
                if (!strongly_orthogonal(v, l)) ok = false;
            if (!ok) continue;
            int h = height[v];
            if (h > best) best = h, ties = 1, pick = &v;
            else if (h == best) ++ties;
        }
        if (!pick) break;
        if (ties > 1) throw std::logic_error("no unique highest restricted root in the descent");
        lambdas.push_back(*pick);
    }
    out.rank = static_cast<int>(lambdas.size());
    out.ell = plus_mult.at(lambdas[0]);
    for (const auto& l : lambdas)
        if (plus_mult.at(l) != out.ell) throw std::logic_error("strongly orthogonal roots of unequal multiplicity");
    if (out.rank >= 2) {
        const QVec& l0 = lambdas[0];
        const QVec& l1 = lambdas[1];
        mpq_class n0 = R.form2(l0, l0), n1 = R.form2(l1, l1);
        out.d = 0;
        out.d_plus = 0;
        for (const auto& [v, m] : mult) {
            mpq_class a = 2 * R.form2(v, l0) / n0, b = 2 * R.form2(v, l1) / n1;
            if (a == -1 && b == 1) out.d += m;
            if (a == 1 && b == 1 && plus_mult.count(v)) out.d_plus += m;
        }
        QVec half(l0.size());
        for (size_t i = 0; i < half.size(); ++i) half[i] = (l0[i] + l1[i]) / 2;
        out.e = plus_mult.count(half) ? plus_mult.at(half) : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::optional<Table1Entry> table1_entry(int row, int x) {
    Table1Entry t;
    t.row = row;
    t.param = x;
    t.param_name = (row >= 8 && row <= 10) ? "m" : "n";
    auto fill = [&](int rank, int ell, int d, int e, const char* type, const char* one) {
        t.rank = rank, t.ell = ell, t.d = d, t.e = e, t.type = type, t.one_type = one;
    };
    switch (row) {
        case 1: if (x < 1) return std::nullopt; fill(x, 1, 2, 0, "I", "(A,1)"); break;
        case 2: if (x < 2) return std::nullopt; fill(x, 1, 2, 2, "II", "(A,1)"); break;
        case 3: if (x < 3) return std::nullopt; fill(2, 1, 2 * x - 3, 1, "II", "(A,1)"); break;
        case 4: if (x < 3) return std::nullopt; fill(2, 1, 2 * x - 3, 3, "II", "(A,1)"); break;
        case 5: if (x != 2) return std::nullopt; fill(1, 3, -1, -1, "III", "B"); t.realization_scope = false; break;
        case 6: if (x < 2) return std::nullopt; fill(x, 1, 1, 1, "II", "(A,1)"); break;
        case 7: if (x < 2) return std::nullopt; fill(x, 3, 4, 4, "III", "B"); t.realization_scope = false; break;
        case 8: if (x < 4) return std::nullopt; fill(2, 1, 2 * x - 4, 0, "I", "(A,1)"); break;
        case 9: if (x < 4) return std::nullopt; fill(2, 1, 2 * x - 4, 2, "II", "(A,1)"); break;
        case 10: if (x < 4) return std::nullopt; fill(2, 1, 2 * x - 4, 4, "I", "(A,1)"); break;
        case 11: if (x < 2) return std::nullopt; fill(x, 1, 4, 0, "I", "(A,1)"); break;
        case 12: if (x < 2) return std::nullopt; fill(x, 1, 4, 4, "I", "(A,1)"); t.realization_scope = false; break;
        case 13: if (x != 7) return std::nullopt; fill(3, 1, 8, 0, "I", "(A,1)"); break;
        default: return std::nullopt;
    }
    return t;
}

std::optional<WeightedSatakeDiagram> table1_diagram(int row, int x) {
    if (!table1_entry(row, x)) return std::nullopt;
    std::vector<int> odd;
    switch (row) {
        case 1: return standard_diagram("A", 2 * x - 1, {}, {}, x);
        case 2: {
            std::vector<std::pair<int, int>> arrows;
            for (int i = 1; i < x; ++i) arrows.push_back({i, 2 * x - i});
            return standard_diagram("A", 2 * x - 1, {}, arrows, x);
        }
        case 3: return standard_diagram("B", x, {}, {}, 1);
        case 4: return standard_diagram("B", x, {x}, {}, 1);
        case 5: return standard_diagram("B", 2, {2}, {}, 1);
        case 6: return standard_diagram("C", x, {}, {}, x);
        case 7:
            for (int i = 1; i < 2 * x; i += 2) odd.push_back(i);
            return standard_diagram("C", 2 * x, odd, {}, 2 * x);
        case 8: return standard_diagram("D", x, {}, {}, 1);
        case 9: return standard_diagram("D", x, {}, {{x - 1, x}}, 1);
        case 10: return standard_diagram("D", x, {x - 1, x}, {}, 1);
        case 11: return standard_diagram("D", 2 * x, {}, {}, 2 * x);
        case 12:
            for (int i = 1; i < 2 * x; i += 2) odd.push_back(i);
            return standard_diagram("D", 2 * x, odd, {}, 2 * x);
        case 13: return standard_diagram("E", 7, {}, {}, 7);
    }
    return std::nullopt;
}

std::vector<std::pair<int, std::vector<int>>> table1_sample_parameters() {
    return {{1, {2, 3, 4}}, {2, {2, 3, 4}}, {3, {3, 4, 5}},  {4, {3, 4, 5}},  {6, {2, 3, 4}},
            {8, {4, 5, 6}}, {9, {4, 5, 6}}, {10, {4, 5, 6}}, {11, {2, 3, 4}}, {13, {7}}};
}

int open_G_orbits(const std::string& type, int e, int k) {
    if (type == "I") return 1;
    if (type == "III") return k == 0 ? 3 : 4;
    if (e == 2) return k % 2 == 0 ? 1 : 2;
    if (e == 1) {
        if (k == 0) return 1;
        if (k == 1) return 4;
        return k % 2 == 0 ? 2 : 5;
    }
    if (e == 3) return 4;
    throw DomainError("open orbit count: invalid (type, e)");
}

int open_P_orbits(const std::string& type, int e, int k) {
    if (type == "I") return 1;
    if (type == "III") return static_cast<int>(std::lround(std::pow(3.0, k + 1)));
    int index = e == 2 ? 2 : 4;
    return static_cast<int>(std::lround(std::pow(static_cast<double>(index), k)));
}

static std::string type_of(int ell, int e) {
    if (ell == 3) return "III";
    int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ell))));
    if (root * root == ell && (e == 0 || e == 4)) return "I";
    if (ell == 1 && e >= 1 && e <= 3) return "II";
    return "?";
}

static std::string one_type_of(const WeightedSatakeDiagram& last) {
    if (last.size() == 1) return "(A,1)";
    int whites = 0;
    for (const auto& v : last.vertices) whites += v.color == Color::White;
    if (whites != 1) return "?";
    std::string shape = shape_name(last);
    if (shape == "B2") {
        for (const auto& v : last.vertices)
            if (v.color == Color::Black) {
                const DiagramBond* b = last.bond(v.id, last.circled);
                if (b && b->shorter == v.id) return "B";
            }
        return "?";
    }
    if (shape[0] == 'A') {
        int r = last.size();
        if (r % 2 == 1) return "(A," + std::to_string((r + 1) / 2) + ")";
    }
    return "?";
}

GradedProfile classify_profile(const WeightedSatakeDiagram& D) {
    validate_structure(D);
    std::string shape = shape_name(D);
    if (shape[0] != 'A' && shape[0] != 'B' && shape[0] != 'C' && shape[0] != 'D' && shape != "E7")
        throw DomainError("unsupported type " + shape);

    std::optional<Table1Entry> match;
    for (int row = 1; row <= 13 && !match; ++row)
        for (int x = 1; x <= D.size() + 1 && !match; ++x) {
            auto cand = table1_diagram(row, x);
            if (cand && cand->size() == D.size() && diagrams_isomorphic(*cand, D)) match = table1_entry(row, x);
        }
    if (!match) {
        bool has_black = false;
        for (const auto& v : D.vertices) has_black |= v.color == Color::Black;
        if (shape[0] == 'A' && has_black && D.arrows.empty())
            throw DomainError("row (1) with a division algebra (delta > 1) is out of scope");
        throw DomainError("diagram matches no family of the classification table");
    }

    auto seq = descent_sequence(D);
    RootConstants rc = root_constants(D);
    GradedProfile P;
    P.row = match->row;
    P.param = match->param;
    P.param_name = match->param_name;
    P.descent_rank = static_cast<int>(seq.size());
    for (const auto& s : seq) P.descent_shapes.push_back(shape_name(s));
    if (rc.rank != P.descent_rank)
        throw std::logic_error("descent rank " + std::to_string(P.descent_rank) + " differs from root-system rank " +
                               std::to_string(rc.rank));
    const int k = rc.rank - 1;
    P.rank = rc.rank;
    P.ell = rc.ell;
    P.d = rc.d;
    P.e = rc.e;
    P.dim_vplus = rc.dim_vplus;
    P.one_type = one_type_of(seq.back());
    P.type = type_of(P.ell, k >= 1 ? P.e : match->e);
    if (P.one_type == "(A,1)") P.kappa = 1;
    else if (P.one_type == "B") P.kappa = 2;
    else throw std::logic_error("unrecognized final diagram " + shape_name(seq.back()));

    auto mismatch = [&](const std::string& what) {
        throw std::logic_error("computed " + what + " disagrees with table row (" + std::to_string(P.row) + ")");
    };
    if (P.rank != match->rank) mismatch("rank");
    if (P.ell != match->ell) mismatch("ell");
    if (k >= 1 && (P.d != match->d || P.e != match->e || rc.d_plus != rc.d)) mismatch("d or e");
    if (P.type != match->type) mismatch("type");
    if (P.one_type != match->one_type) mismatch("1-type");
    int expect_dim = k >= 1 ? (k + 1) * (2 * P.ell + k * P.d) / 2 : P.ell;
    if (P.dim_vplus != expect_dim) mismatch("dim V+");

    P.m_const = mpq_class(P.dim_vplus, P.kappa * (k + 1));
    P.m_const.canonicalize();
    int e_for_counts = k >= 1 ? P.e : match->e;
    P.open_G = open_G_orbits(P.type, e_for_counts, k);
    P.open_P = open_P_orbits(P.type, e_for_counts, k);
    return P;
}

std::string profile_to_json(const GradedProfile& P) {
    json j;
    j["row"] = P.row;
    j[P.param_name] = P.param;
    j["rank"] = P.rank;
    j["k"] = P.rank - 1;
    j["ell"] = P.ell;
    j["d"] = P.d >= 0 ? json(P.d) : json(nullptr);
    j["e"] = P.e >= 0 ? json(P.e) : json(nullptr);
    j["kappa"] = P.kappa;
    j["m"] = P.m_const.get_str();
    j["dim_vplus"] = P.dim_vplus;
    j["type"] = P.type;
    j["one_type"] = P.one_type;
    j["open_G_orbits"] = P.open_G;
    j["open_P_orbits"] = P.open_P;
    j["descent_rank"] = P.descent_rank;
    j["descent"] = P.descent_shapes;
    return j.dump();
}

}  // namespace plgz
