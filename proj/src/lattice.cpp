#include "hkr/lattice.hpp"

#include "hkr/fq.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

namespace hkr {

Mat zeros(int r, int c, long pi0) { return Mat(r, std::vector<Ext>(c, Ext(0, 0, pi0))); }

Mat identity(int n, long pi0) {
    Mat m = zeros(n, n, pi0);
    for (int i = 0; i < n; ++i) m[i][i] = Ext(1, 0, pi0);
    return m;
}

static long ring_of(const Mat& a) {
    for (auto& r : a)
        for (auto& x : r)
            if (x.pi0) return x.pi0;
    return 0;
}

Mat mul(const Mat& a, const Mat& b) {
    if (a.empty() || b.empty()) return {};
    long r = ring_of(a) ? ring_of(a) : ring_of(b);
    Mat c = zeros(int(a.size()), int(b[0].size()), r);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

Mat transpose(const Mat& a) {
    if (a.empty()) return {};
    Mat t = zeros(int(a[0].size()), int(a.size()), ring_of(a));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

Mat adjoint(const Mat& a) {
    Mat t = transpose(a);
    for (auto& r : t)
        for (auto& x : r) x = x.conj();
    return t;
}

Mat scale(const Mat& a, const Ext& s) {
    Mat m = a;
    for (auto& r : m)
        for (auto& x : r) x = x * s;
    return m;
}

Mat congruent(const Mat& g, const Mat& c) { return mul(mul(adjoint(c), g), c); }

Mat inverse(const Mat& a) {
    int n = int(a.size());
    long r = ring_of(a);
    Mat m = a, inv = identity(n, r);
    for (int c = 0; c < n; ++c) {
        int s = c;
        while (s < n && m[s][c].is_zero()) ++s;
        if (s == n) throw std::domain_error("singular matrix");
        std::swap(m[c], m[s]);
        std::swap(inv[c], inv[s]);
        Ext iv = m[c][c].inv();
        for (int j = 0; j < n; ++j) { m[c][j] = m[c][j] * iv; inv[c][j] = inv[c][j] * iv; }
        for (int i = 0; i < n; ++i) {
            if (i == c || m[i][c].is_zero()) continue;
            Ext f = m[i][c];
            for (int j = 0; j < n; ++j) { m[i][j] -= f * m[c][j]; inv[i][j] -= f * inv[c][j]; }
        }
    }
    return inv;
}

Ext det(const Mat& a) {
    int n = int(a.size());
    long r = ring_of(a);
    Mat m = a;
    Ext d(1, 0, r);
    for (int c = 0; c < n; ++c) {
        int s = c;
        while (s < n && m[s][c].is_zero()) ++s;
        if (s == n) return Ext(0, 0, r);
        if (s != c) { std::swap(m[c], m[s]); d = -d; }
        d = d * m[c][c];
        Ext iv = m[c][c].inv();
        for (int i = c + 1; i < n; ++i) {
            if (m[i][c].is_zero()) continue;
            Ext f = m[i][c] * iv;
            for (int j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return d;
}

Mat block_sum(const Mat& a, const Mat& b) {
    int na = int(a.size()), nb = int(b.size());
    long r = ring_of(a) ? ring_of(a) : ring_of(b);
    Mat m = zeros(na + nb, na + nb, r);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) m[i][j] = a[i][j];
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) m[na + i][na + j] = b[i][j];
    return m;
}

std::string mat_str(const Mat& m) {
    std::string s = "[";
    for (size_t i = 0; i < m.size(); ++i) {
        s += i ? ", [" : "[";
        for (size_t j = 0; j < m[i].size(); ++j) s += (j ? ", " : "") + m[i][j].str();
        s += "]";
    }
    return s + "]";
}

bool is_hermitian(const Mat& g) {
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
            if (g[i][j] != g[j][i].conj()) return false;
    return true;
}

int min_val(const Mat& g, int p) {
    int v = kInfVal;
    for (auto& r : g)
        for (auto& x : r) v = std::min(v, val_pi(x, p));
    return v;
}

bool is_integral(const Mat& g, int p) { return min_val(g, p) >= 0; }

bool is_trace_integral(const Mat& g, int p) {
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
            if (val_pi(g[i][j], p) < (i == j ? 0 : -1)) return false;
    return true;
}

// ---------------------------------------------------------------- DSL

namespace {

struct Parser {
    std::string s;
    size_t i = 0;
    const RingConfig& R;

    Parser(std::string text, const RingConfig& r) : R(r) {
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }

    [[noreturn]] void fail(const std::string& what) {
        std::string tok = s.substr(i, std::min<size_t>(8, s.size() - i));
        throw std::invalid_argument("gram parse error at '" + (tok.empty() ? "<end>" : tok) + "': " + what);
    }
    bool eat(const std::string& t) {
        if (s.compare(i, t.size(), t) == 0) { i += t.size(); return true; }
        return false;
    }
    long integer() {
        size_t st = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (st == i || (i == st + 1 && !std::isdigit(static_cast<unsigned char>(s[st])))) { i = st; fail("expected integer"); }
        return std::stol(s.substr(st, i - st));
    }
    int exponent() {
        if (!eat("^")) return 1;
        if (eat("(")) { long e = integer(); if (!eat(")")) fail("expected ')'"); return int(e); }
        return int(integer());
    }
    // entry := ['-'] (unit ['*' power] | power)
    mpq_class entry() {
        mpq_class sgn = 1;
        if (eat("-")) sgn = -1;
        mpq_class u = 1;
        bool have_unit = false;
        if (eat("s")) { u = R.nonresidue(); have_unit = true; }
        else if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) { u = integer(); have_unit = true; }
        if (have_unit && !eat("*")) return sgn * u;
        if (eat("(-pi0)")) return sgn * u * qpow(-R.pi0(), exponent());
        if (eat("pi0")) return sgn * u * qpow(R.pi0(), exponent());
        fail("expected unit or pi0 power");
    }
    Mat term() {
        long r = R.pi0();
        if (eat("diag(")) {
            std::vector<mpq_class> es{entry()};
            while (eat(",")) es.push_back(entry());
            if (!eat(")")) fail("expected ')'");
            Mat m = zeros(int(es.size()), int(es.size()), r);
            for (size_t k = 0; k < es.size(); ++k) {
                if (es[k] == 0) fail("zero diagonal entry");
                m[k][k] = Ext(es[k], 0, r);
            }
            return m;
        }
        if (eat("Hodd(")) {
            long e = integer();
            if (!eat(")")) fail("expected ')'");
            if (e % 2 == 0) fail("Hodd needs an odd exponent");
            return hodd(int(e), R).m;
        }
        if (eat("H")) return hodd(-1, R).m;
        if (eat("I(")) {
            long n = integer();
            if (!eat(",")) fail("expected ','");
            long e = integer();
            if (!eat(")")) fail("expected ')'");
            return unimodular(int(n), int(e), R).m;
        }
        fail("expected diag(...), Hodd(e), H or I(n,eps)");
    }
    Mat parse() {
        Mat m = term();
        while (eat("+")) m = block_sum(m, term());
        if (i != s.size()) fail("trailing input");
        return m;
    }
};

}  // namespace

Gram parse_gram(const std::string& text, const RingConfig& R) {
    Parser ps(text, R);
    Gram g{ps.parse()};
    if (det(g.m).is_zero()) throw std::invalid_argument("degenerate gram");
    return g;
}

std::string gram_dsl(const Gram& g, const RingConfig& R) {
    (void)R;
    return mat_str(g.m);
}

// ---------------------------------------------------------------- standard lattices

Gram unimodular(int n, int eps, const RingConfig& R) {
    if (n < 0) throw std::invalid_argument("negative rank");
    if (n == 0) {
        if (eps != 1) throw std::invalid_argument("I(0,-1) does not exist");
        return Gram{};
    }
    long r = R.pi0();
    Mat m = identity(n, r);
    long sgn = (n * (n - 1) / 2) % 2 ? -1 : 1;
    if (chi(mpq_class(sgn), r, R.p) != eps) m[n - 1][n - 1] = Ext(R.nonresidue(), 0, r);
    return Gram{m};
}

Gram hodd(int e, const RingConfig& R) {
    long r = R.pi0();
    Mat m = zeros(2, 2, r);
    m[0][1] = Ext::pi_pow(r, e);
    m[1][0] = (e % 2 ? -Ext::pi_pow(r, e) : Ext::pi_pow(r, e));
    return Gram{m};
}

Gram orth(const Gram& a, const Gram& b) { return Gram{block_sum(a.m, b.m)}; }

Gram hyperbolic_sum(int n, int i, int eps, const RingConfig& R) {
    if (i < 0 || n - 2 * i < 0) throw std::invalid_argument("H^{n,i} needs 0 <= 2i <= n");
    Gram g = unimodular(n - 2 * i, eps, R);
    for (int k = 0; k < i; ++k) g = orth(hodd(-1, R), g);
    return g;
}

Gram diag_lattice(const std::vector<std::pair<mpq_class, int>>& ue, const RingConfig& R) {
    long r = R.pi0();
    Mat m = zeros(int(ue.size()), int(ue.size()), r);
    for (size_t k = 0; k < ue.size(); ++k) m[k][k] = Ext(ue[k].first * qpow(-r, ue[k].second), 0, r);
    return Gram{m};
}

// ---------------------------------------------------------------- Jordan form

JordanForm jordan_form(const Gram& L, const RingConfig& R) {
    const int p = R.p;
    const long r = R.pi0();
    int n = L.n();
    if (n > 0 && det(L.m).is_zero()) throw std::domain_error("degenerate lattice");
    JordanForm out;
    out.base = zeros(n, n, r);
    int placed = 0;

    // columns of B are the working vectors, in original coordinates
    std::vector<std::vector<Ext>> vecs;
    for (int k = 0; k < n; ++k) {
        std::vector<Ext> v(n, Ext(0, 0, r));
        v[k] = Ext(1, 0, r);
        vecs.push_back(v);
    }
    auto form = [&](const std::vector<Ext>& x, const std::vector<Ext>& y) {
        Ext s(0, 0, r);
        for (int i = 0; i < n; ++i) {
            if (x[i].is_zero()) continue;
            Ext xi = x[i].conj();
            for (int j = 0; j < n; ++j)
                if (!y[j].is_zero() && !L.m[i][j].is_zero()) s += xi * L.m[i][j] * y[j];
        }
        return s;
    };
    auto axpy = [&](std::vector<Ext>& y, const Ext& c, const std::vector<Ext>& x) {
        for (int i = 0; i < n; ++i) y[i] -= c * x[i];
    };
    auto place = [&](const std::vector<Ext>& v) {
        for (int i = 0; i < n; ++i) out.base[i][placed] = v[i];
        ++placed;
    };

    while (!vecs.empty()) {
        int m = int(vecs.size());
        std::vector<std::vector<Ext>> W(m, std::vector<Ext>(m));
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                W[i][j] = form(vecs[i], vecs[j]);
                W[j][i] = W[i][j].conj();
            }
        int vd = kInfVal, vo = kInfVal, bi = -1, oi = -1, oj = -1;
        for (int i = 0; i < m; ++i) {
            int v = val_pi(W[i][i], p);
            if (v < vd) { vd = v; bi = i; }
            for (int j = i + 1; j < m; ++j) {
                int w = val_pi(W[i][j], p);
                if (w < vo) { vo = w; oi = i; oj = j; }
            }
        }
        if (vd == kInfVal && vo == kInfVal) throw std::domain_error("degenerate lattice");
        if (vd > vo && vo % 2 == 0) {
            // v_i + v_j has norm of valuation vo
            for (int i = 0; i < n; ++i) vecs[oi][i] += vecs[oj][i];
            continue;
        }
        if (vd <= vo) {
            std::vector<Ext> e = vecs[bi];
            Ext g = W[bi][bi];
            for (int k = 0; k < m; ++k)
                if (k != bi) axpy(vecs[k], W[bi][k] / g, e);
            JordanBlock b;
            b.hyperbolic = false;
            b.exp = unit_part(g.a, r, p, b.unit);
            b.gram = Mat{{g}};
            out.blocks.push_back(b);
            place(e);
            vecs.erase(vecs.begin() + bi);
            continue;
        }
        // odd off-diagonal minimum: split a hyperbolic plane
        std::vector<Ext> e1 = vecs[oi], e2 = vecs[oj];
        Mat blk{{W[oi][oi], W[oi][oj]}, {W[oj][oi], W[oj][oj]}};
        Mat binv = inverse(blk);
        for (int k = 0; k < m; ++k) {
            if (k == oi || k == oj) continue;
            Ext c1 = binv[0][0] * W[oi][k] + binv[0][1] * W[oj][k];
            Ext c2 = binv[1][0] * W[oi][k] + binv[1][1] * W[oj][k];
            axpy(vecs[k], c1, e1);
            axpy(vecs[k], c2, e2);
        }
        JordanBlock b;
        b.hyperbolic = true;
        b.exp = vo;
        b.gram = blk;
        out.blocks.push_back(b);
        place(e1);
        place(e2);
        vecs.erase(vecs.begin() + oj);
        vecs.erase(vecs.begin() + oi);
    }

    // sort blocks by scale, permuting basis columns alongside
    std::vector<int> start;
    int pos = 0;
    for (auto& b : out.blocks) { start.push_back(pos); pos += b.hyperbolic ? 2 : 1; }
    std::vector<int> order(out.blocks.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = int(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return out.blocks[x].scale() < out.blocks[y].scale(); });
    JordanForm sorted;
    sorted.base = zeros(n, n, r);
    int col = 0;
    for (int k : order) {
        int w = out.blocks[k].hyperbolic ? 2 : 1;
        for (int c = 0; c < w; ++c, ++col)
            for (int i = 0; i < n; ++i) sorted.base[i][col] = out.base[i][start[k] + c];
        sorted.blocks.push_back(out.blocks[k]);
    }
    return sorted;
}

int sign(const Mat& g, const RingConfig& R) {
    int n = int(g.size());
    if (n == 0) return 1;
    Ext d = det(g);
    mpq_class v = d.a;
    if ((n * (n - 1) / 2) % 2) v = -v;
    return chi(v, R.pi0(), R.p);
}

LatticeInvariants invariants(const Gram& L, const RingConfig& R) {
    LatticeInvariants inv;
    JordanForm jf = jordan_form(L, R);
    for (auto& b : jf.blocks) {
        inv.fund.push_back(b.scale());
        if (b.hyperbolic) inv.fund.push_back(b.scale());
    }
    std::sort(inv.fund.begin(), inv.fund.end());
    inv.vL = inv.fund.empty() ? kInfVal : inv.fund.front();
    for (int a : inv.fund) {
        if (a >= 1) ++inv.tL;
        if (a != -1) ++inv.t_o;
    }
    inv.sign = sign(L.m, R);
    return inv;
}

Gram dual_gram(const Gram& L) {
    // dual basis b^j = sum_k c_jk b_k with C = (G^T)^{-1}; its Gram conj(C) G C^T collapses to G^{-1}
    return Gram{inverse(L.m)};
}

// ---------------------------------------------------------------- canonical forms

Mat hnf_rows(Mat rows, int p) {
    if (rows.empty()) return rows;
    int n = int(rows[0].size());
    long r = ring_of(rows);
    int k = int(rows.size());
    std::vector<int> pv(n, 0);
    int top = 0;
    for (int c = 0; c < n; ++c) {
        int best = -1, bv = kInfVal;
        for (int i = top; i < k; ++i) {
            int v = val_pi(rows[i][c], p);
            if (v < bv) { bv = v; best = i; }
        }
        if (best < 0) throw std::domain_error("rows do not span a full lattice");
        std::swap(rows[top], rows[best]);
        Ext f = Ext::pi_pow(r, bv) / rows[top][c];
        for (auto& x : rows[top]) x = x * f;
        rows[top][c] = Ext::pi_pow(r, bv);
        for (int i = top + 1; i < k; ++i) {
            if (rows[i][c].is_zero()) continue;
            Ext g = rows[i][c] / rows[top][c];
            for (int j = c; j < n; ++j) rows[i][j] -= g * rows[top][j];
            rows[i][c] = Ext(0, 0, r);
        }
        pv[c] = bv;
        ++top;
    }
    rows.resize(n);
    for (int c = 0; c < n; ++c) {
        Ext piv = rows[c][c];
        for (int i = 0; i < c; ++i) {
            Ext e = rows[i][c];
            Ext rep = reduce_mod_pi(e, p, pv[c]);
            rep.pi0 = r;
            if (rep == e) continue;
            Ext g = (e - rep) / piv;
            for (int j = c; j < n; ++j) rows[i][j] -= g * rows[c][j];
            rows[i][c] = rep;
        }
    }
    return rows;
}

std::string mat_key(const Mat& m) {
    std::string s;
    for (auto& r : m) {
        for (auto& x : r) s += x.a.get_str() + "," + x.b.get_str() + ";";
        s += "|";
    }
    return s;
}

// ---------------------------------------------------------------- superlattices

static Superlattice make_super(const Gram& L, const Mat& cols) {
    return Superlattice{cols, Gram{congruent(L.m, cols)}};
}

std::vector<Superlattice> superlattices(const Gram& L, int i, const RingConfig& R) {
    int n = L.n();
    long r = R.pi0();
    std::vector<Superlattice> out;
    Ext pinv = Ext::pi_pow(r, -1);
    for (auto& sub : fq::subspaces(n, i, R.p)) {
        Mat cols = zeros(n, n, r);
        std::vector<bool> is_piv(n, false);
        int col = 0;
        for (auto& row : sub) {
            int pc = 0;
            while (row[pc] == 0) ++pc;
            is_piv[pc] = true;
            for (int t = 0; t < n; ++t) cols[t][col] = Ext(row[t], 0, r) * pinv;
            ++col;
        }
        for (int t = 0; t < n; ++t)
            if (!is_piv[t]) cols[t][col++] = Ext(1, 0, r);
        out.push_back(make_super(L, cols));
    }
    return out;
}

std::vector<Superlattice> superlattices_where(const Gram& L, const RingConfig& R,
                                              const std::function<bool(const Mat&)>& pred,
                                              size_t budget) {
    int n = L.n();
    long r = R.pi0();
    std::vector<Superlattice> out;
    if (!pred(L.m)) return out;
    std::set<std::string> seen;
    Mat id = identity(n, r);
    seen.insert(mat_key(hnf_rows(id, R.p)));
    out.push_back(Superlattice{id, L});
    for (size_t head = 0; head < out.size(); ++head) {
        Superlattice cur = out[head];
        for (auto& step : superlattices(cur.gram, 1, R)) {
            if (!pred(step.gram.m)) continue;
            Mat cols = mul(cur.basis, step.basis);
            std::string key = mat_key(hnf_rows(transpose(cols), R.p));
            if (!seen.insert(key).second) continue;
            out.push_back(Superlattice{cols, step.gram});
            if (out.size() > budget) throw BudgetExceeded("superlattice enumeration budget exceeded");
        }
    }
    return out;
}

std::vector<Superlattice> integral_superlattices(const Gram& L, const RingConfig& R) {
    if (!is_integral(L.m, R.p)) throw std::invalid_argument("lattice is not integral");
    return superlattices_where(L, R, [&](const Mat& g) { return is_integral(g, R.p); });
}

std::vector<Superlattice> trace_integral_superlattices(const Gram& L, const RingConfig& R) {
    return superlattices_where(L, R, [&](const Mat& g) { return is_trace_integral(g, R.p); });
}

mpz_class subspace_alt_sum(int m, long q) {
    mpz_class s = 1;
    for (int i = 1; i <= m; ++i) {
        mpz_class t = ipow(q, i * (i - 1) / 2) * fq::gaussian_binomial(m, i, q);
        s += (i % 2 ? -t : t);
    }
    return s;
}

std::string isometry_key(const Gram& L, const RingConfig& R) {
    JordanForm jf = jordan_form(L, R);
    std::map<int, std::pair<int, int>> by_scale;  // scale -> (rank, unit chi product)
    for (auto& b : jf.blocks) {
        auto& e = by_scale.try_emplace(b.scale(), std::make_pair(0, 1)).first->second;
        e.first += b.hyperbolic ? 2 : 1;
        if (!b.hyperbolic) e.second *= chi(b.unit, R.pi0(), R.p);
    }
    std::string s;
    for (auto& [sc, e] : by_scale)
        s += std::to_string(sc) + ":" + std::to_string(e.first) + ":" + std::to_string(sc % 2 ? 0 : e.second) + ";";
    return s;
}

}  // namespace hkr
