// Vertex lattices of the rank-3 building, supports of special cycles and intersection numbers.

#include "hkr/tree.hpp"

#include <deque>
#include <stdexcept>

namespace hkr::tree {

namespace {

Ext zero(long r) { return Ext(0, 0, r); }
Ext one(long r) { return Ext(1, 0, r); }

Vec column(const Mat& m, int j) {
    Vec v;
    for (auto& row : m) v.push_back(row[j]);
    return v;
}

Mat from_columns(const std::vector<Vec>& cols, int rank, long r) {
    Mat m = zeros(rank, int(cols.size()), r);
    for (size_t j = 0; j < cols.size(); ++j)
        for (int i = 0; i < rank; ++i) m[i][j] = cols[j][i];
    return m;
}

Vec mat_vec(const Mat& a, const Vec& x, long r) {
    Vec y(a.size(), zero(r));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j)
            if (!a[i][j].is_zero() && !x[j].is_zero()) y[i] += a[i][j] * x[j];
    return y;
}

// cross product: w with r1.w = r2.w = 0 (bilinear)
Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Mat jordan_gram(const JordanForm& jf) {
    Mat g;
    for (auto& b : jf.blocks) g = block_sum(g, b.gram);
    return g;
}

// unit w in {1, s} making chi(g + <w>) = +1
Mat complete_plus(const Mat& g, const RingConfig& R) {
    long r = R.pi0();
    for (long w : {1L, R.nonresidue()}) {
        Mat phi = block_sum(g, Mat{{Ext(w, 0, r)}});
        if (sign(phi, R) == 1) return phi;
    }
    throw std::logic_error("no unit completes the space to sign +1");
}

}  // namespace

Ext AmbientSpace::form(const Vec& x, const Vec& y) const {
    long r = R.pi0();
    Ext s = zero(r);
    for (int i = 0; i < rank; ++i) {
        if (x[i].is_zero()) continue;
        Ext xi = x[i].conj();
        for (int j = 0; j < rank; ++j)
            if (!y[j].is_zero() && !phi[i][j].is_zero()) s += xi * phi[i][j] * y[j];
    }
    return s;
}

AmbientSpace embed(const Gram& L, const RingConfig& R, int ambient_rank) {
    const int n = L.n();
    const long r = R.pi0();
    if (ambient_rank < 2 || ambient_rank > 3 || n < 1 || n > ambient_rank)
        throw std::invalid_argument("embed supports rank <= 3 into a rank 2 or 3 space");
    if (det(L.m).is_zero()) throw std::domain_error("degenerate lattice");
    AmbientSpace V;
    V.rank = ambient_rank;
    V.R = R;
    if (n == 1) {
        // <t> sits in an H-block as v1 + (t pi / 2) v2
        Ext t = L.m[0][0];
        Mat h = hodd(-1, R).m;
        V.phi = ambient_rank == 3 ? complete_plus(h, R) : h;
        V.lattice = zeros(ambient_rank, 1, r);
        V.lattice[0][0] = one(r);
        V.lattice[1][0] = t * Ext(0, mpq_class(1, 2), r);
    } else {
        JordanForm jf = jordan_form(L, R);
        Mat g = jordan_gram(jf);
        V.phi = n < ambient_rank ? complete_plus(g, R) : g;
        Mat back = inverse(jf.base);
        V.lattice = zeros(ambient_rank, n, r);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) V.lattice[i][j] = back[i][j];
    }
    if (V.gram_of(V.lattice) != L.m) throw std::logic_error("embedding is not isometric");
    return V;
}

bool is_vertex(const Mat& cols, const AmbientSpace& V, int* type) {
    Mat G = V.gram_of(cols);
    Ext d = det(G);
    if (d.is_zero()) return false;
    if (min_val(G, V.R.p) < -1) return false;             // pi L ⊆ L^#
    if (!is_integral(inverse(G), V.R.p)) return false;    // L^# ⊆ L
    if (type) *type = -val_pi(d, V.R.p);
    return true;
}

VertexLattice make_vertex(const Mat& cols, const AmbientSpace& V) {
    Mat rows = hnf_rows(transpose(cols), V.R.p);
    VertexLattice L;
    L.basis = transpose(rows);
    L.key = mat_key(rows);
    L.p = V.R.p;
    if (!is_vertex(L.basis, V, &L.type)) L.type = -1;
    else L.inv = inverse(L.basis);
    return L;
}

Mat dual_basis(const Mat& basis, const AmbientSpace& V) { return mul(basis, inverse(V.gram_of(basis))); }

bool member(const Vec& x, const VertexLattice& L) {
    for (auto& row : L.inv) {
        Ext s;
        for (size_t j = 0; j < x.size(); ++j)
            if (!row[j].is_zero() && !x[j].is_zero()) s += row[j] * x[j];
        if (!s.is_zero() && val_pi(s, L.p) < 0) return false;
    }
    return true;
}

bool in_dual(const Mat& gens, const VertexLattice& L, const AmbientSpace& V) {
    return is_integral(mul(mul(adjoint(L.basis), V.phi), gens), V.R.p);
}

std::vector<VertexLattice> neighbors(const VertexLattice& L, const AmbientSpace& V) {
    if (L.type != 0 && L.type != 2) throw std::invalid_argument("not a vertex lattice of type 0 or 2");
    const int n = V.rank, p = V.R.p;
    const long r = V.R.pi0();
    std::vector<VertexLattice> out;
    std::vector<std::string> keys;
    Mat dual = L.type == 2 ? dual_basis(L.basis, V) : Mat{};
    Ext pinv = Ext::pi_pow(r, -1);
    // projective representatives of (O/pi)^n in the coordinates of L
    std::vector<int> c(n, 0);
    for (int lead = 0; lead < n; ++lead) {
        std::fill(c.begin(), c.end(), 0);
        c[lead] = 1;
        long total = 1;
        for (int i = lead + 1; i < n; ++i) total *= p;
        for (long code = 0; code < total; ++code) {
            long t = code;
            for (int i = lead + 1; i < n; ++i, t /= p) c[i] = int(t % p);
            Vec coef;
            for (int i = 0; i < n; ++i) coef.push_back(Ext(c[i], 0, r));
            Vec w = mat_vec(L.basis, coef, r);
            std::vector<Vec> cols;
            if (L.type == 2) {
                for (int j = 0; j < n; ++j) cols.push_back(column(dual, j));
                cols.push_back(w);
            } else {
                if (val_pi(V.form(w, w), p) < 1) continue;  // isotropic lines mod pi only
                for (int j = 0; j < n; ++j) cols.push_back(column(L.basis, j));
                for (auto& e : w) e = e * pinv;
                cols.push_back(w);
            }
            VertexLattice N = make_vertex(from_columns(cols, n, r), V);
            if (N.type != 2 - L.type) continue;
            bool dup = false;
            for (auto& k : keys) dup = dup || k == N.key;
            if (dup) continue;
            keys.push_back(N.key);
            out.push_back(std::move(N));
        }
    }
    return out;
}

int int_pairing(const Vec& x, const VertexLattice& L, const AmbientSpace&) {
    if (!member(x, L)) return 0;
    return L.type == 2 ? 1 : -1;
}

size_t SupportSet::boundary_count() const {
    size_t k = 0;
    for (bool b : boundary) k += b;
    return k;
}

size_t SupportSet::skeleton_count() const {
    size_t k = 0;
    for (bool b : skel0) k += b;
    for (bool b : skel2) k += b;
    return k;
}

const std::vector<VertexLattice>& Explorer::nbrs(const VertexLattice& L) {
    auto it = cache_.find(L.key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(L.key, neighbors(L, V_)).first->second;
}

VertexLattice Explorer::start_vertex(const Mat& gens) {
    const long r = V_.R.pi0();
    const int m = gens.empty() ? 0 : int(gens[0].size());
    Gram g{V_.gram_of(gens)};
    JordanForm jf = jordan_form(g, V_.R);
    Mat vecs = mul(gens, jf.base);
    std::vector<Vec> cols;
    int col = 0;
    for (auto& b : jf.blocks) {
        int e = b.hyperbolic ? -(b.exp + 1) / 2 : -b.exp;
        Ext s = Ext::pi_pow(r, e);
        for (int k = 0; k < (b.hyperbolic ? 2 : 1); ++k, ++col) {
            Vec v = column(vecs, col);
            for (auto& x : v) x = x * s;
            cols.push_back(v);
        }
    }
    if (m + 1 == V_.rank) {
        std::vector<Vec> rows;
        for (int j = 0; j < m; ++j) {
            Vec gj = column(gens, j), row(V_.rank, zero(r));
            for (int i = 0; i < V_.rank; ++i)
                for (int k = 0; k < V_.rank; ++k) row[k] += gj[i].conj() * V_.phi[i][k];
            rows.push_back(row);
        }
        Vec w = V_.rank == 3 ? cross(rows[0], rows[1]) : Vec{-rows[0][1], rows[0][0]};
        Ext t = V_.form(w, w);
        int k = val_pi(t, V_.R.p) / 2;
        for (auto& x : w) x = x * Ext::pi_pow(r, -k);
        cols.push_back(w);
    } else if (m != V_.rank) {
        throw std::invalid_argument("support needs a lattice of corank 0 or 1");
    }
    VertexLattice L = make_vertex(from_columns(cols, V_.rank, r), V_);
    if (L.type < 0 || !in_dual(gens, L, V_)) throw std::logic_error("scaled Jordan basis is not a valid start");
    return L;
}

SupportSet Explorer::support(const Mat& gens, bool with_skeleton) {
    const long r = V_.R.pi0();
    Gram g{V_.gram_of(gens)};
    if (!is_integral(g.m, V_.R.p)) throw std::invalid_argument("support needs an integral lattice");
    LatticeInvariants inv = invariants(g, V_.R);
    const int limit = std::max(0, inv.fund.back()) + 2;  // half-edges: 2 * (max fund / 2 + 1)

    struct Node {
        VertexLattice L;
        int depth;
    };
    std::vector<Node> nodes;
    std::map<std::string, int> index;
    SupportSet S;
    VertexLattice start = start_vertex(gens);
    index[start.key] = 0;
    nodes.push_back({start, 0});
    std::map<std::string, bool> outside;
    for (size_t head = 0; head < nodes.size(); ++head) {
        Node cur = nodes[head];
        if (cur.depth > limit) throw std::runtime_error("support exceeds the radius bound");
        S.depth = std::max(S.depth, cur.depth);
        for (auto& N : nbrs(cur.L)) {
            if (index.count(N.key) || outside.count(N.key)) continue;
            if (in_dual(gens, N, V_)) {
                index[N.key] = int(nodes.size());
                nodes.push_back({N, cur.depth + 1});
            } else {
                outside[N.key] = true;
            }
        }
    }
    S.frontier = outside.size();

    std::map<std::string, int> pos0;
    for (auto& nd : nodes)
        if (nd.L.type == 0) {
            pos0[nd.L.key] = int(S.v0.size());
            S.v0.push_back(nd.L);
        } else {
            S.v2.push_back(nd.L);
        }
    S.deg0.assign(S.v0.size(), 0);
    S.boundary.assign(S.v0.size(), false);
    for (auto& L2 : S.v2) {
        std::vector<int> sub;
        for (auto& N : nbrs(L2)) {
            auto it = pos0.find(N.key);
            if (it == pos0.end()) throw std::logic_error("type-0 sublattice of a member is not a member");
            sub.push_back(it->second);
            ++S.deg0[it->second];
        }
        S.inc.push_back(sub);
    }
    for (size_t i = 0; i < S.v0.size(); ++i) S.boundary[i] = S.deg0[i] < int(nbrs(S.v0[i]).size());

    S.skel0.assign(S.v0.size(), false);
    S.skel2.assign(S.v2.size(), false);
    int m = gens.empty() ? 0 : int(gens[0].size());
    if (with_skeleton && m == 2 && inv.fund[0] % 2 == 0) {
        Mat core = scale(gens, Ext::pi_pow(r, -inv.fund[0] / 2));
        for (size_t i = 0; i < S.v0.size(); ++i) S.skel0[i] = in_dual(core, S.v0[i], V_);
        for (size_t i = 0; i < S.v2.size(); ++i) S.skel2[i] = in_dual(core, S.v2[i], V_);
    }
    return S;
}

SupportSet enumerate_support(const Gram& Lflat, const RingConfig& R, int ambient_rank) {
    if (Lflat.n() != 2) throw std::invalid_argument("enumerate_support expects a rank-2 lattice");
    if (!is_integral(Lflat.m, R.p)) throw std::invalid_argument("enumerate_support needs an integral lattice");
    AmbientSpace V = embed(Lflat, R, ambient_rank);
    Explorer ex(V);
    return ex.support(V.lattice);
}

SupportCounts counts_of(const SupportSet& s) {
    return {long(s.v0.size()), long(s.v2.size()), long(s.boundary_count()), long(s.skeleton_count())};
}

SupportCounts support_counts_closed(const Gram& Lflat, const RingConfig& R, int chiV) {
    if (Lflat.n() != 2 || !is_integral(Lflat.m, R.p)) throw std::invalid_argument("need an integral rank-2 lattice");
    const long q = R.q();
    auto pw = [&](int e) { return e < 0 ? 0L : ipow(q, unsigned(e)).get_si(); };
    JordanForm jf = jordan_form(Lflat, R);
    SupportCounts c;
    if (jf.blocks.size() == 1) {
        // H_{2a+1}: ball of radius (2a+1)/2 around a type-2 vertex
        int a = (jf.blocks[0].exp - 1) / 2;
        c.v2 = 1;
        for (int j = 1; j <= a; ++j) c.v2 += (q + 1) * pw(2 * j - 1);
        for (int j = 0; j <= a; ++j) c.v0 += (q + 1) * pw(2 * j);
        c.boundary = (q + 1) * pw(2 * a);
        return c;
    }
    int a = jf.blocks[0].exp, b = jf.blocks[1].exp;
    int x1 = chiV * chi(jf.blocks[0].unit, R.pi0(), R.p);  // +1 iff x1^perp is split
    int rr = (a == b || x1 == -1) ? 0 : b - a;
    // skeleton: type-0 center (rr = 0) or a ball of radius rr in the embedded rank-2 tree
    long s0 = 1, s2 = 0, out = q + 1;
    if (rr > 0) {
        for (int j = 1; j <= rr; ++j) s0 += 2 * pw(j);
        for (int j = 0; j < rr; ++j) s2 += 2 * pw(j);
        out = (q - 1) * (s0 - 2 * pw(rr)) + q * 2 * pw(rr);
    }
    c.skeleton = s0 + s2;
    c.v0 = s0;
    c.v2 = s2;
    for (int k = 1; k <= 2 * a; ++k) (k % 2 ? c.v2 : c.v0) += out * pw(k - 1);
    c.boundary = a == 0 ? s0 : out * pw(2 * a - 1);
    return c;
}

mpz_class mu(int a, int b, long q) {
    if (a < 0) return 0;
    mpz_class s = 0;
    for (int k = 0; k <= a; ++k) s += ipow(q, unsigned(k)) * (a + b + 1 - 2 * k);
    return 2 * s - a - b - 2;
}

mpz_class int_prim2(Explorer& ex, const Mat& Lflat, const Vec& x) {
    if (min_val(ex.space().gram_of(Lflat), ex.space().R.p) <= 0)
        throw std::invalid_argument("int_prim2 needs v(Lflat) > 0");
    SupportSet S = ex.support(Lflat, false);
    mpz_class total = 0;
    for (size_t i = 0; i < S.v2.size(); ++i) {
        if (member(x, S.v2[i])) total += 2;
        for (int j : S.inc[i])
            if (member(x, S.v0[j])) total -= 1;
    }
    return total;
}

mpz_class int_prim2(const Gram& L, const RingConfig& R) {
    if (L.n() != 3) throw std::invalid_argument("int_prim2 expects rank 3");
    AmbientSpace V = embed(L, R);
    Explorer ex(V);
    Mat flat = zeros(3, 2, R.pi0());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) flat[i][j] = V.lattice[i][j];
    return int_prim2(ex, flat, column(V.lattice, 2));
}

namespace {

mpz_class as_integer(const mpq_class& v, const char* what) {
    if (v.get_den() != 1) throw std::runtime_error(std::string(what) + " is not an integer: " + v.get_str());
    return v.get_num();
}

}  // namespace

IntReport int_total_report(const Gram& L, const RingConfig& R) {
    if (L.n() != 3) throw std::invalid_argument("int_total expects rank 3");
    const long r = R.pi0();
    IntReport rep;
    if (!is_integral(L.m, R.p)) {
        rep.route = "negative";
        rep.value = 0;
        return rep;
    }
    AmbientSpace V = embed(L, R);  // ambient basis = Jordan basis of L
    JordanForm jf = jordan_form(L, R);
    // column ranges of the diagonal blocks
    std::vector<std::pair<int, const JordanBlock*>> diag;
    int col = 0;
    for (auto& b : jf.blocks) {
        if (!b.hyperbolic) diag.push_back({col, &b});
        col += b.hyperbolic ? 2 : 1;
    }
    if (diag.empty()) throw std::logic_error("rank-3 lattice without a diagonal Jordan block");
    Mat id = identity(3, r);
    auto rest_of = [&](int skip) {
        Mat m = zeros(3, 2, r);
        for (int i = 0, j = 0; i < 3; ++i)
            if (i != skip) {
                for (int k = 0; k < 3; ++k) m[k][j] = id[k][i];
                ++j;
            }
        return m;
    };
    Explorer ex(V);
    if (min_val(L.m, R.p) == 0) {
        // unit vector x1: Int(L) = Int(L2) + |V^0(L)| with Int(L2) from the proven n = 2 identity
        int x1 = -1;
        for (auto& [c, b] : diag)
            if (b->exp == 0 && x1 < 0) x1 = c;
        if (x1 < 0) throw std::logic_error("v(L) = 0 without a unit diagonal block");
        Gram T2{V.gram_of(rest_of(x1))};
        SupportSet S = ex.support(id, false);
        rep.route = "unit-split";
        rep.v0_count = long(S.v0.size());
        rep.bridge_terms = 1;
        rep.value = as_integer(pden(T2, R), "n = 2 derived density") + rep.v0_count;
        return rep;
    }
    // x: a diagonal vector of maximal valuation; Lflat its complement
    auto best = diag.front();
    for (auto& d : diag)
        if (d.second->exp >= best.second->exp) best = d;
    int xi = best.first;
    Vec x = column(id, xi);
    Mat flat = rest_of(xi);
    Gram G{V.gram_of(flat)};
    Ext xx = V.form(x, x);
    mpq_class sum = 0;
    for (auto& sup : integral_superlattices(G, R)) {
        Mat cols = mul(flat, sup.basis);
        if (min_val(sup.gram.m, R.p) > 0) {
            sum += mpq_class(int_prim2(ex, cols, x));
            ++rep.geometric_terms;
        } else {
            Gram Lp = orth(sup.gram, Gram{Mat{{xx}}});
            sum += pden_prim(Lp, 2, R);
            ++rep.bridge_terms;
        }
    }
    rep.route = "superlattice-sum";
    rep.value = as_integer(sum, "intersection number");
    return rep;
}

mpz_class int_total(const Gram& L, const RingConfig& R) { return int_total_report(L, R).value; }

}  // namespace hkr::tree
