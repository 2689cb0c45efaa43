// Counting oracle: |I(M, L, d)| via per-block value histograms convolved over
// the target group G = (Z/p^d)^{n^2}. Histograms are combined in the Fourier
// domain modulo several primes P = 1 mod p^d and lifted back with CRT.

#include "hkr/density.hpp"
#include "hkr/fq.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace hkr {

namespace {

using u64 = std::uint64_t;
using Hist = std::vector<u64>;

struct Setup {
    int p = 3, d = 1, n = 1;
    long N = 3;    // p^d, modulus of every coordinate of G
    long P = 9;    // p^{d+1}, working modulus for pi * Gram values
    long pi0m = 0; // pi0 mod P
    int D = 1;     // n^2 axes
    size_t S = 3;  // |G|
    std::string tag;
};

Setup make_setup(int p, int d, int n, long pi0) {
    Setup s;
    s.p = p;
    s.d = d;
    s.n = n;
    s.N = ipow(p, d).get_si();
    s.P = s.N * p;
    s.pi0m = ((pi0 % s.P) + s.P) % s.P;
    s.D = n * n;
    s.S = 1;
    for (int i = 0; i < s.D; ++i) s.S *= size_t(s.N);
    s.tag = std::to_string(p) + "/" + std::to_string(d) + "/" + std::to_string(n) + "/" + std::to_string(pi0);
    return s;
}

struct E {
    long a, b;
};

inline E emul(const E& x, const E& y, const Setup& s) {
    return E{(x.a * y.a + (x.b * y.b) % s.P * s.pi0m) % s.P, (x.a * y.b + x.b * y.a) % s.P};
}
inline E eadd(const E& x, const E& y, const Setup& s) { return E{(x.a + y.a) % s.P, (x.b + y.b) % s.P}; }
inline E econj(const E& x, const Setup& s) { return E{x.a, (s.P - x.b) % s.P}; }

E to_res(const Ext& x, const Setup& s) {
    return E{long(residue(x.a, s.p, s.d + 1).get_si()), long(residue(x.b, s.p, s.d + 1).get_si())};
}

// pi * B reduced mod p^{d+1}; B must have valuation >= -1
std::vector<std::vector<E>> scaled_block(const Mat& B, const Setup& s, long pi0) {
    std::vector<std::vector<E>> out(B.size());
    for (size_t i = 0; i < B.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j) {
            Ext v = Ext::pi(pi0) * B[i][j];
            if (!v.is_zero() && val_pi(v, s.p) < 0) throw std::domain_error("block with valuation below -1");
            out[i].push_back(to_res(v, s));
        }
    return out;
}

// Index in G of the moment data y_ij = pi * (x_i, x_j).
inline size_t g_index(const std::vector<E>& y, const Setup& s) {
    size_t idx = 0, mul = 1;
    for (int i = 0; i < s.n; ++i) {
        idx += size_t(y[i * s.n + i].b % s.N) * mul;
        mul *= size_t(s.N);
    }
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            idx += size_t(y[i * s.n + j].a % s.N) * mul;
            mul *= size_t(s.N);
            idx += size_t(y[i * s.n + j].b % s.N) * mul;
            mul *= size_t(s.N);
        }
    return idx;
}

// Rows of (O_F/pi^{2d})^n: n pairs (a, b) in [0, N)^2.
struct Rows {
    size_t count = 0;
    std::vector<E> v;        // count * n entries
    std::vector<int> red;    // reduction mod pi as an index in F_p^n
};

const Rows& all_rows(const Setup& s) {
    static std::mutex mu;
    static std::map<std::string, Rows> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(s.tag);
    if (it != cache.end()) return it->second;
    Rows r;
    r.count = 1;
    for (int i = 0; i < 2 * s.n; ++i) r.count *= size_t(s.N);
    r.v.resize(r.count * s.n);
    r.red.resize(r.count);
    for (size_t k = 0; k < r.count; ++k) {
        size_t t = k;
        int red = 0, pw = 1;
        for (int i = 0; i < s.n; ++i) {
            long a = long(t % s.N);
            t /= s.N;
            long b = long(t % s.N);
            t /= s.N;
            r.v[k * s.n + i] = E{a, b};
            red += int(a % s.p) * pw;
            pw *= s.p;
        }
        r.red[k] = red;
    }
    return cache.emplace(s.tag, std::move(r)).first->second;
}

double budget() { return enumeration_budget(); }

void check_budget(double work) {
    if (work > budget()) throw BudgetExceeded("enumeration budget exceeded");
}

std::string allowed_key(const std::vector<char>& allowed) {
    std::string k(allowed.size(), '0');
    for (size_t i = 0; i < allowed.size(); ++i) k[i] = allowed[i] ? '1' : '0';
    return k;
}

// Basis (as F_p^n index vectors) of a subspace given by its membership table.
std::vector<std::vector<int>> subspace_basis(const std::vector<char>& allowed, int n, int p) {
    auto vecs = fq::all_vectors(n, p);
    auto index = [&](const std::vector<int>& v) {
        int idx = 0, pw = 1;
        for (int i = 0; i < n; ++i) { idx += v[i] * pw; pw *= p; }
        return idx;
    };
    std::vector<char> span(allowed.size(), 0);
    span[0] = 1;
    std::vector<std::vector<int>> basis;
    for (auto& v : vecs) {
        int iv = index(v);
        if (!allowed[iv] || span[iv]) continue;
        basis.push_back(v);
        std::vector<char> nxt = span;
        for (auto& w : vecs) {
            if (!span[index(w)]) continue;
            for (int c = 1; c < p; ++c) {
                std::vector<int> z(n);
                for (int i = 0; i < n; ++i) z[i] = (w[i] + c * v[i]) % p;
                nxt[index(z)] = 1;
            }
        }
        span = nxt;
    }
    return basis;
}

Hist block_hist_uncached(const Mat& B, const Setup& s, long pi0, const std::vector<char>& allowed) {
    const Rows& rows = all_rows(s);
    int n = s.n, w = int(B.size());
    auto Bp = scaled_block(B, s, pi0);
    Hist h(s.S, 0);
    std::vector<size_t> ok;
    for (size_t r = 0; r < rows.count; ++r)
        if (allowed[rows.red[r]]) ok.push_back(r);
    std::vector<E> y(n * n);

    if (w == 1) {
        check_budget(double(ok.size()) * n * n);
        E c = Bp[0][0];
        std::vector<E> z(n);
        for (size_t r : ok) {
            const E* x = &rows.v[r * n];
            for (int j = 0; j < n; ++j) z[j] = emul(c, x[j], s);
            for (int i = 0; i < n; ++i) {
                E xi = econj(x[i], s);
                for (int j = i; j < n; ++j) y[i * n + j] = emul(xi, z[j], s);
            }
            ++h[g_index(y, s)];
        }
        return h;
    }

    bool zero_diag = B[0][0].is_zero() && B[1][1].is_zero();
    if (!zero_diag) {
        check_budget(double(ok.size()) * double(ok.size()) * n * n);
        std::vector<E> z0(n), z1(n);
        for (size_t r0 : ok) {
            const E* x0 = &rows.v[r0 * n];
            for (size_t r1 : ok) {
                const E* x1 = &rows.v[r1 * n];
                for (int j = 0; j < n; ++j) {
                    z0[j] = eadd(emul(Bp[0][0], x0[j], s), emul(Bp[0][1], x1[j], s), s);
                    z1[j] = eadd(emul(Bp[1][0], x0[j], s), emul(Bp[1][1], x1[j], s), s);
                }
                for (int i = 0; i < n; ++i) {
                    E c0 = econj(x0[i], s), c1 = econj(x1[i], s);
                    for (int j = i; j < n; ++j) y[i * n + j] = eadd(emul(c0, z0[j], s), emul(c1, z1[j], s), s);
                }
                ++h[g_index(y, s)];
            }
        }
        return h;
    }

    // Zero diagonal: for fixed x0 the moment data is additive in x1, so the
    // x1-sum is |kernel| times the indicator of the image subgroup.
    auto basis = subspace_basis(allowed, n, s.p);
    std::vector<std::vector<E>> gens;
    for (auto& v : basis) {
        std::vector<E> g(n);
        for (int i = 0; i < n; ++i) g[i] = E{v[i], 0};
        gens.push_back(g);
    }
    for (int i = 0; i < n; ++i) {
        std::vector<E> g(n, E{0, 0});
        g[i] = E{0, 1};
        gens.push_back(g);
        if (s.d > 1) {
            g[i] = E{s.p, 0};
            gens.push_back(g);
        }
    }
    // |domain| = p^{dim} * p^{(d-1) n} * p^{d n}
    double dom = std::pow(double(s.p), double(basis.size() + (s.d - 1) * n + s.d * n));
    check_budget(double(ok.size()) * double(s.S) * double(gens.size()));
    std::vector<char> mark(s.S);
    std::vector<size_t> queue;
    std::vector<size_t> img(gens.size());
    std::vector<long> coord(s.D), step(s.D);
    std::vector<size_t> radix(s.D);
    radix[0] = 1;
    for (int a = 1; a < s.D; ++a) radix[a] = radix[a - 1] * size_t(s.N);
    for (size_t r0 : ok) {
        const E* x0 = &rows.v[r0 * n];
        for (size_t g = 0; g < gens.size(); ++g) {
            const auto& x1 = gens[g];
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    E t = eadd(emul(econj(x0[i], s), emul(Bp[0][1], x1[j], s), s),
                               emul(econj(x1[i], s), emul(Bp[1][0], x0[j], s), s), s);
                    y[i * n + j] = t;
                }
            img[g] = g_index(y, s);
        }
        std::fill(mark.begin(), mark.end(), 0);
        queue.assign(1, 0);
        mark[0] = 1;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            size_t cur = queue[qi];
            for (size_t g = 0; g < gens.size(); ++g) {
                // coordinatewise addition in G
                size_t a = cur, b = img[g], sum = 0;
                for (int ax = 0; ax < s.D; ++ax) {
                    size_t da = a % size_t(s.N), db = b % size_t(s.N);
                    a /= size_t(s.N);
                    b /= size_t(s.N);
                    sum += ((da + db) % size_t(s.N)) * radix[ax];
                }
                if (!mark[sum]) {
                    mark[sum] = 1;
                    queue.push_back(sum);
                }
            }
        }
        u64 mult = u64(std::llround(dom / double(queue.size())));
        for (size_t e : queue) h[e] += mult;
    }
    return h;
}

const Hist& block_hist(const Mat& B, const Setup& s, long pi0, const std::vector<char>& allowed) {
    static std::mutex mu;
    static std::map<std::string, Hist> cache;
    std::string key = s.tag + "|" + mat_str(B) + "|" + allowed_key(allowed);
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Hist h = block_hist_uncached(B, s, pi0, allowed);
    std::lock_guard<std::mutex> lk(mu);
    return cache.emplace(key, std::move(h)).first->second;
}

// ---------------------------------------------------------------- modular Fourier transform

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

struct Prime {
    u64 P;
    u64 zeta;  // primitive N-th root of unity
};

std::vector<Prime> primes_for(long N, int p, size_t count) {
    static std::mutex mu;
    static std::map<long, std::vector<Prime>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& v = cache[N];
    u64 t = ((u64(1) << 31) - 1) / u64(N);
    if (!v.empty()) t = (v.back().P - 1) / u64(N) - 1;
    while (v.size() < count) {
        if (t == 0) throw std::runtime_error("ran out of NTT primes");
        u64 P = 1 + t * u64(N);
        --t;
        if (mpz_probab_prime_p(mpz_class(std::to_string(P)).get_mpz_t(), 30) == 0) continue;
        for (u64 g = 2;; ++g) {
            u64 z = powmod(g, (P - 1) / u64(N), P);
            if (powmod(z, u64(N / p), P) != 1) {
                v.push_back(Prime{P, z});
                break;
            }
        }
    }
    return std::vector<Prime>(v.begin(), v.begin() + count);
}

using Vec = std::vector<u64>;

Vec transform(const Hist& h, const Setup& s, const Prime& pr) {
    Vec a(h.size());
    for (size_t i = 0; i < h.size(); ++i) a[i] = h[i] % pr.P;
    size_t N = size_t(s.N);
    std::vector<u64> zp(N);
    for (size_t e = 0; e < N; ++e) zp[e] = powmod(pr.zeta, e, pr.P);
    std::vector<u64> buf(N), out(N);
    size_t stride = 1;
    for (int ax = 0; ax < s.D; ++ax) {
        for (size_t base = 0; base < a.size(); ++base) {
            if ((base / stride) % N != 0) continue;
            for (size_t j = 0; j < N; ++j) buf[j] = a[base + j * stride];
            for (size_t k = 0; k < N; ++k) {
                u64 acc = 0;
                for (size_t j = 0; j < N; ++j) acc = (acc + buf[j] * zp[(j * k) % N]) % pr.P;
                out[k] = acc;
            }
            for (size_t k = 0; k < N; ++k) a[base + k * stride] = out[k];
        }
        stride *= N;
    }
    return a;
}

const Vec& transform_cached(const Mat& B, const Setup& s, long pi0, const std::vector<char>& allowed, const Prime& pr) {
    static std::mutex mu;
    static std::map<std::string, Vec> cache;
    std::string key = s.tag + "|" + mat_str(B) + "|" + allowed_key(allowed) + "|" + std::to_string(pr.P);
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Vec v = transform(block_hist(B, s, pi0, allowed), s, pr);
    std::lock_guard<std::mutex> lk(mu);
    return cache.emplace(key, std::move(v)).first->second;
}

// Target coordinates in G, or nullopt if L cannot be represented at all.
std::optional<std::vector<long>> target_coords(const Gram& L, const Setup& s, long pi0) {
    if (!is_trace_integral(L.m, s.p)) return std::nullopt;
    std::vector<long> c;
    for (int i = 0; i < s.n; ++i) c.push_back(residue(L.m[i][i].a, s.p, s.d).get_si());
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            Ext v = Ext::pi(pi0) * L.m[i][j];
            c.push_back(residue(v.a, s.p, s.d).get_si());
            c.push_back(residue(v.b, s.p, s.d).get_si());
        }
    return c;
}

struct Subspace {
    int dim;
    std::vector<char> allowed;  // over F_p^n
};

// Subspaces of F_p^ell, lifted to membership tables on F_p^n (coordinates >= ell free).
std::vector<Subspace> lifted_subspaces(int ell, int n, int p) {
    std::vector<Subspace> out;
    auto vn = fq::all_vectors(n, p);
    for (auto& A : fq::all_subspaces(ell, p)) {
        int k = int(A.size());
        std::vector<char> inA(size_t(ipow(p, ell).get_si()), 0);
        auto combos = fq::all_vectors(k, p);
        for (auto& c : combos) {
            int idx = 0, pw = 1;
            for (int j = 0; j < ell; ++j) {
                long v = 0;
                for (int r = 0; r < k; ++r) v += long(c[r]) * A[r][j];
                idx += int(v % p) * pw;
                pw *= p;
            }
            inA[idx] = 1;
        }
        Subspace s{k, std::vector<char>(vn.size(), 0)};
        for (size_t t = 0; t < vn.size(); ++t) {
            int idx = 0, pw = 1;
            for (int j = 0; j < ell; ++j) { idx += vn[t][j] * pw; pw *= p; }
            // all_vectors is lexicographic with the first coordinate most significant
            int full = 0;
            pw = 1;
            for (int j = 0; j < n; ++j) { full += vn[t][j] * pw; pw *= p; }
            s.allowed[full] = inA[idx];
        }
        out.push_back(std::move(s));
    }
    return out;
}

mpz_class mobius(int codim, long q) {
    mpz_class r = ipow(q, codim * (codim - 1) / 2);
    return codim % 2 ? mpz_class(-r) : r;
}

u64 mpz_mod(const mpz_class& x, u64 P) {
    mpz_class r = x % mpz_class(std::to_string(P));
    if (r < 0) r += mpz_class(std::to_string(P));
    return std::stoull(r.get_str());
}

struct Combo {
    mpz_class coef;
    int stratum;
    const std::vector<char>* nonH;
    const std::vector<char>* H;
};

// counts[k index][stratum]
std::vector<std::vector<mpz_class>> count_core(const Gram& M, const std::vector<int>& ks, const Gram& L, int d,
                                               const RingConfig& R, int ell, bool stratify) {
    if (d <= 0) throw std::invalid_argument("level d must be positive");
    int n = L.n();
    int nstrata = stratify ? n + 1 : 1;
    std::vector<std::vector<mpz_class>> res(ks.size(), std::vector<mpz_class>(nstrata, 0));
    if (n == 0) {
        for (auto& r : res) r[0] = 1;
        return res;
    }
    const long pi0 = R.pi0();
    Setup s = make_setup(R.p, d, n, pi0);
    auto tgt = target_coords(L, s, pi0);
    if (!tgt) return res;

    // blocks of M, grouped
    std::map<std::string, std::pair<Mat, int>> groups;
    if (M.n() > 0) {
        JordanForm jf = jordan_form(M, R);
        for (auto& b : jf.blocks) {
            auto& g = groups[mat_str(b.gram)];
            g.first = b.gram;
            ++g.second;
        }
    }
    Mat Hm = hodd(-1, R).m;
    int kmax = 0;
    for (int k : ks) kmax = std::max(kmax, k);

    int ellp = stratify ? n : ell;
    std::vector<Subspace> As = ellp > 0 ? lifted_subspaces(ellp, n, R.p) : std::vector<Subspace>{};
    Subspace whole{n, std::vector<char>(size_t(ipow(R.p, n).get_si()), 1)};
    if (As.empty()) As.push_back(whole);

    std::vector<Subspace> Bs;
    std::vector<std::vector<char>> inter;  // storage for A cap B tables
    std::vector<Combo> combos;
    if (!stratify) {
        for (auto& A : As) combos.push_back({ellp > 0 ? mobius(ellp - A.dim, R.p) : mpz_class(1), 0, &A.allowed, &A.allowed});
    } else {
        Bs = lifted_subspaces(n, n, R.p);
        inter.reserve(As.size() * Bs.size());
        for (auto& A : As)
            for (auto& B : Bs) {
                std::vector<char> c(A.allowed.size());
                for (size_t t = 0; t < c.size(); ++t) c[t] = A.allowed[t] && B.allowed[t];
                inter.push_back(std::move(c));
                for (int i = B.dim; i <= n; ++i) {
                    int e = i - B.dim;
                    mpz_class w = fq::gaussian_binomial(n - B.dim, e, R.p) * ipow(R.p, e * (e - 1) / 2);
                    if (e % 2) w = -w;
                    combos.push_back({mobius(n - A.dim, R.p) * w, i, &A.allowed, &inter.back()});
                }
            }
    }

    // enough primes for the total number of tuples
    int mtot = M.n() + 2 * kmax;
    double bits = 2.0 * d * n * mtot * std::log2(double(R.p)) + 8 + std::log2(double(combos.size() + 1)) +
                  [&] { double m = 0; for (auto& c : combos) m = std::max(m, std::log2(std::abs(c.coef.get_d()) + 1)); return m; }();
    size_t np = size_t(std::ceil(bits / 30.0)) + 1;
    auto primes = primes_for(s.N, R.p, np);

    std::vector<std::vector<std::vector<u64>>> resid(ks.size(), std::vector<std::vector<u64>>(nstrata));
    for (const Prime& pr : primes) {
        // character of the target
        Vec chiT(s.S);
        {
            std::vector<u64> zinv(s.N);
            u64 zi = powmod(pr.zeta, u64(s.N - 1), pr.P);
            for (long e = 0; e < s.N; ++e) zinv[e] = powmod(zi, u64(e), pr.P);
            for (size_t y = 0; y < s.S; ++y) {
                size_t t = y;
                long e = 0;
                for (int ax = 0; ax < s.D; ++ax) {
                    e += long(t % size_t(s.N)) * (*tgt)[ax];
                    t /= size_t(s.N);
                }
                chiT[y] = zinv[e % s.N];
            }
        }
        std::vector<std::vector<u64>> acc(ks.size(), std::vector<u64>(nstrata, 0));
        Vec cur(s.S);
        for (auto& cb : combos) {
            std::fill(cur.begin(), cur.end(), 1);
            for (auto& [key, g] : groups) {
                const Vec& t = transform_cached(g.first, s, pi0, *cb.nonH, pr);
                for (size_t y = 0; y < s.S; ++y) {
                    u64 v = powmod(t[y], u64(g.second), pr.P);
                    cur[y] = cur[y] * v % pr.P;
                }
            }
            const Vec* th = kmax > 0 ? &transform_cached(Hm, s, pi0, *cb.H, pr) : nullptr;
            u64 coef = mpz_mod(cb.coef, pr.P);
            Vec run = cur;
            for (int k = 0; k <= kmax; ++k) {
                for (size_t ki = 0; ki < ks.size(); ++ki) {
                    if (ks[ki] != k) continue;
                    u64 sum = 0;
                    for (size_t y = 0; y < s.S; ++y) sum = (sum + run[y] * chiT[y]) % pr.P;
                    acc[ki][cb.stratum] = (acc[ki][cb.stratum] + sum * coef) % pr.P;
                }
                if (k < kmax)
                    for (size_t y = 0; y < s.S; ++y) run[y] = run[y] * (*th)[y] % pr.P;
            }
        }
        u64 invS = powmod(u64(s.S % pr.P), pr.P - 2, pr.P);
        for (size_t ki = 0; ki < ks.size(); ++ki)
            for (int st = 0; st < nstrata; ++st) resid[ki][st].push_back(acc[ki][st] * invS % pr.P);
    }

    for (size_t ki = 0; ki < ks.size(); ++ki)
        for (int st = 0; st < nstrata; ++st) {
            mpz_class x = 0, mod = 1;
            for (size_t i = 0; i < primes.size(); ++i) {
                mpz_class P(std::to_string(primes[i].P));
                mpz_class r(std::to_string(resid[ki][st][i]));
                mpz_class inv;
                mpz_class mm = mod % P;
                mpz_invert(inv.get_mpz_t(), mm.get_mpz_t(), P.get_mpz_t());
                mpz_class t = ((r - x) % P + P) % P * inv % P;
                x += mod * t;
                mod *= P;
            }
            res[ki][st] = x;
        }
    return res;
}

RepCount make_count(const mpz_class& raw, int d, int n, int m, long q) {
    RepCount c;
    c.d = d;
    c.raw = raw;
    c.normalized = mpq_class(raw) / qpow(q, d * n * (2 * m - n));
    c.normalized.canonicalize();
    return c;
}

}  // namespace

double enumeration_budget() {
    if (const char* e = std::getenv("HKR_BUDGET")) return std::atof(e);
    return 4e9;
}

Gram with_hyperbolic(const Gram& M, int k, const RingConfig& R) {
    Gram g{Mat{}};
    for (int i = 0; i < k; ++i) g = orth(g, hodd(-1, R));
    return orth(g, M);
}

RepCount count_reps(const Gram& M, const Gram& L, int d, const RingConfig& R) {
    auto c = count_core(M, {0}, L, d, R, 0, false);
    return make_count(c[0][0], d, L.n(), M.n(), R.q());
}

RepCount count_reps_primitive(const Gram& M, const Gram& L, int d, int ell, const RingConfig& R) {
    if (ell < 0 || ell > L.n()) throw std::invalid_argument("primitive length out of range");
    auto c = count_core(M, {0}, L, d, R, ell, false);
    return make_count(c[0][0], d, L.n(), M.n(), R.q());
}

std::vector<RepCount> count_reps_strata(const Gram& M, int k, const Gram& L, int d, const RingConfig& R) {
    auto c = count_core(M, {k}, L, d, R, L.n(), true);
    std::vector<RepCount> out;
    for (auto& x : c[0]) out.push_back(make_count(x, d, L.n(), M.n() + 2 * k, R.q()));
    return out;
}

// Exposed for the density polynomial fit: counts of M + H^k for each k.
std::vector<mpz_class> count_reps_series(const Gram& M, const std::vector<int>& ks, const Gram& L, int d,
                                         const RingConfig& R, int ell) {
    auto c = count_core(M, ks, L, d, R, ell, false);
    std::vector<mpz_class> out;
    for (auto& r : c) out.push_back(r[0]);
    return out;
}

RepCount count_reps_backtrack(const Gram& M, const Gram& L, int d, const RingConfig& R) {
    int n = L.n(), m = M.n();
    const long pi0 = R.pi0();
    Setup s = make_setup(R.p, d, std::max(n, 1), pi0);
    if (n == 0) return make_count(1, d, 0, m, R.q());
    auto tgt = target_coords(L, s, pi0);
    if (!tgt) return make_count(0, d, n, m, R.q());
    auto Bp = scaled_block(M.m, s, pi0);
    size_t per = 1;
    for (int i = 0; i < 2 * m; ++i) per *= size_t(s.N);
    check_budget(double(per) * n);
    std::vector<std::vector<E>> vecs(per, std::vector<E>(m)), Mx(per, std::vector<E>(m));
    for (size_t k = 0; k < per; ++k) {
        size_t t = k;
        for (int i = 0; i < m; ++i) {
            long a = long(t % s.N);
            t /= s.N;
            long b = long(t % s.N);
            t /= s.N;
            vecs[k][i] = E{a, b};
        }
        for (int i = 0; i < m; ++i) {
            E acc{0, 0};
            for (int j = 0; j < m; ++j) acc = eadd(acc, emul(Bp[i][j], vecs[k][j], s), s);
            Mx[k][i] = acc;
        }
    }
    auto pair = [&](size_t x, size_t y) {
        E acc{0, 0};
        for (int i = 0; i < m; ++i) acc = eadd(acc, emul(econj(vecs[x][i], s), Mx[y][i], s), s);
        return acc;
    };
    // coordinate offsets of the off-diagonal targets
    std::vector<std::vector<int>> off(n, std::vector<int>(n, -1));
    int pos = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) { off[i][j] = pos; pos += 2; }
    std::vector<size_t> chosen(n);
    mpz_class total = 0;
    std::function<void(int)> rec = [&](int j) {
        if (j == n) { ++total; return; }
        for (size_t x = 0; x < per; ++x) {
            E yy = pair(x, x);
            if (yy.b % s.N != (*tgt)[j]) continue;
            bool ok = true;
            for (int i = 0; i < j && ok; ++i) {
                E y = pair(chosen[i], x);
                ok = y.a % s.N == (*tgt)[off[i][j]] && y.b % s.N == (*tgt)[off[i][j] + 1];
            }
            if (!ok) continue;
            chosen[j] = x;
            rec(j + 1);
        }
    };
    rec(0);
    return make_count(total, d, n, m, R.q());
}

int stable_level(const Gram& L, const RingConfig& R) {
    if (L.n() == 0 || !is_trace_integral(L.m, R.p)) return 1;
    int mx = invariants(L, R).fund.back();
    return std::max(1, (mx + 1) / 2 + 1);
}

}  // namespace hkr
