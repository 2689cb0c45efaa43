// Local density polynomials: interpolation of oracle counts and the induction engine.

#include "hkr/density.hpp"

#include <map>
#include <stdexcept>

namespace hkr {

namespace {

mpq_class Q(long q, int e) { return qpow(q, e); }
int chi_of(const mpq_class& t, const RingConfig& R) { return chi(t, R.pi0(), R.p); }

Gram sub_gram(const Gram& L, int from, int to) {
    Gram g;
    for (int i = from; i < to; ++i) {
        g.m.emplace_back();
        for (int j = from; j < to; ++j) g.m.back().push_back(L.m[i][j]);
    }
    return g;
}

Gram blocks_gram(const std::vector<JordanBlock>& bs, size_t skip_from, size_t skip_to) {
    Gram g;
    for (size_t i = 0; i < bs.size(); ++i)
        if (i < skip_from || i >= skip_to) g = orth(g, Gram{bs[i].gram});
    return g;
}

// Unimodular M of rank m with determinant class delta (a unit).
struct UniM {
    int m = 0;
    mpq_class delta = 1;
    int chiM(const RingConfig& R) const {
        mpq_class d = (m * (m - 1) / 2) % 2 ? mpq_class(-delta) : delta;
        return chi_of(d, R);
    }
    SplitForm split() const {
        SplitForm s;
        for (int i = 0; i + 1 < m; ++i) s.unary.push_back({1, 0});
        if (m > 0) s.unary.push_back({delta, 0});
        return s;
    }
};

class Engine {
public:
    explicit Engine(const RingConfig& R) : R_(R), q_(R.q()) {}

    Poly alpha(const UniM& M, const Gram& L) {
        if (L.n() == 0) return Poly(1);
        if (M.m < 0) return Poly();
        if (!is_trace_integral(L.m, R_.p)) return Poly();
        std::string key = std::to_string(M.m) + "|" + std::to_string(chi_of(M.delta, R_)) + "|" +
                          std::to_string(R_.p) + (R_.twisted ? "t" : "s") + "|" + isometry_key(L, R_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Poly r = compute(M, L);
        memo_[key] = r;
        return r;
    }

private:
    Poly compute(const UniM& M, const Gram& L) {
        const int n = L.n(), m = M.m;
        if (n == 1) return alpha_rank1(M.split(), L.m[0][0].a, R_);
        JordanForm jf = jordan_form(L, R_);
        auto& bs = jf.blocks;
        Poly X = Poly::X();
        for (size_t i = 0; i < bs.size(); ++i)
            if (bs[i].hyperbolic && bs[i].exp == -1)
                return (Poly(1) - X) * alpha(M, blocks_gram(bs, i, i + 1)).scale_var(q_ * q_);
        for (size_t i = 0; i < bs.size(); ++i) {
            if (bs[i].hyperbolic || bs[i].exp != 0) continue;
            const mpq_class& u = bs[i].unit;
            Gram rest = blocks_gram(bs, i, i + 1);
            Poly r = (Poly(1) - X) * alpha(UniM{m + 1, -M.delta * u}, rest).scale_var(q_ * q_);
            if (m > 0) {
                mpq_class b0 = m % 2 ? mpq_class(1 + mpq_class(M.chiM(R_) * chi_of(u, R_)) * Q(q_, -(m - 1) / 2))
                                     : mpq_class(1 - mpq_class(M.chiM(R_)) * Q(q_, -m / 2));
                if (b0 != 0) r += X * alpha(UniM{m - 1, M.delta * u}, rest) * (b0 * Q(q_, n - 1));
            }
            return r;
        }
        // v(L) >= 1: split off a rank-2 piece and sum over its trace-integral superlattices
        size_t cut = 0;
        for (size_t i = 0; i < bs.size() && !cut; ++i)
            if (bs[i].hyperbolic) cut = i + 1;
        size_t lo = cut ? cut - 1 : 0, hi = cut ? cut : 2;
        Gram L1;
        for (size_t i = lo; i < hi; ++i) L1 = orth(L1, Gram{bs[i].gram});
        Gram L2 = blocks_gram(bs, lo, hi);
        Poly r;
        for (auto& sup : trace_integral_superlattices(L1, R_)) {
            int ell = -val_pi(det(sup.basis), R_.p);
            r += Poly::monomial(Q(q_, (n - m) * ell), ell) * beta2(M, sup.gram, L2);
        }
        return r;
    }

    // Primitive density with respect to the rank-2 part L1.
    Poly beta2(const UniM& M, const Gram& L1, const Gram& L2) {
        const int n = L1.n() + L2.n(), m = M.m;
        Poly X = Poly::X();
        if (min_val(L1.m, R_.p) >= 1) {
            if (L2.n() > 1) throw std::runtime_error("engine supports targets of rank <= 3");
            int chiM = M.chiM(R_);
            int de = m % 2 == 0 ? 1 : 0;
            Poly b[3];
            b[2] = closed::beta2(false, q_);
            b[1] = X * (Poly(1) - X) *
                   (q_ * (q_ + 1) * ((1 - Q(q_, 1 - m)) + mpq_class(de * chiM * (q_ - 1)) * Q(q_, -m / 2)));
            if (m % 2) b[0] = X * X * (q_ * (1 - Q(q_, 1 - m)) * (1 - Q(q_, 3 - m)));
            else
                b[0] = X * X * (q_ * ((1 - Q(q_, 2 - m)) + mpq_class(chiM * (q_ * q_ - 1)) * Q(q_, -m / 2)) *
                                (1 - Q(q_, 2 - m)));
            Gram negL1{scale(L1.m, Ext(-1))};
            SplitForm neg = SplitForm::of(negL1, R_);
            Poly r;
            for (int i = 0; i <= 2; ++i) {
                int mi = m - 2 * (2 - i);
                if (mi < 0) continue;
                Poly a(1);
                if (L2.n() == 1) {
                    UniM Mi{mi, i % 2 ? mpq_class(-M.delta) : M.delta};
                    SplitForm S = Mi.split();
                    S.unary.insert(S.unary.end(), neg.unary.begin(), neg.unary.end());
                    S.hyper = neg.hyper;
                    a = alpha_rank1(S, L2.m[0][0].a, R_).scale_var(Q(q_, 2 * i));
                }
                r += b[i] * a * Q(q_, (2 - i) * (n - 2));
            }
            return r;
        }
        Poly r = alpha(M, orth(L1, L2));
        for (int i = 1; i <= 2; ++i) {
            Poly s;
            for (auto& sup : superlattices(L1, i, R_)) s += alpha(M, orth(sup.gram, L2));
            int sg = i % 2 ? 1 : -1;
            r -= Poly::monomial(mpq_class(sg) * Q(q_, i * (i - 1) / 2 + i * (n - m)), i) * s;
        }
        return r;
    }

    RingConfig R_;
    long q_;
    std::map<std::string, Poly> memo_;
};

Engine& engine_for(const RingConfig& R) {
    static thread_local std::map<std::pair<int, bool>, Engine> engines;  // per worker: memo_ is unsynchronized
    auto key = std::make_pair(R.p, R.twisted);
    auto it = engines.find(key);
    if (it == engines.end()) it = engines.emplace(key, Engine(R)).first;
    return it->second;
}

}  // namespace

// ------------------------------------------------------------ oracle fit

AlphaFit alpha_poly_fit(const Gram& M, const Gram& L, const RingConfig& R, int primitive_ell) {
    AlphaFit fit;
    const int n = L.n(), m = M.n();
    const long q = R.q();
    if (n == 0) {
        fit.poly = Poly(1);
        return fit;
    }
    if (!is_trace_integral(L.m, R.p)) return fit;
    int mx = std::max(0, invariants(L, R).fund.back());
    int D = n * (mx + 2);
    int d = stable_level(L, R);
    fit.level = d;
    for (int attempt = 0; attempt < 3; ++attempt, D += n) {
        std::vector<int> ks;
        for (int k = 0; k <= D + 1; ++k) ks.push_back(k);
        auto raws = count_reps_series(M, ks, L, d, R, primitive_ell);
        std::vector<mpq_class> xs, ys;
        for (int k = 0; k <= D + 1; ++k) {
            xs.push_back(Q(q, -2 * k));
            mpq_class y = mpq_class(raws[k]) / Q(q, d * n * (2 * (m + 2 * k) - n));
            y.canonicalize();
            ys.push_back(y);
        }
        Poly hi = interpolate(xs, ys);
        xs.pop_back();
        ys.pop_back();
        Poly lo = interpolate(xs, ys);
        if (hi == lo) {
            fit.poly = lo;
            fit.degree_cap = D;
            return fit;
        }
    }
    throw std::runtime_error("density polynomial did not stabilize within the degree cap");
}

Poly alpha_poly(const Gram& M, const Gram& L, const RingConfig& R) { return alpha_poly_fit(M, L, R).poly; }

mpq_class alpha_prime(const Poly& a) { return a.derivative_at_one(); }

// ------------------------------------------------------------ engine entry points

Poly alpha_engine(const Gram& M, const Gram& L, const RingConfig& R) {
    if (L.n() == 0) return Poly(1);
    if (!is_trace_integral(L.m, R.p)) return Poly();
    int k0 = 0;
    bool unimodular = true;
    UniM U;
    if (M.n() > 0)
        for (auto& b : jordan_form(M, R).blocks) {
            if (b.hyperbolic && b.exp == -1) ++k0;
            else if (!b.hyperbolic && b.exp == 0) {
                ++U.m;
                U.delta *= b.unit;
            } else unimodular = false;
        }
    if (unimodular) {
        U.delta = chi_of(U.delta, R) == 1 ? mpq_class(1) : mpq_class(R.nonresidue());
        return engine_for(R).alpha(U, L).scale_var(Q(R.q(), -2 * k0));
    }
    if (L.n() == 1) return alpha_rank1(SplitForm::of(M, R), L.m[0][0].a, R);
    throw std::invalid_argument("engine needs M = H^k + unimodular or a rank-1 target");
}

Poly beta_prim_poly(const Gram& M, const Gram& L, int n1, const RingConfig& R) {
    const int n = L.n(), m = M.n();
    if (n1 < 0 || n1 > n) throw std::invalid_argument("primitive rank out of range");
    Gram L1 = sub_gram(L, 0, n1), L2 = sub_gram(L, n1, n);
    Poly r = alpha_engine(M, L, R);
    for (int i = 1; i <= n1; ++i) {
        Poly s;
        for (auto& sup : superlattices(L1, i, R)) s += alpha_engine(M, orth(sup.gram, L2), R);
        int sg = i % 2 ? 1 : -1;
        r -= Poly::monomial(mpq_class(sg) * Q(R.q(), i * (i - 1) / 2 + i * (n - m)), i) * s;
    }
    return r;
}

}  // namespace hkr
