#include "hkr/kr.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace hkr {

int correction_rank(int n, int eps) {
    if (n <= 0) return 0;
    if (n % 2) return (n - 1) / 2;
    return (n + eps) / 2;
}

mpq_class isotropic_product(int n, int d, int k, long q) {
    mpq_class r = 1;
    for (int s = 1; s <= k; ++s) r *= (qpow(q, d - s + 1) - 1) * (qpow(q, n - d - s) + 1) / (qpow(q, s) - 1);
    return r;
}

namespace {

mpq_class diag_entry(int n, int j, int eps, long q) {
    mpq_class hyp = 1;
    for (int s = 1; s <= j; ++s) hyp *= 1 - qpow(q, -2 * s);
    int w = n - 2 * j;
    if (w == 0) return hyp;  // alpha(H^j, H^j)
    mpq_class r = 2 * qpow(q, w * (w - 1) / 2) * hyp;
    for (int s = 1; s <= (w - 1) / 2; ++s) r *= 1 - qpow(q, -2 * s);
    if (n % 2 == 0) r *= 1 - eps * qpow(q, -w / 2);
    return r;
}

mpq_class offdiag_ratio(int n, int i, int j, int eps, long q) {
    int w = n - 2 * i;
    int d = n % 2 ? (w - 1) / 2 : (w - 1 + eps) / 2;
    return isotropic_product(w, d, j - i, q);
}

}  // namespace

void solve_system(CoefficientTable& t) {
    int r = int(t.B.size());
    t.C.assign(r, 0);
    for (int i = r - 1; i >= 0; --i) {
        mpq_class s = -2 * t.B[i];
        for (int j = i + 1; j < r; ++j) s -= t.A[i][j] * t.C[j];
        if (t.A[i][i] == 0) throw std::runtime_error("singular coefficient system");
        t.C[i] = s / t.A[i][i];
    }
}

CoefficientTable build_system(int n, int eps, const RingConfig& R) {
    CoefficientTable t;
    t.n = n;
    t.eps = eps;
    t.q = R.q();
    int r = correction_rank(n, eps);
    t.A.assign(r, std::vector<mpq_class>(r, 0));
    for (int j = 1; j <= r; ++j) {
        t.A[j - 1][j - 1] = diag_entry(n, j, eps, t.q);
        for (int i = 1; i < j; ++i) t.A[i - 1][j - 1] = t.A[j - 1][j - 1] * offdiag_ratio(n, i, j, eps, t.q);
    }
    Gram I = unimodular(n, -eps, R);
    for (int j = 1; j <= r; ++j) t.B.push_back(alpha_prime(alpha_engine(I, hyperbolic_sum(n, j, eps, R), R)));
    return t;
}

CoefficientTable build_system_with(int n, int eps, const RingConfig& R,
                                   const std::function<Poly(const Gram&, const Gram&)>& alpha) {
    CoefficientTable t;
    t.n = n;
    t.eps = eps;
    t.q = R.q();
    int r = correction_rank(n, eps);
    t.A.assign(r, std::vector<mpq_class>(r, 0));
    for (int i = 1; i <= r; ++i)
        for (int j = i; j <= r; ++j)
            t.A[i - 1][j - 1] = alpha(hyperbolic_sum(n, j, eps, R), hyperbolic_sum(n, i, eps, R))(1);
    Gram I = unimodular(n, -eps, R);
    for (int j = 1; j <= r; ++j) t.B.push_back(alpha_prime(alpha(I, hyperbolic_sum(n, j, eps, R))));
    return t;
}

const CoefficientTable& coeffs(int n, int eps, const RingConfig& R) {
    static thread_local std::map<std::tuple<int, bool, int, int>, CoefficientTable> cache;
    auto key = std::make_tuple(R.p, R.twisted, n, eps);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    CoefficientTable t = build_system(n, eps, R);
    solve_system(t);
    return cache.emplace(key, std::move(t)).first->second;
}

mpq_class pden(const Gram& L, const RingConfig& R) {
    const int n = L.n();
    if (n == 0) throw std::invalid_argument("pden needs a nonzero rank");
    if (!is_trace_integral(L.m, R.p)) return 0;
    int eps = sign(L.m, R);
    Gram I = unimodular(n, -eps, R);
    const CoefficientTable& t = coeffs(n, eps, R);
    mpq_class num = 2 * alpha_prime(alpha_engine(I, L, R));
    for (size_t i = 0; i < t.C.size(); ++i)
        num += t.C[i] * alpha_engine(hyperbolic_sum(n, int(i) + 1, eps, R), L, R)(1);
    mpq_class den = alpha_engine(I, I, R)(1);
    return num / den;
}

mpq_class pden_prim(const Gram& L, int n1, const RingConfig& R) {
    const int n = L.n();
    if (n1 < 0 || n1 > n) throw std::invalid_argument("primitive rank out of range");
    Gram L1, L2;
    for (int i = 0; i < n; ++i) {
        auto& dst = i < n1 ? L1 : L2;
        dst.m.emplace_back();
        for (int j = 0; j < n; ++j)
            if ((j < n1) == (i < n1)) dst.m.back().push_back(L.m[i][j]);
    }
    mpq_class r = pden(L, R);
    for (int i = 1; i <= n1; ++i) {
        mpq_class s = 0;
        for (auto& sup : superlattices(L1, i, R)) s += pden(orth(sup.gram, L2), R);
        mpq_class w = qpow(R.q(), i * (i - 1) / 2);
        r -= (i % 2 ? w : mpq_class(-w)) * s;
    }
    return r;
}

}  // namespace hkr
