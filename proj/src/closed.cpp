// Closed-form density polynomials, primitive-density factors and residue-field counts.

#include "hkr/density.hpp"
#include "hkr/fq.hpp"

#include <stdexcept>

namespace hkr {

namespace {

Poly X() { return Poly::X(); }
Poly c(const mpq_class& v) { return Poly(v); }
Poly mono(const mpq_class& v, int e) { return Poly::monomial(v, e); }
mpq_class Q(long q, int e) { return qpow(q, e); }

Poly geometric(const Poly& y, int from, int to) {
    Poly s, p(1);
    for (int i = 0; i < from; ++i) p = p * y;
    for (int i = from; i <= to; ++i) {
        s += p;
        p = p * y;
    }
    return s;
}

int chi_of(const mpq_class& t, const RingConfig& R) { return chi(t, R.pi0(), R.p); }

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("formula hypothesis violated: ") + what);
}

}  // namespace

SplitForm SplitForm::of(const Gram& M, const RingConfig& R) {
    SplitForm s;
    if (M.n() == 0) return s;
    for (auto& b : jordan_form(M, R).blocks) {
        if (b.hyperbolic) s.hyper.push_back(b.exp);
        else s.unary.push_back({b.unit, b.exp});
    }
    return s;
}

Poly alpha_rank1(const SplitForm& S, const mpq_class& t, const RingConfig& R) {
    if (t == 0) throw std::invalid_argument("rank-1 target must be nonzero");
    const long q = R.q();
    mpq_class t0;
    int v = unit_part(t, R.pi0(), R.p, t0);
    if (v < 0) return Poly();
    int chim1 = chi_of(-1, R);
    Poly a(1);
    for (int s = 1; s <= v + 1; ++s) {
        mpq_class coef = Q(q, s);
        for (int j : S.hyper) coef *= Q(q, -std::max(0, 2 * s - 1 - j));
        int N = 0;
        for (auto& [u, cl] : S.unary)
            if (cl < s) {
                ++N;
                coef *= Q(q, cl - s) * chi_of(-u, R);
            }
        mpq_class g2 = mpq_class(chim1 * q);
        if (N % 2 == 0) {
            for (int i = 0; i < N / 2; ++i) coef *= g2;
            mpq_class ind = mpq_class(v >= s ? 1 : 0) - mpq_class(v >= s - 1 ? 1 : 0) / q;
            coef *= ind;
        } else {
            for (int i = 0; i < (N + 1) / 2; ++i) coef *= g2;
            coef *= mpq_class(v == s - 1 ? chi_of(t0, R) : 0) / q;
        }
        a += mono(coef, s);
    }
    return a;
}

namespace closed {

Poly rank1_sab(int m, int chiS, const mpq_class& nu1, int a, const mpq_class& nu2, int b, const mpq_class& t,
               const RingConfig& R) {
    const long q = R.q();
    mpq_class t0;
    int v = unit_part(t, R.pi0(), R.p, t0);
    require(0 <= a && a <= b && b <= v, "0 <= a <= b <= v(t)");
    require(m >= 1, "m >= 1");
    // chi(S_{a,b}) from chi(S) and the two extra units
    int e1 = (m * (m - 1) / 2) % 2, e2 = ((m + 2) * (m + 1) / 2) % 2;
    int chiSab = chiS * chi_of(nu1 * nu2, R) * ((e1 + e2) % 2 ? chi_of(-1, R) : 1);
    Poly r(1);
    if (m % 2) {
        for (int s = a + 1; s <= b; ++s)
            r += mono(mpq_class(chiS * chi_of(-nu1, R) * (q - 1)) * Q(q, -m * s + a + (m - 1) / 2), s);
        r += mono(mpq_class(chiSab * chi_of(t0, R)) * Q(q, -(m + 1) * v + a + b - (m + 1) / 2), v + 1);
    } else {
        for (int s = 1; s <= a; ++s) r += mono(mpq_class(chiS * (q - 1)) * Q(q, -(m - 1) * s + m / 2 - 1), s);
        Poly inner;
        for (int s = b + 1; s <= v; ++s) inner += mono(mpq_class(q - 1) * Q(q, -(m + 1) * s + m / 2), s);
        inner -= mono(Q(q, -(m + 1) * v - 1 - m / 2), v + 1);
        r += inner * (mpq_class(chiSab) * Q(q, a + b));
    }
    return r;
}

Poly rank1_hyp(int m, int chiS, int i, const mpq_class& t, const RingConfig& R) {
    require(m % 2 == 1, "S of odd rank");
    const long q = R.q();
    mpq_class t0;
    int v = unit_part(t, R.pi0(), R.p, t0);
    require(v >= 0, "v(t) >= 0");
    int e = i <= 2 * v ? -(v + 1) * (m + 1) + (m + 1) / 2 + i : -(v + 1) * (m - 1) + (m - 1) / 2;
    return Poly(1) + mono(mpq_class(chiS * chi_of(t0, R)) * Q(q, e), v + 1);
}

Poly rank2_even(int m, int chiS, int a, int b, int chiT, const RingConfig& R) {
    require(m >= 2 && m % 2 == 0 && 0 <= a && a <= b, "even m >= 2, 0 <= a <= b");
    require(!(m == 2 && chiS == -1), "S isotropic");
    const long q = R.q();
    Poly Y = X() * Q(q, 2 - m), Z = X() * Q(q, 1 - m);
    auto pw = [](const Poly& p, int e) { Poly r(1); for (int i = 0; i < e; ++i) r = r * p; return r; };
    Poly gam;
    for (int d = 1; d <= a; ++d) gam += pw(Y, d) * mpq_class(ipow(q, d) - 1);
    gam += pw(Y, b + 1) * geometric(Z, 0, a) * (mpq_class(chiT) * Q(q, a));
    gam = gam * (mpq_class(chiS) * Q(q, m / 2));
    Poly r = (Poly(1) - X()) * (geometric(Y, 0, a) + gam);
    r += X() * q * pw(Y, a) * (1 - mpq_class(chiS) * Q(q, -m / 2)) *
         (Poly(1) + pw(Y, b + 1) * (mpq_class(chiS * chiT) * Q(q, (m - 2) / 2)));
    mpq_class f = 1 - Q(q, -(m - 1)) + mpq_class((q - 1) * chiS) * Q(q, -m / 2);
    r += X() * f * (geometric(Y, 0, a - 1) * q + gam - pw(Y, a + b + 1) * (mpq_class(chiS * chiT) * Q(q, m / 2)));
    return r;
}

Poly rank2_m2(int chiS, int a, int b, int chiT, const RingConfig& R) {
    require(0 <= a && a <= b, "0 <= a <= b");
    const long q = R.q();
    Poly one(1), x = X();
    Poly r = (one - x) * geometric(x * q, 0, a) * mpq_class(1 + chiS + q * chiS);
    r -= (one - x) * mono(mpq_class(chiT) * Q(q, a + 1), b + 1) * geometric(x * Q(q, -1), 0, a);
    r -= (mono(1, a + b + 2) + Poly(mpq_class(chiS * chiT))) * mpq_class(chiT * (1 + q));
    r += mono(mpq_class(1 + chiS) * Q(q, a + 1), a + 1) * (one + mono(chiT, b - a));
    return r;
}

Poly rank2_odd(int m, int chiS, int a, int b, const mpq_class& u1, const RingConfig& R) {
    require(m >= 3 && m % 2 == 1 && 0 <= a && a <= b, "odd m >= 3, 0 <= a <= b");
    const long q = R.q();
    int cu = chiS * chi_of(u1, R);
    Poly Y = X() * Q(q, 2 - m);
    auto pw = [](const Poly& p, int e) { Poly r(1); for (int i = 0; i < e; ++i) r = r * p; return r; };
    Poly g1, g0;
    for (int d = a + 1; d <= a + b; ++d) {
        g1 += pw(Y, d) * mpq_class(ipow(q, a + b + 1 - d) - 1);
        g0 += pw(Y, d) * mpq_class(ipow(q, a + b + 1 - d) - q);
    }
    g1 -= geometric(Y, b + 1, a + b + 1);
    g0 -= geometric(Y, b + 1, a + b);
    mpq_class pref = mpq_class(cu) * Q(q, (m - 1) / 2);
    g1 = g1 * pref;
    g0 = g0 * pref;
    Poly r = (Poly(1) - X()) * (geometric(Y, 0, a) + g1);
    r += X() * (1 - Q(q, -(m - 1))) * (geometric(Y, 0, a - 1) * q + g0);
    r += X() * q * pw(Y, a) * (1 + mpq_class(cu) * Q(q, -(m - 1) / 2)) *
         (Poly(1) - mono(mpq_class(cu) * Q(q, (2 - m) * b - (m - 1) / 2), b + 1));
    return r;
}

mpq_class beta_hyperbolic(int k, int n, int t_o, long q) {
    mpq_class r = 1;
    for (int i = k; 2 * i > 2 * k - (n + t_o); --i) r *= 1 - Q(q, -2 * i);  // the i = 0 factor kills k < (n + t_o)/2
    return r;
}

Poly beta2(bool is_H, long q) {
    Poly one(1);
    return is_H ? one - X() : (one - X()) * (one - X() * mpq_class(q * q));
}

Poly beta1_rank1() { return Poly(1) - X(); }

Poly beta0_rank1(int m, int chiM, int vL, int chiL, long q) {
    if (vL == 0) {
        if (m % 2) return X() * (1 + mpq_class(chiM * chiL) * Q(q, -(m - 1) / 2));
        return X() * (1 - mpq_class(chiM) * Q(q, -m / 2));
    }
    if (m % 2) return X() * (1 - Q(q, 1 - m));
    return X() * (1 - Q(q, 1 - m) + mpq_class(chiM * (q - 1)) * Q(q, -m / 2));
}

Poly beta0_rank2(int m, int chiM, int tL, int chiL, int chiu1, long q) {
    Poly X2 = X() * X();
    if (m % 2) {
        if (tL == 0) return X2 * (q * (1 - Q(q, 1 - m)));
        if (tL == 1) return X2 * (q * (1 + mpq_class(chiM * chiu1) * Q(q, (3 - m) / 2)) * (1 - Q(q, 1 - m)));
        return X2 * (q * (1 - Q(q, 1 - m)) * (1 - Q(q, 3 - m)));
    }
    if (tL == 0) return X2 * (q * (1 - mpq_class(chiL) * Q(q, 1 - m) + mpq_class(chiL * chiM * (q - chiL)) * Q(q, -m / 2)));
    if (tL == 1) return X2 * (q * (1 - mpq_class(chiM) * Q(q, -m / 2)) * (1 - Q(q, 2 - m)));
    return X2 * (q * ((1 - Q(q, 2 - m)) + mpq_class(chiM * (q * q - 1)) * Q(q, -m / 2)) * (1 - Q(q, 2 - m)));
}

Poly beta1_rank2(int m, int chiM, int tL, int chiL, int chiu1, long q) {
    Poly base = X() * (Poly(1) - X());
    int de = m % 2 == 0 ? 1 : 0;
    if (tL == 2) return base * (q * (q + 1) * ((1 - Q(q, 1 - m)) + mpq_class(de * chiM * (q - 1)) * Q(q, -m / 2)));
    if (tL == 1) {
        if (m % 2) return base * (q * (1 + q - Q(q, 1 - m) + mpq_class(chiM * chiu1) * Q(q, (3 - m) / 2)));
        return base * (q * (1 + q - Q(q, 1 - m) - mpq_class(chiM) * Q(q, -m / 2)));
    }
    if (chiL == 1) return base * (q * (q + 1 - 2 * Q(q, 1 - m) + mpq_class(de * chiM * (q - 1)) * Q(q, -m / 2)));
    return base * (q * (q + 1) * (1 - mpq_class(de * chiM) * Q(q, -m / 2)));
}

int cancellation_index(const Gram& T, const RingConfig& R) { return -min_val(inverse(T.m), R.p); }

mpq_class pden_unit_step(int chiT, int a, long q) {
    if (chiT != 1) return 1;
    mpq_class s = 1;
    for (int i = 1; i <= a; ++i) s += 2 * Q(q, i);
    return s;
}

mpq_class pden_prim_diag(int chi_mu2u3, int a, int b, long q) {
    require(0 < a && a <= b, "0 < a <= b");
    return 1 + mpq_class(chi_mu2u3) * Q(q, a) * (Q(q, a) - Q(q, b)) - Q(q, a + b);
}

mpq_class pden_prim_hyp(int a, int c, long q) {
    require(a > 0 && a % 2 == 1 && c >= 0, "a positive odd, c >= 0");
    return a <= 2 * c ? 1 - Q(q, a) : 1 - Q(q, 2 * c + 1);
}

}  // namespace closed

// ---------------------------------------------------------------- residue-field counts

namespace residue_counts {

namespace {
long form(const std::vector<int>& diag, const std::vector<int>& x, const std::vector<int>& y, int p) {
    long s = 0;
    for (size_t i = 0; i < diag.size(); ++i) s += long(diag[i]) * x[i] * y[i];
    return fq::mod(s, p);
}
}  // namespace

mpz_class isometries_bruteforce(const std::vector<int>& Ldiag, const std::vector<int>& Mdiag, int p) {
    int n = int(Ldiag.size()), m = int(Mdiag.size());
    if (double(n) * m > 12) throw std::invalid_argument("residue count too large");
    auto vecs = fq::all_vectors(m, p);
    std::vector<std::vector<int>> chosen;
    mpz_class total = 0;
    std::function<void(int)> rec = [&](int j) {
        if (j == n) { ++total; return; }
        for (auto& v : vecs) {
            if (form(Mdiag, v, v, p) != fq::mod(Ldiag[j], p)) continue;
            bool ok = true;
            for (auto& w : chosen) ok = ok && form(Mdiag, w, v, p) == 0;
            if (!ok) continue;
            chosen.push_back(v);
            rec(j + 1);
            chosen.pop_back();
        }
    };
    rec(0);
    return total;
}

mpz_class orthogonal_group_order(int n, int chi_disc, long q) {
    if (n <= 0) return 1;
    int r = n / 2;
    mpz_class o = 2;
    if (n % 2) {
        o *= ipow(q, r * r);
        for (int i = 1; i <= r; ++i) o *= ipow(q, 2 * i) - 1;
    } else {
        o *= ipow(q, r * (r - 1)) * (ipow(q, r) - chi_disc);
        for (int i = 1; i < r; ++i) o *= ipow(q, 2 * i) - 1;
    }
    return o;
}

mpz_class isotropic_subspaces_bruteforce(const std::vector<int>& diag, int k, int p) {
    int n = int(diag.size());
    mpz_class c = 0;
    for (auto& U : fq::subspaces(n, k, p)) {
        bool ok = true;
        for (int i = 0; i < k && ok; ++i)
            for (int j = i; j < k && ok; ++j) ok = form(diag, U[i], U[j], p) == 0;
        if (ok) ++c;
    }
    return c;
}

mpz_class isotropic_subspaces(int n, int eps, int k, long q) {
    auto iso = [&](int d) -> mpz_class {
        if (d <= 0) return 0;
        if (d % 2) return ipow(q, d - 1) - 1;
        int w = d / 2;
        return (ipow(q, w) - eps) * (ipow(q, w - 1) + eps);
    };
    mpz_class num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= ipow(q, i) * iso(n - 2 * i);
        den *= ipow(q, k) - ipow(q, i);
    }
    return num / den;
}

}  // namespace residue_counts

}  // namespace hkr
