#include "hkr/local_ring.hpp"

#include <stdexcept>

namespace hkr {

RingConfig RingConfig::make(int p, bool twisted, int d) {
    if (p < 3 || p % 2 == 0) throw std::invalid_argument("p must be an odd prime");
    for (int k = 3; k * k <= p; k += 2)
        if (p % k == 0) throw std::invalid_argument("p must be prime");
    if (d < 1) throw std::invalid_argument("level must be positive");
    return RingConfig{p, d, twisted};
}

long RingConfig::nonresidue() const {
    for (long s = 2; s < p; ++s)
        if (legendre(mpz_class(s), p) == -1) return s;
    return -1;
}

int legendre(const mpz_class& a, int p) {
    mpz_class r = a % p;
    if (r < 0) r += p;
    if (r == 0) return 0;
    return mpz_legendre(r.get_mpz_t(), mpz_class(p).get_mpz_t());
}

int vp(const mpz_class& a, int p) {
    if (a == 0) return kInfVal;
    mpz_class x = a;
    int v = 0;
    while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
        mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), p);
        ++v;
    }
    return v;
}

int vp(const mpq_class& a, int p) {
    if (a == 0) return kInfVal;
    return vp(mpz_class(a.get_num()), p) - vp(mpz_class(a.get_den()), p);
}

mpz_class ipow(long b, unsigned e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), mpz_class(b).get_mpz_t(), e);
    return r;
}

mpq_class qpow(long b, int e) {
    if (e >= 0) return mpq_class(ipow(b, e));
    return mpq_class(1, 1) / mpq_class(ipow(b, -e));
}

static long bind(long x, long y) { return x ? x : y; }

Ext Ext::pi_pow(long pi0, int e) {
    // pi^(2j) = pi0^j, pi^(2j+1) = pi0^j * pi
    int j = e >= 0 ? e / 2 : -((-e + 1) / 2);
    int r = e - 2 * j;
    mpq_class c = qpow(pi0, j);
    return r == 0 ? Ext(c, 0, pi0) : Ext(0, c, pi0);
}

mpq_class Ext::norm() const { return a * a - mpq_class(pi0) * b * b; }

Ext Ext::inv() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    mpq_class n = norm();
    return Ext(a / n, -b / n, pi0);
}

Ext operator+(const Ext& x, const Ext& y) { return Ext(x.a + y.a, x.b + y.b, bind(x.pi0, y.pi0)); }
Ext operator-(const Ext& x, const Ext& y) { return Ext(x.a - y.a, x.b - y.b, bind(x.pi0, y.pi0)); }
Ext operator*(const Ext& x, const Ext& y) {
    long r = bind(x.pi0, y.pi0);
    if (r == 0 && x.b != 0 && y.b != 0) throw std::logic_error("unbound ring in product");
    return Ext(x.a * y.a + mpq_class(r) * x.b * y.b, x.a * y.b + x.b * y.a, r);
}

std::string Ext::str() const {
    if (b == 0) return a.get_str();
    if (a == 0) return b.get_str() + "*pi";
    return a.get_str() + (b < 0 ? "-" : "+") + mpq_class(abs(b)).get_str() + "*pi";
}

Galois galois(const Ext& x) { return {x.conj(), x.trace(), x.norm()}; }

int val_pi(const Ext& x, int p) {
    int va = vp(x.a, p), vb = vp(x.b, p);
    int ea = va == kInfVal ? kInfVal : 2 * va;
    int eb = vb == kInfVal ? kInfVal : 1 + 2 * vb;
    return std::min(ea, eb);
}

int unit_part(const mpq_class& t, long pi0, int p, mpq_class& unit) {
    if (t == 0) throw std::domain_error("unit part of zero");
    int v = vp(t, p);
    unit = t / qpow(-pi0, v);
    return v;
}

int chi(const mpq_class& t, long pi0, int p) {
    mpq_class u;
    unit_part(t, pi0, p, u);
    mpz_class r = residue(u, p, 1);
    return legendre(r, p);
}

mpz_class residue(const mpq_class& x, int p, int e) {
    mpz_class m = ipow(p, e);
    mpz_class den = x.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), p)) throw std::domain_error("residue of non-integral value");
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    mpz_class r = (mpz_class(x.get_num()) * inv) % m;
    if (r < 0) r += m;
    return r;
}

mpq_class reduce_mod(const mpq_class& x, int p, int e) {
    if (x == 0) return 0;
    int v = vp(x, p);
    if (v >= e) return 0;
    int s = v < 0 ? -v : 0;
    // x * p^s is p-integral; reduce it mod p^(e+s)
    mpq_class y = x * mpq_class(ipow(p, s));
    mpz_class r = residue(y, p, e + s);
    return mpq_class(r) / mpq_class(ipow(p, s));
}

Ext reduce_mod_pi(const Ext& x, int p, int k) {
    // pi^k O_F = p^ceil(k/2) Z_p + p^ceil((k-1)/2) Z_p * pi
    auto cdiv = [](int n) { return n >= 0 ? (n + 1) / 2 : -((-n) / 2); };
    return Ext(reduce_mod(x.a, p, cdiv(k)), reduce_mod(x.b, p, cdiv(k - 1)), x.pi0);
}

}  // namespace hkr
