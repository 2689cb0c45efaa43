#pragma once

#include <gmpxx.h>

#include <climits>
#include <string>

namespace hkr {

constexpr int kInfVal = INT_MAX;

// Ring data: F0 = Q_p, F = F0(pi) with pi^2 = pi0 = twist * p.
struct RingConfig {
    int p = 3;
    int d = 1;          // level used by the counting oracle
    bool twisted = false;  // pi0 = s*p instead of p

    static RingConfig make(int p, bool twisted = false, int d = 1);
    long nonresidue() const;  // least quadratic non-residue s mod p
    long pi0() const { return twisted ? nonresidue() * p : p; }
    int q() const { return p; }
};

int legendre(const mpz_class& a, int p);
int vp(const mpz_class& a, int p);
int vp(const mpq_class& a, int p);  // kInfVal for zero

// x = a + b*pi with a, b rational.
struct Ext {
    mpq_class a, b;
    long pi0 = 0;  // 0 means "not yet bound"; arithmetic picks the bound one

    Ext() = default;
    Ext(long v) : a(v), b(0) {}
    Ext(const mpq_class& v) : a(v), b(0) {}
    Ext(const mpq_class& a_, const mpq_class& b_, long pi0_) : a(a_), b(b_), pi0(pi0_) {}

    static Ext pi(long pi0) { return Ext(0, 1, pi0); }
    static Ext pi_pow(long pi0, int e);

    bool is_zero() const { return a == 0 && b == 0; }
    bool in_f0() const { return b == 0; }
    Ext conj() const { return Ext(a, -b, pi0); }
    mpq_class trace() const { return 2 * a; }
    mpq_class norm() const;
    Ext inv() const;

    friend Ext operator+(const Ext& x, const Ext& y);
    friend Ext operator-(const Ext& x, const Ext& y);
    friend Ext operator*(const Ext& x, const Ext& y);
    friend Ext operator/(const Ext& x, const Ext& y) { return x * y.inv(); }
    Ext operator-() const { return Ext(-a, -b, pi0); }
    Ext& operator+=(const Ext& y) { return *this = *this + y; }
    Ext& operator-=(const Ext& y) { return *this = *this - y; }
    Ext& operator*=(const Ext& y) { return *this = *this * y; }
    friend bool operator==(const Ext& x, const Ext& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Ext& x, const Ext& y) { return !(x == y); }

    std::string str() const;
};

struct Galois {
    Ext conj;
    mpq_class trace;
    mpq_class norm;
};

Galois galois(const Ext& x);
int val_pi(const Ext& x, int p);

// t = t0 * (-pi0)^v with t0 a unit; returns v and sets unit.
int unit_part(const mpq_class& t, long pi0, int p, mpq_class& unit);
// Quadratic character of F/F0.
int chi(const mpq_class& t, long pi0, int p);

// Residue of a p-integral rational mod p^e (e >= 1), in [0, p^e).
mpz_class residue(const mpq_class& x, int p, int e);
// Canonical representative of x mod p^e Z_p for x in Z[1/p]-fractions; e may be negative.
mpq_class reduce_mod(const mpq_class& x, int p, int e);
// Canonical representative of x mod pi^k O_F.
Ext reduce_mod_pi(const Ext& x, int p, int k);

mpz_class ipow(long b, unsigned e);
mpq_class qpow(long b, int e);  // b^e with integer (possibly negative) e

}  // namespace hkr
