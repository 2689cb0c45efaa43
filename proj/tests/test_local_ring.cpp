#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkr/local_ring.hpp"

#include <random>

using namespace hkr;

static mpq_class Q(long a, long b) {
    mpq_class x(a, b);
    x.canonicalize();
    return x;
}

TEST_CASE("galois data of small elements") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        long r = R.pi0();
        Ext pi = Ext::pi(r);
        Galois g = galois(pi);
        CHECK(g.conj == -pi);
        CHECK(g.trace == 0);
        CHECK(g.norm == -r);

        Ext x = Ext(1, 0, r) + pi;
        g = galois(x);
        CHECK(g.conj == Ext(1, -1, r));
        CHECK(g.trace == 2);
        CHECK(g.norm == 1 - r);

        Ext c(Q(5, 7), 0, r);
        g = galois(c);
        CHECK(g.conj == c);
        CHECK(g.trace == Q(10, 7));
        CHECK(g.norm == Q(25, 49));
    }
}

TEST_CASE("valuation") {
    RingConfig R = RingConfig::make(3);
    long r = R.pi0();
    CHECK(val_pi(Ext::pi(r), 3) == 1);
    CHECK(val_pi(Ext(Q(r, 9), 0, r), 3) == -2);
    CHECK(val_pi(Ext(1, 1, r), 3) == 0);
    CHECK(val_pi(Ext(r, 0, r), 3) == 2);
    CHECK(val_pi(Ext(0, 0, r), 3) == kInfVal);
    for (int e = -5; e <= 5; ++e) CHECK(val_pi(Ext::pi_pow(r, e), 3) == e);
}

TEST_CASE("quadratic character") {
    RingConfig R = RingConfig::make(3);
    long r = R.pi0();
    CHECK(chi(1, r, 3) == 1);
    CHECK(chi(-r, r, 3) == 1);
    CHECK(chi(2, r, 3) == -1);
    CHECK(chi(r, r, 3) == -1);
}

TEST_CASE("character is multiplicative on unit classes times valuations") {
    for (int p : {3, 5, 7}) {
        for (bool tw : {false, true}) {
            RingConfig R = RingConfig::make(p, tw);
            long r = R.pi0();
            for (int u1 = 1; u1 < p; ++u1)
                for (int u2 = 1; u2 < p; ++u2)
                    for (int k1 = 0; k1 <= 4; ++k1)
                        for (int k2 = 0; k2 <= 4; ++k2) {
                            mpq_class s = u1 * qpow(r, k1), t = u2 * qpow(r, k2);
                            CHECK(chi(s * t, r, p) == chi(s, r, p) * chi(t, r, p));
                        }
        }
    }
}

TEST_CASE("character is trivial on norms") {
    std::mt19937 rng(7);
    for (int p : {3, 5}) {
        for (bool tw : {false, true}) {
            RingConfig R = RingConfig::make(p, tw);
            long r = R.pi0();
            for (int it = 0; it < 200; ++it) {
                Ext y(Q(int(rng() % 50) - 25, 1 + rng() % 9), Q(int(rng() % 50) - 25, 1 + rng() % 9), r);
                if (y.is_zero()) continue;
                mpq_class x = Q(int(rng() % 40) + 1, 1 + rng() % 5);
                if (vp(x, p) == kInfVal) continue;
                CHECK(chi(x * y.norm(), r, p) == chi(x, r, p));
            }
        }
    }
}

TEST_CASE("ring axioms hold on random elements") {
    std::mt19937 rng(11);
    RingConfig R = RingConfig::make(5, true);
    long r = R.pi0();
    auto rnd = [&] { return Ext(Q(int(rng() % 21) - 10, 1 + rng() % 4), Q(int(rng() % 21) - 10, 1 + rng() % 4), r); };
    for (int it = 0; it < 300; ++it) {
        Ext x = rnd(), y = rnd(), z = rnd();
        CHECK(x * y == y * x);
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        CHECK(x.conj().conj() == x);
        CHECK((x * y).conj() == x.conj() * y.conj());
        CHECK(Ext(x.norm(), 0, r) == x * x.conj());
        CHECK(Ext(x.trace(), 0, r) == x + x.conj());
        if (!x.is_zero()) CHECK(x * x.inv() == Ext(1, 0, r));
        if (!x.is_zero() && !y.is_zero()) CHECK(val_pi(x * y, 5) == val_pi(x, 5) + val_pi(y, 5));
    }
}

TEST_CASE("reduction modulo powers of pi") {
    RingConfig R = RingConfig::make(3);
    long r = R.pi0();
    Ext x(Q(7, 2), Q(5, 9), r);
    for (int k = -4; k <= 6; ++k) {
        Ext y = reduce_mod_pi(x, 3, k);
        Ext diff = x - y;
        CHECK((diff.is_zero() || val_pi(diff, 3) >= k));
        CHECK(reduce_mod_pi(y, 3, k) == y);
    }
}
