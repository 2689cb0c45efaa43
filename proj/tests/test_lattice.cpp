#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkr/fq.hpp"
#include "hkr/lattice.hpp"

using namespace hkr;

static std::vector<int> fund_of(const std::string& dsl, const RingConfig& R) {
    return invariants(parse_gram(dsl, R), R).fund;
}

TEST_CASE("standard lattices") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        Gram h = hodd(-1, R);
        CHECK(h.m[0][1] == Ext::pi_pow(R.pi0(), -1));
        CHECK(h.m[1][0] == -Ext::pi_pow(R.pi0(), -1));
        CHECK(sign(h.m, R) == 1);
        for (int n = 1; n <= 4; ++n)
            for (int e : {1, -1}) CHECK(sign(unimodular(n, e, R).m, R) == e);
        Gram g = hyperbolic_sum(3, 1, -1, R);
        CHECK(g.n() == 3);
        CHECK(sign(g.m, R) == -1);
        CHECK_THROWS(hyperbolic_sum(1, 1, 1, R));
        CHECK_THROWS(unimodular(0, -1, R));
    }
}

TEST_CASE("DSL parsing") {
    RingConfig R = RingConfig::make(3);
    Gram g = parse_gram("H + diag(1)", R);
    CHECK(g.n() == 3);
    g = parse_gram("diag(1, s*pi0^2, -pi0)", R);
    CHECK(g.m[1][1] == Ext(mpq_class(2 * 9), 0, 3));
    CHECK(g.m[2][2] == Ext(-3, 0, 3));
    g = parse_gram("Hodd(3)", R);
    CHECK(val_pi(g.m[0][1], 3) == 3);
    CHECK_THROWS_AS(parse_gram("diag(1, q)", R), std::invalid_argument);
    CHECK_THROWS_AS(parse_gram("Hodd(2)", R), std::invalid_argument);
    CHECK_THROWS_AS(parse_gram("diag(0)", R), std::invalid_argument);
    try {
        parse_gram("diag(1) + X", R);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("'X'") != std::string::npos);
    }
}

TEST_CASE("invariants of standard shapes") {
    RingConfig R = RingConfig::make(3);
    auto inv = invariants(unimodular(3, 1, R), R);
    CHECK(inv.fund == std::vector<int>{0, 0, 0});
    CHECK(inv.vL == 0);
    CHECK(inv.tL == 0);
    CHECK(inv.t_o == 3);
    inv = invariants(hodd(-1, R), R);
    CHECK(inv.fund == std::vector<int>{-1, -1});
    CHECK(inv.t_o == 0);
    for (int a = 0; a <= 3; ++a) CHECK(fund_of("Hodd(" + std::to_string(2 * a + 1) + ")", R) == std::vector<int>{2 * a + 1, 2 * a + 1});
    CHECK(fund_of("diag(pi0, 1, pi0^2)", R) == std::vector<int>{0, 2, 4});
}

TEST_CASE("jordan form is an isometry to a block diagonal gram") {
    for (int p : {3, 5}) {
        RingConfig R = RingConfig::make(p);
        long r = R.pi0();
        std::vector<Mat> samples;
        // dense Hermitian matrices built from congruences
        Mat c{{Ext(1, 0, r), Ext(2, 1, r), Ext(0, 1, r)},
              {Ext(0, 0, r), Ext(1, 0, r), Ext(p, 0, r)},
              {Ext(1, 1, r), Ext(0, 0, r), Ext(1, 0, r)}};
        for (auto dsl : {"diag(1, pi0, pi0^2)", "Hodd(1) + diag(pi0)", "H + diag(s)", "diag(pi0, s*pi0, pi0)", "Hodd(3) + diag(1)"})
            samples.push_back(congruent(parse_gram(dsl, R).m, c));
        // dense rank-2 with odd off-diagonal minimum
        samples.push_back(Mat{{Ext(r * r, 0, r), Ext(0, r, r)}, {Ext(0, -r, r), Ext(r * r, 0, r)}});
        for (auto& m : samples) {
            Gram g{m};
            JordanForm jf = jordan_form(g, R);
            Mat d = congruent(g.m, jf.base);
            int pos = 0;
            for (auto& b : jf.blocks) {
                int w = b.hyperbolic ? 2 : 1;
                for (int i = 0; i < w; ++i)
                    for (int j = 0; j < w; ++j) CHECK(d[pos + i][pos + j] == b.gram[i][j]);
                for (int i = 0; i < int(d.size()); ++i)
                    for (int j = 0; j < w; ++j)
                        if (i < pos || i >= pos + w) CHECK(d[i][pos + j].is_zero());
                if (b.hyperbolic) {
                    CHECK(b.exp % 2 != 0);
                    CHECK(val_pi(b.gram[0][1], p) == b.exp);
                    CHECK(val_pi(b.gram[0][0], p) > b.exp);
                    CHECK(val_pi(b.gram[1][1], p) > b.exp);
                }
                pos += w;
            }
            // base change is invertible over O_F
            CHECK(val_pi(det(jf.base), p) == 0);
            CHECK(sign(d, R) == sign(g.m, R));
        }
        // the dense rank-2 sample is a single odd hyperbolic block
        JordanForm jf = jordan_form(Gram{samples.back()}, R);
        CHECK(jf.blocks.size() == 1);
        CHECK(jf.blocks[0].hyperbolic);
        CHECK(jf.blocks[0].exp == 3);
    }
}

TEST_CASE("invariants agree with elementary divisors of the dual quotient") {
    RingConfig R = RingConfig::make(3);
    for (auto dsl : {"diag(1, pi0, pi0^2)", "Hodd(1) + diag(pi0)", "Hodd(3)", "diag(s*pi0, pi0)", "H + diag(pi0^2)"}) {
        Gram g = parse_gram(dsl, R);
        // elementary divisors of G^{-1} relative to the identity lattice, from the HNF of rows of G^{-1}
        Mat rows = hnf_rows(transpose(inverse(g.m)), 3);
        std::vector<int> ed;
        for (int i = 0; i < g.n(); ++i) ed.push_back(-val_pi(rows[i][i], 3));
        std::sort(ed.begin(), ed.end());
        CHECK(ed == invariants(g, R).fund);
    }
}

TEST_CASE("dual gram") {
    RingConfig R = RingConfig::make(3);
    long r = R.pi0();
    Gram g = parse_gram("diag(pi0)", R);
    CHECK(dual_gram(g).m[0][0] == Ext(1, 0, r) / Ext(r, 0, r));
    Gram h = hodd(-1, R);
    CHECK(invariants(dual_gram(h), R).fund == std::vector<int>{1, 1});
    Gram i3 = unimodular(3, 1, R);
    CHECK(isometry_key(dual_gram(i3), R) == isometry_key(i3, R));
    for (auto dsl : {"diag(1, pi0, pi0^2)", "Hodd(1) + diag(pi0)", "H + diag(s)"}) {
        Gram x = parse_gram(dsl, R);
        CHECK(invariants(dual_gram(dual_gram(x)), R).fund == invariants(x, R).fund);
    }
}

TEST_CASE("scaling by a unit keeps fund and twists the sign") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(5, tw);
        long r = R.pi0();
        for (auto dsl : {"diag(1, pi0)", "Hodd(1) + diag(pi0)", "diag(s, pi0^2, 1)"}) {
            Gram g = parse_gram(dsl, R);
            for (long u : {1L, R.nonresidue()}) {
                Gram h{scale(g.m, Ext(u, 0, r))};
                CHECK(invariants(h, R).fund == invariants(g, R).fund);
                int c = chi(mpq_class(u), r, 5);
                int expect = invariants(g, R).sign * (g.n() % 2 ? c : 1);
                CHECK(invariants(h, R).sign == expect);
            }
        }
    }
}

TEST_CASE("superlattice counts are gaussian binomials") {
    for (int p : {3, 5}) {
        RingConfig R = RingConfig::make(p);
        long r = R.pi0();
        for (int n = 1; n <= 3; ++n) {
            Gram g = diag_lattice(std::vector<std::pair<mpq_class, int>>(n, {1, 2}), R);
            for (int i = 0; i <= n; ++i) {
                auto sl = superlattices(g, i, R);
                CHECK(mpz_class(sl.size()) == fq::gaussian_binomial(n, i, p));
                for (auto& s : sl) {
                    CHECK(congruent(g.m, s.basis) == s.gram.m);
                    // pi L' inside L inside L'
                    Mat inv = inverse(s.basis);
                    CHECK(min_val(inv, p) >= 0);
                    CHECK(min_val(scale(s.basis, Ext::pi(r)), p) >= 0);
                    CHECK(val_pi(det(s.basis), p) == -i);
                }
            }
        }
    }
    RingConfig R = RingConfig::make(3);
    auto one = superlattices(parse_gram("diag(pi0^2)", R), 1, R);
    REQUIRE(one.size() == 1);
    CHECK(invariants(one[0].gram, R).fund == std::vector<int>{2});
}

TEST_CASE("integral superlattices") {
    RingConfig R = RingConfig::make(3);
    CHECK(integral_superlattices(unimodular(3, 1, R), R).size() == 1);
    CHECK(integral_superlattices(parse_gram("diag(pi0)", R), R).size() == 2);
    CHECK(integral_superlattices(parse_gram("Hodd(1)", R), R).size() == 1 + 4);
    CHECK_THROWS(integral_superlattices(hodd(-1, R), R));
    // closed under the partial order: every integral index-q step between L and a member is a member
    Gram g = parse_gram("diag(pi0, s*pi0, pi0^2)", R);
    auto all = integral_superlattices(g, R);
    std::set<std::string> keys;
    for (auto& s : all) keys.insert(mat_key(hnf_rows(transpose(s.basis), 3)));
    CHECK(keys.size() == all.size());
    // closed under the partial order: every lattice between L and a member is a member
    for (auto& t : all) {
        Mat tinv = inverse(t.basis);
        std::vector<Mat> frontier{identity(3, R.pi0())};
        std::set<std::string> seen;
        while (!frontier.empty()) {
            Mat cur = frontier.back();
            frontier.pop_back();
            std::string key = mat_key(hnf_rows(transpose(cur), 3));
            if (!seen.insert(key).second) continue;
            CHECK(keys.count(key) == 1);
            for (auto& step : superlattices(Gram{congruent(g.m, cur)}, 1, R)) {
                Mat next = mul(cur, step.basis);
                if (min_val(mul(tinv, next), 3) >= 0) frontier.push_back(next);
            }
        }
    }
    for (auto& s : all) CHECK(is_integral(s.gram.m, 3));
}

TEST_CASE("alternating subspace sum") {
    CHECK(subspace_alt_sum(0, 3) == 1);
    CHECK(subspace_alt_sum(1, 3) == 0);
    CHECK(subspace_alt_sum(2, 3) == 0);
    for (int m = 1; m <= 6; ++m)
        for (long q : {3, 5, 7, 9}) CHECK(subspace_alt_sum(m, q) == 0);
}
