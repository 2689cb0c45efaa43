#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hkr/tree.hpp"

#include <set>
#include <string>
#include <vector>

using namespace hkr;
using namespace hkr::tree;

namespace {

std::vector<Gram> rank2_shapes(const RingConfig& R, int top) {
    std::vector<Gram> out;
    mpq_class s = R.nonresidue();
    for (int a = 0; a <= top; ++a)
        for (int b = a; b <= top; ++b)
            for (mpq_class u1 : {mpq_class(1), s})
                for (mpq_class u2 : {mpq_class(1), s}) out.push_back(diag_lattice({{u1, a}, {u2, b}}, R));
    out.push_back(hodd(1, R));
    out.push_back(hodd(3, R));
    return out;
}

}  // namespace

TEST_CASE("embedding is exact") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        for (const char* Ls : {"diag(1)", "diag(s*pi0)", "diag(1,pi0)", "Hodd(1)", "diag(1,1,1)", "Hodd(3) + diag(pi0)",
                               "diag(1,s,pi0^2)"}) {
            Gram L = parse_gram(Ls, R);
            for (int amb : {2, 3}) {
                if (L.n() > amb) continue;
                AmbientSpace V = embed(L, R, amb);
                CHECK(V.gram_of(V.lattice) == L.m);
            }
        }
        AmbientSpace V = embed(parse_gram("diag(1,1,1)", R), R);
        CHECK(V.lattice == identity(3, R.pi0()));
        Gram t = parse_gram("diag(pi0)", R);
        AmbientSpace W = embed(t, R);
        CHECK(W.lattice[0][0] == Ext(1));
        CHECK(W.lattice[1][0] == t.m[0][0] * Ext(0, mpq_class(1, 2), R.pi0()));
    }
}

TEST_CASE("vertex lattices: types, duals and neighbors") {
    for (int p : {3, 5}) {
        RingConfig R = RingConfig::make(p);
        AmbientSpace V = embed(hodd(3, R), R);
        Explorer ex(V);
        SupportSet S = ex.support(V.lattice);
        REQUIRE(!S.v0.empty());
        REQUIRE(!S.v2.empty());
        auto check_one = [&](const VertexLattice& L, int type) {
            int t = -1;
            CHECK(is_vertex(L.basis, V, &t));
            CHECK(t == type);
            VertexLattice D = make_vertex(dual_basis(L.basis, V), V);
            if (type == 0) CHECK(D.key == L.key);
            else CHECK(val_pi(det(D.basis), p) - val_pi(det(L.basis), p) == 2);
            for (int j = 0; j < 3; ++j) {
                Vec col(3);
                for (int i = 0; i < 3; ++i) col[i] = D.basis[i][j];
                CHECK(member(col, L));
                for (auto& c : col) c = c * Ext::pi(R.pi0());
                CHECK(member(col, L));
            }
            const auto& nb = ex.nbrs(L);
            CHECK(nb.size() == size_t(p + 1));
            for (const auto& m : nb) {
                CHECK(m.type == 2 - type);
                std::set<std::string> back;
                for (const auto& k : ex.nbrs(m)) back.insert(k.key);
                CHECK(back.count(L.key) == 1);
            }
        };
        for (const auto& L : S.v0) check_one(L, 0);
        for (const auto& L : S.v2) check_one(L, 2);
    }
}

TEST_CASE("pairing with a vertex lattice") {
    RingConfig R = RingConfig::make(3);
    AmbientSpace V = embed(hodd(1, R), R);
    Explorer ex(V);
    SupportSet S = ex.support(V.lattice);
    Vec inside = {Ext(0), Ext(0), Ext(0)};
    Vec far = {Ext::pi_pow(R.pi0(), -5), Ext(0), Ext(0)};
    for (const auto& L : S.v2) {
        CHECK(int_pairing(inside, L, V) == 1);
        CHECK(int_pairing(far, L, V) == 0);
    }
    for (const auto& L : S.v0) {
        CHECK(int_pairing(inside, L, V) == -1);
        CHECK(int_pairing(far, L, V) == 0);
    }
}

TEST_CASE("support examples") {
    for (int p : {3, 5}) {
        RingConfig R = RingConfig::make(p);
        long q = p;
        CHECK(counts_of(enumerate_support(hodd(1, R), R)) == SupportCounts{q + 1, 1, q + 1, 0});
        CHECK(support_counts_closed(hodd(1, R), R) == SupportCounts{q + 1, 1, q + 1, 0});
        // v = 0 with nonsplit complement: a single self-dual vertex
        Gram nonsplit = diag_lattice({{R.nonresidue(), 0}, {1, 0}}, R);
        CHECK(counts_of(enumerate_support(nonsplit, R)) == SupportCounts{1, 0, 1, 1});
        // pi times a split plane: a radius-1 ball in its own plane
        Gram split = diag_lattice({{1, 1}, {-1, 1}}, R);
        CHECK(long(enumerate_support(split, R, 2).v0.size()) == 1 + 2 * q);
        CHECK(long(enumerate_support(split, R, 3).v0.size()) == 1 + q + q * q);
    }
}

TEST_CASE("enumerated supports match the closed counts") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        for (const auto& g : rank2_shapes(R, 2)) {
            CAPTURE(gram_dsl(g, R));
            CHECK(counts_of(enumerate_support(g, R)) == support_counts_closed(g, R, 1));
        }
    }
}

TEST_CASE("boundary and incidence") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        long q = 3;
        for (const auto& g : rank2_shapes(R, 2)) {
            CAPTURE(gram_dsl(g, R));
            AmbientSpace V = embed(g, R);
            Explorer ex(V);
            SupportSet S = ex.support(V.lattice);
            bool positive = min_val(g.m, R.p) > 0;
            for (size_t i = 0; i < S.v0.size(); ++i) {
                bool escapes = false;
                for (const auto& nb : ex.nbrs(S.v0[i])) escapes |= !in_dual(V.lattice, nb, V);
                CHECK(S.boundary[i] == escapes);
                if (positive) CHECK(S.deg0[i] == (S.boundary[i] ? 1 : q + 1));
            }
            for (size_t k = 0; k < S.v2.size(); ++k) CHECK(S.inc[k].size() == size_t(q + 1));
        }
    }
}

TEST_CASE("mu") {
    for (long q : {3, 5}) {
        CHECK(mu(-1, 4, q) == 0);
        CHECK(mu(0, 0, q) == 0);
        CHECK(mu(0, 1, q) == 1);
        for (int b = 1; b <= 10; ++b) CHECK(mu(0, b, q) - mu(0, b - 1, q) == 1);
    }
}

TEST_CASE("geometric primitive side") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        for (int a : {1, 3})
            for (int c = 0; c <= 2; ++c) {
                Gram L = orth(hodd(a, R), diag_lattice({{1, c}}, R));
                mpz_class want = a <= 2 * c ? 1 - ipow(3, unsigned(a)) : 1 - ipow(3, unsigned(2 * c + 1));
                CHECK(int_prim2(L, R) == want);
            }
        mpq_class s = R.nonresidue();
        for (mpq_class u2 : {mpq_class(1), s}) {
            mpq_class u3 = -u2;  // chi(-u2 u3) = 1
            Gram L = diag_lattice({{u2, 1}, {u3, 1}, {1, 1}}, R);
            CHECK(int_prim2(L, R) == 1 - 9);
        }
    }
}

TEST_CASE("intersection numbers: examples") {
    for (bool tw : {false, true}) {
        RingConfig R = RingConfig::make(3, tw);
        for (int c = 0; c <= 2; ++c) CHECK(int_total(orth(hodd(-1, R), diag_lattice({{1, c}}, R)), R) == 0);
        auto rep = int_total_report(parse_gram("diag(1,1,1)", R), R);
        CHECK(rep.route == "unit-split");
        CHECK(rep.v0_count == 1);
        CHECK(mpq_class(rep.value) == pden(parse_gram("diag(1,1)", R), R) + 1);
        mpq_class s = R.nonresidue();
        Gram L = diag_lattice({{1, 1}, {s, 1}, {1, 2}}, R);
        CHECK(mpq_class(int_total(L, R)) == pden(L, R));
    }
}
