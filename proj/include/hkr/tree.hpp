#pragma once

#include "hkr/kr.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace hkr::tree {

using Vec = std::vector<Ext>;

// Hermitian space F^rank with Gram phi; `lattice` holds the input basis as columns.
struct AmbientSpace {
    int rank = 3;
    RingConfig R;
    Mat phi;
    Mat lattice;

    Ext form(const Vec& x, const Vec& y) const;
    Mat gram_of(const Mat& cols) const { return congruent(phi, cols); }
};

// Exact isometric embedding. Rank 3 inputs span the space themselves; rank 1 and 2 inputs
// get an orthogonal complement chosen so that chi(V) = +1 (rank-2 ambient: V = L_F).
AmbientSpace embed(const Gram& L, const RingConfig& R, int ambient_rank = 3);

struct VertexLattice {
    Mat basis;  // columns, canonical (pi-adic Hermite form)
    Mat inv;    // basis^{-1}, for membership
    int type = 0;
    int p = 0;
    std::string key;
};

// Canonicalizes cols; checks the sandwich pi L ⊆ L^# ⊆ L.
VertexLattice make_vertex(const Mat& cols, const AmbientSpace& V);
bool is_vertex(const Mat& cols, const AmbientSpace& V, int* type = nullptr);

Mat dual_basis(const Mat& basis, const AmbientSpace& V);
bool member(const Vec& x, const VertexLattice& L);
// Every column of gens lies in basis^#.
bool in_dual(const Mat& gens, const VertexLattice& L, const AmbientSpace& V);

std::vector<VertexLattice> neighbors(const VertexLattice& L, const AmbientSpace& V);

// +1_Lambda(x) for type 2, -1_Lambda(x) for type 0.
int int_pairing(const Vec& x, const VertexLattice& L, const AmbientSpace& V);

struct SupportSet {
    std::vector<VertexLattice> v0, v2;
    std::vector<std::vector<int>> inc;     // for each v2: indices into v0 of its type-0 sublattices
    std::vector<int> deg0;                  // for each v0: number of type-2 support members above it
    std::vector<bool> boundary;             // per v0
    std::vector<bool> skel0, skel2;
    int depth = 0;                          // BFS depth in half-edges from the start vertex
    size_t frontier = 0;                    // non-member neighbors examined

    size_t boundary_count() const;
    size_t skeleton_count() const;
};

// Neighbor lists are cached per space; reuse one Explorer for many lattices in the same space.
class Explorer {
public:
    explicit Explorer(AmbientSpace V) : V_(std::move(V)) {}
    const AmbientSpace& space() const { return V_; }
    const std::vector<VertexLattice>& nbrs(const VertexLattice& L);
    // All vertex lattices with gens ⊆ Lambda^#; gens are columns of a rank-2 or rank-3 lattice.
    SupportSet support(const Mat& gens, bool with_skeleton = true);
    // A vertex lattice whose dual contains gens, built from a scaled Jordan basis.
    VertexLattice start_vertex(const Mat& gens);

private:
    AmbientSpace V_;
    std::map<std::string, std::vector<VertexLattice>> cache_;
};

SupportSet enumerate_support(const Gram& Lflat, const RingConfig& R, int ambient_rank = 3);

struct SupportCounts {
    long v0 = 0, v2 = 0, boundary = 0, skeleton = 0;
    friend bool operator==(const SupportCounts&, const SupportCounts&) = default;
};
SupportCounts counts_of(const SupportSet& s);
// Ball and tube counts for an integral rank-2 lattice in a rank-3 space with chi(V) = chiV.
SupportCounts support_counts_closed(const Gram& Lflat, const RingConfig& R, int chiV = 1);

mpz_class mu(int a, int b, long q);

// sum over type-2 members of 2*1(x) - #{type-0 sublattices containing x}
mpz_class int_prim2(Explorer& ex, const Mat& Lflat, const Vec& x);
mpz_class int_prim2(const Gram& L, const RingConfig& R);  // L = Lflat + <x>, Lflat the first two vectors

struct IntReport {
    mpz_class value;
    std::string route;       // "negative", "unit-split", "superlattice-sum"
    int bridge_terms = 0;    // chain terms taken from the proven n = 2 identity
    int geometric_terms = 0; // chain terms from int_prim2
    long v0_count = -1;      // |V^0(L)| on the unit route
};

IntReport int_total_report(const Gram& L, const RingConfig& R);
mpz_class int_total(const Gram& L, const RingConfig& R);

}  // namespace hkr::tree
