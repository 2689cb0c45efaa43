#pragma once

#include "hkr/local_ring.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hkr {

// Thrown when an enumeration would exceed its configured cap.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Mat = std::vector<std::vector<Ext>>;

Mat zeros(int r, int c, long pi0);
Mat identity(int n, long pi0);
Mat mul(const Mat& a, const Mat& b);
Mat adjoint(const Mat& a);  // conjugate transpose
Mat transpose(const Mat& a);
Mat inverse(const Mat& a);
Ext det(const Mat& a);
Mat block_sum(const Mat& a, const Mat& b);
Mat scale(const Mat& a, const Ext& s);
// Gram of the columns of c: c* g c
Mat congruent(const Mat& g, const Mat& c);
std::string mat_str(const Mat& m);

// Hermitian lattice given by a Gram matrix in some basis.
struct Gram {
    Mat m;
    int n() const { return int(m.size()); }
};

bool is_hermitian(const Mat& g);
int min_val(const Mat& g, int p);  // v(L)
bool is_integral(const Mat& g, int p);
// diagonal in O_F0 and off-diagonal in pi^{-1} O_F
bool is_trace_integral(const Mat& g, int p);

// Gram DSL: diag(u*pi0^a, ...), Hodd(e), H, joined by '+'; units 1 or s (optionally negated).
Gram parse_gram(const std::string& text, const RingConfig& R);
std::string gram_dsl(const Gram& g, const RingConfig& R);

// Standard lattices.
Gram unimodular(int n, int eps, const RingConfig& R);          // I(n, eps) = Diag(1,...,1,nu)
Gram hodd(int e, const RingConfig& R);                          // H_e
Gram hyperbolic_sum(int n, int i, int eps, const RingConfig& R);  // H^i + I(n-2i, eps)
Gram diag_lattice(const std::vector<std::pair<mpq_class, int>>& units_exps, const RingConfig& R);  // Diag(u(-pi0)^c)
Gram orth(const Gram& a, const Gram& b);

struct JordanBlock {
    bool hyperbolic = false;
    int exp = 0;           // diag: c with entry u(-pi0)^c; hyperbolic: odd scale a
    mpq_class unit = 1;    // diag unit part
    Mat gram;              // exact block Gram in the new basis
    int scale() const { return hyperbolic ? exp : 2 * exp; }
};

struct JordanForm {
    std::vector<JordanBlock> blocks;  // sorted by scale
    Mat base;                         // columns: new basis in old coordinates
};

JordanForm jordan_form(const Gram& L, const RingConfig& R);

struct LatticeInvariants {
    std::vector<int> fund;
    int vL = 0;
    int tL = 0;
    int sign = 1;
    int t_o = 0;
};

int sign(const Mat& g, const RingConfig& R);
LatticeInvariants invariants(const Gram& L, const RingConfig& R);
Gram dual_gram(const Gram& L);

// Canonical row basis (pi-adic Hermite form) of the O_F-module spanned by rows.
Mat hnf_rows(Mat rows, int p);
std::string mat_key(const Mat& m);

struct Superlattice {
    Mat basis;  // columns in coordinates of the original basis
    Gram gram;
};

std::vector<Superlattice> superlattices(const Gram& L, int i, const RingConfig& R);
// Superlattices L' of L (L' inside L tensor F) satisfying a downward-closed predicate on the Gram.
std::vector<Superlattice> superlattices_where(const Gram& L, const RingConfig& R,
                                              const std::function<bool(const Mat&)>& pred,
                                              size_t budget = 200000);
std::vector<Superlattice> integral_superlattices(const Gram& L, const RingConfig& R);
std::vector<Superlattice> trace_integral_superlattices(const Gram& L, const RingConfig& R);

mpz_class subspace_alt_sum(int m, long q);

// Isometry class data at ranks <= 3: sorted scales, unit classes, hyperbolic flags.
std::string isometry_key(const Gram& L, const RingConfig& R);

}  // namespace hkr
