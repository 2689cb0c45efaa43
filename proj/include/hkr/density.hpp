#pragma once

#include "hkr/lattice.hpp"
#include "hkr/poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hkr {

// ------------------------------------------------------------ counting oracle

struct RepCount {
    int d = 0;
    mpz_class raw;
    mpq_class normalized;
};

// Enumeration cap on rows per block histogram; HKR_BUDGET overrides.
double enumeration_budget();

RepCount count_reps(const Gram& M, const Gram& L, int d, const RingConfig& R);
// First ell vectors independent mod pi.
RepCount count_reps_primitive(const Gram& M, const Gram& L, int d, int ell, const RingConfig& R);
// Full-rank embeddings into H^k + M bucketed by the rank of the H^k projection mod pi.
std::vector<RepCount> count_reps_strata(const Gram& M, int k, const Gram& L, int d, const RingConfig& R);
// Counts of H^k + M for each k in ks (raw, unnormalized); ell as in count_reps_primitive.
std::vector<mpz_class> count_reps_series(const Gram& M, const std::vector<int>& ks, const Gram& L, int d,
                                         const RingConfig& R, int ell = 0);
// Reference path: plain backtracking over x_1..x_n with pruning on partial moments (tiny sizes only).
RepCount count_reps_backtrack(const Gram& M, const Gram& L, int d, const RingConfig& R);

// Level at which normalized counts have stabilized for target L.
int stable_level(const Gram& L, const RingConfig& R);

// ------------------------------------------------------------ density polynomials

Gram with_hyperbolic(const Gram& M, int k, const RingConfig& R);  // H^k + M

// Oracle path: Newton interpolation of normalized counts at X = q^{-2k}.
struct AlphaFit {
    Poly poly;
    int degree_cap = 0;
    int level = 0;
};
AlphaFit alpha_poly_fit(const Gram& M, const Gram& L, const RingConfig& R, int primitive_ell = 0);
Poly alpha_poly(const Gram& M, const Gram& L, const RingConfig& R);
mpq_class alpha_prime(const Poly& a);

// Recursive induction engine (M = H^k + unimodular, or M with a rank-1 target).
Poly alpha_engine(const Gram& M, const Gram& L, const RingConfig& R);
// Primitive density beta^{(n1)} for L = L1 + L2 with L1 the first n1 basis vectors (L1 orthogonal to L2).
Poly beta_prim_poly(const Gram& M, const Gram& L, int n1, const RingConfig& R);

// ------------------------------------------------------------ closed forms

// Data of a Jordan-split Gram: unary blocks u(-pi0)^c and hyperbolic H_j.
struct SplitForm {
    std::vector<std::pair<mpq_class, int>> unary;  // (unit, c)
    std::vector<int> hyper;                        // odd exponents j
    static SplitForm of(const Gram& M, const RingConfig& R);
};

// Fourier evaluation of alpha(S, (t), X) for any Jordan-split S.
Poly alpha_rank1(const SplitForm& S, const mpq_class& t, const RingConfig& R);

namespace closed {

// alpha(S_{a,b}, (t), X), S unimodular of rank m with sign chiS; requires 0 <= a <= b <= v(t).
Poly rank1_sab(int m, int chiS, const mpq_class& nu1, int a, const mpq_class& nu2, int b, const mpq_class& t,
               const RingConfig& R);
// alpha(S + H_i, (t), X), S unimodular of odd rank m.
Poly rank1_hyp(int m, int chiS, int i, const mpq_class& t, const RingConfig& R);
// T = Diag(u1(-pi0)^a, u2(-pi0)^b), 0 <= a <= b.
Poly rank2_even(int m, int chiS, int a, int b, int chiT, const RingConfig& R);
Poly rank2_m2(int chiS, int a, int b, int chiT, const RingConfig& R);
Poly rank2_odd(int m, int chiS, int a, int b, const mpq_class& u1, const RingConfig& R);

// beta(H^k, L) product formula.
mpq_class beta_hyperbolic(int k, int n, int t_o, long q);
Poly beta2(bool is_H, long q);
Poly beta1_rank1();
Poly beta0_rank1(int m, int chiM, int vL, int chiL, long q);
// Rank-2 L: t(L) in {0,1,2}; u1 is the unit of the unimodular component when t(L) = 1.
Poly beta0_rank2(int m, int chiM, int tL, int chiL, int chiu1, long q);
Poly beta1_rank2(int m, int chiM, int tL, int chiL, int chiu1, long q);

// Least l with pi^l T^{-1} integral.
int cancellation_index(const Gram& T, const RingConfig& R);

// Derived-density closed forms.
mpq_class pden_unit_step(int chiT2, int a, long q);                     // pDen(Diag(1,T2)) - pDen(T2)
mpq_class pden_prim_diag(int chi_mu2u3, int a, int b, long q);          // 0 < a <= b <= c
mpq_class pden_prim_hyp(int a, int c, long q);                          // Diag(H_a, u3(-pi0)^c), a odd

}  // namespace closed

// ------------------------------------------------------------ residue-field counts

namespace residue_counts {

// Quadratic space over F_q by diagonal entries; isometry counts by brute force.
mpz_class isometries_bruteforce(const std::vector<int>& Ldiag, const std::vector<int>& Mdiag, int p);
mpz_class orthogonal_group_order(int n, int chi_disc, long q);  // chi of (-1)^{n(n-1)/2} det
mpz_class isotropic_subspaces_bruteforce(const std::vector<int>& diag, int k, int p);
// Number of k-dim totally isotropic subspaces of a nondegenerate n-dim space with sign eps.
mpz_class isotropic_subspaces(int n, int eps, int k, long q);

}  // namespace residue_counts

}  // namespace hkr
