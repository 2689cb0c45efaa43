#pragma once

#include "hkr/density.hpp"

namespace hkr {

// Correction coefficients for the modified analytic side.
struct CoefficientTable {
    int n = 0, eps = 1;
    long q = 0;
    std::vector<std::vector<mpq_class>> A;  // r x r upper triangular
    std::vector<mpq_class> B;
    std::vector<mpq_class> C;  // A C = -2 B
};

// r = (n-1)/2 for odd n, floor((n+eps)/2) for even n.
int correction_rank(int n, int eps);

// I(n, d, k) = prod_{s=1}^k (q^{d-s+1}-1)(q^{n-d-s}+1)/(q^s-1).
mpq_class isotropic_product(int n, int d, int k, long q);

// A from the product formulas, B = alpha'(I(n,-eps), H^{n,j}_eps) from the density engine.
CoefficientTable build_system(int n, int eps, const RingConfig& R);
// Solve A C = -2B by back substitution; cached per (q, twist, n, eps).
const CoefficientTable& coeffs(int n, int eps, const RingConfig& R);

// Same system with every density taken from a caller-supplied evaluator.
CoefficientTable build_system_with(int n, int eps, const RingConfig& R,
                                   const std::function<Poly(const Gram&, const Gram&)>& alpha);
void solve_system(CoefficientTable& t);

// Derived local density with eps = chi(L).
mpq_class pden(const Gram& L, const RingConfig& R);
// Primitive derived density with respect to the first n1 basis vectors (L1 orthogonal to L2).
mpq_class pden_prim(const Gram& L, int n1, const RingConfig& R);

}  // namespace hkr
