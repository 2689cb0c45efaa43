#pragma once

#include <gmpxx.h>

#include <vector>

namespace hkr::fq {

using Vec = std::vector<int>;
using Mat = std::vector<Vec>;

inline int mod(long a, int p) { long r = a % p; return int(r < 0 ? r + p : r); }
int inv(int a, int p);

// Row-reduced echelon form in place; returns pivot columns.
std::vector<int> rref(Mat& m, int p);
int rank(Mat m, int p);

// All k-dimensional subspaces of F_p^n, each as a k x n matrix in RREF.
std::vector<Mat> subspaces(int n, int k, int p);
// Subspaces of every dimension, ordered by dimension.
std::vector<Mat> all_subspaces(int n, int p);

mpz_class gaussian_binomial(int n, int k, long q);

// Every vector of F_p^n, in lexicographic order.
std::vector<Vec> all_vectors(int n, int p);

}  // namespace hkr::fq
