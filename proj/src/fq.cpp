#include "hkr/fq.hpp"

#include "hkr/local_ring.hpp"

namespace hkr::fq {

int inv(int a, int p) {
    long r = 1, b = mod(a, p);
    for (int e = p - 2; e > 0; e >>= 1, b = b * b % p)
        if (e & 1) r = r * b % p;
    return int(r);
}

std::vector<int> rref(Mat& m, int p) {
    std::vector<int> piv;
    if (m.empty()) return piv;
    size_t rows = m.size(), cols = m[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t s = r;
        while (s < rows && m[s][c] == 0) ++s;
        if (s == rows) continue;
        std::swap(m[r], m[s]);
        int iv = inv(m[r][c], p);
        for (auto& x : m[r]) x = int(long(x) * iv % p);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            long f = m[i][c];
            for (size_t j = 0; j < cols; ++j) m[i][j] = mod(m[i][j] - f * m[r][j], p);
        }
        piv.push_back(int(c));
        ++r;
    }
    m.resize(r);
    return piv;
}

int rank(Mat m, int p) { return int(rref(m, p).size()); }

std::vector<Mat> subspaces(int n, int k, int p) {
    std::vector<Mat> out;
    if (k < 0 || k > n) return out;
    if (k == 0) { out.push_back({}); return out; }
    // choose pivot columns, then fill free slots (right of pivot, not a pivot column)
    std::vector<int> piv(k);
    auto rec_piv = [&](auto& self, int idx, int start) -> void {
        if (idx == k) {
            std::vector<std::pair<int, int>> free;
            for (int r = 0; r < k; ++r)
                for (int c = piv[r] + 1; c < n; ++c) {
                    bool isp = false;
                    for (int pc : piv) isp |= pc == c;
                    if (!isp) free.push_back({r, c});
                }
            Mat base(k, Vec(n, 0));
            for (int r = 0; r < k; ++r) base[r][piv[r]] = 1;
            std::vector<int> digit(free.size(), 0);
            while (true) {
                Mat m = base;
                for (size_t f = 0; f < free.size(); ++f) m[free[f].first][free[f].second] = digit[f];
                out.push_back(m);
                size_t f = 0;
                while (f < digit.size() && ++digit[f] == p) digit[f++] = 0;
                if (f == digit.size()) break;
            }
            return;
        }
        for (int c = start; c <= n - (k - idx); ++c) {
            piv[idx] = c;
            self(self, idx + 1, c + 1);
        }
    };
    rec_piv(rec_piv, 0, 0);
    return out;
}

std::vector<Mat> all_subspaces(int n, int p) {
    std::vector<Mat> out;
    for (int k = 0; k <= n; ++k)
        for (auto& s : subspaces(n, k, p)) out.push_back(s);
    return out;
}

mpz_class gaussian_binomial(int n, int k, long q) {
    if (k < 0 || k > n) return 0;
    mpz_class num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= ipow(q, n - i) - 1;
        den *= ipow(q, i + 1) - 1;
    }
    return num / den;
}

std::vector<Vec> all_vectors(int n, int p) {
    std::vector<Vec> out;
    Vec v(n, 0);
    while (true) {
        out.push_back(v);
        int i = n - 1;
        while (i >= 0 && ++v[i] == p) v[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

}  // namespace hkr::fq
