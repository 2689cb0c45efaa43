#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace hkr {

// Exact polynomial in X, coefficient i multiplies X^i.
class Poly {
public:
    Poly() = default;
    Poly(const mpq_class& c) { if (c != 0) c_.push_back(c); }
    Poly(int c) : Poly(mpq_class(c)) {}
    explicit Poly(std::vector<mpq_class> c) : c_(std::move(c)) { trim(); }

    static Poly X() { return Poly(std::vector<mpq_class>{0, 1}); }
    static Poly monomial(const mpq_class& c, int deg) {
        std::vector<mpq_class> v(deg + 1, mpq_class(0));
        v[deg] = c;
        return Poly(v);
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    mpq_class coeff(int i) const { return i >= 0 && i < (int)c_.size() ? c_[i] : mpq_class(0); }
    const std::vector<mpq_class>& coeffs() const { return c_; }

    mpq_class operator()(const mpq_class& x) const {
        mpq_class r = 0;
        for (int i = degree(); i >= 0; --i) r = r * x + c_[i];
        return r;
    }
    // -dP/dX at X = 1
    mpq_class derivative_at_one() const {
        mpq_class r = 0;
        for (int i = 1; i <= degree(); ++i) r += i * c_[i];
        return -r;
    }
    // P(c X)
    Poly scale_var(const mpq_class& c) const {
        std::vector<mpq_class> v = c_;
        mpq_class f = 1;
        for (auto& x : v) { x *= f; f *= c; }
        return Poly(v);
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<mpq_class> v(std::max(a.c_.size(), b.c_.size()), mpq_class(0));
        for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
        return Poly(v);
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b * mpq_class(-1); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<mpq_class> v(a.c_.size() + b.c_.size() - 1, mpq_class(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        return Poly(v);
    }
    friend Poly operator*(const Poly& a, const mpq_class& s) {
        std::vector<mpq_class> v = a.c_;
        for (auto& x : v) x *= s;
        return Poly(v);
    }
    friend Poly operator*(const Poly& a, long s) { return a * mpq_class(s); }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    std::string str() const {
        if (c_.empty()) return "0";
        std::string s;
        for (int i = 0; i <= degree(); ++i) {
            if (c_[i] == 0) continue;
            std::string t = c_[i].get_str();
            if (!s.empty()) s += c_[i] < 0 ? " - " : " + ";
            else if (c_[i] < 0) s += "-";
            if (c_[i] < 0) t = mpq_class(-c_[i]).get_str();
            if (i == 0) s += t;
            else {
                if (t != "1") s += t + "*";
                s += i == 1 ? "X" : "X^" + std::to_string(i);
            }
        }
        return s;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<mpq_class> c_;
};

// Newton interpolation through (x_i, y_i), distinct x_i.
inline Poly interpolate(const std::vector<mpq_class>& xs, const std::vector<mpq_class>& ys) {
    size_t n = xs.size();
    std::vector<mpq_class> dd = ys;
    for (size_t j = 1; j < n; ++j)
        for (size_t i = n - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
    Poly r;
    for (size_t i = n; i-- > 0;) r = r * Poly(std::vector<mpq_class>{-xs[i], 1}) + Poly(dd[i]);
    return r;
}

}  // namespace hkr
