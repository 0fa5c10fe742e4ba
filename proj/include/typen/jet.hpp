// SPDX-License-Identifier: Apache-2.0
#pragma once

// Truncated univariate power series  sum_{k<=N} c_k t^k  over a field-like T
// (Rational, double, std::complex<double>).  Binary operations truncate to
// the smaller order of their operands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace typen {

template <class T>
class Jet {
public:
    Jet() = default;
    explicit Jet(int order, T c0 = T(0)) : c_(static_cast<std::size_t>(order + 1), T(0)) { c_[0] = c0; }
    explicit Jet(std::vector<T> c) : c_(std::move(c)) {
        if (c_.empty()) c_.push_back(T(0));
    }
    static Jet variable(int order, T at = T(0)) {
        Jet j(order, at);
        if (order >= 1) j.c_[1] = T(1);
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<T>& coeffs() const { return c_; }
    T& operator[](std::size_t i) { return c_[i]; }
    const T& operator[](std::size_t i) const { return c_[i]; }
    // k-th derivative at the expansion point: k! c_k
    T derivative_value(int k) const {
        T f = c_[static_cast<std::size_t>(k)];
        for (int i = 2; i <= k; ++i) f *= T(i);
        return f;
    }

    Jet truncated(int n) const {
        std::vector<T> c(c_.begin(), c_.begin() + std::min<int>(n, order()) + 1);
        return Jet(std::move(c));
    }

    // d/dt, order drops by one.
    Jet diff() const {
        if (order() == 0) return Jet(0);
        std::vector<T> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<int>(k));
        return Jet(std::move(d));
    }

    // Antiderivative with zero constant, order rises by one.
    Jet integral() const {
        std::vector<T> d(c_.size() + 1, T(0));
        for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / T(static_cast<int>(k + 1));
        return Jet(std::move(d));
    }

    template <class S>
    T eval(const S& t) const {
        T acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    Jet operator-() const {
        Jet r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    Jet& operator+=(const Jet& o) {
        resize_to(std::min(order(), o.order()));
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        resize_to(std::min(order(), o.order()));
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator+=(const T& s) { c_[0] += s; return *this; }
    Jet& operator*=(const T& s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, const T& s) { return a += s; }
    friend Jet operator+(const T& s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, const T& s) { a.c_[0] -= s; return a; }
    friend Jet operator-(const T& s, const Jet& a) { return (-a) + s; }
    friend Jet operator*(Jet a, const T& s) { return a *= s; }
    friend Jet operator*(const T& s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, const T& s) {
        for (auto& x : a.c_) x /= s;
        return a;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const int n = std::min(a.order(), b.order());
        std::vector<T> c(static_cast<std::size_t>(n + 1), T(0));
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) c[static_cast<std::size_t>(i + j)] += a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
        return Jet(std::move(c));
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        if (b.c_[0] == T(0)) throw std::domain_error("jet division by a series with zero constant term");
        const int n = std::min(a.order(), b.order());
        std::vector<T> q(static_cast<std::size_t>(n + 1), T(0));
        for (int k = 0; k <= n; ++k) {
            T s = a.c_[static_cast<std::size_t>(k)];
            for (int j = 1; j <= k; ++j) s -= b.c_[static_cast<std::size_t>(j)] * q[static_cast<std::size_t>(k - j)];
            q[static_cast<std::size_t>(k)] = s / b.c_[0];
        }
        return Jet(std::move(q));
    }
    friend Jet operator/(const T& s, const Jet& b) { return Jet(b.order(), s) / b; }

private:
    void resize_to(int n) { c_.resize(static_cast<std::size_t>(n + 1)); }
    std::vector<T> c_{T(0)};
};

// a^alpha for a series with nonzero constant term; the constant term uses the
// principal branch of std::pow.
template <class T, class E>
Jet<T> jet_pow(const Jet<T>& a, E alpha) {
    const int n = a.order();
    if (a[0] == T(0)) throw std::domain_error("jet_pow needs a nonzero constant term");
    std::vector<T> b(static_cast<std::size_t>(n + 1), T(0));
    b[0] = std::pow(a[0], alpha);
    for (int k = 1; k <= n; ++k) {
        T s(0);
        for (int j = 1; j <= k; ++j)
            s += (T(alpha) * T(j) - T(k - j)) * a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
        b[static_cast<std::size_t>(k)] = s / (T(k) * a[0]);
    }
    return Jet<T>(std::move(b));
}

template <class T>
Jet<T> jet_exp(const Jet<T>& a) {
    const int n = a.order();
    std::vector<T> b(static_cast<std::size_t>(n + 1), T(0));
    b[0] = std::exp(a[0]);
    for (int k = 1; k <= n; ++k) {
        T s(0);
        for (int j = 1; j <= k; ++j) s += T(j) * a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
        b[static_cast<std::size_t>(k)] = s / T(k);
    }
    return Jet<T>(std::move(b));
}

template <class T>
Jet<T> jet_log(const Jet<T>& a) {
    Jet<T> r = (a.diff() / a.truncated(a.order() - 1)).integral();
    r[0] = std::log(a[0]);
    return r;
}

// Composition f(g(t)) where g has zero constant term (Horner in g).
template <class T>
Jet<T> compose(const Jet<T>& f, const Jet<T>& g) {
    if (g[0] != T(0)) throw std::domain_error("compose: inner series must vanish at 0");
    const int n = std::min(f.order(), g.order());
    Jet<T> acc(n, T(0));
    for (int k = f.order(); k >= 0; --k) {
        acc = acc * g.truncated(n);
        acc[0] += f[static_cast<std::size_t>(k)];
    }
    return acc.truncated(n);
}

// Compositional inverse of f = t + O(t^2) (f[0] = 0, f[1] != 0).
template <class T>
Jet<T> revert(const Jet<T>& f) {
    const int n = f.order();
    if (f[0] != T(0) || f[1] == T(0)) throw std::domain_error("revert: needs f(0)=0, f'(0)!=0");
    Jet<T> t = Jet<T>::variable(n);
    Jet<T> g = t / f[1];
    // each sweep fixes one more coefficient
    for (int it = 0; it < n; ++it) g = g - (compose(f, g) - t) / f[1];
    return g;
}

}  // namespace typen
