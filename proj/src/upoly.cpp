// SPDX-License-Identifier: Apache-2.0
#include "typen/upoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace typen {

UPoly::UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

UPoly UPoly::monomial(const Rational& c, std::size_t deg) {
    std::vector<Rational> v(deg + 1);
    v[deg] = c;
    return UPoly(std::move(v));
}

UPoly UPoly::from_roots(const std::vector<Rational>& roots) {
    UPoly p = constant(1);
    for (const auto& r : roots) p = p * UPoly({-r, Rational(1)});
    return p;
}

void UPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational UPoly::eval(const Rational& x) const {
    Rational acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double UPoly::eval(double x) const {
    double acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->to_double();
    return acc;
}

UPoly UPoly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Rational(static_cast<long>(i));
    return UPoly(std::move(d));
}

UPoly UPoly::shifted(std::size_t k) const {
    if (is_zero()) return {};
    std::vector<Rational> v(k);
    v.insert(v.end(), c_.begin(), c_.end());
    return UPoly(std::move(v));
}

UPoly UPoly::monic() const {
    if (is_zero()) return {};
    return *this * (Rational(1) / lead());
}

UPoly& UPoly::operator+=(const UPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

UPoly& UPoly::operator-=(const UPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> v(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(v));
}

UPoly operator*(UPoly a, const Rational& s) {
    for (auto& c : a.c_) c *= s;
    a.trim();
    return a;
}

std::string UPoly::str(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (c_[i].is_zero()) continue;
        Rational c = c_[i];
        if (!first) os << (c.sign() < 0 ? " - " : " + ");
        else if (c.sign() < 0) os << "-";
        c = abs(c);
        bool unit = c == Rational(1);
        if (i == 0 || !unit) os << c.str();
        if (i > 0) os << (unit ? "" : "*") << var;
        if (i > 1) os << "^" << i;
        first = false;
    }
    return os.str();
}

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> r = a.coeffs();
    const int db = b.degree();
    if (a.degree() < db) return {UPoly(), a};
    std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
    const Rational inv = Rational(1) / b.lead();
    for (int k = a.degree() - db; k >= 0; --k) {
        Rational f = r[static_cast<std::size_t>(k + db)] * inv;
        q[static_cast<std::size_t>(k)] = f;
        if (f.is_zero()) continue;
        for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
    }
    return {UPoly(std::move(q)), UPoly(std::move(r))};
}

namespace {

std::vector<mpz_class> divisors(mpz_class n) {
    if (n < 0) n = -n;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) > 44) throw std::length_error("integer too large for divisor enumeration");
    std::vector<mpz_class> out;
    // trial division; the polynomials here have modest integer content
    for (mpz_class d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d * d != n) out.push_back(n / d);
        }
    }
    return out;
}

}  // namespace

UPoly gcd(const UPoly& a, const UPoly& b) {
    UPoly x = a, y = b;
    while (!y.is_zero()) {
        UPoly r = divmod(x, y).second;
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

std::vector<Rational> rational_roots(const UPoly& p) {
    std::set<Rational> found;
    if (p.degree() <= 0) return {};
    // strip factors of x
    std::size_t lo = 0;
    while (p.coeffs()[lo].is_zero()) ++lo;
    if (lo > 0) found.insert(Rational(0));
    // clear denominators
    mpz_class l = 1;
    for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.den().get_mpz_t());
    std::vector<mpz_class> z;
    for (std::size_t i = lo; i < p.coeffs().size(); ++i) z.push_back(p.coeffs()[i].num() * (l / p.coeffs()[i].den()));
    mpz_class content = 0;
    for (const auto& v : z) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
    for (auto& v : z) v /= content;
    if (z.size() > 1) {
        const UPoly q(std::vector<Rational>(p.coeffs().begin() + static_cast<long>(lo), p.coeffs().end()));
        for (const auto& a : divisors(z.front()))
            for (const auto& b : divisors(z.back()))
                for (int s : {1, -1}) {
                    Rational cand(mpq_class(s * a, b));
                    if (q.eval(cand).is_zero()) found.insert(cand);
                }
    }
    return {found.begin(), found.end()};
}

std::vector<std::complex<double>> numeric_roots(const UPoly& p) {
    const int n = p.degree();
    if (n <= 0) return {};
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n + 1));
    const double lead = p.lead().to_double();
    for (int i = 0; i <= n; ++i) a[static_cast<std::size_t>(i)] = p.coeffs()[static_cast<std::size_t>(i)].to_double() / lead;
    double radius = 0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(a[static_cast<std::size_t>(i)]));
    radius = 1 + radius;
    std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        z[static_cast<std::size_t>(k)] = std::polar(0.5 * radius, 2 * std::numbers::pi * k / n + 0.4);
    auto eval = [&](std::complex<double> x, std::complex<double>& d) {
        std::complex<double> v = 0;
        d = 0;
        for (int i = n; i >= 0; --i) {
            d = d * x + v;
            v = v * x + a[static_cast<std::size_t>(i)];
        }
        return v;
    };
    for (int it = 0; it < 500; ++it) {
        double worst = 0;
        for (int k = 0; k < n; ++k) {
            auto& zk = z[static_cast<std::size_t>(k)];
            std::complex<double> d;
            auto v = eval(zk, d);
            if (v == 0.0) continue;
            auto ratio = v / d;
            std::complex<double> s = 0;
            for (int j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
            auto w = ratio / (1.0 - ratio * s);
            zk -= w;
            worst = std::max(worst, std::abs(w) / (1 + std::abs(zk)));
        }
        if (worst < 1e-15) break;
    }
    std::sort(z.begin(), z.end(), [](auto x, auto y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
    return z;
}

int uniform_sign(const UPoly& p) {
    int s = 0;
    for (const auto& c : p.coeffs()) {
        if (c.is_zero()) continue;
        if (s == 0) s = c.sign();
        else if (s != c.sign()) return 0;
    }
    return s;
}

}  // namespace typen
