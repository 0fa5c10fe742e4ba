// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "typen/rational.hpp"

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace typen {

// Dense univariate polynomial over Q, ascending coefficients, no trailing zeros.
class UPoly {
public:
    UPoly() = default;
    explicit UPoly(std::vector<Rational> c);
    static UPoly constant(const Rational& c) { return UPoly({c}); }
    static UPoly monomial(const Rational& c, std::size_t deg);
    static UPoly from_roots(const std::vector<Rational>& roots);

    const std::vector<Rational>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational eval(const Rational& x) const;
    double eval(double x) const;
    UPoly derivative() const;
    UPoly shifted(std::size_t k) const;  // multiply by x^k
    UPoly monic() const;

    UPoly& operator+=(const UPoly& o);
    UPoly& operator-=(const UPoly& o);
    friend UPoly operator+(UPoly a, const UPoly& b) { return a += b; }
    friend UPoly operator-(UPoly a, const UPoly& b) { return a -= b; }
    friend UPoly operator*(const UPoly& a, const UPoly& b);
    friend UPoly operator*(UPoly a, const Rational& s);
    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

    std::string str(const std::string& var = "x") const;

private:
    void trim();
    std::vector<Rational> c_;
};

// Euclidean division: a = q*b + r, deg r < deg b.
std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);

// Monic gcd over Q (zero polynomial when both are zero).
UPoly gcd(const UPoly& a, const UPoly& b);

// All rational roots (rational-root theorem on the primitive integer form),
// without multiplicity, ascending. Throws when the integer content is too
// large for divisor enumeration; take a gcd first in that case.
std::vector<Rational> rational_roots(const UPoly& p);

// Numerical complex roots (Aberth iteration); for reporting only.
std::vector<std::complex<double>> numeric_roots(const UPoly& p);

// One-sign test over the nonzero coefficients; returns +1, -1 or 0 (mixed).
int uniform_sign(const UPoly& p);

}  // namespace typen
