// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "typen/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace typen {

// Sorted (variable, exponent) list; exponents nonzero, may be negative.
using Monomial = std::vector<std::pair<std::string, int>>;

Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_pow(const Monomial& a, int e);

// Sparse multivariate Laurent polynomial over Q with named variables.
class MPoly {
public:
    MPoly() = default;
    MPoly(const Rational& c);  // NOLINT implicit constant
    MPoly(int c) : MPoly(Rational(c)) {}  // NOLINT
    static MPoly var(const std::string& name, int e = 1);
    static MPoly term(const Rational& c, Monomial m);

    const std::map<Monomial, Rational>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    std::optional<Rational> constant_value() const;   // if constant
    bool is_monomial() const { return t_.size() == 1; }
    Rational coeff(const Monomial& m) const;
    std::string str() const;

    MPoly& operator+=(const MPoly& o);
    MPoly& operator-=(const MPoly& o);
    MPoly& operator*=(const MPoly& o);
    MPoly operator-() const;
    friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
    friend MPoly operator*(const MPoly& a, const MPoly& b) { MPoly r = a; r *= b; return r; }
    friend bool operator==(const MPoly& a, const MPoly& b) { return a.t_ == b.t_; }
    friend bool operator<(const MPoly& a, const MPoly& b) { return a.t_ < b.t_; }

    // Exact division by a single-term polynomial (Laurent monomial inverse).
    MPoly div_monomial(const MPoly& m) const;
    MPoly pow(int e) const;   // e >= 0, or e < 0 for a single term
    MPoly subs(const std::string& name, const MPoly& value) const;  // value may be any poly for e >= 0
    double eval(const std::map<std::string, double>& at) const;
    int max_degree(const std::string& name) const;
    int min_degree(const std::string& name) const;
    // Coefficient polynomial of name^e.
    MPoly coeff_of(const std::string& name, int e) const;

private:
    std::map<Monomial, Rational> t_;
};

}  // namespace typen
