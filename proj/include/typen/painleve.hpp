// SPDX-License-Identifier: Apache-2.0
#pragma once

// Term language, dominant balances, Fuchs indices and the weak Painlevé
// verdict for polynomial ODEs  sum c * y^a y'^b y''^d y'''^e x^f = 0.
//
// Grammar (whitespace ignored):
//   ode    := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := INT | '(' ['-'] INT '/' INT ')' | ident ['^' INT]
//           | 'y' {'\''} ['^' INT] | 'x' ['^' INT]
// ident is any name other than x, y, x0, u0, a<digits> (a parameter such as L or C).

#include "typen/mpoly.hpp"
#include "typen/rational.hpp"
#include "typen/upoly.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace typen {

struct OdeTerm {
    MPoly coeff;                 // polynomial in the parameters
    std::array<int, 4> d{};      // exponents of y, y', y'', y'''
    int xpow = 0;

    int degree() const { return d[0] + d[1] + d[2] + d[3]; }
    int weight() const { return d[1] + 2 * d[2] + 3 * d[3]; }
};

struct OdeForm {
    std::vector<OdeTerm> terms;  // canonical: merged, sorted, no zero coefficients

    int order() const;
    std::string str() const;     // canonical text, re-parses to the same form
    double eval(double x, const std::array<double, 4>& y, const std::map<std::string, double>& params) const;
};

class OdeParseError : public std::runtime_error {
public:
    OdeParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

OdeForm parse_ode(std::string_view text);

// Max |cleared - multiplier * residual| / (1 + |cleared|) over random points.
double verify_clearing(const OdeForm& ode, const std::map<std::string, double>& params,
                       const std::function<double(double, const std::array<double, 4>&)>& residual,
                       const std::function<double(double, const std::array<double, 4>&)>& multiplier, int points = 10,
                       unsigned seed = 5);

// a + b*sqrt(d) with d squarefree (d < 0 means complex), b = 0 for rationals.
struct QuadSurd {
    Rational a, b;
    long d = 0;

    bool is_rational() const { return b.is_zero(); }
    bool is_complex() const { return !b.is_zero() && d < 0; }
    double approx() const;       // real part for complex values
    std::string str() const;     // "4/3", "(-1+sqrt(57))/2"
    friend bool operator==(const QuadSurd& x, const QuadSurd& y) { return x.a == y.a && x.b == y.b && x.d == y.d; }
};

struct Balance {
    Rational m;
    bool u0_free = false;
    std::optional<MPoly> u0;            // fixed monomial value when solved
    std::string constraint;             // human-readable description
    std::vector<std::size_t> dominant;  // indices into OdeForm::terms
    Rational order;                     // common lowest exponent
};

struct ExcludedBalance {
    std::string region;
    std::string blocking_term;
};

struct BalanceReport {
    std::vector<Balance> balances;
    std::vector<ExcludedBalance> excluded;
    std::vector<std::string> unresolved;  // balances whose u0 could not be solved exactly
};

BalanceReport dominant_balances(const OdeForm& ode);

struct ResonanceSet {
    Balance balance;
    UPoly indicial;                 // normalised, in j
    std::vector<QuadSurd> indices;  // ascending by approximate value
    bool from_order_only = false;   // first-order shortcut (u0 not solved)
};

ResonanceSet fuchs_indices(const OdeForm& ode, const Balance& balance);

struct CompatibilityRow {
    Rational resonance;             // j
    bool compatible = false;
    std::string detail;
};

struct BalanceVerdict {
    ResonanceSet resonances;
    bool rational = true;
    std::vector<CompatibilityRow> compatibility;
    std::vector<std::pair<Rational, MPoly>> witness;  // (exponent, coefficient)
    int witness_residual_order = 0;   // terms verified to vanish
    std::string note;
};

struct PainleveVerdict {
    bool pass = false;
    std::vector<std::string> reasons;
    std::vector<BalanceVerdict> balances;
    BalanceReport balance_report;
};

PainleveVerdict weak_painleve_verdict(const OdeForm& ode);

// Canonical inputs used across tests and the command line.
namespace odes {
inline constexpr const char* PEQ = "2*y*y'' + y'^2 + 4*L*x*y' + 4*L^2*x^2 + 4*C^2 + (20/3)*L*y";
inline constexpr const char* JEQ =
    "2*y'*y''' - y''^2 + 4*L*y*y'*y'' + (20/3)*L*y'^3 + 4*L^2*y^2*y'^2 + 4*C^2*y'^2";
inline constexpr const char* Abel =
    "x*y' - 4*x^2*y^3 - (22/3)*x*y^3 - 2*y^3 - 5*x*y^2 - 2*y^2 - (1/2)*y";
}  // namespace odes

}  // namespace typen
