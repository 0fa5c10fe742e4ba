// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "typen/rational.hpp"
#include "typen/upoly.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace typen {

// P_k(u0) / u0^denom_power.
struct U0Poly {
    UPoly numerator;
    int denom_power = 0;

    Rational eval(const Rational& u0) const;
    int degree() const { return numerator.degree(); }
    std::string str() const;
};

struct PowerSeriesSolution {
    char variable = 'w';                  // 'w' for g(w), 'z' for J(z)
    Rational u0;
    std::optional<Rational> C;            // g family
    std::optional<Rational> Lambda, C1;   // J family
    std::vector<Rational> coeffs;         // indexed by power
    int order = 0;                        // highest power carried
};

struct BoundReport {
    Rational u0, C, M;
    int j_max = 0;
    bool ineq1_holds = false;
    bool ineq2_holds = false;
    std::optional<int> first_violation;
    Rational margin_min;                  // min_j (C M^{2j}/(2j)^2 - |u_{2j}|)
    Rational ineq1_lhs, ineq1_rhs;
};

struct FactorEntry {
    int k = 0;
    bool remainder_zero = false;
    bool vanishes_at_minus_3_4 = false;
    bool vanishes_at_minus_6 = false;
    UPoly quotient;
    std::vector<double> real_roots;       // numeric, reporting only
};

struct CommonFactorReport {
    std::vector<FactorEntry> entries;
    UPoly quotient_gcd;                   // gcd of quotients over the gcd window
    int gcd_k_max = 10;
    std::vector<Rational> common_rational_roots;
    bool all_remainders_zero() const;
};

inline constexpr int kSeriesCeiling = 64;

// Series g(w) = sum u_{2k} w^{2k} of 2 g g'' + (g' + 2w)^2 + 4C + (20/3) g = 0.
// u2, u4 come from the closed forms, then the three-term recursion.
PowerSeriesSolution g_coefficients(const Rational& u0, int k_max, const Rational& C = Rational(1));
// Same object by direct Taylor matching of the cleared ODE (independent path).
PowerSeriesSolution g_coefficients_taylor(const Rational& u0, int k_max, const Rational& C = Rational(1));
// Cleared-form residual polynomial of the truncated series.
UPoly g_series_residual(const PowerSeriesSolution& s);

// Entry k holds u_{2k} = P_k(u0)/u0^{2k-1}, k = 0..k_max.
std::vector<U0Poly> g_coefficients_symbolic(int k_max);

CommonFactorReport check_common_factor(int k_max, int gcd_k_max = 10);

BoundReport verify_theorem4(const Rational& u0, const Rational& C, const Rational& M, int j_max);

// Taylor coefficients of J(z) with J(0)=0, J'(0)=u0, J''(0)=0 from the
// third-order equation (cleared by 2J').
PowerSeriesSolution j_taylor(const Rational& u0, const Rational& Lambda, int order, const Rational& C1 = Rational(0));

// g'' + (g' + 2w)^2/(2g) + 2C/g + 10/3
template <class T>
T residual_g(const T& g, const T& gp, const T& gpp, const T& w, const T& C) {
    if (g == T(0)) throw std::domain_error("residual_g: singular point g = 0");
    return gpp + (gp + T(2) * w) * (gp + T(2) * w) / (T(2) * g) + T(2) * C / g + T(10) / T(3);
}

// K as a complex number: ΛJJ'' − (2/3)ΛJ'^2 + 2(Λ²J² − 2C1²)J'  +  i(−2C1(J'' + 3ΛJJ')).
std::complex<double> K_value(double J, double Jp, double Jpp, double Lambda, double C1);
// Exact real/imag parts.
std::pair<Rational, Rational> K_exact(const Rational& J, const Rational& Jp, const Rational& Jpp,
                                      const Rational& Lambda, const Rational& C1);

}  // namespace typen
