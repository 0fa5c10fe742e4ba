// SPDX-License-Identifier: Apache-2.0
#pragma once

// Puiseux solutions P = sum_k u_k (J - J0)^{(k+2)/3} of
//   P'' + (P' + 2ΛJ)^2/(2P) + 2C1^2/P + 10Λ/3 = 0
// and the regular (U, Z) chart around the same movable point.

#include "typen/jet.hpp"
#include "typen/mpoly.hpp"
#include "typen/rational.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace typen {

using cplx = std::complex<double>;
// Recursions run in extended precision; coefficients grow geometrically and
// the roundoff of double would otherwise reach 1e-9 by the twelfth term.
using cplxl = std::complex<long double>;

struct PuiseuxSeries {
    cplx J0;
    Rational base_exponent{2, 3};
    Rational step{1, 3};
    std::vector<cplx> coeffs;   // u_0 .. u_{order-1}
    int order = 0;
    std::string branch = "principal";  // s = (J - J0)^{1/3}, cut on the negative real axis
    cplx Lambda, C1;

    Rational exponent(int k) const { return Rational(k + 2, 3); }
    // P, dP/dJ, d2P/dJ2 at J using the principal cube root.
    void eval(cplx J, cplx& P, cplx& dP, cplx& d2P) const;
    // Same, with s = (J - J0)^{1/3} supplied (selects a cube-root branch).
    void eval_s(cplx s, cplx& P, cplx& dP, cplx& d2P) const;
};

struct ChartSeries {
    Jet<cplxl> J_of_U, Z_of_U;
    cplx J0, Z0, Lambda, C1;
};

// Triangular solve on the lattice (k+2)/3: the s^{n-2} row of the cleared
// equation is linear in u_n with weight 2n(n+3)u0/9.
template <class T>
std::vector<T> puiseux_solve(const T& u0, const T& inv_u0, const T& J0, const T& L, const T& C1, int n,
                             const std::function<T(long, long)>& num) {
    std::vector<T> u(static_cast<std::size_t>(n), num(0, 1));
    if (n == 0) return u;
    u[0] = u0;
    const T konst = num(4, 1) * L * L * J0 * J0 + num(4, 1) * C1 * C1;
    for (int k = 1; k < n; ++k) {
        T r = num(0, 1);
        for (int i = 1; i <= k - 1; ++i) {
            const int j = k - i;  // u_i from P or P', u_j from P'' or P'
            r += num(2 * (j + 2) * (j - 1) + (i + 2) * (j + 2), 9) * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
        }
        r += num(4 * (k + 1), 3) * L * J0 * u[static_cast<std::size_t>(k - 1)];
        if (k >= 4) r += num(4 * (k - 2) + 20, 3) * L * u[static_cast<std::size_t>(k - 4)];
        if (k == 2) r += konst;
        if (k == 5) r += num(8, 1) * L * L * J0;
        if (k == 8) r += num(4, 1) * L * L;
        u[static_cast<std::size_t>(k)] = -(r * inv_u0) * num(9, 2 * k * (k + 3));
    }
    return u;
}

PuiseuxSeries puiseux_expand(cplx u0, cplx J0, double Lambda, double C1, int n);
// Coefficients as Laurent polynomials in u0, J0, L, C1.
std::vector<MPoly> puiseux_symbolic(int n);

// Cleared residual 2PP'' + P'^2 + 4ΛJP' + 4Λ²J² + 4C1² + (20/3)ΛP and the
// uncleared one (divided by 2P).
cplx peq_cleared_residual(cplx J, cplx P, cplx dP, cplx d2P, cplx Lambda, cplx C1);
cplx peq_residual(cplx J, cplx P, cplx dP, cplx d2P, cplx Lambda, cplx C1);

ChartSeries regular_chart(cplx J0, cplx Z0, double Lambda, double C1, int n);
// Recompose the chart into Puiseux form; returns coefficients u_0..u_{m-1}
// with u_0 = a3^{-2/3}, a3 = 2/(3 Z0), principal cube root.
PuiseuxSeries chart_to_puiseux(const ChartSeries& ch);

struct SpecialClosedForm {
    cplx u0;
    double C1 = 0, Lambda = 0;
    int sign = 1;
    cplx shift;            // P = u0 (J + shift)^{2/3} - (3/2)Λ(J² + 4C1²/Λ²), shift = sign*2iC1/Λ
    double max_residual = 0;
    int samples = 0;
    cplx eval(cplx J) const;
};

SpecialClosedForm special_case_closed_form(cplx u0, double C1, double Lambda, int sign, int samples = 100,
                                           unsigned seed = 11);

}  // namespace typen
