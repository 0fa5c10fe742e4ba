// SPDX-License-Identifier: Apache-2.0
#include "typen/puiseux.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace typen {

void PuiseuxSeries::eval_s(cplx s, cplx& P, cplx& dP, cplx& d2P) const {
    P = dP = d2P = 0;
    for (int k = 0; k < static_cast<int>(coeffs.size()); ++k) {
        const cplx u = coeffs[static_cast<std::size_t>(k)];
        const double e = (k + 2) / 3.0;
        P += u * std::pow(s, k + 2);
        dP += u * e * std::pow(s, k - 1);
        d2P += u * e * (e - 1) * std::pow(s, k - 4);
    }
}

void PuiseuxSeries::eval(cplx J, cplx& P, cplx& dP, cplx& d2P) const {
    eval_s(std::pow(J - J0, 1.0 / 3.0), P, dP, d2P);
}

PuiseuxSeries puiseux_expand(cplx u0, cplx J0, double Lambda, double C1, int n) {
    if (u0 == cplx(0)) throw std::domain_error("puiseux_expand: degenerate leading term u0 = 0");
    if (n < 1) throw std::invalid_argument("puiseux_expand: n >= 1");
    PuiseuxSeries s;
    s.J0 = J0;
    s.order = n;
    s.Lambda = Lambda;
    s.C1 = C1;
    const cplxl U0(u0), one(1.0L);
    auto u = puiseux_solve<cplxl>(U0, one / U0, cplxl(J0), cplxl(Lambda), cplxl(C1), n, [](long p, long q) {
        return cplxl(static_cast<long double>(p) / static_cast<long double>(q));
    });
    for (const auto& x : u) s.coeffs.emplace_back(static_cast<double>(x.real()), static_cast<double>(x.imag()));
    return s;
}

std::vector<MPoly> puiseux_symbolic(int n) {
    return puiseux_solve<MPoly>(MPoly::var("u0"), MPoly::var("u0", -1), MPoly::var("J0"), MPoly::var("L"),
                                MPoly::var("C1"), n, [](long p, long q) { return MPoly(Rational(p, q)); });
}

cplx peq_cleared_residual(cplx J, cplx P, cplx dP, cplx d2P, cplx L, cplx C1) {
    return 2.0 * P * d2P + dP * dP + 4.0 * L * J * dP + 4.0 * L * L * J * J + 4.0 * C1 * C1 + (20.0 / 3.0) * L * P;
}

cplx peq_residual(cplx J, cplx P, cplx dP, cplx d2P, cplx L, cplx C1) {
    return peq_cleared_residual(J, P, dP, d2P, L, C1) / (2.0 * P);
}

ChartSeries regular_chart(cplx J0, cplx Z0, double Lambda, double C1, int n) {
    if (std::abs(Z0) == 0.0) throw std::domain_error("regular_chart: Z0 = 0, chart breaks down");
    const cplxl L = static_cast<long double>(Lambda), c1 = static_cast<long double>(C1);
    std::vector<cplxl> a(static_cast<std::size_t>(n + 1), 0.0L), b(static_cast<std::size_t>(n + 1), 0.0L);
    a[0] = cplxl(J0);
    b[0] = cplxl(Z0);
    auto D = [&](int i) { return i == 0 ? b[0] : b[static_cast<std::size_t>(i)] - 4.0L * L * a[static_cast<std::size_t>(i - 1)]; };
    for (int m = 0; m < n; ++m) {
        // rhs of (Z - 4ΛUJ) J_U = 2U^2 at U^m
        cplxl rj = m == 2 ? cplxl(2) : cplxl(0);
        // rhs of (Z - 4ΛUJ) Z_U = -(4/3)(3Λ²J² - ΛU² + 3C1²) U at U^m
        cplxl rz = 0;
        if (m >= 1) {
            const int q = m - 1;
            cplxl JJ = 0;
            for (int i = 0; i <= q; ++i) JJ += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(q - i)];
            cplxl inner = 3.0L * L * L * JJ;
            if (q == 2) inner -= L;
            if (q == 0) inner += 3.0L * c1 * c1;
            rz = -(4.0L / 3.0L) * inner;
        }
        for (int i = 1; i <= m; ++i) {
            const auto w = static_cast<long double>(m - i + 1);
            rj -= D(i) * w * a[static_cast<std::size_t>(m - i + 1)];
            rz -= D(i) * w * b[static_cast<std::size_t>(m - i + 1)];
        }
        a[static_cast<std::size_t>(m + 1)] = rj / (static_cast<long double>(m + 1) * b[0]);
        b[static_cast<std::size_t>(m + 1)] = rz / (static_cast<long double>(m + 1) * b[0]);
    }
    return {Jet<cplxl>(a), Jet<cplxl>(b), J0, Z0, Lambda, C1};
}

PuiseuxSeries chart_to_puiseux(const ChartSeries& ch) {
    const int N = ch.J_of_U.order();
    if (N < 4) throw std::invalid_argument("chart order too small to recompose");
    const cplxl a3 = ch.J_of_U[3];
    const cplxl c = std::pow(a3, 1.0L / 3.0L);
    // chi = a3 U^3 phi(U),  s = c U phi^{1/3}
    std::vector<cplxl> ph(static_cast<std::size_t>(N - 2));
    for (int m = 0; m <= N - 3; ++m) ph[static_cast<std::size_t>(m)] = ch.J_of_U[static_cast<std::size_t>(3 + m)] / a3;
    Jet<cplxl> phi13 = jet_pow(Jet<cplxl>(ph), 1.0L / 3.0L);
    std::vector<cplxl> v(static_cast<std::size_t>(N - 1), 0.0L);
    for (int m = 0; m <= N - 3; ++m) v[static_cast<std::size_t>(m + 1)] = phi13[static_cast<std::size_t>(m)];
    Jet<cplxl> W = revert(Jet<cplxl>(v));        // U as a series in sigma = s/c
    Jet<cplxl> P = W * W;
    PuiseuxSeries out;
    out.J0 = ch.J0;
    out.Lambda = ch.Lambda;
    out.C1 = ch.C1;
    const int m = P.order() - 1;  // coefficients u_0 .. u_{m-1}: s^2 .. s^{m+1}
    for (int k = 0; k < m; ++k) {
        const cplxl u = P[static_cast<std::size_t>(k + 2)] / std::pow(c, k + 2);
        out.coeffs.emplace_back(static_cast<double>(u.real()), static_cast<double>(u.imag()));
    }
    out.order = m;
    return out;
}

cplx SpecialClosedForm::eval(cplx J) const {
    return u0 * std::pow(J + shift, 2.0 / 3.0) - 1.5 * Lambda * (J * J + 4.0 * C1 * C1 / (Lambda * Lambda));
}

SpecialClosedForm special_case_closed_form(cplx u0, double C1, double Lambda, int sign, int samples, unsigned seed) {
    if (Lambda == 0.0) throw std::domain_error("special_case_closed_form: Lambda = 0 undefined");
    SpecialClosedForm f;
    f.u0 = u0;
    f.C1 = C1;
    f.Lambda = Lambda;
    f.sign = sign >= 0 ? 1 : -1;
    f.shift = cplx(0, f.sign * 2 * C1 / Lambda);
    f.samples = samples;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int i = 0; i < samples; ++i) {
        const cplx J(d(rng), d(rng));
        const cplx X = J + f.shift;
        const cplx P = f.eval(J);
        const cplx dP = (2.0 / 3.0) * u0 * std::pow(X, -1.0 / 3.0) - 3.0 * Lambda * J;
        const cplx d2P = -(2.0 / 9.0) * u0 * std::pow(X, -4.0 / 3.0) - 3.0 * Lambda;
        const double r = std::abs(peq_residual(J, P, dP, d2P, Lambda, C1));
        f.max_residual = std::max(f.max_residual, r);
    }
    return f;
}

}  // namespace typen
