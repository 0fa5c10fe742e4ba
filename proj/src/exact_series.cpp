// SPDX-License-Identifier: Apache-2.0
#include "typen/exact_series.hpp"

#include "typen/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace typen {

Rational U0Poly::eval(const Rational& u0) const { return numerator.eval(u0) * pow(u0, -denom_power); }

std::string U0Poly::str() const {
    return "(" + numerator.str("u0") + ")/u0^" + std::to_string(denom_power);
}

namespace {

void require_nonzero(const Rational& u0) {
    if (u0.is_zero()) throw std::domain_error("series requires g(0) != 0");
}

// Cleared-form coefficient of w^n for the truncated even series held in u
// (u[i] is the coefficient of w^i; missing entries are zero).
Rational cleared_coeff(const std::vector<Rational>& u, int n, const Rational& C) {
    auto at = [&](int i) { return (i >= 0 && i < static_cast<int>(u.size())) ? u[static_cast<std::size_t>(i)] : Rational(0); };
    Rational s;
    // 2 g g''
    for (int i = 0; i <= n; ++i) {
        int j = n - i;  // power in g''
        s += Rational(2) * at(i) * at(j + 2) * Rational((j + 2) * (j + 1));
    }
    // (g' + 2w)^2 = g'^2 + 4 w g' + 4 w^2
    for (int i = 0; i <= n; ++i) s += at(i + 1) * Rational(i + 1) * at(n - i + 1) * Rational(n - i + 1);
    s += Rational(4) * at(n) * Rational(n);
    if (n == 2) s += Rational(4);
    if (n == 0) s += Rational(4) * C;
    s += Rational(20, 3) * at(n);
    return s;
}

}  // namespace

PowerSeriesSolution g_coefficients(const Rational& u0, int k_max, const Rational& C) {
    require_nonzero(u0);
    if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
    PowerSeriesSolution s;
    s.variable = 'w';
    s.u0 = u0;
    s.C = C;
    s.order = 2 * k_max;
    std::vector<Rational> u(static_cast<std::size_t>(k_max + 1));  // u[k] = u_{2k}
    u[0] = u0;
    if (k_max >= 1) {
        if (C == Rational(1)) u[1] = -(Rational(5) * u0 + Rational(3)) / (Rational(3) * u0);
        else u[1] = -(C + Rational(5, 3) * u0) / u0;
    }
    if (k_max >= 2) {
        if (C == Rational(1)) {
            u[2] = Rational(-2) * (u0 + Rational(3, 4)) * (u0 + Rational(6)) / (Rational(27) * pow(u0, 3));
        } else {
            // k = 1 row of the recursion, including the inhomogeneous term
            u[2] = -(Rational(11, 3) * u[1] + Rational(2) * u[1] * u[1] + Rational(1)) / (Rational(6) * u0);
        }
    }
    for (int k = 2; k < k_max; ++k) {
        Rational acc = (Rational(2 * k) + Rational(5, 3)) * u[static_cast<std::size_t>(k)];
        for (int l = 0; l <= k - 1; ++l)
            acc += Rational((k + l + 1) * (l + 1)) * u[static_cast<std::size_t>(l + 1)] * u[static_cast<std::size_t>(k - l)];
        u[static_cast<std::size_t>(k + 1)] = -acc / (Rational((2 * k + 1) * (k + 1)) * u0);
    }
    s.coeffs.assign(static_cast<std::size_t>(2 * k_max + 1), Rational(0));
    for (int k = 0; k <= k_max; ++k) s.coeffs[static_cast<std::size_t>(2 * k)] = u[static_cast<std::size_t>(k)];
    return s;
}

PowerSeriesSolution g_coefficients_taylor(const Rational& u0, int k_max, const Rational& C) {
    require_nonzero(u0);
    PowerSeriesSolution s;
    s.variable = 'w';
    s.u0 = u0;
    s.C = C;
    s.order = 2 * k_max;
    std::vector<Rational> u(static_cast<std::size_t>(2 * k_max + 1));
    u[0] = u0;
    // The w^n row fixes the coefficient of w^{n+2} through the 2 u0 (n+2)(n+1) term.
    for (int n = 0; n + 2 <= 2 * k_max; ++n) {
        Rational r = cleared_coeff(u, n, C);
        u[static_cast<std::size_t>(n + 2)] = -r / (Rational(2 * (n + 2) * (n + 1)) * u0);
    }
    s.coeffs = std::move(u);
    return s;
}

UPoly g_series_residual(const PowerSeriesSolution& s) {
    const Rational C = s.C.value_or(Rational(1));
    const int n = static_cast<int>(s.coeffs.size());
    std::vector<Rational> r(static_cast<std::size_t>(2 * n + 2));
    for (int i = 0; i < static_cast<int>(r.size()); ++i) r[static_cast<std::size_t>(i)] = cleared_coeff(s.coeffs, i, C);
    return UPoly(std::move(r));
}

namespace {

// N/u0^d with exact alignment of denominators.
U0Poly u0_add(const U0Poly& a, const U0Poly& b) {
    int d = std::max(a.denom_power, b.denom_power);
    UPoly na = a.numerator.shifted(static_cast<std::size_t>(d - a.denom_power));
    UPoly nb = b.numerator.shifted(static_cast<std::size_t>(d - b.denom_power));
    return {na + nb, d};
}

U0Poly u0_mul(const U0Poly& a, const U0Poly& b) { return {a.numerator * b.numerator, a.denom_power + b.denom_power}; }

U0Poly u0_scale(const U0Poly& a, const Rational& s) { return {a.numerator * s, a.denom_power}; }

U0Poly with_denom(U0Poly a, int d) {
    if (a.denom_power > d) throw std::logic_error("U0Poly denominator larger than expected");
    a.numerator = a.numerator.shifted(static_cast<std::size_t>(d - a.denom_power));
    a.denom_power = d;
    return a;
}

}  // namespace

std::vector<U0Poly> g_coefficients_symbolic(int k_max) {
    if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
    std::vector<U0Poly> u;
    u.push_back({UPoly::constant(1), -1});  // u0 itself
    if (k_max >= 1) u.push_back({UPoly({Rational(-1), Rational(-5, 3)}), 1});
    if (k_max >= 2) {
        UPoly f = UPoly({Rational(3, 4), Rational(1)}) * UPoly({Rational(6), Rational(1)});
        u.push_back({f * Rational(-2, 27), 3});
    }
    for (int k = 2; k < k_max; ++k) {
        U0Poly acc = u0_scale(u[static_cast<std::size_t>(k)], Rational(2 * k) + Rational(5, 3));
        for (int l = 0; l <= k - 1; ++l)
            acc = u0_add(acc, u0_scale(u0_mul(u[static_cast<std::size_t>(l + 1)], u[static_cast<std::size_t>(k - l)]),
                                       Rational((k + l + 1) * (l + 1))));
        U0Poly next = u0_scale(acc, Rational(-1) / Rational((2 * k + 1) * (k + 1)));
        next.denom_power += 1;
        u.push_back(with_denom(next, 2 * (k + 1) - 1));
    }
    for (std::size_t k = 1; k < u.size(); ++k) u[k] = with_denom(u[k], 2 * static_cast<int>(k) - 1);
    return u;
}

bool CommonFactorReport::all_remainders_zero() const {
    return std::all_of(entries.begin(), entries.end(), [](const FactorEntry& e) { return e.remainder_zero; });
}

CommonFactorReport check_common_factor(int k_max, int gcd_k_max) {
    if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
    CommonFactorReport rep;
    rep.gcd_k_max = std::min(gcd_k_max, k_max);
    const auto P = g_coefficients_symbolic(k_max);
    const UPoly f = UPoly({Rational(3, 4), Rational(1)}) * UPoly({Rational(6), Rational(1)});
    for (int k = 2; k <= k_max; ++k) {
        const UPoly& p = P[static_cast<std::size_t>(k)].numerator;
        auto [q, r] = divmod(p, f);
        FactorEntry e;
        e.k = k;
        e.remainder_zero = r.is_zero();
        e.vanishes_at_minus_3_4 = p.eval(Rational(-3, 4)).is_zero();
        e.vanishes_at_minus_6 = p.eval(Rational(-6)).is_zero();
        e.quotient = q;
        for (auto z : numeric_roots(q))
            if (std::abs(z.imag()) < 1e-9 * (1 + std::abs(z.real()))) e.real_roots.push_back(z.real());
        rep.entries.push_back(std::move(e));
        if (k == 2) rep.quotient_gcd = q.monic();
        else if (k <= rep.gcd_k_max) rep.quotient_gcd = gcd(rep.quotient_gcd, q);
    }
    if (rep.quotient_gcd.degree() >= 1) rep.common_rational_roots = rational_roots(rep.quotient_gcd);
    return rep;
}

BoundReport verify_theorem4(const Rational& u0, const Rational& C, const Rational& M, int j_max) {
    require_nonzero(u0);
    if (C.sign() <= 0 || M.sign() <= 0) throw std::domain_error("C and M must be positive");
    BoundReport b;
    b.u0 = u0;
    b.C = C;
    b.M = M;
    b.j_max = j_max;
    const Rational au0 = abs(u0);
    b.ineq1_lhs = abs(Rational(2) * (u0 + Rational(3, 4)) * (u0 + Rational(6)) / (Rational(27) * pow(u0, 3)));
    b.ineq1_rhs = C * pow(M, 4) / Rational(16);
    b.ineq1_holds = b.ineq1_lhs <= b.ineq1_rhs;
    // pi^2 enclosed by rational bounds; the inequality is decided only when
    // both ends agree, an undecided case reports false.
    const Rational pi2_hi = Rational::parse("98696044011/10000000000");
    const Rational base = (Rational(5, 3) + Rational(1) / au0) * Rational(9) / (Rational(4) * M * M);
    const Rational lhs_hi = base + (pi2_hi / Rational(12) - Rational(1, 4)) * C;
    b.ineq2_holds = lhs_hi <= au0;
    const auto s = g_coefficients(u0, std::max(j_max, 2));
    bool have_margin = false;
    for (int j = 2; j <= j_max; ++j) {
        const Rational bound = C * pow(M, 2 * j) / Rational(4 * j * j);
        const Rational m = bound - abs(s.coeffs[static_cast<std::size_t>(2 * j)]);
        if (!have_margin || m < b.margin_min) b.margin_min = m, have_margin = true;
        if (m.sign() < 0 && !b.first_violation) b.first_violation = j;
    }
    return b;
}

PowerSeriesSolution j_taylor(const Rational& u0, const Rational& Lambda, int order, const Rational& C1) {
    if (u0.sign() <= 0) throw std::domain_error("j_taylor: J'(0) = u0 must be positive");
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    PowerSeriesSolution s;
    s.variable = 'z';
    s.u0 = u0;
    s.Lambda = Lambda;
    s.C1 = C1;
    s.order = order;
    std::vector<Rational> a(static_cast<std::size_t>(order + 1));
    a[1] = u0;
    // Coefficient of z^n in 2J'J''' − J''^2 + 4ΛJJ'J'' + (20/3)ΛJ'^3 + 4(Λ^2J^2 + C1^2)J'^2
    // with a_{n+3} still zero; the unknown enters only through 2 a_1 (n+1)(n+2)(n+3).
    for (int n = 0; n + 3 <= order; ++n) {
        const int N = n;
        Jet<Rational> J(std::vector<Rational>(a.begin(), a.begin() + std::min(order, N + 3) + 1));
        J = J.truncated(N + 3);
        Jet<Rational> J1 = J.diff(), J2 = J1.diff(), J3 = J2.diff();
        auto tr = [N](const Jet<Rational>& x) { return x.truncated(N); };
        Jet<Rational> e = Rational(2) * tr(J1) * tr(J3) - tr(J2) * tr(J2) + Rational(4) * Lambda * tr(J) * tr(J1) * tr(J2) +
                          Rational(20, 3) * Lambda * tr(J1) * tr(J1) * tr(J1) +
                          Rational(4) * (Lambda * Lambda * tr(J) * tr(J) + C1 * C1) * tr(J1) * tr(J1);
        const Rational r = e.order() >= N ? e[static_cast<std::size_t>(N)] : Rational(0);
        a[static_cast<std::size_t>(n + 3)] = -r / (Rational(2 * (n + 1) * (n + 2) * (n + 3)) * u0);
    }
    s.coeffs = std::move(a);
    return s;
}

std::complex<double> K_value(double J, double Jp, double Jpp, double L, double C1) {
    const double re = L * J * Jpp - (2.0 / 3.0) * L * Jp * Jp + 2 * (L * L * J * J - 2 * C1 * C1) * Jp;
    const double im = -2 * C1 * (Jpp + 3 * L * J * Jp);
    return {re, im};
}

std::pair<Rational, Rational> K_exact(const Rational& J, const Rational& Jp, const Rational& Jpp, const Rational& L,
                                      const Rational& C1) {
    Rational re = L * J * Jpp - Rational(2, 3) * L * Jp * Jp + Rational(2) * (L * L * J * J - Rational(2) * C1 * C1) * Jp;
    Rational im = Rational(-2) * C1 * (Jpp + Rational(3) * L * J * Jp);
    return {re, im};
}

}  // namespace typen
