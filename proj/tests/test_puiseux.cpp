// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "typen/puiseux.hpp"

#include <cmath>
#include <random>

using namespace typen;

TEST_CASE("first five Puiseux coefficients, symbolic") {
    auto u = puiseux_symbolic(5);
    MPoly u0 = MPoly::var("u0"), J0 = MPoly::var("J0"), L = MPoly::var("L"), C1 = MPoly::var("C1");
    MPoly q = L * L * J0 * J0 + MPoly(4) * C1 * C1;
    auto R = [](long a, long b) { return MPoly(Rational(a, b)); };
    CHECK(u[0] == u0);
    CHECK(u[1] == R(-3, 1) * L * J0);
    CHECK(u[2] == R(-9, 20) * q * u0.pow(-1));
    CHECK(u[3] == R(-3, 5) * L * J0 * q * u0.pow(-2));
    MPoly expect4 = -(R(3, 2) * L + R(27, 2800) * (R(109, 1) * L * L * J0 * J0 + R(36, 1) * C1 * C1) * q * u0.pow(-3));
    CHECK(u[4] == expect4);
}

TEST_CASE("flat reduction at J0 = 0, C1 = 0") {
    auto s = puiseux_expand(2.0, 0.0, -1.3, 0.0, 12);
    CHECK(std::abs(s.coeffs[4] - cplx(1.5 * 1.3)) < 1e-14);
    for (int k = 1; k < 12; ++k)
        if (k != 4) CHECK(std::abs(s.coeffs[static_cast<std::size_t>(k)]) < 1e-14);
}

TEST_CASE("residual order of the truncated Puiseux series") {
    auto s = puiseux_expand(1.0, 1.0, -1.0, 0.0, 12);
    auto res = [&](double h) {
        cplx P, dP, d2P, J = 1.0 + h;
        s.eval(J, P, dP, d2P);
        return std::abs(peq_cleared_residual(J, P, dP, d2P, -1.0, 0.0));
    };
    double slope = std::log10(res(1e-2) / res(1e-3));
    CHECK(slope == doctest::Approx(10.0 / 3.0).epsilon(0.02));
    // the three cube-root branches share the residual order
    for (int b = 0; b < 3; ++b) {
        auto rb = [&](double h) {
            cplx P, dP, d2P;
            cplx sb = std::pow(cplx(h), 1.0 / 3.0) * std::polar(1.0, 2 * M_PI * b / 3);
            s.eval_s(sb, P, dP, d2P);
            return std::abs(peq_cleared_residual(1.0 + h, P, dP, d2P, -1.0, 0.0));
        };
        CHECK(std::log10(rb(1e-2) / rb(1e-3)) == doctest::Approx(10.0 / 3.0).epsilon(0.02));
    }
}

TEST_CASE("regular chart leading terms") {
    cplx J0(0.3, -0.2), Z0(1.1, 0.4);
    double L = -0.7, C1 = 0.9;
    auto ch = regular_chart(J0, Z0, L, C1, 10);
    auto d = [](cplxl x) { return cplx(static_cast<double>(x.real()), static_cast<double>(x.imag())); };
    CHECK(std::abs(d(ch.J_of_U[1])) < 1e-15);
    CHECK(std::abs(d(ch.J_of_U[2])) < 1e-15);
    CHECK(std::abs(d(ch.J_of_U[3]) - 2.0 / (3.0 * Z0)) < 1e-14);
    CHECK(std::abs(d(ch.Z_of_U[2]) + 2.0 * (L * L * J0 * J0 + C1 * C1) / Z0) < 1e-14);
    auto flat = regular_chart(0.0, Z0, L, 0.0, 6);
    CHECK(std::abs(d(flat.Z_of_U[2])) < 1e-15);
    CHECK_THROWS(regular_chart(J0, 0.0, L, C1, 5));
}

TEST_CASE("chart recomposition equals the lattice solve") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (int t = 0; t < 10; ++t) {
        cplx Z0(d(rng), d(rng)), J0(d(rng), d(rng));
        if (std::abs(Z0) < 0.3) Z0 += 1.0;
        double L = d(rng), C1 = d(rng);
        auto p = chart_to_puiseux(regular_chart(J0, Z0, L, C1, 16));
        auto q = puiseux_expand(p.coeffs[0], J0, L, C1, p.order);
        // leading coefficient off the cut equals (3 Z0 / 2)^{2/3}
        cplx cube = std::pow(p.coeffs[0], 1.5);
        CHECK(std::min(std::abs(cube - 1.5 * Z0), std::abs(cube + 1.5 * Z0)) < 1e-10 * std::abs(Z0));
        for (int k = 0; k < p.order; ++k) {
            double scale = std::max(1.0, std::abs(q.coeffs[static_cast<std::size_t>(k)]));
            CHECK(std::abs(p.coeffs[static_cast<std::size_t>(k)] - q.coeffs[static_cast<std::size_t>(k)]) < 1e-10 * scale);
        }
    }
}

TEST_CASE("special closed form") {
    for (int sign : {1, -1}) {
        auto f = special_case_closed_form(cplx(0.8, 0.3), 0.7, -1.2, sign);
        CHECK(f.max_residual < 1e-12);
    }
    auto g = special_case_closed_form(cplx(1.3), 0.0, 2.0, 1);
    CHECK(std::abs(g.shift) == 0.0);
    CHECK(g.max_residual < 1e-12);
    CHECK_THROWS(special_case_closed_form(1.0, 1.0, 0.0, 1));
}
