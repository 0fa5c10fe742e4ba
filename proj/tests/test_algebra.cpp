// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "typen/jet.hpp"
#include "typen/mpoly.hpp"
#include "typen/upoly.hpp"

#include <cmath>

using namespace typen;

TEST_CASE("rational normalisation and parsing") {
    Rational a(6, -4);
    CHECK(a.str() == "-3/2");
    CHECK(Rational::parse("-14/12") == Rational(-7, 6));
    CHECK(Rational::parse("+5") == Rational(5));
    CHECK(Rational(0, 7).str() == "0");
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("1.5"));
    CHECK(pow(Rational(2, 3), -2) == Rational(9, 4));
}

TEST_CASE("polynomial division and roots") {
    UPoly f = UPoly::from_roots({Rational(-3, 4), Rational(-6), Rational(2, 5)});
    auto [q, r] = divmod(f, UPoly::from_roots({Rational(-6)}));
    CHECK(r.is_zero());
    CHECK(q == UPoly::from_roots({Rational(-3, 4), Rational(2, 5)}));
    auto roots = rational_roots(f * Rational(7, 3));
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == Rational(-6));
    CHECK(roots[1] == Rational(-3, 4));
    CHECK(roots[2] == Rational(2, 5));
    CHECK(gcd(f, UPoly::from_roots({Rational(2, 5), Rational(9)})) == UPoly::from_roots({Rational(2, 5)}));
    auto nr = numeric_roots(f);
    REQUIRE(nr.size() == 3);
    CHECK(nr[0].real() == doctest::Approx(-6));
    CHECK(uniform_sign(UPoly({Rational(-1), Rational(-2)})) == -1);
    CHECK(uniform_sign(UPoly({Rational(-1), Rational(2)})) == 0);
}

TEST_CASE("multivariate Laurent arithmetic") {
    MPoly x = MPoly::var("x"), y = MPoly::var("y");
    MPoly p = (x + y) * (x - y);
    CHECK(p == x.pow(2) - y.pow(2));
    CHECK(p.subs("y", x).is_zero());
    MPoly m = MPoly::term(Rational(3), {{"x", 2}});
    CHECK((p * m).div_monomial(m) == p);
    CHECK(x.pow(-2) * x.pow(2) == MPoly(1));
    CHECK(p.eval({{"x", 2.0}, {"y", 1.0}}) == doctest::Approx(3.0));
    CHECK(p.coeff_of("x", 2) == MPoly(1));
}

TEST_CASE("jet algebra agrees with finite differences") {
    // f = exp(t) / (1 + t^2) around t0 = 0.3
    const double t0 = 0.3, h = 1e-4;
    auto f = [](double t) { return std::exp(t) / (1 + t * t); };
    Jet<double> t = Jet<double>::variable(6, t0);
    Jet<double> j = jet_exp(t) / (1.0 + t * t);
    double d1 = (f(t0 + h) - f(t0 - h)) / (2 * h);
    double d2 = (f(t0 + h) - 2 * f(t0) + f(t0 - h)) / (h * h);
    CHECK(j.derivative_value(1) == doctest::Approx(d1).epsilon(1e-6));
    CHECK(j.derivative_value(2) == doctest::Approx(d2).epsilon(1e-6));
    // third and fourth derivatives via differences of the jet's own lower derivatives
    auto dj = [&](double s, int k) {
        Jet<double> u = Jet<double>::variable(6, s);
        return (jet_exp(u) / (1.0 + u * u)).derivative_value(k);
    };
    CHECK(j.derivative_value(3) == doctest::Approx((dj(t0 + h, 2) - dj(t0 - h, 2)) / (2 * h)).epsilon(1e-6));
    CHECK(j.derivative_value(4) == doctest::Approx((dj(t0 + h, 3) - dj(t0 - h, 3)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("series reversion and powers") {
    Jet<double> t = Jet<double>::variable(8);
    Jet<double> f = t + 0.5 * t * t - 0.25 * t * t * t;
    Jet<double> g = revert(f);
    Jet<double> id = compose(f, g);
    CHECK(id[1] == doctest::Approx(1));
    for (int k = 2; k <= 8; ++k) CHECK(std::abs(id[static_cast<std::size_t>(k)]) < 1e-12);
    Jet<double> c = jet_pow(1.0 + t, 1.0 / 3.0);
    Jet<double> c3 = c * c * c;
    for (int k = 2; k <= 8; ++k) CHECK(std::abs(c3[static_cast<std::size_t>(k)]) < 1e-12);
}
