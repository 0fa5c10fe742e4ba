// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "typen/exact_series.hpp"
#include "typen/painleve.hpp"
#include "typen/puiseux.hpp"

#include <chrono>
#include <set>

using namespace typen;

namespace {

std::vector<std::string> index_strings(const ResonanceSet& r) {
    std::vector<std::string> out;
    for (const auto& q : r.indices) out.push_back(q.str());
    return out;
}

Rational ff(const Rational& m, int k) {
    Rational r(1);
    for (int i = 0; i < k; ++i) r *= m - Rational(i);
    return r;
}

// Independent scan: does some u0 != 0 cancel the lowest-order terms at exponent m?
bool scan_balance(const OdeForm& ode, const Rational& m) {
    std::optional<Rational> lo;
    for (const auto& t : ode.terms) {
        Rational f(1);
        for (int k = 0; k < 4; ++k) f *= pow(ff(m, k), t.d[static_cast<std::size_t>(k)]);
        if (f.is_zero()) continue;
        Rational o = Rational(t.degree()) * m - Rational(t.weight());
        if (!lo || o < *lo) lo = o;
    }
    std::map<int, MPoly> by_deg;
    int count = 0;
    for (const auto& t : ode.terms) {
        Rational f(1);
        for (int k = 0; k < 4; ++k) f *= pow(ff(m, k), t.d[static_cast<std::size_t>(k)]);
        if (f.is_zero() || Rational(t.degree()) * m - Rational(t.weight()) != *lo) continue;
        ++count;
        by_deg[t.degree()] += t.coeff * (t.xpow ? MPoly::var("x0", t.xpow) : MPoly(1)) * MPoly(f);
    }
    if (count < 2) return false;
    int nonzero = 0;
    for (const auto& [d, c] : by_deg)
        if (!c.is_zero()) ++nonzero;
    return nonzero == 0 || (nonzero >= 2 && by_deg.rbegin()->first > 0);
}

}  // namespace

TEST_CASE("parse: cleared PEQ agrees with the g residual") {
    OdeForm peq = parse_ode(odes::PEQ);
    CHECK(peq.terms.size() == 6);
    CHECK(peq.order() == 2);
    // 2g * residual_g with Λ = 1; 4C^2 in the term language is 4C there
    double worst = verify_clearing(
        peq, {{"L", 1.0}, {"C", 1.0}},
        [](double x, const std::array<double, 4>& y) { return residual_g(y[0], y[1], y[2], x, 1.0); },
        [](double, const std::array<double, 4>& y) { return 2 * y[0]; }, 10);
    CHECK(worst < 1e-12);
    // a deliberately wrong clearing is caught
    OdeForm bad = parse_ode("2*y*y'' + y'^2 + 4*L*x*y' + 4*L^2*x^2 + 4*C^2 + 6*L*y");
    CHECK(verify_clearing(bad, {{"L", 1.0}, {"C", 1.0}},
                          [](double x, const std::array<double, 4>& y) { return residual_g(y[0], y[1], y[2], x, 1.0); },
                          [](double, const std::array<double, 4>& y) { return 2 * y[0]; }) > 1e-3);
}

TEST_CASE("parse: small forms and errors") {
    OdeForm f = parse_ode("y'");
    REQUIRE(f.terms.size() == 1);
    CHECK(f.terms[0].d == std::array<int, 4>{0, 1, 0, 0});
    CHECK(f.terms[0].xpow == 0);
    CHECK(f.terms[0].coeff == MPoly(1));
    CHECK_THROWS_AS(parse_ode("y''''"), OdeParseError);
    CHECK_THROWS_AS(parse_ode("2*y +"), OdeParseError);
    CHECK_THROWS_AS(parse_ode("y - y"), OdeParseError);
    CHECK_THROWS_AS(parse_ode("u0*y"), OdeParseError);
    try {
        parse_ode("y' + 3 $ y");
        FAIL("expected a parse error");
    } catch (const OdeParseError& e) {
        CHECK(e.position == 7);
    }
    // like terms merge, signs and rationals survive
    OdeForm g = parse_ode("-(3/2)*y*x + x*y - y^2*y'");
    CHECK(g.str() == "-y^2*y' - (1/2)*x*y");
}

TEST_CASE("parse: unparse is idempotent") {
    for (const char* s : {odes::PEQ, odes::JEQ, odes::Abel, "y'' - 6*y^2 - x", "L*y'''*y^2 - (7/5)*C^3*x^3"}) {
        OdeForm a = parse_ode(s);
        const std::string t = a.str();
        OdeForm b = parse_ode(t);
        CHECK(b.str() == t);
        CHECK(b.terms.size() == a.terms.size());
    }
}

TEST_CASE("balances agree with a brute-force exponent scan") {
    for (const char* s : {odes::PEQ, odes::JEQ, odes::Abel}) {
        OdeForm ode = parse_ode(s);
        std::set<Rational> engine, scan;
        for (const auto& b : dominant_balances(ode).balances) engine.insert(b.m);
        for (long q = 1; q <= 6; ++q)
            for (long p = -6; p <= 6; ++p) {
                Rational m(p, q);
                if (m.is_zero() || (m.is_integer() && m.sign() > 0)) continue;
                if (scan_balance(ode, m)) scan.insert(m);
            }
        CHECK(engine == scan);
    }
}

TEST_CASE("PEQ: one balance, indices {-1, 0}, passes") {
    OdeForm peq = parse_ode(odes::PEQ);
    auto rep = dominant_balances(peq);
    REQUIRE(rep.balances.size() == 1);
    CHECK(rep.balances[0].m == Rational(2, 3));
    CHECK(rep.balances[0].u0_free);
    REQUIRE(rep.excluded.size() == 1);
    CHECK(rep.excluded[0].region == "m > 1");
    CHECK(rep.excluded[0].blocking_term.find("4*C^2") != std::string::npos);

    auto rs = fuchs_indices(peq, rep.balances[0]);
    CHECK(rs.indicial == UPoly({Rational(0), Rational(1), Rational(1)}));
    CHECK(index_strings(rs) == std::vector<std::string>{"-1", "0"});
    // resonance exponent (j + 2)/3
    CHECK((rs.indices[1].a + Rational(2)) / Rational(3) == Rational(2, 3));

    auto v = weak_painleve_verdict(peq);
    CHECK(v.pass);
    REQUIRE(v.balances.size() == 1);
    const auto& bv = v.balances[0];
    CHECK(bv.witness.size() == 6);
    CHECK(bv.witness_residual_order >= 6);
    // witness matches the independent Puiseux recursion (x0 plays J0)
    auto u = puiseux_symbolic(3);
    MPoly sub = u[2].subs("J0", MPoly::var("x0"));
    CHECK(bv.witness[1].second == u[1].subs("J0", MPoly::var("x0")));
    CHECK(bv.witness[2].second == sub.subs("C1", MPoly::var("C")));
}

TEST_CASE("JEQ: two balances, irrational resonances, fails") {
    OdeForm jeq = parse_ode(odes::JEQ);
    auto rep = dominant_balances(jeq);
    REQUIRE(rep.balances.size() == 2);
    std::map<std::string, std::vector<std::string>> idx;
    for (const auto& b : rep.balances) {
        CHECK(b.m == Rational(-1));
        REQUIRE(b.u0);
        idx[b.u0->str()] = index_strings(fuchs_indices(jeq, b));
    }
    CHECK(idx["(2/3)*L^(-1)"] == std::vector<std::string>{"-1", "4/3", "7/3"});
    CHECK(idx["3*L^(-1)"] == std::vector<std::string>{"(-1-sqrt(57))/2", "-1", "(-1+sqrt(57))/2"});

    auto v = weak_painleve_verdict(jeq);
    CHECK_FALSE(v.pass);
    CHECK(std::find(v.reasons.begin(), v.reasons.end(), "irrational resonances") != v.reasons.end());
    // the rational branch is itself compatible at j = 4/3 and 7/3
    for (const auto& bv : v.balances)
        if (bv.rational) {
            REQUIRE(bv.compatibility.size() == 2);
            for (const auto& c : bv.compatibility) CHECK(c.compatible);
            CHECK(bv.witness_residual_order >= 6);
        }
}

TEST_CASE("Abel: first order passes") {
    OdeForm abel = parse_ode(odes::Abel);
    CHECK(abel.order() == 1);
    auto v = weak_painleve_verdict(abel);
    CHECK(v.pass);
    REQUIRE(v.balance_report.balances.size() == 1);
    CHECK(v.balance_report.balances[0].m == Rational(-1, 2));
    // the special rational solution -3/(4x+6) satisfies the cleared form
    for (double x : {0.3, 1.1, 2.7}) {
        double y = -3 / (4 * x + 6), yp = 12 / ((4 * x + 6) * (4 * x + 6));
        CHECK(std::abs(abel.eval(x, {y, yp, 0, 0}, {})) < 1e-14);
    }
}

TEST_CASE("every index set contains -1; surds are exact") {
    for (const char* s : {odes::PEQ, odes::JEQ, "y'' - 6*y^2 - x", "y'' - 2*y^3 - x*y - A",
                          "y''' - 12*y*y' ", "y'' + 3*y*y' + y^3"}) {
        OdeForm ode = parse_ode(s);
        for (const auto& b : dominant_balances(ode).balances) {
            auto rs = fuchs_indices(ode, b);
            CHECK(std::count(rs.indices.begin(), rs.indices.end(), QuadSurd{Rational(-1), Rational(0), 0}) >= 1);
            for (const auto& q : rs.indices) {
                CHECK(std::abs(rs.indicial.eval(q.approx())) < 1e-9 * (1 + std::abs(q.approx())));
            }
        }
    }
    // Painlevé I and II pass, the Chazy-type 12yy' is fine as well
    CHECK(weak_painleve_verdict(parse_ode("y'' - 6*y^2 - x")).pass);
    CHECK(weak_painleve_verdict(parse_ode("y'' - 2*y^3 - x*y - A")).pass);
    // y'' = y^2 + x^3 style perturbation keeps the indices but breaks compatibility at j = 6
    auto v = weak_painleve_verdict(parse_ode("y'' - 6*y^2 - x^2"));
    CHECK_FALSE(v.pass);
}

TEST_CASE("quadratic surd formatting") {
    CHECK(QuadSurd{Rational(-1, 2), Rational(1, 2), 57}.str() == "(-1+sqrt(57))/2");
    CHECK(QuadSurd{Rational(0), Rational(1), 2}.str() == "sqrt(2)");
    CHECK(QuadSurd{Rational(1), Rational(-3), 5}.str() == "1-3*sqrt(5)");
    CHECK(QuadSurd{Rational(4, 3), Rational(0), 0}.str() == "4/3");
    CHECK(QuadSurd{Rational(1, 2), Rational(1, 2), -3}.is_complex());
}

TEST_CASE("verdicts are fast") {
    auto t0 = std::chrono::steady_clock::now();
    for (const char* s : {odes::PEQ, odes::JEQ, odes::Abel}) weak_painleve_verdict(parse_ode(s));
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(sec < 1.0);
}
