// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "typen/acceptance.hpp"
#include "typen/export.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace typen;
using K = SolutionSpec::Kind;

namespace {

SolutionSpec spec(K k, double L, double C1, double u0 = 1) {
    SolutionSpec s;
    s.kind = k;
    s.Lambda = L;
    s.C1 = C1;
    s.u0 = u0;
    return s;
}

std::vector<GridPoint> line(double x, double zlo, double zhi, int n, double r) {
    std::vector<GridPoint> g;
    for (int i = 0; i < n; ++i) g.push_back({x, zlo + (zhi - zlo) * i / (n - 1), 0.0, r});
    return g;
}

}  // namespace

TEST_CASE("17 significant digits round-trip") {
    for (double v : {0.1, -1.0 / 3, 6.02214076e23, 1e-300, 1.0})
        CHECK(std::stod(fmt17(v)) == v);
    CHECK(fmt17(0.1) == "0.10000000000000001");
    nlohmann::ordered_json j;
    j["b"] = 0.1;
    j["a"] = {1, 2.5};
    j["s"] = "x\"y";
    CHECK(dump_json(j, 0) == "{\"b\":0.10000000000000001,\"a\":[1,2.5],\"s\":\"x\\\"y\"}\n");
}

TEST_CASE("grid parsing") {
    std::istringstream in("# header\n0 1 2 3\n\n  0.5\t-1e-2  7 0.25 # trailing\n");
    const auto g = parse_grid(in);
    REQUIRE(g.size() == 2);
    CHECK(g[1].x == 0.5);
    CHECK(g[1].z == -1e-2);
    CHECK(g[1].r == 0.25);
    std::istringstream short_line("0 1 2\n");
    CHECK_THROWS_AS(parse_grid(short_line), std::invalid_argument);
    std::istringstream junk("0 1 2 3x\n");
    CHECK_THROWS_AS(parse_grid(junk), std::invalid_argument);
}

TEST_CASE("Nurowski metric: |Psi4| = 14 s^2 / (3 y^2) |cos^3(r/2)|") {
    const SolutionSpec s = spec(K::LeroyNurowskiS, -1, 0);
    std::vector<GridPoint> g;
    for (double y : {0.5, 1.0, 3.0})
        for (double r : {-2.5, -1.0, 0.0, 0.7, 2.0}) g.push_back({0.2, y, 1.0, r});
    for (const auto& m : reconstruct_metric(s, g)) {
        const double c = std::cos(m.at.r / 2);
        CHECK(std::abs(m.psi4) == doctest::Approx(14.0 / (3 * m.at.z * m.at.z) * std::abs(c * c * c)).epsilon(1e-12));
        // phase e^{-ir/2} times the sign of cos^3 and of Psi4 at r = 0
        const cplx_d base = m.psi4 / (std::exp(cplx_d(0, -m.at.r / 2)) * (c * c * c));
        CHECK(std::abs(base.imag()) < 1e-12 * std::abs(base));
    }
}

TEST_CASE("metric functions follow the closed expressions") {
    const SolutionSpec s = spec(K::LeroyNurowski, -1, 1);
    const auto ms = reconstruct_metric(s, line(0.3, 0.4, 2.0, 9, 0.6));
    SolutionEvaluator ev(s);
    for (const auto& m : ms) {
        const auto st = ev.state(m.at.z);
        const double J = st[0], Jp = st[1], Jpp = st[2], r = m.at.r;
        CHECK(m.p == doctest::Approx(std::sqrt(Jp) / 2));
        CHECK(m.H == doctest::Approx(Jp * std::cos(r) / 6));
        // W with P' = J''/J'
        const cplx_d W = 0.5 * (0.5 * Jpp / Jp - J + cplx_d(0, 1)) * (std::exp(cplx_d(0, -r)) + 1.0);
        CHECK(std::abs(m.W - W) < 1e-13 * (1 + std::abs(W)));
        // Psi4 from K agrees with the bracket of p and cbar
        const auto k = psi4_consistency(ev.jet(m.at.z, 7));
        const double c = std::cos(r / 2);
        const cplx_d psi = 4.0 * k.K_direct * std::exp(cplx_d(0, -r / 2)) * (c * c * c) / (12.0 * Jp);
        CHECK(std::abs(m.psi4 - psi) < 1e-8 * (1 + std::abs(psi)));
        CHECK(m.p > 0);
        CHECK(m.lambda_du != 0);
    }
}

TEST_CASE("C1 = 0: the static part of W is real") {
    for (const auto& m : reconstruct_metric(spec(K::FlatSS, -1, 0), line(0, -2, -0.3, 5, 0.9))) {
        const cplx_d stat = m.W / (0.5 * (std::exp(cplx_d(0, -m.at.r)) + 1.0));
        CHECK(std::abs(stat.imag()) < 1e-15 * (1 + std::abs(stat)));
    }
}

TEST_CASE("lambda quadratures: derivatives and integration constants") {
    const SolutionSpec s = spec(K::Interior, -1, 1, -2);
    const double h = 1e-4, x = 0.7;
    MetricOptions o;
    o.z_ref = -0.3;
    for (double z : {-0.2, 0.1, 0.4}) {
        const auto m = reconstruct_metric(s, {{x, z - h, 0, 0}, {x, z, 0, 0}, {x, z + h, 0, 0}}, o);
        SolutionEvaluator ev(s);
        const auto st = ev.state(z);
        const double F2 = st[2] / (2 * st[1]) + st[0];
        // ln lambda_du = C1 x - int F2
        const double dlog = (std::log(m[2].lambda_du) - std::log(m[0].lambda_du)) / (2 * h);
        CHECK(dlog == doctest::Approx(-F2).epsilon(1e-6));
        // I = -lambda_dx E / 2 with E = e^{C1 x} / lambda_du, and I' = E
        auto I = [&](const MetricSample& q) { return -q.lambda_dx * std::exp(x) / (2 * q.lambda_du); };
        const double E = std::exp(x) / m[1].lambda_du;
        CHECK((I(m[2]) - I(m[0])) / (2 * h) == doctest::Approx(E).epsilon(1e-6));
    }
    // constants: both integrals vanish at z_ref by default
    const auto at_ref = reconstruct_metric(s, {{0, -0.3, 0, 0}}, o);
    CHECK(at_ref[0].lambda_du == doctest::Approx(1.0));
    CHECK(at_ref[0].lambda_dx == 0.0);
    MetricOptions o2 = o;
    o2.inner_constant = 0.5;
    o2.outer_constant = 2.0;
    const auto a = reconstruct_metric(s, {{0, 0.2, 0, 0}}, o)[0];
    const auto b = reconstruct_metric(s, {{0, 0.2, 0, 0}}, o2)[0];
    CHECK(b.lambda_du == doctest::Approx(a.lambda_du * std::exp(-0.5)));
    const double Ia = -a.lambda_dx / (2 * a.lambda_du);  // x = 0
    const double Ib = -b.lambda_dx / (2 * b.lambda_du);
    // E scales with e^{k_inner}, the outer integral shifts by k_outer
    CHECK(Ib == doctest::Approx(2.0 + std::exp(0.5) * Ia));
    // default z_ref is the lowest grid z
    const auto d = reconstruct_metric(s, line(0, -0.1, 0.3, 3, 0));
    CHECK(d[0].lambda_dx == 0.0);
    CHECK(d[0].lambda_du == doctest::Approx(1.0));
}

TEST_CASE("metric errors") {
    const SolutionSpec s = spec(K::LeroyNurowski, -1, 1);
    CHECK_THROWS_AS(reconstruct_metric(s, {{0, 1, 0, std::acos(-1.0)}}), std::domain_error);
    CHECK_THROWS_AS(reconstruct_metric(spec(K::LeroyNurowskiS, -1, 0), {{0, 0.0, 0, 0}}), std::domain_error);
    // the interior solution is not continued past its blow-up near z = 0.96
    CHECK_THROWS_AS(reconstruct_metric(spec(K::Interior, -1, 1, -2), {{0, 1.5, 0, 0}}), std::domain_error);
    CHECK(reconstruct_metric(s, {}).empty());
}

TEST_CASE("export determinism") {
    const SolutionSpec s = spec(K::Interior, -1, 1, -2);
    std::vector<GridPoint> g;
    for (int i = 0; i < 12; ++i) g.push_back({0.1 * i, -0.5 + 0.08 * i, 0.3, -1.0 + 0.15 * i});
    MetricOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const auto a = reconstruct_metric(s, g, one), b = reconstruct_metric(s, g, many);
    CHECK(metric_csv(s, one, a) == metric_csv(s, many, b));
    CHECK(dump_json(metric_json(s, one, a)) == dump_json(metric_json(s, one, reconstruct_metric(s, g, one))));
    const std::string csv = metric_csv(s, one, a);
    CHECK(csv.rfind(std::string("# schema=") + kSchemaVersion, 0) == 0);
    CHECK(csv.find("x,z,u,r,J,Jp,p,c_re,c_im,W_re,W_im,H,lambda_du,lambda_dx,psi4_re,psi4_im\n") != std::string::npos);
    for (const auto& m : a) {
        CHECK(m.p > 0);
        CHECK(m.lambda_du != 0);
    }
}

TEST_CASE("trajectory CSV") {
    const auto t = integrate_g(-2, 1, 2, 1e-10);
    const std::string csv = trajectory_csv(t);
    CHECK(csv.rfind("# ode=g params=" + t.params + " tol=1e-10\n", 0) == 0);
    CHECK(csv.find("\nx,y,y',residual\n") != std::string::npos);
    std::size_t rows = 0;
    for (char ch : csv) rows += ch == '\n';
    CHECK(rows == t.size() + 3);
    CHECK(csv == trajectory_csv(integrate_g(-2, 1, 2, 1e-10)));
}

TEST_CASE("acceptance runner plumbing") {
    CHECK(acceptance_criterion_count() >= 12);
    const auto rep = run_acceptance({3, 5});
    REQUIRE(rep.criteria.size() == 2);
    CHECK(rep.all_pass());
    for (const auto& c : rep.criteria) CHECK(c.seconds >= 0);
    CHECK(acceptance_exit_code(rep, {}) == 0);
    CHECK(acceptance_exit_code(rep, {3}) == 1);
    const auto j = to_json(rep);
    CHECK(j["criteria"].size() == 2);
    CHECK(j["criteria"][0].contains("seconds"));
    CHECK(format_line(rep.criteria[0]).rfind("PASS  3", 0) == 0);
}

TEST_CASE("schema file matches the writers") {
    std::ifstream f(std::string(TYPEN_SOURCE_DIR) + "/schema/typen_forge.schema.json");
    REQUIRE(f.good());
    const auto schema = nlohmann::json::parse(f);
    CHECK(schema["schema"] == kSchemaVersion);
    const SolutionSpec s = spec(K::LeroyNurowski, -1, 1);
    const std::string csv = metric_csv(s, {}, reconstruct_metric(s, {{0, 1, 0, 0}}));
    std::string cols;
    for (const auto& c : schema["csv"]["metric"]["columns"]) cols += (cols.empty() ? "" : ",") + c.get<std::string>();
    CHECK(csv.find("\n" + cols + "\n") != std::string::npos);
    const auto j = metric_json(s, {}, reconstruct_metric(s, {{0, 1, 0, 0}}));
    CHECK(j["integration_constants"]["z_ref"] == 1.0);
    CHECK(j["samples"][0].size() == schema["csv"]["metric"]["columns"].size() - 3);  // c, W, psi4 are pairs
}
