// SPDX-License-Identifier: Apache-2.0
// typen_forge: command-line front end.  Exit 0 on success, 1 on a failed
// computation or acceptance run, 2 on usage errors.
#include "typen/acceptance.hpp"
#include "typen/cr_invariants.hpp"
#include "typen/exact_series.hpp"
#include "typen/export.hpp"
#include "typen/numeric_ode.hpp"
#include "typen/painleve.hpp"
#include "typen/puiseux.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace typen;
using ojson = nlohmann::ordered_json;

namespace {

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
}

struct SolutionFlags {
    std::string kind = "leroy-nurowski";
    SolutionSpec spec;

    void add(CLI::App* app) {
        std::vector<std::string> names;
        for (auto k : all_kinds()) names.push_back(to_string(k));
        app->add_option("--solution", kind, "solution family")->check(CLI::IsMember(names))->capture_default_str();
        app->add_option("--Lambda", spec.Lambda, "cosmological constant")->capture_default_str();
        app->add_option("--C0", spec.C0, "translation constant")->capture_default_str();
        app->add_option("--C1", spec.C1, "C1 (ignored by the C1 = 0 families)")->capture_default_str();
        app->add_option("--C2", spec.C2, "C2 of the flat cases 1-3")->capture_default_str();
        app->add_option("--u0", spec.u0, "series: J'(0); interior: g(0) (< 0)")->capture_default_str();
        app->add_option("--tol", spec.tol, "integration tolerance (series/interior)")->capture_default_str();
    }
    SolutionSpec resolve() {
        for (auto k : all_kinds())
            if (kind == to_string(k)) spec.kind = k;
        return spec;
    }
    static std::vector<SolutionSpec::Kind> all_kinds() {
        using K = SolutionSpec::Kind;
        return {K::LeroyNurowski, K::LeroyNurowskiS, K::FlatS, K::FlatSS, K::Case1,
                K::Case2,         K::Case3,          K::Series, K::Interior};
    }
};

std::set<int> parse_id_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}

ojson cplx_json(cplx c) { return ojson::array({c.real(), c.imag()}); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"typen_forge: series, singularity analysis, integration, CR invariants and metrics"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("-o,--out", out_path, "output file (default stdout)");

    // series
    auto* series = app.add_subcommand("series", "power-series coefficients u_{2k} of g(w)");
    std::string s_u0, s_C = "1";
    int s_kmax = 10;
    bool s_symbolic = false;
    series->add_option("--u0", s_u0, "g(0), exact rational such as -301/400");
    series->add_option("--kmax", s_kmax, "highest k")->check(CLI::Range(0, kSeriesCeiling))->capture_default_str();
    series->add_option("--C", s_C, "constant C (rational)")->capture_default_str();
    series->add_flag("--symbolic", s_symbolic, "emit P_k(u0)/u0^(2k-1)");

    // puiseux
    auto* puis = app.add_subcommand("puiseux", "Puiseux coefficients of P(J) about a movable point J0");
    double p_u0 = 1, p_u0i = 0, p_J0 = 0, p_J0i = 0, p_L = -1, p_C1 = 1;
    int p_n = 8;
    bool p_symbolic = false;
    puis->add_option("--u0", p_u0, "leading coefficient (real part)")->capture_default_str();
    puis->add_option("--u0-im", p_u0i, "leading coefficient (imaginary part)")->capture_default_str();
    puis->add_option("--J0", p_J0, "branch point (real part)")->capture_default_str();
    puis->add_option("--J0-im", p_J0i, "branch point (imaginary part)")->capture_default_str();
    puis->add_option("--Lambda", p_L)->capture_default_str();
    puis->add_option("--C1", p_C1)->capture_default_str();
    puis->add_option("--n", p_n, "number of coefficients")->check(CLI::Range(1, 64))->capture_default_str();
    puis->add_flag("--symbolic", p_symbolic, "coefficients as Laurent polynomials in u0, J0, L, C1");

    // painleve
    auto* pain = app.add_subcommand("painleve", "dominant balances, Fuchs indices, weak Painleve verdict");
    std::string pa_ode = "PEQ", pa_expr;
    pain->add_option("--ode", pa_ode, "built-in equation")->check(CLI::IsMember({"PEQ", "JEQ", "Abel"}))->capture_default_str();
    pain->add_option("--expr", pa_expr, "polynomial ODE text (overrides --ode)");

    // integrate
    auto* integ = app.add_subcommand("integrate", "adaptive integration, trajectory CSV");
    std::string i_ode = "g";
    double i_u0 = -2, i_C = 1, i_L = -1, i_C1 = 1, i_tol = 1e-10, i_from = 0, i_to = 50;
    double i_J0 = 0, i_P0 = 2, i_dP0 = 0;
    std::vector<double> i_init{0, 1, 0};
    integ->add_option("--ode", i_ode, "g | peq | jeq")->check(CLI::IsMember({"g", "peq", "jeq"}))->capture_default_str();
    integ->add_option("--u0", i_u0, "g: g(0)")->capture_default_str();
    integ->add_option("--C", i_C, "g: constant C")->capture_default_str();
    integ->add_option("--Lambda", i_L, "peq/jeq")->capture_default_str();
    integ->add_option("--C1", i_C1, "peq/jeq")->capture_default_str();
    integ->add_option("--from", i_from, "jeq: start z")->capture_default_str();
    integ->add_option("--to", i_to, "end of the interval (w, J or z)")->capture_default_str();
    integ->add_option("--J0", i_J0, "peq: start J")->capture_default_str();
    integ->add_option("--P0", i_P0, "peq: P(J0)")->capture_default_str();
    integ->add_option("--dP0", i_dP0, "peq: P'(J0)")->capture_default_str();
    integ->add_option("--init", i_init, "jeq: J, J', J'' at --from")->expected(3);
    integ->add_option("--tol", i_tol)->capture_default_str();

    // invariants
    auto* inv = app.add_subcommand("invariants", "Cartan invariant profile along a solution");
    SolutionFlags inv_sol;
    inv_sol.add(inv);
    double v_lo = 0.2, v_hi = 2.0;
    int v_n = 20;
    std::string v_A = "const2", v_fmt = "csv";
    inv->add_option("--zlo", v_lo)->capture_default_str();
    inv->add_option("--zhi", v_hi)->capture_default_str();
    inv->add_option("--samples", v_n)->check(CLI::PositiveNumber)->capture_default_str();
    inv->add_option("--A", v_A, "const2 (A = 2) | identity (A = zeta)")->check(CLI::IsMember({"const2", "identity"}))->capture_default_str();
    inv->add_option("--format", v_fmt)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    // flat
    auto* flat = app.add_subcommand("flat", "conformally flat families J(z)");
    std::string f_case = "case3";
    FlatFamilyParams fp;
    double f_lo = -3, f_hi = 3;
    int f_n = 13;
    flat->add_option("--case", f_case)->check(CLI::IsMember({"case1", "case2", "case3", "flat-s", "flat-ss", "leroy-nurowski", "leroy-nurowski-s"}))->capture_default_str();
    flat->add_option("--Lambda", fp.Lambda)->capture_default_str();
    flat->add_option("--C0", fp.C0)->capture_default_str();
    flat->add_option("--C1", fp.C1)->capture_default_str();
    flat->add_option("--C2", fp.C2)->capture_default_str();
    flat->add_option("--zlo", f_lo)->capture_default_str();
    flat->add_option("--zhi", f_hi)->capture_default_str();
    flat->add_option("--samples", f_n)->check(CLI::PositiveNumber)->capture_default_str();

    // metric
    auto* met = app.add_subcommand("metric", "metric functions on a coordinate grid (x z u r per line)");
    SolutionFlags met_sol;
    met_sol.add(met);
    std::string m_grid, m_fmt = "csv";
    MetricOptions mo;
    double m_zref = 0;
    met->add_option("--grid", m_grid, "grid file ('-' for stdin)")->required();
    met->add_option("--format", m_fmt)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    met->add_option("--inner-constant", mo.inner_constant, "additive constant of int F2 dz")->capture_default_str();
    met->add_option("--outer-constant", mo.outer_constant, "additive constant of the outer integral")->capture_default_str();
    auto* zref_opt = met->add_option("--z-ref", m_zref, "base point of both integrals (default: lowest grid z)");
    met->add_option("--quad-tol", mo.quad_tol)->capture_default_str();
    met->add_option("--threads", mo.threads, "0 = TYPEN_FORGE_THREADS / hardware")->capture_default_str();

    // verify
    auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
    std::string v_expect, v_only, v_json;
    ver->add_option("--expect-red", v_expect, "comma-separated ids known to fail (exit 0 iff exactly these fail)");
    ver->add_option("--only", v_only, "comma-separated ids to run");
    ver->add_option("--json", v_json, "write the JSON summary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*series) {
            ojson j;
            j["schema"] = kSchemaVersion;
            j["kind"] = s_symbolic ? "series-symbolic" : "series";
            j["kmax"] = s_kmax;
            if (s_symbolic) {
                auto& arr = j["coefficients"] = ojson::array();
                const auto P = g_coefficients_symbolic(s_kmax);
                for (std::size_t k = 0; k < P.size(); ++k)
                    arr.push_back({{"k", k}, {"numerator", P[k].numerator.str("u0")}, {"denom_power", P[k].denom_power},
                                   {"text", P[k].str()}});
            }
            if (!s_u0.empty()) {
                const Rational u0 = Rational::parse(s_u0), C = Rational::parse(s_C);
                const auto s = g_coefficients(u0, s_kmax, C);
                j["u0"] = u0.str();
                j["C"] = C.str();
                auto& vals = j["values"] = ojson::array();
                for (int k = 0; k <= s_kmax; ++k) {
                    const auto& v = s.coeffs[static_cast<std::size_t>(2 * k)];
                    vals.push_back({{"power", 2 * k}, {"value", v.str()}, {"approx", v.to_double()}});
                }
            } else if (!s_symbolic) {
                throw CLI::RequiredError("--u0 (or --symbolic)");
            }
            emit(out_path, dump_json(j));
        } else if (*puis) {
            ojson j;
            j["schema"] = kSchemaVersion;
            j["kind"] = p_symbolic ? "puiseux-symbolic" : "puiseux";
            if (p_symbolic) {
                auto& arr = j["coefficients"] = ojson::array();
                for (const auto& m : puiseux_symbolic(p_n)) arr.push_back(m.str());
            } else {
                const auto s = puiseux_expand({p_u0, p_u0i}, {p_J0, p_J0i}, p_L, p_C1, p_n);
                j["J0"] = cplx_json(s.J0);
                j["Lambda"] = p_L;
                j["C1"] = p_C1;
                j["exponents"] = "(k+2)/3";
                auto& arr = j["coefficients"] = ojson::array();
                for (const auto& c : s.coeffs) arr.push_back(cplx_json(c));
            }
            emit(out_path, dump_json(j));
        } else if (*pain) {
            const std::string text = pa_expr.empty()
                                         ? (pa_ode == "PEQ" ? odes::PEQ : pa_ode == "JEQ" ? odes::JEQ : odes::Abel)
                                         : pa_expr;
            const OdeForm ode = parse_ode(text);
            const auto v = weak_painleve_verdict(ode);
            ojson j;
            j["schema"] = kSchemaVersion;
            j["kind"] = "painleve";
            j["ode"] = ode.str();
            j["verdict"] = v.pass ? "pass" : "fail";
            j["reasons"] = v.reasons;
            auto& arr = j["balances"] = ojson::array();
            for (const auto& b : v.balances) {
                ojson e;
                e["m"] = b.resonances.balance.m.str();
                e["u0"] = b.resonances.balance.u0 ? b.resonances.balance.u0->str() : std::string("free");
                std::vector<std::string> idx;
                for (const auto& q : b.resonances.indices) idx.push_back(q.str());
                e["indices"] = idx;
                e["rational"] = b.rational;
                bool compat = true;
                for (const auto& c : b.compatibility) compat = compat && c.compatible;
                e["compatible"] = compat;
                e["note"] = b.note;
                arr.push_back(std::move(e));
            }
            for (const auto& x : v.balance_report.excluded)
                j["excluded"].push_back({{"region", x.region}, {"blocking_term", x.blocking_term}});
            emit(out_path, dump_json(j));
        } else if (*integ) {
            Trajectory t;
            if (i_ode == "g") t = integrate_g(i_u0, i_C, i_to, i_tol);
            else if (i_ode == "peq") t = integrate_peq(i_L, i_C1, i_J0, i_P0, i_dP0, i_to, i_tol);
            else t = integrate_jeq(i_L, i_C1, i_from, i_init, i_to, i_tol);
            emit(out_path, trajectory_csv(t));
            if (!t.reached_end())
                std::cerr << "stopped: " << to_string(t.termination) << " at " << fmt17(t.stop_at) << "\n";
        } else if (*inv) {
            const SolutionSpec s = inv_sol.resolve();
            const auto prof = invariant_profile(s, v_lo, v_hi, v_n, v_A == "const2" ? AChoice::Const2 : AChoice::Identity);
            if (v_fmt == "csv") {
                emit(out_path, profile_csv(s, prof));
            } else {
                ojson j;
                j["schema"] = kSchemaVersion;
                j["kind"] = "invariants";
                j["solution"] = describe(s);
                auto& arr = j["samples"] = ojson::array();
                for (const auto& q : prof.samples)
                    arr.push_back({{"z", q.z}, {"alpha_sq", cplx_json(q.alpha_sq)}, {"beta", q.beta}, {"gamma", q.gamma},
                                   {"theta", cplx_json(q.theta)}, {"hyperquadric", q.hyperquadric}});
                j["constancy"] = {{"alpha_sq", prof.constancy.max_dev_alpha_sq}, {"beta", prof.constancy.max_dev_beta},
                                  {"gamma", prof.constancy.max_dev_gamma}, {"theta", prof.constancy.max_dev_theta}};
                emit(out_path, dump_json(j));
            }
        } else if (*flat) {
            for (FlatCase c : {FlatCase::Case1, FlatCase::Case2, FlatCase::Case3, FlatCase::FlatS, FlatCase::FlatSS,
                               FlatCase::LeroyNurowski, FlatCase::LeroyNurowskiS})
                if (f_case == to_string(c)) fp.kind = c;
            std::string out = std::string("# schema=") + kSchemaVersion + " kind=flat case=" + f_case +
                              " Lambda=" + fmt17(fp.Lambda) + " C0=" + fmt17(fp.C0) + " C1=" + fmt17(fp.C1) +
                              " C2=" + fmt17(fp.C2) + "\nz,J,dJ,relation_residual\n";
            for (int i = 0; i < f_n; ++i) {
                const double z = f_n == 1 ? f_lo : f_lo + (f_hi - f_lo) * i / (f_n - 1);
                const auto p = flat_family(fp, z);
                out += fmt17(z) + ',' + fmt17(p.J) + ',' + fmt17(p.dJ) + ',' + fmt17(p.relation_residual) + '\n';
            }
            emit(out_path, out);
        } else if (*met) {
            const SolutionSpec s = met_sol.resolve();
            std::vector<GridPoint> grid;
            if (m_grid == "-") {
                grid = parse_grid(std::cin);
            } else {
                std::ifstream f(m_grid);
                if (!f) throw std::runtime_error("cannot open grid file " + m_grid);
                grid = parse_grid(f);
            }
            if (*zref_opt) mo.z_ref = m_zref;
            const auto m = reconstruct_metric(s, grid, mo);
            emit(out_path, m_fmt == "csv" ? metric_csv(s, mo, m) : dump_json(metric_json(s, mo, m)));
        } else if (*ver) {
            const std::set<int> expect = parse_id_list(v_expect), only = parse_id_list(v_only);
            const auto rep = run_acceptance(only);
            for (const auto& c : rep.criteria) std::cout << format_line(c) << "\n";
            const std::string js = dump_json(to_json(rep, expect));
            if (!v_json.empty()) emit(v_json, js);
            return acceptance_exit_code(rep, expect);
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
