// SPDX-License-Identifier: Apache-2.0
#include "typen/export.hpp"

#include "typen/exact_series.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace typen {

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) v = 0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump_rec(const nlohmann::ordered_json& j, int indent, int depth, std::string& out) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string end_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt17(v) : "null";
            return;
        }
        case nlohmann::json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) { out += ","; out += nl; }
                first = false;
                out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
                dump_rec(it.value(), indent, depth + 1, out);
            }
            out += nl + end_pad + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            out += "[";
            out += nl;
            bool first = true;
            for (const auto& e : j) {
                if (!first) { out += ","; out += nl; }
                first = false;
                out += pad;
                dump_rec(e, indent, depth + 1, out);
            }
            out += nl + end_pad + "]";
            return;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    dump_rec(j, indent, 0, out);
    out += "\n";
    return out;
}

std::vector<GridPoint> parse_grid(std::istream& in) {
    std::vector<GridPoint> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        std::vector<double> v;
        std::string tok;
        while (ss >> tok) {
            std::size_t used = 0;
            double d = 0;
            try {
                d = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || !std::isfinite(d))
                throw std::invalid_argument("grid line " + std::to_string(lineno) + ": bad number '" + tok + "'");
            v.push_back(d);
        }
        if (v.empty()) continue;
        if (v.size() != 4)
            throw std::invalid_argument("grid line " + std::to_string(lineno) + ": expected 4 values (x z u r), got " +
                                        std::to_string(v.size()));
        out.push_back({v[0], v[1], v[2], v[3]});
    }
    return out;
}

int forge_threads() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* e = std::getenv("TYPEN_FORGE_THREADS")) {
        char* endp = nullptr;
        const long cap = std::strtol(e, &endp, 10);
        if (endp != e && *endp == '\0' && cap >= 1) n = std::min<long>(n, cap);
    }
    return n;
}

namespace {

constexpr int kQuadDepth = 18;

double integrate_checked(const std::function<double(double)>& f, double a, double b, double tol, const char* what) {
    if (a == b) return 0.0;
    // Boost's recursive estimate is not scaled by the interval length, so short
    // intervals never meet a relative tolerance; integrate on [-1, 1] instead.
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double err = 0;
    const double v = half * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                                [&](double x) { return f(mid + half * x); }, -1.0, 1.0, kQuadDepth, tol, &err);
    err *= std::abs(half);
    if (!std::isfinite(v) || err > 1e3 * tol * (1 + std::abs(v)))
        throw std::runtime_error(std::string("quadrature failure in ") + what + " on [" + fmt17(a) + ", " + fmt17(b) +
                                 "] (error estimate " + fmt17(err) + ")");
    return v;
}

struct MetricContext {
    SolutionEvaluator ev;
    double L, C1, zref;
    MetricOptions opt;

    double F2(double z) const {
        const auto st = ev.state(z);
        return st[2] / (2 * st[1]) - L * st[0];
    }
    double inner(double z) const {
        return opt.inner_constant + integrate_checked([this](double t) { return F2(t); }, zref, z, opt.quad_tol, "int F2 dz");
    }
    double E(double z) const { return std::exp(inner(z)); }
    double outer(double z) const {
        return opt.outer_constant +
               integrate_checked([this](double t) { return E(t); }, zref, z, opt.quad_tol, "int exp(int F2) dz");
    }

    MetricSample at(const GridPoint& g) const {
        const double half = std::cos(0.5 * g.r);
        if (!(std::abs(half) >= opt.r_pole_margin))
            throw std::domain_error("metric: r = " + fmt17(g.r) + " too close to the pole r = +-pi");
        const auto st = ev.state(g.z);
        const double J = st[0], Jp = st[1], Jpp = st[2];
        if (!(Jp > 0)) throw std::domain_error("metric: J' <= 0 at z = " + fmt17(g.z));
        const cplx_d I(0, 1);
        MetricSample m;
        m.at = g;
        m.J = J;
        m.Jp = Jp;
        m.p = std::sqrt(Jp) / 2;
        const double F2v = Jpp / (2 * Jp) - L * J;
        m.c = (I * F2v + C1) / 2.0;
        m.W = 0.5 * (Jpp / (2 * Jp) + L * J + I * C1) * (std::exp(-I * g.r) + 1.0);
        m.H = -L * Jp * std::cos(g.r) / 6;
        const double Ez = E(g.z);
        m.lambda_du = std::exp(C1 * g.x) / Ez;
        m.lambda_dx = -2 * outer(g.z) / Ez;
        // Psi4 = -4 Lambda K e^{-ir/2} cos^3(r/2) / (3 Abar^2 F1^2), Abar = 2, F1^2 = J'
        const cplx_d K = K_value(J, Jp, Jpp, L, C1);
        m.psi4 = -4.0 * L * K * std::exp(-0.5 * I * g.r) * (half * half * half) / (12.0 * Jp);
        return m;
    }
};

}  // namespace

std::vector<MetricSample> reconstruct_metric(const SolutionSpec& s, const std::vector<GridPoint>& grid,
                                             const MetricOptions& opt) {
    if (grid.empty()) return {};
    if (!(opt.quad_tol > 0)) throw std::invalid_argument("metric: quad_tol must be positive");
    auto [lo, hi] = std::minmax_element(grid.begin(), grid.end(),
                                        [](const GridPoint& a, const GridPoint& b) { return a.z < b.z; });
    MetricContext base{SolutionEvaluator(s), 0, 0, opt.z_ref.value_or(lo->z), opt};
    base.L = base.ev.Lambda();
    base.C1 = base.ev.C1();
    // fill the trajectory caches once so the per-thread copies never integrate
    base.ev.state(lo->z);
    base.ev.state(hi->z);
    base.ev.state(base.zref);

    const int nthreads = std::max(1, std::min<int>(opt.threads > 0 ? opt.threads : forge_threads(),
                                                   static_cast<int>(grid.size())));
    std::vector<MetricSample> out(grid.size());
    std::vector<std::exception_ptr> errs(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        const MetricContext ctx = base;
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
            try {
                out[i] = ctx.at(grid[i]);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {
double used_z_ref(const MetricOptions& opt, const std::vector<MetricSample>& m) {
    if (opt.z_ref) return *opt.z_ref;
    double z = m.empty() ? 0.0 : m.front().at.z;
    for (const auto& q : m) z = std::min(z, q.at.z);
    return z;
}
}  // namespace

std::string describe(const SolutionSpec& s) {
    std::ostringstream o;
    o << "solution=" << to_string(s.kind) << " Lambda=" << fmt17(s.Lambda) << " C0=" << fmt17(s.C0)
      << " C1=" << fmt17(s.C1) << " C2=" << fmt17(s.C2) << " u0=" << fmt17(s.u0) << " tol=" << fmt17(s.tol);
    return o.str();
}

std::string metric_csv(const SolutionSpec& s, const MetricOptions& opt, const std::vector<MetricSample>& m) {
    std::string out = std::string("# schema=") + kSchemaVersion + " kind=metric\n";
    out += "# " + describe(s) + " inner_constant=" + fmt17(opt.inner_constant) +
           " outer_constant=" + fmt17(opt.outer_constant) +
           " z_ref=" + fmt17(used_z_ref(opt, m)) + "\n";
    out += "x,z,u,r,J,Jp,p,c_re,c_im,W_re,W_im,H,lambda_du,lambda_dx,psi4_re,psi4_im\n";
    for (const auto& q : m) {
        const double row[] = {q.at.x,      q.at.z,      q.at.u,      q.at.r,    q.J,       q.Jp,
                              q.p,         q.c.real(),  q.c.imag(),  q.W.real(), q.W.imag(), q.H,
                              q.lambda_du, q.lambda_dx, q.psi4.real(), q.psi4.imag()};
        for (std::size_t i = 0; i < std::size(row); ++i) {
            if (i) out += ',';
            out += fmt17(row[i]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json metric_json(const SolutionSpec& s, const MetricOptions& opt,
                                   const std::vector<MetricSample>& m) {
    nlohmann::ordered_json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "metric";
    j["solution"] = {{"kind", to_string(s.kind)}, {"Lambda", s.Lambda}, {"C0", s.C0}, {"C1", s.C1},
                     {"C2", s.C2}, {"u0", s.u0}, {"tol", s.tol}};
    j["integration_constants"] = {{"inner", opt.inner_constant}, {"outer", opt.outer_constant}};
    j["integration_constants"]["z_ref"] = used_z_ref(opt, m);
    auto& arr = j["samples"] = nlohmann::ordered_json::array();
    auto cj = [](cplx_d c) { return nlohmann::ordered_json::array({c.real(), c.imag()}); };
    for (const auto& q : m) {
        nlohmann::ordered_json e;
        e["x"] = q.at.x;
        e["z"] = q.at.z;
        e["u"] = q.at.u;
        e["r"] = q.at.r;
        e["J"] = q.J;
        e["Jp"] = q.Jp;
        e["p"] = q.p;
        e["c"] = cj(q.c);
        e["W"] = cj(q.W);
        e["H"] = q.H;
        e["lambda_du"] = q.lambda_du;
        e["lambda_dx"] = q.lambda_dx;
        e["psi4"] = cj(q.psi4);
        arr.push_back(std::move(e));
    }
    return j;
}

std::string trajectory_csv(const Trajectory& t) {
    std::string out = "# ode=" + t.ode_id + " params=" + t.params + " tol=" + fmt17(t.tol) + "\n";
    out += std::string("# schema=") + kSchemaVersion + " kind=trajectory variable=" + t.variable +
           " termination=" + to_string(t.termination) + " stop_at=" + fmt17(t.stop_at) + "\n";
    out += "x,y,y',residual\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& d = t.d[i];
        out += fmt17(t.x[i]) + ',' + fmt17(d.empty() ? NAN : d[0]) + ',' + fmt17(d.size() > 1 ? d[1] : NAN) + ',' +
               fmt17(i < t.residual.size() ? t.residual[i] : NAN) + '\n';
    }
    return out;
}

std::string profile_csv(const SolutionSpec& s, const InvariantProfile& p) {
    std::string out = std::string("# schema=") + kSchemaVersion + " kind=invariants\n# " + describe(s) + "\n";
    out += "z,alpha_sq_re,alpha_sq_im,beta,gamma,theta_re,theta_im,hyperquadric\n";
    for (const auto& q : p.samples) {
        out += fmt17(q.z) + ',' + fmt17(q.alpha_sq.real()) + ',' + fmt17(q.alpha_sq.imag()) + ',' + fmt17(q.beta) +
               ',' + fmt17(q.gamma) + ',' + fmt17(q.theta.real()) + ',' + fmt17(q.theta.imag()) + ',' +
               (q.hyperquadric ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace typen
