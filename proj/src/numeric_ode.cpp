// SPDX-License-Identifier: Apache-2.0
#include "typen/numeric_ode.hpp"

#include "typen/exact_series.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace typen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEps = std::numeric_limits<double>::epsilon();
// derivatives beyond y^(n-1) stored per sample; they make the interpolation
// error negligible against the integration error
constexpr int kExtraDerivs = 3;

// Two-point Hermite interpolation: m derivatives (0..m-1) known at both ends
// of a step of length h.  Returns p^(k)(s)/h^k for k = 0..kmax.
std::vector<double> hermite(const std::vector<double>& a, const std::vector<double>& b, double h, double s, int kmax) {
    const int m = static_cast<int>(std::min(a.size(), b.size()));
    const int n = 2 * m;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    double hk = 1;
    for (int k = 0; k < m; ++k, hk *= h) {
        // k-th derivative of s^j at 0 and 1
        for (int j = k; j < n; ++j) {
            double f = 1;
            for (int i = 0; i < k; ++i) f *= j - i;
            if (j == k) A(k, j) = f;
            A(m + k, j) = f;
        }
        rhs(k) = a[static_cast<std::size_t>(k)] * hk;
        rhs(m + k) = b[static_cast<std::size_t>(k)] * hk;
    }
    Eigen::VectorXd c = A.partialPivLu().solve(rhs);
    std::vector<double> out(static_cast<std::size_t>(kmax + 1), 0.0);
    double hinv = 1;
    for (int k = 0; k <= kmax; ++k, hinv /= h) {
        double acc = 0;
        for (int j = n - 1; j >= k; --j) {
            double f = 1;
            for (int i = 0; i < k; ++i) f *= j - i;
            acc += c(j) * f * std::pow(s, j - k);
        }
        out[static_cast<std::size_t>(k)] = acc * hinv;
    }
    return out;
}

// y^(k) and its own higher derivatives at both ends, interpolated at s.
std::vector<double> dense_state(const std::vector<double>& da, const std::vector<double>& db, double h, double s,
                                int order) {
    std::vector<double> y(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) {
        std::vector<double> a(da.begin() + k, da.end()), b(db.begin() + k, db.end());
        y[static_cast<std::size_t>(k)] = hermite(a, b, h, s, 0)[0];
    }
    return y;
}

double rhs_value(const ScalarOde& ode, double x, const std::vector<double>& y) {
    std::vector<JetD> yj;
    yj.reserve(y.size());
    for (double v : y) yj.emplace_back(0, v);
    return ode.rhs(JetD(0, x), yj)[0];
}

}  // namespace

JetD solution_jet(const ScalarOde& ode, double x0, const std::vector<double>& init, int order) {
    const int n = ode.order;
    if (static_cast<int>(init.size()) != n) throw std::invalid_argument("solution_jet: need y..y^(n-1)");
    std::vector<double> c(static_cast<std::size_t>(std::max(order, n - 1) + 1), 0.0);
    double fact = 1;
    for (int k = 0; k < n; ++k) {
        if (k > 0) fact *= k;
        c[static_cast<std::size_t>(k)] = init[static_cast<std::size_t>(k)] / fact;
    }
    for (int k = n; k <= order; ++k) {
        const int r = k - n;
        JetD Y(std::vector<double>(c.begin(), c.begin() + k));
        std::vector<JetD> ys;
        JetD D = Y;
        for (int i = 0; i < n; ++i) {
            ys.push_back(D.truncated(r));
            D = D.diff();
        }
        JetD f = ode.rhs(JetD::variable(r, x0), ys);
        // y^(n) = sum_k c_k k!/(k-n)! t^(k-n)
        double ratio = 1;
        for (int i = k - n + 1; i <= k; ++i) ratio *= i;
        c[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(r)] / ratio;
    }
    c.resize(static_cast<std::size_t>(order + 1));
    return JetD(c);
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedEnd: return "reached-end";
        case Termination::Singularity: return "singularity";
        case Termination::StepCollapse: return "step-collapse";
    }
    return "?";
}

std::vector<double> Trajectory::eval(double xq) const {
    if (x.empty()) throw std::domain_error("empty trajectory");
    const bool inc = x.size() < 2 || x.back() > x.front();
    const double lo = std::min(x.front(), x.back()), hi = std::max(x.front(), x.back());
    if (xq < lo - 1e-12 * (1 + std::abs(lo)) || xq > hi + 1e-12 * (1 + std::abs(hi)))
        throw std::domain_error("trajectory evaluated outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (x.size() == 1) return std::vector<double>(d[0].begin(), d[0].begin() + order);
    std::size_t i;
    if (inc) i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xq) - x.begin());
    else i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xq, std::greater<>()) - x.begin());
    i = std::clamp<std::size_t>(i, 1, x.size() - 1);
    const double h = x[i] - x[i - 1];
    return dense_state(d[i - 1], d[i], h, (xq - x[i - 1]) / h, order);
}

Trajectory Trajectory::slice(double lo, double hi) const {
    Trajectory t = *this;
    t.x.clear(), t.d.clear(), t.step.clear(), t.error.clear(), t.residual.clear();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= lo && x[i] <= hi) {
            t.x.push_back(x[i]);
            t.d.push_back(d[i]);
            t.step.push_back(step[i]);
            t.error.push_back(error[i]);
            t.residual.push_back(residual[i]);
        }
    return t;
}

Trajectory integrate(const ScalarOde& ode, double x0, double x1, const std::vector<double>& init, double tol,
                     const IntegrateOptions& opt) {
    using state = std::vector<double>;
    const int n = ode.order;
    Trajectory tr;
    tr.ode_id = ode.id;
    tr.params = ode.params;
    tr.tol = tol;
    tr.order = n;

    auto sys = [&](const state& y, state& dy, double x) {
        dy.resize(y.size());
        for (int k = 0; k + 1 < n; ++k) dy[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k + 1)];
        dy[static_cast<std::size_t>(n - 1)] = rhs_value(ode, x, y);
    };
    auto derivs = [&](double x, const state& y) {
        JetD j = solution_jet(ode, x, y, n + kExtraDerivs);
        std::vector<double> out(static_cast<std::size_t>(n + kExtraDerivs + 1));
        for (int k = 0; k <= n + kExtraDerivs; ++k) out[static_cast<std::size_t>(k)] = j.derivative_value(k);
        return out;
    };

    const double span = std::abs(x1 - x0);
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    double x = x0;
    state y = init, dydx(init.size()), ynew(init.size()), dydxnew(init.size()), yerr(init.size());
    sys(y, dydx, x);
    std::vector<double> dcur = derivs(x, y);
    tr.x.push_back(x);
    tr.d.push_back(dcur);
    tr.step.push_back(0);
    tr.error.push_back(0);
    tr.residual.push_back(0);
    if (ode.singular && ode.singular(x, y)) {
        tr.termination = Termination::Singularity;
        tr.stop_at = x;
        return tr;
    }

    boost::numeric::odeint::runge_kutta_dopri5<state> stepper;
    double h = dir * std::min(opt.h0, span);
    for (std::size_t steps = 0; dir * (x1 - x) > 0; ++steps) {
        if (steps >= opt.max_steps) {
            tr.termination = Termination::StepCollapse;
            tr.stop_at = x;
            return tr;
        }
        if (std::abs(h) < 1e-12 * span || std::abs(h) < 1e-300) {
            // a collapse next to a blow-up of y^(n) is a movable singularity, not a stiffness failure
            const double top0 = std::abs(tr.d.front()[static_cast<std::size_t>(n)]);
            const double top1 = std::abs(tr.d.back()[static_cast<std::size_t>(n)]);
            tr.termination = top1 > 1e4 * (1 + top0) ? Termination::Singularity : Termination::StepCollapse;
            tr.stop_at = x;
            return tr;
        }
        if (std::abs(h) > opt.h_max) h = dir * opt.h_max;
        if (dir * (x + h - x1) > 0) h = x1 - x;
        stepper.do_step(sys, y, dydx, x, ynew, dydxnew, h, yerr);
        double err = 0;
        bool finite = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (!std::isfinite(ynew[i])) finite = false;
            const double mag = std::max({1.0, std::abs(y[i]), std::abs(ynew[i])});
            // error per unit step; with |h| <= h_max <= 1 this bounds the per-step error by tol as well
            err = std::max(err, std::abs(yerr[i]) / (tol * mag * std::abs(h) + 8 * kEps * mag));
        }
        if (!finite || !std::isfinite(err)) {
            h *= 0.2;
            continue;
        }
        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        const double xn = (dir * (x1 - (x + h)) <= 0) ? x1 : x + h;
        std::vector<double> dnew;
        double defect = 0;
        bool ok = true;
        try {
            if (ode.singular && ode.singular(xn, ynew)) throw std::domain_error("singular");
            dnew = derivs(xn, ynew);
            const double hs = xn - x;
            std::vector<double> mid = dense_state(dcur, dnew, hs, 0.5, n);
            std::vector<double> top(dcur.begin() + n - 1, dcur.end()), topn(dnew.begin() + n - 1, dnew.end());
            const double slope = hermite(top, topn, hs, 0.5, 1)[1];
            const double fm = rhs_value(ode, x + 0.5 * hs, mid);
            defect = std::abs(slope - fm);
            // roundoff floor: the slope of the interpolant loses eps*|y^(n-1)|/h
            const double floor = 64 * kEps * ((std::abs(top[0]) + std::abs(topn[0])) / std::abs(hs) + std::abs(fm));
            if (!std::isfinite(defect)) ok = false;
            else if (defect > 10 * tol * (1 + std::abs(fm)) + floor) ok = false;
        } catch (const std::domain_error&) {
            if (ode.singular && ode.singular(xn, ynew)) {
                tr.termination = Termination::Singularity;
                tr.stop_at = xn;
                return tr;
            }
            ok = false;
        }
        if (!ok) {
            h *= 0.5;
            continue;
        }
        tr.x.push_back(xn);
        tr.d.push_back(dnew);
        tr.step.push_back(xn - x);
        tr.error.push_back(err * tol);
        tr.residual.push_back(defect);
        x = xn;
        y = ynew;
        dydx = dydxnew;
        dcur = std::move(dnew);
        h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }
    tr.termination = Termination::ReachedEnd;
    tr.stop_at = x;
    return tr;
}

// ---------------------------------------------------------------- the ODEs

ScalarOde g_ode(double C) {
    ScalarOde o;
    o.id = "g";
    o.params = "C=" + std::to_string(C);
    o.order = 2;
    o.rhs = [C](const JetD& w, const std::vector<JetD>& y) {
        const JetD& g = y[0];
        JetD s = y[1] + 2.0 * w;
        return -(s * s) / (2.0 * g) - (2.0 * C) / g - 10.0 / 3.0;
    };
    o.singular = [](double, const std::vector<double>& y) { return std::abs(y[0]) < 1e-10; };
    return o;
}

ScalarOde peq_ode(double L, double C1) {
    ScalarOde o;
    o.id = "PEQ";
    std::ostringstream ps;
    ps.precision(17);
    ps << "Lambda=" << L << " C1=" << C1;
    o.params = ps.str();
    o.rhs = [L, C1](const JetD& J, const std::vector<JetD>& y) {
        const JetD &P = y[0], &dP = y[1];
        JetD num = dP * dP + 4.0 * L * J * dP + 4.0 * L * L * J * J + 4.0 * C1 * C1 + (20.0 / 3.0) * L * P;
        return -num / (2.0 * P);
    };
    o.singular = [](double, const std::vector<double>& y) { return std::abs(y[0]) < 1e-10; };
    return o;
}

ScalarOde jeq_ode(double L, double C1) {
    ScalarOde o;
    o.id = "JEQ";
    std::ostringstream ps;
    ps.precision(17);
    ps << "Lambda=" << L << " C1=" << C1;
    o.params = ps.str();
    o.order = 3;
    o.rhs = [L, C1](const JetD&, const std::vector<JetD>& y) {
        const JetD &J = y[0], &J1 = y[1], &J2 = y[2];
        JetD num = J2 * J2 - 4.0 * L * J * J1 * J2 - (20.0 / 3.0) * L * J1 * J1 * J1 - 4.0 * L * L * J * J * J1 * J1 -
                   4.0 * C1 * C1 * J1 * J1;
        return num / (2.0 * J1);
    };
    o.singular = [](double, const std::vector<double>& y) { return y[1] < 1e-10; };
    return o;
}

double abel_rhs(double t, double f) {
    return (4 / t) * (t + 1.5) * (t + 1.0 / 3.0) * f * f * f + (5 / t) * (t + 0.4) * f * f + f / (2 * t);
}

ScalarOde abel_ode() {
    ScalarOde o;
    o.id = "Abel";
    o.order = 1;
    o.rhs = [](const JetD& t, const std::vector<JetD>& y) {
        const JetD& f = y[0];
        return (4.0 * (t + 1.5) * (t + 1.0 / 3.0) * f * f * f + 5.0 * (t + 0.4) * f * f + 0.5 * f) / t;
    };
    o.singular = [](double t, const std::vector<double>&) { return std::abs(t) < 1e-12; };
    return o;
}

namespace {
void check_tol(double tol) {
    if (!(tol >= 1e-14 && tol <= 1e-4)) throw std::invalid_argument("tol must lie in [1e-14, 1e-4]");
}
}  // namespace

Trajectory integrate_g(double u0, double C, double w_max, double tol) {
    if (u0 == 0) throw std::invalid_argument("integrate_g: u0 must be nonzero");
    check_tol(tol);
    Trajectory t = integrate(g_ode(C), 0.0, w_max, {u0, 0.0}, tol);
    t.variable = "w";
    std::ostringstream ps;
    ps.precision(17);
    ps << "u0=" << u0 << " C=" << C;
    t.params = ps.str();
    return t;
}

Trajectory integrate_peq(double L, double C1, double J0, double P0, double dP0, double J1, double tol) {
    check_tol(tol);
    Trajectory t = integrate(peq_ode(L, C1), J0, J1, {P0, dP0}, tol);
    t.variable = "J";
    return t;
}

Trajectory integrate_jeq(double L, double C1, double z0, const std::vector<double>& init, double z1, double tol) {
    check_tol(tol);
    if (init.size() != 3 || init[1] <= 0) throw std::domain_error("integrate_jeq: physicality requires J' > 0");
    Trajectory t = integrate(jeq_ode(L, C1), z0, z1, init, tol);
    t.variable = "z";
    return t;
}

// ---------------------------------------------------------------- sandwich and fits

SandwichReport sandwich_report(double u0, double w_max, double tol) {
    if (!(u0 > -6 && u0 < -0.75)) throw std::invalid_argument("sandwich_report: requires -6 < u0 < -3/4");
    SandwichReport r;
    r.traj = integrate_g(u0, 1.0, w_max, tol);
    r.termination = r.traj.termination;
    r.stop_at = r.traj.stop_at;
    r.min_upper_gap = r.min_lower_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.traj.size(); ++i) {
        const double w = r.traj.x[i], g = r.traj.d[i][0];
        r.min_upper_gap = std::min(r.min_upper_gap, -(w * w / 3 + 0.75) - g);
        r.min_lower_gap = std::min(r.min_lower_gap, g + (1.5 * w * w + 6));
    }
    // also probe between mesh points
    for (std::size_t i = 1; i < r.traj.size(); ++i) {
        const double w = 0.5 * (r.traj.x[i - 1] + r.traj.x[i]);
        const double g = r.traj.eval(w)[0];
        r.min_upper_gap = std::min(r.min_upper_gap, -(w * w / 3 + 0.75) - g);
        r.min_lower_gap = std::min(r.min_lower_gap, g + (1.5 * w * w + 6));
    }
    r.holds = r.traj.reached_end() && r.min_upper_gap > 0 && r.min_lower_gap > 0;
    return r;
}

const char* to_string(FitRegime r) {
    switch (r) {
        case FitRegime::Asymptotic: return "asymptotic";
        case FitRegime::Degenerate: return "degenerate";
        case FitRegime::NonAsymptotic: return "non-asymptotic";
    }
    return "?";
}

namespace {

struct TwoTerm {
    double A, B, rms;
};

TwoTerm two_term(const std::vector<double>& w, const std::vector<double>& R, double p) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(w.size()), 2);
    Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        M(r, 0) = std::pow(w[i], p);
        M(r, 1) = std::pow(w[i], p - 1);
        v(r) = R[i];
    }
    Eigen::Vector2d c = M.colPivHouseholderQr().solve(v);
    const double rms = std::sqrt((M * c - v).squaredNorm() / static_cast<double>(w.size()));
    return {c(0), c(1), rms};
}

}  // namespace

AsymptoticFit asymptotic_fit(const Trajectory& traj, double w_lo, double w_hi) {
    if (w_lo < 10 || w_hi <= w_lo) throw std::invalid_argument("asymptotic_fit: need 10 <= w_lo < w_hi");
    AsymptoticFit fit;
    fit.w_lo = w_lo;
    fit.w_hi = w_hi;
    const int N = 301;
    std::vector<double> w(N), R(N);
    double rmax = 0;
    for (int i = 0; i < N; ++i) {
        w[static_cast<std::size_t>(i)] = w_lo + (w_hi - w_lo) * i / (N - 1);
        const double g = traj.eval(w[static_cast<std::size_t>(i)])[0];
        R[static_cast<std::size_t>(i)] = g + 1.5 * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)] + 6;
        rmax = std::max(rmax, std::abs(R[static_cast<std::size_t>(i)]));
    }
    if (rmax < 1e-6 * 1.5 * w_hi * w_hi) {
        fit.regime = FitRegime::Degenerate;
        fit.rms = rmax;
        return fit;
    }
    if (std::abs(R.back()) > 0.1 * w_hi * w_hi) {
        fit.regime = FitRegime::NonAsymptotic;
        fit.amplitude = R.back() / (w_hi * w_hi);
        fit.exponent = 2;
        return fit;
    }
    // a sign change means the window straddles a zero of the remainder: keep the larger single-sign part
    std::size_t first = 0, last = R.size();
    for (std::size_t i = 1; i < R.size(); ++i)
        if ((R[i] > 0) != (R[i - 1] > 0)) {
            fit.split_window = true;
            if (i > R.size() / 2) last = i;
            else first = i;
        }
    std::vector<double> ws(w.begin() + static_cast<std::ptrdiff_t>(first), w.begin() + static_cast<std::ptrdiff_t>(last));
    std::vector<double> Rs(R.begin() + static_cast<std::ptrdiff_t>(first), R.begin() + static_cast<std::ptrdiff_t>(last));
    if (ws.size() < 10) throw std::domain_error("asymptotic_fit: remainder changes sign throughout the window");
    fit.w_lo = ws.front();
    fit.w_hi = ws.back();

    // log-log slope
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const double a = std::log(ws[i]), b = std::log(std::abs(Rs[i]));
        sx += a, sy += b, sxx += a * a, sxy += a * b;
    }
    const double nn = static_cast<double>(ws.size());
    fit.loglog_slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);

    // the rms valley in p is narrow: coarse scan, then Brent inside the best cell
    double pbest = -1, rbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 290; ++i) {
        const double q = -1.0 + 0.01 * i;
        const double r = two_term(ws, Rs, q).rms;
        if (r < rbest) rbest = r, pbest = q;
    }
    auto [p, rms] = boost::math::tools::brent_find_minima([&](double q) { return two_term(ws, Rs, q).rms; },
                                                          pbest - 0.01, pbest + 0.01, 40);
    TwoTerm t = two_term(ws, Rs, p);
    fit.exponent = p;
    fit.amplitude = t.A;
    fit.subleading = t.B;
    fit.rms = rms;
    return fit;
}

// ---------------------------------------------------------------- transforms

Trajectory reparametrize_P_to_J(const Trajectory& P, double C0, double z_start) {
    if (P.order != 2 || P.size() < 2) throw std::invalid_argument("reparametrize_P_to_J: need a P(J) trajectory");
    for (std::size_t i = 0; i < P.size(); ++i)
        if (!(P.d[i][0] > 0))
            throw std::domain_error("physicality violation: P <= 0 at J = " + std::to_string(P.x[i]));
    Trajectory J;
    J.variable = "z";
    J.ode_id = "JEQ";
    J.params = P.params + " C0=" + std::to_string(C0);
    J.tol = P.tol;
    J.order = 3;
    double z = z_start - C0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    for (std::size_t i = 0; i < P.size(); ++i) {
        double qerr = 0;
        if (i > 0) {
            const std::size_t a = i - 1;
            const double h = P.x[i] - P.x[a];
            auto inv = [&](double Jq) {
                const double s = (Jq - P.x[a]) / h;
                return 1.0 / hermite(P.d[a], P.d[i], h, s, 0)[0];
            };
            z += GK::integrate(inv, P.x[a], P.x[i], 15, 1e-12, &qerr);
        }
        const auto& p = P.d[i];  // P, P', P'', P'''
        const double Jv = P.x[i], J1 = p[0], J2 = p[1] * p[0], J3 = (p[2] * p[0] + p[1] * p[1]) * p[0];
        const double J4 = p[0] * (p[3] * p[0] * p[0] + 4 * p[0] * p[1] * p[2] + p[1] * p[1] * p[1]);
        if (!J.x.empty() && !(z > J.x.back())) throw std::domain_error("reparametrize_P_to_J: z not increasing");
        J.x.push_back(z);
        J.d.push_back({Jv, J1, J2, J3, J4});
        J.step.push_back(J.x.size() > 1 ? z - J.x[J.x.size() - 2] : 0);
        J.error.push_back(qerr);
        J.residual.push_back(P.residual[i]);
    }
    J.termination = P.termination;
    J.stop_at = J.x.back();
    return J;
}

AbelReport abel_transform(const Trajectory& P, double L) {
    if (L == 0) throw std::invalid_argument("abel_transform: Lambda must be nonzero");
    AbelReport rep;
    Trajectory& f = rep.f;
    f.variable = "t";
    f.ode_id = "Abel";
    f.params = P.params;
    f.tol = P.tol;
    f.order = 1;
    auto map = [L](double J, double p0, double p1, double p2, double& t, double& fv, double& fp) {
        const double D = J * p1 - 2 * p0;
        if (J == 0) throw std::domain_error("abel_transform: J = 0");
        if (std::abs(D) < 1e-12 * (1 + std::abs(J * p1)))
            throw std::domain_error("abel transform singular (J P' - 2P = 0) at J = " + std::to_string(J));
        t = p0 / (L * J * J);
        fv = L * J * J / D;
        const double dfdJ = (2 * L * J * D - L * J * J * (J * p2 - p1)) / (D * D);
        const double dtdJ = D / (L * J * J * J);
        fp = dfdJ / dtdJ;
    };
    for (std::size_t i = 0; i < P.size(); ++i) {
        const auto& p = P.d[i];
        double t, fv, fp;
        map(P.x[i], p[0], p[1], p[2], t, fv, fp);
        if (!f.x.empty()) {
            const bool inc = f.x.size() < 2 || f.x.back() > f.x[f.x.size() - 2];
            if (t == f.x.back() || (f.x.size() >= 2 && (t > f.x.back()) != inc))
                throw std::domain_error("abel_transform: t not monotone near J = " + std::to_string(P.x[i]));
        }
        const double res = std::abs(fp - abel_rhs(t, fv));
        f.x.push_back(t);
        f.d.push_back({fv, fp, kNaN});
        f.step.push_back(f.x.size() > 1 ? t - f.x[f.x.size() - 2] : 0);
        f.error.push_back(P.error[i]);
        f.residual.push_back(res);
        rep.max_residual = std::max(rep.max_residual, res / (1 + std::abs(fp)));
        // finite-difference cross-check of f' through the dense P interpolant
        const double h = 1e-4 * std::max(1.0, std::abs(P.x[i]));
        if (P.x[i] - h >= std::min(P.front(), P.back()) && P.x[i] + h <= std::max(P.front(), P.back())) {
            auto a = P.eval(P.x[i] - h), b = P.eval(P.x[i] + h);
            // second derivative is not part of eval(); the map only needs it for f'
            double ta, fa, tb, fb, dummy;
            map(P.x[i] - h, a[0], a[1], 0, ta, fa, dummy);
            map(P.x[i] + h, b[0], b[1], 0, tb, fb, dummy);
            const double fd = (fb - fa) / (tb - ta);
            rep.max_fd_mismatch = std::max(rep.max_fd_mismatch, std::abs(fd - fp) / (1 + std::abs(fp)));
        }
    }
    // f'' for dense output: differentiate the Abel right-hand side along the samples
    for (std::size_t i = 0; i < f.size(); ++i) {
        JetD fj = solution_jet(abel_ode(), f.x[i], {f.d[i][0]}, 2);
        f.d[i][2] = fj.derivative_value(2);
    }
    f.termination = P.termination;
    f.stop_at = f.x.back();
    return rep;
}

// ---------------------------------------------------------------- flat families

const char* to_string(FlatCase c) {
    switch (c) {
        case FlatCase::Case1: return "case1";
        case FlatCase::Case2: return "case2";
        case FlatCase::Case3: return "case3";
        case FlatCase::FlatS: return "flat-s";
        case FlatCase::FlatSS: return "flat-ss";
        case FlatCase::LeroyNurowski: return "leroy-nurowski";
        case FlatCase::LeroyNurowskiS: return "leroy-nurowski-s";
    }
    return "?";
}

double flat_P(const FlatFamilyParams& p, double J) {
    const double L = p.Lambda;
    switch (p.kind) {
        case FlatCase::Case1:
        case FlatCase::Case2:
        case FlatCase::Case3: {
            const double c = std::cbrt(J);
            return -1.5 * L * J * J + p.C2 * c * c;
        }
        case FlatCase::FlatS: return -1.5 * L * J * J - 6 * p.C1 * p.C1 / L;
        case FlatCase::FlatSS: return -1.5 * L * J * J;
        case FlatCase::LeroyNurowski: return -L * J * J / 3 - 0.75 * p.C1 * p.C1 / L;
        case FlatCase::LeroyNurowskiS: return -L * J * J / 3;
    }
    return kNaN;
}

namespace {

void check_case(const FlatFamilyParams& p) {
    const double L = p.Lambda, C2 = p.C2;
    bool ok = true;
    switch (p.kind) {
        case FlatCase::Case1: ok = L < 0 && C2 > 0; break;
        case FlatCase::Case2: ok = L < 0 && C2 < 0; break;
        case FlatCase::Case3: ok = L > 0 && C2 > 0; break;
        case FlatCase::FlatS:
        case FlatCase::LeroyNurowski: ok = L != 0 && p.C1 != 0; break;
        default: ok = L != 0;
    }
    if (!ok) throw std::invalid_argument(std::string("flat_family: parameters violate the sign conditions of ") +
                                         to_string(p.kind));
}

double flat_M(const FlatFamilyParams& p) {
    const double cl = std::cbrt(p.Lambda);
    if (p.kind == FlatCase::Case1) return std::pow(-2 * p.C2 * cl / 3, 0.25);
    return std::pow(2 * p.C2 * cl / 3, 0.25);
}

}  // namespace

double flat_relation(const FlatFamilyParams& p, double J) {
    check_case(p);
    const double M = flat_M(p), G = std::cbrt(p.Lambda * J), M3 = M * M * M;
    if (p.kind == FlatCase::Case1) {
        const double r2 = std::sqrt(2.0);
        // atan2 keeps the relation continuous through G^2 = M^2
        return (std::log((G * G + r2 * G * M + M * M) / (G * G - r2 * G * M + M * M)) +
                2 * std::atan2(r2 * G * M, M * M - G * G)) /
               (-2 * r2 * M3);
    }
    if (p.kind == FlatCase::Case2 || p.kind == FlatCase::Case3)
        return (std::log(std::abs((M + G) / (M - G))) + 2 * std::atan(G / M)) / (2 * M3);
    throw std::invalid_argument("flat_relation: closed-form family has no implicit relation");
}

FlatPoint flat_family(const FlatFamilyParams& p, double z) {
    check_case(p);
    const double L = p.Lambda, s = z + p.C0;
    FlatPoint out;
    auto closed = [&](double J) {
        if (!std::isfinite(J)) throw std::domain_error("flat_family: closed form singular at z + C0 = " + std::to_string(s));
        out.J = J;
        out.dJ = flat_P(p, J);
        return out;
    };
    switch (p.kind) {
        case FlatCase::FlatS: {
            const double tn = std::tan(3 * p.C1 * s);
            if (tn == 0) throw std::domain_error("flat_family: pole at z + C0 = " + std::to_string(s));
            return closed(2 * p.C1 / (L * tn));
        }
        case FlatCase::FlatSS:
            if (s == 0) throw std::domain_error("flat_family: pole at z + C0 = 0");
            return closed(2 / (3 * L * s));
        case FlatCase::LeroyNurowski: {
            const double tn = std::tan(0.5 * p.C1 * s);
            if (tn == 0) throw std::domain_error("flat_family: pole at z + C0 = " + std::to_string(s));
            return closed(1.5 * p.C1 / (L * tn));
        }
        case FlatCase::LeroyNurowskiS:
            if (s == 0) throw std::domain_error("flat_family: pole at z + C0 = 0");
            return closed(3 / (L * s));
        default: break;
    }
    const double M = flat_M(p), M3 = M * M * M;
    double lo, hi;
    const double Jstar = (p.kind == FlatCase::Case1) ? 0 : std::pow(2 * p.C2 / (3 * L), 0.75);
    if (p.kind == FlatCase::Case1) {
        const double B = std::numbers::pi / (std::sqrt(2.0) * M3);
        if (std::abs(s) >= B)
            throw std::domain_error("flat_family: case 1 defined only for |z + C0| < pi/(sqrt(2) M^3) = " +
                                    std::to_string(B) + " (singular boundary)");
        lo = -1, hi = 1;
        while (flat_relation(p, lo) > s) lo *= 2;
        while (flat_relation(p, hi) < s) hi *= 2;
    } else if (p.kind == FlatCase::Case2) {
        const double B = std::numbers::pi / (2 * M3);
        if (std::abs(s) <= B)
            throw std::domain_error("flat_family: case 2 undefined for |z + C0| <= pi/(2 M^3) = " + std::to_string(B) +
                                    " (singular boundary)");
        if (s < 0) {
            lo = Jstar * (1 + 1e-15), hi = 2 * Jstar;
            while (flat_relation(p, hi) < s) hi *= 2;
        } else {
            hi = -Jstar * (1 + 1e-15), lo = -2 * Jstar;
            while (flat_relation(p, lo) > s) lo *= 2;
        }
    } else {
        lo = -Jstar * (1 - 1e-15), hi = Jstar * (1 - 1e-15);
        // J approaches +-J* exponentially in z; past double resolution return the saturated value
        // and let relation_residual say how far off it is
        const bool below = !(flat_relation(p, lo) < s), above = !(s < flat_relation(p, hi));
        if (below || above) {
            out.J = below ? lo : hi;
            out.dJ = flat_P(p, out.J);
            out.relation_residual = std::abs(flat_relation(p, out.J) - s);
            return out;
        }
    }
    // bisection to a tight bracket, Newton polish with dz/dJ = 1/P
    // (near J = 0 the relation goes like J^(1/3), so a tight J bracket is not enough: stop on the residual)
    for (int it = 0; it < 2200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const bool narrow = (hi - lo) <= 1e-9 * (1 + std::abs(lo) + std::abs(hi));
        if (narrow && std::abs(flat_relation(p, mid) - s) <= 1e-13 * (1 + std::abs(s))) break;
        (flat_relation(p, mid) < s ? lo : hi) = mid;
    }
    double J = 0.5 * (lo + hi);
    for (int it = 0; it < 30; ++it) {
        const double r = flat_relation(p, J) - s;
        const double Jn = J - r * flat_P(p, J);
        if (!(Jn > lo && Jn < hi)) break;
        if (Jn == J) break;
        J = Jn;
    }
    out.J = J;
    out.dJ = flat_P(p, J);
    out.relation_residual = std::abs(flat_relation(p, J) - s);
    return out;
}

std::complex<double> K_of_solution(double J, double Jp, double Jpp, double Lambda, double C1) {
    return K_value(J, Jp, Jpp, Lambda, C1);
}

}  // namespace typen
