// SPDX-License-Identifier: Apache-2.0
#pragma once

// Adaptive integration of the reduced ODEs, the P -> J(z) and Abel
// transforms, the conformally flat families and asymptotic fitting.
//
// Integrator: Dormand-Prince 5(4) error stepper (Boost.Odeint) driven by our
// own step controller.  A step is accepted only if
//   * the embedded error estimate per unit step is below tol * max(1, |y_i|)
//     (steps are capped at h_max <= 1, so the per-step estimate is below tol too), and
//   * the defect of the Hermite interpolant at the step midpoint,
//     |p^(n)(mid) - f(mid, p, ..., p^(n-1))|, is below 10 tol (1 + |y^(n)|).
// Higher derivatives at the mesh points come from Taylor jets of the ODE, so
// dense output is two-point Hermite of full order rather than cubic.

#include "typen/jet.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace typen {

using JetD = Jet<double>;

// y^(n) = rhs(x, [y, y', ..., y^(n-1)]) evaluated on jets.
struct ScalarOde {
    std::string id;
    std::string params;
    int order = 2;
    std::function<JetD(const JetD& x, const std::vector<JetD>& y)> rhs;
    // structured stop, e.g. |g| < 1e-10
    std::function<bool(double x, const std::vector<double>& y)> singular;
};

// Taylor jet of the solution through (x0, init = y..y^(n-1)) up to t^order.
JetD solution_jet(const ScalarOde& ode, double x0, const std::vector<double>& init, int order);

enum class Termination { ReachedEnd, Singularity, StepCollapse };
const char* to_string(Termination t);

struct Trajectory {
    std::string variable = "x";
    std::string ode_id, params;
    double tol = 0;
    int order = 2;
    std::vector<double> x;
    std::vector<std::vector<double>> d;  // d[i][k] = y^(k)(x_i), k = 0..order+2 (fewer for transformed trajectories)
    std::vector<double> step, error, residual;
    Termination termination = Termination::ReachedEnd;
    double stop_at = 0;  // location of the singularity / collapse

    std::size_t size() const { return x.size(); }
    double front() const { return x.front(); }
    double back() const { return x.back(); }
    bool reached_end() const { return termination == Termination::ReachedEnd; }
    // y^(k)(xq) for k = 0..order-1 from the Hermite interpolant of the bracketing step
    std::vector<double> eval(double xq) const;
    Trajectory slice(double lo, double hi) const;
};

struct IntegrateOptions {
    double h0 = 1e-3;
    double h_max = 0.25;
    std::size_t max_steps = 2'000'000;
};

Trajectory integrate(const ScalarOde& ode, double x0, double x1, const std::vector<double>& init, double tol,
                     const IntegrateOptions& opt = {});

// The ODEs themselves.
ScalarOde g_ode(double C);                            // g'' = -(g'+2w)^2/(2g) - 2C/g - 10/3
ScalarOde peq_ode(double Lambda, double C1);          // P(J)
ScalarOde jeq_ode(double Lambda, double C1);          // J(z), third order
ScalarOde abel_ode();                                 // f(t), first order

Trajectory integrate_g(double u0, double C, double w_max, double tol);
Trajectory integrate_peq(double Lambda, double C1, double J0, double P0, double dP0, double J1, double tol);
Trajectory integrate_jeq(double Lambda, double C1, double z0, const std::vector<double>& init, double z1, double tol);

struct SandwichReport {
    bool holds = false;
    double min_upper_gap = 0;  // min over samples of  -(w^2/3 + 3/4) - g
    double min_lower_gap = 0;  // min over samples of  g + (3w^2/2 + 6)
    Termination termination = Termination::ReachedEnd;
    double stop_at = 0;
    Trajectory traj;
};
// Requires -6 < u0 < -3/4; integrates with C = 1.
SandwichReport sandwich_report(double u0, double w_max, double tol);

enum class FitRegime { Asymptotic, Degenerate, NonAsymptotic };
const char* to_string(FitRegime r);

// Remainder R = g + (3/2) w^2 + 6 on [w_lo, w_hi].  exponent/amplitude come from
// the two-term model A w^p + B w^(p-1) (variable projection over p); the plain
// log-log slope is reported alongside.
struct AsymptoticFit {
    FitRegime regime = FitRegime::Asymptotic;
    double exponent = 0;
    double amplitude = 0;  // estimate of u_{4/3}
    double subleading = 0;
    double loglog_slope = 0;
    double rms = 0;
    bool split_window = false;  // remainder changed sign; fitted on the larger single-sign half
    double w_lo = 0, w_hi = 0;
};
AsymptoticFit asymptotic_fit(const Trajectory& traj, double w_lo, double w_hi);

// z(J) = z_start - C0 + int_{J_start}^J dJ/P by adaptive Gauss-Kronrod on each
// step; returns the J(z) trajectory (order 3, derivatives by the chain rule).
Trajectory reparametrize_P_to_J(const Trajectory& P_traj, double C0, double z_start = 0.0);

struct AbelReport {
    Trajectory f;             // f(t), order 1
    double max_residual = 0;  // |f' - rhs(t, f)|
    double max_fd_mismatch = 0;  // chain-rule f' vs finite differences
};
// t = P/(Lambda J^2), f = Lambda J^2/(J P' - 2P); C1 = 0 branch.
AbelReport abel_transform(const Trajectory& P_traj, double Lambda);
// Right-hand side of the Abel equation f' = ...
double abel_rhs(double t, double f);

enum class FlatCase { Case1, Case2, Case3, FlatS, FlatSS, LeroyNurowski, LeroyNurowskiS };
const char* to_string(FlatCase c);

struct FlatFamilyParams {
    FlatCase kind = FlatCase::Case3;
    double Lambda = 1, C0 = 0, C1 = 0, C2 = 1;
};

struct FlatPoint {
    double J = 0, dJ = 0;
    double relation_residual = 0;  // |implicit relation - (z + C0)| (0 for closed forms)
};
// P(J) of the family; used for the returned derivative.
double flat_P(const FlatFamilyParams& p, double J);
// z + C0 as a function of J for the implicit cases.
double flat_relation(const FlatFamilyParams& p, double J);
FlatPoint flat_family(const FlatFamilyParams& p, double z);

std::complex<double> K_of_solution(double J, double Jp, double Jpp, double Lambda, double C1);

}  // namespace typen
