// SPDX-License-Identifier: Apache-2.0
#pragma once

// Metric reconstruction on coordinate grids (A = 2 gauge) and the file
// formats shared by the command line and the tests.
//
//   g = J'/(2 cos^2(r/2)) [dzeta dzetabar + lambda (dr + W dzeta + Wbar dzetabar + H lambda)]
//   W = (1/2)(J''/(2J') + Lambda J + i C1)(e^{-ir} + 1),   H = -(1/6) Lambda J' cos r
//   lambda = (e^{C1 x} du - 2 I(z) dx) / E(z),
//   E = exp(k_inner + int_{z_ref}^z F2),  I = k_outer + int_{z_ref}^z E,  F2 = J''/(2J') - Lambda J.

#include "typen/cr_invariants.hpp"
#include "typen/numeric_ode.hpp"

#include <json.hpp>

#include <complex>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace typen {

inline constexpr const char* kSchemaVersion = "typen-forge/1";

// "%.17g"; non-finite values print as nan / inf (CSV) and null (JSON).
std::string fmt17(double v);
// JSON text with every number printed by fmt17; key order as inserted.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

struct GridPoint {
    double x = 0, z = 0, u = 0, r = 0;
};
// One "x z u r" tuple per line, whitespace separated; '#' starts a comment.
// Throws std::invalid_argument naming the line on malformed input.
std::vector<GridPoint> parse_grid(std::istream& in);

struct MetricOptions {
    double inner_constant = 0;    // k_inner
    double outer_constant = 0;    // k_outer
    std::optional<double> z_ref;  // default: lowest z on the grid
    double quad_tol = 1e-12;
    double r_pole_margin = 1e-8;  // minimum |cos(r/2)|
    int threads = 0;              // 0: forge_threads()
};

struct MetricSample {
    GridPoint at;
    double J = 0, Jp = 0;  // J and J' = P(J) at z
    double p = 0;          // F1 / sqrt(A Abar)
    cplx_d c;
    cplx_d W;
    double H = 0;
    double lambda_du = 0, lambda_dx = 0;
    cplx_d psi4;           // Psi4 at (z, r)
};

// Throws std::domain_error near r = +-pi or where the solution is unphysical,
// std::runtime_error when a quadrature does not converge.
std::vector<MetricSample> reconstruct_metric(const SolutionSpec& s, const std::vector<GridPoint>& grid,
                                             const MetricOptions& opt = {});

// hardware_concurrency, capped by TYPEN_FORGE_THREADS when set (>= 1).
int forge_threads();

std::string describe(const SolutionSpec& s);
std::string metric_csv(const SolutionSpec& s, const MetricOptions& opt, const std::vector<MetricSample>& m);
nlohmann::ordered_json metric_json(const SolutionSpec& s, const MetricOptions& opt,
                                   const std::vector<MetricSample>& m);

// "# ode=<id> params=<...> tol=<...>" then x,y,y',residual rows.
std::string trajectory_csv(const Trajectory& t);

std::string profile_csv(const SolutionSpec& s, const InvariantProfile& p);

}  // namespace typen
