// SPDX-License-Identifier: Apache-2.0
#pragma once

// CR invariants of the structure defined by c(zeta, zetabar) for the ansatz
//   c = (dA + i F2(z) + C1)/A,   z = Im int 2/A dzeta,   F2 = J''/(2J') - Lambda J,
// evaluated on bivariate Taylor jets in (zeta, zetabar) at a point.

#include "typen/jet.hpp"
#include "typen/numeric_ode.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace typen {

using cplx_d = std::complex<double>;

// J(z0 + t) as a Taylor jet, with the ODE parameters it was propagated with.
struct ZJet {
    double z0 = 0;
    double Lambda = 0, C1 = 0;
    Jet<double> J;
    int order() const { return J.order(); }
};

// Propagates the J equation from (J, J', J'') at z0.  order <= 20, J' > 0.
ZJet z_jet_of_J(double z0, double J, double Jp, double Jpp, double Lambda, double C1, int order);

// Truncated bivariate series sum_{a+b<=N} c_ab dzeta^a dzetabar^b.
class CJet {
public:
    CJet() = default;
    explicit CJet(int order, cplx_d c0 = 0);
    static CJet zeta(int order, cplx_d zeta0);     // zeta0 + dzeta
    static CJet zetabar(int order, cplx_d zeta0);  // conj(zeta0) + dzetabar

    int order() const { return n_; }
    cplx_d& at(int a, int b) { return c_[idx(a, b)]; }
    const cplx_d& at(int a, int b) const { return c_[idx(a, b)]; }
    cplx_d value() const { return c_[0]; }
    // d^a/dzeta^a d^b/dzetabar^b at the base point
    cplx_d derivative(int a, int b) const;

    CJet d_zeta() const;
    CJet d_zetabar() const;
    // the jet of conj(f): coefficient (a, b) -> conj of coefficient (b, a)
    CJet mirror_conj() const;
    CJet truncated(int n) const;

    CJet operator-() const;
    CJet& operator+=(const CJet& o);
    CJet& operator-=(const CJet& o);
    CJet& operator*=(cplx_d s);
    CJet& operator+=(cplx_d s) { c_[0] += s; return *this; }
    friend CJet operator+(CJet a, const CJet& b) { return a += b; }
    friend CJet operator-(CJet a, const CJet& b) { return a -= b; }
    friend CJet operator*(CJet a, cplx_d s) { return a *= s; }
    friend CJet operator*(cplx_d s, CJet a) { return a *= s; }
    friend CJet operator+(CJet a, cplx_d s) { return a += s; }
    friend CJet operator+(cplx_d s, CJet a) { return a += s; }
    friend CJet operator*(const CJet& a, const CJet& b);
    friend CJet operator/(const CJet& a, const CJet& b);

private:
    static std::size_t idx(int a, int b) {
        const int d = a + b;
        return static_cast<std::size_t>(d * (d + 1) / 2 + b);
    }
    int n_ = 0;
    std::vector<cplx_d> c_{cplx_d(0)};
};

// f(z0 + w) for a univariate real jet f and a bivariate w with zero constant term.
CJet compose(const Jet<double>& f, const CJet& w);

enum class AChoice { Const2, Identity };
const char* to_string(AChoice a);

// Base point for a given z: A = 2 -> zeta0 = x + i z; A = zeta -> zeta0 = rho e^{i z/2}.
struct CJetPair {
    CJet c, cbar;
    CJet p;  // p = F1/sqrt(A Abar), F1 = +sqrt(J')
    cplx_d zeta0;
    AChoice A = AChoice::Const2;
};
// `spread` is x for A = 2 and rho for A = zeta (the coordinate transverse to z).
CJetPair c_jet(const ZJet& J, int order, AChoice A = AChoice::Const2, double spread = 0.0);

struct InvariantSet {
    double z = 0;
    bool hyperquadric = false;  // |r| below 1e-10: invariants undefined
    cplx_d r, l;
    cplx_d alpha;        // defined up to sign (epsilon = +-1)
    cplx_d alpha_sq;
    double beta = 0, gamma = 0;
    cplx_d theta;
    double reality_defect = 0;  // max |Im beta|, |Im gamma|
    bool epsilon_ambiguous = true;
};
InvariantSet cartan_invariants(const CJetPair& cj);

// alpha_I^2 on the C1 = 0 flat family from the closed formula.
cplx_d alpha_sq_flat_formula(double z, double Lambda, double C2, double C0, FlatCase c);

// What solution to evaluate along.
struct SolutionSpec {
    enum class Kind { LeroyNurowski, LeroyNurowskiS, FlatS, FlatSS, Case1, Case2, Case3, Series, Interior } kind =
        Kind::LeroyNurowski;
    double Lambda = -1, C0 = 0, C1 = 1, C2 = 1;
    double u0 = 1;       // Series: J(0)=0, J'(0)=u0, J''(0)=0;  Interior: P(0)=-u0, P'(0)=0 with Lambda=-1,
                         // i.e. the g solution through g(0)=u0 when C1 = 1
    double tol = 1e-12;  // integration tolerance for Series / Interior away from z = 0
};
const char* to_string(SolutionSpec::Kind k);

// Evaluates solutions at arbitrary z, caching the numeric trajectory when one is needed.
class SolutionEvaluator {
public:
    explicit SolutionEvaluator(SolutionSpec s);
    const SolutionSpec& spec() const { return s_; }
    double Lambda() const;
    double C1() const;
    // (J, J', J'') at z; throws std::domain_error when unphysical or out of range
    std::vector<double> state(double z) const;
    ZJet jet(double z, int order = 9) const;

private:
    SolutionSpec s_;
    mutable std::optional<Trajectory> fwd_, bwd_;
};

struct ConstancyReport {
    double max_dev_alpha_sq = 0, max_dev_beta = 0, max_dev_gamma = 0, max_dev_theta = 0;
    std::vector<double> hyperquadric_z;  // samples where r vanished
};
struct InvariantProfile {
    std::vector<InvariantSet> samples;
    ConstancyReport constancy;
};
InvariantProfile invariant_profile(const SolutionSpec& s, double z_lo, double z_hi, int samples,
                                   AChoice A = AChoice::Const2);

struct PdeResiduals {
    double res_Cc = 0, res_Einstein = 0, res_Psi3 = 0;
};
PdeResiduals pde_residuals(const ZJet& J);
PdeResiduals pde_residuals(const SolutionSpec& s, double z);

// K two ways: from the closed expression in J, J', J'' and from the Psi4 bracket
// under the ansatz (A = 2).
struct Psi4Check {
    cplx_d K_formula, K_direct;
};
Psi4Check psi4_consistency(const ZJet& J);

// Published reference constants (zeta_I, eta_I are not computed).
struct ReferenceInvariants {
    cplx_d alpha_sq;
    double beta, gamma;
    cplx_d theta;
    cplx_d eta_sq;  // reference only
    double zeta_I;  // reference only
};
ReferenceInvariants leroy_nurowski_reference();
ReferenceInvariants flat_reference();

}  // namespace typen
