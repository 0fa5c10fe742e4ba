// SPDX-License-Identifier: Apache-2.0
#include "typen/cr_invariants.hpp"
#include "typen/exact_series.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace typen {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx_d kI(0, 1);
}  // namespace

// ---------------------------------------------------------------- z jets

ZJet z_jet_of_J(double z0, double J, double Jp, double Jpp, double Lambda, double C1, int order) {
    if (order > 20) throw std::invalid_argument("z_jet_of_J: order must be <= 20");
    if (order < 2) throw std::invalid_argument("z_jet_of_J: order must be >= 2");
    if (!(Jp > 0)) throw std::domain_error("physicality violation: J' <= 0 at z = " + std::to_string(z0));
    ZJet out;
    out.z0 = z0;
    out.Lambda = Lambda;
    out.C1 = C1;
    out.J = solution_jet(jeq_ode(Lambda, C1), z0, {J, Jp, Jpp}, order);
    return out;
}

// ---------------------------------------------------------------- bivariate jets

CJet::CJet(int order, cplx_d c0) : n_(order), c_(idx(0, order + 1), cplx_d(0)) { c_[0] = c0; }

CJet CJet::zeta(int order, cplx_d z0) {
    CJet j(order, z0);
    if (order >= 1) j.at(1, 0) = 1;
    return j;
}

CJet CJet::zetabar(int order, cplx_d z0) {
    CJet j(order, std::conj(z0));
    if (order >= 1) j.at(0, 1) = 1;
    return j;
}

cplx_d CJet::derivative(int a, int b) const {
    double f = 1;
    for (int i = 2; i <= a; ++i) f *= i;
    for (int i = 2; i <= b; ++i) f *= i;
    return at(a, b) * f;
}

CJet CJet::d_zeta() const {
    if (n_ == 0) throw std::domain_error("CJet: derivative of an order-0 jet");
    CJet r(n_ - 1);
    for (int d = 0; d <= n_ - 1; ++d)
        for (int b = 0; b <= d; ++b) r.at(d - b, b) = at(d - b + 1, b) * double(d - b + 1);
    return r;
}

CJet CJet::d_zetabar() const {
    if (n_ == 0) throw std::domain_error("CJet: derivative of an order-0 jet");
    CJet r(n_ - 1);
    for (int d = 0; d <= n_ - 1; ++d)
        for (int b = 0; b <= d; ++b) r.at(d - b, b) = at(d - b, b + 1) * double(b + 1);
    return r;
}

CJet CJet::mirror_conj() const {
    CJet r(n_);
    for (int d = 0; d <= n_; ++d)
        for (int b = 0; b <= d; ++b) r.at(d - b, b) = std::conj(at(b, d - b));
    return r;
}

CJet CJet::truncated(int n) const {
    n = std::min(n, n_);
    CJet r(n);
    std::copy(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(idx(0, n + 1)), r.c_.begin());
    return r;
}

CJet CJet::operator-() const {
    CJet r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

CJet& CJet::operator+=(const CJet& o) {
    if (o.n_ < n_) *this = truncated(o.n_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

CJet& CJet::operator-=(const CJet& o) {
    if (o.n_ < n_) *this = truncated(o.n_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

CJet& CJet::operator*=(cplx_d s) {
    for (auto& x : c_) x *= s;
    return *this;
}

CJet operator*(const CJet& a, const CJet& b) {
    const int n = std::min(a.n_, b.n_);
    CJet r(n);
    for (int da = 0; da <= n; ++da)
        for (int ba = 0; ba <= da; ++ba) {
            const cplx_d x = a.at(da - ba, ba);
            if (x == cplx_d(0)) continue;
            for (int db = 0; da + db <= n; ++db)
                for (int bb = 0; bb <= db; ++bb) r.at(da - ba + db - bb, ba + bb) += x * b.at(db - bb, bb);
        }
    return r;
}

namespace {

// a^alpha = a0^alpha (1 + u)^alpha by the binomial series; u has no constant term,
// so the series stops at the jet order.
CJet cjet_pow(const CJet& a, double alpha) {
    const cplx_d a0 = a.value();
    if (a0 == cplx_d(0)) throw std::domain_error("CJet: power of a jet with zero constant term");
    CJet u = a * (1.0 / a0);
    u.at(0, 0) = 0;
    CJet acc(a.order(), 1.0), term(a.order(), 1.0);
    double binom = 1;
    for (int k = 1; k <= a.order(); ++k) {
        binom *= (alpha - (k - 1)) / k;
        term = term * u;
        acc += term * cplx_d(binom);
    }
    return acc * std::pow(a0, alpha);
}

}  // namespace

CJet operator/(const CJet& a, const CJet& b) {
    if (b.value() == cplx_d(0)) throw std::domain_error("CJet division by a jet with zero constant term");
    return a * cjet_pow(b, -1.0);
}

CJet compose(const Jet<double>& f, const CJet& w) {
    if (w.value() != cplx_d(0)) throw std::domain_error("compose: inner jet must vanish at the base point");
    const int n = std::min(f.order(), w.order());
    CJet acc(n);
    const CJet wt = w.truncated(n);
    for (int k = f.order(); k >= 0; --k) {
        acc = acc * wt;
        acc += cplx_d(f[static_cast<std::size_t>(k)]);
    }
    return acc;
}

const char* to_string(AChoice a) { return a == AChoice::Const2 ? "A=2" : "A=zeta"; }

CJetPair c_jet(const ZJet& zj, int order, AChoice A, double spread) {
    if (zj.order() < order + 2)
        throw std::invalid_argument("c_jet: J jet of order " + std::to_string(zj.order()) + " < requested order " +
                                    std::to_string(order) + " + 2");
    const double L = zj.Lambda, C1 = zj.C1;
    const Jet<double> J1 = zj.J.diff(), J2 = J1.diff();
    if (!(J1[0] > 0)) throw std::domain_error("c_jet: physicality requires J' > 0");
    const Jet<double> F2 = J2 / (2.0 * J1.truncated(J2.order())) - L * zj.J.truncated(J2.order());
    const Jet<double> F1 = jet_pow(J1, 0.5);

    CJetPair out;
    out.A = A;
    CJet dz;  // z - z0 as a bivariate jet
    CJet Aj, Abar;
    if (A == AChoice::Const2) {
        out.zeta0 = cplx_d(spread, zj.z0);
        dz = CJet(order);
        if (order >= 1) dz.at(1, 0) = -0.5 * kI, dz.at(0, 1) = 0.5 * kI;
        Aj = CJet(order, 2.0);
        Abar = CJet(order, 2.0);
    } else {
        const double rho = spread > 0 ? spread : 1.0;
        out.zeta0 = std::polar(rho, zj.z0 / 2);
        if (std::abs(out.zeta0) == 0) throw std::domain_error("c_jet: zeta = 0 is outside the A = zeta chart");
        // log(1 + dzeta/zeta0) without its constant; z = 2 Im log zeta
        CJet ell(order), pw(order, 1.0), x(order);
        if (order >= 1) x.at(1, 0) = 1.0 / out.zeta0;
        for (int k = 1; k <= order; ++k) {
            pw = pw * x;
            ell += pw * cplx_d((k % 2 ? 1.0 : -1.0) / k);
        }
        dz = (ell - ell.mirror_conj()) * (-kI);
        Aj = CJet::zeta(order, out.zeta0);
        Abar = CJet::zetabar(order, out.zeta0);
    }
    const CJet F2z = compose(F2, dz), F1z = compose(F1.truncated(order), dz);
    const CJet dA = A == AChoice::Const2 ? CJet(order) : CJet(order, 1.0);
    out.c = (dA + kI * F2z + cplx_d(C1)) / Aj;
    out.cbar = (dA + (-kI) * F2z + cplx_d(C1)) / Abar;
    out.p = F1z * cjet_pow(Aj * Abar, -0.5);
    return out;
}

// ---------------------------------------------------------------- invariants

InvariantSet cartan_invariants(const CJetPair& cj) {
    if (cj.c.order() < 5)
        throw std::invalid_argument("cartan_invariants: needs c to order 5 (J jets of order 7)");
    const CJet &c = cj.c, &cb = cj.cbar;
    const CJet l = -(c.d_zetabar().d_zeta()) - c * c.d_zetabar();
    const CJet lb = -(cb.d_zeta().d_zetabar()) - cb * cb.d_zeta();
    const CJet r = (lb.d_zetabar() + 2.0 * cb * lb) * (1.0 / 6);
    const CJet rb = (l.d_zeta() + 2.0 * c * l) * (1.0 / 6);

    InvariantSet s;
    s.l = l.value();
    s.r = r.value();
    const cplx_d R = r.value(), RB = rb.value();
    if (std::abs(R) < 1e-10) {
        s.hyperquadric = true;
        s.alpha = s.alpha_sq = s.theta = cplx_d(kNaN, kNaN);
        s.beta = s.gamma = kNaN;
        return s;
    }
    const cplx_d C = c.value(), CB = cb.value();
    const cplx_d dr = r.derivative(1, 0), dbr = r.derivative(0, 1);
    const cplx_d drb = rb.derivative(1, 0), dbrb = rb.derivative(0, 1);
    const cplx_d ddr = r.derivative(1, 1), ddrb = rb.derivative(1, 1);
    const cplx_d d2br = r.derivative(0, 2), d2brb = rb.derivative(0, 2);
    const cplx_d dbc = c.derivative(0, 1), dbcb = cb.derivative(0, 1);
    const cplx_d rrb = R * RB;

    s.alpha = -(5.0 * RB * dr + R * drb + 8.0 * C * rrb) / (8.0 * std::sqrt(RB) * std::pow(std::pow(rrb, 7), 0.125));
    s.alpha_sq = s.alpha * s.alpha;
    const cplx_d p94 = std::pow(rrb, 2.25), p74 = std::pow(rrb, 1.75);
    const cplx_d beta =
        (3.0 * RB * RB * dbr * dr + 3.0 * R * R * drb * dbrb -
         rrb * (drb * dbr + 7.0 * dr * dbrb + 16.0 * CB * RB * dr + 16.0 * C * R * dbrb - 8.0 * rrb * dbc +
                16.0 * C * CB * rrb)) /
        (32.0 * p94);
    const cplx_d gamma =
        -(7.0 * RB * RB * dbr * dr + 7.0 * R * R * dbrb * drb -
          rrb * (8.0 * R * ddrb + 8.0 * RB * ddr + drb * dbr + dr * dbrb + 4.0 * C * RB * dbr + 4.0 * CB * R * drb +
                 4.0 * C * R * dbrb + 4.0 * CB * RB * dr + 24.0 * rrb * dbc + 16.0 * C * CB * rrb)) /
        (32.0 * p94);
    s.theta = -kI *
              (5.0 * RB * RB * dbr * dbr + 5.0 * R * R * dbrb * dbrb -
               rrb * (4.0 * R * d2brb + 4.0 * RB * d2br - 2.0 * dbr * dbrb - 4.0 * CB * RB * dbr - 4.0 * CB * R * dbrb +
                      16.0 * rrb * dbcb)) /
              (16.0 * R * p74);
    s.beta = beta.real();
    s.gamma = gamma.real();
    s.reality_defect = std::max(std::abs(beta.imag()), std::abs(gamma.imag()));
    return s;
}

cplx_d alpha_sq_flat_formula(double z, double L, double C2, double C0, FlatCase kind) {
    if (C2 == 0) return -16 * std::sqrt(0.4);  // the ratio is identically 1
    if (kind != FlatCase::Case1 && kind != FlatCase::Case2 && kind != FlatCase::Case3)
        throw std::invalid_argument("alpha_sq_flat_formula: needs one of the C1 = 0 flat cases");
    const double J = flat_family({kind, L, C0, 0, C2}, z).J;
    const double c = std::cbrt(J), J43 = c * c * c * c;
    const double den = 3 * L * J43 - 2 * C2;
    if (std::abs(den) < 1e-14 * (std::abs(3 * L * J43) + std::abs(2 * C2)))
        throw std::domain_error("alpha_sq_flat_formula: pole (3 Lambda J^(4/3) = 2 C2)");
    const double q = (3 * L * J43 + 2 * C2) / den;
    return -16 * std::sqrt(0.4) * q * q;
}

// ---------------------------------------------------------------- solutions

const char* to_string(SolutionSpec::Kind k) {
    using K = SolutionSpec::Kind;
    switch (k) {
        case K::LeroyNurowski: return "leroy-nurowski";
        case K::LeroyNurowskiS: return "leroy-nurowski-s";
        case K::FlatS: return "flat-s";
        case K::FlatSS: return "flat-ss";
        case K::Case1: return "case1";
        case K::Case2: return "case2";
        case K::Case3: return "case3";
        case K::Series: return "series";
        case K::Interior: return "interior";
    }
    return "?";
}

SolutionEvaluator::SolutionEvaluator(SolutionSpec s) : s_(s) {
    if (s_.kind == SolutionSpec::Kind::Series && !(s_.u0 > 0))
        throw std::domain_error("series solution needs u0 > 0 (J'(0) = u0)");
    if (s_.kind == SolutionSpec::Kind::Interior && !(s_.u0 < 0))
        throw std::domain_error("interior solution needs u0 < 0 (J'(0) = -u0 > 0)");
}

double SolutionEvaluator::Lambda() const { return s_.kind == SolutionSpec::Kind::Interior ? -1.0 : s_.Lambda; }

double SolutionEvaluator::C1() const {
    using K = SolutionSpec::Kind;
    switch (s_.kind) {
        case K::LeroyNurowskiS:
        case K::FlatSS:
        case K::Case1:
        case K::Case2:
        case K::Case3: return 0;
        default: return s_.C1;
    }
}

std::vector<double> SolutionEvaluator::state(double z) const {
    using K = SolutionSpec::Kind;
    const double L = Lambda();
    auto closed = [&](FlatCase fc, double dPdJ_coef, bool two_thirds) {
        FlatFamilyParams fp{fc, L, s_.C0, C1(), s_.C2};
        const FlatPoint pt = flat_family(fp, z);
        double dP = dPdJ_coef * L * pt.J;
        if (two_thirds) dP += (2.0 / 3.0) * s_.C2 / std::cbrt(pt.J);
        if (!(pt.dJ > 0)) throw std::domain_error("physicality violation: J' <= 0 at z = " + std::to_string(z));
        return std::vector<double>{pt.J, pt.dJ, dP * pt.dJ};
    };
    switch (s_.kind) {
        case K::LeroyNurowski: return closed(FlatCase::LeroyNurowski, -2.0 / 3.0, false);
        case K::LeroyNurowskiS: return closed(FlatCase::LeroyNurowskiS, -2.0 / 3.0, false);
        case K::FlatS: return closed(FlatCase::FlatS, -3.0, false);
        case K::FlatSS: return closed(FlatCase::FlatSS, -3.0, false);
        case K::Case1: return closed(FlatCase::Case1, -3.0, true);
        case K::Case2: return closed(FlatCase::Case2, -3.0, true);
        case K::Case3: return closed(FlatCase::Case3, -3.0, true);
        default: break;
    }
    const std::vector<double> init{0.0, s_.kind == K::Series ? s_.u0 : -s_.u0, 0.0};
    if (z == 0) return init;
    auto& cache = z > 0 ? fwd_ : bwd_;
    if (!cache || std::abs(cache->back()) < std::abs(z)) {
        const double reach = z * 1.25;
        cache = integrate_jeq(L, C1(), 0.0, init, reach, s_.tol);
    }
    const Trajectory& t = *cache;
    if (std::abs(z) > std::abs(t.back()))
        throw std::domain_error("solution not continued to z = " + std::to_string(z) + " (" +
                                to_string(t.termination) + " at " + std::to_string(t.stop_at) + ")");
    return t.eval(z);
}

ZJet SolutionEvaluator::jet(double z, int order) const {
    const auto st = state(z);
    return z_jet_of_J(z, st[0], st[1], st[2], Lambda(), C1(), order);
}

InvariantProfile invariant_profile(const SolutionSpec& spec, double z_lo, double z_hi, int samples, AChoice A) {
    if (samples < 1) throw std::invalid_argument("invariant_profile: samples >= 1");
    SolutionEvaluator ev(spec);
    InvariantProfile prof;
    for (int i = 0; i < samples; ++i) {
        const double z = samples == 1 ? z_lo : z_lo + (z_hi - z_lo) * i / (samples - 1);
        InvariantSet s = cartan_invariants(c_jet(ev.jet(z, 7), 5, A, 1.0));
        s.z = z;
        if (s.hyperquadric) prof.constancy.hyperquadric_z.push_back(z);
        prof.samples.push_back(s);
    }
    const InvariantSet* ref = nullptr;
    for (const auto& s : prof.samples)
        if (!s.hyperquadric) {
            ref = &s;
            break;
        }
    if (ref)
        for (const auto& s : prof.samples) {
            if (s.hyperquadric) continue;
            auto& c = prof.constancy;
            c.max_dev_alpha_sq = std::max(c.max_dev_alpha_sq, std::abs(s.alpha_sq - ref->alpha_sq));
            c.max_dev_beta = std::max(c.max_dev_beta, std::abs(s.beta - ref->beta));
            c.max_dev_gamma = std::max(c.max_dev_gamma, std::abs(s.gamma - ref->gamma));
            c.max_dev_theta = std::max(c.max_dev_theta, std::abs(s.theta - ref->theta));
        }
    return prof;
}

// ---------------------------------------------------------------- Einstein system

PdeResiduals pde_residuals(const ZJet& zj) {
    const CJetPair cj = c_jet(zj, std::min(3, zj.order() - 2), AChoice::Const2);
    if (cj.c.order() < 3) throw std::invalid_argument("pde_residuals: needs J jets of order >= 5");
    const CJet &p = cj.p, &c = cj.c, &cb = cj.cbar;
    const cplx_d p0 = p.value();
    if (std::abs(p0) == 0) throw std::domain_error("pde_residuals: p = 0 (degenerate metric)");
    const cplx_d p1 = p.derivative(1, 0), p2 = p.derivative(0, 1), p12 = p.derivative(1, 1);
    const cplx_d p22 = p.derivative(0, 2), p122 = p.derivative(1, 2);
    const cplx_d c0 = c.value(), c2 = c.derivative(0, 1);
    const cplx_d cb0 = cb.value(), cb1 = cb.derivative(1, 0), cb12 = cb.derivative(1, 1);
    PdeResiduals r;
    r.res_Cc = std::abs(cb1 - c2);
    r.res_Einstein = std::abs(2.0 * p12 + cb0 * p1 + c0 * p2 + 0.5 * c0 * cb0 * p0 + 0.75 * (cb1 + c2) * p0 -
                              (2.0 / 3.0) * zj.Lambda * p0 * p0 * p0);
    r.res_Psi3 = std::abs(p0 * p122 - p1 * p22 + 2.0 * cb0 * p0 * p12 - 2.0 * cb0 * p1 * p2 + 2.0 * cb1 * p0 * p2 +
                          (cb12 + 2.0 * cb0 * cb1) * p0 * p0 - 2.0 * zj.Lambda * (2.0 * p2 + cb0 * p0) * p0 * p0 * p0);
    return r;
}

PdeResiduals pde_residuals(const SolutionSpec& s, double z) { return pde_residuals(SolutionEvaluator(s).jet(z, 7)); }

Psi4Check psi4_consistency(const ZJet& zj) {
    const CJetPair cj = c_jet(zj, 2, AChoice::Const2);
    const CJet &p = cj.p, &cb = cj.cbar;
    const cplx_d p0 = p.value(), p2 = p.derivative(0, 1), p22 = p.derivative(0, 2);
    const cplx_d cb0 = cb.value(), cb2 = cb.derivative(0, 1);
    const cplx_d bracket = 2.0 * p0 * p22 + 6.0 * p2 * p2 + 10.0 * cb0 * p0 * p2 + (cb2 + 3.0 * cb0 * cb0) * p0 * p0;
    // K = -(3 Abar^2 F1^2 / (4 Lambda)) e^{ir/2} / cos^3(r/2) * Psi4, with Psi4 = (4/3) Lambda [..] e^{-ir/2} cos^3(r/2) / p0^2
    const double F1sq = zj.J.derivative_value(1);
    Psi4Check out;
    out.K_direct = -4.0 * F1sq * bracket / (p0 * p0);
    out.K_formula = K_value(zj.J[0], zj.J.derivative_value(1), zj.J.derivative_value(2), zj.Lambda, zj.C1);
    return out;
}

ReferenceInvariants leroy_nurowski_reference() {
    const double s35 = std::sqrt(0.6);
    ReferenceInvariants r;
    r.alpha_sq = 0.5 * s35;
    r.beta = -0.5 * s35;
    r.gamma = 0.5 * s35;
    r.theta = cplx_d(0, s35);
    const double eta = 2 * std::sqrt(2.0) / (std::pow(3.0, 0.25) * std::pow(5.0, 0.75));
    r.eta_sq = eta * eta;
    r.zeta_I = -1.0 / 20;
    return r;
}

ReferenceInvariants flat_reference() {
    ReferenceInvariants r;
    r.alpha_sq = -16 * std::sqrt(0.4);
    r.beta = 41 / (2 * std::sqrt(10.0));
    r.gamma = 29 / (2 * std::sqrt(10.0));
    r.theta = cplx_d(0, 3 * std::sqrt(0.4));
    const double eta = std::pow(2.0, 19.0 / 4) / std::pow(5.0, 0.75);
    r.eta_sq = -eta * eta;
    r.zeta_I = -327.0 / 40;
    return r;
}

}  // namespace typen
