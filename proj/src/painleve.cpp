// SPDX-License-Identifier: Apache-2.0
#include "typen/painleve.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace typen {

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
    std::string_view s;
    std::size_t i = 0;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool peek(char c) {
        ws();
        return i < s.size() && s[i] == c;
    }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++i;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) { throw OdeParseError(msg, i); }

    mpz_class integer() {
        ws();
        std::size_t b = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (b == i) fail("expected integer");
        return mpz_class(std::string(s.substr(b, i - b)));
    }
    int small_exponent() {
        mpz_class z = integer();
        if (z > 1000) fail("exponent too large");
        return static_cast<int>(z.get_si());
    }

    OdeTerm factor_into(OdeTerm t) {
        ws();
        if (i >= s.size()) fail("unexpected end of input");
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.coeff *= MPoly(Rational(mpq_class(integer())));
            return t;
        }
        if (c == '(') {
            ++i;
            bool neg = eat('-');
            mpz_class n = integer();
            mpz_class d = 1;
            if (eat('/')) d = integer();
            if (d == 0) fail("zero denominator");
            if (!eat(')')) fail("expected ')'");
            mpq_class q(neg ? mpz_class(-n) : n, d);
            q.canonicalize();
            t.coeff *= MPoly(Rational(q));
            return t;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected character '") + c + "'");
        std::size_t b = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
        const std::string name(s.substr(b, i - b));
        if (name == "y") {
            int primes = 0;
            while (i < s.size() && s[i] == '\'') ++primes, ++i;
            if (primes > 3) fail("derivative order > 3 not supported");
            int e = eat('^') ? small_exponent() : 1;
            t.d[static_cast<std::size_t>(primes)] += e;
            return t;
        }
        if (name == "x") {
            t.xpow += eat('^') ? small_exponent() : 1;
            return t;
        }
        if (name == "x0" || name == "u0" || (name.size() > 1 && name[0] == 'a' &&
                                             std::all_of(name.begin() + 1, name.end(), ::isdigit)))
            fail("reserved name '" + name + "'");
        int e = eat('^') ? small_exponent() : 1;
        t.coeff *= MPoly::var(name, e);
        return t;
    }

    OdeTerm term() {
        OdeTerm t;
        t.coeff = MPoly(1);
        t = factor_into(t);
        while (eat('*')) t = factor_into(t);
        return t;
    }

    std::vector<OdeTerm> all() {
        std::vector<OdeTerm> out;
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        for (;;) {
            OdeTerm t = term();
            if (neg) t.coeff = -t.coeff;
            out.push_back(std::move(t));
            ws();
            if (i >= s.size()) break;
            if (eat('+')) neg = false;
            else if (eat('-')) neg = true;
            else fail(std::string("unexpected character '") + s[i] + "'");
        }
        return out;
    }
};

bool term_key_less(const OdeTerm& a, const OdeTerm& b) {
    if (a.weight() != b.weight()) return a.weight() > b.weight();
    if (a.degree() != b.degree()) return a.degree() > b.degree();
    if (a.d != b.d) return a.d > b.d;
    return a.xpow > b.xpow;
}

OdeForm canonical(std::vector<OdeTerm> raw) {
    std::sort(raw.begin(), raw.end(), term_key_less);
    OdeForm f;
    for (auto& t : raw) {
        if (!f.terms.empty() && f.terms.back().d == t.d && f.terms.back().xpow == t.xpow) f.terms.back().coeff += t.coeff;
        else f.terms.push_back(std::move(t));
    }
    f.terms.erase(std::remove_if(f.terms.begin(), f.terms.end(), [](const OdeTerm& t) { return t.coeff.is_zero(); }),
                  f.terms.end());
    return f;
}

std::string term_text(const Rational& c, const Monomial& params, const OdeTerm& t) {
    std::ostringstream os;
    Rational a = abs(c);
    std::vector<std::string> parts;
    if (a != Rational(1)) parts.push_back(a.is_integer() ? a.str() : "(" + a.str() + ")");
    for (const auto& [n, e] : params) parts.push_back(e == 1 ? n : n + "^" + std::to_string(e));
    if (t.xpow) parts.push_back(t.xpow == 1 ? "x" : "x^" + std::to_string(t.xpow));
    static const char* names[] = {"y", "y'", "y''", "y'''"};
    for (int k = 0; k < 4; ++k) {
        int e = t.d[static_cast<std::size_t>(k)];
        if (e) parts.push_back(e == 1 ? names[k] : std::string(names[k]) + "^" + std::to_string(e));
    }
    if (parts.empty()) parts.push_back("1");
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "*" : "") << parts[i];
    return os.str();
}

}  // namespace

OdeForm parse_ode(std::string_view text) {
    Parser p{text};
    auto terms = p.all();
    OdeForm f = canonical(std::move(terms));
    if (f.terms.empty()) throw OdeParseError("equation is identically zero", 0);
    return f;
}

int OdeForm::order() const {
    int o = 0;
    for (const auto& t : terms)
        for (int k = 3; k >= 0; --k)
            if (t.d[static_cast<std::size_t>(k)]) {
                o = std::max(o, k);
                break;
            }
    return o;
}

std::string OdeForm::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms) {
        for (auto it = t.coeff.terms().rbegin(); it != t.coeff.terms().rend(); ++it) {
            const auto& [mono, c] = *it;
            if (first) os << (c.sign() < 0 ? "-" : "");
            else os << (c.sign() < 0 ? " - " : " + ");
            os << term_text(c, mono, t);
            first = false;
        }
    }
    return os.str();
}

double OdeForm::eval(double x, const std::array<double, 4>& y, const std::map<std::string, double>& params) const {
    double s = 0;
    for (const auto& t : terms) {
        double v = t.coeff.eval(params) * std::pow(x, t.xpow);
        for (int k = 0; k < 4; ++k) v *= std::pow(y[static_cast<std::size_t>(k)], t.d[static_cast<std::size_t>(k)]);
        s += v;
    }
    return s;
}

double verify_clearing(const OdeForm& ode, const std::map<std::string, double>& params,
                       const std::function<double(double, const std::array<double, 4>&)>& residual,
                       const std::function<double(double, const std::array<double, 4>&)>& multiplier, int points,
                       unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(0.3, 2.0);
    double worst = 0;
    for (int i = 0; i < points; ++i) {
        const double x = d(rng);
        std::array<double, 4> y{-d(rng), d(rng) - 1.0, d(rng) - 1.0, d(rng) - 1.0};
        const double a = ode.eval(x, y, params);
        const double b = multiplier(x, y) * residual(x, y);
        worst = std::max(worst, std::abs(a - b) / (1 + std::abs(a)));
    }
    return worst;
}

// ---------------------------------------------------------------- surds

double QuadSurd::approx() const {
    if (b.is_zero() || d < 0) return a.to_double();
    return a.to_double() + b.to_double() * std::sqrt(static_cast<double>(d));
}

std::string QuadSurd::str() const {
    if (b.is_zero()) return a.str();
    mpz_class den;
    mpz_lcm(den.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
    mpz_class p = a.num() * (den / a.den()), q = b.num() * (den / b.den());
    std::ostringstream os;
    mpz_class aq = abs(q);
    std::string root = "sqrt(" + std::to_string(d) + ")";
    std::string body;
    if (p != 0) body = p.get_str() + (q < 0 ? "-" : "+");
    else if (q < 0) body = "-";
    body += (aq == 1 ? "" : aq.get_str() + "*") + root;
    if (den == 1) return body;
    return "(" + body + ")/" + den.get_str();
}

namespace {

// n = s^2 * d with d squarefree (sign kept in d).
void squarefree_split(const mpz_class& n, mpz_class& s, long& d) {
    mpz_class m = abs(n);
    s = 1;
    mpz_class core = 1;
    for (mpz_class p = 2; p * p <= m; ++p) {
        while (m % (p * p) == 0) m /= p * p, s *= p;
        if (m % p == 0) m /= p, core *= p;
    }
    core *= m;
    d = core.get_si() * (n < 0 ? -1 : 1);
}

Rational ffall(const Rational& mu, int k) {
    Rational r(1);
    for (int i = 0; i < k; ++i) r *= mu - Rational(i);
    return r;
}

UPoly ffall_shift(const Rational& m, int k) {  // ff_k(m + j) as a polynomial in j
    UPoly r = UPoly::constant(1);
    for (int i = 0; i < k; ++i) r = r * UPoly({m - Rational(i), Rational(1)});
    return r;
}

Rational term_order(const OdeTerm& t, const Rational& m) { return Rational(t.degree()) * m - Rational(t.weight()); }

Rational m_factor(const OdeTerm& t, const Rational& m) {
    Rational r(1);
    for (int k = 0; k < 4; ++k) r *= pow(ffall(m, k), t.d[static_cast<std::size_t>(k)]);
    return r;
}

MPoly x0_pow(int f) { return f ? MPoly::var("x0", f) : MPoly(1); }

bool positive_integer(const Rational& m) { return m.is_integer() && m.sign() > 0; }

// Rational roots in m shared by every parameter-monomial slice of a class polynomial.
std::vector<Rational> class_roots(const OdeForm& ode, const std::vector<std::size_t>& idx) {
    std::map<Monomial, UPoly> slices;
    for (auto i : idx) {
        const auto& t = ode.terms[i];
        UPoly mp = UPoly::constant(1);
        for (int k = 0; k < 4; ++k)
            for (int e = 0; e < t.d[static_cast<std::size_t>(k)]; ++e) mp = mp * ffall_shift(Rational(0), k);
        const MPoly full = t.coeff * x0_pow(t.xpow);
        for (const auto& [mono, c] : full.terms()) slices[mono] += mp * c;
    }
    UPoly g;
    bool any = false;
    for (const auto& [mono, p] : slices) {
        if (p.is_zero()) continue;
        g = any ? gcd(g, p) : p.monic();
        any = true;
    }
    if (!any || g.degree() < 1) return {};
    return rational_roots(g);
}

struct U0Solve {
    bool free = false;
    std::vector<MPoly> values;   // solved monomial roots
    std::string unresolved;      // non-empty when the roots are not exact monomials
};

U0Solve solve_u0(const std::map<int, MPoly>& poly) {
    U0Solve out;
    std::map<int, MPoly> p;
    for (const auto& [k, c] : poly)
        if (!c.is_zero()) p[k] = c;
    if (p.empty()) {
        out.free = true;
        return out;
    }
    if (p.size() == 1) return out;  // a single power of u0 cannot vanish
    std::ostringstream desc;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        desc << (it == p.rbegin() ? "" : " + ") << "(" << it->second.str() << ")*u0^" << it->first;
    desc << " = 0";
    const int k1 = p.begin()->first;
    bool monomial = std::all_of(p.begin(), p.end(), [](const auto& kv) { return kv.second.is_monomial(); });
    if (!monomial) {
        out.unresolved = desc.str();
        return out;
    }
    // u0 = v * mu with mu a Laurent monomial making all coefficients proportional
    auto it2 = std::next(p.begin());
    const int k2 = it2->first;
    const Monomial ratio = mono_mul(p.begin()->second.terms().begin()->first,
                                    mono_pow(it2->second.terms().begin()->first, -1));  // mu^{k2-k1}
    Monomial mu;
    for (const auto& [n, e] : ratio) {
        if (e % (k2 - k1)) {
            out.unresolved = desc.str();
            return out;
        }
        mu.emplace_back(n, e / (k2 - k1));
    }
    std::vector<Rational> coeffs(static_cast<std::size_t>(p.rbegin()->first - k1 + 1));
    const Monomial base = p.begin()->second.terms().begin()->first;
    for (const auto& [k, c] : p) {
        const auto& [mono, r] = *c.terms().begin();
        if (mono_mul(mono, mono_pow(mu, k - k1)) != base) {
            out.unresolved = desc.str();
            return out;
        }
        coeffs[static_cast<std::size_t>(k - k1)] = r;
    }
    const UPoly vp(coeffs);
    UPoly rest = vp;
    for (const auto& v : rational_roots(vp)) {
        if (v.is_zero()) continue;
        out.values.push_back(MPoly::term(v, mu));
        rest = divmod(rest, UPoly({-v, Rational(1)})).first;
    }
    if (rest.degree() >= 1) out.unresolved = desc.str() + " (irrational roots " + rest.str("v") + ")";
    return out;
}

}  // namespace

BalanceReport dominant_balances(const OdeForm& ode) {
    BalanceReport rep;
    const auto& T = ode.terms;
    std::set<Rational> cands;
    for (std::size_t i = 0; i < T.size(); ++i)
        for (std::size_t j = i + 1; j < T.size(); ++j)
            if (T[i].degree() != T[j].degree())
                cands.insert(Rational(T[i].weight() - T[j].weight()) / Rational(T[i].degree() - T[j].degree()));
    std::map<std::pair<int, int>, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < T.size(); ++i)
        if (T[i].degree() > 0) classes[{T[i].degree(), T[i].weight()}].push_back(i);
    for (const auto& [key, idx] : classes)
        for (const auto& r : class_roots(ode, idx)) cands.insert(r);

    for (const auto& m : cands) {
        if (m.is_zero() || positive_integer(m)) continue;
        // lowest order among terms whose leading factor survives at this m
        std::optional<Rational> lo;
        for (const auto& t : T)
            if (!m_factor(t, m).is_zero()) {
                Rational o = term_order(t, m);
                if (!lo || o < *lo) lo = o;
            }
        if (!lo) continue;
        std::vector<std::size_t> dom;
        std::map<int, MPoly> poly;
        for (std::size_t i = 0; i < T.size(); ++i) {
            Rational mf = m_factor(T[i], m);
            if (mf.is_zero() || term_order(T[i], m) != *lo) continue;
            dom.push_back(i);
            poly[T[i].degree()] += T[i].coeff * x0_pow(T[i].xpow) * MPoly(mf);
        }
        if (dom.size() < 2) continue;
        U0Solve s = solve_u0(poly);
        if (s.free) {
            rep.balances.push_back({m, true, std::nullopt, "u0 arbitrary", dom, *lo});
            continue;
        }
        for (const auto& v : s.values) rep.balances.push_back({m, false, v, "u0 = " + v.str(), dom, *lo});
        if (!s.unresolved.empty()) {
            rep.balances.push_back({m, false, std::nullopt, s.unresolved, dom, *lo});
            rep.unresolved.push_back("m = " + m.str() + ": " + s.unresolved);
        }
    }
    // y-free terms dominate once m exceeds every crossing involving them
    std::vector<std::size_t> yfree;
    for (std::size_t i = 0; i < T.size(); ++i)
        if (T[i].degree() == 0) yfree.push_back(i);
    if (!yfree.empty()) {
        MPoly lead;
        std::string names;
        std::optional<Rational> edge;
        for (auto i : yfree) {
            lead += T[i].coeff * x0_pow(T[i].xpow);
            OdeForm one;
            one.terms.push_back(T[i]);
            names += (names.empty() ? "" : ", ") + one.str();
            for (std::size_t j = 0; j < T.size(); ++j)
                if (T[j].degree() > 0) {
                    Rational c = Rational(T[j].weight()) / Rational(T[j].degree());
                    if (!edge || c > *edge) edge = c;
                }
        }
        if (!lead.is_zero())
            rep.excluded.push_back({"m > " + (edge ? edge->str() : std::string("0")),
                                    names + " (lowest order, does not vanish for generic parameters)"});
    }
    return rep;
}

// ---------------------------------------------------------------- indices

ResonanceSet fuchs_indices(const OdeForm& ode, const Balance& b) {
    ResonanceSet rs;
    rs.balance = b;
    if (!b.u0_free && !b.u0) {
        if (ode.order() == 1) {
            rs.from_order_only = true;
            rs.indicial = UPoly({Rational(1), Rational(1)});
            rs.indices.push_back({Rational(-1), Rational(0), 0});
            return rs;
        }
        throw std::domain_error("leading coefficient unresolved: " + b.constraint);
    }
    const MPoly u0 = b.u0_free ? MPoly::var("u0") : *b.u0;
    std::vector<MPoly> Q;  // coefficients in j
    auto add = [&Q](const UPoly& p, const MPoly& c) {
        if (Q.size() < p.coeffs().size()) Q.resize(p.coeffs().size());
        for (std::size_t i = 0; i < p.coeffs().size(); ++i) Q[i] += c * MPoly(p.coeffs()[i]);
    };
    for (auto i : b.dominant) {
        const auto& t = ode.terms[i];
        const MPoly base = t.coeff * x0_pow(t.xpow) * u0.pow(t.degree() - 1);
        for (int k = 0; k < 4; ++k) {
            const int n = t.d[static_cast<std::size_t>(k)];
            if (!n) continue;
            Rational rest = pow(ffall(b.m, k), n - 1) * Rational(n);
            for (int l = 0; l < 4; ++l)
                if (l != k) rest *= pow(ffall(b.m, l), t.d[static_cast<std::size_t>(l)]);
            add(ffall_shift(b.m, k) * rest, base);
        }
    }
    while (!Q.empty() && Q.back().is_zero()) Q.pop_back();
    if (Q.empty()) throw std::domain_error("degenerate balance: indicial polynomial vanishes identically");
    if (!Q.back().is_monomial()) throw std::domain_error("indicial polynomial has parameter-dependent leading term");
    std::vector<Rational> qc;
    for (const auto& c : Q) {
        auto v = c.is_zero() ? std::optional<Rational>(Rational(0)) : c.div_monomial(Q.back()).constant_value();
        if (!v) throw std::domain_error("indicial polynomial depends on free parameters");
        qc.push_back(*v);
    }
    rs.indicial = UPoly(qc);
    UPoly rest = rs.indicial;
    for (const auto& r : rational_roots(rs.indicial)) {
        while (true) {
            auto [q, rem] = divmod(rest, UPoly({-r, Rational(1)}));
            if (!rem.is_zero()) break;
            rs.indices.push_back({r, Rational(0), 0});
            rest = q;
        }
    }
    if (rest.degree() == 2) {
        const Rational A = rest.coeff(2), B = rest.coeff(1), C = rest.coeff(0);
        const Rational disc = B * B - Rational(4) * A * C;
        mpz_class s;
        long d;
        squarefree_split(disc.num() * disc.den(), s, d);
        const Rational a = -B / (Rational(2) * A);
        const Rational bb = Rational(mpq_class(s)) / (Rational(2) * A * Rational(mpq_class(disc.den())));
        rs.indices.push_back({a, -abs(bb), d});
        rs.indices.push_back({a, abs(bb), d});
    } else if (rest.degree() > 2) {
        throw std::domain_error("indicial polynomial has an irreducible factor of degree > 2");
    }
    std::stable_sort(rs.indices.begin(), rs.indices.end(),
                     [](const QuadSurd& x, const QuadSurd& y) { return x.approx() < y.approx(); });
    return rs;
}

// ---------------------------------------------------------------- series substitution

namespace {

using PSeries = std::map<Rational, MPoly>;

PSeries ps_mul(const PSeries& a, const PSeries& b, const Rational& cut) {
    PSeries r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            Rational e = ea + eb;
            if (e > cut) continue;
            r[e] += ca * cb;
        }
    for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return r;
}

// Residual series of the ODE for y = sum_i a_i chi^{m + i/q}, x = x0 + chi.
PSeries residual_series(const OdeForm& ode, const Rational& m, int q, const std::vector<MPoly>& a, const Rational& cut) {
    std::array<PSeries, 4> ders;
    for (int k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < a.size(); ++i) {
            Rational e = m + Rational(static_cast<long>(i), q);
            Rational f = ffall(e, k);
            if (!f.is_zero() && !a[i].is_zero()) ders[static_cast<std::size_t>(k)][e - Rational(k)] += a[i] * MPoly(f);
        }
    PSeries total;
    for (const auto& t : ode.terms) {
        // minimal exponents of the remaining factors bound how far each factor must reach
        PSeries acc;
        acc[Rational(0)] = t.coeff;
        for (int i = 1; i <= t.xpow; ++i) {
            PSeries xs;
            xs[Rational(0)] = MPoly::var("x0");
            xs[Rational(1)] = MPoly(1);
            acc = ps_mul(acc, xs, cut - Rational(t.degree()) * m + Rational(t.weight()) + Rational(100));
        }
        bool empty = false;
        for (int k = 0; k < 4 && !empty; ++k)
            for (int e = 0; e < t.d[static_cast<std::size_t>(k)]; ++e) {
                if (ders[static_cast<std::size_t>(k)].empty()) { empty = true; break; }
                acc = ps_mul(acc, ders[static_cast<std::size_t>(k)], cut + Rational(1000));
            }
        if (empty) continue;
        for (const auto& [e, c] : acc)
            if (e <= cut) total[e] += c;
    }
    for (auto it = total.begin(); it != total.end();) it = it->second.is_zero() ? total.erase(it) : std::next(it);
    return total;
}

int lcm_den(int q, const Rational& r) {
    long d = r.den().get_si();
    return static_cast<int>(std::lcm(static_cast<long>(q), d));
}

}  // namespace

PainleveVerdict weak_painleve_verdict(const OdeForm& ode) {
    PainleveVerdict v;
    v.balance_report = dominant_balances(ode);
    const bool first_order = ode.order() == 1;
    bool failed = false;
    for (const auto& b : v.balance_report.balances) {
        BalanceVerdict bv;
        try {
            bv.resonances = fuchs_indices(ode, b);
        } catch (const std::domain_error& e) {
            bv.note = e.what();
            v.balances.push_back(std::move(bv));
            continue;
        }
        for (const auto& r : bv.resonances.indices) {
            if (!r.is_rational()) {
                bv.rational = false;
            }
        }
        if (!bv.rational) {
            bool cplx = std::any_of(bv.resonances.indices.begin(), bv.resonances.indices.end(),
                                    [](const QuadSurd& r) { return r.is_complex(); });
            std::string why = cplx ? "complex resonances" : "irrational resonances";
            if (!first_order) {
                failed = true;
                if (std::find(v.reasons.begin(), v.reasons.end(), why) == v.reasons.end()) v.reasons.push_back(why);
            }
            bv.note = why + " at m = " + b.m.str();
            v.balances.push_back(std::move(bv));
            continue;
        }
        if (bv.resonances.from_order_only) {
            bv.note = "leading coefficient not solved exactly; first-order index set";
            v.balances.push_back(std::move(bv));
            continue;
        }
        // substitution: resonance compatibility and a witness expansion
        int q = lcm_den(1, b.m);
        Rational jmax(0);
        for (const auto& r : bv.resonances.indices) {
            q = lcm_den(q, r.a);
            if (r.a > jmax) jmax = r.a;
        }
        Rational depth_r = (jmax + Rational(3)) * Rational(q);
        int depth = static_cast<int>(std::ceil(depth_r.to_double() - 1e-12));
        depth = std::max(depth, 5);
        std::set<Rational> resonances;
        for (const auto& r : bv.resonances.indices)
            if (r.a.sign() >= 0) resonances.insert(r.a);
        std::vector<MPoly> a(1, b.u0_free ? MPoly::var("u0") : *b.u0);
        if (resonances.count(Rational(0)))
            bv.compatibility.push_back({Rational(0), b.u0_free, b.u0_free ? "leading coefficient arbitrary" : "u0 fixed"});
        bool stop = false;
        for (int k = 1; k <= depth && !stop; ++k) {
            const Rational cut = b.order + Rational(k, q);
            a.push_back(MPoly::var("a" + std::to_string(k)));
            PSeries rs = residual_series(ode, b.m, q, a, cut);
            MPoly row = rs.count(cut) ? rs[cut] : MPoly();
            const std::string sym = "a" + std::to_string(k);
            MPoly lin = row.coeff_of(sym, 1), con = row.coeff_of(sym, 0);
            if (row.max_degree(sym) > 1) {
                bv.note = "nonlinear dependence on a" + std::to_string(k);
                stop = true;
                break;
            }
            const Rational j(k, q);
            if (lin.is_zero()) {
                const bool ok = con.is_zero();
                bv.compatibility.push_back({j, ok, ok ? "compatible, free coefficient a" + std::to_string(k)
                                                      : "incompatible: " + con.str() + " != 0"});
                if (!ok) {
                    failed = true;
                    v.reasons.push_back("incompatible resonance at j = " + j.str() + " (m = " + b.m.str() + ")");
                    stop = true;
                }
                // keep the free symbol
            } else if (lin.is_monomial()) {
                a.back() = (-con).div_monomial(lin);
            } else {
                bv.note = "linear coefficient at j = " + j.str() + " is not a monomial; expansion stopped";
                a.pop_back();
                stop = true;
            }
        }
        // witness: first six coefficients and the verified vanishing order
        const int kk = static_cast<int>(a.size()) - 1;
        PSeries full = residual_series(ode, b.m, q, a, b.order + Rational(kk, q));
        int vanish = 0;
        for (int k = 0; k <= kk; ++k) {
            Rational e = b.order + Rational(k, q);
            if (full.count(e)) break;
            ++vanish;
        }
        bv.witness_residual_order = vanish;
        for (int k = 0; k <= std::min(kk, 5); ++k)
            bv.witness.emplace_back(b.m + Rational(k, q), a[static_cast<std::size_t>(k)]);
        v.balances.push_back(std::move(bv));
    }
    if (first_order) {
        v.pass = true;
        v.reasons.insert(v.reasons.begin(), "first-order equation: weak Painleve property holds automatically");
        return v;
    }
    v.pass = !failed;
    if (v.pass) v.reasons.push_back("all resonances rational and compatible");
    return v;
}

}  // namespace typen
