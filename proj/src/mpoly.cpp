// SPDX-License-Identifier: Apache-2.0
#include "typen/mpoly.hpp"

#include <climits>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace typen {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) out.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first) out.push_back(b[j++]);
        else {
            int e = a[i].second + b[j].second;
            if (e != 0) out.emplace_back(a[i].first, e);
            ++i, ++j;
        }
    }
    return out;
}

Monomial mono_pow(const Monomial& a, int e) {
    if (e == 0) return {};
    Monomial out = a;
    for (auto& p : out) p.second *= e;
    return out;
}

MPoly::MPoly(const Rational& c) {
    if (!c.is_zero()) t_[{}] = c;
}

MPoly MPoly::var(const std::string& name, int e) {
    return term(Rational(1), e == 0 ? Monomial{} : Monomial{{name, e}});
}

MPoly MPoly::term(const Rational& c, Monomial m) {
    MPoly p;
    if (!c.is_zero()) p.t_[std::move(m)] = c;
    return p;
}

bool MPoly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

std::optional<Rational> MPoly::constant_value() const {
    if (t_.empty()) return Rational(0);
    if (is_constant()) return t_.begin()->second;
    return std::nullopt;
}

Rational MPoly::coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Rational(0) : it->second;
}

MPoly& MPoly::operator+=(const MPoly& o) {
    for (const auto& [m, c] : o.t_) {
        auto [it, fresh] = t_.emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) t_.erase(it);
        }
    }
    return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) { return *this += -o; }

MPoly MPoly::operator-() const {
    MPoly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

MPoly& MPoly::operator*=(const MPoly& o) {
    MPoly r;
    for (const auto& [ma, ca] : t_)
        for (const auto& [mb, cb] : o.t_) r += term(ca * cb, mono_mul(ma, mb));
    *this = std::move(r);
    return *this;
}

MPoly MPoly::div_monomial(const MPoly& m) const {
    if (!m.is_monomial()) throw std::domain_error("division by a non-monomial polynomial");
    const auto& [mono, c] = *m.t_.begin();
    return *this * term(Rational(1) / c, mono_pow(mono, -1));
}

MPoly MPoly::pow(int e) const {
    if (e < 0) {
        if (!is_monomial()) throw std::domain_error("negative power of a non-monomial polynomial");
        const auto& [mono, c] = *t_.begin();
        return term(typen::pow(c, e), mono_pow(mono, e));
    }
    MPoly r(1), b = *this;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

MPoly MPoly::subs(const std::string& name, const MPoly& value) const {
    MPoly out;
    std::map<int, MPoly> powers;
    for (const auto& [m, c] : t_) {
        int e = 0;
        Monomial rest;
        for (const auto& p : m) {
            if (p.first == name) e = p.second;
            else rest.push_back(p);
        }
        if (e == 0) { out += term(c, rest); continue; }
        auto it = powers.find(e);
        if (it == powers.end()) it = powers.emplace(e, value.pow(e)).first;
        out += term(c, rest) * it->second;
    }
    return out;
}

double MPoly::eval(const std::map<std::string, double>& at) const {
    double s = 0;
    for (const auto& [m, c] : t_) {
        double v = c.to_double();
        for (const auto& [name, e] : m) {
            auto it = at.find(name);
            if (it == at.end()) throw std::invalid_argument("unbound variable " + name);
            v *= std::pow(it->second, e);
        }
        s += v;
    }
    return s;
}

int MPoly::max_degree(const std::string& name) const {
    int d = INT_MIN;
    for (const auto& [m, c] : t_) {
        int e = 0;
        for (const auto& p : m) if (p.first == name) e = p.second;
        d = std::max(d, e);
    }
    return d;
}

int MPoly::min_degree(const std::string& name) const {
    int d = INT_MAX;
    for (const auto& [m, c] : t_) {
        int e = 0;
        for (const auto& p : m) if (p.first == name) e = p.second;
        d = std::min(d, e);
    }
    return d;
}

MPoly MPoly::coeff_of(const std::string& name, int e) const {
    MPoly out;
    for (const auto& [m, c] : t_) {
        int k = 0;
        Monomial rest;
        for (const auto& p : m) {
            if (p.first == name) k = p.second;
            else rest.push_back(p);
        }
        if (k == e) out += term(c, rest);
    }
    return out;
}

std::string MPoly::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // highest total degree first reads more naturally
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        const auto& [m, c0] = *it;
        Rational c = c0;
        if (!first) os << (c.sign() < 0 ? " - " : " + ");
        else if (c.sign() < 0) os << "-";
        c = abs(c);
        bool need_star = false;
        if (m.empty() || c != Rational(1)) {
            os << (c.is_integer() ? c.str() : "(" + c.str() + ")");
            need_star = true;
        }
        for (const auto& [name, e] : m) {
            if (need_star) os << "*";
            os << name;
            if (e != 1) os << "^" << (e < 0 ? "(" + std::to_string(e) + ")" : std::to_string(e));
            need_star = true;
        }
        first = false;
    }
    return os.str();
}

}  // namespace typen
