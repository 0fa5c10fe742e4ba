// SPDX-License-Identifier: Apache-2.0
#include "typen/rational.hpp"

#include <stdexcept>

namespace typen {

Rational::Rational(long n, long d) {
    if (d == 0) throw std::domain_error("zero denominator");
    q_ = mpq_class(n, d);
    q_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
    std::string s(text);
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    auto slash = s.find('/');
    auto valid_int = [](const std::string& t) {
        std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
        if (i >= t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    std::string n = s.substr(0, slash);
    std::string d = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(n) || !valid_int(d) || d[0] == '-')
        throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
    mpz_class zn(n), zd(d);
    if (zd == 0) throw std::domain_error("zero denominator");
    mpq_class q(zn, zd);
    q.canonicalize();
    return Rational(q);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero rational");
    q_ /= o.q_;
    return *this;
}

std::string Rational::str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::size_t Rational::bit_size() const {
    return mpz_sizeinbase(q_.get_num_mpz_t(), 2) + mpz_sizeinbase(q_.get_den_mpz_t(), 2);
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational pow(const Rational& r, long e) {
    if (e < 0) return pow(Rational(1) / r, -e);
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), r.raw().get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(d.get_mpz_t(), r.raw().get_den_mpz_t(), static_cast<unsigned long>(e));
    return Rational(mpq_class(n, d));
}

}  // namespace typen
