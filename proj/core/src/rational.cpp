// SPDX-License-Identifier: Apache-2.0
#include "irva/rational.hpp"

#include <stdexcept>

namespace irva {

Rational::Rational(long num, long den) {
    if (den == 0)
        throw std::invalid_argument("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero())
        throw std::invalid_argument("rational division by zero");
    v_ /= o.v_;
    return *this;
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty())
        return std::nullopt;
    // Restrict to the documented shape before handing off to GMP: an
    // optional leading '-', digits, optionally "/digits".
    auto digits = [](std::string_view s) {
        if (s.empty())
            return false;
        for (char c : s)
            if (c < '0' || c > '9')
                return false;
        return true;
    };
    std::string_view body = text;
    if (body.front() == '-')
        body.remove_prefix(1);
    auto slash = body.find('/');
    if (slash == std::string_view::npos) {
        if (!digits(body))
            return std::nullopt;
    } else {
        std::string_view den = body.substr(slash + 1);
        if (!digits(body.substr(0, slash)) || !digits(den) || den.find_first_not_of('0') == std::string_view::npos)
            return std::nullopt;
    }
    mpq_class q;
    if (q.set_str(std::string(text), 10) != 0)
        return std::nullopt;
    q.canonicalize();
    return Rational(std::move(q));
}

std::string Rational::str() const {
    if (is_integer())
        return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

} // namespace irva
