#include "pbnsynth/rational.hpp"

#include <cctype>
#include <cstddef>

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

Rational rational_from_string(std::string_view text) {
    if (text.empty()) {
        throw Error("empty numeric literal");
    }
    std::string s(text);
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        // Integer or a/b fraction; mpq validates the syntax.
        Rational r;
        if (r.set_str(s, 10) != 0) {
            throw Error("invalid numeric literal '" + s + "'");
        }
        r.canonicalize();
        return r;
    }
    bool negative = false;
    std::size_t start = 0;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        start = 1;
    }
    std::string digits;
    std::size_t frac_len = 0;
    for (std::size_t i = start; i < s.size(); ++i) {
        if (i == dot) {
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            throw Error("invalid numeric literal '" + s + "'");
        }
        digits.push_back(s[i]);
        if (i > dot) {
            ++frac_len;
        }
    }
    if (digits.empty()) {
        throw Error("invalid numeric literal '" + s + "'");
    }
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) {
        den *= 10;
    }
    Rational r(num, den);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

std::string rational_str(Rational const& r) {
    return r.get_str();
}

double to_double(Rational const& r) {
    return r.get_d();
}

Rational rational_abs(Rational const& r) {
    return r < 0 ? Rational(-r) : r;
}

}  // namespace pbnsynth
