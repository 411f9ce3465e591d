#pragma once

#include <string>

#include "pbnsynth/polynomial.hpp"

namespace pbnsynth {

/// Quotient of two polynomials. No gcd cancellation is performed, only the
/// constant content is normalized so that the denominator's leading
/// coefficient (in grlex order) is one; equality testing therefore goes
/// through cross-multiplication.
class RationalFunction {
public:
    explicit RationalFunction(Polynomial numerator);  // denominator 1
    RationalFunction(Polynomial numerator, Polynomial denominator);

    static RationalFunction constant(ParamSetPtr params, Rational value);

    Polynomial const& numerator() const { return num_; }
    Polynomial const& denominator() const { return den_; }
    ParamSetPtr const& parameter_set() const { return num_.parameter_set(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const;  // denominator is the constant 1

    Rational evaluate(Instantiation const& u) const;
    Rational evaluate(std::span<const Rational> values) const;

    RationalFunction operator-() const;
    friend RationalFunction operator+(RationalFunction const& a, RationalFunction const& b);
    friend RationalFunction operator-(RationalFunction const& a, RationalFunction const& b);
    friend RationalFunction operator*(RationalFunction const& a, RationalFunction const& b);
    friend RationalFunction operator/(RationalFunction const& a, RationalFunction const& b);

    RationalFunction& operator+=(RationalFunction const& other) { return *this = *this + other; }
    RationalFunction& operator*=(RationalFunction const& other) { return *this = *this * other; }

    /// Equality as functions: cross-multiplied polynomial identity.
    bool same_function(RationalFunction const& other) const;

    /// "num" or "( num ) / ( den )".
    std::string render(PowerStyle style = PowerStyle::caret) const;

private:
    void normalize();

    Polynomial num_;
    Polynomial den_;
};

/// 1 - f, a frequent step when complementing reachability values.
RationalFunction one_minus(RationalFunction const& f);

}  // namespace pbnsynth
