#include "pbnsynth/rational_function.hpp"

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

RationalFunction::RationalFunction(Polynomial numerator)
    : num_(std::move(numerator)), den_(Polynomial::constant(num_.parameter_set(), 1)) {}

RationalFunction::RationalFunction(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    normalize();
}

RationalFunction RationalFunction::constant(ParamSetPtr params, Rational value) {
    return RationalFunction(Polynomial::constant(std::move(params), std::move(value)));
}

bool RationalFunction::is_polynomial() const {
    return den_.is_constant() && den_.constant_value() == 1;
}

Rational RationalFunction::evaluate(Instantiation const& u) const {
    return evaluate(std::span<const Rational>(u.values()));
}

Rational RationalFunction::evaluate(std::span<const Rational> values) const {
    Rational d = den_.evaluate(values);
    if (d == 0) {
        throw EvalError("rational function evaluated at a denominator zero");
    }
    return num_.evaluate(values) / d;
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction out = *this;
    out.num_ = -out.num_;
    return out;
}

RationalFunction operator+(RationalFunction const& a, RationalFunction const& b) {
    if (a.den_ == b.den_) {
        return RationalFunction(a.num_ + b.num_, a.den_);
    }
    if (b.is_polynomial()) {
        return RationalFunction(a.num_ + b.num_ * a.den_, a.den_);
    }
    if (a.is_polynomial()) {
        return RationalFunction(b.num_ + a.num_ * b.den_, b.den_);
    }
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(RationalFunction const& a, RationalFunction const& b) {
    return a + (-b);
}

RationalFunction operator*(RationalFunction const& a, RationalFunction const& b) {
    if (a.is_polynomial() && b.is_polynomial()) {
        return RationalFunction(a.num_ * b.num_);
    }
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(RationalFunction const& a, RationalFunction const& b) {
    if (b.num_.is_zero()) {
        throw EvalError("division by the zero rational function");
    }
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

bool RationalFunction::same_function(RationalFunction const& other) const {
    return num_ * other.den_ == other.num_ * den_;
}

std::string RationalFunction::render(PowerStyle style) const {
    if (is_polynomial()) {
        return num_.render(style);
    }
    return "( " + num_.render(style) + " ) / ( " + den_.render(style) + " )";
}

void RationalFunction::normalize() {
    if (den_.is_zero()) {
        throw Error("rational function with zero denominator");
    }
    if (num_.is_zero()) {
        den_ = Polynomial::constant(num_.parameter_set(), 1);
        return;
    }
    Rational lead = den_.leading_coefficient();
    if (lead != 1) {
        Rational inv = 1 / lead;
        num_ *= inv;
        den_ *= inv;
    }
}

RationalFunction one_minus(RationalFunction const& f) {
    auto one = RationalFunction::constant(f.parameter_set(), 1);
    return one - f;
}

}  // namespace pbnsynth
