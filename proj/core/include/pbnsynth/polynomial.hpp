#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pbnsynth/parameters.hpp"
#include "pbnsynth/rational.hpp"

namespace pbnsynth {

/// Exponent vector, one entry per parameter of the owning set.
using Monomial = std::vector<std::uint32_t>;

/// Graded lexicographic term order: total degree first, then lexicographic
/// on the exponents.
struct GrlexLess {
    bool operator()(Monomial const& a, Monomial const& b) const;
};

enum class PowerStyle {
    caret,     // x^3 (CLI output, explicit chain export)
    repeated,  // x*x*x (model files, whose grammar has no power operator)
};

/// Sparse multivariate polynomial over a fixed parameter set with exact
/// rational coefficients. The term map is the canonical form: zero
/// coefficients are never stored and equality is term-map equality.
/// Immutable value semantics; safe to share across threads.
class Polynomial {
public:
    explicit Polynomial(ParamSetPtr params);  // zero polynomial
    static Polynomial constant(ParamSetPtr params, Rational value);
    static Polynomial variable(ParamSetPtr params, std::size_t index);

    ParamSetPtr const& parameter_set() const { return params_; }
    std::map<Monomial, Rational, GrlexLess> const& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // requires is_constant()
    std::size_t total_degree() const;

    /// True iff every exponent is at most one; the gate for vertex-based
    /// region reasoning.
    bool is_multi_affine() const;

    /// Parameters that actually occur, in index order.
    std::vector<std::size_t> support() const;

    Rational evaluate(std::span<const Rational> values) const;
    Rational evaluate(Instantiation const& u) const;

    Polynomial derivative(std::size_t index) const;

    Polynomial operator-() const;
    Polynomial& operator+=(Polynomial const& other);
    Polynomial& operator-=(Polynomial const& other);
    Polynomial& operator*=(Polynomial const& other);
    Polynomial& operator*=(Rational const& scalar);

    friend Polynomial operator+(Polynomial a, Polynomial const& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, Polynomial const& b) { return a -= b; }
    friend Polynomial operator*(Polynomial const& a, Polynomial const& b);
    friend Polynomial operator*(Polynomial a, Rational const& s) { return a *= s; }
    friend Polynomial operator*(Rational const& s, Polynomial a) { return a *= s; }

    bool operator==(Polynomial const& other) const;
    bool operator!=(Polynomial const& other) const { return !(*this == other); }

    /// Terms joined by " + " in descending order, coefficients as exact
    /// fractions, factors joined by "*".
    std::string render(PowerStyle style = PowerStyle::caret) const;

    /// Leading (grlex-largest) coefficient; requires a nonzero polynomial.
    Rational const& leading_coefficient() const;

private:
    void add_term(Monomial const& m, Rational const& c);
    void check_compatible(Polynomial const& other) const;

    ParamSetPtr params_;
    std::map<Monomial, Rational, GrlexLess> terms_;
};

}  // namespace pbnsynth
