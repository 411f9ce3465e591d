#include "pbnsynth/polynomial.hpp"

#include <algorithm>
#include <numeric>

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

bool GrlexLess::operator()(Monomial const& a, Monomial const& b) const {
    auto deg_a = std::accumulate(a.begin(), a.end(), std::uint64_t{0});
    auto deg_b = std::accumulate(b.begin(), b.end(), std::uint64_t{0});
    if (deg_a != deg_b) {
        return deg_a < deg_b;
    }
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Polynomial::Polynomial(ParamSetPtr params) : params_(std::move(params)) {
    if (!params_) {
        throw Error("polynomial without parameter set");
    }
}

Polynomial Polynomial::constant(ParamSetPtr params, Rational value) {
    Polynomial p(std::move(params));
    if (value != 0) {
        p.terms_.emplace(Monomial(p.params_->size(), 0), std::move(value));
    }
    return p;
}

Polynomial Polynomial::variable(ParamSetPtr params, std::size_t index) {
    Polynomial p(std::move(params));
    if (index >= p.params_->size()) {
        throw Error("parameter index out of range");
    }
    Monomial m(p.params_->size(), 0);
    m[index] = 1;
    p.terms_.emplace(std::move(m), Rational(1));
    return p;
}

bool Polynomial::is_constant() const {
    if (terms_.empty()) {
        return true;
    }
    return terms_.size() == 1 && terms_.begin()->first == Monomial(params_->size(), 0);
}

Rational Polynomial::constant_value() const {
    if (terms_.empty()) {
        return Rational(0);
    }
    if (!is_constant()) {
        throw Error("polynomial is not constant");
    }
    return terms_.begin()->second;
}

std::size_t Polynomial::total_degree() const {
    std::size_t deg = 0;
    for (auto const& [m, c] : terms_) {
        deg = std::max<std::size_t>(deg, std::accumulate(m.begin(), m.end(), std::size_t{0}));
    }
    return deg;
}

bool Polynomial::is_multi_affine() const {
    for (auto const& [m, c] : terms_) {
        for (auto e : m) {
            if (e > 1) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::size_t> Polynomial::support() const {
    std::vector<bool> used(params_->size(), false);
    for (auto const& [m, c] : terms_) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] > 0) {
                used[i] = true;
            }
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (used[i]) {
            out.push_back(i);
        }
    }
    return out;
}

Rational Polynomial::evaluate(std::span<const Rational> values) const {
    if (values.size() != params_->size()) {
        throw Error("evaluation point has wrong dimension");
    }
    Rational sum = 0;
    for (auto const& [m, c] : terms_) {
        Rational term = c;
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (std::uint32_t e = 0; e < m[i]; ++e) {
                term *= values[i];
            }
        }
        sum += term;
    }
    return sum;
}

Rational Polynomial::evaluate(Instantiation const& u) const {
    return evaluate(std::span<const Rational>(u.values()));
}

Polynomial Polynomial::derivative(std::size_t index) const {
    if (index >= params_->size()) {
        throw Error("parameter index out of range");
    }
    Polynomial out(params_);
    for (auto const& [m, c] : terms_) {
        if (m[index] == 0) {
            continue;
        }
        Monomial d = m;
        d[index] -= 1;
        out.add_term(d, c * Rational(static_cast<long>(m[index])));
    }
    return out;
}

Polynomial Polynomial::operator-() const {
    Polynomial out(params_);
    for (auto const& [m, c] : terms_) {
        out.terms_.emplace(m, -c);
    }
    return out;
}

Polynomial& Polynomial::operator+=(Polynomial const& other) {
    check_compatible(other);
    for (auto const& [m, c] : other.terms_) {
        add_term(m, c);
    }
    return *this;
}

Polynomial& Polynomial::operator-=(Polynomial const& other) {
    check_compatible(other);
    for (auto const& [m, c] : other.terms_) {
        add_term(m, -c);
    }
    return *this;
}

Polynomial& Polynomial::operator*=(Polynomial const& other) {
    *this = *this * other;
    return *this;
}

Polynomial& Polynomial::operator*=(Rational const& scalar) {
    if (scalar == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) {
        c *= scalar;
    }
    return *this;
}

Polynomial operator*(Polynomial const& a, Polynomial const& b) {
    a.check_compatible(b);
    Polynomial out(a.params_);
    Monomial m(a.params_->size(), 0);
    for (auto const& [ma, ca] : a.terms_) {
        for (auto const& [mb, cb] : b.terms_) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                m[i] = ma[i] + mb[i];
            }
            out.add_term(m, ca * cb);
        }
    }
    return out;
}

bool Polynomial::operator==(Polynomial const& other) const {
    return terms_ == other.terms_;
}

std::string Polynomial::render(PowerStyle style) const {
    if (terms_.empty()) {
        return "0";
    }
    std::string out;
    // Descending grlex: leading term first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        auto const& [m, c] = *it;
        if (!out.empty()) {
            out += " + ";
        }
        std::vector<std::string> factors;
        bool coeff_shown = false;
        bool monomial_empty = std::all_of(m.begin(), m.end(), [](std::uint32_t e) { return e == 0; });
        if (monomial_empty || (c != 1 && c != -1)) {
            factors.push_back(rational_str(c));
            coeff_shown = true;
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) {
                continue;
            }
            auto const& name = params_->at(i).name;
            if (style == PowerStyle::caret) {
                factors.push_back(m[i] == 1 ? name : name + "^" + std::to_string(m[i]));
            } else {
                for (std::uint32_t e = 0; e < m[i]; ++e) {
                    factors.push_back(name);
                }
            }
        }
        std::string term;
        if (!coeff_shown && c == -1) {
            term = "-";
        }
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i > 0) {
                term += "*";
            }
            term += factors[i];
        }
        out += term;
    }
    return out;
}

Rational const& Polynomial::leading_coefficient() const {
    if (terms_.empty()) {
        throw Error("zero polynomial has no leading coefficient");
    }
    return terms_.rbegin()->second;
}

void Polynomial::add_term(Monomial const& m, Rational const& c) {
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

void Polynomial::check_compatible(Polynomial const& other) const {
    if (params_ == other.params_) {
        return;
    }
    if (!params_->same_as(*other.params_)) {
        throw Error("polynomial arithmetic over mismatched parameter lists");
    }
}

}  // namespace pbnsynth
