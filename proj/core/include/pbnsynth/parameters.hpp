#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbnsynth/rational.hpp"

namespace pbnsynth {

/// A declared model parameter with its box bounds, both inside [0,1].
struct Parameter {
    std::string name;
    Rational lower;
    Rational upper;
};

/// Immutable, canonically ordered parameter list. Polynomials, models and
/// regions all reference one shared set; the index of a parameter is its
/// declaration position.
class ParameterSet {
public:
    ParameterSet() = default;
    explicit ParameterSet(std::vector<Parameter> params);

    std::size_t size() const { return params_.size(); }
    bool empty() const { return params_.empty(); }
    Parameter const& at(std::size_t index) const { return params_.at(index); }
    std::vector<Parameter> const& all() const { return params_; }
    std::optional<std::size_t> index_of(std::string_view name) const;

    bool same_as(ParameterSet const& other) const;

private:
    std::vector<Parameter> params_;
};

using ParamSetPtr = std::shared_ptr<const ParameterSet>;

ParamSetPtr make_parameter_set(std::vector<Parameter> params);

/// One rational value per parameter, inside the declared bounds.
class Instantiation {
public:
    Instantiation(ParamSetPtr params, std::vector<Rational> values);

    ParamSetPtr const& parameter_set() const { return params_; }
    std::size_t size() const { return values_.size(); }
    Rational const& value(std::size_t index) const { return values_.at(index); }
    std::vector<Rational> const& values() const { return values_; }

private:
    ParamSetPtr params_;
    std::vector<Rational> values_;
};

struct Interval {
    Rational lo;
    Rational hi;
    bool operator==(Interval const& other) const = default;
};

/// Axis-aligned closed box in parameter space; every interval is nonempty
/// and contained in its parameter's declared bounds.
class Region {
public:
    Region(ParamSetPtr params, std::vector<Interval> intervals);

    /// Full parameter space of the given set.
    static Region full_space(ParamSetPtr params);

    ParamSetPtr const& parameter_set() const { return params_; }
    std::size_t dimension() const { return intervals_.size(); }
    Interval const& interval(std::size_t index) const { return intervals_.at(index); }
    std::vector<Interval> const& intervals() const { return intervals_; }

    Rational volume() const;

    /// Bisects the dimension of largest width relative to the parameter's
    /// global bound width; ties go to the lowest parameter index. The two
    /// halves share the midpoint boundary.
    std::pair<Region, Region> split() const;

    /// All 2^|subset| corner assignments over the listed parameter indices,
    /// in lexicographic order (lower bound sorts first). Throws for more
    /// than 20 subset parameters.
    std::vector<std::vector<Rational>> vertices(std::span<const std::size_t> subset) const;

    Instantiation lower_corner() const;
    Instantiation center() const;

    /// Lexicographic order on (lo_0, hi_0, lo_1, hi_1, ...); used for
    /// deterministic worklists and canonical output sorting.
    static int compare(Region const& a, Region const& b);

    bool operator==(Region const& other) const { return intervals_ == other.intervals_; }

private:
    ParamSetPtr params_;
    std::vector<Interval> intervals_;
};

}  // namespace pbnsynth
