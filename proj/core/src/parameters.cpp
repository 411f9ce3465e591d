#include "pbnsynth/parameters.hpp"

#include <algorithm>
#include <set>

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

ParameterSet::ParameterSet(std::vector<Parameter> params) : params_(std::move(params)) {
    std::set<std::string> seen;
    for (auto const& p : params_) {
        if (p.name.empty()) {
            throw Error("parameter with empty name");
        }
        if (!seen.insert(p.name).second) {
            throw Error("duplicate parameter name '" + p.name + "'");
        }
        if (p.lower < 0 || p.upper > 1 || !(p.lower < p.upper)) {
            throw Error("parameter '" + p.name + "' needs bounds 0 <= lower < upper <= 1");
        }
    }
}

std::optional<std::size_t> ParameterSet::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

bool ParameterSet::same_as(ParameterSet const& other) const {
    if (this == &other) {
        return true;
    }
    if (params_.size() != other.params_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name != other.params_[i].name || params_[i].lower != other.params_[i].lower ||
            params_[i].upper != other.params_[i].upper) {
            return false;
        }
    }
    return true;
}

ParamSetPtr make_parameter_set(std::vector<Parameter> params) {
    return std::make_shared<const ParameterSet>(std::move(params));
}

Instantiation::Instantiation(ParamSetPtr params, std::vector<Rational> values)
    : params_(std::move(params)), values_(std::move(values)) {
    if (!params_) {
        throw Error("instantiation without parameter set");
    }
    if (values_.size() != params_->size()) {
        throw Error("instantiation has " + std::to_string(values_.size()) + " values for " +
                    std::to_string(params_->size()) + " parameters");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        auto const& p = params_->at(i);
        if (values_[i] < p.lower || values_[i] > p.upper) {
            throw Error("value " + rational_str(values_[i]) + " for parameter '" + p.name + "' is out of [" +
                        rational_str(p.lower) + ", " + rational_str(p.upper) + "]");
        }
    }
}

Region::Region(ParamSetPtr params, std::vector<Interval> intervals)
    : params_(std::move(params)), intervals_(std::move(intervals)) {
    if (!params_) {
        throw Error("region without parameter set");
    }
    if (intervals_.size() != params_->size()) {
        throw Error("region has " + std::to_string(intervals_.size()) + " intervals for " +
                    std::to_string(params_->size()) + " parameters");
    }
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        auto const& p = params_->at(i);
        auto const& iv = intervals_[i];
        if (iv.lo > iv.hi || iv.lo < p.lower || iv.hi > p.upper) {
            throw Error("region interval [" + rational_str(iv.lo) + ", " + rational_str(iv.hi) +
                        "] is not inside the bounds of parameter '" + p.name + "'");
        }
    }
}

Region Region::full_space(ParamSetPtr params) {
    std::vector<Interval> intervals;
    intervals.reserve(params->size());
    for (auto const& p : params->all()) {
        intervals.push_back({p.lower, p.upper});
    }
    return Region(std::move(params), std::move(intervals));
}

Rational Region::volume() const {
    Rational v = 1;
    for (auto const& iv : intervals_) {
        v *= iv.hi - iv.lo;
    }
    return v;
}

std::pair<Region, Region> Region::split() const {
    if (intervals_.empty()) {
        throw Error("cannot split a zero-dimensional region");
    }
    std::size_t best = 0;
    Rational best_rel = -1;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        auto const& p = params_->at(i);
        Rational rel = (intervals_[i].hi - intervals_[i].lo) / (p.upper - p.lower);
        if (rel > best_rel) {
            best_rel = rel;
            best = i;
        }
    }
    Rational mid = (intervals_[best].lo + intervals_[best].hi) / 2;
    auto left = intervals_;
    auto right = intervals_;
    left[best].hi = mid;
    right[best].lo = mid;
    return {Region(params_, std::move(left)), Region(params_, std::move(right))};
}

std::vector<std::vector<Rational>> Region::vertices(std::span<const std::size_t> subset) const {
    if (subset.empty()) {
        throw Error("vertex enumeration needs a nonempty parameter subset");
    }
    if (subset.size() > 20) {
        throw Error("vertex enumeration over " + std::to_string(subset.size()) +
                    " parameters exceeds the 20-parameter guard");
    }
    for (auto index : subset) {
        if (index >= intervals_.size()) {
            throw Error("vertex subset index out of range");
        }
    }
    std::size_t k = subset.size();
    std::vector<std::vector<Rational>> out;
    out.reserve(std::size_t{1} << k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<Rational> corner;
        corner.reserve(k);
        for (std::size_t j = 0; j < k; ++j) {
            bool high = (mask >> (k - 1 - j)) & 1u;
            auto const& iv = intervals_[subset[j]];
            corner.push_back(high ? iv.hi : iv.lo);
        }
        out.push_back(std::move(corner));
    }
    return out;
}

Instantiation Region::lower_corner() const {
    std::vector<Rational> values;
    values.reserve(intervals_.size());
    for (auto const& iv : intervals_) {
        values.push_back(iv.lo);
    }
    return Instantiation(params_, std::move(values));
}

Instantiation Region::center() const {
    std::vector<Rational> values;
    values.reserve(intervals_.size());
    for (auto const& iv : intervals_) {
        values.push_back((iv.lo + iv.hi) / 2);
    }
    return Instantiation(params_, std::move(values));
}

int Region::compare(Region const& a, Region const& b) {
    std::size_t n = std::min(a.intervals_.size(), b.intervals_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.intervals_[i].lo != b.intervals_[i].lo) {
            return a.intervals_[i].lo < b.intervals_[i].lo ? -1 : 1;
        }
        if (a.intervals_[i].hi != b.intervals_[i].hi) {
            return a.intervals_[i].hi < b.intervals_[i].hi ? -1 : 1;
        }
    }
    if (a.intervals_.size() != b.intervals_.size()) {
        return a.intervals_.size() < b.intervals_.size() ? -1 : 1;
    }
    return 0;
}

}  // namespace pbnsynth
