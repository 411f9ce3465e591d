#include "pbnsynth/bn.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

void Assignment::set(std::size_t variable, std::size_t value) {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair{variable, std::size_t{0}},
                               [](auto const& a, auto const& b) { return a.first < b.first; });
    if (it != pairs_.end() && it->first == variable) {
        throw Error("variable assigned twice in one valuation");
    }
    pairs_.insert(it, {variable, value});
}

std::optional<std::size_t> Assignment::value_of(std::size_t variable) const {
    for (auto const& [var, val] : pairs_) {
        if (var == variable) {
            return val;
        }
    }
    return std::nullopt;
}

Pbn::Pbn(ParamSetPtr params, std::vector<RandomVariable> variables, std::vector<Cpt> cpts)
    : params_(std::move(params)), variables_(std::move(variables)), cpts_(std::move(cpts)) {
    if (!params_) {
        throw Error("network without parameter set");
    }
    if (cpts_.size() != variables_.size()) {
        throw Error("network needs exactly one CPT per variable");
    }
    for (std::size_t i = 0; i < cpts_.size(); ++i) {
        if (cpts_[i].owner != i) {
            throw Error("CPT list must follow variable declaration order");
        }
        for (auto p : cpts_[i].parents) {
            if (p >= variables_.size()) {
                throw Error("CPT parent index out of range");
            }
        }
    }
}

std::optional<std::size_t> Pbn::variable_index(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> Pbn::value_index(std::size_t variable, std::string_view label) const {
    auto const& domain = variables_.at(variable).domain;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (domain[i] == label) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> Pbn::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (auto const& cpt : cpts_) {
        for (auto p : cpt.parents) {
            out.emplace_back(p, cpt.owner);
        }
    }
    return out;
}

std::size_t Pbn::expected_row_count(std::size_t variable) const {
    std::size_t count = 1;
    for (auto p : cpts_.at(variable).parents) {
        count *= variables_.at(p).domain.size();
    }
    return count;
}

std::size_t Pbn::row_index(std::size_t variable, std::span<const std::size_t> parent_values) const {
    auto const& parents = cpts_.at(variable).parents;
    if (parent_values.size() != parents.size()) {
        throw Error("parent valuation has wrong arity");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        index = index * variables_.at(parents[i]).domain.size() + parent_values[i];
    }
    return index;
}

std::vector<std::size_t> Pbn::parent_valuation(std::size_t variable, std::size_t row) const {
    auto const& parents = cpts_.at(variable).parents;
    std::vector<std::size_t> values(parents.size(), 0);
    for (std::size_t i = parents.size(); i-- > 0;) {
        std::size_t size = variables_.at(parents[i]).domain.size();
        values[i] = row % size;
        row /= size;
    }
    return values;
}

namespace {

std::string cpt_where(Pbn const& bn, std::size_t variable) {
    return "cpt(" + bn.variable(variable).name + ")";
}

}  // namespace

ValidationReport validate(Pbn const& bn) {
    ValidationReport report;
    std::set<std::string> names;
    for (std::size_t v = 0; v < bn.variable_count(); ++v) {
        auto const& var = bn.variable(v);
        if (!names.insert(var.name).second) {
            report.violations.push_back({"variable(" + var.name + ")", "duplicate variable name"});
        }
        if (var.domain.size() < 2) {
            report.violations.push_back({"variable(" + var.name + ")", "domain needs at least two values"});
        }
        std::set<std::string> labels;
        for (auto const& label : var.domain) {
            if (!labels.insert(label).second) {
                report.violations.push_back({"variable(" + var.name + ")", "duplicate value label '" + label + "'"});
            }
        }
    }

    try {
        topological_order(bn);
    } catch (Error const& e) {
        report.violations.push_back({"graph", e.what()});
    }

    auto one = Polynomial::constant(bn.parameter_set(), 1);
    for (std::size_t v = 0; v < bn.variable_count(); ++v) {
        auto const& cpt = bn.cpt(v);
        std::size_t expected = bn.expected_row_count(v);
        if (cpt.rows.size() != expected) {
            report.violations.push_back({cpt_where(bn, v), "expected " + std::to_string(expected) + " rows, found " +
                                                                std::to_string(cpt.rows.size())});
            continue;
        }
        std::set<std::size_t> parent_set(cpt.parents.begin(), cpt.parents.end());
        if (parent_set.size() != cpt.parents.size()) {
            report.violations.push_back({cpt_where(bn, v), "repeated parent"});
        }
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            auto const& row = cpt.rows[r];
            std::string where = cpt_where(bn, v) + ", row " + std::to_string(r);
            if (row.empty()) {
                report.violations.push_back({where, "missing row"});
                continue;
            }
            if (row.size() != bn.variable(v).domain.size()) {
                report.violations.push_back({where, "expected " + std::to_string(bn.variable(v).domain.size()) +
                                                        " entries, found " + std::to_string(row.size())});
                continue;
            }
            Polynomial sum(bn.parameter_set());
            for (auto const& entry : row) {
                sum += entry;
            }
            if (sum != one) {
                report.violations.push_back({where, "entries sum to " + sum.render() + ", not 1"});
            }
        }
    }
    return report;
}

std::vector<std::size_t> topological_order(Pbn const& bn) {
    std::size_t n = bn.variable_count();
    std::vector<std::size_t> in_degree(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (auto const& [parent, child] : bn.edges()) {
        children[parent].push_back(child);
        ++in_degree[child];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (in_degree[v] == 0) {
            ready.push(v);
        }
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        std::size_t v = ready.top();
        ready.pop();
        order.push_back(v);
        for (auto c : children[v]) {
            if (--in_degree[c] == 0) {
                ready.push(c);
            }
        }
    }
    if (order.size() != n) {
        throw Error("the parent relation has a cycle");
    }
    return order;
}

std::size_t Bn::row_index(std::size_t variable, std::span<const std::size_t> parent_values) const {
    std::size_t index = 0;
    auto const& pars = parents.at(variable);
    for (std::size_t i = 0; i < pars.size(); ++i) {
        index = index * variables.at(pars[i]).domain.size() + parent_values[i];
    }
    return index;
}

Bn instantiate(Pbn const& bn, Instantiation const& u) {
    Bn out;
    out.variables = bn.variables();
    out.parents.resize(bn.variable_count());
    out.rows.resize(bn.variable_count());
    for (std::size_t v = 0; v < bn.variable_count(); ++v) {
        auto const& cpt = bn.cpt(v);
        out.parents[v] = cpt.parents;
        out.rows[v].reserve(cpt.rows.size());
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            std::vector<Rational> row;
            row.reserve(cpt.rows[r].size());
            for (std::size_t e = 0; e < cpt.rows[r].size(); ++e) {
                Rational value = cpt.rows[r][e].evaluate(u);
                if (value < 0 || value > 1) {
                    throw IllFormedError("instantiation is not well-formed: entry " + std::to_string(e) + " of " +
                                         cpt_where(bn, v) + ", row " + std::to_string(r) + " evaluates to " +
                                         rational_str(value));
                }
                row.push_back(std::move(value));
            }
            out.rows[v].push_back(std::move(row));
        }
    }
    return out;
}

std::string SubclassTag::tag() const {
    return "p" + std::to_string(parameter_count) + "c" + std::to_string(parametrized_cpt_count) + "r" +
           std::to_string(max_rows_per_parameter);
}

SubclassTag classify(Pbn const& bn) {
    std::size_t n = bn.parameter_set()->size();
    SubclassTag tag;
    tag.parameter_count = n;
    std::vector<std::size_t> rows_per_param(n, 0);
    for (std::size_t v = 0; v < bn.variable_count(); ++v) {
        bool cpt_parametrized = false;
        for (auto const& row : bn.cpt(v).rows) {
            std::vector<bool> in_row(n, false);
            for (auto const& entry : row) {
                for (auto p : entry.support()) {
                    in_row[p] = true;
                }
            }
            for (std::size_t p = 0; p < n; ++p) {
                if (in_row[p]) {
                    ++rows_per_param[p];
                    cpt_parametrized = true;
                }
            }
        }
        if (cpt_parametrized) {
            ++tag.parametrized_cpt_count;
        }
    }
    for (auto r : rows_per_param) {
        tag.max_rows_per_parameter = std::max(tag.max_rows_per_parameter, r);
    }
    return tag;
}

namespace {

constexpr std::size_t kJointGuard = std::size_t{1} << 20;

std::size_t joint_size_guarded(Bn const& bn) {
    std::size_t total = 1;
    for (auto const& var : bn.variables) {
        total *= var.domain.size();
        if (total > kJointGuard) {
            throw Error("joint enumeration would exceed the 2^20 outcome guard");
        }
    }
    return total;
}

bool matches(std::vector<std::size_t> const& outcome, Assignment const& a) {
    for (auto const& [var, val] : a.pairs()) {
        if (outcome[var] != val) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<Rational> joint_distribution(Bn const& bn) {
    std::size_t total = joint_size_guarded(bn);
    std::size_t n = bn.variables.size();
    std::vector<Rational> joint;
    joint.reserve(total);
    std::vector<std::size_t> outcome(n, 0);
    std::vector<std::size_t> parent_values;
    for (std::size_t index = 0; index < total; ++index) {
        Rational prob = 1;
        for (std::size_t v = 0; v < n; ++v) {
            parent_values.clear();
            for (auto p : bn.parents[v]) {
                parent_values.push_back(outcome[p]);
            }
            prob *= bn.rows[v][bn.row_index(v, parent_values)][outcome[v]];
        }
        joint.push_back(std::move(prob));
        // Odometer: last variable varies fastest.
        for (std::size_t v = n; v-- > 0;) {
            if (++outcome[v] < bn.variables[v].domain.size()) {
                break;
            }
            outcome[v] = 0;
        }
    }
    return joint;
}

Rational joint_oracle(Bn const& bn, Assignment const& target, Assignment const& given) {
    std::size_t total = joint_size_guarded(bn);
    std::size_t n = bn.variables.size();
    auto joint = joint_distribution(bn);
    Rational p_both = 0;
    Rational p_given = 0;
    std::vector<std::size_t> outcome(n, 0);
    for (std::size_t index = 0; index < total; ++index) {
        if (matches(outcome, given)) {
            p_given += joint[index];
            if (matches(outcome, target)) {
                p_both += joint[index];
            }
        }
        for (std::size_t v = n; v-- > 0;) {
            if (++outcome[v] < bn.variables[v].domain.size()) {
                break;
            }
            outcome[v] = 0;
        }
    }
    if (p_given == 0) {
        throw Error("conditioning on zero-probability evidence");
    }
    return p_both / p_given;
}

std::string cmp_str(Cmp cmp) {
    switch (cmp) {
        case Cmp::lt: return "<";
        case Cmp::le: return "<=";
        case Cmp::gt: return ">";
        case Cmp::ge: return ">=";
    }
    return "?";
}

bool cmp_holds(Rational const& lhs, Cmp cmp, Rational const& rhs) {
    switch (cmp) {
        case Cmp::lt: return lhs < rhs;
        case Cmp::le: return lhs <= rhs;
        case Cmp::gt: return lhs > rhs;
        case Cmp::ge: return lhs >= rhs;
    }
    return false;
}

namespace {

std::string render_assignment(Assignment const& a, Pbn const& bn) {
    std::string out;
    for (auto const& [var, val] : a.pairs()) {
        if (!out.empty()) {
            out += ", ";
        }
        out += bn.variable(var).name + "=" + bn.variable(var).domain.at(val);
    }
    return out;
}

}  // namespace

std::string render_query(Query const& q, Pbn const& bn) {
    std::string out;
    switch (q.kind) {
        case QueryKind::probability:
            out = "P(" + render_assignment(q.hypothesis, bn);
            break;
        case QueryKind::ratio:
            out = "RATIO(" + render_assignment(q.hypothesis, bn) + " : " + render_assignment(*q.alternative, bn);
            break;
        case QueryKind::difference:
            out = "DIFF(" + render_assignment(q.hypothesis, bn) + " - " + render_assignment(*q.alternative, bn);
            break;
    }
    if (!q.evidence.empty()) {
        out += " | " + render_assignment(q.evidence, bn);
    }
    out += ") " + cmp_str(q.cmp) + " " + rational_str(q.threshold);
    return out;
}

}  // namespace pbnsynth
