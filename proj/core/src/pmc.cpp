#include "pbnsynth/pmc.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pbnsynth/errors.hpp"
#include "pbnsynth/transform.hpp"

namespace pbnsynth {

bool PmcState::carries(std::string_view variable, std::string_view value) const {
    for (auto const& [var, val] : assignments) {
        if (var == variable) {
            return val == value;
        }
    }
    return false;
}

bool PmcState::shows_variable(std::string_view variable) const {
    for (auto const& [var, val] : assignments) {
        if (var == variable) {
            return true;
        }
    }
    return false;
}

std::size_t Pmc::add_state(PmcState state) {
    states_.push_back(std::move(state));
    transitions_.emplace_back();
    return states_.size() - 1;
}

void Pmc::add_transition(std::size_t source, std::size_t target, RationalFunction prob) {
    if (source >= states_.size() || target >= states_.size()) {
        throw Error("transition endpoint out of range");
    }
    if (prob.is_zero()) {
        return;
    }
    transitions_.at(source).push_back({target, std::move(prob)});
}

Mc instantiate_pmc(Pmc const& pmc, Instantiation const& u) {
    Mc mc;
    mc.initial = pmc.initial();
    mc.transitions.resize(pmc.state_count());
    for (std::size_t s = 0; s < pmc.state_count(); ++s) {
        for (auto const& t : pmc.transitions(s)) {
            Rational value;
            try {
                value = t.prob.evaluate(u);
            } catch (EvalError const&) {
                throw IllFormedError("transition " + std::to_string(s) + " -> " + std::to_string(t.target) +
                                     " has a denominator zero at this instantiation");
            }
            if (value < 0 || value > 1) {
                throw IllFormedError("transition " + std::to_string(s) + " -> " + std::to_string(t.target) +
                                     " evaluates to " + rational_str(value) + " outside [0,1]");
            }
            if (value != 0) {
                mc.transitions[s].push_back({t.target, std::move(value)});
            }
        }
    }
    return mc;
}

namespace {

/// States that can reach a target along positive-probability edges.
template <typename EdgeLister>
std::vector<bool> can_reach(std::size_t count, std::vector<bool> const& target, EdgeLister const& edges) {
    std::vector<std::vector<std::size_t>> preds(count);
    for (std::size_t s = 0; s < count; ++s) {
        edges(s, [&](std::size_t t) { preds[t].push_back(s); });
    }
    std::vector<bool> reached = target;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < count; ++s) {
        if (target[s]) {
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        std::size_t s = stack.back();
        stack.pop_back();
        for (auto p : preds[s]) {
            if (!reached[p]) {
                reached[p] = true;
                stack.push_back(p);
            }
        }
    }
    return reached;
}

/// Tarjan over the unknown subgraph; emits components sinks-first, which is
/// exactly the order the backward solve needs.
class SccDecomposition {
public:
    SccDecomposition(std::vector<std::size_t> const& nodes,
                     std::vector<std::vector<std::size_t>> const& successors)
        : successors_(successors) {
        index_.assign(successors.size(), kUnset);
        low_.assign(successors.size(), 0);
        on_stack_.assign(successors.size(), false);
        for (auto v : nodes) {
            if (index_[v] == kUnset) {
                run(v);
            }
        }
    }

    std::vector<std::vector<std::size_t>> const& components() const { return components_; }

private:
    static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

    void run(std::size_t root) {
        struct Frame {
            std::size_t node;
            std::size_t edge = 0;
        };
        std::vector<Frame> frames{{root}};
        visit(root);
        while (!frames.empty()) {
            auto& frame = frames.back();
            auto const& succs = successors_[frame.node];
            if (frame.edge < succs.size()) {
                std::size_t next = succs[frame.edge++];
                if (index_[next] == kUnset) {
                    visit(next);
                    frames.push_back({next});
                } else if (on_stack_[next]) {
                    low_[frame.node] = std::min(low_[frame.node], index_[next]);
                }
            } else {
                if (low_[frame.node] == index_[frame.node]) {
                    std::vector<std::size_t> component;
                    while (true) {
                        std::size_t w = stack_.back();
                        stack_.pop_back();
                        on_stack_[w] = false;
                        component.push_back(w);
                        if (w == frame.node) {
                            break;
                        }
                    }
                    std::sort(component.begin(), component.end());
                    components_.push_back(std::move(component));
                }
                std::size_t done = frame.node;
                frames.pop_back();
                if (!frames.empty()) {
                    low_[frames.back().node] = std::min(low_[frames.back().node], low_[done]);
                }
            }
        }
    }

    void visit(std::size_t v) {
        index_[v] = low_[v] = counter_++;
        stack_.push_back(v);
        on_stack_[v] = true;
    }

    std::vector<std::vector<std::size_t>> const& successors_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> low_;
    std::vector<bool> on_stack_;
    std::vector<std::size_t> stack_;
    std::size_t counter_ = 0;
    std::vector<std::vector<std::size_t>> components_;
};

/// Exact dense solve of (I - P) x = rhs with nonzero pivoting.
std::vector<Rational> solve_block(std::vector<std::vector<Rational>> a, std::vector<Rational> rhs) {
    std::size_t k = rhs.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        while (pivot < k && a[pivot][col] == 0) {
            ++pivot;
        }
        if (pivot == k) {
            throw Error("singular linear system in reachability solve");
        }
        std::swap(a[pivot], a[col]);
        std::swap(rhs[pivot], rhs[col]);
        for (std::size_t row = 0; row < k; ++row) {
            if (row == col || a[row][col] == 0) {
                continue;
            }
            Rational factor = a[row][col] / a[col][col];
            for (std::size_t c = col; c < k; ++c) {
                a[row][c] -= factor * a[col][c];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    std::vector<Rational> x(k);
    for (std::size_t i = 0; i < k; ++i) {
        x[i] = rhs[i] / a[i][i];
    }
    return x;
}

}  // namespace

Rational reach_prob(Mc const& mc, std::vector<bool> const& target) {
    std::size_t n = mc.state_count();
    if (target.size() != n) {
        throw Error("target vector has wrong length");
    }
    if (target[mc.initial]) {
        return 1;
    }
    auto reached = can_reach(n, target, [&](std::size_t s, auto&& emit) {
        for (auto const& [t, p] : mc.transitions[s]) {
            emit(t);
        }
    });
    if (!reached[mc.initial]) {
        return 0;
    }

    // Unknown states: positive reach probability, not yet 0/1.
    std::vector<std::size_t> unknown;
    std::vector<bool> is_unknown(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (reached[s] && !target[s]) {
            unknown.push_back(s);
            is_unknown[s] = true;
        }
    }
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto s : unknown) {
        for (auto const& [t, p] : mc.transitions[s]) {
            if (is_unknown[t]) {
                succ[s].push_back(t);
            }
        }
    }

    std::vector<Rational> value(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (target[s]) {
            value[s] = 1;
        }
    }
    std::vector<bool> solved(n, false);

    SccDecomposition sccs(unknown, succ);
    for (auto const& component : sccs.components()) {
        if (component.size() == 1) {
            std::size_t s = component[0];
            Rational self = 0;
            Rational acc = 0;
            for (auto const& [t, p] : mc.transitions[s]) {
                if (t == s) {
                    self += p;
                } else if (target[t] || solved[t]) {
                    acc += p * value[t];
                }
            }
            if (self == 1) {
                throw Error("sure self-loop on a state that should reach the target");
            }
            value[s] = acc / (1 - self);
            solved[s] = true;
            continue;
        }
        std::map<std::size_t, std::size_t> local;
        for (std::size_t i = 0; i < component.size(); ++i) {
            local[component[i]] = i;
        }
        std::size_t k = component.size();
        std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k, 0));
        std::vector<Rational> rhs(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            a[i][i] = 1;
            for (auto const& [t, p] : mc.transitions[component[i]]) {
                auto it = local.find(t);
                if (it != local.end()) {
                    a[i][it->second] -= p;
                } else if (target[t] || solved[t]) {
                    rhs[i] += p * value[t];
                }
            }
        }
        auto x = solve_block(std::move(a), std::move(rhs));
        for (std::size_t i = 0; i < k; ++i) {
            value[component[i]] = x[i];
            solved[component[i]] = true;
        }
    }
    return value[mc.initial];
}

RationalFunction reach_function(Pmc const& pmc, std::vector<bool> const& target) {
    std::size_t n = pmc.state_count();
    if (target.size() != n) {
        throw Error("target vector has wrong length");
    }
    auto params = pmc.parameter_set();
    if (target[pmc.initial()]) {
        return RationalFunction::constant(params, 1);
    }
    auto reached = can_reach(n, target, [&](std::size_t s, auto&& emit) {
        for (auto const& t : pmc.transitions(s)) {
            emit(t.target);
        }
    });
    if (!reached[pmc.initial()]) {
        return RationalFunction::constant(params, 0);
    }

    // Working copy over live states only; target rows are absorbed.
    std::vector<std::map<std::size_t, RationalFunction>> out(n);
    std::vector<std::set<std::size_t>> preds(n);
    std::vector<bool> alive = reached;
    for (std::size_t s = 0; s < n; ++s) {
        if (!alive[s] || target[s]) {
            continue;
        }
        for (auto const& t : pmc.transitions(s)) {
            if (!alive[t.target]) {
                continue;  // mass into states that cannot reach the target
            }
            auto [it, inserted] = out[s].try_emplace(t.target, t.prob);
            if (!inserted) {
                it->second += t.prob;
            }
            preds[t.target].insert(s);
        }
    }

    for (std::size_t s = n; s-- > 0;) {
        if (!alive[s] || target[s] || s == pmc.initial()) {
            continue;
        }
        auto self = out[s].find(s);
        if (self != out[s].end()) {
            RationalFunction stay = one_minus(self->second);
            if (stay.is_zero()) {
                throw EvalError("state elimination hit a sure self-loop");
            }
            RationalFunction scale = RationalFunction::constant(params, 1) / stay;
            out[s].erase(self);
            for (auto& [t, g] : out[s]) {
                g = g * scale;
            }
        }
        for (auto p : preds[s]) {
            if (!alive[p] || p == s) {
                continue;
            }
            auto via = out[p].find(s);
            if (via == out[p].end()) {
                continue;
            }
            RationalFunction entry = via->second;
            out[p].erase(via);
            for (auto const& [t, g] : out[s]) {
                RationalFunction mass = entry * g;
                auto [it, inserted] = out[p].try_emplace(t, mass);
                if (!inserted) {
                    it->second += mass;
                    if (it->second.is_zero()) {
                        out[p].erase(it);
                        continue;
                    }
                }
                preds[t].insert(p);
            }
        }
        alive[s] = false;
        out[s].clear();
    }

    RationalFunction mass = RationalFunction::constant(params, 0);
    RationalFunction self_mass = RationalFunction::constant(params, 0);
    for (auto const& [t, g] : out[pmc.initial()]) {
        if (t == pmc.initial()) {
            self_mass += g;
        } else if (target[t]) {
            mass += g;
        }
    }
    if (self_mass.is_zero()) {
        return mass;
    }
    RationalFunction stay = one_minus(self_mass);
    if (stay.is_zero()) {
        throw EvalError("state elimination hit a sure self-loop at the initial state");
    }
    return mass / stay;
}

std::vector<bool> states_violating(Pmc const& pmc,
                                   std::vector<std::pair<std::string, std::string>> const& required) {
    std::vector<bool> out(pmc.state_count(), false);
    for (std::size_t s = 0; s < pmc.state_count(); ++s) {
        for (auto const& [var, val] : required) {
            if (pmc.state(s).shows_variable(var) && !pmc.state(s).carries(var, val)) {
                out[s] = true;
                break;
            }
        }
    }
    return out;
}

std::vector<bool> final_states_satisfying(Pmc const& pmc,
                                          std::vector<std::pair<std::string, std::string>> const& required) {
    std::vector<bool> out(pmc.state_count(), false);
    for (std::size_t s = 0; s < pmc.state_count(); ++s) {
        if (!pmc.state(s).final_state) {
            continue;
        }
        bool all = true;
        for (auto const& [var, val] : required) {
            if (!pmc.state(s).carries(var, val)) {
                all = false;
                break;
            }
        }
        out[s] = all;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> to_named_pairs(Assignment const& a, Pbn const& bn) {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(a.size());
    for (auto const& [var, val] : a.pairs()) {
        out.emplace_back(bn.variable(var).name, bn.variable(var).domain.at(val));
    }
    return out;
}

namespace {

std::vector<bool> any_final(Pmc const& pmc) {
    std::vector<bool> out(pmc.state_count(), false);
    for (std::size_t s = 0; s < pmc.state_count(); ++s) {
        out[s] = pmc.state(s).final_state;
    }
    return out;
}

bool finals_reachable(Pmc const& pmc) {
    auto finals = any_final(pmc);
    auto reached = can_reach(pmc.state_count(), finals, [&](std::size_t s, auto&& emit) {
        for (auto const& t : pmc.transitions(s)) {
            emit(t.target);
        }
    });
    return reached[pmc.initial()];
}

}  // namespace

RationalFunction conditional_probability_function(Pbn const& bn, Assignment const& hypothesis,
                                                  Assignment const& evidence, QueryMode mode) {
    auto order = topological_order(bn);
    if (mode == QueryMode::plain) {
        Pmc pmc = build_pmc(bn, order);
        auto required = to_named_pairs(evidence, bn);
        RationalFunction evidence_mass = one_minus(reach_function(pmc, states_violating(pmc, required)));
        if (evidence_mass.is_zero()) {
            throw Error("the evidence is impossible for every instantiation");
        }
        auto both = required;
        for (auto const& pair : to_named_pairs(hypothesis, bn)) {
            both.push_back(pair);
        }
        RationalFunction joint_mass = one_minus(reach_function(pmc, states_violating(pmc, both)));
        return joint_mass / evidence_mass;
    }

    std::vector<std::size_t> keep_open;
    for (auto const& [var, val] : hypothesis.pairs()) {
        keep_open.push_back(var);
    }
    Pmc pmc = build_evidence_pmc(bn, order, evidence, keep_open);
    if (!finals_reachable(pmc)) {
        throw Error("the evidence is impossible for every instantiation");
    }
    return reach_function(pmc, final_states_satisfying(pmc, to_named_pairs(hypothesis, bn)));
}

RationalFunction query_prob(Pbn const& bn, Query const& q, QueryMode mode) {
    if (q.kind != QueryKind::probability) {
        throw Error("query_prob expects a probability query");
    }
    return conditional_probability_function(bn, q.hypothesis, q.evidence, mode);
}

RationalFunction sensitivity_function(Pbn const& bn, Query const& q) {
    if (q.kind != QueryKind::probability) {
        throw Error("sensitivity functions are defined for probability queries");
    }
    return conditional_probability_function(bn, q.hypothesis, q.evidence, QueryMode::evidence_tailored);
}

Rational sensitivity_value(Pbn const& bn, Query const& q, std::size_t parameter, Instantiation const& u0) {
    RationalFunction f = sensitivity_function(bn, q);
    Rational h = f.denominator().evaluate(u0);
    if (h == 0) {
        throw EvalError("sensitivity value requested at a pole of the sensitivity function");
    }
    Rational g = f.numerator().evaluate(u0);
    Rational gd = f.numerator().derivative(parameter).evaluate(u0);
    Rational hd = f.denominator().derivative(parameter).evaluate(u0);
    return rational_abs((gd * h - g * hd) / (h * h));
}

}  // namespace pbnsynth
