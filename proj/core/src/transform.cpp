#include "pbnsynth/transform.hpp"

#include <algorithm>
#include <map>

#include "pbnsynth/errors.hpp"

namespace pbnsynth {

namespace {

void check_order(Pbn const& bn, std::vector<std::size_t> const& order) {
    std::size_t n = bn.variable_count();
    if (order.size() != n) {
        throw Error("variable order has wrong length");
    }
    std::vector<std::size_t> position(n, n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= n || position[order[i]] != n) {
            throw Error("variable order is not a permutation");
        }
        position[order[i]] = i;
    }
    for (auto const& [parent, child] : bn.edges()) {
        if (position[parent] > position[child]) {
            throw Error("variable order is not topological");
        }
    }
}

struct OpenPolicy {
    // Position (0-based) of the last evidence variable; 0 means no evidence.
    std::size_t evidence_cutoff = 0;
    std::vector<bool> is_evidence;
    std::vector<bool> keep_open;
};

/// Open variables at 1-based level j under the (possibly widened) policy.
std::vector<std::size_t> open_at(Pbn const& bn, std::vector<std::size_t> const& order,
                                 std::vector<std::size_t> const& position, std::size_t j,
                                 OpenPolicy const& policy) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < j; ++i) {
        std::size_t var = order[i - 1];
        bool open = false;
        for (auto const& [parent, child] : bn.edges()) {
            if (parent == var && position[child] + 1 > j) {
                open = true;
                break;
            }
        }
        if (!open && !policy.is_evidence.empty() && !policy.is_evidence[var] && j <= policy.evidence_cutoff) {
            open = true;
        }
        if (!open && !policy.keep_open.empty() && policy.keep_open[var]) {
            open = true;
        }
        if (open) {
            out.push_back(var);
        }
    }
    return out;
}

constexpr int kStar = -1;

Pmc build(Pbn const& bn, std::vector<std::size_t> const& order, OpenPolicy const& policy,
          Assignment const& evidence) {
    check_order(bn, order);
    std::size_t n = bn.variable_count();
    if (n == 0) {
        throw Error("cannot build a chain for an empty network");
    }
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = i;
    }

    Pmc pmc(bn.parameter_set());
    std::map<std::vector<int>, std::size_t> index_of;
    std::vector<std::vector<int>> valuations;

    auto state_for = [&](std::vector<int> const& valuation, int level) {
        auto it = index_of.find(valuation);
        if (it != index_of.end()) {
            return it->second;
        }
        PmcState state;
        state.level = level;
        for (std::size_t i = 0; i < order.size(); ++i) {
            std::size_t var = order[i];
            if (valuation[var] != kStar) {
                state.assignments.emplace_back(bn.variable(var).name,
                                               bn.variable(var).domain.at(static_cast<std::size_t>(valuation[var])));
            }
        }
        std::size_t idx = pmc.add_state(std::move(state));
        index_of.emplace(valuation, idx);
        valuations.push_back(valuation);
        return idx;
    };

    std::vector<int> initial(n, kStar);
    std::size_t initial_index = state_for(initial, 0);
    pmc.set_initial(initial_index);

    std::vector<std::size_t> frontier{initial_index};
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t var = order[j - 1];
        auto const& cpt = bn.cpt(var);
        auto open = open_at(bn, order, position, j, policy);
        std::vector<std::size_t> next_frontier;

        for (auto source : frontier) {
            auto const& valuation = valuations[source];
            std::vector<std::size_t> parent_values;
            parent_values.reserve(cpt.parents.size());
            for (auto p : cpt.parents) {
                if (valuation[p] == kStar) {
                    throw Error("internal: parent value lost before its child's level");
                }
                parent_values.push_back(static_cast<std::size_t>(valuation[p]));
            }
            auto const& row = cpt.rows.at(bn.row_index(var, parent_values));

            Polynomial restart_mass(bn.parameter_set());
            auto required = evidence.value_of(var);
            for (std::size_t d = 0; d < row.size(); ++d) {
                if (row[d].is_zero()) {
                    continue;
                }
                if (required && d != *required) {
                    restart_mass += row[d];
                    continue;
                }
                std::vector<int> next(n, kStar);
                for (auto o : open) {
                    next[o] = valuation[o];
                }
                next[var] = static_cast<int>(d);
                bool fresh = index_of.find(next) == index_of.end();
                std::size_t target = state_for(next, static_cast<int>(j));
                if (fresh) {
                    next_frontier.push_back(target);
                }
                pmc.add_transition(source, target, RationalFunction(row[d]));
            }
            if (!restart_mass.is_zero()) {
                pmc.add_transition(source, initial_index, RationalFunction(std::move(restart_mass)));
            }
        }
        frontier = std::move(next_frontier);
    }

    // Rule (3): the deepest level is absorbing.
    for (std::size_t s = 0; s < pmc.state_count(); ++s) {
        if (pmc.state(s).level == static_cast<int>(n)) {
            pmc.add_transition(s, s, RationalFunction::constant(bn.parameter_set(), 1));
            pmc.mark_final(s);
        }
    }
    return pmc;
}

}  // namespace

std::vector<std::size_t> open_set(Pbn const& bn, std::vector<std::size_t> const& order, std::size_t level) {
    check_order(bn, order);
    if (level < 1 || level > order.size()) {
        throw Error("level out of range");
    }
    std::vector<std::size_t> position(bn.variable_count());
    for (std::size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = i;
    }
    return open_at(bn, order, position, level, OpenPolicy{});
}

Pmc build_pmc(Pbn const& bn, std::vector<std::size_t> const& order) {
    return build(bn, order, OpenPolicy{}, Assignment{});
}

Pmc build_evidence_pmc(Pbn const& bn, std::vector<std::size_t> const& order, Assignment const& evidence,
                       std::vector<std::size_t> const& keep_open) {
    check_order(bn, order);
    std::size_t n = bn.variable_count();
    OpenPolicy policy;
    policy.is_evidence.assign(n, false);
    policy.keep_open.assign(n, false);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = i;
    }
    for (auto const& [var, value] : evidence.pairs()) {
        policy.is_evidence.at(var) = true;
        policy.evidence_cutoff = std::max(policy.evidence_cutoff, position[var] + 1);
    }
    for (auto var : keep_open) {
        policy.keep_open.at(var) = true;
    }
    return build(bn, order, policy, evidence);
}

}  // namespace pbnsynth
