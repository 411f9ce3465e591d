#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pbnsynth/bn.hpp"
#include "pbnsynth/rational_function.hpp"

namespace pbnsynth {

/// State of a parametric chain: the visible variable=value pairs (everything
/// else is don't-care), plus the construction level and a final marker.
struct PmcState {
    std::vector<std::pair<std::string, std::string>> assignments;
    int level = -1;
    bool final_state = false;

    bool carries(std::string_view variable, std::string_view value) const;
    bool shows_variable(std::string_view variable) const;
};

struct PmcTransition {
    std::size_t target;
    RationalFunction prob;
};

/// Sparse parametric Markov chain. States are indexed densely in
/// construction order; per-state outgoing functions sum to one symbolically
/// (identically-zero functions are never stored).
class Pmc {
public:
    explicit Pmc(ParamSetPtr params) : params_(std::move(params)) {}

    ParamSetPtr const& parameter_set() const { return params_; }
    std::size_t state_count() const { return states_.size(); }
    PmcState const& state(std::size_t index) const { return states_.at(index); }
    std::size_t initial() const { return initial_; }
    std::vector<PmcTransition> const& transitions(std::size_t state) const { return transitions_.at(state); }

    std::size_t add_state(PmcState state);
    void set_state(std::size_t index, PmcState state) { states_.at(index) = std::move(state); }
    void set_initial(std::size_t index) { initial_ = index; }
    void mark_final(std::size_t index) { states_.at(index).final_state = true; }
    void add_transition(std::size_t source, std::size_t target, RationalFunction prob);

private:
    ParamSetPtr params_;
    std::vector<PmcState> states_;
    std::vector<std::vector<PmcTransition>> transitions_;
    std::size_t initial_ = 0;
};

/// Instantiated chain with exact rational transition probabilities.
struct Mc {
    std::size_t initial = 0;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> transitions;

    std::size_t state_count() const { return transitions.size(); }
};

/// Entrywise evaluation at u; rejects entries outside [0,1] with state
/// coordinates in the message.
Mc instantiate_pmc(Pmc const& pmc, Instantiation const& u);

/// Exact probability of eventually reaching a target state from the initial
/// state. Zero-probability states are found by graph search, the rest by an
/// exact rational linear solve (SCC by SCC; acyclic parts collapse to one
/// backward pass).
Rational reach_prob(Mc const& mc, std::vector<bool> const& target);

/// Exact reachability function via state elimination. Non-initial,
/// non-target states are eliminated in reverse construction order; a
/// self-loop f rescales the other outgoing edges by 1/(1-f).
RationalFunction reach_function(Pmc const& pmc, std::vector<bool> const& target);

/// States whose visible valuation contradicts one of the (variable, value)
/// requirements.
std::vector<bool> states_violating(Pmc const& pmc,
                                   std::vector<std::pair<std::string, std::string>> const& required);

/// Final states carrying all the given (variable, value) pairs.
std::vector<bool> final_states_satisfying(Pmc const& pmc,
                                          std::vector<std::pair<std::string, std::string>> const& required);

std::vector<std::pair<std::string, std::string>> to_named_pairs(Assignment const& a, Pbn const& bn);

enum class QueryMode { plain, evidence_tailored };

/// Conditional probability Pr(hypothesis | evidence) as an exact rational
/// function of the parameters, through the requested chain construction.
RationalFunction conditional_probability_function(Pbn const& bn, Assignment const& hypothesis,
                                                  Assignment const& evidence, QueryMode mode);

/// Pr(H=h | E=e) for a probability query; throws if the evidence is
/// impossible for every instantiation.
RationalFunction query_prob(Pbn const& bn, Query const& q, QueryMode mode);

/// The query probability as a function g/h of the parameters
/// (evidence-tailored construction; it yields the smaller chain).
RationalFunction sensitivity_function(Pbn const& bn, Query const& q);

/// |d/dx of the sensitivity function| at u0, exact via the quotient rule.
Rational sensitivity_value(Pbn const& bn, Query const& q, std::size_t parameter, Instantiation const& u0);

}  // namespace pbnsynth
