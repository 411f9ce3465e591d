#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbnsynth/polynomial.hpp"

namespace pbnsynth {

struct RandomVariable {
    std::string name;
    std::vector<std::string> domain;  // ordered value labels
};

/// Partial joint valuation: sorted, duplicate-free (variable, value) pairs.
class Assignment {
public:
    Assignment() = default;

    void set(std::size_t variable, std::size_t value);
    std::optional<std::size_t> value_of(std::size_t variable) const;
    std::vector<std::pair<std::size_t, std::size_t>> const& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }
    std::size_t size() const { return pairs_.size(); }

    bool operator==(Assignment const& other) const = default;

private:
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// One conditional probability table. Rows are indexed row-major over the
/// parents in declared order; each row holds |domain(owner)| entries.
struct Cpt {
    std::size_t owner;
    std::vector<std::size_t> parents;
    std::vector<std::vector<Polynomial>> rows;
};

/// Parametric Bayesian network. The DAG is carried by the CPT parent lists.
/// Structural index errors are rejected at construction; semantic problems
/// (row sums, cycles, row counts) are reported by validate().
class Pbn {
public:
    Pbn(ParamSetPtr params, std::vector<RandomVariable> variables, std::vector<Cpt> cpts);

    ParamSetPtr const& parameter_set() const { return params_; }
    std::vector<RandomVariable> const& variables() const { return variables_; }
    std::size_t variable_count() const { return variables_.size(); }
    RandomVariable const& variable(std::size_t i) const { return variables_.at(i); }
    Cpt const& cpt(std::size_t variable) const { return cpts_.at(variable); }
    std::vector<Cpt> const& cpts() const { return cpts_; }

    std::optional<std::size_t> variable_index(std::string_view name) const;
    std::optional<std::size_t> value_index(std::size_t variable, std::string_view label) const;

    /// Parent->child pairs derived from the CPT parent lists.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    /// Number of rows a well-formed CPT must have.
    std::size_t expected_row_count(std::size_t variable) const;

    /// Row index for a full parent valuation (row-major, declared order).
    std::size_t row_index(std::size_t variable, std::span<const std::size_t> parent_values) const;

    /// Inverse of row_index.
    std::vector<std::size_t> parent_valuation(std::size_t variable, std::size_t row) const;

private:
    ParamSetPtr params_;
    std::vector<RandomVariable> variables_;
    std::vector<Cpt> cpts_;
};

struct Violation {
    std::string where;    // e.g. "cpt(UrineTest), row 1"
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(Pbn const& bn);

/// Parents precede children; declaration order breaks ties. Throws on cycles.
std::vector<std::size_t> topological_order(Pbn const& bn);

/// Parameter-free network with exact rational CPT entries.
struct Bn {
    std::vector<RandomVariable> variables;
    std::vector<std::vector<std::size_t>> parents;
    std::vector<std::vector<std::vector<Rational>>> rows;

    std::size_t row_index(std::size_t variable, std::span<const std::size_t> parent_values) const;
};

/// Evaluates every CPT entry at u. Throws IllFormedError (with coordinates)
/// if some entry leaves [0,1], i.e. u is outside the well-formed set.
Bn instantiate(Pbn const& bn, Instantiation const& u);

struct SubclassTag {
    std::size_t parameter_count = 0;
    std::size_t parametrized_cpt_count = 0;   // CPTs containing at least one parameter
    std::size_t max_rows_per_parameter = 0;   // max over parameters of rows mentioning it

    std::string tag() const;  // "p2c2r1"
};

SubclassTag classify(Pbn const& bn);

/// Full joint enumeration, exact. Guarded to at most 2^20 outcomes.
/// Pr(target | given); throws on zero-probability evidence.
Rational joint_oracle(Bn const& bn, Assignment const& target, Assignment const& given);

/// Joint probability of every outcome, enumerated row-major over the
/// variables in declaration order. Same state-space guard as joint_oracle.
std::vector<Rational> joint_distribution(Bn const& bn);

enum class QueryKind { probability, ratio, difference };
enum class Cmp { lt, le, gt, ge };

std::string cmp_str(Cmp cmp);
bool cmp_holds(Rational const& lhs, Cmp cmp, Rational const& rhs);

/// A synthesis constraint: hypothesis/evidence valuations, an optional
/// alternative valuation for ratio and difference problems, a comparison
/// and a threshold.
struct Query {
    QueryKind kind = QueryKind::probability;
    Assignment hypothesis;
    Assignment evidence;
    std::optional<Assignment> alternative;
    bool alternative_on_evidence = false;  // ratio/difference over evidences e vs e'
    Cmp cmp = Cmp::le;
    Rational threshold;
};

/// Canonical text form of a query, parseable by parse_query.
std::string render_query(Query const& q, Pbn const& bn);

}  // namespace pbnsynth
