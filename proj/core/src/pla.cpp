#include "pbnsynth/pla.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <set>
#include <thread>

#include "pbnsynth/errors.hpp"
#include "pbnsynth/transform.hpp"

namespace pbnsynth {

std::string region_label_str(RegionLabel label) {
    switch (label) {
        case RegionLabel::accepting: return "accepting";
        case RegionLabel::rejecting: return "rejecting";
        case RegionLabel::unknown: return "unknown";
    }
    return "?";
}

namespace {

constexpr double kStopResidual = 1e-12;
constexpr std::size_t kSweepCap = 1000000;

struct RelaxedState {
    // One action per region vertex over the parameters of the outgoing row;
    // each action lists (target, probability-at-vertex).
    std::vector<std::vector<std::pair<std::size_t, double>>> actions;
    bool fixed = false;
    double fixed_value = 0.0;
};

std::vector<RelaxedState> relax(Pmc const& pmc, Region const& region, std::vector<bool> const& target) {
    std::size_t n = pmc.state_count();
    std::vector<RelaxedState> states(n);
    std::vector<Rational> point(region.dimension());
    for (std::size_t i = 0; i < region.dimension(); ++i) {
        point[i] = region.interval(i).lo;
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (target[s]) {
            states[s].fixed = true;
            states[s].fixed_value = 1.0;
            continue;
        }
        auto const& out = pmc.transitions(s);
        if (out.size() == 1 && out[0].target == s) {
            states[s].fixed = true;
            states[s].fixed_value = 0.0;
            continue;
        }
        std::vector<bool> used(region.dimension(), false);
        for (auto const& t : out) {
            if (!t.prob.is_polynomial()) {
                throw Error("parameter lifting needs polynomial transition functions");
            }
            if (!t.prob.numerator().is_multi_affine()) {
                throw Error("parameter lifting needs multi-affine transition functions");
            }
            for (auto p : t.prob.numerator().support()) {
                used[p] = true;
            }
        }
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (used[i]) {
                support.push_back(i);
            }
        }
        std::vector<std::vector<Rational>> corners;
        if (support.empty()) {
            corners.push_back({});
        } else {
            corners = region.vertices(support);
        }
        for (auto const& corner : corners) {
            for (std::size_t i = 0; i < support.size(); ++i) {
                point[support[i]] = corner[i];
            }
            std::vector<std::pair<std::size_t, double>> action;
            action.reserve(out.size());
            for (auto const& t : out) {
                Rational value = t.prob.numerator().evaluate(point);
                if (value < 0 || value > 1) {
                    throw IllFormedError("region is not well-formed: transition " + std::to_string(s) + " -> " +
                                         std::to_string(t.target) + " evaluates to " + rational_str(value) +
                                         " at a region vertex");
                }
                if (value != 0) {
                    action.emplace_back(t.target, to_double(value));
                }
            }
            states[s].actions.push_back(std::move(action));
            for (std::size_t i = 0; i < support.size(); ++i) {
                point[support[i]] = region.interval(support[i]).lo;
            }
        }
    }
    return states;
}

}  // namespace

LiftOutcome lift_bounds(Pmc const& pmc, Region const& region, std::vector<bool> const& target,
                        Objective objective) {
    if (target.size() != pmc.state_count()) {
        throw Error("target vector has wrong length");
    }
    auto states = relax(pmc, region, target);
    std::size_t n = states.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        if (states[s].fixed) {
            x[s] = states[s].fixed_value;
        }
    }
    bool maximize = objective == Objective::maximize;
    bool cap_hit = true;
    for (std::size_t sweep = 0; sweep < kSweepCap; ++sweep) {
        double residual = 0.0;
        for (std::size_t s = n; s-- > 0;) {
            if (states[s].fixed) {
                continue;
            }
            double best = maximize ? 0.0 : 1.0;
            bool any = false;
            for (auto const& action : states[s].actions) {
                double sum = 0.0;
                for (auto const& [t, p] : action) {
                    sum += p * x[t];
                }
                if (!any || (maximize ? sum > best : sum < best)) {
                    best = sum;
                    any = true;
                }
            }
            if (!any) {
                best = 0.0;
            }
            residual = std::max(residual, std::abs(best - x[s]));
            x[s] = best;
        }
        if (residual < kStopResidual) {
            cap_hit = false;
            break;
        }
    }
    LiftOutcome out;
    out.cap_hit = cap_hit;
    if (cap_hit) {
        // Loose but safe fallback.
        out.value = maximize ? 1.0 : 0.0;
    } else {
        out.value = std::clamp(x[pmc.initial()], 0.0, 1.0);
    }
    return out;
}

BoundPair lift_bound_pair(Pmc const& pmc, Region const& region, std::vector<bool> const& target) {
    BoundPair out;
    out.lower = lift_bounds(pmc, region, target, Objective::minimize).value;
    out.upper = lift_bounds(pmc, region, target, Objective::maximize).value;
    return out;
}

bool region_wellformed(Pbn const& bn, Region const& region) {
    std::vector<Rational> point(region.dimension());
    for (std::size_t i = 0; i < region.dimension(); ++i) {
        point[i] = region.interval(i).lo;
    }
    for (std::size_t v = 0; v < bn.variable_count(); ++v) {
        for (auto const& row : bn.cpt(v).rows) {
            for (auto const& entry : row) {
                if (!entry.is_multi_affine()) {
                    throw Error("CPT entry " + entry.render() + " is not multi-affine");
                }
                auto support = entry.support();
                std::vector<std::vector<Rational>> corners;
                if (support.empty()) {
                    corners.push_back({});
                } else {
                    corners = region.vertices(support);
                }
                for (auto const& corner : corners) {
                    for (std::size_t i = 0; i < support.size(); ++i) {
                        point[support[i]] = corner[i];
                    }
                    Rational value = entry.evaluate(point);
                    for (std::size_t i = 0; i < support.size(); ++i) {
                        point[support[i]] = region.interval(support[i]).lo;
                    }
                    if (value < 0 || value > 1) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

namespace {

struct MarginInterval {
    double lo = 0.0;
    double hi = 0.0;
};

double widen_low(double lower) { return std::max(0.0, lower - kLiftPrecision); }
double widen_high(double upper) { return std::min(1.0, upper + kLiftPrecision); }

RegionLabel label_from_margin(MarginInterval m, Cmp cmp) {
    switch (cmp) {
        case Cmp::ge:
            if (m.lo >= 0) return RegionLabel::accepting;
            if (m.hi < 0) return RegionLabel::rejecting;
            return RegionLabel::unknown;
        case Cmp::gt:
            if (m.lo > 0) return RegionLabel::accepting;
            if (m.hi <= 0) return RegionLabel::rejecting;
            return RegionLabel::unknown;
        case Cmp::le:
            if (m.hi <= 0) return RegionLabel::accepting;
            if (m.lo > 0) return RegionLabel::rejecting;
            return RegionLabel::unknown;
        case Cmp::lt:
            if (m.hi < 0) return RegionLabel::accepting;
            if (m.lo >= 0) return RegionLabel::rejecting;
            return RegionLabel::unknown;
    }
    return RegionLabel::unknown;
}

struct WorklistEntry {
    Region region;
    Rational volume;
};

struct WorklistOrder {
    bool operator()(WorklistEntry const& a, WorklistEntry const& b) const {
        if (a.volume != b.volume) {
            return a.volume > b.volume;  // largest volume first
        }
        return Region::compare(a.region, b.region) < 0;
    }
};

/// Deterministic worklist refinement. Verification is a pure function of the
/// region, so a batch of equal-volume regions (exactly the prefix a serial
/// run would process next) can be labeled on a thread pool and committed in
/// serial order; the result is identical for every thread count.
RegionPartition partition_engine(std::function<RegionLabel(Region const&)> const& verify, Region const& box,
                                 PartitionOptions const& options, Query constraint) {
    if (options.coverage <= 0 || options.coverage >= 1) {
        throw Error("coverage must be strictly between 0 and 1");
    }
    RegionPartition result;
    result.constraint = std::move(constraint);
    Rational total = box.volume();
    if (total == 0) {
        throw Error("cannot partition a degenerate box");
    }

    std::set<WorklistEntry, WorklistOrder> worklist;
    worklist.insert({box, total});
    Rational decided = 0;
    std::vector<LabeledRegion> labeled;
    bool budget_exhausted = false;

    auto coverage_reached = [&]() { return decided / total >= options.coverage; };

    while (!worklist.empty() && !coverage_reached() && !budget_exhausted) {
        // All entries tied at the current largest volume.
        std::vector<WorklistEntry> batch;
        Rational top_volume = worklist.begin()->volume;
        while (!worklist.empty() && worklist.begin()->volume == top_volume) {
            batch.push_back(*worklist.begin());
            worklist.erase(worklist.begin());
        }

        std::vector<RegionLabel> labels(batch.size(), RegionLabel::unknown);
        unsigned workers = std::max(1u, options.threads);
        if (workers == 1 || batch.size() == 1) {
            for (std::size_t i = 0; i < batch.size(); ++i) {
                labels[i] = verify(batch[i].region);
            }
        } else {
            std::atomic<std::size_t> cursor{0};
            auto worker = [&]() {
                while (true) {
                    std::size_t i = cursor.fetch_add(1);
                    if (i >= batch.size()) {
                        return;
                    }
                    labels[i] = verify(batch[i].region);
                }
            };
            std::vector<std::thread> pool;
            for (unsigned w = 1; w < std::min<std::size_t>(workers, batch.size()); ++w) {
                pool.emplace_back(worker);
            }
            worker();
            for (auto& t : pool) {
                t.join();
            }
        }

        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (coverage_reached() || budget_exhausted) {
                worklist.insert(batch[i]);  // untouched leftovers stay unknown
                continue;
            }
            ++result.refinement_budget_used;
            if (labels[i] == RegionLabel::unknown) {
                auto [left, right] = batch[i].region.split();
                Rational half = batch[i].volume / 2;
                worklist.insert({std::move(left), half});
                worklist.insert({std::move(right), half});
            } else {
                decided += batch[i].volume;
                labeled.push_back({batch[i].region, labels[i]});
            }
            if (result.refinement_budget_used >= options.max_regions) {
                budget_exhausted = true;
            }
        }
    }

    for (auto const& entry : worklist) {
        labeled.push_back({entry.region, RegionLabel::unknown});
    }
    std::sort(labeled.begin(), labeled.end(), [](LabeledRegion const& a, LabeledRegion const& b) {
        return Region::compare(a.region, b.region) < 0;
    });
    result.regions = std::move(labeled);
    result.coverage_achieved = decided / total;
    result.partial = result.coverage_achieved < options.coverage;
    return result;
}

std::vector<std::size_t> assignment_variables(Assignment const& a) {
    std::vector<std::size_t> out;
    out.reserve(a.size());
    for (auto const& [var, val] : a.pairs()) {
        out.push_back(var);
    }
    return out;
}

struct PairTargets {
    // Chains are shared pointers so the verify closure can outlive this frame.
    std::shared_ptr<Pmc> chain_t;
    std::shared_ptr<Pmc> chain_g;  // equal to chain_t unless the query compares evidences
    std::vector<bool> target_t;
    std::vector<bool> target_g;
    bool same_target = false;
};

PairTargets build_pair_targets(Pbn const& bn, Query const& q) {
    auto order = topological_order(bn);
    PairTargets out;
    if (!q.alternative) {
        throw Error("ratio/difference query without an alternative valuation");
    }
    if (q.alternative_on_evidence) {
        out.chain_t = std::make_shared<Pmc>(
            build_evidence_pmc(bn, order, q.evidence, assignment_variables(q.hypothesis)));
        out.chain_g = std::make_shared<Pmc>(
            build_evidence_pmc(bn, order, *q.alternative, assignment_variables(q.hypothesis)));
        out.target_t = final_states_satisfying(*out.chain_t, to_named_pairs(q.hypothesis, bn));
        out.target_g = final_states_satisfying(*out.chain_g, to_named_pairs(q.hypothesis, bn));
    } else {
        out.chain_t = std::make_shared<Pmc>(
            build_evidence_pmc(bn, order, q.evidence, assignment_variables(q.hypothesis)));
        out.chain_g = out.chain_t;
        out.target_t = final_states_satisfying(*out.chain_t, to_named_pairs(q.hypothesis, bn));
        out.target_g = final_states_satisfying(*out.chain_g, to_named_pairs(*q.alternative, bn));
        out.same_target = out.target_t == out.target_g;
    }
    return out;
}

}  // namespace

RegionLabel verify_region(Pmc const& pmc, Cmp cmp, Rational const& threshold, Region const& region,
                          std::vector<bool> const& target) {
    auto bounds = lift_bound_pair(pmc, region, target);
    double lambda = to_double(threshold);
    MarginInterval margin{widen_low(bounds.lower) - lambda, widen_high(bounds.upper) - lambda};
    return label_from_margin(margin, cmp);
}

RegionPartition partition_pmc(Pmc const& pmc, Cmp cmp, Rational const& threshold,
                              std::vector<bool> const& target, Region const& box,
                              PartitionOptions const& options) {
    Query constraint;
    constraint.kind = QueryKind::probability;
    constraint.cmp = cmp;
    constraint.threshold = threshold;
    auto verify = [&pmc, cmp, threshold, &target](Region const& region) {
        return verify_region(pmc, cmp, threshold, region, target);
    };
    return partition_engine(verify, box, options, std::move(constraint));
}

RegionPartition partition(Pbn const& bn, Query const& q, Region const& box, PartitionOptions const& options) {
    if (q.kind != QueryKind::probability) {
        throw Error("partition expects a probability query");
    }
    auto order = topological_order(bn);
    auto chain = std::make_shared<Pmc>(build_evidence_pmc(bn, order, q.evidence, assignment_variables(q.hypothesis)));
    auto target = final_states_satisfying(*chain, to_named_pairs(q.hypothesis, bn));
    auto verify = [chain, cmp = q.cmp, threshold = q.threshold, target](Region const& region) {
        return verify_region(*chain, cmp, threshold, region, target);
    };
    return partition_engine(verify, box, options, q);
}

namespace {

RegionPartition pair_partition(Pbn const& bn, Query const& q, Region const& box, PartitionOptions const& options,
                               bool ratio) {
    auto data = std::make_shared<PairTargets>(build_pair_targets(bn, q));
    double q_value = to_double(q.threshold);
    auto verify = [data, q_value, ratio, cmp = q.cmp](Region const& region) {
        MarginInterval margin;
        if (data->same_target) {
            auto b = lift_bound_pair(*data->chain_t, region, data->target_t);
            double lo = widen_low(b.lower);
            double hi = widen_high(b.upper);
            if (ratio) {
                double factor = 1.0 - q_value;
                margin = factor >= 0 ? MarginInterval{factor * lo, factor * hi}
                                     : MarginInterval{factor * hi, factor * lo};
            } else {
                margin = {-q_value, -q_value};
            }
            return label_from_margin(margin, cmp);
        }
        auto bt = lift_bound_pair(*data->chain_t, region, data->target_t);
        auto bg = lift_bound_pair(*data->chain_g, region, data->target_g);
        double lo_t = widen_low(bt.lower);
        double hi_t = widen_high(bt.upper);
        double lo_g = widen_low(bg.lower);
        double hi_g = widen_high(bg.upper);
        if (ratio) {
            margin = {lo_t - q_value * hi_g, hi_t - q_value * lo_g};
        } else {
            margin = {lo_t - hi_g - q_value, hi_t - lo_g - q_value};
        }
        return label_from_margin(margin, cmp);
    };
    return partition_engine(verify, box, options, q);
}

}  // namespace

RegionPartition ratio_partition(Pbn const& bn, Query const& q, Region const& box, PartitionOptions const& options) {
    if (q.kind != QueryKind::ratio) {
        throw Error("ratio_partition expects a ratio query");
    }
    if (q.threshold < 0) {
        throw Error("ratio thresholds must be nonnegative");
    }
    return pair_partition(bn, q, box, options, true);
}

RegionPartition difference_partition(Pbn const& bn, Query const& q, Region const& box,
                                     PartitionOptions const& options) {
    if (q.kind != QueryKind::difference) {
        throw Error("difference_partition expects a difference query");
    }
    return pair_partition(bn, q, box, options, false);
}

}  // namespace pbnsynth
