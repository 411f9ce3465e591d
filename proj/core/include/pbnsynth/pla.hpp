#pragma once

#include <cstddef>
#include <vector>

#include "pbnsynth/bn.hpp"
#include "pbnsynth/pmc.hpp"

namespace pbnsynth {

enum class Objective { minimize, maximize };

enum class RegionLabel { accepting, rejecting, unknown };

std::string region_label_str(RegionLabel label);

struct BoundPair {
    double lower = 0.0;
    double upper = 1.0;
};

/// Decision slack: verification decisions inflate/deflate lifted bounds by
/// this amount so labels stay sound under the value-iteration tolerance.
inline constexpr double kLiftPrecision = 1e-8;

struct LiftOutcome {
    double value = 0.0;
    bool cap_hit = false;  // sweep cap reached; the value was widened to stay sound
};

/// Sound reachability bound over a region: the chain is relaxed into a
/// decision process with one action per vertex of the region restricted to
/// the parameters of each state's outgoing row, then solved by value
/// iteration (sweep cap 10^6). minimize-results lower-bound and
/// maximize-results upper-bound Pr(reach target) for every point of the
/// region. Requires multi-affine polynomial transitions.
LiftOutcome lift_bounds(Pmc const& pmc, Region const& region, std::vector<bool> const& target,
                        Objective objective);

BoundPair lift_bound_pair(Pmc const& pmc, Region const& region, std::vector<bool> const& target);

/// True iff every CPT entry evaluates into [0,1] on all region vertices;
/// multi-affinity makes the vertex check conclusive for the whole box.
/// Throws on non-multi-affine entries.
bool region_wellformed(Pbn const& bn, Region const& region);

/// Labels a region against Pr(reach target) cmp threshold, with bounds
/// widened by kLiftPrecision; strict comparisons leave boundary-touching
/// regions unknown.
RegionLabel verify_region(Pmc const& pmc, Cmp cmp, Rational const& threshold, Region const& region,
                          std::vector<bool> const& target);

struct LabeledRegion {
    Region region;
    RegionLabel label;
};

struct RegionPartition {
    Query constraint;
    std::vector<LabeledRegion> regions;  // interior-disjoint cover of the box, canonically sorted
    Rational coverage_achieved = 0;      // accepting+rejecting volume fraction
    std::size_t refinement_budget_used = 0;
    bool partial = false;                // budget exhausted below the requested coverage
};

struct PartitionOptions {
    Rational coverage = Rational(99, 100);
    std::size_t max_regions = 1000000;
    unsigned threads = 1;
};

/// Approximate synthesis for a probability query on the evidence-tailored
/// chain: worklist refinement, largest region first, until the requested
/// coverage or the region budget is reached.
RegionPartition partition(Pbn const& bn, Query const& q, Region const& box, PartitionOptions const& options);

/// Ratio variant: accepting iff LB_T >= q * UB_G, rejecting iff
/// UB_T < q * LB_G (both after slack widening), else split.
RegionPartition ratio_partition(Pbn const& bn, Query const& q, Region const& box, PartitionOptions const& options);

/// Difference variant with q + bound in place of the product.
RegionPartition difference_partition(Pbn const& bn, Query const& q, Region const& box,
                                     PartitionOptions const& options);

/// Partition against a raw chain-level constraint; the building block the
/// query-level entry points share.
RegionPartition partition_pmc(Pmc const& pmc, Cmp cmp, Rational const& threshold,
                              std::vector<bool> const& target, Region const& box,
                              PartitionOptions const& options);

}  // namespace pbnsynth
