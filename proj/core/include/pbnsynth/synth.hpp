#pragma once

#include <cstdint>
#include <optional>

#include "pbnsynth/bn.hpp"
#include "pbnsynth/pla.hpp"

namespace pbnsynth {

struct PsoConfig {
    std::size_t swarm_size = 40;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    std::size_t max_iters = 1000;
    std::uint64_t seed = 0;
};

/// Exact re-evaluation of the constraint at the returned point, independent
/// of whatever the search did internally.
struct Certificate {
    Rational lhs;          // probability, ratio margin or difference, exact
    Cmp cmp = Cmp::le;
    Rational threshold;
    bool satisfied = false;
};

struct TuningResult {
    Instantiation instantiation;
    Rational achieved_value;  // exact constraint left-hand side at the point
    double distance = 0.0;    // populated by minimal-change tuning
    Certificate certificate;
};

/// Particle swarm search for one instantiation satisfying the query.
/// Deterministic for a fixed seed: every particle owns an RNG stream split
/// from it. Positions outside the well-formed set are resampled uniformly.
std::optional<TuningResult> feasibility_pso(Pbn const& bn, Query const& q, PsoConfig const& cfg = {});

/// PSO first; on failure a coverage-0.9 partition, returning the center of
/// an accepting region.
std::optional<TuningResult> simple_tuning(Pbn const& bn, Query const& q, PsoConfig const& cfg = {});

/// CD distance between the joint distributions of bn[u] and bn[u0]:
/// ln max_w ratio - ln min_w ratio with 0/0 := 1 and x/0 := infinity.
/// Shares the joint-enumeration guard of the oracle.
double cd_distance(Pbn const& bn, Instantiation const& u, Instantiation const& u0);

enum class TuningMetric { euclidean_params, cd };

struct MinimalChangeOptions {
    TuningMetric metric = TuningMetric::euclidean_params;
    Rational coverage = Rational(99, 100);
    std::size_t max_regions = 1000000;
    unsigned threads = 1;
};

/// Partitions the parameter space at the requested coverage, then extracts
/// the accepting point closest to u0: per-coordinate clamping for the
/// euclidean metric, a 1e-2 grid scan of accepting boxes for the CD metric.
std::optional<TuningResult> minimal_change_tuning(Pbn const& bn, Query const& q, Instantiation const& u0,
                                                  MinimalChangeOptions const& options = {});

/// Exact constraint left-hand side and certificate at one point.
Certificate certify(Pbn const& bn, Query const& q, Instantiation const& u);

}  // namespace pbnsynth
