#include "pbnsynth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pbnsynth/errors.hpp"
#include "pbnsynth/pmc.hpp"

namespace pbnsynth {

namespace {

/// The exact rational functions behind a query constraint, built once and
/// evaluated per candidate point.
class ConstraintEvaluator {
public:
    ConstraintEvaluator(Pbn const& bn, Query const& q) : bn_(bn), q_(q) {
        if (q.kind == QueryKind::probability) {
            lhs_.push_back(conditional_probability_function(bn, q.hypothesis, q.evidence, QueryMode::evidence_tailored));
        } else if (!q.alternative) {
            throw Error("ratio/difference query without an alternative valuation");
        } else if (q.alternative_on_evidence) {
            lhs_.push_back(conditional_probability_function(bn, q.hypothesis, q.evidence, QueryMode::evidence_tailored));
            lhs_.push_back(
                conditional_probability_function(bn, q.hypothesis, *q.alternative, QueryMode::evidence_tailored));
        } else {
            lhs_.push_back(conditional_probability_function(bn, q.hypothesis, q.evidence, QueryMode::evidence_tailored));
            lhs_.push_back(
                conditional_probability_function(bn, *q.alternative, q.evidence, QueryMode::evidence_tailored));
        }
    }

    /// Exact constraint left-hand side; for ratio queries the product-form
    /// margin fT - q*fG (compared against zero).
    Rational lhs(Instantiation const& u) const {
        switch (q_.kind) {
            case QueryKind::probability:
                return lhs_[0].evaluate(u);
            case QueryKind::ratio:
                return lhs_[0].evaluate(u) - q_.threshold * lhs_[1].evaluate(u);
            case QueryKind::difference:
                return lhs_[0].evaluate(u) - lhs_[1].evaluate(u);
        }
        throw Error("unreachable");
    }

    Rational rhs() const {
        return q_.kind == QueryKind::ratio ? Rational(0) : q_.threshold;
    }

    bool satisfied(Rational const& lhs_value) const { return cmp_holds(lhs_value, q_.cmp, rhs()); }

    /// Signed margin, nonnegative iff the non-strict reading holds; nullopt
    /// when u is outside the well-formed set or at a pole.
    std::optional<Rational> margin(Instantiation const& u) const {
        try {
            instantiate(bn_, u);
            Rational value = lhs(u) - rhs();
            if (q_.cmp == Cmp::lt || q_.cmp == Cmp::le) {
                value = -value;
            }
            return value;
        } catch (IllFormedError const&) {
            return std::nullopt;
        } catch (EvalError const&) {
            return std::nullopt;
        }
    }

    Certificate certificate(Instantiation const& u) const {
        Certificate cert;
        cert.lhs = lhs(u);
        cert.cmp = q_.cmp;
        cert.threshold = rhs();
        cert.satisfied = satisfied(cert.lhs);
        return cert;
    }

private:
    Pbn const& bn_;
    Query const& q_;
    std::vector<RationalFunction> lhs_;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

Instantiation clamp_to_bounds(ParamSetPtr const& params, std::vector<double> const& position) {
    std::vector<Rational> values;
    values.reserve(position.size());
    for (std::size_t i = 0; i < position.size(); ++i) {
        Rational v(position[i]);
        v.canonicalize();
        auto const& p = params->at(i);
        if (v < p.lower) {
            v = p.lower;
        } else if (v > p.upper) {
            v = p.upper;
        }
        values.push_back(std::move(v));
    }
    return Instantiation(params, std::move(values));
}

}  // namespace

Certificate certify(Pbn const& bn, Query const& q, Instantiation const& u) {
    return ConstraintEvaluator(bn, q).certificate(u);
}

std::optional<TuningResult> feasibility_pso(Pbn const& bn, Query const& q, PsoConfig const& cfg) {
    if (cfg.swarm_size < 2) {
        throw Error("swarm size must be at least 2");
    }
    ConstraintEvaluator evaluator(bn, q);
    auto params = bn.parameter_set();
    std::size_t dims = params->size();
    if (dims == 0) {
        Instantiation u(params, {});
        Certificate cert = evaluator.certificate(u);
        if (!cert.satisfied) {
            return std::nullopt;
        }
        return TuningResult{u, cert.lhs, 0.0, cert};
    }

    std::vector<double> lows(dims), highs(dims);
    for (std::size_t i = 0; i < dims; ++i) {
        lows[i] = to_double(params->at(i).lower);
        highs[i] = to_double(params->at(i).upper);
    }

    struct Particle {
        std::mt19937_64 rng;
        std::vector<double> position;
        std::vector<double> velocity;
        std::vector<double> best_position;
        double best_margin = -std::numeric_limits<double>::infinity();
    };

    auto uniform_position = [&](Particle& particle) {
        for (std::size_t i = 0; i < dims; ++i) {
            std::uniform_real_distribution<double> dist(lows[i], highs[i]);
            particle.position[i] = dist(particle.rng);
        }
        std::fill(particle.velocity.begin(), particle.velocity.end(), 0.0);
    };

    // Evaluates the particle's position, resampling ill-formed points.
    auto evaluate = [&](Particle& particle) -> std::optional<std::pair<Instantiation, Rational>> {
        for (int attempt = 0; attempt < 100; ++attempt) {
            Instantiation u = clamp_to_bounds(params, particle.position);
            auto margin = evaluator.margin(u);
            if (margin) {
                return std::make_pair(std::move(u), std::move(*margin));
            }
            uniform_position(particle);
        }
        return std::nullopt;
    };

    std::vector<Particle> swarm(cfg.swarm_size);
    for (std::size_t i = 0; i < swarm.size(); ++i) {
        swarm[i].rng.seed(splitmix64(cfg.seed + 0x1000 + i));
        swarm[i].position.resize(dims);
        swarm[i].velocity.assign(dims, 0.0);
        uniform_position(swarm[i]);
        swarm[i].best_position = swarm[i].position;
    }

    std::vector<double> global_best_position = swarm[0].position;
    double global_best_margin = -std::numeric_limits<double>::infinity();

    auto strict = q.cmp == Cmp::lt || q.cmp == Cmp::gt;
    auto check = [&](Instantiation const& u, Rational const& margin) -> std::optional<TuningResult> {
        bool ok = strict ? margin > 0 : margin >= 0;
        if (!ok) {
            return std::nullopt;
        }
        Certificate cert = evaluator.certificate(u);
        if (!cert.satisfied) {
            return std::nullopt;
        }
        return TuningResult{u, cert.lhs, 0.0, cert};
    };

    auto absorb = [&](Particle& particle, double margin) {
        if (margin > particle.best_margin) {
            particle.best_margin = margin;
            particle.best_position = particle.position;
        }
        if (margin > global_best_margin) {
            global_best_margin = margin;
            global_best_position = particle.position;
        }
    };

    for (auto& particle : swarm) {
        auto evaluated = evaluate(particle);
        if (!evaluated) {
            continue;
        }
        if (auto hit = check(evaluated->first, evaluated->second)) {
            return hit;
        }
        absorb(particle, to_double(evaluated->second));
    }

    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        for (auto& particle : swarm) {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (std::size_t i = 0; i < dims; ++i) {
                double r1 = unit(particle.rng);
                double r2 = unit(particle.rng);
                particle.velocity[i] = cfg.inertia * particle.velocity[i] +
                                       cfg.cognitive * r1 * (particle.best_position[i] - particle.position[i]) +
                                       cfg.social * r2 * (global_best_position[i] - particle.position[i]);
                particle.position[i] =
                    std::clamp(particle.position[i] + particle.velocity[i], lows[i], highs[i]);
            }
            auto evaluated = evaluate(particle);
            if (!evaluated) {
                continue;
            }
            if (auto hit = check(evaluated->first, evaluated->second)) {
                return hit;
            }
            absorb(particle, to_double(evaluated->second));
        }
    }
    return std::nullopt;
}

namespace {

std::optional<TuningResult> pick_from_partition(RegionPartition const& parts,
                                                ConstraintEvaluator const& evaluator) {
    for (auto const& labeled : parts.regions) {
        if (labeled.label != RegionLabel::accepting) {
            continue;
        }
        Instantiation center = labeled.region.center();
        Certificate cert = evaluator.certificate(center);
        if (cert.satisfied) {
            return TuningResult{center, cert.lhs, 0.0, cert};
        }
    }
    return std::nullopt;
}

RegionPartition partition_for_kind(Pbn const& bn, Query const& q, Region const& box,
                                   PartitionOptions const& options) {
    switch (q.kind) {
        case QueryKind::probability: return partition(bn, q, box, options);
        case QueryKind::ratio: return ratio_partition(bn, q, box, options);
        case QueryKind::difference: return difference_partition(bn, q, box, options);
    }
    throw Error("unreachable");
}

}  // namespace

std::optional<TuningResult> simple_tuning(Pbn const& bn, Query const& q, PsoConfig const& cfg) {
    if (auto found = feasibility_pso(bn, q, cfg)) {
        return found;
    }
    if (bn.parameter_set()->empty()) {
        return std::nullopt;
    }
    PartitionOptions options;
    options.coverage = Rational(9, 10);
    auto parts = partition_for_kind(bn, q, Region::full_space(bn.parameter_set()), options);
    ConstraintEvaluator evaluator(bn, q);
    return pick_from_partition(parts, evaluator);
}

double cd_distance(Pbn const& bn, Instantiation const& u, Instantiation const& u0) {
    auto joint_new = joint_distribution(instantiate(bn, u));
    auto joint_old = joint_distribution(instantiate(bn, u0));
    bool any = false;
    Rational max_ratio;
    Rational min_ratio;
    bool max_inf = false;
    bool min_zero = false;
    for (std::size_t i = 0; i < joint_new.size(); ++i) {
        Rational const& pn = joint_new[i];
        Rational const& po = joint_old[i];
        Rational ratio;
        if (po == 0 && pn == 0) {
            ratio = 1;
        } else if (po == 0) {
            max_inf = true;
            continue;
        } else if (pn == 0) {
            min_zero = true;
            continue;
        } else {
            ratio = pn / po;
        }
        if (!any) {
            max_ratio = min_ratio = ratio;
            any = true;
        } else {
            if (ratio > max_ratio) {
                max_ratio = ratio;
            }
            if (ratio < min_ratio) {
                min_ratio = ratio;
            }
        }
    }
    if (max_inf || min_zero) {
        return std::numeric_limits<double>::infinity();
    }
    if (!any) {
        return 0.0;
    }
    return std::log(to_double(max_ratio)) - std::log(to_double(min_ratio));
}

namespace {

void grid_candidates(Region const& region, Rational const& step, std::vector<Instantiation>& out) {
    std::size_t dims = region.dimension();
    std::vector<std::vector<Rational>> axis(dims);
    std::size_t total = 1;
    for (std::size_t i = 0; i < dims; ++i) {
        Rational v = region.interval(i).lo;
        while (v < region.interval(i).hi) {
            axis[i].push_back(v);
            v += step;
        }
        axis[i].push_back(region.interval(i).hi);
        total *= axis[i].size();
        if (total > 200000) {
            // Too fine for this box; fall back to its center.
            out.push_back(region.center());
            return;
        }
    }
    std::vector<std::size_t> idx(dims, 0);
    for (std::size_t count = 0; count < total; ++count) {
        std::vector<Rational> values;
        values.reserve(dims);
        for (std::size_t i = 0; i < dims; ++i) {
            values.push_back(axis[i][idx[i]]);
        }
        out.emplace_back(region.parameter_set(), std::move(values));
        for (std::size_t i = dims; i-- > 0;) {
            if (++idx[i] < axis[i].size()) {
                break;
            }
            idx[i] = 0;
        }
    }
}

}  // namespace

std::optional<TuningResult> minimal_change_tuning(Pbn const& bn, Query const& q, Instantiation const& u0,
                                                  MinimalChangeOptions const& options) {
    auto params = bn.parameter_set();
    if (params->empty()) {
        throw Error("minimal-change tuning needs at least one parameter");
    }
    PartitionOptions popts;
    popts.coverage = options.coverage;
    popts.max_regions = options.max_regions;
    popts.threads = options.threads;
    auto parts = partition_for_kind(bn, q, Region::full_space(params), popts);
    ConstraintEvaluator evaluator(bn, q);

    std::optional<TuningResult> best;
    if (options.metric == TuningMetric::euclidean_params) {
        Rational best_sq;
        for (auto const& labeled : parts.regions) {
            if (labeled.label != RegionLabel::accepting) {
                continue;
            }
            std::vector<Rational> clamped;
            clamped.reserve(params->size());
            Rational sq = 0;
            for (std::size_t i = 0; i < params->size(); ++i) {
                Rational v = u0.value(i);
                auto const& iv = labeled.region.interval(i);
                if (v < iv.lo) {
                    v = iv.lo;
                } else if (v > iv.hi) {
                    v = iv.hi;
                }
                Rational d = v - u0.value(i);
                sq += d * d;
                clamped.push_back(std::move(v));
            }
            if (best && sq >= best_sq) {
                continue;
            }
            Instantiation candidate(params, std::move(clamped));
            Certificate cert = evaluator.certificate(candidate);
            if (!cert.satisfied) {
                continue;
            }
            best_sq = sq;
            best = TuningResult{candidate, cert.lhs, std::sqrt(to_double(sq)), cert};
        }
        return best;
    }

    // CD metric: scan accepting boxes on a 1e-2 lattice plus their centers.
    Rational step(1, 100);
    double best_cd = std::numeric_limits<double>::infinity();
    for (auto const& labeled : parts.regions) {
        if (labeled.label != RegionLabel::accepting) {
            continue;
        }
        std::vector<Instantiation> candidates;
        grid_candidates(labeled.region, step, candidates);
        candidates.push_back(labeled.region.center());
        for (auto const& candidate : candidates) {
            double d = cd_distance(bn, candidate, u0);
            if (d < best_cd) {
                Certificate cert = evaluator.certificate(candidate);
                if (!cert.satisfied) {
                    continue;
                }
                best_cd = d;
                best = TuningResult{candidate, cert.lhs, d, cert};
            }
        }
    }
    return best;
}

}  // namespace pbnsynth
