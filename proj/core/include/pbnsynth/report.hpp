#pragma once

#include <string>

#include "pbnsynth/pla.hpp"
#include "pbnsynth/synth.hpp"

namespace pbnsynth {

/// Partition as JSON: {constraint, coverage_requested, coverage_achieved,
/// partial, regions:[{bounds:{param:[lo,hi]}, label}]}. Bounds and coverages
/// are exact fraction strings; byte-stable across runs and thread counts.
std::string partition_to_json(RegionPartition const& partition, Pbn const& bn, Rational const& coverage_requested);

/// SVG 1.1 picture of a 1- or 2-parameter partition: accepting green,
/// rejecting red, unknown white, axes labeled with the parameter names.
std::string partition_to_svg(RegionPartition const& partition, Pbn const& bn);

std::string function_to_json(RationalFunction const& f, Pbn const& bn, std::string const& query_text);

std::string tuning_to_json(TuningResult const& result, Pbn const& bn, std::string const& query_text);

std::string infeasible_json(std::string const& query_text);

}  // namespace pbnsynth
