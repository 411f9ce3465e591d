#pragma once

#include <iosfwd>
#include <string>

#include "pbnsynth/pmc.hpp"

namespace pbnsynth {

/// Deterministic text export of a parametric chain: a parameter header with
/// names and bounds, then one block per state in construction order with one
/// "  -> <id> : <function>" line per transition. Documented in
/// docs/formats.md.
void write_explicit_pmc(Pmc const& pmc, std::ostream& sink);

std::string explicit_pmc_text(Pmc const& pmc);

/// Reads the format back; states, labels and transition functions are
/// reconstructed exactly.
Pmc read_explicit_pmc(std::istream& source);

Pmc read_explicit_pmc(std::string const& text);

}  // namespace pbnsynth
