#pragma once

#include <vector>

#include "pbnsynth/bn.hpp"
#include "pbnsynth/pmc.hpp"

namespace pbnsynth {

/// Variables assigned before level j (1-based position in the order) that
/// still have an unprocessed child after j, i.e. whose values the chain has
/// to remember.
std::vector<std::size_t> open_set(Pbn const& bn, std::vector<std::size_t> const& order, std::size_t level);

/// Level-by-level chain of the network: level j reveals variable j together
/// with the open variables; final states are absorbing. States are created
/// by forward search, so everything stored is reachable.
Pmc build_pmc(Pbn const& bn, std::vector<std::size_t> const& order);

/// Evidence-tailored chain: transitions into evidence-violating states are
/// redirected to the initial state (one aggregated restart edge per source),
/// non-evidence variables before the last evidence level stay open until it,
/// and every keep_open variable stays open through the final level so the
/// absorbing states carry its value.
Pmc build_evidence_pmc(Pbn const& bn, std::vector<std::size_t> const& order, Assignment const& evidence,
                       std::vector<std::size_t> const& keep_open = {});

}  // namespace pbnsynth
