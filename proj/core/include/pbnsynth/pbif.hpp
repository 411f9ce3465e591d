#pragma once

#include <string>
#include <string_view>

#include "pbnsynth/bn.hpp"

namespace pbnsynth {

/// Parses the .pbif model format, a strict superset of BIF: an optional
/// `parameters { p in [lo, hi]; ... }` block turns CPT entries into
/// polynomial expressions over the declared parameters. Plain BIF files
/// parse as networks with an empty parameter set. The grammar is documented
/// in docs/pbif.md.
Pbn parse_pbif(std::string_view text);

/// Canonical text form; parse_pbif(render_pbif(bn)) reproduces bn.
std::string render_pbif(Pbn const& bn, std::string_view network_name = "network");

/// Query grammar:
///   P( A [| B] ) CMP q
///   RATIO( A : A' [| B] ) CMP q
///   DIFF( A - A' [| B] ) CMP q
/// with A, A', B comma-separated Var=value lists and CMP one of < <= > >=.
Query parse_query(std::string_view text, Pbn const& bn);

/// Expression parser used for CPT entries and for reading back exported
/// chains; '^' powers are only accepted when allow_pow is set.
Polynomial parse_polynomial(std::string_view text, ParamSetPtr const& params, bool allow_pow);

}  // namespace pbnsynth
