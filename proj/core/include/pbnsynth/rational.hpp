#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pbnsynth {

/// Exact arbitrary-precision rational. All model arithmetic stays exact;
/// conversion to double happens only at output boundaries.
using Rational = mpq_class;

/// Parses "3", "-1/2", "0.893" (decimals become exact fractions, 893/1000).
Rational rational_from_string(std::string_view text);

/// Canonical text form: "a" or "a/b" with b > 0.
std::string rational_str(Rational const& r);

double to_double(Rational const& r);

Rational rational_abs(Rational const& r);

}  // namespace pbnsynth
