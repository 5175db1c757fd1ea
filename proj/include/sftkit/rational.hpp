#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace sft {

/// Exact rational with arbitrary-precision numerator and denominator.
using Rational = mpq_class;

/// Parses "7", "-3/4" or "6/8" (normalized on return). Throws SemanticError.
Rational parse_rational(std::string_view text);

/// "3/4", "-2", "0". Canonical: reduced, positive denominator.
std::string format_rational(const Rational& value);

}  // namespace sft
