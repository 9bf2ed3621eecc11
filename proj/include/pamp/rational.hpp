#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace pamp
{

// All time values in the library are exact GMP rationals.
using Rational = mpq_class;

/// Canonical "p/q" rendering (integers render as "n/1").
std::string to_fraction_string(const Rational& q);

/// Short human rendering: "45", "-1/2".
std::string to_display_string(const Rational& q);

/// Accepts "p/q", integer literals and plain decimals ("2.5", "-0.75").
/// Returns nullopt on anything else, including a zero denominator.
std::optional<Rational> parse_rational(std::string_view text);

Rational midpoint(const Rational& a, const Rational& b);

} // namespace pamp
