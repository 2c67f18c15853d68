// Exact rational arithmetic used for every time value and score in mv2h.

#ifndef MV2H_RATIONAL_H
#define MV2H_RATIONAL_H

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace mv2h {

/// Arbitrary-precision rational. Always kept in canonical form.
using Rational = mpq_class;

/// A point on a score timeline. One quarter note is 1000 units in scores
/// converted from notated formats; remapped scores use the ground truth's units.
using Time = Rational;

/// @brief Build the canonical rational num/den.
/// @throws std::invalid_argument if den is zero.
Rational makeRational(std::int64_t num, std::int64_t den = 1);

/// @brief Parse "p/q", an integer, or a finite decimal ("0.6") into an exact rational.
/// @throws std::invalid_argument on malformed input or a zero denominator.
Rational parseRational(std::string_view text);

/// Absolute value.
Rational abs(const Rational& value);

/// "p" for integers, "p/q" otherwise.
std::string formatExact(const Rational& value);

/// Fixed-point decimal rounded half away from zero, e.g. formatDecimal(19/40, 4) == "0.4750".
std::string formatDecimal(const Rational& value, int places);

/// Nearest double; for display and JSON only.
double toDouble(const Rational& value);

}  // namespace mv2h

#endif  // MV2H_RATIONAL_H
