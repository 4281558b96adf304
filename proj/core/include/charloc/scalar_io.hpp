#pragma once

#include <string>

#include "charloc/padic.hpp"

namespace charloc {

/**
 * Scalar literal grammar (CLI and JSON):
 *
 *   literal  := 'O(p^' int ')'                      approximate zero
 *             | mantissa shift?
 *             | '[' literal (',' literal)* ']'      tower coordinates
 *   mantissa := sign? digits ('/' digits)?          denominator may carry p
 *   shift    := '*' 'p' '^' sign? digits
 *
 * The unicode minus sign is accepted for '-'.  Rendering is canonical:
 * parse(render(v)) agrees with v at v's precision.
 */
Scalar parse_scalar(const std::string& text, const FieldPtr& F);

/// Exact rational value of a non-bracketed literal (mantissa * p^shift).
Rational parse_scalar_rational(const std::string& text, long p);

std::string render_scalar(const Scalar& z);

} // namespace charloc
