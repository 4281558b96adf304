#pragma once

#include <vector>

#include "charloc/matrix.hpp"
#include "charloc/padic.hpp"

namespace charloc {

/// Dense polynomial, coefficients ascending (poly[k] multiplies t^k).
using Poly = std::vector<Scalar>;

Scalar poly_eval(const Poly& f, const Scalar& z);
Poly poly_derivative(const Poly& f);
Poly poly_mul(const Poly& f, const Poly& g);
Poly poly_coerced(const Poly& f, const FieldPtr& F);
/// Divide out the factor (t - root); the remainder must vanish at precision.
Poly poly_deflate(const Poly& f, const Scalar& root);
/// Resultant via the Sylvester determinant.
Scalar poly_resultant(const Poly& f, const Poly& g);
/// disc(f) up to the usual sign: Res(f, f') / lc(f).
Scalar poly_discriminant(const Poly& f);
std::string poly_render(const Poly& f);

/// det(tI - A) by exact cofactor expansion over the polynomial ring.
Poly char_poly(const Matrix& A);

struct HenselFactorization {
    std::vector<Scalar> roots;        // all roots lying in the requested field
    std::vector<Poly> residual;       // root-free cofactor(s)
};

/**
 * Roots of a squarefree polynomial in a tame local field, by Newton-polygon
 * valuation splitting, residue-field root finding and Hensel (Newton)
 * lifting; residue roots of higher multiplicity are separated by recursive
 * substitution x -> x0 + pi z.
 *
 * The product of (t - root) over the returned roots times the residual
 * cofactor reproduces the input to precision.
 */
HenselFactorization hensel_factor(const Poly& poly, const FieldPtr& field);

} // namespace charloc
