#pragma once

#include "charloc/matrix.hpp"

namespace charloc {

/// Root alpha_{ij} of gl_n (i != j, 0-based); the root vector is E_ij.
struct Root {
    int i, j;
    Root negated() const { return Root{j, i}; }
    bool operator==(const Root&) const = default;
};

std::vector<Root> gl_roots(int n);

Matrix root_vector(const FieldPtr& F, int n, Root b);                    // E_b
Matrix coroot_element(const FieldPtr& F, int n, Root b);                 // H_b = E_ii - E_jj
Matrix one_param(const FieldPtr& F, int n, Root b, const Scalar& lam);   // e_b(lam) = I + lam E_b

/// Closed form of Ad(e_b(lam)) E_c for type A: E_b when c = b;
/// E_c + lam H_b - lam^2 E_b when c = -b; E_c + (sign) lam E_{b+c} when the
/// sum is a root; E_c otherwise.  Matches direct conjugation exactly.
Matrix chevalley_ad_root(const FieldPtr& F, int n, Root b, const Scalar& lam, Root c);

/// Closed form of Ad(e_b(lam)) H = H - db(H) lam E_b for diagonal H.
Matrix chevalley_ad_cartan(const FieldPtr& F, int n, Root b, const Scalar& lam,
                           const std::vector<Scalar>& h);

/// Closed form of Ad(t) E_c = c(t) E_c for diagonal t.
Matrix torus_ad_root(const FieldPtr& F, int n, const std::vector<Scalar>& t, Root c);

} // namespace charloc
