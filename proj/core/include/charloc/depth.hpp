#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "charloc/torus.hpp"

namespace charloc {

/// Explicit splitting-field hint: unramified degree and Eisenstein
/// coefficients, for tori the automatic search cannot resolve.
struct ExtensionHint {
    int f = 1;
    std::vector<std::vector<Rational>> eisenstein; // a_0..a_{e-1}
};

struct Certificates {
    bool regular = false;
    bool compact = false;
};

/// Regularity via the discriminant of the characteristic polynomial (zero at
/// precision means the eigenvalue ratios collapse at precision); compactness
/// for GL_n via integral characteristic polynomial with unit determinant,
/// for SL_n via integrality.
Certificates certify(const GroupSpec& G, const Matrix& gamma);

/**
 * Eigen-data of a regular semisimple gamma.  Factors the characteristic
 * polynomial over k, then over unramified extensions and tame Eisenstein
 * candidates in increasing degree until it splits; an explicit hint
 * short-circuits the search.  Rejects wild tori (Newton-polygon slope
 * denominators divisible by p).
 */
TorusData torus_of(const GroupSpec& G, const Matrix& gamma, const std::optional<ExtensionHint>& hint = {});

/// s_alpha(gamma) = nu(lambda_i/lambda_j - 1) for the root alpha_{ij}.
Rational s_alpha(const TorusData& T, int i, int j);
/// s(gamma) = max over all roots; finite for regular gamma.
Rational s_gamma(const TorusData& T);

/// nu(D_{G/T}(t)) = sum over roots of nu(alpha(t) - 1).
Rational weyl_discriminant_valuation(const TorusData& T, const Matrix& t);

struct RegularDepthReport {
    std::map<std::pair<int, int>, Rational> s_alpha; // 1-based index pairs
    Rational s_gamma;
    bool regular = false;
    bool compact = false;
    FieldPtr splitting;
    bool split_over_k = false;
    Rational disc_valuation;
};

RegularDepthReport regular_depth_report(const GroupSpec& G, const Matrix& gamma,
                                        const std::optional<ExtensionHint>& hint = {});

struct ConstancyRadius {
    Rational rho_pi;
    Rational s;
    Depth radius; // max{s, rho_pi} + s, with plus
};

/// Requires gamma regular, compact and tame.
ConstancyRadius constancy_radius(const GroupSpec& G, const TorusData& T, const Rational& rho_pi);

/**
 * Machine-checkable descriptor of the constancy neighborhood gamma T_{r+}
 * (up to G-conjugation, which is reported symbolically): a candidate t'
 * passes when t' gamma^{-1} commutes with gamma at precision and lies in
 * T_{r+}.
 */
class NeighborhoodDescriptor {
public:
    NeighborhoodDescriptor(GroupSpec G, TorusData T, ConstancyRadius radius);

    const ConstancyRadius& radius() const { return radius_; }
    /// Membership of a candidate in gamma T_{radius+}.
    bool accepts(const Matrix& candidate) const;
    /// Human-readable eigenvalue congruences nu(mu_i/lambda_i - 1) > r.
    std::vector<std::string> congruences() const;
    std::string coset_description() const;

private:
    GroupSpec G_;
    TorusData T_;
    ConstancyRadius radius_;
};

NeighborhoodDescriptor neighborhood_descriptor(const GroupSpec& G, const TorusData& T, const Rational& rho_pi);

struct DeepnessRow {
    int i, j;          // 1-based root index
    Rational s_before; // s_alpha(gamma)
    Rational s_after;  // s_alpha(gamma gamma')
};

struct DeepnessReport {
    Rational s_before, s_after;
    std::vector<DeepnessRow> table;
    Rational disc_before, disc_after;
    bool compact_after = false;
    bool pass = false;
};

/// Checks s(gamma gamma') = s(gamma) root by root, compactness of the
/// product and preservation of the Weyl discriminant valuation, for
/// gamma' in T_{s(gamma)+}.  A gamma' outside T_{s(gamma)+} is a
/// PreconditionViolated error (a usable negative test).
DeepnessReport check_deepness(const GroupSpec& G, const TorusData& T, const Matrix& gamma_prime);

} // namespace charloc
