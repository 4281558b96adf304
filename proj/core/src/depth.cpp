#include "charloc/depth.hpp"

#include <algorithm>
#include <sstream>

#include "charloc/poly.hpp"

namespace charloc {

namespace {

void require_invertible(const Matrix& gamma) {
    if (gamma.det().is_zero_at_precision())
        fail(ErrorKind::PreconditionViolated, "gamma is not invertible at precision");
}

// Newton-polygon slope denominators of the characteristic polynomial; a
// denominator divisible by p certifies that any splitting field is wildly
// ramified.
void reject_wild_slopes(const Poly& f, long p) {
    std::vector<std::pair<long, Rational>> pts;
    for (size_t i = 0; i < f.size(); ++i) {
        Valuation v = f[i].val();
        if (v.is_finite()) pts.emplace_back((long)i, v.value());
    }
    for (size_t a = 0; a + 1 < pts.size(); ++a) {
        // lower hull not needed for the divisibility test: every hull slope
        // is a difference quotient of two points
        for (size_t b = a + 1; b < pts.size(); ++b) {
            Rational slope = (pts[b].second - pts[a].second) / Rational(pts[b].first - pts[a].first);
            BigInt den = denominator(slope);
            if (den % p == 0) {
                // confirm the slope is on the lower hull before rejecting
                bool on_hull = true;
                for (const auto& q : pts) {
                    Rational line = pts[a].second + slope * Rational(q.first - pts[a].first);
                    if (q.second < line) {
                        on_hull = false;
                        break;
                    }
                }
                if (on_hull)
                    fail(ErrorKind::WildTorus, "eigenvalue valuations need ramification divisible by p");
            }
        }
    }
}

// residue-field unit whose class generates the cyclic group F_{p^f}^x
ResidueElem residue_generator(const LocalField& F) {
    BigInt q = pow_int(F.p(), F.f()) - 1;
    std::vector<BigInt> prime_divisors;
    BigInt m = q;
    for (BigInt d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            prime_divisors.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) prime_divisors.push_back(m);
    for (const auto& cand : F.res_all_elements()) {
        if (cand.is_zero()) continue;
        bool gen = true;
        for (const auto& ell : prime_divisors) {
            if (F.res_pow(cand, q / ell) == F.res_one()) {
                gen = false;
                break;
            }
        }
        if (gen) return cand;
    }
    fail(ErrorKind::Internal, "no generator of the residue units found");
}

std::optional<TorusData> try_split(const GroupSpec& G, const Matrix& gamma, const Poly& charpoly,
                                   const FieldPtr& E) {
    HenselFactorization fac;
    try {
        fac = hensel_factor(charpoly, E);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::PrecisionTooLowToSeparateRoots) return std::nullopt;
        throw;
    }
    if ((int)fac.roots.size() != G.n) return std::nullopt;
    Matrix P(E, G.n, G.n);
    Matrix gE = gamma.coerced_to(E);
    for (int c = 0; c < G.n; ++c) {
        Matrix shifted = gE;
        for (int i = 0; i < G.n; ++i) shifted.set(i, i, gE.at(i, i) - fac.roots[c]);
        std::vector<Scalar> v = kernel_vector(shifted);
        for (int i = 0; i < G.n; ++i) P.set(i, c, v[i]);
    }
    Matrix Pinv = P.inverse();
    // sanity: the conjugated matrix must be diagonal at precision
    Matrix D = Pinv * gE * P;
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j)
            if (i != j && !D.at(i, j).is_zero_at_precision())
                fail(ErrorKind::Internal, "eigenbasis failed to diagonalize gamma");
    return TorusData{gamma, E, fac.roots, P, Pinv, E->is_qp() && G.field->is_qp()};
}

} // namespace

Certificates certify(const GroupSpec& G, const Matrix& gamma) {
    G.validate();
    Poly f = char_poly(gamma);
    Certificates out;
    Scalar disc = poly_discriminant(f);
    out.regular = !disc.is_zero_at_precision();

    bool integral = true;
    for (const auto& c : f) {
        Valuation v = c.val();
        if (v.is_infinite()) continue;
        if (v.is_finite()) {
            if (v.value() < 0) integral = false;
        } else if (v.value() < 0) {
            fail(ErrorKind::AmbiguousAtPrecision, "coefficient integrality undecidable at precision");
        }
    }
    if (G.is_sl()) {
        out.compact = integral;
        return out;
    }
    // det = (-1)^n * constant coefficient
    Valuation dv = f[0].val();
    if (dv.is_infinite()) fail(ErrorKind::PreconditionViolated, "gamma is singular");
    bool det_unit;
    if (dv.is_finite())
        det_unit = dv.value() == 0;
    else if (dv.value() > 0)
        det_unit = false;
    else
        fail(ErrorKind::AmbiguousAtPrecision, "determinant unit test undecidable at precision");
    out.compact = integral && det_unit;
    return out;
}

TorusData torus_of(const GroupSpec& G, const Matrix& gamma, const std::optional<ExtensionHint>& hint) {
    G.validate();
    require_invertible(gamma);
    const FieldPtr& k = G.field;
    Poly f = char_poly(gamma);

    Scalar disc = poly_discriminant(f);
    if (disc.is_zero_at_precision())
        fail(ErrorKind::NotRegular, "repeated eigenvalue at precision (char poly discriminant vanishes)");
    reject_wild_slopes(f, k->p());

    if (hint) {
        FieldPtr E = LocalField::make_extension(k, hint->f, hint->eisenstein);
        auto T = try_split(G, gamma, f, E);
        if (T) return *T;
        fail(ErrorKind::PrecisionTooLowToSeparateRoots,
             "characteristic polynomial does not split over the hinted extension");
    }

    // candidates in increasing total degree: unramified steps and tame
    // Eisenstein twists t^e - p g^m
    struct Cand {
        int f;
        int e;
        long twist;
    };
    std::vector<Cand> cands;
    const int degree_cap = 12;
    for (int ff = 1; ff <= degree_cap; ++ff) {
        for (int e = 1; ff * e <= degree_cap; ++e) {
            if (e % k->p() == 0) continue;
            if (e > G.n && ff > 1) continue; // ramification beyond n never needed for eigenvalues
            if (e > G.n) continue;
            if (e == 1) {
                cands.push_back({ff, 1, 0});
            } else {
                BigInt q = pow_int(k->p(), ff) - 1;
                BigInt g = boost::multiprecision::gcd(BigInt(e), q);
                for (long m = 0; m < (long)g; ++m) cands.push_back({ff, e, m});
            }
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.f * a.e < b.f * b.e;
    });

    for (const Cand& c : cands) {
        FieldPtr E;
        if (c.e == 1) {
            E = c.f == 1 ? k : LocalField::make_extension(k, c.f, {});
        } else {
            // build the twist unit g^m as exact u-coordinates
            FieldPtr U = c.f == 1 ? k : LocalField::make_extension(k, c.f, {});
            ResidueElem gen = residue_generator(*U);
            ResidueElem tw = U->res_pow(gen, BigInt(c.twist));
            std::vector<std::vector<Rational>> eis((size_t)c.e);
            std::vector<Rational> a0(c.f, Rational(0));
            for (int j = 0; j < c.f; ++j) a0[j] = Rational(-k->p()) * Rational(tw.c[j]);
            eis[0] = a0;
            for (int i = 1; i < c.e; ++i) eis[i] = std::vector<Rational>{Rational(0)};
            E = LocalField::make_extension(k, c.f, eis);
        }
        auto T = try_split(G, gamma, f, E);
        if (T) return *T;
    }
    fail(ErrorKind::PrecisionTooLowToSeparateRoots,
         "no tame splitting field found within the search bound; pass an extension hint");
}

Rational s_alpha(const TorusData& T, int i, int j) {
    if (i == j) fail(ErrorKind::MalformedInput, "s_alpha needs i != j");
    Scalar ratio = T.eigenvalues[i] / T.eigenvalues[j];
    Scalar diff = ratio - Scalar::one(T.splitting);
    Valuation v = diff.val();
    if (v.is_finite()) return v.value();
    fail(ErrorKind::NotRegular, "alpha(gamma) = 1 at precision for the root (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
}

Rational s_gamma(const TorusData& T) {
    int n = (int)T.eigenvalues.size();
    Rational best;
    bool seen = false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Rational v = s_alpha(T, i, j);
            if (!seen || v > best) {
                best = v;
                seen = true;
            }
        }
    if (!seen) fail(ErrorKind::NotRegular, "no roots (n < 2?)");
    return best;
}

Rational weyl_discriminant_valuation(const TorusData& T, const Matrix& t) {
    std::vector<Scalar> mu = torus_eigenvalues(T, t);
    int n = (int)mu.size();
    Rational total(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Scalar diff = mu[i] / mu[j] - Scalar::one(T.splitting);
            Valuation v = diff.val();
            if (!v.is_finite())
                fail(ErrorKind::NotRegular, "a Weyl discriminant factor vanishes at precision");
            total += v.value();
        }
    return total;
}

RegularDepthReport regular_depth_report(const GroupSpec& G, const Matrix& gamma,
                                        const std::optional<ExtensionHint>& hint) {
    Certificates cert = certify(G, gamma);
    if (!cert.regular) fail(ErrorKind::NotRegular, "gamma is not regular at precision");
    TorusData T = torus_of(G, gamma, hint);
    RegularDepthReport rep;
    rep.regular = cert.regular;
    rep.compact = cert.compact;
    rep.splitting = T.splitting;
    rep.split_over_k = T.is_split_over_k;
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j)
            if (i != j) rep.s_alpha[{i + 1, j + 1}] = s_alpha(T, i, j);
    rep.s_gamma = s_gamma(T);
    rep.disc_valuation = weyl_discriminant_valuation(T, gamma);
    return rep;
}

ConstancyRadius constancy_radius(const GroupSpec& G, const TorusData& T, const Rational& rho_pi) {
    if (rho_pi < 0) fail(ErrorKind::MalformedInput, "rho_pi must be nonnegative");
    Certificates cert = certify(G, T.gamma);
    if (!cert.regular) fail(ErrorKind::NotRegular, "gamma is not regular at precision");
    if (!cert.compact) fail(ErrorKind::NotCompact, "gamma is not compact");
    ConstancyRadius out;
    out.rho_pi = rho_pi;
    out.s = s_gamma(T);
    Rational r = (out.s > rho_pi ? out.s : rho_pi) + out.s;
    out.radius = Depth::at_plus(r);
    return out;
}

NeighborhoodDescriptor::NeighborhoodDescriptor(GroupSpec G, TorusData T, ConstancyRadius radius)
    : G_(std::move(G)), T_(std::move(T)), radius_(std::move(radius)) {}

bool NeighborhoodDescriptor::accepts(const Matrix& candidate) const {
    Matrix delta = candidate * T_.gamma.inverse();
    try {
        return torus_membership(T_, delta, radius_.radius);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::NotInTorus) return false;
        throw;
    }
}

std::vector<std::string> NeighborhoodDescriptor::congruences() const {
    std::vector<std::string> out;
    for (size_t i = 0; i < T_.eigenvalues.size(); ++i) {
        std::ostringstream os;
        os << "nu(mu_" << (i + 1) << "/lambda_" << (i + 1) << " - 1) > " << radius_.radius.value;
        out.push_back(os.str());
    }
    return out;
}

std::string NeighborhoodDescriptor::coset_description() const {
    return "^G(gamma T_{" + radius_.radius.render() + "})";
}

NeighborhoodDescriptor neighborhood_descriptor(const GroupSpec& G, const TorusData& T, const Rational& rho_pi) {
    return NeighborhoodDescriptor(G, T, constancy_radius(G, T, rho_pi));
}

DeepnessReport check_deepness(const GroupSpec& G, const TorusData& T, const Matrix& gamma_prime) {
    Rational s = s_gamma(T);
    if (!torus_membership(T, gamma_prime, Depth::at_plus(s)))
        fail(ErrorKind::PreconditionViolated,
             "gamma' is not in T_{s+} with s = " + rational_str(s));
    Matrix product = T.gamma * gamma_prime;
    std::vector<Scalar> mu = torus_eigenvalues(T, gamma_prime);

    DeepnessReport rep;
    rep.s_before = s;
    int n = (int)mu.size();
    const FieldPtr& E = T.splitting;
    Rational worst;
    bool seen = false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Rational before = s_alpha(T, i, j);
            Scalar ratio = (T.eigenvalues[i] * mu[i]) / (T.eigenvalues[j] * mu[j]);
            Scalar diff = ratio - Scalar::one(E);
            Valuation v = diff.val();
            if (!v.is_finite()) fail(ErrorKind::NotRegular, "alpha(gamma gamma') = 1 at precision");
            rep.table.push_back(DeepnessRow{i + 1, j + 1, before, v.value()});
            if (!seen || v.value() > worst) {
                worst = v.value();
                seen = true;
            }
        }
    rep.s_after = worst;
    rep.disc_before = weyl_discriminant_valuation(T, T.gamma);
    rep.disc_after = weyl_discriminant_valuation(T, product);
    rep.compact_after = certify(G, product).compact;

    rep.pass = rep.s_before == rep.s_after && rep.disc_before == rep.disc_after && rep.compact_after;
    for (const auto& row : rep.table) rep.pass = rep.pass && row.s_before == row.s_after;
    return rep;
}

} // namespace charloc
