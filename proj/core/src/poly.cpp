#include "charloc/poly.hpp"

#include <algorithm>
#include <sstream>

namespace charloc {

Scalar poly_eval(const Poly& f, const Scalar& z) {
    const FieldPtr& F = z.field();
    Scalar acc = Scalar::zero(F);
    for (size_t k = f.size(); k-- > 0;) acc = acc * z + f[k].coerced_to(F);
    return acc;
}

Poly poly_derivative(const Poly& f) {
    Poly d;
    for (size_t k = 1; k < f.size(); ++k) d.push_back(Scalar::integer(f[k].field(), BigInt(k)) * f[k]);
    return d;
}

Poly poly_mul(const Poly& f, const Poly& g) {
    if (f.empty() || g.empty()) return {};
    const FieldPtr& F = f[0].field();
    Poly h;
    for (size_t k = 0; k < f.size() + g.size() - 1; ++k) h.push_back(Scalar::zero(F));
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j) h[i + j] = h[i + j] + f[i] * g[j];
    return h;
}

Poly poly_coerced(const Poly& f, const FieldPtr& F) {
    Poly g;
    g.reserve(f.size());
    for (const auto& c : f) g.push_back(c.coerced_to(F));
    return g;
}

Poly poly_deflate(const Poly& f, const Scalar& root) {
    if (f.size() < 2) fail(ErrorKind::Internal, "deflating a constant polynomial");
    const FieldPtr& F = root.field();
    Poly q;
    q.resize(f.size() - 1, Scalar::zero(F));
    Scalar carry = f.back().coerced_to(F);
    for (size_t k = f.size() - 1; k-- > 0;) {
        q[k] = carry;
        carry = f[k].coerced_to(F) + carry * root;
    }
    if (!carry.is_zero_at_precision())
        fail(ErrorKind::Internal, "deflation remainder nonzero: " + carry.render());
    return q;
}

Scalar poly_resultant(const Poly& f, const Poly& g) {
    if (f.empty() || g.empty()) fail(ErrorKind::MalformedInput, "resultant of an empty polynomial");
    const FieldPtr& F = f[0].field();
    int n = (int)f.size() - 1, m = (int)g.size() - 1;
    if (n == 0 || m == 0) {
        // Res(const, g) = const^deg(g)
        Scalar base = n == 0 ? f[0] : g[0].coerced_to(F);
        int exp = n == 0 ? m : n;
        Scalar acc = Scalar::one(F);
        for (int i = 0; i < exp; ++i) acc = acc * base;
        return acc;
    }
    Matrix S(F, n + m, n + m);
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) S.set(r, r + (n - k), f[k].coerced_to(F));
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) S.set(m + r, r + (m - k), g[k].coerced_to(F));
    return S.det();
}

Scalar poly_discriminant(const Poly& f) {
    Scalar res = poly_resultant(f, poly_derivative(f));
    return res / f.back();
}

std::string poly_render(const Poly& f) {
    std::ostringstream os;
    os << "[";
    for (size_t k = 0; k < f.size(); ++k) {
        if (k) os << ", ";
        os << f[k].render();
    }
    os << "]";
    return os.str();
}

namespace {

// polynomial entries for the characteristic-polynomial cofactor expansion
using PolyMat = std::vector<std::vector<Poly>>;

Poly pm_det(const PolyMat& m, std::vector<int>& cols, int row, const FieldPtr& F) {
    if (cols.size() == 1) return m[row][cols[0]];
    Poly acc = {Scalar::zero(F)};
    for (size_t k = 0; k < cols.size(); ++k) {
        std::vector<int> rest;
        rest.reserve(cols.size() - 1);
        for (size_t t = 0; t < cols.size(); ++t)
            if (t != k) rest.push_back(cols[t]);
        Poly term = poly_mul(m[row][cols[k]], pm_det(m, rest, row + 1, F));
        if (term.empty()) continue;
        while (acc.size() < term.size()) acc.push_back(Scalar::zero(F));
        for (size_t i = 0; i < term.size(); ++i) acc[i] = acc[i] + (k % 2 == 0 ? term[i] : -term[i]);
    }
    return acc;
}

} // namespace

Poly char_poly(const Matrix& A) {
    int n = A.rows();
    if (A.cols() != n) fail(ErrorKind::MalformedInput, "characteristic polynomial of a non-square matrix");
    const FieldPtr& F = A.field();
    PolyMat m(n, std::vector<Poly>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j)
                m[i][j] = Poly{-A.at(i, j), Scalar::one(F)};
            else
                m[i][j] = Poly{-A.at(i, j)};
        }
    std::vector<int> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = j;
    Poly f = pm_det(m, cols, 0, F);
    f.resize(n + 1, Scalar::zero(F));
    return f;
}

// ---------------------------------------------------------------------------
// hensel_factor

namespace {

struct RootCollector {
    std::vector<Scalar> roots;
    long budget; // recursion budget; prevents livelock on borderline inputs
};

// Valuations of the coefficients, for the Newton polygon.  Coefficients that
// vanish to precision contribute only a bound; the polygon is trusted only
// when every bound sits on or above the hull.
struct CoeffVal {
    bool known;
    Rational v; // exact value, or the bound when !known
    bool zero;  // exact zero
};

std::vector<CoeffVal> coeff_vals(const Poly& f) {
    std::vector<CoeffVal> out;
    for (const auto& c : f) {
        Valuation v = c.val();
        if (v.is_infinite())
            out.push_back({true, Rational(0), true});
        else if (v.is_finite())
            out.push_back({true, v.value(), false});
        else
            out.push_back({false, v.value(), false});
    }
    return out;
}

// Lower-hull slopes of the Newton polygon, as the set of root valuations
// (negated slopes) with the horizontal extent attached.
std::vector<Rational> root_valuations(const Poly& f) {
    auto cv = coeff_vals(f);
    int n = (int)f.size() - 1;
    std::vector<std::pair<Rational, Rational>> pts; // (index, valuation)
    for (int i = 0; i <= n; ++i)
        if (cv[i].known && !cv[i].zero) pts.emplace_back(Rational(i), cv[i].v);
    if (pts.empty() || pts.back().first != Rational(n))
        fail(ErrorKind::PrecisionTooLowToSeparateRoots, "leading coefficient vanishes to precision");
    // lower convex hull
    std::vector<std::pair<Rational, Rational>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // drop b if it lies on or above segment a->pt
            if ((b.second - a.second) * (pt.first - a.first) >= (pt.second - a.second) * (b.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    // every unknown coefficient's bound must not dip below the hull
    for (int i = 0; i <= n; ++i) {
        if (cv[i].known) continue;
        for (size_t s = 0; s + 1 < hull.size(); ++s) {
            if (hull[s].first <= i && Rational(i) <= hull[s + 1].first) {
                Rational t = (Rational(i) - hull[s].first) / (hull[s + 1].first - hull[s].first);
                Rational hull_v = hull[s].second + t * (hull[s + 1].second - hull[s].second);
                if (cv[i].v < hull_v)
                    fail(ErrorKind::PrecisionTooLowToSeparateRoots,
                         "coefficient of t^" + std::to_string(i) + " vanishes below the Newton polygon");
            }
        }
    }
    std::vector<Rational> vals;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        Rational slope = (hull[s + 1].second - hull[s].second) / (hull[s + 1].first - hull[s].first);
        vals.push_back(-slope);
    }
    return vals;
}

std::vector<ResidueElem> residue_poly(const Poly& f) {
    std::vector<ResidueElem> out;
    for (const auto& c : f) out.push_back(c.residue());
    return out;
}

ResidueElem res_poly_eval(const LocalField& F, const std::vector<ResidueElem>& f, const ResidueElem& z) {
    ResidueElem acc = F.res_zero();
    for (size_t k = f.size(); k-- > 0;) acc = F.res_add(F.res_mul(acc, z), f[k]);
    return acc;
}

Scalar lift_residue(const FieldPtr& F, const ResidueElem& r) {
    std::vector<Rational> coords(F->degree(), Rational(0));
    for (int j = 0; j < F->f(); ++j) coords[j] = r.c[j];
    return Scalar::from_tower_coords(F, coords);
}

Scalar newton_lift(const Poly& f, const Poly& fp, const Scalar& x0) {
    Scalar x = x0;
    for (int it = 0; it < 64; ++it) {
        Scalar fx = poly_eval(f, x);
        if (fx.is_zero_at_precision()) return x;
        Scalar fpx = poly_eval(fp, x);
        x = x - fx / fpx;
    }
    fail(ErrorKind::PrecisionTooLowToSeparateRoots, "Newton iteration failed to converge");
}

// All roots of f lying in its coefficient field, with nu(root) >= 0 only
// when `nonnegative_only` (used after a residue shift to avoid revisiting
// other residue classes).
void collect_roots(const Poly& f, const FieldPtr& F, RootCollector& rc, bool nonnegative_only) {
    if (rc.budget-- <= 0)
        fail(ErrorKind::PrecisionTooLowToSeparateRoots, "root separation exceeded the recursion budget");
    if (f.size() <= 1) return;

    // exact zero constant term: t = 0 is a root; shift down
    if (f[0].is_exact_zero()) {
        rc.roots.push_back(Scalar::zero(F));
        Poly g(f.begin() + 1, f.end());
        collect_roots(g, F, rc, nonnegative_only);
        return;
    }
    if (f[0].is_zero_at_precision())
        fail(ErrorKind::PrecisionTooLowToSeparateRoots, "constant term vanishes to precision");

    Scalar pi = Scalar::uniformizer(F);
    long e = F->e();
    for (const Rational& v : root_valuations(f)) {
        if (nonnegative_only && v < 0) continue;
        // roots of this valuation live in F only if v is in (1/e)Z
        Rational scaled = v * e;
        if (!is_integer(scaled)) continue;
        long w = (long)numerator(scaled);
        // substitute t = pi^w y and strip the content, giving unit-root scope
        Scalar piw = Scalar::one(F);
        {
            Scalar step = w >= 0 ? pi : pi.inverse();
            for (long i = 0; i < (w >= 0 ? w : -w); ++i) piw = piw * step;
        }
        Poly g;
        g.reserve(f.size());
        Scalar powacc = Scalar::one(F);
        for (size_t k = 0; k < f.size(); ++k) {
            g.push_back(f[k].coerced_to(F) * powacc);
            powacc = powacc * piw;
        }
        Rational content;
        bool seen = false;
        for (const auto& c : g) {
            Valuation val = c.val();
            if (val.is_finite() && (!seen || val.value() < content)) {
                content = val.value();
                seen = true;
            }
        }
        if (!seen) continue;
        if (content != 0) {
            Scalar divisor = Scalar::one(F);
            Rational cs = content * e;
            long cw = (long)numerator(cs);
            Scalar step = cw >= 0 ? pi : pi.inverse();
            for (long i = 0; i < (cw >= 0 ? cw : -cw); ++i) divisor = divisor * step;
            if (cw < 0) divisor = divisor.inverse();
            for (auto& c : g) c = c / divisor;
        }
        // unit roots of g: residue roots, then lift
        std::vector<ResidueElem> gbar = residue_poly(g);
        std::vector<ResidueElem> gbar_d;
        {
            const LocalField& lf = *F;
            for (size_t k = 1; k < gbar.size(); ++k) {
                ResidueElem kk = lf.res_from_int((long)(k % (unsigned long)lf.p()));
                gbar_d.push_back(lf.res_mul(kk, gbar[k]));
            }
        }
        Poly gp = poly_derivative(g);
        for (const auto& rho : F->res_all_elements()) {
            if (rho.is_zero()) continue; // other valuations handle deeper roots
            if (!res_poly_eval(*F, gbar, rho).is_zero()) continue;
            Scalar x0 = lift_residue(F, rho);
            if (!res_poly_eval(*F, gbar_d, rho).is_zero()) {
                Scalar y = newton_lift(g, gp, x0);
                rc.roots.push_back(piw * y);
            } else {
                // multiple residue root: separate via t = x0 + pi z
                Poly h;
                h.reserve(g.size());
                // h(z) = g(x0 + pi z), expanded by Horner on (x0 + pi z)
                Poly acc = {g.back()};
                for (size_t k = g.size() - 1; k-- > 0;) {
                    // acc <- acc * (x0 + pi z) + g[k]
                    Poly shifted;
                    shifted.resize(acc.size() + 1, Scalar::zero(F));
                    for (size_t i = 0; i < acc.size(); ++i) {
                        shifted[i] = shifted[i] + acc[i] * x0;
                        shifted[i + 1] = shifted[i + 1] + acc[i] * pi;
                    }
                    shifted[0] = shifted[0] + g[k];
                    acc = std::move(shifted);
                }
                h = std::move(acc);
                RootCollector sub{{}, rc.budget};
                collect_roots(h, F, sub, /*nonnegative_only=*/true);
                rc.budget = sub.budget;
                for (const auto& z : sub.roots) rc.roots.push_back(piw * (x0 + pi * z));
            }
        }
    }
}

} // namespace

HenselFactorization hensel_factor(const Poly& poly, const FieldPtr& field) {
    if (poly.size() < 1) fail(ErrorKind::MalformedInput, "empty polynomial");
    Poly f = poly_coerced(poly, field);
    if (f.back().is_zero_at_precision())
        fail(ErrorKind::PrecisionTooLowToSeparateRoots, "leading coefficient vanishes to precision");
    if (f.size() >= 2) {
        Scalar disc = poly_discriminant(f);
        if (disc.is_zero_at_precision())
            fail(ErrorKind::Inseparable, "discriminant vanishes to precision");
    }

    RootCollector rc{{}, 64 * (long)field->e() + 256};
    collect_roots(f, field, rc, false);

    // distinctness at precision is part of the squarefree contract
    for (size_t i = 0; i < rc.roots.size(); ++i)
        for (size_t j = i + 1; j < rc.roots.size(); ++j)
            if (approx_equal(rc.roots[i], rc.roots[j]))
                fail(ErrorKind::PrecisionTooLowToSeparateRoots, "two roots agree at the carried precision");

    HenselFactorization out;
    out.roots = rc.roots;
    Poly rem = f;
    for (const auto& r : out.roots) rem = poly_deflate(rem, r);
    if (rem.size() > 1) out.residual.push_back(rem);
    return out;
}

} // namespace charloc
