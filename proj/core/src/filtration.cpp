#include "charloc/filtration.hpp"

#include <algorithm>
#include <sstream>

namespace charloc {

void GroupSpec::validate() const {
    if (!field) fail(ErrorKind::MalformedInput, "group has no base field");
    if (n < 2) fail(ErrorKind::MalformedInput, "rank parameter n must be >= 2");
    if (is_sl() && field->p() <= n)
        fail(ErrorKind::MalformedInput, "SL_n requires p > n for a nondegenerate trace form");
}

std::string GroupSpec::name() const {
    return (is_sl() ? std::string("SL_") : std::string("GL_")) + std::to_string(n);
}

std::string ApartmentPoint::render() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < coords.size(); ++i) {
        if (i) os << ",";
        os << coords[i];
    }
    os << ")";
    return os.str();
}

long min_entry_valuation(const Depth& r, const Rational& offset) {
    Rational bound = r.value - offset;
    if (r.plus) return (long)floor_big(bound) + 1;
    return (long)ceil_big(bound);
}

namespace {

void check_shape(const GroupSpec& G, const Matrix& X, const ApartmentPoint& x) {
    if (X.rows() != G.n || X.cols() != G.n) fail(ErrorKind::MalformedInput, "matrix size does not match the group");
    if ((int)x.coords.size() != G.n) fail(ErrorKind::MalformedInput, "apartment point size does not match the group");
}

void check_sl_algebra(const GroupSpec& G, const Matrix& X) {
    if (G.is_sl() && !X.trace().is_zero_at_precision())
        fail(ErrorKind::PreconditionViolated, "matrix is not traceless, so not in sl_n");
}

} // namespace

bool lattice_membership(const GroupSpec& G, const Matrix& X, const ApartmentPoint& x, const Depth& r) {
    check_shape(G, X, x);
    check_sl_algebra(G, X);
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            Rational threshold = r.value - x.offset(i, j);
            if (!X.at(i, j).val_at_least(threshold, r.plus)) return false;
        }
    return true;
}

Depth element_lattice_depth(const GroupSpec& G, const Matrix& X, const ApartmentPoint& x) {
    check_shape(G, X, x);
    bool all_exact_zero = true;
    bool have = false;
    Rational depth;
    Rational best_bound;
    bool have_bound = false;
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            Valuation v = X.at(i, j).val();
            if (v.is_infinite()) continue;
            all_exact_zero = false;
            Rational contrib = v.value() + x.offset(i, j);
            if (v.is_finite()) {
                if (!have || contrib < depth) {
                    depth = contrib;
                    have = true;
                }
            } else {
                if (!have_bound || contrib < best_bound) {
                    best_bound = contrib;
                    have_bound = true;
                }
            }
        }
    if (all_exact_zero) fail(ErrorKind::ZeroAtPrecision, "depth of the zero matrix is undefined");
    if (!have)
        fail(ErrorKind::InsufficientPrecision, "every entry vanishes to precision; depth undecidable");
    if (have_bound && best_bound < depth)
        fail(ErrorKind::InsufficientPrecision,
             "an entry that vanishes to precision could dominate the depth");
    return Depth::at(depth);
}

bool group_membership(const GroupSpec& G, const Matrix& g, const ApartmentPoint& x, const Depth& r) {
    check_shape(G, g, x);
    if (r.value < 0 || (r.value == 0 && !r.plus))
        fail(ErrorKind::NonPositiveDepth, "group filtration needs depth > 0; use the parahoric predicate at 0");
    if (G.is_sl() && !approx_equal(g.det(), Scalar::one(g.field())))
        fail(ErrorKind::PreconditionViolated, "determinant is not 1, so not in SL_n");
    Matrix diff = g - Matrix::identity(g.field(), G.n);
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            Rational threshold = r.value - x.offset(i, j);
            if (!diff.at(i, j).val_at_least(threshold, r.plus)) return false;
        }
    return true;
}

bool parahoric_membership(const GroupSpec& G, const Matrix& g, const ApartmentPoint& x) {
    check_shape(G, g, x);
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            if (!g.at(i, j).val_at_least(-x.offset(i, j), false)) return false;
        }
    Scalar det = g.det();
    if (G.is_sl()) return approx_equal(det, Scalar::one(g.field()));
    return det.val_at_least(0, false) && !det.val_at_least(0, true); // nu(det) = 0
}

std::vector<Rational> lattice_break_reps(const GroupSpec& G, const ApartmentPoint& x, const FieldPtr& over) {
    std::vector<Rational> reps;
    auto push = [&](const Rational& v) {
        Rational f = frac_part(v);
        if (std::find(reps.begin(), reps.end(), f) == reps.end()) reps.push_back(f);
    };
    long e = over->e();
    for (long k = 0; k < e; ++k) push(Rational(k, e));
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j)
            if (i != j)
                for (long k = 0; k < e; ++k) push(x.offset(i, j) + Rational(k, e));
    std::sort(reps.begin(), reps.end());
    return reps;
}

bool is_lattice_break(const GroupSpec& G, const ApartmentPoint& x, const FieldPtr& over, const Rational& r) {
    auto reps = lattice_break_reps(G, x, over);
    return std::find(reps.begin(), reps.end(), frac_part(r)) != reps.end();
}

bool is_nilpotent_break(const ApartmentPoint& x, const Rational& r) {
    int n = (int)x.coords.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && is_integer(r - x.offset(i, j))) return true;
    return false;
}

std::vector<Matrix> lattice_generators(const GroupSpec& G, const ApartmentPoint& x, const Depth& r) {
    const FieldPtr& F = G.field;
    std::vector<Matrix> gens;
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            if (G.is_sl() && i == j) continue; // diagonal handled below
            long m = min_entry_valuation(r, x.offset(i, j));
            Matrix E(F, G.n, G.n);
            E.set(i, j, Scalar::rational(F, m >= 0 ? Rational(pow_int(F->p(), m))
                                                   : Rational(1, pow_int(F->p(), -m))));
            gens.push_back(E);
        }
    if (G.is_sl()) {
        for (int i = 0; i + 1 < G.n; ++i) {
            long m = min_entry_valuation(r, Rational(0));
            Matrix H(F, G.n, G.n);
            Scalar v = Scalar::rational(F, m >= 0 ? Rational(pow_int(F->p(), m)) : Rational(1, pow_int(F->p(), -m)));
            H.set(i, i, v);
            H.set(G.n - 1, G.n - 1, -v);
            gens.push_back(H);
        }
    }
    return gens;
}

uint64_t Rng::derive(uint64_t seed, uint64_t salt) {
    // splitmix64 step
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

Scalar random_unit(const FieldPtr& F, Rng& rng) {
    long p = F->p();
    long digit0 = 1 + rng.below(p - 1);
    long digit1 = rng.below(p);
    return Scalar::integer(F, BigInt(digit0 + p * digit1));
}

Scalar random_with_min_valuation(const FieldPtr& F, long m, Rng& rng) {
    // valuation >= m; equal to m with probability (p-1)/p, as in R
    long p = F->p();
    long d0 = rng.below(p), d1 = rng.below(p), d2 = rng.below(p);
    BigInt u = BigInt(d0) + BigInt(p) * d1 + BigInt(p) * p * d2;
    if (u == 0) return Scalar::zero(F);
    Rational q = m >= 0 ? Rational(u * pow_int(p, m)) : Rational(u, pow_int(p, -m));
    return Scalar::rational(F, q);
}

} // namespace

Matrix sample_parahoric(const GroupSpec& G, const ApartmentPoint& x, Rng& rng) {
    G.validate();
    const FieldPtr& F = G.field;
    for (int attempt = 0; attempt < 256; ++attempt) {
        Matrix g(F, G.n, G.n);
        for (int i = 0; i < G.n; ++i)
            for (int j = 0; j < G.n; ++j) {
                long m = (long)ceil_big(-x.offset(i, j));
                if (i == j)
                    g.set(i, j, random_unit(F, rng)); // bias toward invertibility
                else
                    g.set(i, j, random_with_min_valuation(F, m, rng));
            }
        Scalar det = g.det();
        Valuation v = det.val();
        if (!v.is_finite() || v.value() != 0) continue;
        if (G.is_sl()) {
            // scale the first row by det^{-1}; entry conditions are unchanged
            Scalar inv = det.inverse();
            for (int j = 0; j < G.n; ++j) g.set(0, j, inv * g.at(0, j));
        }
        return g;
    }
    fail(ErrorKind::Internal, "parahoric sampler failed to find a unit determinant");
}

Matrix sample_nilpotent(const GroupSpec& G, const ApartmentPoint& x, const Depth& r, Rng& rng) {
    G.validate();
    if (r.plus) fail(ErrorKind::NotABreak, "nilpotent depth must be a plain break value");
    if (!is_nilpotent_break(x, r.value))
        fail(ErrorKind::NotABreak, "no nilpotent realizes depth " + r.render() + " at x = " + x.render());
    const FieldPtr& F = G.field;
    int n = G.n;

    // entries (i,j) whose affine-root coset matches r exactly
    std::vector<std::pair<int, int>> exact_pairs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && is_integer(r.value - x.offset(i, j))) exact_pairs.emplace_back(i, j);
    auto [fi, fj] = exact_pairs[rng.below((long)exact_pairs.size())];

    // random permutation placing fi before fj; support lives strictly above
    // the sigma-diagonal, so the pattern is nilpotent for any entry values
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(sigma[i], sigma[rng.below(i + 1)]);
    auto pos = [&](int v) {
        for (int i = 0; i < n; ++i)
            if (sigma[i] == v) return i;
        return -1;
    };
    if (pos(fi) > pos(fj)) std::swap(sigma[pos(fi)], sigma[pos(fj)]);

    Matrix X(F, n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            int i = sigma[a], j = sigma[b];
            bool forced = (i == fi && j == fj);
            if (!forced && rng.below(2) == 0) continue;
            Rational gap = r.value - x.offset(i, j);
            long m = is_integer(gap) ? (long)numerator(gap) : (long)floor_big(gap) + 1;
            if (!forced && !is_integer(gap) && rng.below(2) == 0) m += rng.below(2);
            Scalar unit = random_unit(F, rng);
            Scalar val = Scalar::rational(F, m >= 0 ? Rational(pow_int(F->p(), m)) : Rational(1, pow_int(F->p(), -m)));
            X.set(i, j, unit * val);
        }

    Matrix g = sample_parahoric(GroupSpec{GroupKind::GL, n, F}, x, rng);
    return ad_action(g, X);
}

} // namespace charloc
