#pragma once

#include <compare>
#include <random>
#include <string>
#include <vector>

#include "charloc/matrix.hpp"

namespace charloc {

enum class GroupKind { GL, SL };

/// GL_n or SL_n over a p-adic field k.  SL_n requires p > n so the trace
/// form stays nondegenerate on the Lie algebra.
struct GroupSpec {
    GroupKind kind = GroupKind::GL;
    int n = 2;
    FieldPtr field;

    void validate() const;
    bool is_sl() const { return kind == GroupKind::SL; }
    std::string name() const;
};

/// Point x = (x_1, ..., x_n) in the standard apartment of the diagonal
/// torus; the affine-root condition on entry (i,j) is
/// nu(X_ij) + (x_i - x_j) >= r.  This sign convention is fixed once for the
/// whole repository and checked against the rank-2 worked example in tests.
struct ApartmentPoint {
    std::vector<Rational> coords;

    static ApartmentPoint origin(int n) { return ApartmentPoint{std::vector<Rational>((size_t)n, Rational(0))}; }
    Rational offset(int i, int j) const { return coords[i] - coords[j]; } // x_i - x_j
    std::string render() const;
};

/// Filtration index r or r+; totally ordered, lattices are antitone in it.
struct Depth {
    Rational value;
    bool plus = false;

    static Depth at(Rational v) { return Depth{std::move(v), false}; }
    static Depth at_plus(Rational v) { return Depth{std::move(v), true}; }
    Depth plus_of() const { return Depth{value, true}; }

    bool operator==(const Depth&) const = default;
    bool operator<(const Depth& o) const { return value < o.value || (value == o.value && plus < o.plus); }
    bool operator<=(const Depth& o) const { return *this < o || *this == o; }
    bool operator>(const Depth& o) const { return o < *this; }
    bool operator>=(const Depth& o) const { return o <= *this; }
    std::string render() const { return rational_str(value) + (plus ? "+" : ""); }
};

/// Smallest integer valuation an entry with apartment offset d may carry in
/// the lattice at depth r (integer because matrix entries live over k or an
/// unramified step; for ramified fields use the rational threshold directly).
long min_entry_valuation(const Depth& r, const Rational& offset);

/// X in g_{x,r}?  Entrywise affine-root conditions; SL additionally requires
/// X traceless at precision.  Throws InsufficientPrecision when a comparison
/// falls inside the precision margin.
bool lattice_membership(const GroupSpec& G, const Matrix& X, const ApartmentPoint& x, const Depth& r);

/// The largest break r with X in g_{x,r} \ g_{x,r+}.
Depth element_lattice_depth(const GroupSpec& G, const Matrix& X, const ApartmentPoint& x);

/// g in G_{x,r} for r > 0 (as a Depth, 0+ allowed).
bool group_membership(const GroupSpec& G, const Matrix& g, const ApartmentPoint& x, const Depth& r);

/// g in the parahoric G_{x,0}: integral at x with unit determinant (det = 1
/// for SL).
bool parahoric_membership(const GroupSpec& G, const Matrix& g, const ApartmentPoint& x);

/// Representatives in [0,1) of the lattice break values at x, over the
/// given coefficient field (value group (1/e)Z enters here).
std::vector<Rational> lattice_break_reps(const GroupSpec& G, const ApartmentPoint& x, const FieldPtr& over);
bool is_lattice_break(const GroupSpec& G, const ApartmentPoint& x, const FieldPtr& over, const Rational& r);
/// Breaks realized by nilpotent elements: the off-diagonal affine-root
/// values only.
bool is_nilpotent_break(const ApartmentPoint& x, const Rational& r);

/// Generators of g_{x,r} over the integers: one minimal-valuation elementary
/// matrix per entry.
std::vector<Matrix> lattice_generators(const GroupSpec& G, const ApartmentPoint& x, const Depth& r);

/// Deterministic randomness for the samplers and harnesses.  Draws reduce
/// raw mt19937_64 output, so identical seeds give identical streams on every
/// platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    uint64_t next() { return eng_(); }
    long below(long k) { return (long)(next() % (uint64_t)k); } // k > 0
    static uint64_t derive(uint64_t seed, uint64_t salt);

private:
    std::mt19937_64 eng_;
};

/// Random element of G_{x,0} (unit determinant; det = 1 for SL).
Matrix sample_parahoric(const GroupSpec& G, const ApartmentPoint& x, Rng& rng);

/// Random nilpotent X over k with element_lattice_depth(X, x) = r exactly:
/// a partial-Jordan pattern scaled by uniformizer powers, conjugated by a
/// random element of G_{x,0} (which preserves every g_{x,s}).
Matrix sample_nilpotent(const GroupSpec& G, const ApartmentPoint& x, const Depth& r, Rng& rng);

} // namespace charloc
