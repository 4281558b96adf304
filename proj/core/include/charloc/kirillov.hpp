#pragma once

#include <optional>
#include <vector>

#include "charloc/torus.hpp"

namespace charloc {

/**
 * A coset X + g_{x,(-r)+} inside g_{x,(-t)+}, representing a one-dimensional
 * character of the abelian quotient G_{x,r}/G_{x,t} (0 < r <= t <= 2r).
 *
 * The representative is canonical: each entry is truncated to the digits
 * below the (-r)+ cutoff of its affine root (for SL the last diagonal entry
 * absorbs the trace correction), so coset equality is representative
 * equality.
 *
 * The character itself is g -> psi(B(X, g-1)) with B the trace form and
 * psi(z) = frac_principal(z/p).  This conductor makes the psi-dual of
 * g_{x,r} exactly g_{x,(-r)+}, which is what the "+"-decorated quotients
 * require; the duality is verified generator by generator in the tests.
 */
struct CharacterCoset {
    GroupSpec group;
    ApartmentPoint x;
    Rational r;
    Rational t;
    Matrix X; // canonical representative over k
};

CharacterCoset make_character_coset(const GroupSpec& G, const ApartmentPoint& x, const Rational& r,
                                    const Rational& t, const Matrix& X);

/// The additive character psi(z) = frac_principal(z/p).
QmodZ psi(const Scalar& z);

/// d(g) for g in G_{x,r}; a homomorphism modulo G_{x,t}, trivial on G_{x,t},
/// depending only on the coset of X.
QmodZ evaluate_character(const CharacterCoset& c, const Matrix& g);

struct TrivialityDepth {
    bool below_r = false; // trivial character: already trivial on G_{x,r}
    Depth value{Rational(0), false};
};

/// Smallest break t' with the character trivial on G_{x,t'+}; equals
/// -element_lattice_depth(X, x).
TrivialityDepth triviality_depth(const CharacterCoset& c);

enum class Degeneracy { True, False, Unknown };

struct DegeneracyResult {
    Degeneracy verdict = Degeneracy::Unknown;
    std::optional<Matrix> witness; // a nilpotent member of the coset when True
};

/**
 * Does the coset contain a nilpotent element?
 *
 * Decision procedure: exact for n = 2 and p odd (entrywise-ball analysis of
 * the trace and determinant equations); exact via the residue criterion when
 * the two lattices are scalar (one digit apart, all entry cutoffs equal);
 * otherwise a bounded search over deeper digits, sound for "true", honest
 * Unknown when exhausted.
 */
DegeneracyResult is_degenerate(const CharacterCoset& c, long search_bound = 1);

/// ^gamma X - X in g_{x,(-r)+}, i.e. gamma fixes the coset (equivalently the
/// character).  Requires gamma compact and x in its torus's apartment
/// (PointNotFixed otherwise).
bool gamma_intertwines(const TorusData& T, const CharacterCoset& c);

enum class Cor36Verdict {
    Holds,
    Fails,
    VacuousNotDegenerate,
    VacuousNotIntertwined,
    DegeneracyUnknown,
};

/// For degenerate gamma-intertwined cosets: is the character trivial on
/// G_{x,r+s(gamma)}, i.e. X in g_{x,(-r-s)+}?
Cor36Verdict cor36_conclusion_holds(const TorusData& T, const CharacterCoset& c, long search_bound = 1);

/// All cosets of g_{x,(-t)+}/g_{x,(-r)+}, one canonical representative each,
/// in a fixed deterministic order.
std::vector<CharacterCoset> enumerate_characters(const GroupSpec& G, const ApartmentPoint& x, const Rational& r,
                                                 const Rational& t, long cap = 1000000);

/// The same count computed from break data alone (sum of quotient dimensions
/// over the breaks between -t and -r), as an independent cross-check.
BigInt character_count_from_breaks(const GroupSpec& G, const ApartmentPoint& x, const Rational& r,
                                   const Rational& t);

/// Generators of G_{x,r} modulo G_{x,t}: one elementary 1 + p^a E_ij per
/// affine root, plus diagonal generators (det-1 pairs for SL).
std::vector<Matrix> group_generators(const GroupSpec& G, const ApartmentPoint& x, const Depth& r);

} // namespace charloc
