#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "charloc/numeric.hpp"

namespace charloc {

class LocalField;
using FieldPtr = std::shared_ptr<const LocalField>;

/// Element of the residue field F_{p^f}, as coefficients of 1, u, ..., u^{f-1}
/// with u the chosen generator of the unramified step.
struct ResidueElem {
    std::vector<long> c;
    bool is_zero() const {
        for (long x : c)
            if (x != 0) return false;
        return true;
    }
    bool operator==(const ResidueElem&) const = default;
};

/**
 * A p-adic field presented as a two-step tower over Q_p: an unramified step
 * of degree f (defined by a fixed monic polynomial m(u), irreducible mod p),
 * followed by a totally ramified Eisenstein step of degree e with gcd(e,p)=1.
 *
 * The valuation nu is normalized so that nu(p) = 1; the value group of the
 * field is (1/e)Z.  Construction of wildly ramified steps (p | e) is an
 * error by design.
 *
 * m(u) is chosen deterministically: the lexicographically least monic
 * irreducible polynomial of degree f over F_p (coefficients in 0..p-1,
 * ordered from the constant term up).
 */
class LocalField : public std::enable_shared_from_this<LocalField> {
public:
    static constexpr int kDefaultPrecision = 24;

    static FieldPtr qp(long p, int precision = kDefaultPrecision);

    /// Tame extension of Q_p: unramified degree f, then the monic Eisenstein
    /// polynomial t^e + a_{e-1} t^{e-1} + ... + a_0, each a_i given by its
    /// coordinates over the unramified step (a vector of length 1 means a
    /// plain rational from Q_p).  An empty coefficient list gives e = 1.
    static FieldPtr make_extension(const FieldPtr& base, int f,
                                   const std::vector<std::vector<Rational>>& eisenstein_coeffs);

    long p() const { return p_; }
    int f() const { return f_; }
    int e() const { return e_; }
    int degree() const { return e_ * f_; }
    int precision() const { return precision_; }
    bool is_qp() const { return e_ == 1 && f_ == 1; }
    const FieldPtr& base() const { return base_; } // null for Q_p
    std::string description() const;

    /// m(u) mod p, monic of degree f (size f+1, coefficients in 0..p-1).
    const std::vector<long>& unramified_poly() const { return unram_poly_; }
    /// Eisenstein coefficients a_0..a_{e-1} as exact tower coordinates
    /// (each of length f, over Q_p).
    const std::vector<std::vector<Rational>>& eisenstein_coeffs() const { return eis_; }

    bool same_field(const LocalField& other) const;
    /// True when elements of `src` embed into this field along the tower.
    bool coercible_from(const LocalField& src) const;

    // --- residue field F_{p^f} -------------------------------------------
    ResidueElem res_zero() const { return ResidueElem{std::vector<long>(f_, 0)}; }
    ResidueElem res_one() const;
    ResidueElem res_from_int(long a) const;
    ResidueElem res_add(const ResidueElem& a, const ResidueElem& b) const;
    ResidueElem res_sub(const ResidueElem& a, const ResidueElem& b) const;
    ResidueElem res_neg(const ResidueElem& a) const;
    ResidueElem res_mul(const ResidueElem& a, const ResidueElem& b) const;
    ResidueElem res_inv(const ResidueElem& a) const; // a != 0
    ResidueElem res_pow(const ResidueElem& a, BigInt k) const;
    std::vector<ResidueElem> res_all_elements() const; // all p^f of them
    bool res_is_square(const ResidueElem& a) const;    // p odd

    // --- reduction tables used by Scalar arithmetic ----------------------
    /// u^m expressed in the u-basis, for m = 0..2f-2 (exact integers).
    const std::vector<std::vector<BigInt>>& u_power_table() const { return u_pow_; }
    /// pi^m expressed in tower coordinates, for m = 0..2e-2 (exact rationals,
    /// entry [m][i*f+j] is the coefficient of u^j pi^i).
    const std::vector<std::vector<Rational>>& pi_power_table() const { return pi_pow_; }

private:
    LocalField() = default;

    long p_ = 0;
    int f_ = 1;
    int e_ = 1;
    int precision_ = kDefaultPrecision;
    FieldPtr base_;
    std::vector<long> unram_poly_;
    std::vector<std::vector<Rational>> eis_; // a_0..a_{e-1}, tower coords
    std::vector<std::vector<BigInt>> u_pow_;
    std::vector<std::vector<Rational>> pi_pow_;

    void build_tables();
};

enum class ValKind { Finite, AtLeast, Infinite };

/// Result of a valuation query: an exact rational, or only a lower bound
/// (the value vanished to the carried precision), or exact +infinity (the
/// literal zero).
class Valuation {
public:
    static Valuation finite(Rational v) { return Valuation(ValKind::Finite, std::move(v)); }
    static Valuation at_least(Rational b) { return Valuation(ValKind::AtLeast, std::move(b)); }
    static Valuation infinite() { return Valuation(ValKind::Infinite, Rational(0)); }

    ValKind kind() const { return kind_; }
    bool is_finite() const { return kind_ == ValKind::Finite; }
    bool is_infinite() const { return kind_ == ValKind::Infinite; }
    /// Finite value (Finite) or the precision bound (AtLeast).
    const Rational& value() const { return v_; }
    std::string render() const;

private:
    Valuation(ValKind k, Rational v) : kind_(k), v_(std::move(v)) {}
    ValKind kind_;
    Rational v_;
};

/**
 * Truncated element of a local field.
 *
 * Representation: z = p^shift * sum_{i<e, j<f} c[i*f+j] u^j pi^i with each
 * coordinate an integer known modulo p^digits, so z is known modulo
 * p^shift * P^(e*digits) where P is the prime ideal.  The absolute precision
 * (in valuation units) is shift + digits.
 *
 * Because {u^j pi^i} is a valuation-adapted integral basis, the valuation of
 * a nonzero element is read off exactly from coordinate valuations:
 * nu(z) = shift + min_{i,j} (v_p(c_ij) + i/e).
 *
 * Values whose coordinates all vanish to the carried precision are
 * approximately zero: only the bound nu >= shift + digits is known, and any
 * query needing more throws InsufficientPrecision.  The literal zero is
 * tagged exact and belongs to every lattice.
 */
class Scalar {
public:
    static Scalar zero(const FieldPtr& F); // exact zero
    static Scalar one(const FieldPtr& F);
    static Scalar integer(const FieldPtr& F, const BigInt& a);
    static Scalar rational(const FieldPtr& F, const Rational& q);
    static Scalar uniformizer(const FieldPtr& F); // p, or pi for ramified F
    static Scalar approx_zero(const FieldPtr& F, const Rational& bound);
    /// Element from exact tower coordinates (length 1, f, or e*f).
    static Scalar from_tower_coords(const FieldPtr& F, const std::vector<Rational>& coords);

    const FieldPtr& field() const { return F_; }
    bool is_exact_zero() const { return exact_zero_; }
    bool is_zero_at_precision() const;

    Valuation val() const;
    /// Exact valuation; throws InsufficientPrecision if only a bound is known
    /// and ZeroAtPrecision never (the exact zero reports +infinity via val()).
    Rational val_exact() const;
    /// Decide nu(z) >= c (or > c when strict); throws InsufficientPrecision
    /// when the carried precision cannot tell.
    bool val_at_least(const Rational& c, bool strict = false) const;

    /// Absolute precision in valuation units; nullopt for the exact zero.
    std::optional<Rational> abs_precision() const;

    Scalar coerced_to(const FieldPtr& F) const;
    /// Residue in F_{p^f}; requires nu >= 0 (nonzero only when nu = 0).
    ResidueElem residue() const;
    /// Canonical representative modulo p^k (Q_p only): the digits below p^k,
    /// as an exact value.  Requires absolute precision >= k.
    Scalar reduced_mod(long k) const;
    Scalar shifted(long k) const; // z * p^k
    /// Coordinates over the tower basis, as Q_p scalars (length e*f).
    std::vector<Scalar> tower_coords() const;

    Scalar operator-() const;
    Scalar inverse() const;
    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator/(const Scalar& a, const Scalar& b);

    /// Agreement to the shared precision.
    friend bool approx_equal(const Scalar& a, const Scalar& b);

    std::string render() const;

    // representation accessors (io and tests)
    long shift() const { return shift_; }
    long digits() const { return digits_; }
    const std::vector<BigInt>& coords() const { return c_; }

private:
    Scalar(FieldPtr F, long shift, std::vector<BigInt> c, long digits, bool exact_zero);
    void normalize();
    static void align(const Scalar& a, const Scalar& b, Scalar& ua, Scalar& ub);

    FieldPtr F_;
    long shift_ = 0;
    std::vector<BigInt> c_;
    long digits_ = 0;
    bool exact_zero_ = false;
};

/// Hensel-lifted square root of a unit square (p odd).
Scalar sqrt_unit(const Scalar& a);

/// Rational in [0,1) with p-power denominator; the value group of the
/// characters used throughout (roots of unity written additively).
class QmodZ {
public:
    QmodZ() : v_(0) {}
    static QmodZ from_rational(const Rational& q) { return QmodZ(frac_part(q)); }
    const Rational& value() const { return v_; }
    bool is_zero() const { return v_ == 0; }
    /// Order as a group element (= denominator).
    BigInt order() const { return denominator(v_); }
    QmodZ operator+(const QmodZ& o) const { return QmodZ(frac_part(v_ + o.v_)); }
    QmodZ operator-() const { return QmodZ(frac_part(-v_)); }
    bool operator==(const QmodZ&) const = default;
    std::string render() const { return rational_str(v_); }

private:
    explicit QmodZ(Rational v) : v_(std::move(v)) {}
    Rational v_;
};

/// Principal part of z mod Z: the class of sum_{i<0} a_i p^i.  Additive to
/// precision; requires the carried precision to reach level 0.  Q_p only.
QmodZ frac_principal(const Scalar& z);

} // namespace charloc
