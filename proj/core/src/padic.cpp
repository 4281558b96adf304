#include "charloc/padic.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace charloc {

namespace {

// ---- polynomial arithmetic over F_p (coefficient vectors, ascending) ----

std::vector<long> fp_trim(std::vector<long> a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

std::vector<long> fp_rem(std::vector<long> a, const std::vector<long>& m, long p) {
    // m monic
    while (a.size() >= m.size()) {
        long lead = a.back() % p;
        size_t off = a.size() - m.size();
        if (lead != 0) {
            for (size_t i = 0; i < m.size(); ++i) {
                a[off + i] = ((a[off + i] - lead * m[i]) % p + p) % p;
            }
        }
        a.pop_back();
        a = fp_trim(std::move(a));
        if (a.size() < m.size()) break;
    }
    return fp_trim(std::move(a));
}

std::vector<long> fp_mulmod(const std::vector<long>& a, const std::vector<long>& b, const std::vector<long>& m,
                            long p) {
    if (a.empty() || b.empty()) return {};
    std::vector<long> c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return fp_rem(std::move(c), m, p);
}

std::vector<long> fp_powmod(std::vector<long> base, BigInt exp, const std::vector<long>& m, long p) {
    std::vector<long> r = {1};
    base = fp_rem(std::move(base), m, p);
    while (exp > 0) {
        if (exp % 2 == 1) r = fp_mulmod(r, base, m, p);
        base = fp_mulmod(base, base, m, p);
        exp /= 2;
    }
    return r;
}

std::vector<long> fp_gcd(std::vector<long> a, std::vector<long> b, long p) {
    a = fp_trim(std::move(a));
    b = fp_trim(std::move(b));
    while (!b.empty()) {
        // make b monic before reducing
        long inv = 1;
        {
            long lead = b.back();
            long t = lead % p;
            // Fermat inverse
            long e = p - 2, acc = 1;
            while (e) {
                if (e & 1) acc = (acc * t) % p;
                t = (t * t) % p;
                e >>= 1;
            }
            inv = acc;
        }
        std::vector<long> bm(b);
        for (auto& x : bm) x = (x * inv) % p;
        auto r = fp_rem(a, bm, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

bool fp_irreducible(const std::vector<long>& m, long p) {
    long f = (long)m.size() - 1;
    if (f <= 0) return false;
    std::vector<long> x = {0, 1};
    // x^(p^f) == x mod m
    auto xq = fp_powmod(x, pow_int(p, f), m, p);
    std::vector<long> diff = xq;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = ((diff[1] - 1) % p + p) % p;
    if (!fp_trim(diff).empty()) return false;
    // gcd(x^(p^(f/q)) - x, m) == 1 for prime divisors q of f
    for (long q = 2; q <= f; ++q) {
        if (f % q != 0) continue;
        bool prime = true;
        for (long d = 2; d * d <= q; ++d)
            if (q % d == 0) prime = false;
        if (!prime) continue;
        auto xe = fp_powmod(x, pow_int(p, f / q), m, p);
        std::vector<long> g = xe;
        if (g.size() < 2) g.resize(2, 0);
        g[1] = ((g[1] - 1) % p + p) % p;
        auto gg = fp_gcd(fp_trim(g), m, p);
        if (gg.size() != 1) return false;
    }
    return true;
}

// Lexicographically least monic irreducible of degree f over F_p,
// coefficients ordered from the constant term up.
std::vector<long> least_irreducible(long p, int f) {
    if (f == 1) return {0, 1};
    std::vector<long> coeffs(f, 0);
    while (true) {
        std::vector<long> m(coeffs);
        m.push_back(1);
        if (fp_irreducible(m, p)) return m;
        int i = 0;
        while (i < f && coeffs[i] == p - 1) coeffs[i++] = 0;
        if (i == f) fail(ErrorKind::Internal, "no irreducible polynomial found");
        ++coeffs[i];
    }
}

BigInt rational_mod(const Rational& q, const BigInt& m, long p) {
    BigInt n = mod_pos(numerator(q), m);
    BigInt d = denominator(q);
    if (d == 1) return n;
    if (d % p == 0) fail(ErrorKind::Internal, "rational with p in denominator where integral expected");
    return mod_pos(n * mod_inverse(d, m), m);
}

} // namespace

// ---------------------------------------------------------------------------
// LocalField

FieldPtr LocalField::qp(long p, int precision) {
    if (p < 2) fail(ErrorKind::MalformedInput, "p must be a prime >= 2");
    if (precision < 1) fail(ErrorKind::MalformedInput, "precision must be >= 1");
    auto F = std::shared_ptr<LocalField>(new LocalField());
    F->p_ = p;
    F->f_ = 1;
    F->e_ = 1;
    F->precision_ = precision;
    F->unram_poly_ = {0, 1};
    F->build_tables();
    return F;
}

FieldPtr LocalField::make_extension(const FieldPtr& base, int f,
                                    const std::vector<std::vector<Rational>>& eisenstein_coeffs) {
    if (!base || !base->is_qp())
        fail(ErrorKind::MalformedInput, "extensions are modeled as a single two-step tower over Q_p");
    if (f < 1) fail(ErrorKind::MalformedInput, "unramified degree must be >= 1");
    long p = base->p();
    int e = eisenstein_coeffs.empty() ? 1 : (int)eisenstein_coeffs.size();
    if (e % p == 0) fail(ErrorKind::WildExtension, "ramification index " + std::to_string(e) +
                                                       " is divisible by p = " + std::to_string(p));
    auto F = std::shared_ptr<LocalField>(new LocalField());
    F->p_ = p;
    F->f_ = f;
    F->e_ = e;
    F->precision_ = base->precision();
    F->base_ = base;
    F->unram_poly_ = least_irreducible(p, f);

    // normalize the coefficients to full u-coordinate vectors and run the
    // Eisenstein criterion: nu(a_i) >= 1 for all i, nu(a_0) = 1 exactly.
    for (int i = 0; i < e && e > 1; ++i) {
        const auto& given = eisenstein_coeffs[i];
        if (given.size() != 1 && (int)given.size() != f)
            fail(ErrorKind::MalformedInput, "Eisenstein coefficient must have 1 or f coordinates");
        std::vector<Rational> coords(f, Rational(0));
        for (size_t j = 0; j < given.size(); ++j) coords[j] = given[j];
        Rational v;
        bool nonzero = false;
        for (const auto& q : coords) {
            if (q == 0) continue;
            Rational vq(split_p(q, p).val);
            if (!nonzero || vq < v) v = vq;
            nonzero = true;
        }
        if (i == 0) {
            if (!nonzero || v != 1)
                fail(ErrorKind::NotEisenstein, "constant term must have valuation exactly 1");
        } else if (nonzero && v < 1) {
            fail(ErrorKind::NotEisenstein, "coefficient of t^" + std::to_string(i) + " has valuation < 1");
        }
        F->eis_.push_back(std::move(coords));
    }
    F->build_tables();
    return F;
}

void LocalField::build_tables() {
    // u^m in the u-basis, exact integers, m = 0..2f-2
    u_pow_.assign(std::max(1, 2 * f_ - 1), std::vector<BigInt>(f_, BigInt(0)));
    for (int m = 0; m < f_; ++m) u_pow_[m][m] = 1;
    for (int m = f_; m <= 2 * f_ - 2; ++m) {
        // u^m = u * u^(m-1), then reduce u^f = -(m_0 + ... + m_{f-1} u^{f-1})
        std::vector<BigInt> prev = u_pow_[m - 1];
        std::vector<BigInt> cur(f_ + 1, BigInt(0));
        for (int j = 0; j < f_; ++j) cur[j + 1] = prev[j];
        BigInt top = cur[f_];
        for (int j = 0; j < f_; ++j) cur[j] -= top * unram_poly_[j];
        cur.resize(f_);
        u_pow_[m] = std::move(cur);
    }

    // pi^m in tower coordinates, exact rationals, m = 0..2e-2
    auto umul_rat = [&](const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> conv(2 * f_ - 1, Rational(0));
        for (int i = 0; i < f_; ++i)
            for (int j = 0; j < f_; ++j) conv[i + j] += a[i] * b[j];
        std::vector<Rational> out(f_, Rational(0));
        for (int m = 0; m < (int)conv.size(); ++m)
            for (int j = 0; j < f_; ++j) out[j] += conv[m] * Rational(u_pow_[m][j]);
        return out;
    };

    int dim = e_ * f_;
    pi_pow_.assign(std::max(1, 2 * e_ - 1), std::vector<Rational>(dim, Rational(0)));
    for (int m = 0; m < e_; ++m) pi_pow_[m][m * f_] = 1;
    // pi^e = -(a_0 + a_1 pi + ... + a_{e-1} pi^{e-1}), so for m >= e
    // pi^m = -sum_k a_k pi^(m-e+k), and every index m-e+k is < m.
    for (int m = e_; m <= 2 * e_ - 2; ++m) {
        std::vector<Rational>& out = pi_pow_[m];
        for (int k = 0; k < e_; ++k) {
            const auto& a_k = eis_[k];
            if (std::all_of(a_k.begin(), a_k.end(), [](const Rational& q) { return q == 0; })) continue;
            const auto& low = pi_pow_[m - e_ + k];
            for (int i = 0; i < e_; ++i) {
                std::vector<Rational> li(low.begin() + i * f_, low.begin() + (i + 1) * f_);
                if (std::all_of(li.begin(), li.end(), [](const Rational& q) { return q == 0; })) continue;
                auto prod = umul_rat(a_k, li);
                for (int j = 0; j < f_; ++j) out[i * f_ + j] -= prod[j];
            }
        }
    }
}

std::string LocalField::description() const {
    std::ostringstream os;
    os << "Q_" << p_;
    if (!is_qp()) os << "[f=" << f_ << ",e=" << e_ << "]";
    return os.str();
}

bool LocalField::same_field(const LocalField& other) const {
    return p_ == other.p_ && f_ == other.f_ && e_ == other.e_ && eis_ == other.eis_;
}

bool LocalField::coercible_from(const LocalField& src) const {
    if (same_field(src)) return true;
    if (src.p_ != p_) return false;
    if (src.is_qp()) return true;
    // unramified subfield of the same tower
    return src.e_ == 1 && src.f_ == f_;
}

ResidueElem LocalField::res_one() const { return res_from_int(1); }

ResidueElem LocalField::res_from_int(long a) const {
    ResidueElem r{std::vector<long>(f_, 0)};
    r.c[0] = ((a % p_) + p_) % p_;
    return r;
}

ResidueElem LocalField::res_add(const ResidueElem& a, const ResidueElem& b) const {
    ResidueElem r{std::vector<long>(f_, 0)};
    for (int j = 0; j < f_; ++j) r.c[j] = (a.c[j] + b.c[j]) % p_;
    return r;
}

ResidueElem LocalField::res_sub(const ResidueElem& a, const ResidueElem& b) const {
    ResidueElem r{std::vector<long>(f_, 0)};
    for (int j = 0; j < f_; ++j) r.c[j] = ((a.c[j] - b.c[j]) % p_ + p_) % p_;
    return r;
}

ResidueElem LocalField::res_neg(const ResidueElem& a) const { return res_sub(res_zero(), a); }

ResidueElem LocalField::res_mul(const ResidueElem& a, const ResidueElem& b) const {
    std::vector<long> conv(2 * f_ - 1, 0);
    for (int i = 0; i < f_; ++i)
        for (int j = 0; j < f_; ++j) conv[i + j] = (conv[i + j] + a.c[i] * b.c[j]) % p_;
    ResidueElem r{std::vector<long>(f_, 0)};
    for (int m = 0; m < (int)conv.size(); ++m)
        for (int j = 0; j < f_; ++j)
            r.c[j] = ((r.c[j] + conv[m] * (long)(u_pow_[m][j] % p_)) % p_ + p_) % p_;
    return r;
}

ResidueElem LocalField::res_pow(const ResidueElem& a, BigInt k) const {
    ResidueElem r = res_one(), base = a;
    while (k > 0) {
        if (k % 2 == 1) r = res_mul(r, base);
        base = res_mul(base, base);
        k /= 2;
    }
    return r;
}

ResidueElem LocalField::res_inv(const ResidueElem& a) const {
    if (a.is_zero()) fail(ErrorKind::Internal, "residue inverse of zero");
    return res_pow(a, pow_int(p_, f_) - 2);
}

std::vector<ResidueElem> LocalField::res_all_elements() const {
    std::vector<ResidueElem> all;
    std::vector<long> c(f_, 0);
    while (true) {
        all.push_back(ResidueElem{c});
        int i = 0;
        while (i < f_ && c[i] == p_ - 1) c[i++] = 0;
        if (i == f_) break;
        ++c[i];
    }
    return all;
}

bool LocalField::res_is_square(const ResidueElem& a) const {
    if (p_ == 2) fail(ErrorKind::Internal, "res_is_square requires p odd");
    if (a.is_zero()) return true;
    auto e = res_pow(a, (pow_int(p_, f_) - 1) / 2);
    return e == res_one();
}

// ---------------------------------------------------------------------------
// Scalar

namespace {

// U-multiplication of f-coordinate vectors mod m.
std::vector<BigInt> umul_mod(const LocalField& F, const std::vector<BigInt>& a, const std::vector<BigInt>& b,
                             const BigInt& m) {
    int f = F.f();
    if (f == 1) return {mod_pos(a[0] * b[0], m)};
    std::vector<BigInt> conv(2 * f - 1, BigInt(0));
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j) conv[i + j] += a[i] * b[j];
    std::vector<BigInt> out(f, BigInt(0));
    const auto& tab = F.u_power_table();
    for (int mm = 0; mm < (int)conv.size(); ++mm)
        for (int j = 0; j < f; ++j) out[j] += conv[mm] * tab[mm][j];
    for (auto& x : out) x = mod_pos(x, m);
    return out;
}

// Full tower multiplication of coordinate vectors mod m.
std::vector<BigInt> tower_mul_mod(const LocalField& F, const std::vector<BigInt>& a, const std::vector<BigInt>& b,
                                  const BigInt& m) {
    int e = F.e(), f = F.f(), dim = e * f;
    if (dim == 1) return {mod_pos(a[0] * b[0], m)};
    std::vector<std::vector<BigInt>> w(2 * e - 1, std::vector<BigInt>(f, BigInt(0)));
    for (int i = 0; i < e; ++i) {
        std::vector<BigInt> ai(a.begin() + i * f, a.begin() + (i + 1) * f);
        bool zero = std::all_of(ai.begin(), ai.end(), [](const BigInt& x) { return x == 0; });
        if (zero) continue;
        for (int j = 0; j < e; ++j) {
            std::vector<BigInt> bj(b.begin() + j * f, b.begin() + (j + 1) * f);
            bool zb = std::all_of(bj.begin(), bj.end(), [](const BigInt& x) { return x == 0; });
            if (zb) continue;
            auto prod = umul_mod(F, ai, bj, m);
            for (int t = 0; t < f; ++t) w[i + j][t] = mod_pos(w[i + j][t] + prod[t], m);
        }
    }
    std::vector<BigInt> out(dim, BigInt(0));
    for (int i = 0; i < e; ++i)
        for (int t = 0; t < f; ++t) out[i * f + t] = w[i][t];
    const auto& pitab = F.pi_power_table();
    for (int mm = e; mm <= 2 * e - 2; ++mm) {
        bool zero = std::all_of(w[mm].begin(), w[mm].end(), [](const BigInt& x) { return x == 0; });
        if (zero) continue;
        // w[mm] * pi^mm: multiply the U-element w[mm] into each U-row of pi^mm
        for (int i = 0; i < e; ++i) {
            std::vector<BigInt> row(f, BigInt(0));
            bool rz = true;
            for (int j = 0; j < f; ++j) {
                const Rational& q = pitab[mm][i * f + j];
                if (q != 0) {
                    row[j] = rational_mod(q, m, F.p());
                    rz = false;
                }
            }
            if (rz) continue;
            auto prod = umul_mod(F, w[mm], row, m);
            for (int t = 0; t < f; ++t) out[i * f + t] = mod_pos(out[i * f + t] + prod[t], m);
        }
    }
    return out;
}

} // namespace

Scalar::Scalar(FieldPtr F, long shift, std::vector<BigInt> c, long digits, bool exact_zero)
    : F_(std::move(F)), shift_(shift), c_(std::move(c)), digits_(digits), exact_zero_(exact_zero) {
    normalize();
}

void Scalar::normalize() {
    int dim = F_->degree();
    if (exact_zero_) {
        shift_ = 0;
        digits_ = 0;
        c_.assign(dim, BigInt(0));
        return;
    }
    if (digits_ < 0) digits_ = 0;
    if ((int)c_.size() != dim) c_.resize(dim, BigInt(0));
    if (digits_ == 0) {
        c_.assign(dim, BigInt(0));
        return;
    }
    BigInt m = pow_int(F_->p(), digits_);
    long minval = digits_;
    for (auto& x : c_) {
        x = mod_pos(x, m);
        if (x != 0) minval = std::min(minval, val_p_big(x, F_->p(), digits_));
    }
    if (minval >= digits_) {
        // approximately zero: canonical form keeps only the bound
        shift_ += digits_;
        digits_ = 0;
        c_.assign(dim, BigInt(0));
        return;
    }
    if (minval > 0) {
        BigInt d = pow_int(F_->p(), minval);
        for (auto& x : c_) x /= d;
        shift_ += minval;
        digits_ -= minval;
    }
}

Scalar Scalar::zero(const FieldPtr& F) { return Scalar(F, 0, std::vector<BigInt>(F->degree(), BigInt(0)), 0, true); }

Scalar Scalar::one(const FieldPtr& F) { return integer(F, 1); }

Scalar Scalar::integer(const FieldPtr& F, const BigInt& a) { return rational(F, Rational(a)); }

Scalar Scalar::rational(const FieldPtr& F, const Rational& q) {
    if (q == 0) return zero(F);
    auto sp = split_p(q, F->p());
    long digits = F->precision() - sp.val;
    std::vector<BigInt> c(F->degree(), BigInt(0));
    if (digits <= 0) {
        // the literal lies beyond the carried absolute precision
        return Scalar(F, F->precision(), std::move(c), 0, false);
    }
    BigInt m = pow_int(F->p(), digits);
    c[0] = rational_mod(sp.unit, m, F->p());
    return Scalar(F, sp.val, std::move(c), digits, false);
}

Scalar Scalar::uniformizer(const FieldPtr& F) {
    if (F->e() == 1) return rational(F, Rational(F->p()));
    std::vector<Rational> coords(F->degree(), Rational(0));
    coords[F->f()] = 1; // pi
    return from_tower_coords(F, coords);
}

Scalar Scalar::approx_zero(const FieldPtr& F, const Rational& bound) {
    if (!is_integer(bound)) fail(ErrorKind::MalformedInput, "approx-zero bound must be an integer valuation");
    return Scalar(F, (long)floor_big(bound), std::vector<BigInt>(F->degree(), BigInt(0)), 0, false);
}

Scalar Scalar::from_tower_coords(const FieldPtr& F, const std::vector<Rational>& coords) {
    int dim = F->degree();
    std::vector<Rational> full(dim, Rational(0));
    if ((int)coords.size() > dim) fail(ErrorKind::MalformedInput, "too many tower coordinates");
    for (size_t i = 0; i < coords.size(); ++i) full[i] = coords[i];
    long vmin = 0;
    bool nonzero = false;
    for (const auto& q : full) {
        if (q == 0) continue;
        long v = split_p(q, F->p()).val;
        if (!nonzero || v < vmin) vmin = v;
        nonzero = true;
    }
    if (!nonzero) return zero(F);
    long digits = F->precision() - vmin;
    std::vector<BigInt> c(dim, BigInt(0));
    if (digits <= 0) return Scalar(F, F->precision(), std::move(c), 0, false);
    BigInt m = pow_int(F->p(), digits);
    BigInt scale = pow_int(F->p(), -vmin < 0 ? 0 : -vmin);
    for (int i = 0; i < dim; ++i) {
        if (full[i] == 0) continue;
        Rational scaled = vmin >= 0 ? full[i] / Rational(pow_int(F->p(), vmin)) : full[i] * Rational(scale);
        c[i] = rational_mod(scaled, m, F->p());
    }
    return Scalar(F, vmin, std::move(c), digits, false);
}

bool Scalar::is_zero_at_precision() const { return exact_zero_ || digits_ == 0; }

Valuation Scalar::val() const {
    if (exact_zero_) return Valuation::infinite();
    if (digits_ == 0) return Valuation::at_least(Rational(shift_));
    int e = F_->e(), f = F_->f();
    Rational best;
    bool seen = false;
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < f; ++j) {
            const BigInt& x = c_[i * f + j];
            if (x == 0) continue;
            long v = val_p_big(x, F_->p(), digits_);
            Rational cand = Rational(v) + Rational(i, e);
            if (!seen || cand < best) {
                best = cand;
                seen = true;
            }
        }
    if (!seen) return Valuation::at_least(Rational(shift_ + digits_));
    return Valuation::finite(Rational(shift_) + best);
}

Rational Scalar::val_exact() const {
    Valuation v = val();
    if (v.is_finite()) return v.value();
    if (v.is_infinite())
        fail(ErrorKind::InsufficientPrecision, "valuation of the exact zero is +infinity");
    fail(ErrorKind::InsufficientPrecision,
         "value vanishes to precision; only nu >= " + rational_str(v.value()) + " is known");
}

bool Scalar::val_at_least(const Rational& c, bool strict) const {
    Valuation v = val();
    if (v.is_infinite()) return true;
    if (v.is_finite()) return strict ? v.value() > c : v.value() >= c;
    const Rational& bound = v.value();
    if (strict ? bound > c : bound >= c) return true;
    fail(ErrorKind::InsufficientPrecision, "cannot decide nu >= " + rational_str(c) + " (known only nu >= " +
                                               rational_str(bound) + ")");
}

std::optional<Rational> Scalar::abs_precision() const {
    if (exact_zero_) return std::nullopt;
    return Rational(shift_ + digits_);
}

Scalar Scalar::coerced_to(const FieldPtr& F) const {
    if (F->same_field(*F_)) return Scalar(F, shift_, c_, digits_, exact_zero_);
    if (!F->coercible_from(*F_))
        fail(ErrorKind::MalformedInput, "no coercion from " + F_->description() + " to " + F->description());
    std::vector<BigInt> c(F->degree(), BigInt(0));
    // Q_p or the unramified step embed onto the pi^0 block
    for (size_t i = 0; i < c_.size(); ++i) c[i] = c_[i];
    return Scalar(F, shift_, std::move(c), digits_, exact_zero_);
}

ResidueElem Scalar::residue() const {
    if (exact_zero_) return F_->res_zero();
    Valuation v = val();
    if (v.kind() == ValKind::AtLeast) {
        if (v.value() > 0) return F_->res_zero();
        fail(ErrorKind::InsufficientPrecision, "residue undecidable at carried precision");
    }
    if (v.value() < 0) fail(ErrorKind::PreconditionViolated, "residue of a non-integral element");
    if (v.value() > 0) return F_->res_zero();
    ResidueElem r{std::vector<long>(F_->f(), 0)};
    for (int j = 0; j < F_->f(); ++j) r.c[j] = (long)(c_[j] % F_->p());
    return r;
}

Scalar Scalar::reduced_mod(long k) const {
    if (!F_->is_qp()) fail(ErrorKind::MalformedInput, "reduced_mod is defined over Q_p only");
    if (exact_zero_) return zero(F_);
    if (digits_ == 0) {
        if (shift_ >= k) return zero(F_);
        fail(ErrorKind::InsufficientPrecision, "cannot reduce mod p^" + std::to_string(k));
    }
    if (shift_ + digits_ < k) fail(ErrorKind::InsufficientPrecision, "cannot reduce mod p^" + std::to_string(k));
    if (shift_ >= k) return zero(F_);
    BigInt c0 = c_[0] % pow_int(F_->p(), k - shift_);
    if (c0 == 0) return zero(F_);
    Rational value = Rational(c0) * (shift_ >= 0 ? Rational(pow_int(F_->p(), shift_))
                                                 : Rational(1, pow_int(F_->p(), -shift_)));
    return rational(F_, value);
}

Scalar Scalar::shifted(long k) const {
    if (exact_zero_) return *this;
    return Scalar(F_, shift_ + k, c_, digits_, false);
}

std::vector<Scalar> Scalar::tower_coords() const {
    FieldPtr qp = F_->is_qp() ? F_ : F_->base();
    std::vector<Scalar> out;
    int dim = F_->degree();
    out.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        if (exact_zero_)
            out.push_back(zero(qp));
        else
            out.push_back(Scalar(qp, shift_, {c_[i]}, digits_, false));
    }
    return out;
}

Scalar Scalar::operator-() const {
    if (exact_zero_ || digits_ == 0) return *this;
    BigInt m = pow_int(F_->p(), digits_);
    std::vector<BigInt> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) c[i] = mod_pos(-c_[i], m);
    return Scalar(F_, shift_, std::move(c), digits_, false);
}

namespace {

std::pair<Scalar, Scalar> unify(const Scalar& a, const Scalar& b) {
    if (a.field()->same_field(*b.field())) return {a, b};
    if (a.field()->coercible_from(*b.field())) return {a, b.coerced_to(a.field())};
    if (b.field()->coercible_from(*a.field())) return {a.coerced_to(b.field()), b};
    fail(ErrorKind::MalformedInput,
         "incompatible fields " + a.field()->description() + " and " + b.field()->description());
}

} // namespace

Scalar operator+(const Scalar& a0, const Scalar& b0) {
    auto [a, b] = unify(a0, b0);
    if (a.is_exact_zero()) return b;
    if (b.is_exact_zero()) return a;
    const FieldPtr& F = a.field();
    long abs_a = a.shift() + a.digits(), abs_b = b.shift() + b.digits();
    long shift = std::min(a.shift(), b.shift());
    long digits = std::min(abs_a, abs_b) - shift;
    if (digits <= 0) return Scalar::approx_zero(F, Rational(std::min(abs_a, abs_b)));
    BigInt m = pow_int(F->p(), digits);
    BigInt pa = pow_int(F->p(), a.shift() - shift), pb = pow_int(F->p(), b.shift() - shift);
    std::vector<BigInt> c(F->degree(), BigInt(0));
    for (int i = 0; i < F->degree(); ++i) c[i] = mod_pos(a.coords()[i] * pa + b.coords()[i] * pb, m);
    return Scalar(F, shift, std::move(c), digits, false);
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a0, const Scalar& b0) {
    auto [a, b] = unify(a0, b0);
    const FieldPtr& F = a.field();
    if (a.is_exact_zero() || b.is_exact_zero()) return Scalar::zero(F);
    if (a.digits() == 0 || b.digits() == 0) {
        // bound of the product: nu(a) + nu(b) from whatever is known
        Rational ba = a.digits() == 0 ? Rational(a.shift()) : a.val_exact();
        Rational bb = b.digits() == 0 ? Rational(b.shift()) : b.val_exact();
        return Scalar::approx_zero(F, Rational(floor_big(ba + bb)));
    }
    long digits = std::min(a.digits(), b.digits());
    BigInt m = pow_int(F->p(), digits);
    auto c = tower_mul_mod(*F, a.coords(), b.coords(), m);
    return Scalar(F, a.shift() + b.shift(), std::move(c), digits, false);
}

Scalar Scalar::inverse() const {
    if (exact_zero_) fail(ErrorKind::DivisionByApproxZero, "inverse of the exact zero");
    if (digits_ == 0)
        fail(ErrorKind::DivisionByApproxZero,
             "inverse of a value that vanishes to precision (nu >= " + std::to_string(shift_) + ")");
    const LocalField& F = *F_;
    int e = F.e(), f = F.f();
    // fractional part of the valuation, in pi-units
    Rational m = val().value() - Rational(shift_);
    long w = (long)(numerator(m * e) / denominator(m * e));

    std::vector<BigInt> unit = c_;
    long digits = digits_;
    long extra_shift = 0;
    if (w != 0) {
        // multiply by pi^(e-w), then divide by p to reach a unit
        std::vector<BigInt> piq(F.degree(), BigInt(0));
        piq[(e - w) * f] = 1;
        BigInt mod = pow_int(F.p(), digits);
        unit = tower_mul_mod(F, unit, piq, mod);
        for (auto& x : unit) {
            if (x % F.p() != 0) fail(ErrorKind::Internal, "expected divisibility in inverse");
            x /= F.p();
        }
        digits -= 1;
        if (digits <= 0) fail(ErrorKind::InsufficientPrecision, "no digits left to invert");
        extra_shift = 1;
    }
    BigInt mod = pow_int(F.p(), digits);
    for (auto& x : unit) x = mod_pos(x, mod);

    // Newton iteration from the residue inverse
    ResidueElem r0{std::vector<long>(f, 0)};
    for (int j = 0; j < f; ++j) r0.c[j] = (long)(unit[j] % F.p());
    if (r0.is_zero()) fail(ErrorKind::Internal, "unit with zero residue in inverse");
    ResidueElem ri = F.res_inv(r0);
    std::vector<BigInt> x(F.degree(), BigInt(0));
    for (int j = 0; j < f; ++j) x[j] = ri.c[j];
    for (int it = 0; it < 64; ++it) {
        auto prod = tower_mul_mod(F, unit, x, mod);
        bool done = prod[0] == 1;
        for (size_t i = 1; done && i < prod.size(); ++i) done = prod[i] == 0;
        if (done) break;
        // x <- x(2 - unit x)
        std::vector<BigInt> t(F.degree(), BigInt(0));
        for (int i = 0; i < F.degree(); ++i) t[i] = mod_pos(-prod[i], mod);
        t[0] = mod_pos(t[0] + 2, mod);
        x = tower_mul_mod(F, x, t, mod);
        if (it == 63) fail(ErrorKind::Internal, "inverse iteration failed to converge");
    }
    if (w == 0) return Scalar(F_, -shift_, std::move(x), digits, false);
    // z = p^(shift+1) * pi^(w-e) * unit  =>  z^{-1} = p^(-shift-1) * pi^(e-w) * unit^{-1}
    std::vector<BigInt> piq(F.degree(), BigInt(0));
    piq[(e - w) * f] = 1;
    auto res = tower_mul_mod(F, x, piq, mod);
    return Scalar(F_, -shift_ - extra_shift, std::move(res), digits, false);
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

bool approx_equal(const Scalar& a, const Scalar& b) { return (a - b).is_zero_at_precision(); }

std::string Valuation::render() const {
    switch (kind_) {
        case ValKind::Finite: return rational_str(v_);
        case ValKind::AtLeast: return ">=" + rational_str(v_);
        case ValKind::Infinite: return "+inf";
    }
    return "?";
}

std::string Scalar::render() const {
    if (F_->is_qp()) {
        if (exact_zero_) return "0";
        if (digits_ == 0) return "O(p^" + std::to_string(shift_) + ")";
        std::ostringstream os;
        os << c_[0];
        if (shift_ != 0) os << "*p^" << shift_;
        return os.str();
    }
    std::ostringstream os;
    os << "[";
    auto coords = tower_coords();
    for (size_t i = 0; i < coords.size(); ++i) {
        if (i) os << ", ";
        os << coords[i].render();
    }
    os << "]";
    return os.str();
}

Scalar sqrt_unit(const Scalar& a) {
    const FieldPtr& F = a.field();
    if (F->p() == 2) fail(ErrorKind::MalformedInput, "sqrt_unit requires p odd");
    Rational v = a.val_exact();
    if (v != 0) fail(ErrorKind::PreconditionViolated, "sqrt_unit requires a unit");
    ResidueElem r = a.residue();
    ResidueElem root = F->res_zero();
    bool found = false;
    for (const auto& cand : F->res_all_elements()) {
        if (F->res_mul(cand, cand) == r) {
            root = cand;
            found = true;
            break;
        }
    }
    if (!found) fail(ErrorKind::PreconditionViolated, "sqrt_unit: residue is not a square");
    std::vector<Rational> coords(F->degree(), Rational(0));
    for (int j = 0; j < F->f(); ++j) coords[j] = root.c[j];
    Scalar x = Scalar::from_tower_coords(F, coords);
    Scalar two = Scalar::integer(F, 2);
    for (int it = 0; it < 64; ++it) {
        Scalar err = x * x - a;
        if (err.is_zero_at_precision()) break;
        x = (x + a / x) / two;
        if (it == 63) fail(ErrorKind::Internal, "sqrt iteration failed to converge");
    }
    return x;
}

QmodZ frac_principal(const Scalar& z) {
    if (!z.field()->is_qp()) fail(ErrorKind::MalformedInput, "frac_principal is defined over Q_p only");
    if (z.is_exact_zero()) return QmodZ();
    if (z.digits() == 0) {
        if (z.shift() >= 0) return QmodZ();
        fail(ErrorKind::InsufficientPrecision, "principal part hidden below precision");
    }
    if (z.shift() >= 0) return QmodZ();
    if (z.shift() + z.digits() < 0)
        fail(ErrorKind::InsufficientPrecision, "carried precision does not reach level 0");
    BigInt denom = pow_int(z.field()->p(), -z.shift());
    BigInt c0 = z.coords()[0] % denom;
    return QmodZ::from_rational(Rational(c0, denom));
}

} // namespace charloc
