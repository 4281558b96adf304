#include "charloc/scalar_io.hpp"

#include <cctype>

namespace charloc {

namespace {

std::string normalize_minus(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (i + 2 < text.size() && (unsigned char)text[i] == 0xE2 && (unsigned char)text[i + 1] == 0x88 &&
            (unsigned char)text[i + 2] == 0x92) {
            s += '-';
            i += 2;
        } else if (!isspace((unsigned char)text[i])) {
            s += text[i];
        }
    }
    return s;
}

struct Cursor {
    const std::string& s;
    size_t pos = 0;

    bool eof() const { return pos >= s.size(); }
    char peek() const { return eof() ? '\0' : s[pos]; }
    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void error(const std::string& what) const {
        fail(ErrorKind::ParseError, what + " at position " + std::to_string(pos) + " in '" + s + "'");
    }
    BigInt digits(const char* what) {
        size_t start = pos;
        while (!eof() && isdigit((unsigned char)s[pos])) ++pos;
        if (pos == start) error(std::string("expected digits for ") + what);
        return BigInt(s.substr(start, pos - start));
    }
    long signed_long(const char* what) {
        bool neg = consume('-');
        if (!neg) consume('+');
        BigInt d = digits(what);
        return neg ? -(long)d : (long)d;
    }
};

Rational parse_mantissa_shift(Cursor& cur, long p) {
    bool neg = cur.consume('-');
    if (!neg) cur.consume('+');
    BigInt num = cur.digits("numerator");
    BigInt den = 1;
    if (cur.consume('/')) {
        den = cur.digits("denominator");
        if (den == 0) cur.error("zero denominator");
    }
    Rational q(num, den);
    if (neg) q = -q;
    if (cur.consume('*')) {
        if (!cur.consume('p')) cur.error("expected 'p' after '*'");
        if (!cur.consume('^')) cur.error("expected '^' after 'p'");
        long k = cur.signed_long("exponent");
        q *= k >= 0 ? Rational(pow_int(p, k)) : Rational(1, pow_int(p, -k));
    }
    return q;
}

} // namespace

Rational parse_scalar_rational(const std::string& text, long p) {
    std::string s = normalize_minus(text);
    Cursor cur{s};
    Rational q = parse_mantissa_shift(cur, p);
    if (!cur.eof()) cur.error("unexpected trailing characters");
    return q;
}

Scalar parse_scalar(const std::string& text, const FieldPtr& F) {
    std::string s = normalize_minus(text);
    if (s.empty()) fail(ErrorKind::ParseError, "empty scalar literal");
    Cursor cur{s};
    if (s.rfind("O(p^", 0) == 0) {
        cur.pos = 4;
        long b = cur.signed_long("precision bound");
        if (!cur.consume(')') || !cur.eof()) cur.error("malformed O(p^k) literal");
        return Scalar::approx_zero(F, Rational(b));
    }
    if (cur.consume('[')) {
        std::vector<Rational> coords;
        if (!cur.consume(']')) {
            while (true) {
                coords.push_back(parse_mantissa_shift(cur, F->p()));
                if (cur.consume(']')) break;
                if (!cur.consume(',')) cur.error("expected ',' or ']' in coordinate list");
            }
        }
        if (!cur.eof()) cur.error("unexpected trailing characters");
        if ((int)coords.size() > F->degree())
            fail(ErrorKind::ParseError, "too many coordinates for " + F->description());
        return Scalar::from_tower_coords(F, coords);
    }
    Rational q = parse_mantissa_shift(cur, F->p());
    if (!cur.eof()) cur.error("unexpected trailing characters");
    return Scalar::rational(F, q);
}

std::string render_scalar(const Scalar& z) { return z.render(); }

} // namespace charloc
