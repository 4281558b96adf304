#include "charloc/numeric.hpp"

#include <sstream>

namespace charloc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
        case ErrorKind::DivisionByApproxZero: return "DivisionByApproxZero";
        case ErrorKind::WildExtension: return "WildExtension";
        case ErrorKind::NotEisenstein: return "NotEisenstein";
        case ErrorKind::PrecisionTooLowToSeparateRoots: return "PrecisionTooLowToSeparateRoots";
        case ErrorKind::Inseparable: return "Inseparable";
        case ErrorKind::NotRegular: return "NotRegular";
        case ErrorKind::WildTorus: return "WildTorus";
        case ErrorKind::NotCompact: return "NotCompact";
        case ErrorKind::NotInTorus: return "NotInTorus";
        case ErrorKind::PointNotFixed: return "PointNotFixed";
        case ErrorKind::ZeroAtPrecision: return "ZeroAtPrecision";
        case ErrorKind::NotABreak: return "NotABreak";
        case ErrorKind::NonPositiveDepth: return "NonPositiveDepth";
        case ErrorKind::OutOfAbelianRange: return "OutOfAbelianRange";
        case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::AmbiguousAtPrecision: return "AmbiguousAtPrecision";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::MalformedInput: return "MalformedInput";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

BigInt floor_big(const Rational& q) {
    BigInt n = numerator(q), d = denominator(q);
    BigInt quot = n / d;
    if (n % d != 0 && ((n < 0) != (d < 0))) quot -= 1;
    return quot;
}

BigInt ceil_big(const Rational& q) { return -floor_big(-q); }

PAdicSplit split_p(const Rational& q, long p) {
    if (q == 0) fail(ErrorKind::Internal, "split_p of zero");
    BigInt n = numerator(q), d = denominator(q);
    long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    while (d % p == 0) {
        d /= p;
        --v;
    }
    return PAdicSplit{v, Rational(n, d)};
}

BigInt mod_inverse(const BigInt& c, const BigInt& m) {
    // extended Euclid
    BigInt a = mod_pos(c, m), b = m;
    BigInt x0 = 1, x1 = 0;
    while (b != 0) {
        BigInt q = a / b;
        BigInt t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
    }
    if (a != 1) fail(ErrorKind::Internal, "mod_inverse: not invertible");
    return mod_pos(x0, m);
}

long val_p_big(const BigInt& c, long p, long cap) {
    if (c == 0) return cap;
    BigInt x = c;
    long v = 0;
    while (v < cap && x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

std::string rational_str(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

Rational parse_rational(const std::string& text) {
    // integer or a/b, optional leading sign; no embedded whitespace
    std::string s;
    s.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        // map U+2212 (minus sign) to '-'
        if (i + 2 < text.size() && (unsigned char)text[i] == 0xE2 && (unsigned char)text[i + 1] == 0x88 &&
            (unsigned char)text[i + 2] == 0x92) {
            s += '-';
            i += 2;
        } else if (!isspace((unsigned char)text[i])) {
            s += text[i];
        }
    }
    if (s.empty()) fail(ErrorKind::ParseError, "empty rational literal");
    size_t pos = 0;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') {
        neg = s[pos] == '-';
        ++pos;
    }
    auto read_digits = [&](const char* what) {
        size_t start = pos;
        while (pos < s.size() && isdigit((unsigned char)s[pos])) ++pos;
        if (pos == start) fail(ErrorKind::ParseError, std::string("expected digits for ") + what + " at position " +
                                                          std::to_string(start) + " in '" + s + "'");
        return BigInt(s.substr(start, pos - start));
    };
    BigInt num = read_digits("numerator");
    BigInt den = 1;
    if (pos < s.size() && s[pos] == '/') {
        ++pos;
        den = read_digits("denominator");
        if (den == 0) fail(ErrorKind::ParseError, "zero denominator in '" + s + "'");
    }
    if (pos != s.size())
        fail(ErrorKind::ParseError, "unexpected character at position " + std::to_string(pos) + " in '" + s + "'");
    Rational q(num, den);
    return neg ? Rational(-q) : q;
}

} // namespace charloc
