#pragma once

#include <stdexcept>
#include <string>

namespace charloc {

// Every failure mode the library reports.  Domain errors (NotRegular, ...)
// are distinct from precision errors (InsufficientPrecision, ...): the
// former mean the input is outside the theory's hypotheses, the latter mean
// the fixed-precision model cannot decide the query.
enum class ErrorKind {
    InsufficientPrecision,
    DivisionByApproxZero,
    WildExtension,
    NotEisenstein,
    PrecisionTooLowToSeparateRoots,
    Inseparable,
    NotRegular,
    WildTorus,
    NotCompact,
    NotInTorus,
    PointNotFixed,
    ZeroAtPrecision,
    NotABreak,
    NonPositiveDepth,
    OutOfAbelianRange,
    EnumerationTooLarge,
    PreconditionViolated,
    AmbiguousAtPrecision,
    ParseError,
    MalformedInput,
    Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ErrorKind kind() const { return kind_; }
    const char* kind_name() const { return to_string(kind_); }
    const std::string& detail() const { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
    throw Error(kind, detail);
}

} // namespace charloc
