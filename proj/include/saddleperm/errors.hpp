#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace saddleperm {

// Every recoverable failure carries a stable code string so the CLI and the
// Python layer can report errors without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

struct NotPositiveDefinite : Error {
    explicit NotPositiveDefinite(const std::string& what)
        : Error("NotPositiveDefinite", what) {}
};

struct DegenerateScores : Error {
    explicit DegenerateScores(const std::string& what)
        : Error("DegenerateScores", what) {}
};

struct SingularCovariance : Error {
    explicit SingularCovariance(const std::string& what)
        : Error("SingularCovariance", what) {}
};

// A tilt component drove an exponent past the representable range.
struct OverflowGuard : Error {
    explicit OverflowGuard(const std::string& what) : Error("OverflowGuard", what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error("NoConvergence", what) {}
};

// The requested level exceeds the supremum of the statistic along a ray.
struct LevelUnreachable : Error {
    explicit LevelUnreachable(const std::string& what)
        : Error("LevelUnreachable", what) {}
};

struct DegenerateDirection : Error {
    explicit DegenerateDirection(const std::string& what)
        : Error("DegenerateDirection", what) {}
};

struct NonpositiveG : Error {
    explicit NonpositiveG(const std::string& what) : Error("NonpositiveG", what) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& what) : Error("TooLarge", what) {}
};

struct MalformedCsv : Error {
    MalformedCsv(const std::string& what, long line)
        : Error("MalformedCsv", what + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

struct MixedArity : Error {
    MixedArity(const std::string& what, long line)
        : Error("MixedArity", what + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace saddleperm
