#pragma once

#include <stdexcept>
#include <string>

namespace univoque {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlphabetMismatch : Error {
    AlphabetMismatch() : Error("alphabet mismatch") {}
};

struct BoundaryDigit : Error {
    using Error::Error;
};

// A digit choice (or a base comparison) could not be certified at the
// available precision.  Callers holding a defining sequence refine and
// retry; callers with a bare interval surface this to the user.
struct PrecisionExhausted : Error {
    using Error::Error;
};

struct UndecidableAtPrecision : Error {
    using Error::Error;
};

struct InvalidAlpha : Error {
    using Error::Error;
};

struct NotAdmissible : Error {
    explicit NotAdmissible(const std::string& w) : Error("word not admissible: " + w) {}
};

struct NotInXJ : Error {
    long digit_index;   // 1-based position of the offending chunk
    long block_index;   // 1-based block ordinal
    NotInXJ(long digit, long block)
        : Error("sequence leaves the block language at digit " + std::to_string(digit) +
                " (block " + std::to_string(block) + ")"),
          digit_index(digit), block_index(block) {}
};

struct InvalidReference : Error {
    using Error::Error;
};

struct NotInV : Error {
    using Error::Error;
};

struct NotInVStar : Error {
    using Error::Error;
};

struct NotInPlateau : Error {
    using Error::Error;
};

struct EmptySubshift : Error {
    EmptySubshift() : Error("no allowed window survives the two-sided bound") {}
};

struct TooLarge : Error {
    using Error::Error;
};

struct NotCovered : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace univoque
