#pragma once

#include <stdexcept>
#include <string>

namespace hitchin {

// Error taxonomy shared by the whole engine.  Every throw site uses one of
// these so callers (the CLI, the retry wrapper, the tests) can react by type.

struct DivisionByZero : std::runtime_error {
    explicit DivisionByZero(const std::string& what) : std::runtime_error("division by zero: " + what) {}
};

// A truncated expansion no longer covers the coefficient that was asked for.
struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error("precision exhausted: " + what) {}
};

// A genuine pole at the constraint locus: some negative epsilon power survives.
struct LimitDoesNotExist : std::runtime_error {
    explicit LimitDoesNotExist(const std::string& what) : std::runtime_error("limit does not exist: " + what) {}
};

struct NotInvertible : std::runtime_error {
    explicit NotInvertible(const std::string& what) : std::runtime_error("not invertible: " + what) {}
};

struct NotUnitConstant : std::runtime_error {
    explicit NotUnitConstant(const std::string& what) : std::runtime_error("constant term is not one: " + what) {}
};

struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error("singular linear system: " + what) {}
};

struct DuplicateNodes : std::runtime_error {
    explicit DuplicateNodes(const std::string& what) : std::runtime_error("duplicate nodes: " + what) {}
};

struct UnsupportedGenus : std::runtime_error {
    explicit UnsupportedGenus(const std::string& what) : std::runtime_error("unsupported genus: " + what) {}
};

struct SingularityApproached : std::runtime_error {
    explicit SingularityApproached(const std::string& what) : std::runtime_error("singularity approached: " + what) {}
};

struct BranchTrackingLost : std::runtime_error {
    explicit BranchTrackingLost(const std::string& what) : std::runtime_error("branch tracking lost: " + what) {}
};

// Malformed user input (CLI flags, JSON files).  The CLI maps this to exit 2.
struct BadInput : std::runtime_error {
    explicit BadInput(const std::string& what) : std::runtime_error("bad input: " + what) {}
};

} // namespace hitchin
