#pragma once

#include <stdexcept>
#include <string>

namespace recomb {

// Dense representation refused: k^n (or an enumeration derived from it)
// exceeds the configured cap.
struct CapacityExceeded : std::runtime_error {
    explicit CapacityExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

// A marginal probability outside (0,1), or an inconsistent probability vector.
struct DegenerateMarginal : std::runtime_error {
    explicit DegenerateMarginal(const std::string& what) : std::runtime_error(what) {}
};

// Gram-Schmidt norm collapsed (near-duplicate spin values).
struct NumericalBreakdown : std::runtime_error {
    explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
};

// Log-domain violation in the density separation; carries the offending
// spin index.
struct DomainError : std::runtime_error {
    int offending_index;
    DomainError(const std::string& what, int index)
        : std::runtime_error(what), offending_index(index) {}
};

}  // namespace recomb
