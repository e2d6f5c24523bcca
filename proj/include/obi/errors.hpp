#pragma once

#include <stdexcept>
#include <string>

namespace obi {

// Structural problems: wrong tensor shapes, malformed inputs.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

// Value-level problems: parameters outside their documented domain,
// inconsistent correlators, signaling inputs, etc.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Requested instance exceeds the documented desk-scale caps.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical engine failed to reach its advertised accuracy.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid quantum model (non-PSD state, incomplete POVM, trace deficit).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace obi
