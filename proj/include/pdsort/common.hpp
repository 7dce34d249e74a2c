#pragma once

#include <stdexcept>
#include <string>

namespace pdsort {

/// Thrown when input data violates a domain precondition (points outside the
/// grid, negative densities, malformed files). The CLI maps this to exit 1.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Execution policy for kernels that have both a serial reference
/// implementation and an OpenMP-parallel one. Both produce identical output;
/// the serial path is kept as the reference for testing and benchmarking.
enum class Exec {
    serial,
    parallel,
};

} // namespace pdsort
