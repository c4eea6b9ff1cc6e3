#pragma once

#include <stdexcept>
#include <string>

namespace dsmdot {

struct NonConformingMesh : std::runtime_error {
    explicit NonConformingMesh(const std::string& what) : std::runtime_error("NonConformingMesh: " + what) {}
};

struct IncompatibleFlux : std::runtime_error {
    explicit IncompatibleFlux(const std::string& what) : std::runtime_error("IncompatibleFlux: " + what) {}
};

struct SolverDivergence : std::runtime_error {
    SolverDivergence(const std::string& what, double residual)
        : std::runtime_error("SolverDivergence: " + what + " (residual " + std::to_string(residual) + ")"),
          final_residual(residual) {}
    double final_residual;
};

struct SourceOnBoundary : std::runtime_error {
    explicit SourceOnBoundary(const std::string& what) : std::runtime_error("SourceOnBoundary: " + what) {}
};

struct PointOnBoundary : std::runtime_error {
    explicit PointOnBoundary(const std::string& what) : std::runtime_error("PointOnBoundary: " + what) {}
};

struct PointTooCloseToBoundary : std::runtime_error {
    explicit PointTooCloseToBoundary(const std::string& what)
        : std::runtime_error("PointTooCloseToBoundary: " + what) {}
};

struct PointOutsideDomain : std::runtime_error {
    explicit PointOutsideDomain(const std::string& what) : std::runtime_error("PointOutsideDomain: " + what) {}
};

struct TruncationNotConverged : std::runtime_error {
    explicit TruncationNotConverged(const std::string& what)
        : std::runtime_error("TruncationNotConverged: " + what) {}
};

struct MeshMismatch : std::runtime_error {
    explicit MeshMismatch(const std::string& what) : std::runtime_error("MeshMismatch: " + what) {}
};

struct SegmentTooShort : std::runtime_error {
    explicit SegmentTooShort(const std::string& what) : std::runtime_error("SegmentTooShort: " + what) {}
};

struct WrongDomain : std::runtime_error {
    explicit WrongDomain(const std::string& what) : std::runtime_error("WrongDomain: " + what) {}
};

struct UnknownExample : std::runtime_error {
    explicit UnknownExample(const std::string& what) : std::runtime_error("UnknownExample: " + what) {}
};

} // namespace dsmdot
