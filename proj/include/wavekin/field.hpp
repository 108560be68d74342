#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wavekin {

/// Scalar sampled on every grid node: a spectrum f, its inverse g = 1/f, a
/// test function, or an operator output.
struct Field {
    std::vector<double> values;
    /// Smallest value a physical state may take; unset means zero.
    std::optional<double> floor;

    Field() = default;
    explicit Field(std::size_t n, double fill = 0.0) : values(n, fill) {}
    explicit Field(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t i) noexcept { return values[i]; }
    double operator[](std::size_t i) const noexcept { return values[i]; }
    std::span<const double> view() const noexcept { return values; }

    bool operator==(const Field& other) const { return values == other.values; }
};

}  // namespace wavekin
