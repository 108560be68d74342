#pragma once

#include <array>
#include <cstddef>
#include <compare>
#include <span>
#include <vector>

namespace wavekin {

using Vec3 = std::array<double, 3>;

/// Lattice wavevector with signed indices, each canonical in [-D, D].
struct Wavevector {
    int ix = 0;
    int iy = 0;
    int iz = 0;

    auto operator<=>(const Wavevector&) const = default;
};

enum class CollisionKind { forward, backward, central };

/// Frequency of a mode given its torus coordinates, no lattice required.
double dispersion_at(double omega0, const Vec3& k);

/// cos(2 pi a) + cos(2 pi b) - cos(2 pi (a + b)); lies in [-3, 3/2].
double upsilon(double alpha, double beta);

/// Centered discretization of the 3-torus with (2D+1)^3 nodes and a cached
/// dispersion table omega(k) = omega0 + sum_j 2 (1 - cos(2 pi k^j)).
///
/// Node j along an axis sits at coordinate j/(2D+1), j in [-D, D]. Node
/// indices are lexicographic in (ix, iy, iz), so index order and
/// wavevector order agree. Immutable after construction.
class Grid {
public:
    /// Rejects omega0 outside (2, 3) unless `allow_any_omega0` is set;
    /// omega0 must be positive in every case.
    Grid(int half_width, double omega0, bool allow_any_omega0 = false);

    int half_width() const noexcept { return half_width_; }
    int nodes_per_axis() const noexcept { return n_; }
    std::size_t node_count() const noexcept { return omega_.size(); }
    double mesh() const noexcept { return 1.0 / n_; }
    /// Volume element h^3 of one node.
    double cell_volume() const noexcept { return cell_volume_; }
    double omega0() const noexcept { return omega0_; }

    std::span<const double> omega() const noexcept { return omega_; }
    double omega(std::size_t node) const noexcept { return omega_[node]; }
    double omega(const Wavevector& k) const { return omega_[index(k)]; }

    std::size_t index(const Wavevector& k) const;
    Wavevector wavevector(std::size_t node) const noexcept;
    /// Torus coordinates in (-1/2, 1/2).
    Vec3 coords(std::size_t node) const noexcept;
    Vec3 coords(const Wavevector& k) const noexcept;

    int wrap(int i) const noexcept;
    Wavevector canonical(const Wavevector& k) const noexcept;
    Wavevector add(const Wavevector& a, const Wavevector& b) const noexcept;
    Wavevector sub(const Wavevector& a, const Wavevector& b) const noexcept;
    Wavevector neg(const Wavevector& a) const noexcept;

    std::size_t add(std::size_t a, std::size_t b) const noexcept;
    std::size_t sub(std::size_t a, std::size_t b) const noexcept;

    bool contains(const Wavevector& k) const noexcept;

private:
    int half_width_;
    int n_;
    double omega0_;
    double cell_volume_;
    std::vector<double> omega_;
};

// Collision residuals, evaluated from the cached table. Each is zero exactly
// when the corresponding resonance holds:
//   forward:  omega(y) - omega(x) - omega(y - x)
//   backward: omega(x) - omega(y) - omega(x - y)
//   central:  omega(x + y) - omega(x) - omega(y)
// The pair of subtracted terms is summed first, which makes central symmetric
// in (x, y) and backward symmetric under y -> x - y bit for bit.
double residual_forward(const Grid& grid, const Wavevector& x, const Wavevector& y);
double residual_backward(const Grid& grid, const Wavevector& x, const Wavevector& y);
double residual_central(const Grid& grid, const Wavevector& x, const Wavevector& y);

double residual_forward(const Grid& grid, std::size_t x, std::size_t y) noexcept;
double residual_backward(const Grid& grid, std::size_t x, std::size_t y) noexcept;
double residual_central(const Grid& grid, std::size_t x, std::size_t y) noexcept;

double residual(const Grid& grid, CollisionKind which, std::size_t x, std::size_t y) noexcept;

/// Shortest Euclidean distance between two torus points.
double torus_distance(const Vec3& a, const Vec3& b) noexcept;

}  // namespace wavekin
