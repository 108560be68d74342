#include "wavekin/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavekin {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

double dispersion_at(double omega0, const Vec3& k)
{
    double sum = 0.0;
    for (double c : k) sum += 2.0 * (1.0 - std::cos(two_pi * c));
    return omega0 + sum;
}

double upsilon(double alpha, double beta)
{
    return std::cos(two_pi * alpha) + std::cos(two_pi * beta) - std::cos(two_pi * (alpha + beta));
}

Grid::Grid(int half_width, double omega0, bool allow_any_omega0)
    : half_width_(half_width), n_(2 * half_width + 1), omega0_(omega0)
{
    if (half_width < 1) throw std::invalid_argument("grid half-width D must be >= 1");
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw std::invalid_argument("omega0 must be a positive finite number");
    if (!allow_any_omega0 && !(omega0 > 2.0 && omega0 < 3.0))
        throw std::invalid_argument("omega0 must lie in (2, 3), got " + std::to_string(omega0));

    const double h = 1.0 / n_;
    cell_volume_ = h * h * h;

    // Per-axis terms first so every node sums the same three numbers.
    std::vector<double> axis(static_cast<std::size_t>(n_));
    for (int j = -half_width_; j <= half_width_; ++j)
        axis[static_cast<std::size_t>(j + half_width_)] =
            2.0 * (1.0 - std::cos(two_pi * static_cast<double>(j) / n_));

    omega_.resize(static_cast<std::size_t>(n_) * n_ * n_);
    std::size_t node = 0;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            for (int c = 0; c < n_; ++c)
                omega_[node++] = omega0_ + (axis[a] + axis[b] + axis[c]);
}

int Grid::wrap(int i) const noexcept
{
    int r = (i + half_width_) % n_;
    if (r < 0) r += n_;
    return r - half_width_;
}

Wavevector Grid::canonical(const Wavevector& k) const noexcept
{
    return {wrap(k.ix), wrap(k.iy), wrap(k.iz)};
}

bool Grid::contains(const Wavevector& k) const noexcept
{
    auto ok = [this](int i) { return i >= -half_width_ && i <= half_width_; };
    return ok(k.ix) && ok(k.iy) && ok(k.iz);
}

std::size_t Grid::index(const Wavevector& k) const
{
    if (!contains(k)) throw std::out_of_range("wavevector index outside [-D, D]");
    const auto n = static_cast<std::size_t>(n_);
    return (static_cast<std::size_t>(k.ix + half_width_) * n + static_cast<std::size_t>(k.iy + half_width_)) * n +
           static_cast<std::size_t>(k.iz + half_width_);
}

Wavevector Grid::wavevector(std::size_t node) const noexcept
{
    const auto n = static_cast<std::size_t>(n_);
    const int iz = static_cast<int>(node % n) - half_width_;
    node /= n;
    const int iy = static_cast<int>(node % n) - half_width_;
    const int ix = static_cast<int>(node / n) - half_width_;
    return {ix, iy, iz};
}

Vec3 Grid::coords(const Wavevector& k) const noexcept
{
    const double inv = 1.0 / n_;
    return {k.ix * inv, k.iy * inv, k.iz * inv};
}

Vec3 Grid::coords(std::size_t node) const noexcept { return coords(wavevector(node)); }

Wavevector Grid::add(const Wavevector& a, const Wavevector& b) const noexcept
{
    return {wrap(a.ix + b.ix), wrap(a.iy + b.iy), wrap(a.iz + b.iz)};
}

Wavevector Grid::sub(const Wavevector& a, const Wavevector& b) const noexcept
{
    return {wrap(a.ix - b.ix), wrap(a.iy - b.iy), wrap(a.iz - b.iz)};
}

Wavevector Grid::neg(const Wavevector& a) const noexcept { return {wrap(-a.ix), wrap(-a.iy), wrap(-a.iz)}; }

std::size_t Grid::add(std::size_t a, std::size_t b) const noexcept
{
    return index(add(wavevector(a), wavevector(b)));
}

std::size_t Grid::sub(std::size_t a, std::size_t b) const noexcept
{
    return index(sub(wavevector(a), wavevector(b)));
}

double residual_forward(const Grid& grid, std::size_t x, std::size_t y) noexcept
{
    return grid.omega(y) - (grid.omega(x) + grid.omega(grid.sub(y, x)));
}

double residual_backward(const Grid& grid, std::size_t x, std::size_t y) noexcept
{
    return grid.omega(x) - (grid.omega(y) + grid.omega(grid.sub(x, y)));
}

double residual_central(const Grid& grid, std::size_t x, std::size_t y) noexcept
{
    return grid.omega(grid.add(x, y)) - (grid.omega(x) + grid.omega(y));
}

double residual_forward(const Grid& grid, const Wavevector& x, const Wavevector& y)
{
    return residual_forward(grid, grid.index(x), grid.index(y));
}

double residual_backward(const Grid& grid, const Wavevector& x, const Wavevector& y)
{
    return residual_backward(grid, grid.index(x), grid.index(y));
}

double residual_central(const Grid& grid, const Wavevector& x, const Wavevector& y)
{
    return residual_central(grid, grid.index(x), grid.index(y));
}

double residual(const Grid& grid, CollisionKind which, std::size_t x, std::size_t y) noexcept
{
    switch (which) {
    case CollisionKind::forward: return residual_forward(grid, x, y);
    case CollisionKind::backward: return residual_backward(grid, x, y);
    case CollisionKind::central: return residual_central(grid, x, y);
    }
    return 0.0;
}

double torus_distance(const Vec3& a, const Vec3& b) noexcept
{
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
        double d = a[j] - b[j];
        d -= std::round(d);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace wavekin
