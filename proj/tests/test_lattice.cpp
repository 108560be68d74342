#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>

using namespace wavekin;
using wktest::omega_direct;

TEST_CASE("grid geometry")
{
    for (int D = 1; D <= 5; ++D) {
        const Grid g(D, 2.5);
        CHECK(g.nodes_per_axis() == 2 * D + 1);
        CHECK(g.node_count() == static_cast<std::size_t>((2 * D + 1) * (2 * D + 1) * (2 * D + 1)));
        CHECK(g.cell_volume() * static_cast<double>(g.node_count()) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(g.mesh() == doctest::Approx(1.0 / (2 * D + 1)));
    }
}

TEST_CASE("grid rejects invalid parameters")
{
    CHECK_THROWS_AS(Grid(0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(Grid(-3, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(Grid(2, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(2, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(Grid(2, 3.5), std::invalid_argument);
    CHECK_NOTHROW(Grid(2, 3.5, true));
    CHECK_THROWS_AS(Grid(2, 0.0, true), std::invalid_argument);
    CHECK_THROWS_AS(Grid(2, std::numeric_limits<double>::infinity(), true), std::invalid_argument);
}

TEST_CASE("dispersion table matches the trigonometric definition")
{
    for (double w0 : {2.1, 2.5, 2.9}) {
        const Grid g(4, w0);
        for (std::size_t u = 0; u < g.node_count(); ++u) {
            const double ref = omega_direct(w0, g.coords(u));
            CHECK(std::abs(g.omega(u) - ref) <= 1e-14 * ref);
            CHECK(std::abs(dispersion_at(w0, g.coords(u)) - ref) <= 1e-14 * ref);
            CHECK(g.omega(u) >= w0);
            CHECK(g.omega(u) < w0 + 12.0);
        }
        CHECK(g.omega(Wavevector{0, 0, 0}) == w0);
    }
}

TEST_CASE("dispersion is even bit for bit and permutation symmetric to rounding")
{
    const Grid g(5, 2.5);
    for (std::size_t u = 0; u < g.node_count(); ++u) {
        const auto w = g.wavevector(u);
        CHECK(g.omega(g.neg(w)) == g.omega(u));
        CHECK(g.omega(Wavevector{w.iy, w.iz, w.ix}) == doctest::Approx(g.omega(u)).epsilon(1e-15));
        CHECK(g.omega(Wavevector{w.ix, -w.iy, w.iz}) == g.omega(u));
    }
}

TEST_CASE("node indexing round trips and follows wavevector order")
{
    const Grid g(3, 2.5);
    for (std::size_t u = 0; u < g.node_count(); ++u) {
        CHECK(g.index(g.wavevector(u)) == u);
        if (u > 0) CHECK(g.wavevector(u - 1) < g.wavevector(u));
    }
    CHECK_THROWS_AS(g.index(Wavevector{4, 0, 0}), std::out_of_range);
    CHECK_THROWS_AS(g.index(Wavevector{0, -4, 0}), std::out_of_range);
}

TEST_CASE("torus arithmetic wraps into the canonical range")
{
    const Grid g(3, 2.5);
    CHECK(g.wrap(4) == -3);
    CHECK(g.wrap(-4) == 3);
    CHECK(g.wrap(7) == 0);
    CHECK(g.wrap(-14) == 0);
    for (std::size_t a = 0; a < g.node_count(); a += 7)
        for (std::size_t b = 0; b < g.node_count(); b += 5) {
            const auto wa = g.wavevector(a), wb = g.wavevector(b);
            CHECK(g.add(wa, g.neg(wa)) == Wavevector{0, 0, 0});
            CHECK(g.sub(g.add(wa, wb), wb) == wa);
            CHECK(g.add(a, b) == g.add(b, a));
            CHECK(g.sub(a, b) == g.index(g.add(wa, g.neg(wb))));
            CHECK(g.contains(g.canonical(Wavevector{wa.ix + 9, wa.iy - 11, wa.iz + 21})));
        }
}

TEST_CASE("collision residuals match direct evaluation")
{
    const double w0 = 2.5;
    const Grid g(3, w0);
    for (std::size_t x = 0; x < g.node_count(); x += 3)
        for (std::size_t y = 0; y < g.node_count(); y += 2) {
            const auto kx = g.coords(x), ky = g.coords(y);
            const Vec3 diff_yx{ky[0] - kx[0], ky[1] - kx[1], ky[2] - kx[2]};
            const Vec3 diff_xy{-diff_yx[0], -diff_yx[1], -diff_yx[2]};
            const Vec3 sum{kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2]};
            const double wx = omega_direct(w0, kx), wy = omega_direct(w0, ky);
            CHECK(residual_forward(g, x, y) == doctest::Approx(wy - wx - omega_direct(w0, diff_yx)).epsilon(1e-12));
            CHECK(residual_backward(g, x, y) == doctest::Approx(wx - wy - omega_direct(w0, diff_xy)).epsilon(1e-12));
            CHECK(residual_central(g, x, y) == doctest::Approx(omega_direct(w0, sum) - wx - wy).epsilon(1e-12));
        }
}

TEST_CASE("residual symmetries hold exactly")
{
    const Grid g(4, 2.7);
    for (std::size_t x = 0; x < g.node_count(); x += 5)
        for (std::size_t y = 0; y < g.node_count(); y += 3) {
            CHECK(residual_central(g, x, y) == residual_central(g, y, x));
            CHECK(residual_backward(g, x, y) == residual_backward(g, x, g.sub(x, y)));
            CHECK(residual_forward(g, x, y) == residual_backward(g, y, x));
            CHECK(residual(g, CollisionKind::central, x, y) == residual_central(g, x, y));
            CHECK(residual(g, CollisionKind::forward, x, y) == residual_forward(g, x, y));
            CHECK(residual(g, CollisionKind::backward, x, y) == residual_backward(g, x, y));
            CHECK(residual_central(g, g.wavevector(x), g.wavevector(y)) == residual_central(g, x, y));
        }
}

TEST_CASE("central residual stays in the band set by upsilon")
{
    for (double w0 : {2.05, 2.5, 2.95}) {
        const Grid g(4, w0);
        double lo = 1e300, hi = -1e300;
        for (std::size_t x = 0; x < g.node_count(); ++x)
            for (std::size_t y = 0; y < g.node_count(); y += 11) {
                const double r = residual_central(g, x, y);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
        CHECK(lo >= -w0 - 24.0 - 1e-12);
        CHECK(hi <= 3.0 - w0 + 1e-12);
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 10000; ++i) {
        const double v = upsilon(u(rng), u(rng));
        CHECK(v >= -3.0 - 1e-12);
        CHECK(v <= 1.5 + 1e-12);
    }
    CHECK(upsilon(1.0 / 6.0, 1.0 / 6.0) == doctest::Approx(1.5));
    CHECK(upsilon(0.5, 0.5) == doctest::Approx(-3.0));
}

TEST_CASE("torus distance")
{
    CHECK(torus_distance({0.45, 0.0, 0.0}, {-0.45, 0.0, 0.0}) == doctest::Approx(0.1));
    CHECK(torus_distance({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}) == 0.0);
    CHECK(torus_distance({0.1, -0.2, 0.3}, {0.2, 0.1, -0.4}) == torus_distance({0.2, 0.1, -0.4}, {0.1, -0.2, 0.3}));
    CHECK(torus_distance({0.0, 0.0, 0.0}, {0.3, 0.4, 0.0}) == doctest::Approx(0.5));
}
