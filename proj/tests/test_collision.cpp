#include "support.hpp"

#include "wavekin/parallel.hpp"

#include <doctest.h>

#include <numbers>

using namespace wavekin;

namespace {

/// Node-by-node oracle straight from the weak form: for every stored triple
/// the three slots receive (+, -, -) of the same collision rate.
Field q_oracle(const Grid& g, const TriadTable& t, const Field& f)
{
    Field q(g.node_count(), 0.0);
    for (const auto& tr : t.triples()) {
        const double rate = (tr.k1 == tr.k2 ? 1.0 : 2.0) * g.cell_volume() * tr.weight /
                            (g.omega(tr.k) * g.omega(tr.k1) * g.omega(tr.k2));
        const double c = rate * (f[tr.k1] * f[tr.k2] - f[tr.k] * (f[tr.k1] + f[tr.k2]));
        q[tr.k] += c;
        q[tr.k1] -= c;
        q[tr.k2] -= c;
    }
    return q;
}

double sup_norm(const Field& f)
{
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("collision operator matches the triple-scatter oracle")
{
    const auto& r = wktest::reference();
    for (unsigned seed : {1u, 2u, 3u}) {
        const Field f = wktest::random_field(r.grid.node_count(), 0.1, 5.0, seed);
        const Field q = apply_Q(r.grid, r.table, f);
        const Field ref = q_oracle(r.grid, r.table, f);
        const double scale = sup_norm(ref);
        for (std::size_t u = 0; u < q.size(); ++u) CHECK(std::abs(q[u] - ref[u]) <= 1e-13 * scale);
    }
}

TEST_CASE("no-collision nodes receive exactly zero")
{
    const auto& r = wktest::reference();
    const Field f = wktest::random_field(r.grid.node_count(), 0.1, 5.0, 9);
    const Field q = apply_Q(r.grid, r.table, f);
    for (std::size_t u : r.decomp.no_collision()) CHECK(q[u] == 0.0);
}

TEST_CASE("collision operator is quadratic and vanishes on zero")
{
    const auto& r = wktest::reference();
    const Field f = wktest::random_field(r.grid.node_count(), 0.1, 5.0, 4);
    Field f3 = f;
    for (double& v : f3.values) v *= 3.0;
    const Field q = apply_Q(r.grid, r.table, f), q3 = apply_Q(r.grid, r.table, f3);
    const double scale = sup_norm(q3);
    for (std::size_t u = 0; u < q.size(); ++u) CHECK(std::abs(q3[u] - 9.0 * q[u]) <= 1e-13 * scale);
    CHECK(sup_norm(apply_Q(r.grid, r.table, Field(r.grid.node_count(), 0.0))) == 0.0);
}

TEST_CASE("momentum is conserved per region, energy only up to the broadening")
{
    const auto& r = wktest::reference();
    const auto& g = r.grid;
    const Field f = wktest::random_field(g.node_count(), 0.1, 5.0, 5);
    const Field q = apply_Q(g, r.table, f);
    const auto leak = energy_leak_by_region(g, r.decomp, q);
    for (int id = 1; id <= r.decomp.region_count(); ++id) {
        double scale = 0.0, mom[3] = {0, 0, 0};
        for (std::size_t u : r.decomp.nodes(id)) {
            const auto k = g.coords(u);
            for (int j = 0; j < 3; ++j) mom[j] += q[u] * k[j];
            scale += std::abs(q[u]);
        }
        for (double m : mom) CHECK(std::abs(m) <= 1e-13 * scale);
        // Each triple leaks c (omega - omega1 - omega2), |.| <= support.
        CHECK(std::abs(leak[static_cast<std::size_t>(id)]) <= g.cell_volume() * r.kernel.support() * scale);
    }
}

TEST_CASE("weak form equals the pairing of Q with the test function")
{
    const auto& r = wktest::reference();
    const auto& g = r.grid;
    const Field f = wktest::random_field(g.node_count(), 0.1, 5.0, 6);
    const Field q = apply_Q(g, r.table, f);
    for (unsigned seed : {10u, 11u, 12u}) {
        const Field phi = wktest::random_field(g.node_count(), -1.0, 1.0, seed);
        double direct = 0.0, scale = 0.0;
        for (std::size_t u = 0; u < q.size(); ++u) {
            direct += q[u] * phi[u];
            scale += std::abs(q[u] * phi[u]);
        }
        direct *= g.cell_volume();
        CHECK(std::abs(apply_weak(g, r.table, f, phi) - direct) <= 1e-13 * g.cell_volume() * scale);
    }
}

TEST_CASE("entropy dissipation is the weak form at 1/f and nonnegative")
{
    const auto& r = wktest::reference();
    const auto& g = r.grid;
    for (unsigned seed : {20u, 21u, 22u, 23u}) {
        const Field f = wktest::random_field(g.node_count(), 0.05, 10.0, seed);
        Field inv(f.size());
        for (std::size_t u = 0; u < f.size(); ++u) inv[u] = 1.0 / f[u];
        const double D = entropy_dissipation(g, r.table, f);
        CHECK(D > 0.0);
        CHECK(apply_weak(g, r.table, f, inv) == doctest::Approx(D).epsilon(1e-12));
        const auto by_region = entropy_dissipation_by_region(g, r.table, r.decomp, f);
        double total = 0.0;
        for (std::size_t id = 1; id < by_region.size(); ++id) {
            CHECK(by_region[id] >= 0.0);
            total += by_region[id];
        }
        CHECK(total == doctest::Approx(D).epsilon(1e-13));
    }
}

TEST_CASE("entropy dissipation positivity requirements")
{
    const auto& r = wktest::reference();
    Field f(r.grid.node_count(), 1.0);
    for (std::size_t u : r.decomp.no_collision()) f[u] = 0.0;
    CHECK_NOTHROW(entropy_dissipation(r.grid, r.table, f));
    f[r.decomp.nodes(1).front()] = 0.0;
    CHECK_THROWS_AS(entropy_dissipation(r.grid, r.table, f), std::domain_error);
    f[r.decomp.nodes(1).front()] = -1.0;
    CHECK_THROWS_AS(entropy_dissipation_by_region(r.grid, r.table, r.decomp, f), std::domain_error);
}

TEST_CASE("operator output does not depend on the worker count")
{
    const auto& r = wktest::reference();
    const Field f = wktest::random_field(r.grid.node_count(), 0.1, 5.0, 31);
    set_thread_count(1);
    const Field a = apply_Q(r.grid, r.table, f);
    const double da = entropy_dissipation(r.grid, r.table, f);
    set_thread_count(5);
    const Field b = apply_Q(r.grid, r.table, f);
    const double db = entropy_dissipation(r.grid, r.table, f);
    set_thread_count(0);
    CHECK(a == b);
    CHECK(da == db);
}

TEST_CASE("smooth truncation profile")
{
    const CutoffSpec c{10.0};
    CHECK(c.rho(0.0) == 0.0);
    CHECK(c.rho(0.05) == 0.0);
    CHECK(c.rho(0.1) == 1.0);
    CHECK(c.rho(1.0) == 1.0);
    CHECK(c.rho(10.0) == 1.0);
    CHECK(c.rho(20.0) == 0.0);
    CHECK(c.rho(1e9) == 0.0);
    double prev = 0.0;
    for (double z = 0.05; z <= 0.1; z += 1e-4) {
        CHECK(c.rho(z) >= prev - 1e-15);
        prev = c.rho(z);
    }
    CHECK(c.rho(0.075) == doctest::Approx(0.5));
    CHECK(c.rho(15.0) == doctest::Approx(0.5));
    CHECK(CutoffSpec{}.infinite());
    CHECK(CutoffSpec{}.rho(1e300) == 1.0);
    CHECK(CutoffSpec{}.rho(0.0) == 1.0);
}

TEST_CASE("gradient magnitude of constants and plane waves")
{
    const Grid g(5, 2.5);
    CHECK(sup_norm(gradient_magnitude(g, Field(g.node_count(), 3.0))) == 0.0);
    Field f(g.node_count());
    for (std::size_t u = 0; u < f.size(); ++u) f[u] = std::sin(2.0 * std::numbers::pi * g.coords(u)[0]);
    const Field grad = gradient_magnitude(g, f);
    const double h = g.mesh();
    for (std::size_t u = 0; u < f.size(); ++u) {
        const double x = g.coords(u)[0];
        const double expect = std::abs(std::cos(2.0 * std::numbers::pi * x) * std::sin(2.0 * std::numbers::pi * h) / h);
        CHECK(grad[u] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("cutoff operator: N = infinity and in-range states reproduce Q bitwise")
{
    const auto& r = wktest::reference();
    const Field f = wktest::random_field(r.grid.node_count(), 0.5, 2.0, 7);
    const Field q = apply_Q(r.grid, r.table, f);
    CHECK(apply_Q_cutoff(r.grid, r.table, f, CutoffSpec{}) == q);
    const Field grad = gradient_magnitude(r.grid, f);
    double N = 1.0;
    for (std::size_t u = 0; u < f.size(); ++u) {
        if (!r.table.touches(u)) continue;
        REQUIRE(grad[u] > 0.0);
        N = std::max({N, f[u], 1.0 / f[u], grad[u], 1.0 / grad[u]});
    }
    CHECK(apply_Q_cutoff(r.grid, r.table, f, CutoffSpec{1.01 * N}) == q);
    // A constant field has zero gradient, which the truncation switches off.
    const Field flat(r.grid.node_count(), 1.5);
    CHECK(sup_norm(apply_Q_cutoff(r.grid, r.table, flat, CutoffSpec{1.01 * N})) == 0.0);
}

TEST_CASE("cutoff operator switches off triples with out-of-range values")
{
    const auto& r = wktest::reference();
    const Field f(r.grid.node_count(), 100.0);
    const Field q = apply_Q_cutoff(r.grid, r.table, f, CutoffSpec{10.0});
    CHECK(sup_norm(q) == 0.0);
    const Field tiny(r.grid.node_count(), 1e-3);
    CHECK(sup_norm(apply_Q_cutoff(r.grid, r.table, tiny, CutoffSpec{10.0})) == 0.0);
}

TEST_CASE("stripped operator: gain minus loss, nonnegative rate")
{
    const auto& r = wktest::reference();
    const Field g = wktest::random_field(r.grid.node_count(), 0.2, 3.0, 8);
    for (const CutoffSpec c : {CutoffSpec{}, CutoffSpec{4.0}}) {
        const auto split = split_Q_g(r.grid, r.table, g, c);
        const Field direct = apply_Q_stripped(r.grid, r.table, g, c);
        const double scale = sup_norm(split.gain) + sup_norm(split.loss);
        for (std::size_t u = 0; u < g.size(); ++u) {
            CHECK(split.rate[u] >= 0.0);
            CHECK(split.gain[u] == g[u] * split.rate[u]);
            CHECK(std::abs(split.gain[u] - split.loss[u] - direct[u]) <= 1e-13 * scale);
        }
    }
}

TEST_CASE("stripped operator at a collisional invariant is bounded by the broadening")
{
    const auto& r = wktest::reference();
    const auto& grid = r.grid;
    const double a = 0.7;
    const Vec3 b{0.1, -0.2, 0.05};
    Field g(grid.node_count());
    for (std::size_t u = 0; u < g.size(); ++u) {
        const auto k = grid.coords(u);
        g[u] = a * grid.omega(u) + b[0] * k[0] + b[1] * k[1] + b[2] * k[2];
    }
    const auto split = split_Q_g(grid, r.table, g, CutoffSpec{});
    const Field q = apply_Q_stripped(grid, r.table, g, CutoffSpec{});
    for (std::size_t u = 0; u < g.size(); ++u)
        CHECK(std::abs(q[u]) <= a * r.kernel.support() * split.rate[u] * (1.0 + 1e-12) + 1e-300);
}

TEST_CASE("energy projection removes the leak and keeps momentum")
{
    const auto& r = wktest::reference();
    const auto& g = r.grid;
    const Field f = wktest::random_field(g.node_count(), 0.1, 5.0, 13);
    const Field q = apply_Q(g, r.table, f);
    Field p = q;
    project_energy(g, r.decomp, p);
    const auto leak = energy_leak_by_region(g, r.decomp, p);
    const auto before = energy_leak_by_region(g, r.decomp, q);
    for (int id = 1; id <= r.decomp.region_count(); ++id) {
        CHECK(std::abs(leak[static_cast<std::size_t>(id)]) <= 1e-12 * std::abs(before[static_cast<std::size_t>(id)]) + 1e-20);
        double dm[3] = {0, 0, 0}, scale = 0.0;
        for (std::size_t u : r.decomp.nodes(id)) {
            const auto k = g.coords(u);
            for (int j = 0; j < 3; ++j) dm[j] += (p[u] - q[u]) * k[j];
            scale += std::abs(p[u] - q[u]);
        }
        for (double m : dm) CHECK(std::abs(m) <= 1e-12 * scale + 1e-300);
    }
    for (std::size_t u : r.decomp.no_collision()) CHECK(p[u] == 0.0);
}

TEST_CASE("operators reject fields of the wrong size")
{
    const auto& r = wktest::reference();
    CHECK_THROWS_AS(apply_Q(r.grid, r.table, Field(10)), std::invalid_argument);
    CHECK_THROWS_AS(entropy_dissipation(r.grid, r.table, Field(10, 1.0)), std::invalid_argument);
    const Grid other(3, 2.5);
    CHECK_THROWS_AS(apply_Q(other, r.table, Field(other.node_count())), std::invalid_argument);
}
