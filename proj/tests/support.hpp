#pragma once

#include "wavekin/collision.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/regions.hpp"
#include "wavekin/resonance.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

namespace wktest {

using namespace wavekin;

/// D=6, omega0=2.5, theta=0.1 gaussian, built once per process.
struct Reference {
    Grid grid{6, 2.5};
    BroadeningKernel kernel = BroadeningKernel::gaussian(0.1);
    TriadTable table = enumerate_triples(grid, kernel);
    RegionDecomposition decomp = decompose(grid, table);
};

inline const Reference& reference()
{
    static const Reference r;
    return r;
}

inline Field random_field(std::size_t n, double lo, double hi, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Field f(n);
    for (auto& v : f.values) v = u(rng);
    return f;
}

inline std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::path(WAVEKIN_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Dispersion straight from the trigonometric definition.
inline double omega_direct(double omega0, const Vec3& k)
{
    double s = omega0;
    for (double c : k) s += 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * c));
    return s;
}

}  // namespace wktest
