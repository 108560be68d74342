#pragma once

#include "wavekin/field.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/regions.hpp"
#include "wavekin/resonance.hpp"

#include <limits>
#include <vector>

namespace wavekin {

/// Smooth truncation rho_N: 1 on [1/N, N], 0 on [0, 1/(2N)] and [2N, inf),
/// cubic smoothstep in between. N = infinity disables the cutoff.
struct CutoffSpec {
    double N = std::numeric_limits<double>::infinity();

    bool infinite() const noexcept { return N == std::numeric_limits<double>::infinity(); }
    double rho(double z) const noexcept;
};

/// Centered periodic differences, Euclidean norm of the three quotients.
Field gradient_magnitude(const Grid& grid, const Field& f);

/// chi_N[f] = rho_N[f] rho_N[|grad f|] per node.
Field cutoff_weights(const Grid& grid, const Field& f, const CutoffSpec& cutoff);

/// Discrete Q_c[f]. Each stored triple contributes c = m h^3 weight
/// kernel_factor (f1 f2 - f f1 - f f2) with m = 2 (m = 1 when k1 == k2),
/// added at k and subtracted at k1 and at k2. Nodes outside every triple get
/// exactly zero. Evaluated node by node in table order, so the result does
/// not depend on the worker count.
Field apply_Q(const Grid& grid, const TriadTable& table, const Field& f);

/// h^3 sum_k Q[f](k) phi(k), assembled per triple as c (phi - phi1 - phi2).
double apply_weak(const Grid& grid, const TriadTable& table, const Field& f, const Field& phi);

/// Q_c^N: apply_Q with each triple scaled by chi_N[f] chi_N[f1] chi_N[f2].
Field apply_Q_cutoff(const Grid& grid, const TriadTable& table, const Field& f, const CutoffSpec& cutoff);

struct GainLossSplit {
    Field gain;  ///< g L
    Field loss;  ///< computed directly from the loss integrals
    Field rate;  ///< L >= 0
};

/// Kernel-stripped cutoff operator for g = 1/f split into gain and loss;
/// gain - loss equals apply_Q_stripped.
GainLossSplit split_Q_g(const Grid& grid, const TriadTable& table, const Field& g, const CutoffSpec& cutoff);

/// Kernel-stripped operator: per triple m h^3 weight kernel_factor chi* (g - g1 - g2).
Field apply_Q_stripped(const Grid& grid, const TriadTable& table, const Field& g, const CutoffSpec& cutoff);

/// D_c[f] = h^3 sum_triples m h^3 weight kernel_factor f f1 f2 (1/f1 + 1/f2 - 1/f)^2.
/// Throws std::domain_error on a nonpositive value at a participating node.
double entropy_dissipation(const Grid& grid, const TriadTable& table, const Field& f);

/// Same, split by the region label of each triple (index 0 unused).
std::vector<double> entropy_dissipation_by_region(const Grid& grid, const TriadTable& table,
                                                  const RegionDecomposition& decomp, const Field& f);

/// Per-region energy leak of an operator output, h^3 sum_{region} q omega.
std::vector<double> energy_leak_by_region(const Grid& grid, const RegionDecomposition& decomp, const Field& q);

/// Removes the energy leak of q on every region along u = omega - P omega,
/// where P projects onto the momentum coordinates of that region. Momentum
/// sums are untouched and no-collision nodes stay zero.
void project_energy(const Grid& grid, const RegionDecomposition& decomp, Field& q);

}  // namespace wavekin
