#pragma once

#include "wavekin/field.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/regions.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavekin {

enum class EquilibriumKind { classical, quantized };

std::string to_string(EquilibriumKind kind);
EquilibriumKind parse_equilibrium_kind(const std::string& name);

/// classical: 1/(a omega + b.k); quantized: 1/(exp(a omega + b.k) - 1).
struct EquilibriumParams {
    double a = 0.0;
    Vec3 b{};
    int region_id = 0;
    EquilibriumKind kind = EquilibriumKind::classical;

    double exponent(const Grid& grid, std::size_t node) const;
    double value(const Grid& grid, std::size_t node) const;
};

struct AdmissibilityReport {
    bool unique = false;  ///< every multi-start run converged to the same point
    double jacobian_condition = 0.0;
    bool continuity_ok = false;  ///< perturbed invariants moved (a, b) by the linear prediction
    double residual = 0.0;       ///< final max-norm residual
    int iterations = 0;          ///< Newton iterations of the primary start
    int starts_converged = 0;
};

struct EquilibriumSolution {
    EquilibriumParams params;
    AdmissibilityReport report;
};

class EquilibriumError : public std::runtime_error {
public:
    enum class Reason { no_convergence, inadmissible };

    EquilibriumError(Reason reason, const std::string& what, double best_residual)
        : std::runtime_error(what), reason_(reason), best_residual_(best_residual)
    {
    }
    Reason reason() const noexcept { return reason_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    Reason reason_;
    double best_residual_;
};

struct SolverOptions {
    int max_iterations = 100;
    int starts = 8;
    double consensus_tol = 1e-8;
    double continuity_eps = 1e-6;
    double max_condition = 1e14;
    std::uint64_t seed = 0x5eed;
};

/// Damped Newton for h^3 sum_region phi F(a omega + b.k) = (E, M) with
/// phi = (omega, k). Throws EquilibriumError.
EquilibriumSolution solve_equilibrium(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                                      const LocalInvariants& inv, EquilibriumKind kind,
                                      const SolverOptions& opts = {});

/// (E, M) of the equilibrium field over its region.
LocalInvariants equilibrium_invariants(const Grid& grid, const RegionDecomposition& decomp,
                                       const EquilibriumParams& eq);

/// Full-size field: the equilibrium on its region, zero elsewhere.
Field equilibrium_field(const Grid& grid, const RegionDecomposition& decomp, const EquilibriumParams& eq);

/// h^3 sum over the region of ln f. Throws std::domain_error on f <= 0 there.
double entropy(const Grid& grid, const RegionDecomposition& decomp, int region_id, const Field& f);

struct CsiszarKullbackReport {
    double lhs = 0.0;    ///< L1 distance to the equilibrium on the region
    double rhs = 0.0;    ///< sqrt of the (clamped) entropy gap
    double ratio = 0.0;  ///< lhs / rhs, 0 when both vanish
    double gap = 0.0;    ///< S[eq] - S[f], unclamped
};

/// Classical kind only. Throws std::invalid_argument when f and eq do not
/// share (E, M) to rel_tol.
CsiszarKullbackReport csiszar_kullback_check(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                                             const Field& f, const EquilibriumParams& eq, double rel_tol = 1e-8);

/// h^3-weighted L^p distance over the region; p = infinity gives the max norm.
double distance_report(const Grid& grid, const RegionDecomposition& decomp, int region_id, const Field& f,
                       const EquilibriumParams& eq, double p);

/// Rescales f on the region by (beta omega + gamma.k) + 1 so its (E, M)
/// equal target. Throws std::domain_error if the multiplier is not positive.
Field match_invariants(const Grid& grid, const RegionDecomposition& decomp, int region_id, const Field& f,
                       const LocalInvariants& target);

/// center * (1 + eps u) with u uniform in [-1, 1] on the region, then
/// matched back to the invariants of center.
Field constrained_perturbation(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                               const Field& center, double eps, std::uint64_t seed);

}  // namespace wavekin
