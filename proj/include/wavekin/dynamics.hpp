#pragma once

#include "wavekin/collision.hpp"
#include "wavekin/field.hpp"
#include "wavekin/regions.hpp"
#include "wavekin/resonance.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wavekin {

enum class Integrator { rk4, euler };
enum class PositivityMode { halve_step, reject };

struct SimConfig {
    double dt = 0.1;
    double t_end = 0.0;
    Integrator integrator = Integrator::rk4;
    PositivityMode positivity_mode = PositivityMode::halve_step;
    int max_halvings = 30;
    /// Diagnostics are recorded every `diagnostics_every` accepted steps and
    /// snapshots on every `snapshot_every`-th record; both always at t_end.
    int diagnostics_every = 1;
    int snapshot_every = 1;
    std::size_t snapshot_cap = 1000;
    /// Snapshots beyond the cap go here as CSV; empty drops them.
    std::filesystem::path spill_dir;
    std::optional<CutoffSpec> cutoff;
    bool energy_projection = false;
    /// Also record D_c at the average of consecutive recorded states.
    bool midpoint_dissipation = false;
    double conservation_rel = 1e-6;
    double entropy_backstep = 1e-10;
};

void validate(const SimConfig& cfg);

/// Stable explicit step estimate: safety / max_u sum_slots base_t (f + f1 + f2).
double auto_time_step(const Grid& grid, const TriadTable& table, const Field& f, double safety = 0.25);

class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

struct StepResult {
    Field f_next;
    double dt_used = 0.0;
    int halvings = 0;
};

/// Right-hand side Q_c or Q_c^N, with optional per-region energy projection.
class KineticRhs {
public:
    KineticRhs(const Grid& grid, const TriadTable& table, const SimConfig& cfg,
               const RegionDecomposition* decomp = nullptr);
    Field operator()(const Field& f) const;

private:
    const Grid& grid_;
    const TriadTable& table_;
    std::optional<CutoffSpec> cutoff_;
    const RegionDecomposition* decomp_;
    bool projection_;
};

/// One explicit step from cfg.dt, halving on negative output (halve_step) or
/// failing at once (reject). Throws StepFailure.
StepResult step(const Grid& grid, const TriadTable& table, const Field& f, const SimConfig& cfg,
                const RegionDecomposition* decomp = nullptr);
StepResult step(const KineticRhs& rhs, const Field& f, const SimConfig& cfg);

struct RegionDiagnostics {
    double E = 0.0;
    Vec3 M{};
    std::optional<double> S;  ///< unset when the region has f <= 0 somewhere
    double D = 0.0;
    std::optional<double> D_mid;
    double min_f = 0.0;
    double max_f = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    std::size_t step = 0;
    double dt_used = 0.0;
    double min_f = 0.0;
    double max_f = 0.0;
    /// sup over all accepted steps so far of max |f|.
    double running_sup = 0.0;
    /// Indexed by region label; entry 0 is the no-collision region.
    std::vector<RegionDiagnostics> regions;
    std::optional<std::size_t> snapshot;  ///< index into Trajectory::snapshots
};

struct Trajectory {
    std::vector<double> times;  ///< one per snapshot
    std::vector<Field> snapshots;
    std::vector<std::filesystem::path> spilled;
    std::vector<DiagnosticsRecord> records;
    Field final_state;
};

RegionDiagnostics region_diagnostics(const Grid& grid, const TriadTable& table, const RegionDecomposition& decomp,
                                     int region, const Field& f);

using RecordObserver = std::function<void(const DiagnosticsRecord&, const Field&)>;

/// Integrates to cfg.t_end. Throws StepFailure carrying the failure time; the
/// observer has already seen every record up to that point.
Trajectory simulate(const Grid& grid, const TriadTable& table, const RegionDecomposition& decomp, const Field& f0,
                    const SimConfig& cfg, const RecordObserver& observer = {});

struct FloorSample {
    double t = 0.0;
    double running_sup = 0.0;
    std::vector<double> region_min;  ///< by label
};

struct LowerBoundReport {
    std::vector<FloorSample> samples;
    /// min over time and collisional regions of min f(t) * running_sup(t).
    double f_star = 0.0;
    bool positive = false;
    /// min f on the no-collision region over the run.
    double no_collision_floor = 0.0;
};

/// Throws std::domain_error when f0_min <= 0 or min f reaches 0.
LowerBoundReport lower_bound_report(const Trajectory& traj, double f0_min);

}  // namespace wavekin
