#include "wavekin/dynamics.hpp"

#include "wavekin/config.hpp"
#include "wavekin/io.hpp"
#include "wavekin/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wavekin {

void validate(const SimConfig& cfg)
{
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("time step dt must be positive");
    if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw std::invalid_argument("t_end must be >= 0");
    if (cfg.max_halvings < 0) throw std::invalid_argument("max_halvings must be >= 0");
    if (cfg.diagnostics_every < 1 || cfg.snapshot_every < 1)
        throw std::invalid_argument("diagnostics_every and snapshot_every must be >= 1");
    if (cfg.cutoff && !(cfg.cutoff->N > 1.0)) throw std::invalid_argument("cutoff N must exceed 1");
}

double auto_time_step(const Grid& grid, const TriadTable& table, const Field& f, double safety)
{
    const double h3 = grid.cell_volume();
    std::vector<double> rate(grid.node_count(), 0.0);
    for (const auto& tr : table.triples()) {
        const double m = tr.diagonal() ? 1.0 : 2.0;
        const double r = m * h3 * tr.weight * tr.kernel_factor *
                         (std::fabs(f[tr.k]) + std::fabs(f[tr.k1]) + std::fabs(f[tr.k2]));
        rate[tr.k] += r;
        rate[tr.k1] += r;
        rate[tr.k2] += r;
    }
    const double worst = *std::max_element(rate.begin(), rate.end());
    return worst > 0.0 ? safety / worst : 1.0;
}

KineticRhs::KineticRhs(const Grid& grid, const TriadTable& table, const SimConfig& cfg,
                       const RegionDecomposition* decomp)
    : grid_(grid), table_(table), cutoff_(cfg.cutoff), decomp_(decomp), projection_(cfg.energy_projection)
{
    if (projection_ && !decomp_) throw std::invalid_argument("energy projection needs a region decomposition");
}

Field KineticRhs::operator()(const Field& f) const
{
    Field q = cutoff_ ? apply_Q_cutoff(grid_, table_, f, *cutoff_) : apply_Q(grid_, table_, f);
    if (projection_) project_energy(grid_, *decomp_, q);
    return q;
}

namespace {

Field axpy(const Field& y, double a, const Field& x)
{
    Field out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * x[i];
    return out;
}

Field advance(const KineticRhs& rhs, const Field& f, double dt, Integrator integrator)
{
    const Field k1 = rhs(f);
    if (integrator == Integrator::euler) return axpy(f, dt, k1);
    const Field k2 = rhs(axpy(f, 0.5 * dt, k1));
    const Field k3 = rhs(axpy(f, 0.5 * dt, k2));
    const Field k4 = rhs(axpy(f, dt, k3));
    Field out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = f[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

bool admissible(const Field& f, double floor)
{
    return std::all_of(f.values.begin(), f.values.end(), [floor](double v) { return std::isfinite(v) && v >= floor; });
}

}  // namespace

StepResult step(const KineticRhs& rhs, const Field& f, const SimConfig& cfg)
{
    validate(cfg);
    const double floor = f.floor.value_or(0.0);
    double dt = cfg.dt;
    for (int halvings = 0;; ++halvings) {
        Field next = advance(rhs, f, dt, cfg.integrator);
        if (admissible(next, floor)) {
            next.floor = f.floor;
            return {std::move(next), dt, halvings};
        }
        if (cfg.positivity_mode == PositivityMode::reject)
            throw StepFailure("step produced a value below the positivity floor", 0.0);
        if (halvings >= cfg.max_halvings)
            throw StepFailure("positivity not restored after " + std::to_string(cfg.max_halvings) + " step halvings",
                              0.0);
        dt *= 0.5;
    }
}

StepResult step(const Grid& grid, const TriadTable& table, const Field& f, const SimConfig& cfg,
                const RegionDecomposition* decomp)
{
    return step(KineticRhs(grid, table, cfg, decomp), f, cfg);
}

namespace {

std::vector<RegionDiagnostics> all_region_diagnostics(const Grid& grid, const TriadTable& table,
                                                      const RegionDecomposition& decomp, const Field& f)
{
    const std::size_t R = static_cast<std::size_t>(decomp.region_count());
    std::vector<RegionDiagnostics> out(R + 1);
    const double h3 = grid.cell_volume();
    bool all_positive = true;
    for (std::size_t r = 0; r <= R; ++r) {
        const auto& nodes = decomp.region_nodes[r];
        auto& d = out[r];
        if (nodes.empty()) continue;
        d.E = h3 * tree_sum(nodes.size(), [&](std::size_t i) { return f[nodes[i]] * grid.omega(nodes[i]); });
        for (int j = 0; j < 3; ++j)
            d.M[j] = h3 * tree_sum(nodes.size(), [&](std::size_t i) { return f[nodes[i]] * grid.coords(nodes[i])[j]; });
        d.min_f = std::numeric_limits<double>::infinity();
        d.max_f = -std::numeric_limits<double>::infinity();
        bool positive = true;
        for (std::size_t u : nodes) {
            d.min_f = std::min(d.min_f, f[u]);
            d.max_f = std::max(d.max_f, f[u]);
            positive = positive && f[u] > 0.0;
        }
        if (positive)
            d.S = h3 * tree_sum(nodes.size(), [&](std::size_t i) { return std::log(std::max(f[nodes[i]], 1e-300)); });
        if (r > 0) all_positive = all_positive && positive;
    }
    if (all_positive) {
        const auto D = entropy_dissipation_by_region(grid, table, decomp, f);
        for (std::size_t r = 1; r <= R; ++r) out[r].D = D[r];
    } else {
        for (std::size_t r = 1; r <= R; ++r) out[r].D = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace

RegionDiagnostics region_diagnostics(const Grid& grid, const TriadTable& table, const RegionDecomposition& decomp,
                                     int region, const Field& f)
{
    if (region < 0 || region > decomp.region_count()) throw std::out_of_range("unknown region id");
    return all_region_diagnostics(grid, table, decomp, f)[static_cast<std::size_t>(region)];
}

Trajectory simulate(const Grid& grid, const TriadTable& table, const RegionDecomposition& decomp, const Field& f0,
                    const SimConfig& cfg, const RecordObserver& observer)
{
    validate(cfg);
    if (f0.size() != grid.node_count()) throw std::invalid_argument("initial field does not match grid size");
    if (!admissible(f0, 0.0)) throw std::invalid_argument("initial field must be finite and nonnegative");

    const KineticRhs rhs(grid, table, cfg, &decomp);
    Trajectory traj;
    Field f = f0;
    Field previous_recorded = f0;
    double t = 0.0;
    std::size_t steps = 0;
    std::size_t records = 0;
    double running_sup = 0.0;
    for (double v : f.values) running_sup = std::max(running_sup, std::fabs(v));

    auto record = [&](double dt_used, bool final_record) {
        DiagnosticsRecord rec;
        rec.t = t;
        rec.step = steps;
        rec.dt_used = dt_used;
        rec.min_f = *std::min_element(f.values.begin(), f.values.end());
        rec.max_f = *std::max_element(f.values.begin(), f.values.end());
        rec.running_sup = running_sup;
        rec.regions = all_region_diagnostics(grid, table, decomp, f);
        if (cfg.midpoint_dissipation && records > 0) {
            Field mid(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) mid[i] = 0.5 * (previous_recorded[i] + f[i]);
            bool positive = true;
            for (std::size_t u = 0; u < f.size(); ++u) positive = positive && (!table.touches(u) || mid[u] > 0.0);
            if (positive) {
                const auto D = entropy_dissipation_by_region(grid, table, decomp, mid);
                for (std::size_t r = 1; r < rec.regions.size(); ++r) rec.regions[r].D_mid = D[r];
            }
        }
        if (records % static_cast<std::size_t>(cfg.snapshot_every) == 0 || final_record) {
            if (traj.snapshots.size() < cfg.snapshot_cap) {
                rec.snapshot = traj.snapshots.size();
                traj.snapshots.push_back(f);
                traj.times.push_back(t);
            } else if (!cfg.spill_dir.empty()) {
                char name[64];
                std::snprintf(name, sizeof name, "snapshot_%06zu.csv", records);
                const auto path = cfg.spill_dir / name;
                write_snapshot_csv(path, grid, f);
                traj.spilled.push_back(path);
            }
        }
        if (observer) observer(rec, f);
        traj.records.push_back(std::move(rec));
        previous_recorded = f;
        ++records;
    };

    record(0.0, cfg.t_end == 0.0);
    const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
    while (cfg.t_end - t > t_eps) {
        SimConfig local = cfg;
        local.dt = std::min(cfg.dt, cfg.t_end - t);
        StepResult res;
        try {
            res = step(rhs, f, local);
        } catch (const StepFailure& e) {
            throw StepFailure(std::string(e.what()) + " at t=" + format_double(t), t);
        }
        f = std::move(res.f_next);
        t += res.dt_used;
        ++steps;
        if (cfg.t_end - t <= t_eps) t = cfg.t_end;
        for (double v : f.values) running_sup = std::max(running_sup, std::fabs(v));
        const bool final_record = t >= cfg.t_end;
        if (steps % static_cast<std::size_t>(cfg.diagnostics_every) == 0 || final_record)
            record(res.dt_used, final_record);
    }
    traj.final_state = f;
    return traj;
}

LowerBoundReport lower_bound_report(const Trajectory& traj, double f0_min)
{
    if (!(f0_min > 0.0)) throw std::domain_error("lower-bound report needs a strictly positive initial minimum");
    LowerBoundReport rep;
    rep.f_star = std::numeric_limits<double>::infinity();
    rep.no_collision_floor = std::numeric_limits<double>::infinity();
    for (const auto& rec : traj.records) {
        FloorSample s;
        s.t = rec.t;
        s.running_sup = rec.running_sup;
        s.region_min.resize(rec.regions.size(), 0.0);
        for (std::size_t r = 0; r < rec.regions.size(); ++r) {
            const double m = rec.regions[r].min_f;
            s.region_min[r] = m;
            if (r == 0) {
                rep.no_collision_floor = std::min(rep.no_collision_floor, m);
                if (m <= 0.0 && rec.regions[0].max_f > 0.0 && m < 0.0)
                    throw std::domain_error("no-collision values went negative");
                continue;
            }
            if (!(m > 0.0))
                throw std::domain_error("minimum of f reached " + format_double(m) + " at t=" + format_double(rec.t));
            rep.f_star = std::min(rep.f_star, m * rec.running_sup);
        }
        rep.samples.push_back(std::move(s));
    }
    rep.positive = std::isfinite(rep.f_star) && rep.f_star > 0.0;
    return rep;
}

}  // namespace wavekin
