#include "wavekin/commands.hpp"

#include "wavekin/io.hpp"
#include "wavekin/parallel.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace wavekin {

using nlohmann::ordered_json;

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

void finish(const RunConfig& cfg) { write_text_atomic(cfg.output_dir / "config.json", to_json(cfg).dump(2) + "\n"); }

ordered_json region_record(int r, const RegionDiagnostics& d)
{
    ordered_json j;
    j["id"] = r;
    j["E"] = d.E;
    j["Mx"] = d.M[0];
    j["My"] = d.M[1];
    j["Mz"] = d.M[2];
    j["S"] = d.S ? number_or_null(*d.S) : ordered_json();
    j["D"] = number_or_null(d.D);
    return j;
}

ordered_json diagnostics_line(const DiagnosticsRecord& rec)
{
    ordered_json j;
    j["t"] = rec.t;
    j["step"] = rec.step;
    j["dt_used"] = rec.dt_used;
    j["min_f"] = rec.min_f;
    j["max_f"] = rec.max_f;
    auto regions = ordered_json::array();
    for (std::size_t r = 1; r < rec.regions.size(); ++r)
        regions.push_back(region_record(static_cast<int>(r), rec.regions[r]));
    j["regions"] = regions;
    return j;
}

ordered_json params_json(const EquilibriumParams& p)
{
    return {{"a", p.a}, {"b", {p.b[0], p.b[1], p.b[2]}}};
}

}  // namespace

Setup make_setup(const RunConfig& cfg)
{
    validate(cfg);
    set_thread_count(cfg.threads);
    Grid grid = make_grid(cfg);
    BroadeningKernel kernel = make_kernel(cfg);
    validate_kernel(grid, kernel);
    if (!cfg.cache_dir.empty()) std::filesystem::create_directories(cfg.cache_dir);
    TriadTable table = load_or_enumerate(grid, kernel, make_triad_options(cfg), cfg.cache_dir);
    RegionDecomposition decomp = decompose(grid, table);
    return Setup{std::move(grid), kernel, std::move(table), std::move(decomp)};
}

void run_decompose(const RunConfig& cfg)
{
    const Setup s = make_setup(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    write_region_csv(cfg.output_dir / "regions.csv", s.grid, s.decomp);
    write_text_atomic(cfg.output_dir / "regions.json", region_summary_json(s.grid, s.table, s.decomp));
    finish(cfg);
}

void run_simulate(const RunConfig& cfg)
{
    const Setup s = make_setup(cfg);
    const Field f0 = make_initial(s.grid, cfg.init, &s.decomp);
    SimConfig sim = cfg.sim;
    if (cfg.dt_auto) sim.dt = auto_time_step(s.grid, s.table, f0, cfg.dt_safety);
    const auto snap_dir = cfg.output_dir / "snapshots";
    std::filesystem::create_directories(snap_dir);
    sim.snapshot_cap = 0;
    sim.spill_dir = snap_dir;

    std::ofstream diag(cfg.output_dir / "diagnostics.jsonl", std::ios::trunc);
    if (!diag) throw std::runtime_error("cannot open diagnostics file in " + cfg.output_dir.string());
    auto observer = [&](const DiagnosticsRecord& rec, const Field&) {
        diag << diagnostics_line(rec).dump() << '\n';
        diag.flush();
    };

    Trajectory traj;
    try {
        traj = simulate(s.grid, s.table, s.decomp, f0, sim, observer);
    } catch (const StepFailure& e) {
        ordered_json fail{{"error", e.what()}, {"t", e.time()}};
        write_text_atomic(cfg.output_dir / "failure.json", fail.dump(2) + "\n");
        finish(cfg);
        throw;
    }

    ordered_json cmp;
    cmp["t_end"] = sim.t_end;
    cmp["dt"] = sim.dt;
    auto regions = ordered_json::array();
    for (int r = 1; r <= s.decomp.region_count(); ++r) {
        ordered_json e;
        e["region_id"] = r;
        const auto inv = local_invariants(s.grid, s.decomp, r, f0);
        const auto& nodes = s.decomp.nodes(r);
        const double l1_f0 = s.grid.cell_volume() * tree_sum(nodes.size(), [&](std::size_t i) { return std::abs(f0[nodes[i]]); });
        e["l1_f0"] = l1_f0;
        try {
            const auto sol = solve_equilibrium(s.grid, s.decomp, r, inv, EquilibriumKind::classical);
            e["equilibrium"] = params_json(sol.params);
            const double d0 = distance_report(s.grid, s.decomp, r, f0, sol.params, 1.0);
            const double d1 = distance_report(s.grid, s.decomp, r, traj.final_state, sol.params, 1.0);
            e["l1_initial"] = d0;
            e["l1_final"] = d1;
            e["l1_final_relative"] = l1_f0 > 0.0 ? ordered_json(d1 / l1_f0) : ordered_json();
        } catch (const std::exception& ex) {
            e["error"] = ex.what();
        }
        regions.push_back(e);
    }
    cmp["regions"] = regions;
    write_text_atomic(cfg.output_dir / "comparison.json", cmp.dump(2) + "\n");
    finish(cfg);
}

void run_equilibrium(const RunConfig& cfg)
{
    const Setup s = make_setup(cfg);
    std::vector<LocalInvariants> inputs;
    if (cfg.invariants_from_field) {
        const Field f = make_initial(s.grid, cfg.init, &s.decomp);
        for (int r = 1; r <= s.decomp.region_count(); ++r) inputs.push_back(local_invariants(s.grid, s.decomp, r, f));
    } else {
        for (const auto& in : cfg.invariants) {
            if (in.region < 1 || in.region > s.decomp.region_count())
                throw std::invalid_argument("invariants given for unknown region " + std::to_string(in.region));
            inputs.push_back(LocalInvariants{in.region, in.E, in.M});
        }
    }

    auto out = ordered_json::array();
    for (const auto& inv : inputs) {
        for (auto kind : cfg.kinds) {
            ordered_json e;
            e["region_id"] = inv.region_id;
            e["kind"] = to_string(kind);
            e["E"] = inv.E;
            e["M"] = {inv.M[0], inv.M[1], inv.M[2]};
            try {
                const auto sol = solve_equilibrium(s.grid, s.decomp, inv.region_id, inv, kind);
                e["a"] = sol.params.a;
                e["b"] = {sol.params.b[0], sol.params.b[1], sol.params.b[2]};
                e["residual"] = sol.report.residual;
                e["unique"] = sol.report.unique;
                e["jacobian_condition"] = sol.report.jacobian_condition;
                e["continuity_ok"] = sol.report.continuity_ok;
            } catch (const EquilibriumError& ex) {
                e["error"] = ex.what();
                e["reason"] = ex.reason() == EquilibriumError::Reason::inadmissible ? "inadmissible" : "no_convergence";
                e["best_residual"] = number_or_null(ex.best_residual());
            } catch (const std::invalid_argument& ex) {
                e["error"] = ex.what();
                e["reason"] = "inadmissible";
            }
            out.push_back(e);
        }
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_text_atomic(cfg.output_dir / "equilibrium.json", out.dump(2) + "\n");
    finish(cfg);
}

void run_indices(const RunConfig& cfg)
{
    validate(cfg);
    set_thread_count(cfg.threads);
    const Grid grid = make_grid(cfg);
    const BroadeningKernel kernel = make_kernel(cfg);
    validate_kernel(grid, kernel);
    SplitMix64 rng(cfg.index_seed);
    const int D = grid.half_width();
    auto draw = [&] {
        return 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(D));
    };
    auto sign = [&] { return (rng.next() >> 63) ? -1 : 1; };

    auto points = ordered_json::array();
    for (int p = 0; p < cfg.index_points; ++p) {
        const Wavevector x{sign() * draw(), sign() * draw(), sign() * draw()};
        const auto c = grid.coords(x);
        ordered_json e;
        e["ix"] = x.ix;
        e["iy"] = x.iy;
        e["iz"] = x.iz;
        e["k"] = {c[0], c[1], c[2]};
        e["mu_forward"] = mu_index_all(grid, kernel, CollisionKind::forward, x);
        e["mu_backward"] = mu_index_all(grid, kernel, CollisionKind::backward, x);
        const auto rep = mu_bound_check(grid, kernel, x);
        e["mu_central"] = rep.mu3_value;
        e["bound"] = rep.bound_value;
        e["ratio"] = rep.ratio;
        points.push_back(e);
    }
    ordered_json doc;
    doc["D"] = D;
    doc["theta"] = kernel.theta;
    doc["points"] = points;
    std::filesystem::create_directories(cfg.output_dir);
    write_text_atomic(cfg.output_dir / "indices.json", doc.dump(2) + "\n");
    finish(cfg);
}

}  // namespace wavekin
