#pragma once

#include "wavekin/config.hpp"

#include <filesystem>

namespace wavekin {

/// Grid, kernel, triad table and decomposition built from a config.
struct Setup {
    Grid grid;
    BroadeningKernel kernel;
    TriadTable table;
    RegionDecomposition decomp;
};

Setup make_setup(const RunConfig& cfg);

/// Each command writes into cfg.output_dir and finishes with a canonical
/// config.json echo. Errors propagate as exceptions.

/// regions.csv and regions.json.
void run_decompose(const RunConfig& cfg);

/// snapshots/snapshot_NNNNNN.csv, diagnostics.jsonl and comparison.json
/// (per-region classical equilibrium from the initial invariants and the
/// final L1 distances). On an integrator failure failure.json records the
/// time and the exception is rethrown; earlier outputs stay in place.
void run_simulate(const RunConfig& cfg);

/// equilibrium.json with one entry per (region, kind); inadmissible regions
/// are reported in place without stopping the others.
void run_equilibrium(const RunConfig& cfg);

/// indices.json: index functionals and the boundedness ratio at seeded
/// random interior points.
void run_indices(const RunConfig& cfg);

}  // namespace wavekin
