#pragma once

#include "wavekin/field.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/resonance.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wavekin {

/// Partition of the grid into the no-collision region (label 0) and the
/// collisional invariant regions 1..R.
struct RegionDecomposition {
    std::vector<int> label;
    /// Indexed by label; entry 0 lists the no-collision nodes.
    std::vector<std::vector<std::size_t>> region_nodes;
    /// h^3 times node count, indexed by label.
    std::vector<double> region_measure;

    int region_count() const noexcept { return static_cast<int>(region_nodes.size()) - 1; }
    const std::vector<std::size_t>& nodes(int region) const;
    const std::vector<std::size_t>& no_collision() const { return region_nodes.at(0); }

    /// Builds node lists and measures from a label vector (labels must be
    /// 0..R with every r >= 1 nonempty).
    static RegionDecomposition from_labels(const Grid& grid, std::vector<int> labels);
};

/// Union-find over triples; components numbered by their smallest node.
RegionDecomposition decompose(const Grid& grid, const TriadTable& table);

/// Plain breadth-first search over the same incidence; test oracle.
RegionDecomposition decompose_bfs(const Grid& grid, const TriadTable& table);

/// Cumulative n-collision hull of x: {x} grown n times by every node sharing
/// a triple with the current set. Sorted. Throws std::domain_error when x
/// appears in no triple.
std::vector<std::size_t> n_collision_hull(const Grid& grid, const TriadTable& table, const Wavevector& x, int n);

struct LocalInvariants {
    int region_id = 0;
    double E = 0.0;  ///< h^3 sum f omega
    Vec3 M{};        ///< h^3 sum f k
};

LocalInvariants local_invariants(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                                 const Field& f);

/// Region label CSV: ix,iy,iz,kx,ky,kz,omega,label.
void write_region_csv(const std::filesystem::path& path, const Grid& grid, const RegionDecomposition& decomp);
/// Summary JSON text: counts, sizes and measures.
std::string region_summary_json(const Grid& grid, const TriadTable& table, const RegionDecomposition& decomp);

}  // namespace wavekin
