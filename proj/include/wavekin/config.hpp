#pragma once

#include "wavekin/dynamics.hpp"
#include "wavekin/equilibrium.hpp"
#include "wavekin/field.hpp"
#include "wavekin/lattice.hpp"
#include "wavekin/regions.hpp"
#include "wavekin/resonance.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wavekin {

enum class InitKind { constant, random_uniform, file };
/// Where the initial field is nonzero.
enum class InitSupport { all, no_collision, collisional };

struct InitSpec {
    InitKind kind = InitKind::random_uniform;
    double base = 1.0;
    double amplitude = 0.5;
    std::uint64_t seed = 42;
    std::filesystem::path path;
    InitSupport support = InitSupport::all;
};

struct RegionInvariantsInput {
    int region = 0;
    double E = 0.0;
    Vec3 M{};
};

struct RunConfig {
    int D = 6;
    double omega0 = 2.5;
    bool allow_any_omega0 = false;
    double theta = 0.1;
    KernelShape shape = KernelShape::gaussian;
    /// Unset selects the shape's default (3 for gaussian, 1 for box).
    std::optional<double> cutoff_multiple;
    double c_K = 1.0;

    InitSpec init;
    SimConfig sim;
    bool dt_auto = true;
    double dt_safety = 0.25;

    /// Equilibrium command: kinds to solve and where (E, M) come from.
    std::vector<EquilibriumKind> kinds{EquilibriumKind::classical};
    bool invariants_from_field = true;
    std::vector<RegionInvariantsInput> invariants;

    /// Indices command: number of random interior points and their seed.
    int index_points = 20;
    std::uint64_t index_seed = 7;

    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir;
    unsigned threads = 0;
};

/// Canonical JSON form; every field is present.
nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Reads a full or partial document over the defaults. Unknown keys throw.
RunConfig config_from_json(const nlohmann::json& doc);

/// Applies "a.b.c=value" to a JSON document; the value is read as JSON when
/// it parses, otherwise as a string. Unknown keys throw.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Throws std::invalid_argument on any violated precondition.
void validate(const RunConfig& cfg);

/// Defaults, then the optional file, then overrides; validated.
RunConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides);

Grid make_grid(const RunConfig& cfg);
BroadeningKernel make_kernel(const RunConfig& cfg);
TriadOptions make_triad_options(const RunConfig& cfg);

/// splitmix64 stream; next_unit() is uniform on [0, 1) with 53 random bits.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// constant: base; random_uniform: base + amplitude u(node) drawn in node
/// order; file: snapshot CSV. The support mask (needs decomp unless `all`)
/// zeroes the other nodes. Throws std::invalid_argument on negative values.
Field make_initial(const Grid& grid, const InitSpec& spec, const RegionDecomposition* decomp = nullptr);

/// Snapshot CSV with header ix,iy,iz,f in node order.
void write_snapshot_csv(const std::filesystem::path& path, const Grid& grid, const Field& f);
/// Every node exactly once; throws std::runtime_error otherwise.
Field read_snapshot_csv(const std::filesystem::path& path, const Grid& grid);

}  // namespace wavekin
