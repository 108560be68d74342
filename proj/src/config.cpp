#include "wavekin/config.hpp"

#include "wavekin/io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavekin {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string to_string(InitKind k)
{
    switch (k) {
    case InitKind::constant: return "constant";
    case InitKind::random_uniform: return "random_uniform";
    case InitKind::file: return "file";
    }
    return {};
}

InitKind parse_init_kind(const std::string& s)
{
    if (s == "constant") return InitKind::constant;
    if (s == "random_uniform") return InitKind::random_uniform;
    if (s == "file") return InitKind::file;
    throw std::invalid_argument("unknown init kind '" + s + "'");
}

std::string to_string(InitSupport s)
{
    switch (s) {
    case InitSupport::all: return "all";
    case InitSupport::no_collision: return "no_collision";
    case InitSupport::collisional: return "collisional";
    }
    return {};
}

InitSupport parse_support(const std::string& s)
{
    if (s == "all") return InitSupport::all;
    if (s == "no_collision") return InitSupport::no_collision;
    if (s == "collisional") return InitSupport::collisional;
    throw std::invalid_argument("unknown init support '" + s + "'");
}

Integrator parse_integrator(const std::string& s)
{
    if (s == "rk4") return Integrator::rk4;
    if (s == "euler") return Integrator::euler;
    throw std::invalid_argument("unknown integrator '" + s + "'");
}

PositivityMode parse_positivity(const std::string& s)
{
    if (s == "halve_step") return PositivityMode::halve_step;
    if (s == "reject") return PositivityMode::reject;
    throw std::invalid_argument("unknown positivity mode '" + s + "'");
}

/// Recursively overlays `src` onto `dst`, rejecting keys absent from `dst`.
void merge_known(json& dst, const json& src, const std::string& where)
{
    if (!src.is_object()) throw std::invalid_argument("config section '" + where + "' must be an object");
    for (auto it = src.begin(); it != src.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        if (!dst.contains(it.key())) throw std::invalid_argument("unknown config key '" + path + "'");
        json& slot = dst[it.key()];
        if (slot.is_object() && it->is_object())
            merge_known(slot, *it, path);
        else
            slot = *it;
    }
}

template <class T>
T get(const json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

ordered_json to_json(const RunConfig& cfg)
{
    ordered_json j;
    j["D"] = cfg.D;
    j["omega0"] = cfg.omega0;
    j["allow_any_omega0"] = cfg.allow_any_omega0;
    j["theta"] = cfg.theta;
    j["kernel"] = {{"shape", to_string(cfg.shape)},
                   {"cutoff_multiple", cfg.cutoff_multiple ? ordered_json(*cfg.cutoff_multiple) : ordered_json()}};
    j["c_K"] = cfg.c_K;
    j["init"] = {{"kind", to_string(cfg.init.kind)},  {"base", cfg.init.base},
                 {"amplitude", cfg.init.amplitude},    {"seed", cfg.init.seed},
                 {"path", cfg.init.path.string()},     {"support", to_string(cfg.init.support)}};
    const auto& s = cfg.sim;
    ordered_json sim;
    sim["dt"] = cfg.dt_auto ? ordered_json("auto") : ordered_json(s.dt);
    sim["dt_safety"] = cfg.dt_safety;
    sim["t_end"] = s.t_end;
    sim["integrator"] = s.integrator == Integrator::rk4 ? "rk4" : "euler";
    sim["positivity_mode"] = s.positivity_mode == PositivityMode::halve_step ? "halve_step" : "reject";
    sim["max_halvings"] = s.max_halvings;
    sim["diagnostics_every"] = s.diagnostics_every;
    sim["snapshot_every"] = s.snapshot_every;
    sim["cutoff_N"] = s.cutoff ? ordered_json(s.cutoff->N) : ordered_json();
    sim["energy_projection"] = s.energy_projection;
    sim["conservation_rel"] = s.conservation_rel;
    sim["entropy_backstep"] = s.entropy_backstep;
    j["sim"] = sim;
    auto kinds = ordered_json::array();
    for (auto k : cfg.kinds) kinds.push_back(to_string(k));
    auto inv = ordered_json::array();
    for (const auto& r : cfg.invariants) inv.push_back({{"region", r.region}, {"E", r.E}, {"M", r.M}});
    j["equilibrium"] = {{"kinds", kinds}, {"input", cfg.invariants_from_field ? "field" : "invariants"},
                        {"invariants", inv}};
    j["indices"] = {{"points", cfg.index_points}, {"seed", cfg.index_seed}};
    j["output_dir"] = cfg.output_dir.string();
    j["cache_dir"] = cfg.cache_dir.string();
    j["threads"] = cfg.threads;
    return j;
}

RunConfig config_from_json(const json& doc)
{
    json full = json(to_json(RunConfig{}));
    merge_known(full, doc, "");
    RunConfig cfg;
    cfg.D = get<int>(full, "D");
    cfg.omega0 = get<double>(full, "omega0");
    cfg.allow_any_omega0 = get<bool>(full, "allow_any_omega0");
    cfg.theta = get<double>(full, "theta");
    const auto& kernel = full["kernel"];
    cfg.shape = parse_kernel_shape(get<std::string>(kernel, "shape"));
    if (!kernel["cutoff_multiple"].is_null()) cfg.cutoff_multiple = get<double>(kernel, "cutoff_multiple");
    cfg.c_K = get<double>(full, "c_K");

    const auto& init = full["init"];
    cfg.init.kind = parse_init_kind(get<std::string>(init, "kind"));
    cfg.init.base = get<double>(init, "base");
    cfg.init.amplitude = get<double>(init, "amplitude");
    cfg.init.seed = get<std::uint64_t>(init, "seed");
    cfg.init.path = get<std::string>(init, "path");
    cfg.init.support = parse_support(get<std::string>(init, "support"));

    const auto& sim = full["sim"];
    if (sim["dt"].is_string()) {
        if (sim["dt"].get<std::string>() != "auto") throw std::invalid_argument("sim.dt must be a number or \"auto\"");
        cfg.dt_auto = true;
    } else {
        cfg.dt_auto = false;
        cfg.sim.dt = get<double>(sim, "dt");
    }
    cfg.dt_safety = get<double>(sim, "dt_safety");
    cfg.sim.t_end = get<double>(sim, "t_end");
    cfg.sim.integrator = parse_integrator(get<std::string>(sim, "integrator"));
    cfg.sim.positivity_mode = parse_positivity(get<std::string>(sim, "positivity_mode"));
    cfg.sim.max_halvings = get<int>(sim, "max_halvings");
    cfg.sim.diagnostics_every = get<int>(sim, "diagnostics_every");
    cfg.sim.snapshot_every = get<int>(sim, "snapshot_every");
    if (!sim["cutoff_N"].is_null()) cfg.sim.cutoff = CutoffSpec{get<double>(sim, "cutoff_N")};
    cfg.sim.energy_projection = get<bool>(sim, "energy_projection");
    cfg.sim.conservation_rel = get<double>(sim, "conservation_rel");
    cfg.sim.entropy_backstep = get<double>(sim, "entropy_backstep");

    const auto& eq = full["equilibrium"];
    cfg.kinds.clear();
    for (const auto& k : eq["kinds"]) cfg.kinds.push_back(parse_equilibrium_kind(k.get<std::string>()));
    const auto input = get<std::string>(eq, "input");
    if (input != "field" && input != "invariants")
        throw std::invalid_argument("equilibrium.input must be \"field\" or \"invariants\"");
    cfg.invariants_from_field = input == "field";
    for (const auto& r : eq["invariants"]) {
        RegionInvariantsInput in;
        in.region = get<int>(r, "region");
        in.E = get<double>(r, "E");
        in.M = get<std::array<double, 3>>(r, "M");
        cfg.invariants.push_back(in);
    }

    cfg.index_points = get<int>(full["indices"], "points");
    cfg.index_seed = get<std::uint64_t>(full["indices"], "seed");
    cfg.output_dir = get<std::string>(full, "output_dir");
    cfg.cache_dir = get<std::string>(full, "cache_dir");
    cfg.threads = get<unsigned>(full, "threads");
    return cfg;
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("override must look like key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    const json defaults = json(to_json(RunConfig{}));
    const json* known = &defaults;
    json* slot = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty() || !known->is_object() || !known->contains(part))
            throw std::invalid_argument("unknown config key '" + key + "'");
        known = &(*known)[part];
        if (!slot->is_object()) *slot = json::object();
        slot = &(*slot)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *slot = value;
}

void validate(const RunConfig& cfg)
{
    if (cfg.D < 1) throw std::invalid_argument("D must be >= 1");
    if (!std::isfinite(cfg.omega0)) throw std::invalid_argument("omega0 must be finite");
    if (!cfg.allow_any_omega0 && !(cfg.omega0 > 2.0 && cfg.omega0 < 3.0))
        throw std::invalid_argument("omega0 must lie in (2, 3)");
    if (!(cfg.theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(cfg.theta < cfg.omega0 - 2.0)) throw std::invalid_argument("theta must be smaller than omega0 - 2");
    if (cfg.cutoff_multiple && !(*cfg.cutoff_multiple > 0.0 && std::isfinite(*cfg.cutoff_multiple)))
        throw std::invalid_argument("kernel.cutoff_multiple must be positive");
    if (cfg.c_K != 1.0 && cfg.c_K != 8.0) throw std::invalid_argument("c_K must be 1 or 8");
    if (cfg.init.kind == InitKind::file && cfg.init.path.empty())
        throw std::invalid_argument("init.path is required for file initial data");
    if (cfg.init.kind != InitKind::file &&
        (cfg.init.base < 0.0 || cfg.init.base + std::min(cfg.init.amplitude, 0.0) < 0.0))
        throw std::invalid_argument("initial data would be negative");
    if (!(cfg.dt_safety > 0.0)) throw std::invalid_argument("sim.dt_safety must be positive");
    SimConfig sim = cfg.sim;
    if (cfg.dt_auto) sim.dt = 1.0;
    validate(sim);
    if (cfg.kinds.empty()) throw std::invalid_argument("equilibrium.kinds must not be empty");
    if (cfg.index_points < 0) throw std::invalid_argument("indices.points must be >= 0");
}

RunConfig load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides)
{
    json doc = json::object();
    if (path) {
        doc = json::parse(read_text(*path), nullptr, false);
        if (doc.is_discarded()) throw std::invalid_argument("config file " + path->string() + " is not valid JSON");
    }
    for (const auto& o : overrides) apply_override(doc, o);
    RunConfig cfg = config_from_json(doc);
    validate(cfg);
    return cfg;
}

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.D, cfg.omega0, cfg.allow_any_omega0); }

BroadeningKernel make_kernel(const RunConfig& cfg)
{
    if (cfg.shape == KernelShape::gaussian)
        return BroadeningKernel::gaussian(cfg.theta, cfg.cutoff_multiple.value_or(3.0));
    return BroadeningKernel::box(cfg.theta, cfg.cutoff_multiple.value_or(1.0));
}

TriadOptions make_triad_options(const RunConfig& cfg) { return TriadOptions{cfg.c_K}; }

std::uint64_t SplitMix64::next()
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Field make_initial(const Grid& grid, const InitSpec& spec, const RegionDecomposition* decomp)
{
    Field f(grid.node_count(), 0.0);
    switch (spec.kind) {
    case InitKind::constant:
        std::fill(f.values.begin(), f.values.end(), spec.base);
        break;
    case InitKind::random_uniform: {
        SplitMix64 rng(spec.seed);
        for (auto& v : f.values) v = spec.base + spec.amplitude * rng.next_unit();
        break;
    }
    case InitKind::file:
        f = read_snapshot_csv(spec.path, grid);
        break;
    }
    if (spec.support != InitSupport::all) {
        if (!decomp) throw std::invalid_argument("a restricted init support needs the region decomposition");
        const bool keep_zero_label = spec.support == InitSupport::no_collision;
        for (std::size_t u = 0; u < f.size(); ++u)
            if ((decomp->label[u] == 0) != keep_zero_label) f[u] = 0.0;
    }
    for (double v : f.values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("initial data must be finite and nonnegative");
    return f;
}

void write_snapshot_csv(const std::filesystem::path& path, const Grid& grid, const Field& f)
{
    if (f.size() != grid.node_count()) throw std::invalid_argument("field does not match grid size");
    std::string out = "ix,iy,iz,f\n";
    for (std::size_t u = 0; u < grid.node_count(); ++u) {
        const auto w = grid.wavevector(u);
        out += std::to_string(w.ix) + ',' + std::to_string(w.iy) + ',' + std::to_string(w.iz) + ',' +
               format_double(f[u]) + '\n';
    }
    write_text_atomic(path, out);
}

Field read_snapshot_csv(const std::filesystem::path& path, const Grid& grid)
{
    const CsvTable t = read_csv(path);
    const std::size_t cx = t.column("ix"), cy = t.column("iy"), cz = t.column("iz"), cf = t.column("f");
    Field f(grid.node_count(), 0.0);
    std::vector<char> seen(grid.node_count(), 0);
    try {
        for (const auto& row : t.rows) {
            const Wavevector w{static_cast<int>(parse_integer(row[cx])), static_cast<int>(parse_integer(row[cy])),
                               static_cast<int>(parse_integer(row[cz]))};
            if (!grid.contains(w)) throw std::runtime_error("wavevector outside the grid");
            const std::size_t u = grid.index(w);
            if (seen[u]) throw std::runtime_error("duplicate node");
            seen[u] = 1;
            f[u] = parse_double(row[cf]);
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed snapshot " + path.string() + ": " + e.what());
    }
    for (char s : seen)
        if (!s) throw std::runtime_error("snapshot " + path.string() + " does not cover every node");
    return f;
}

}  // namespace wavekin
