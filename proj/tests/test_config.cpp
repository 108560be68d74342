#include "support.hpp"

#include "wavekin/commands.hpp"
#include "wavekin/config.hpp"
#include "wavekin/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace wavekin;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config(const std::filesystem::path& out)
{
    RunConfig cfg;
    cfg.D = 3;
    cfg.theta = 0.3;
    cfg.output_dir = out;
    cfg.cache_dir = out / "cache";
    return cfg;
}

}  // namespace

TEST_CASE("default config survives a JSON round trip")
{
    const RunConfig def;
    const auto j = to_json(def);
    const RunConfig back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
    CHECK(j["sim"]["dt"] == "auto");
    CHECK(j["kernel"]["cutoff_multiple"].is_null());
    CHECK(j["sim"]["cutoff_N"].is_null());
}

TEST_CASE("partial documents and overrides")
{
    const auto cfg = config_from_json(nlohmann::json::parse(R"({"D": 4, "sim": {"dt": 0.05, "integrator": "euler"}})"));
    CHECK(cfg.D == 4);
    CHECK_FALSE(cfg.dt_auto);
    CHECK(cfg.sim.dt == 0.05);
    CHECK(cfg.sim.integrator == Integrator::euler);
    CHECK(cfg.theta == RunConfig{}.theta);

    auto doc = to_json(RunConfig{});
    nlohmann::json plain = nlohmann::json::parse(doc.dump());
    apply_override(plain, "sim.cutoff_N=12.5");
    apply_override(plain, "kernel.shape=box");
    apply_override(plain, "output_dir=results/run 1");
    apply_override(plain, "equilibrium.kinds=[\"classical\",\"quantized\"]");
    const auto o = config_from_json(plain);
    REQUIRE(o.sim.cutoff);
    CHECK(o.sim.cutoff->N == 12.5);
    CHECK(o.shape == KernelShape::box);
    CHECK(o.output_dir == "results/run 1");
    CHECK(o.kinds.size() == 2);

    CHECK_THROWS_AS(apply_override(plain, "sim.nonsense=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(plain, "no_equals_sign"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"kernel": {"width": 1}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"sim": {"dt": "fast"}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"D": "six"})")), std::invalid_argument);
}

TEST_CASE("config validation")
{
    auto bad = [](auto mutate) {
        RunConfig c;
        mutate(c);
        return c;
    };
    CHECK_NOTHROW(validate(RunConfig{}));
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.D = 0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.omega0 = 3.5; })), std::invalid_argument);
    CHECK_NOTHROW(validate(bad([](RunConfig& c) {
        c.omega0 = 3.5;
        c.allow_any_omega0 = true;
    })));
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.theta = 0.6; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.theta = 0.0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.c_K = 2.0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.init.kind = InitKind::file; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.init.base = -1.0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](RunConfig& c) { c.sim.t_end = -1.0; })), std::invalid_argument);
    CHECK_THROWS_AS(load_config(std::nullopt, {"theta=0.9"}), std::invalid_argument);
    CHECK(load_config(std::nullopt, {"D=2"}).D == 2);
}

TEST_CASE("SplitMix64 reference stream")
{
    SplitMix64 a(0);
    CHECK(a.next() == 0xe220a8397b1dcdafULL);
    CHECK(a.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 b(12345), c(12345);
    for (int i = 0; i < 100; ++i) {
        const double u = b.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == c.next_unit());
    }
}

TEST_CASE("initial fields")
{
    const auto& r = wktest::reference();
    InitSpec spec;
    spec.kind = InitKind::constant;
    spec.base = 2.0;
    const Field c = make_initial(r.grid, spec);
    CHECK(std::all_of(c.values.begin(), c.values.end(), [](double v) { return v == 2.0; }));

    spec.kind = InitKind::random_uniform;
    spec.base = 1.0;
    spec.amplitude = 0.5;
    spec.seed = 9;
    const Field u1 = make_initial(r.grid, spec), u2 = make_initial(r.grid, spec);
    CHECK(u1.values == u2.values);
    SplitMix64 rng(9);
    for (std::size_t i = 0; i < 5; ++i) CHECK(u1[i] == 1.0 + 0.5 * rng.next_unit());
    for (double v : u1.values) CHECK((v >= 1.0 && v < 1.5));

    spec.support = InitSupport::collisional;
    CHECK_THROWS_AS(make_initial(r.grid, spec), std::invalid_argument);
    const Field col = make_initial(r.grid, spec, &r.decomp);
    spec.support = InitSupport::no_collision;
    const Field nc = make_initial(r.grid, spec, &r.decomp);
    for (std::size_t i = 0; i < col.size(); ++i) {
        const bool in_j = r.decomp.label[i] == 0;
        CHECK(col[i] == (in_j ? 0.0 : u1[i]));
        CHECK(nc[i] == (in_j ? u1[i] : 0.0));
    }

    spec.support = InitSupport::all;
    spec.amplitude = -2.0;
    CHECK_THROWS_AS(make_initial(r.grid, spec), std::invalid_argument);
}

TEST_CASE("snapshot CSV round trip and malformed files")
{
    const Grid g(2, 2.5);
    const auto dir = wktest::scratch("snapshot");
    const Field f = wktest::random_field(g.node_count(), 0.0, 1.0, 8);
    write_snapshot_csv(dir / "a.csv", g, f);
    CHECK(read_snapshot_csv(dir / "a.csv", g).values == f.values);

    InitSpec spec;
    spec.kind = InitKind::file;
    spec.path = dir / "a.csv";
    CHECK(make_initial(g, spec).values == f.values);

    const std::string text = slurp(dir / "a.csv");
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream(dir / name) << body;
        return dir / name;
    };
    const auto last_line = text.rfind('\n', text.size() - 2);
    CHECK_THROWS_AS(read_snapshot_csv(write("short.csv", text.substr(0, last_line + 1)), g), std::runtime_error);
    CHECK_THROWS_AS(read_snapshot_csv(write("dup.csv", text + "0,0,0,1.0\n"), g), std::runtime_error);
    CHECK_THROWS_AS(read_snapshot_csv(write("junk.csv", text.substr(0, last_line + 1) + "2,2,2,abc\n"), g),
                    std::runtime_error);
    CHECK_THROWS_AS(read_snapshot_csv(write("range.csv", text.substr(0, last_line + 1) + "9,0,0,1.0\n"), g),
                    std::runtime_error);
    CHECK_THROWS_AS(read_snapshot_csv(dir / "missing.csv", g), std::runtime_error);
    CHECK_THROWS_AS(read_snapshot_csv(dir / "a.csv", Grid(3, 2.5)), std::runtime_error);
}

TEST_CASE("decompose command is reproducible")
{
    const auto dir = wktest::scratch("cmd_decompose");
    auto cfg = small_config(dir / "out");
    run_decompose(cfg);
    const std::string csv = slurp(cfg.output_dir / "regions.csv");
    const std::string summary = slurp(cfg.output_dir / "regions.json");
    run_decompose(cfg);
    CHECK(slurp(cfg.output_dir / "regions.csv") == csv);
    CHECK(slurp(cfg.output_dir / "regions.json") == summary);
    const auto echoed = nlohmann::json::parse(slurp(cfg.output_dir / "config.json"));
    CHECK(to_json(config_from_json(echoed)).dump() == to_json(cfg).dump());
    CHECK(std::filesystem::exists(cfg.cache_dir));
}

TEST_CASE("simulate command writes deterministic diagnostics")
{
    const auto dir = wktest::scratch("cmd_simulate");
    auto cfg = small_config(dir / "out");
    cfg.sim.t_end = 2.0;
    cfg.sim.diagnostics_every = 2;
    run_simulate(cfg);
    const std::string first = slurp(cfg.output_dir / "diagnostics.jsonl");
    run_simulate(cfg);
    CHECK(slurp(cfg.output_dir / "diagnostics.jsonl") == first);

    std::istringstream lines(first);
    std::string line;
    int count = 0;
    double last_t = -1.0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["t"].get<double>() > last_t);
        last_t = j["t"].get<double>();
        CHECK(j.contains("regions"));
        ++count;
    }
    CHECK(last_t == 2.0);
    CHECK(count >= 2);
    std::size_t snaps = 0;
    for (const auto& e : std::filesystem::directory_iterator(cfg.output_dir / "snapshots")) snaps += e.is_regular_file();
    CHECK(snaps == static_cast<std::size_t>(count));
    const auto cmp = nlohmann::json::parse(slurp(cfg.output_dir / "comparison.json"));
    CHECK(cmp["regions"].size() > 0);
    for (const auto& e : cmp["regions"]) CHECK(e.contains("l1_final"));
}

TEST_CASE("simulate command records integrator failures")
{
    const auto dir = wktest::scratch("cmd_failure");
    auto cfg = small_config(dir / "out");
    cfg.dt_auto = false;
    cfg.sim.dt = 1e8;
    cfg.sim.t_end = 1e8;
    cfg.sim.integrator = Integrator::euler;
    cfg.sim.positivity_mode = PositivityMode::reject;
    CHECK_THROWS_AS(run_simulate(cfg), StepFailure);
    const auto fail = nlohmann::json::parse(slurp(cfg.output_dir / "failure.json"));
    CHECK(fail["t"] == 0.0);
    CHECK(std::filesystem::exists(cfg.output_dir / "config.json"));
}

TEST_CASE("equilibrium command: field and explicit invariants agree")
{
    const auto dir = wktest::scratch("cmd_equilibrium");
    auto cfg = small_config(dir / "field");
    cfg.kinds = {EquilibriumKind::classical, EquilibriumKind::quantized};
    run_equilibrium(cfg);
    const auto from_field = nlohmann::json::parse(slurp(cfg.output_dir / "equilibrium.json"));
    REQUIRE(from_field.size() > 0);

    auto cfg2 = small_config(dir / "inv");
    cfg2.kinds = cfg.kinds;
    cfg2.invariants_from_field = false;
    for (const auto& e : from_field) {
        if (e["kind"] != "classical") continue;
        cfg2.invariants.push_back(RegionInvariantsInput{
            e["region_id"].get<int>(), e["E"].get<double>(), {e["M"][0].get<double>(), e["M"][1].get<double>(), e["M"][2].get<double>()}});
    }
    run_equilibrium(cfg2);
    const auto from_inv = nlohmann::json::parse(slurp(cfg2.output_dir / "equilibrium.json"));
    REQUIRE(from_inv.size() == from_field.size());
    for (std::size_t i = 0; i < from_inv.size(); ++i) {
        const auto& x = from_field[i];
        const auto& y = from_inv[i];
        CHECK(x["kind"] == y["kind"]);
        REQUIRE(x.contains("a") == y.contains("a"));
        if (!x.contains("a")) continue;
        CHECK(y["a"].get<double>() == doctest::Approx(x["a"].get<double>()).epsilon(1e-10));
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(y["b"][j].get<double>() - x["b"][j].get<double>()) <= 1e-10 * (1.0 + std::abs(x["a"].get<double>())));
    }

    cfg2.invariants.push_back(RegionInvariantsInput{99, 1.0, {}});
    CHECK_THROWS_AS(run_equilibrium(cfg2), std::invalid_argument);
}

TEST_CASE("equilibrium command rejects a malformed field file")
{
    const auto dir = wktest::scratch("cmd_equilibrium_bad");
    std::ofstream(dir / "bad.csv") << "ix,iy,iz,f\n0,0,0,1\n";
    auto cfg = small_config(dir / "out");
    cfg.init.kind = InitKind::file;
    cfg.init.path = dir / "bad.csv";
    CHECK_THROWS_AS(run_equilibrium(cfg), std::runtime_error);
    CHECK_FALSE(std::filesystem::exists(cfg.output_dir / "equilibrium.json"));
}

TEST_CASE("indices command")
{
    const auto dir = wktest::scratch("cmd_indices");
    auto cfg = small_config(dir / "out");
    cfg.D = 8;
    cfg.theta = 0.25;
    cfg.index_points = 5;
    run_indices(cfg);
    const auto j = nlohmann::json::parse(slurp(cfg.output_dir / "indices.json"));
    CHECK(j["D"] == 8);
    REQUIRE(j["points"].size() == 5);
    for (const auto& p : j["points"]) {
        for (const char* key : {"ix", "iy", "iz"}) {
            const int v = p[key].get<int>();
            CHECK(v != 0);
            CHECK(std::abs(v) <= 8);
        }
        CHECK(p["mu_forward"].get<double>() >= 0.0);
        CHECK(p["mu_backward"].get<double>() >= 0.0);
        CHECK(p["mu_central"].get<double>() >= 0.0);
    }
    const std::string first = slurp(cfg.output_dir / "indices.json");
    run_indices(cfg);
    CHECK(slurp(cfg.output_dir / "indices.json") == first);
}
