#include "wavekin/io.hpp"
#include "wavekin/resonance.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavekin {

namespace {

constexpr char magic[8] = {'W', 'K', 'T', 'R', 'I', 'A', 'D', '1'};

std::string hexfloat(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

template <class T>
void put(std::ostream& out, const T& v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& in, T& v)
{
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

}  // namespace

std::string TriadKey::canonical() const
{
    std::ostringstream ss;
    ss << "D=" << half_width << ";omega0=" << hexfloat(omega0) << ";theta=" << hexfloat(theta)
       << ";shape=" << to_string(shape) << ";cutoff=" << hexfloat(cutoff_multiple) << ";cK=" << hexfloat(c_K);
    return ss.str();
}

std::string TriadKey::digest() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TriadKey make_key(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts)
{
    return {grid.half_width(), grid.omega0(), kernel.theta, kernel.shape, kernel.cutoff_multiple, opts.c_K};
}

void write_triad_cache(const std::filesystem::path& path, const Grid& grid, const TriadKey& key,
                       const TriadTable& table)
{
    std::ostringstream out(std::ios::binary);
    out.write(magic, sizeof magic);
    const std::string text = key.canonical();
    put(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put(out, static_cast<std::uint64_t>(table.size()));
    for (const auto& tr : table.triples()) {
        for (auto node : {tr.k, tr.k1, tr.k2}) {
            const auto w = grid.wavevector(node);
            put(out, static_cast<std::int32_t>(w.ix));
            put(out, static_cast<std::int32_t>(w.iy));
            put(out, static_cast<std::int32_t>(w.iz));
        }
        put(out, tr.weight);
        put(out, tr.kernel_factor);
    }
    write_text_atomic(path, out.str());
}

std::optional<TriadTable> read_triad_cache(const std::filesystem::path& path, const Grid& grid, const TriadKey& key)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char head[sizeof magic];
    if (!in.read(head, sizeof head) || std::memcmp(head, magic, sizeof magic) != 0) return std::nullopt;
    std::uint32_t len = 0;
    if (!get(in, len) || len > 4096) return std::nullopt;
    std::string text(len, '\0');
    if (!in.read(text.data(), len) || text != key.canonical()) return std::nullopt;
    std::uint64_t count = 0;
    if (!get(in, count)) return std::nullopt;

    std::vector<ResonanceTriple> triples;
    triples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t nodes[3];
        for (auto& node : nodes) {
            std::int32_t ix, iy, iz;
            if (!get(in, ix) || !get(in, iy) || !get(in, iz))
                throw std::runtime_error("truncated triad cache " + path.string());
            node = static_cast<std::uint32_t>(grid.index({ix, iy, iz}));
        }
        ResonanceTriple tr{nodes[0], nodes[1], nodes[2], 0.0, 0.0};
        if (!get(in, tr.weight) || !get(in, tr.kernel_factor))
            throw std::runtime_error("truncated triad cache " + path.string());
        triples.push_back(tr);
    }
    return TriadTable::from_triples(grid.node_count(), std::move(triples), false);
}

void write_triad_csv(const std::filesystem::path& path, const Grid& grid, const TriadTable& table)
{
    std::string out = "kx,ky,kz,k1x,k1y,k1z,k2x,k2y,k2z,weight,kernel_factor\n";
    for (const auto& tr : table.triples()) {
        for (auto node : {tr.k, tr.k1, tr.k2}) {
            const auto w = grid.wavevector(node);
            out += std::to_string(w.ix) + ',' + std::to_string(w.iy) + ',' + std::to_string(w.iz) + ',';
        }
        out += format_double(tr.weight) + ',' + format_double(tr.kernel_factor) + '\n';
    }
    write_text_atomic(path, out);
}

TriadTable read_triad_csv(const std::filesystem::path& path, const Grid& grid)
{
    const auto csv = read_csv(path);
    static const char* names[9] = {"kx", "ky", "kz", "k1x", "k1y", "k1z", "k2x", "k2y", "k2z"};
    std::size_t cols[9];
    for (int i = 0; i < 9; ++i) cols[i] = csv.column(names[i]);
    const std::size_t wcol = csv.column("weight"), fcol = csv.column("kernel_factor");
    std::vector<ResonanceTriple> triples;
    for (const auto& row : csv.rows) {
        std::uint32_t nodes[3];
        for (int s = 0; s < 3; ++s) {
            const Wavevector w{static_cast<int>(parse_integer(row[cols[3 * s]])),
                               static_cast<int>(parse_integer(row[cols[3 * s + 1]])),
                               static_cast<int>(parse_integer(row[cols[3 * s + 2]]))};
            nodes[s] = static_cast<std::uint32_t>(grid.index(w));
        }
        triples.push_back({nodes[0], nodes[1], nodes[2], parse_double(row[wcol]), parse_double(row[fcol])});
    }
    return TriadTable::from_triples(grid.node_count(), std::move(triples), false);
}

TriadTable load_or_enumerate(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts,
                             const std::filesystem::path& cache_dir)
{
    if (cache_dir.empty()) return enumerate_triples(grid, kernel, opts);
    const TriadKey key = make_key(grid, kernel, opts);
    const auto path = cache_dir / ("triads-" + key.digest() + ".bin");
    if (auto hit = read_triad_cache(path, grid, key)) return std::move(*hit);
    auto table = enumerate_triples(grid, kernel, opts);
    write_triad_cache(path, grid, key, table);
    return table;
}

}  // namespace wavekin
