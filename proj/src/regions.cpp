#include "wavekin/regions.hpp"

#include "wavekin/io.hpp"
#include "wavekin/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace wavekin {

const std::vector<std::size_t>& RegionDecomposition::nodes(int region) const
{
    if (region < 0 || region > region_count())
        throw std::out_of_range("unknown region id " + std::to_string(region));
    return region_nodes[static_cast<std::size_t>(region)];
}

RegionDecomposition RegionDecomposition::from_labels(const Grid& grid, std::vector<int> labels)
{
    if (labels.size() != grid.node_count()) throw std::invalid_argument("label vector does not match grid size");
    const int max_label = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    RegionDecomposition d;
    d.region_nodes.resize(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t u = 0; u < labels.size(); ++u) {
        if (labels[u] < 0) throw std::invalid_argument("negative region label");
        d.region_nodes[static_cast<std::size_t>(labels[u])].push_back(u);
    }
    for (int r = 1; r <= max_label; ++r)
        if (d.region_nodes[static_cast<std::size_t>(r)].empty())
            throw std::invalid_argument("region labels must be contiguous");
    d.region_measure.resize(d.region_nodes.size());
    for (std::size_t r = 0; r < d.region_nodes.size(); ++r)
        d.region_measure[r] = grid.cell_volume() * static_cast<double>(d.region_nodes[r].size());
    d.label = std::move(labels);
    return d;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace

RegionDecomposition decompose(const Grid& grid, const TriadTable& table)
{
    const std::size_t count = grid.node_count();
    if (table.node_count() != count) throw std::invalid_argument("triad table was built on a different grid");
    DisjointSets sets(count);
    for (const auto& tr : table.triples()) {
        sets.unite(tr.k, tr.k1);
        sets.unite(tr.k, tr.k2);
    }
    std::vector<int> labels(count, 0);
    std::vector<int> root_label(count, 0);
    int next = 0;
    for (std::size_t u = 0; u < count; ++u) {
        if (!table.touches(u)) continue;
        const std::size_t r = sets.find(u);
        if (root_label[r] == 0) root_label[r] = ++next;
        labels[u] = root_label[r];
    }
    return RegionDecomposition::from_labels(grid, std::move(labels));
}

RegionDecomposition decompose_bfs(const Grid& grid, const TriadTable& table)
{
    const std::size_t count = grid.node_count();
    std::vector<int> labels(count, 0);
    int next = 0;
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < count; ++start) {
        if (labels[start] != 0 || !table.touches(start)) continue;
        labels[start] = ++next;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (const auto& ref : table.incident(u)) {
                const auto& tr = table.triples()[ref.triple];
                for (std::size_t v : {tr.k, tr.k1, tr.k2}) {
                    if (labels[v] == 0) {
                        labels[v] = next;
                        queue.push_back(v);
                    }
                }
            }
        }
    }
    return RegionDecomposition::from_labels(grid, std::move(labels));
}

std::vector<std::size_t> n_collision_hull(const Grid& grid, const TriadTable& table, const Wavevector& x, int n)
{
    if (n < 1) throw std::invalid_argument("collision count n must be positive");
    const std::size_t xi = grid.index(x);
    if (!table.touches(xi)) throw std::domain_error("wavevector lies in the no-collision region");
    std::vector<char> in(grid.node_count(), 0);
    std::vector<std::size_t> frontier{xi};
    in[xi] = 1;
    for (int step = 0; step < n && !frontier.empty(); ++step) {
        std::vector<std::size_t> next;
        for (std::size_t u : frontier)
            for (const auto& ref : table.incident(u)) {
                const auto& tr = table.triples()[ref.triple];
                for (std::size_t v : {tr.k, tr.k1, tr.k2})
                    if (!in[v]) {
                        in[v] = 1;
                        next.push_back(v);
                    }
            }
        frontier = std::move(next);
    }
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < in.size(); ++u)
        if (in[u]) out.push_back(u);
    return out;
}

LocalInvariants local_invariants(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                                 const Field& f)
{
    if (region_id < 1 || region_id > decomp.region_count())
        throw std::out_of_range("unknown region id " + std::to_string(region_id));
    if (f.size() != grid.node_count()) throw std::invalid_argument("field does not match grid size");
    const auto& nodes = decomp.nodes(region_id);
    const double h3 = grid.cell_volume();
    LocalInvariants inv;
    inv.region_id = region_id;
    inv.E = h3 * tree_sum(nodes.size(), [&](std::size_t i) { return f[nodes[i]] * grid.omega(nodes[i]); });
    for (int j = 0; j < 3; ++j)
        inv.M[j] = h3 * tree_sum(nodes.size(), [&](std::size_t i) { return f[nodes[i]] * grid.coords(nodes[i])[j]; });
    return inv;
}

void write_region_csv(const std::filesystem::path& path, const Grid& grid, const RegionDecomposition& decomp)
{
    std::string out = "ix,iy,iz,kx,ky,kz,omega,label\n";
    for (std::size_t u = 0; u < grid.node_count(); ++u) {
        const auto w = grid.wavevector(u);
        const auto c = grid.coords(u);
        out += std::to_string(w.ix) + ',' + std::to_string(w.iy) + ',' + std::to_string(w.iz) + ',' +
               format_double(c[0]) + ',' + format_double(c[1]) + ',' + format_double(c[2]) + ',' +
               format_double(grid.omega(u)) + ',' + std::to_string(decomp.label[u]) + '\n';
    }
    write_text_atomic(path, out);
}

std::string region_summary_json(const Grid& grid, const TriadTable& table, const RegionDecomposition& decomp)
{
    nlohmann::ordered_json j;
    j["D"] = grid.half_width();
    j["nodes"] = grid.node_count();
    j["omega0"] = grid.omega0();
    j["triple_count"] = table.size();
    j["no_collision_size"] = decomp.no_collision().size();
    j["no_collision_measure"] = decomp.region_measure[0];
    j["origin_label"] = decomp.label[grid.index({0, 0, 0})];
    j["region_count"] = decomp.region_count();
    auto regions = nlohmann::ordered_json::array();
    for (int r = 1; r <= decomp.region_count(); ++r) {
        nlohmann::ordered_json e;
        e["id"] = r;
        e["size"] = decomp.nodes(r).size();
        e["measure"] = decomp.region_measure[static_cast<std::size_t>(r)];
        e["first_node"] = decomp.nodes(r).front();
        regions.push_back(e);
    }
    j["regions"] = regions;
    return j.dump(2) + "\n";
}

}  // namespace wavekin
