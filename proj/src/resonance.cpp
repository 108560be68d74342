#include "wavekin/resonance.hpp"

#include "wavekin/parallel.hpp"
#include "wavekin/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavekin {

double BroadeningKernel::support() const noexcept
{
    if (shape == KernelShape::box) return std::min(cutoff_multiple, 1.0) * theta;
    return cutoff_multiple * theta;
}

double BroadeningKernel::operator()(double s) const noexcept
{
    if (!(std::fabs(s) <= support())) return 0.0;
    if (shape == KernelShape::box) return 0.5 / theta;
    const double r = s / theta;
    return std::exp(-std::numbers::pi * r * r) / theta;
}

std::string to_string(KernelShape shape) { return shape == KernelShape::box ? "box" : "gaussian"; }

KernelShape parse_kernel_shape(const std::string& name)
{
    if (name == "gaussian") return KernelShape::gaussian;
    if (name == "box") return KernelShape::box;
    throw std::invalid_argument("unknown kernel shape '" + name + "'");
}

void validate_kernel(const Grid& grid, const BroadeningKernel& kernel)
{
    if (!(kernel.theta > 0.0) || !std::isfinite(kernel.theta))
        throw std::invalid_argument("broadening theta must be positive");
    if (!(kernel.cutoff_multiple > 0.0) || !std::isfinite(kernel.cutoff_multiple))
        throw std::invalid_argument("kernel cutoff_multiple must be positive");
    if (!(kernel.theta < grid.omega0() - 2.0))
        throw std::invalid_argument("broadening theta must be below omega0 - 2 (theta=" + std::to_string(kernel.theta) +
                                    ", omega0=" + std::to_string(grid.omega0()) + ")");
}

// ---------------------------------------------------------------------------

TriadTable TriadTable::from_triples(std::size_t node_count, std::vector<ResonanceTriple> triples, bool sort)
{
    if (sort)
        std::sort(triples.begin(), triples.end(), [](const ResonanceTriple& a, const ResonanceTriple& b) {
            return a.k != b.k ? a.k < b.k : a.k1 < b.k1;
        });

    TriadTable t;
    t.triples_ = std::move(triples);
    t.offsets_.assign(node_count + 1, 0);
    for (const auto& tr : t.triples_) {
        if (tr.k >= node_count || tr.k1 >= node_count || tr.k2 >= node_count)
            throw std::out_of_range("triple references a node outside the grid");
        ++t.offsets_[tr.k + 1];
        ++t.offsets_[tr.k1 + 1];
        ++t.offsets_[tr.k2 + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) t.offsets_[i + 1] += t.offsets_[i];
    t.entries_.resize(t.offsets_.back());
    std::vector<std::size_t> fill(t.offsets_.begin(), t.offsets_.end() - 1);
    for (std::uint32_t i = 0; i < t.triples_.size(); ++i) {
        const auto& tr = t.triples_[i];
        t.entries_[fill[tr.k]++] = {i, Slot::k};
        t.entries_[fill[tr.k1]++] = {i, Slot::k1};
        t.entries_[fill[tr.k2]++] = {i, Slot::k2};
    }
    return t;
}

bool TriadTable::consistent() const
{
    std::vector<int> seen(triples_.size() * 3, 0);
    for (std::size_t u = 0; u + 1 < offsets_.size(); ++u) {
        for (const auto& ref : incident(u)) {
            if (ref.triple >= triples_.size()) return false;
            const auto& tr = triples_[ref.triple];
            const std::uint32_t node = ref.slot == Slot::k ? tr.k : ref.slot == Slot::k1 ? tr.k1 : tr.k2;
            if (node != u) return false;
            ++seen[ref.triple * 3 + static_cast<std::size_t>(ref.slot)];
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

// ---------------------------------------------------------------------------

namespace {

ResonanceTriple make_triple(const Grid& grid, std::uint32_t k, std::uint32_t k1, std::uint32_t k2, double weight,
                            double c_K)
{
    const double wk = grid.omega(k), w1 = grid.omega(k1), w2 = grid.omega(k2);
    return {k, k1, k2, weight, 1.0 / (c_K * wk * w1 * w2)};
}

void check_options(const TriadOptions& opts)
{
    if (!(opts.c_K > 0.0)) throw std::invalid_argument("kernel prefactor c_K must be positive");
}

}  // namespace

TriadTable enumerate_triples_naive(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts)
{
    validate_kernel(grid, kernel);
    check_options(opts);
    const std::size_t count = grid.node_count();
    const double support = kernel.support();
    std::vector<ResonanceTriple> out;
    for (std::size_t i = 0; i < count; ++i) {
        const Wavevector a = grid.wavevector(i);
        for (std::size_t j = i; j < count; ++j) {
            const std::size_t k = grid.index(grid.add(a, grid.wavevector(j)));
            const double dw = grid.omega(k) - (grid.omega(i) + grid.omega(j));
            if (!(std::fabs(dw) <= support)) continue;
            const double w = kernel(dw);
            if (w > 0.0)
                out.push_back(make_triple(grid, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i),
                                          static_cast<std::uint32_t>(j), w, opts.c_K));
        }
    }
    return TriadTable::from_triples(count, std::move(out));
}

TriadTable enumerate_triples(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts)
{
    validate_kernel(grid, kernel);
    check_options(opts);
    const int n = grid.nodes_per_axis();
    const int D = grid.half_width();
    const std::size_t nn = static_cast<std::size_t>(n);
    const double support = kernel.support();
    const double omega0 = grid.omega0();

    // Per-axis dispersion terms and the defect s(a+b) - s(a) - s(b) for axis
    // offsets a, b stored as 0-based positions.
    std::vector<double> s(nn);
    for (int j = 0; j < n; ++j) s[j] = 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * (j - D) / n));
    auto wrap_pos = [&](int pa, int pb) { return grid.wrap(pa + pb - 2 * D) + D; };
    std::vector<double> defect(nn * nn);
    for (int pa = 0; pa < n; ++pa)
        for (int pb = 0; pb < n; ++pb) defect[pa * nn + pb] = s[wrap_pos(pa, pb)] - s[pa] - s[pb];

    // For each first offset, the second offsets sorted by defect.
    struct Entry {
        double d;
        int pos;
    };
    std::vector<std::vector<Entry>> sorted(nn);
    std::vector<double> max_defect(nn);
    for (int pa = 0; pa < n; ++pa) {
        auto& v = sorted[pa];
        for (int pb = 0; pb < n; ++pb) v.push_back({defect[pa * nn + pb], pb});
        std::sort(v.begin(), v.end(), [](const Entry& x, const Entry& y) { return x.d < y.d || (x.d == y.d && x.pos < y.pos); });
        max_defect[pa] = v.back().d;
    }
    double global_max = *std::max_element(max_defect.begin(), max_defect.end());

    // The separable sum and the table difference agree to rounding; the slack
    // only widens the candidate window, the final test uses the table.
    const double slack = 1e-9 * (1.0 + omega0 + 12.0);
    const std::size_t count = grid.node_count();
    std::vector<std::vector<ResonanceTriple>> per_k1(count);

    parallel_for(count, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> found;
        for (std::size_t i = begin; i < end; ++i) {
            const Wavevector a = grid.wavevector(i);
            const int a1 = a.ix + D, a2 = a.iy + D, a3 = a.iz + D;
            auto& out = per_k1[i];
            for (int b1 = a1; b1 < n; ++b1) {  // k2 >= k1 forces the first offset up
                const double d1 = defect[a1 * nn + b1];
                if (d1 + 2.0 * global_max < omega0 - support - slack) continue;
                for (int b2 = 0; b2 < n; ++b2) {
                    const double partial = d1 + defect[a2 * nn + b2];
                    const double lo = omega0 - partial - support - slack;
                    const double hi = omega0 - partial + support + slack;
                    if (lo > max_defect[a3]) continue;
                    const auto& row = sorted[a3];
                    auto it = std::lower_bound(row.begin(), row.end(), lo,
                                               [](const Entry& e, double v) { return e.d < v; });
                    found.clear();
                    for (; it != row.end() && it->d <= hi; ++it) found.push_back(static_cast<std::size_t>(it->pos));
                    std::sort(found.begin(), found.end());
                    for (std::size_t b3 : found) {
                        const std::size_t j = (static_cast<std::size_t>(b1) * nn + b2) * nn + b3;
                        if (j < i) continue;
                        const std::size_t k =
                            (static_cast<std::size_t>(wrap_pos(a1, b1)) * nn + wrap_pos(a2, b2)) * nn +
                            wrap_pos(a3, static_cast<int>(b3));
                        const double dw = grid.omega(k) - (grid.omega(i) + grid.omega(j));
                        if (!(std::fabs(dw) <= support)) continue;
                        const double w = kernel(dw);
                        if (w > 0.0)
                            out.push_back(make_triple(grid, static_cast<std::uint32_t>(k),
                                                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                                      w, opts.c_K));
                    }
                }
            }
        }
    });

    std::size_t total = 0;
    for (const auto& v : per_k1) total += v.size();
    std::vector<ResonanceTriple> all;
    all.reserve(total);
    for (auto& v : per_k1) all.insert(all.end(), v.begin(), v.end());
    return TriadTable::from_triples(count, std::move(all));
}

std::size_t count_wrapped(const Grid& grid, const TriadTable& table)
{
    const int D = grid.half_width();
    std::size_t wrapped = 0;
    for (const auto& tr : table.triples()) {
        const auto a = grid.wavevector(tr.k1), b = grid.wavevector(tr.k2);
        if (std::abs(a.ix + b.ix) > D || std::abs(a.iy + b.iy) > D || std::abs(a.iz + b.iz) > D) ++wrapped;
    }
    return wrapped;
}

// ---------------------------------------------------------------------------

double mu_index(const Grid& grid, const BroadeningKernel& kernel, CollisionKind which,
                std::span<const std::size_t> set, const Wavevector& x)
{
    const std::size_t xi = grid.index(x);
    ExactSum sum;
    for (std::size_t y : set) {
        if (y >= grid.node_count()) throw std::out_of_range("index set contains a node outside the grid");
        sum.add(kernel(residual(grid, which, xi, y)));
    }
    return grid.cell_volume() * sum.value();
}

double mu_index_all(const Grid& grid, const BroadeningKernel& kernel, CollisionKind which, const Wavevector& x)
{
    const std::size_t xi = grid.index(x);
    ExactSum sum;
    for (std::size_t y = 0; y < grid.node_count(); ++y) sum.add(kernel(residual(grid, which, xi, y)));
    return grid.cell_volume() * sum.value();
}

double index_bound(const Vec3& x)
{
    double prod = 1.0;
    for (double c : x) prod *= 2.0 * std::fabs(std::sin(std::numbers::pi * c));  // |1 - e^{2 pi i c}|
    return 1.0 / std::sqrt(prod);
}

namespace {
bool on_edge(const Wavevector& x, int D)
{
    // Components 0 and +-1/2; the latter never occur on an odd lattice but
    // the check keeps the contract explicit.
    auto edge = [D](int i) { return i == 0 || 2 * std::abs(i) == 2 * D + 1; };
    return edge(x.ix) || edge(x.iy) || edge(x.iz);
}
}  // namespace

MuBoundReport mu_bound_check(const Grid& grid, const BroadeningKernel& kernel, const Wavevector& x)
{
    if (on_edge(x, grid.half_width())) throw std::domain_error("index bound is singular on edges (component 0 or 1/2)");
    MuBoundReport r;
    r.mu3_value = mu_index_all(grid, kernel, CollisionKind::central, x);
    r.bound_value = index_bound(grid.coords(x));
    r.ratio = r.mu3_value / r.bound_value;
    return r;
}

double lipschitz_probe(const Grid& grid, const BroadeningKernel& kernel, CollisionKind which, const Wavevector& x,
                       const Wavevector& x_prime)
{
    if (on_edge(x, grid.half_width()) || on_edge(x_prime, grid.half_width()))
        throw std::domain_error("Lipschitz probe requires points off the edges");
    if (x == x_prime) return 0.0;
    const double mx = mu_index_all(grid, kernel, which, x);
    const double my = mu_index_all(grid, kernel, which, x_prime);
    return std::fabs(mx - my) / torus_distance(grid.coords(x), grid.coords(x_prime));
}

}  // namespace wavekin
