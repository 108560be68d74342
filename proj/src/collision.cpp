#include "wavekin/collision.hpp"

#include "wavekin/parallel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace wavekin {

double CutoffSpec::rho(double z) const noexcept
{
    if (infinite()) return 1.0;
    const double lo = 0.5 / N, lo_full = 1.0 / N, hi_full = N, hi = 2.0 * N;
    auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
    if (z <= lo) return 0.0;
    if (z < lo_full) return smooth((z - lo) / (lo_full - lo));
    if (z <= hi_full) return 1.0;
    if (z < hi) return smooth((hi - z) / (hi - hi_full));
    return 0.0;
}

Field gradient_magnitude(const Grid& grid, const Field& f)
{
    const std::size_t count = grid.node_count();
    if (f.size() != count) throw std::invalid_argument("field does not match grid size");
    const double inv2h = 0.5 * grid.nodes_per_axis();
    Field out(count);
    for (std::size_t u = 0; u < count; ++u) {
        const Wavevector w = grid.wavevector(u);
        const Wavevector steps[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        double s = 0.0;
        for (const auto& e : steps) {
            const double d =
                (f[grid.index(grid.add(w, e))] - f[grid.index(grid.sub(w, e))]) * inv2h;
            s += d * d;
        }
        out[u] = std::sqrt(s);
    }
    return out;
}

Field cutoff_weights(const Grid& grid, const Field& f, const CutoffSpec& cutoff)
{
    Field chi(grid.node_count(), 1.0);
    if (cutoff.infinite()) return chi;
    const Field grad = gradient_magnitude(grid, f);
    for (std::size_t u = 0; u < chi.size(); ++u) chi[u] = cutoff.rho(f[u]) * cutoff.rho(grad[u]);
    return chi;
}

namespace {

void check_sizes(const Grid& grid, const TriadTable& table, const Field& f)
{
    if (f.size() != grid.node_count()) throw std::invalid_argument("field does not match grid size");
    if (table.node_count() != grid.node_count()) throw std::invalid_argument("triad table was built on a different grid");
}

/// m h^3 weight kernel_factor, optionally times chi* of the triple.
std::vector<double> base_weights(const Grid& grid, const TriadTable& table, const Field* chi)
{
    const auto triples = table.triples();
    std::vector<double> base(triples.size());
    const double h3 = grid.cell_volume();
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const auto& tr = triples[t];
        const double m = tr.diagonal() ? 1.0 : 2.0;
        base[t] = m * h3 * tr.weight * tr.kernel_factor;
        if (chi) base[t] *= (*chi)[tr.k] * (*chi)[tr.k1] * (*chi)[tr.k2];
    }
    return base;
}

/// out(u) = sum over incident slots of (+c at k, -c at k1 and k2).
Field gather(const Grid& grid, const TriadTable& table, const std::vector<double>& coeff)
{
    Field out(grid.node_count(), 0.0);
    parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t u = begin; u < end; ++u) {
            double s = 0.0;
            for (const auto& ref : table.incident(u))
                s += ref.slot == Slot::k ? coeff[ref.triple] : -coeff[ref.triple];
            out[u] = s;
        }
    });
    return out;
}

std::vector<double> triple_coefficients(const TriadTable& table, const std::vector<double>& base, const Field& f)
{
    const auto triples = table.triples();
    std::vector<double> c(triples.size());
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const auto& tr = triples[t];
        const double fk = f[tr.k], f1 = f[tr.k1], f2 = f[tr.k2];
        c[t] = base[t] * (f1 * f2 - fk * f1 - fk * f2);
    }
    return c;
}

Field inverse_field(const Field& g)
{
    Field f(g.size());
    for (std::size_t u = 0; u < g.size(); ++u) f[u] = 1.0 / g[u];
    return f;
}

}  // namespace

Field apply_Q(const Grid& grid, const TriadTable& table, const Field& f)
{
    check_sizes(grid, table, f);
    const auto base = base_weights(grid, table, nullptr);
    return gather(grid, table, triple_coefficients(table, base, f));
}

double apply_weak(const Grid& grid, const TriadTable& table, const Field& f, const Field& phi)
{
    check_sizes(grid, table, f);
    check_sizes(grid, table, phi);
    const auto base = base_weights(grid, table, nullptr);
    const auto c = triple_coefficients(table, base, f);
    const auto triples = table.triples();
    return grid.cell_volume() * tree_sum(triples.size(), [&](std::size_t t) {
               const auto& tr = triples[t];
               return c[t] * (phi[tr.k] - phi[tr.k1] - phi[tr.k2]);
           });
}

Field apply_Q_cutoff(const Grid& grid, const TriadTable& table, const Field& f, const CutoffSpec& cutoff)
{
    check_sizes(grid, table, f);
    if (cutoff.infinite()) return apply_Q(grid, table, f);
    const Field chi = cutoff_weights(grid, f, cutoff);
    const auto base = base_weights(grid, table, &chi);
    return gather(grid, table, triple_coefficients(table, base, f));
}

namespace {
std::vector<double> stripped_base(const Grid& grid, const TriadTable& table, const Field& g, const CutoffSpec& cutoff)
{
    if (cutoff.infinite()) return base_weights(grid, table, nullptr);
    const Field chi = cutoff_weights(grid, inverse_field(g), cutoff);
    return base_weights(grid, table, &chi);
}
}  // namespace

Field apply_Q_stripped(const Grid& grid, const TriadTable& table, const Field& g, const CutoffSpec& cutoff)
{
    check_sizes(grid, table, g);
    const auto base = stripped_base(grid, table, g, cutoff);
    const auto triples = table.triples();
    std::vector<double> c(triples.size());
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const auto& tr = triples[t];
        c[t] = base[t] * (g[tr.k] - g[tr.k1] - g[tr.k2]);
    }
    return gather(grid, table, c);
}

GainLossSplit split_Q_g(const Grid& grid, const TriadTable& table, const Field& g, const CutoffSpec& cutoff)
{
    check_sizes(grid, table, g);
    const auto base = stripped_base(grid, table, g, cutoff);
    const auto triples = table.triples();
    GainLossSplit out{Field(g.size(), 0.0), Field(g.size(), 0.0), Field(g.size(), 0.0)};
    for (std::size_t u = 0; u < g.size(); ++u) {
        double rate = 0.0, loss = 0.0;
        for (const auto& ref : table.incident(u)) {
            const auto& tr = triples[ref.triple];
            const double b = base[ref.triple];
            rate += b;
            switch (ref.slot) {
            case Slot::k: loss += b * (g[tr.k1] + g[tr.k2]); break;
            case Slot::k1: loss += b * (g[tr.k] - g[tr.k2]); break;
            case Slot::k2: loss += b * (g[tr.k] - g[tr.k1]); break;
            }
        }
        out.rate[u] = rate;
        out.gain[u] = g[u] * rate;
        out.loss[u] = loss;
    }
    return out;
}

namespace {
double dissipation_term(const ResonanceTriple& tr, double base, const Field& f)
{
    const double fk = f[tr.k], f1 = f[tr.k1], f2 = f[tr.k2];
    const double defect = 1.0 / f1 + 1.0 / f2 - 1.0 / fk;
    return base * fk * f1 * f2 * defect * defect;
}

void require_positive(const TriadTable& table, const Field& f)
{
    for (std::size_t u = 0; u < f.size(); ++u)
        if (table.touches(u) && !(f[u] > 0.0))
            throw std::domain_error("entropy dissipation needs f > 0 on every node in a triple (node " +
                                    std::to_string(u) + ")");
}
}  // namespace

double entropy_dissipation(const Grid& grid, const TriadTable& table, const Field& f)
{
    check_sizes(grid, table, f);
    require_positive(table, f);
    const auto base = base_weights(grid, table, nullptr);
    const auto triples = table.triples();
    return grid.cell_volume() *
           tree_sum(triples.size(), [&](std::size_t t) { return dissipation_term(triples[t], base[t], f); });
}

std::vector<double> entropy_dissipation_by_region(const Grid& grid, const TriadTable& table,
                                                  const RegionDecomposition& decomp, const Field& f)
{
    check_sizes(grid, table, f);
    require_positive(table, f);
    const auto base = base_weights(grid, table, nullptr);
    const auto triples = table.triples();
    std::vector<std::vector<std::size_t>> by_region(static_cast<std::size_t>(decomp.region_count()) + 1);
    for (std::size_t t = 0; t < triples.size(); ++t) by_region[static_cast<std::size_t>(decomp.label[triples[t].k])].push_back(t);
    std::vector<double> out(by_region.size(), 0.0);
    for (std::size_t r = 1; r < by_region.size(); ++r) {
        const auto& ids = by_region[r];
        out[r] = grid.cell_volume() *
                 tree_sum(ids.size(), [&](std::size_t i) { return dissipation_term(triples[ids[i]], base[ids[i]], f); });
    }
    return out;
}

std::vector<double> energy_leak_by_region(const Grid& grid, const RegionDecomposition& decomp, const Field& q)
{
    std::vector<double> out(static_cast<std::size_t>(decomp.region_count()) + 1, 0.0);
    for (int r = 1; r <= decomp.region_count(); ++r) {
        const auto& nodes = decomp.nodes(r);
        out[static_cast<std::size_t>(r)] =
            grid.cell_volume() * tree_sum(nodes.size(), [&](std::size_t i) { return q[nodes[i]] * grid.omega(nodes[i]); });
    }
    return out;
}

void project_energy(const Grid& grid, const RegionDecomposition& decomp, Field& q)
{
    for (int r = 1; r <= decomp.region_count(); ++r) {
        const auto& nodes = decomp.nodes(r);
        Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (std::size_t u : nodes) {
            const auto c = grid.coords(u);
            const Eigen::Vector3d k(c[0], c[1], c[2]);
            gram += k * k.transpose();
            rhs += k * grid.omega(u);
        }
        const Eigen::Vector3d coef = gram.completeOrthogonalDecomposition().solve(rhs);
        std::vector<double> dir(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto c = grid.coords(nodes[i]);
            dir[i] = grid.omega(nodes[i]) - (coef[0] * c[0] + coef[1] * c[1] + coef[2] * c[2]);
        }
        const double leak = tree_sum(nodes.size(), [&](std::size_t i) { return q[nodes[i]] * grid.omega(nodes[i]); });
        const double norm = tree_sum(nodes.size(), [&](std::size_t i) { return dir[i] * grid.omega(nodes[i]); });
        if (!(norm > 0.0)) continue;
        const double lambda = leak / norm;
        for (std::size_t i = 0; i < nodes.size(); ++i) q[nodes[i]] -= lambda * dir[i];
    }
}

}  // namespace wavekin
