#include "wavekin/equilibrium.hpp"

#include "wavekin/io.hpp"
#include "wavekin/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace wavekin {

std::string to_string(EquilibriumKind kind)
{
    return kind == EquilibriumKind::classical ? "classical" : "quantized";
}

EquilibriumKind parse_equilibrium_kind(const std::string& name)
{
    if (name == "classical") return EquilibriumKind::classical;
    if (name == "quantized") return EquilibriumKind::quantized;
    throw std::invalid_argument("unknown equilibrium kind '" + name + "'");
}

double EquilibriumParams::exponent(const Grid& grid, std::size_t node) const
{
    const Vec3 k = grid.coords(node);
    return a * grid.omega(node) + (b[0] * k[0] + b[1] * k[1] + b[2] * k[2]);
}

double EquilibriumParams::value(const Grid& grid, std::size_t node) const
{
    const double e = exponent(grid, node);
    return kind == EquilibriumKind::classical ? 1.0 / e : 1.0 / std::expm1(e);
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Region features phi = (omega, k) and the moment map of one kind.
class MomentProblem {
public:
    MomentProblem(const Grid& grid, const std::vector<std::size_t>& nodes, EquilibriumKind kind)
        : h3_(grid.cell_volume()), kind_(kind), phi_(nodes.size())
    {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Vec3 k = grid.coords(nodes[i]);
            phi_[i] = Vec4(grid.omega(nodes[i]), k[0], k[1], k[2]);
        }
    }

    std::size_t size() const { return phi_.size(); }

    bool positive(const Vec4& x) const
    {
        return std::all_of(phi_.begin(), phi_.end(), [&](const Vec4& p) { return x.dot(p) > 0.0; });
    }

    double F(double e) const { return kind_ == EquilibriumKind::classical ? 1.0 / e : 1.0 / std::expm1(e); }

    double dF(double e) const
    {
        if (kind_ == EquilibriumKind::classical) return -1.0 / (e * e);
        const double m = std::expm1(e);
        return -(m + 1.0) / (m * m);
    }

    /// Antiderivative of F, the concave potential whose gradient is the moment map.
    double potential_term(double e) const
    {
        return kind_ == EquilibriumKind::classical ? std::log(e) : std::log(-std::expm1(-e));
    }

    Vec4 moments(const Vec4& x) const
    {
        Vec4 out;
        for (int c = 0; c < 4; ++c)
            out[c] = h3_ * tree_sum(phi_.size(), [&](std::size_t i) { return phi_[i][c] * F(x.dot(phi_[i])); });
        return out;
    }

    Mat4 jacobian(const Vec4& x) const
    {
        Mat4 J = Mat4::Zero();
        for (const auto& p : phi_) J += dF(x.dot(p)) * (p * p.transpose());
        return h3_ * J;
    }

    double potential(const Vec4& x, const Vec4& target) const
    {
        return h3_ * tree_sum(phi_.size(), [&](std::size_t i) { return potential_term(x.dot(phi_[i])); }) -
               x.dot(target);
    }

    double min_omega() const
    {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& p : phi_) m = std::min(m, p[0]);
        return m;
    }

private:
    double h3_;
    EquilibriumKind kind_;
    std::vector<Vec4> phi_;
};

struct NewtonRun {
    Vec4 x;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    bool stalled_on_positivity = false;
};

NewtonRun newton(const MomentProblem& prob, const Vec4& target, Vec4 x, double tol, int max_iterations)
{
    NewtonRun run;
    run.x = x;
    Vec4 R = prob.moments(x) - target;
    run.residual = R.lpNorm<Eigen::Infinity>();
    double phi = prob.potential(x, target);
    double last_polish = std::numeric_limits<double>::infinity();
    int polish = 0;
    for (int it = 0; it < max_iterations; ++it) {
        const Mat4 J = prob.jacobian(x);
        const Vec4 dx = J.fullPivLu().solve(-R);
        if (run.residual <= tol) {
            // Full Newton steps until the correction stops shrinking.
            const double step = dx.lpNorm<Eigen::Infinity>();
            const Vec4 xn = x + dx;
            if (!dx.allFinite() || step <= 1e-16 * (1.0 + x.lpNorm<Eigen::Infinity>()) || step > 0.5 * last_polish ||
                polish >= 8 || !prob.positive(xn)) {
                run.converged = true;
                return run;
            }
            const Vec4 Rn = prob.moments(xn) - target;
            if (!(Rn.lpNorm<Eigen::Infinity>() <= tol)) {
                run.converged = true;
                return run;
            }
            x = xn;
            R = Rn;
            phi = prob.potential(x, target);
            run.residual = Rn.lpNorm<Eigen::Infinity>();
            run.x = x;
            run.iterations = it + 1;
            last_polish = step;
            ++polish;
            continue;
        }
        if (!dx.allFinite()) break;
        double lambda = 1.0;
        bool accepted = false;
        bool any_positive = false;
        for (int h = 0; h < 60; ++h, lambda *= 0.5) {
            const Vec4 xn = x + lambda * dx;
            if (!prob.positive(xn)) continue;
            any_positive = true;
            const Vec4 Rn = prob.moments(xn) - target;
            const double rn = Rn.lpNorm<Eigen::Infinity>();
            const double phin = prob.potential(xn, target);
            if (phin >= phi || rn < run.residual) {
                x = xn;
                R = Rn;
                phi = phin;
                run.residual = rn;
                accepted = true;
                break;
            }
        }
        run.iterations = it + 1;
        run.x = x;
        if (!accepted) {
            run.stalled_on_positivity = !any_positive;
            break;
        }
    }
    run.converged = run.residual <= tol;
    return run;
}

double initial_a(const MomentProblem& prob, const Vec4& target, double measure, EquilibriumKind kind)
{
    if (kind == EquilibriumKind::classical) return measure / target[0];
    double lo = 1e-12, hi = 1.0;
    auto energy = [&](double a) { return prob.moments(Vec4(a, 0.0, 0.0, 0.0))[0]; };
    while (energy(hi) > target[0] && hi < 1e6) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (energy(mid) > target[0] ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

EquilibriumSolution solve_equilibrium(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                                      const LocalInvariants& inv, EquilibriumKind kind, const SolverOptions& opts)
{
    if (region_id < 1 || region_id > decomp.region_count())
        throw std::out_of_range("unknown region id " + std::to_string(region_id));
    if (!(inv.E > 0.0)) throw std::invalid_argument("equilibrium solve needs E > 0");
    const auto& nodes = decomp.nodes(region_id);
    const MomentProblem prob(grid, nodes, kind);
    const Vec4 target(inv.E, inv.M[0], inv.M[1], inv.M[2]);
    const double tol = 1e-12 * (1.0 + inv.E);
    const double measure = decomp.region_measure[static_cast<std::size_t>(region_id)];

    const double a0 = initial_a(prob, target, measure, kind);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double b_scale = 0.25 * a0 * prob.min_omega();

    std::vector<NewtonRun> runs;
    for (int s = 0; s < std::max(1, opts.starts); ++s) {
        Vec4 x0(a0, 0.0, 0.0, 0.0);
        if (s > 0) {
            x0[0] = a0 * (1.0 + 0.5 * unit(rng));
            for (int j = 1; j < 4; ++j) x0[j] = b_scale * unit(rng);
        }
        runs.push_back(newton(prob, target, x0, tol, opts.max_iterations));
    }

    const NewtonRun& primary = runs.front();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) best = std::min(best, r.residual);
    if (!primary.converged) {
        const bool stuck = std::all_of(runs.begin(), runs.end(), [](const NewtonRun& r) { return !r.converged; }) &&
                           std::any_of(runs.begin(), runs.end(), [](const NewtonRun& r) { return r.stalled_on_positivity; });
        if (stuck)
            throw EquilibriumError(EquilibriumError::Reason::inadmissible,
                                   "no positive equilibrium reaches the invariants of region " +
                                       std::to_string(region_id),
                                   best);
        throw EquilibriumError(EquilibriumError::Reason::no_convergence,
                               "Newton did not converge on region " + std::to_string(region_id) +
                                   " (best residual " + format_double(best) + ")",
                               best);
    }

    const Mat4 J = prob.jacobian(primary.x);
    const Eigen::JacobiSVD<Mat4> svd(J);
    const auto sv = svd.singularValues();
    const double cond = sv[3] > 0.0 ? sv[0] / sv[3] : std::numeric_limits<double>::infinity();
    if (!(cond <= opts.max_condition))
        throw EquilibriumError(EquilibriumError::Reason::inadmissible,
                               "singular equilibrium Jacobian on region " + std::to_string(region_id), best);

    EquilibriumSolution sol;
    sol.params.a = primary.x[0];
    sol.params.b = {primary.x[1], primary.x[2], primary.x[3]};
    sol.params.region_id = region_id;
    sol.params.kind = kind;
    sol.report.jacobian_condition = cond;
    sol.report.residual = primary.residual;
    sol.report.iterations = primary.iterations;

    const double scale = 1.0 + primary.x.lpNorm<Eigen::Infinity>();
    bool unique = true;
    for (const auto& r : runs) {
        if (!r.converged) continue;
        ++sol.report.starts_converged;
        if ((r.x - primary.x).lpNorm<Eigen::Infinity>() > opts.consensus_tol * scale) unique = false;
    }
    sol.report.unique = unique;

    bool continuity = true;
    const auto lu = J.fullPivLu();
    for (int c = 0; c < 4; ++c) {
        Vec4 dI = Vec4::Zero();
        dI[c] = opts.continuity_eps * (1.0 + std::abs(target[c]));
        const NewtonRun moved = newton(prob, target + dI, primary.x, 1e-12 * (1.0 + inv.E + std::abs(dI[0])),
                                       opts.max_iterations);
        const Vec4 predicted = lu.solve(dI);
        const Vec4 actual = moved.x - primary.x;
        if (!moved.converged ||
            (actual - predicted).lpNorm<Eigen::Infinity>() > 1e-2 * predicted.lpNorm<Eigen::Infinity>() + 1e-10 * scale)
            continuity = false;
    }
    sol.report.continuity_ok = continuity;
    return sol;
}

LocalInvariants equilibrium_invariants(const Grid& grid, const RegionDecomposition& decomp,
                                       const EquilibriumParams& eq)
{
    return local_invariants(grid, decomp, eq.region_id, equilibrium_field(grid, decomp, eq));
}

Field equilibrium_field(const Grid& grid, const RegionDecomposition& decomp, const EquilibriumParams& eq)
{
    Field f(grid.node_count(), 0.0);
    for (std::size_t u : decomp.nodes(eq.region_id)) f[u] = eq.value(grid, u);
    return f;
}

double entropy(const Grid& grid, const RegionDecomposition& decomp, int region_id, const Field& f)
{
    if (region_id < 1 || region_id > decomp.region_count())
        throw std::out_of_range("unknown region id " + std::to_string(region_id));
    const auto& nodes = decomp.nodes(region_id);
    for (std::size_t u : nodes)
        if (!(f[u] > 0.0)) throw std::domain_error("entropy needs f > 0 on the region");
    return grid.cell_volume() * tree_sum(nodes.size(), [&](std::size_t i) { return std::log(f[nodes[i]]); });
}

CsiszarKullbackReport csiszar_kullback_check(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                                             const Field& f, const EquilibriumParams& eq, double rel_tol)
{
    if (eq.kind != EquilibriumKind::classical) throw std::invalid_argument("entropy bound applies to the classical kind");
    if (eq.region_id != region_id) throw std::invalid_argument("equilibrium belongs to a different region");
    const Field feq = equilibrium_field(grid, decomp, eq);
    const auto a = local_invariants(grid, decomp, region_id, f);
    const auto b = local_invariants(grid, decomp, region_id, feq);
    const double scale = 1.0 + std::abs(b.E);
    bool match = std::abs(a.E - b.E) <= rel_tol * scale;
    for (int j = 0; j < 3; ++j) match = match && std::abs(a.M[j] - b.M[j]) <= rel_tol * scale;
    if (!match) throw std::invalid_argument("field and equilibrium do not share energy and momentum");

    CsiszarKullbackReport rep;
    rep.lhs = distance_report(grid, decomp, region_id, f, eq, 1.0);
    rep.gap = entropy(grid, decomp, region_id, feq) - entropy(grid, decomp, region_id, f);
    rep.rhs = std::sqrt(std::max(rep.gap, 0.0));
    const double tiny = 1e-12 * scale;
    if (rep.lhs <= tiny && rep.rhs <= std::sqrt(tiny))
        rep.ratio = 0.0;
    else
        rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : std::numeric_limits<double>::infinity();
    return rep;
}

double distance_report(const Grid& grid, const RegionDecomposition& decomp, int region_id, const Field& f,
                       const EquilibriumParams& eq, double p)
{
    if (!(p >= 1.0)) throw std::invalid_argument("distance exponent p must be >= 1");
    const auto& nodes = decomp.nodes(region_id);
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t u : nodes) m = std::max(m, std::abs(f[u] - eq.value(grid, u)));
        return m;
    }
    const double s = grid.cell_volume() * tree_sum(nodes.size(), [&](std::size_t i) {
                         return std::pow(std::abs(f[nodes[i]] - eq.value(grid, nodes[i])), p);
                     });
    return std::pow(s, 1.0 / p);
}

Field match_invariants(const Grid& grid, const RegionDecomposition& decomp, int region_id, const Field& f,
                       const LocalInvariants& target)
{
    const auto& nodes = decomp.nodes(region_id);
    const double h3 = grid.cell_volume();
    Field out = f;
    // Two passes: the second removes the rounding left by the first.
    for (int pass = 0; pass < 2; ++pass) {
        const auto cur = local_invariants(grid, decomp, region_id, out);
        const Vec4 d(target.E - cur.E, target.M[0] - cur.M[0], target.M[1] - cur.M[1], target.M[2] - cur.M[2]);
        Mat4 A = Mat4::Zero();
        for (std::size_t u : nodes) {
            const Vec3 k = grid.coords(u);
            const Vec4 p(grid.omega(u), k[0], k[1], k[2]);
            A += out[u] * (p * p.transpose());
        }
        const Vec4 c = (h3 * A).fullPivLu().solve(d);
        for (std::size_t u : nodes) {
            const Vec3 k = grid.coords(u);
            const double m = 1.0 + c[0] * grid.omega(u) + c[1] * k[0] + c[2] * k[1] + c[3] * k[2];
            if (!(m > 0.0)) throw std::domain_error("invariant correction would make f nonpositive");
            out[u] *= m;
        }
    }
    return out;
}

Field constrained_perturbation(const Grid& grid, const RegionDecomposition& decomp, int region_id,
                               const Field& center, double eps, std::uint64_t seed)
{
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("perturbation size must lie in [0, 1)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Field f = center;
    for (std::size_t u : decomp.nodes(region_id)) f[u] *= 1.0 + eps * unit(rng);
    return match_invariants(grid, decomp, region_id, f, local_invariants(grid, decomp, region_id, center));
}

}  // namespace wavekin
