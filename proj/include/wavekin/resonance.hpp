#pragma once

#include "wavekin/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavekin {

enum class KernelShape { gaussian, box };

/// Normalized broadening of the frequency delta.
///   gaussian: phi(s) = exp(-pi s^2 / theta^2) / theta
///   box:      phi(s) = 1 / (2 theta) for |s| <= theta
/// Values with |s| > cutoff_multiple * theta are treated as zero.
struct BroadeningKernel {
    double theta = 0.1;
    KernelShape shape = KernelShape::gaussian;
    double cutoff_multiple = 3.0;

    static BroadeningKernel gaussian(double theta, double cutoff_multiple = 3.0)
    {
        return {theta, KernelShape::gaussian, cutoff_multiple};
    }
    static BroadeningKernel box(double theta, double cutoff_multiple = 1.0)
    {
        return {theta, KernelShape::box, cutoff_multiple};
    }

    /// Largest |s| that can carry positive weight.
    double support() const noexcept;
    double operator()(double s) const noexcept;
};

std::string to_string(KernelShape shape);
KernelShape parse_kernel_shape(const std::string& name);

/// theta > 0, finite cutoff, and theta < omega0 - 2.
void validate_kernel(const Grid& grid, const BroadeningKernel& kernel);

/// One broadened triad k = k1 + k2 (exact on the torus), k1 <= k2 by node index.
struct ResonanceTriple {
    std::uint32_t k = 0;
    std::uint32_t k1 = 0;
    std::uint32_t k2 = 0;
    double weight = 0.0;         ///< phi_theta(omega(k) - omega(k1) - omega(k2))
    double kernel_factor = 0.0;  ///< 1 / (c_K omega(k) omega(k1) omega(k2))

    bool diagonal() const noexcept { return k1 == k2; }
    bool operator==(const ResonanceTriple&) const = default;
};

enum class Slot : std::uint8_t { k = 0, k1 = 1, k2 = 2 };

struct SlotRef {
    std::uint32_t triple;
    Slot slot;
};

/// Immutable list of broadened triads plus a per-node incidence index (CSR).
/// Diagonal triples (k1 == k2) list the shared node twice, once per slot.
class TriadTable {
public:
    TriadTable() = default;

    /// Builds the incidence index; keeps the given order unless `sort` is set,
    /// in which case triples are ordered by (k, k1).
    static TriadTable from_triples(std::size_t node_count, std::vector<ResonanceTriple> triples, bool sort = true);

    std::span<const ResonanceTriple> triples() const noexcept { return triples_; }
    std::size_t size() const noexcept { return triples_.size(); }
    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    std::span<const SlotRef> incident(std::size_t node) const noexcept
    {
        return {entries_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
    }
    bool touches(std::size_t node) const noexcept { return offsets_[node + 1] != offsets_[node]; }

    /// Checks the incidence index against the triple list.
    bool consistent() const;

private:
    std::vector<ResonanceTriple> triples_;
    std::vector<std::size_t> offsets_;
    std::vector<SlotRef> entries_;
};

struct TriadOptions {
    double c_K = 1.0;  ///< 1 or 8
};

/// Separable-bucket search: per-axis frequency defects are sorted once, and
/// for each (k1, first two axes of k2) the admissible third axis is found by
/// binary search. Weights come from the cached dispersion table, so the result
/// equals a naive double loop bit for bit.
TriadTable enumerate_triples(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts = {});

/// O(n^6) reference scan over all pairs k1 <= k2. Used as a test oracle.
TriadTable enumerate_triples_naive(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts = {});

/// Number of stored triples whose integer sum k1 + k2 leaves [-D, D]^3.
std::size_t count_wrapped(const Grid& grid, const TriadTable& table);

// ---- index functionals -----------------------------------------------------

/// h^3 sum_{y in set} phi(residual_which(x, y)).
double mu_index(const Grid& grid, const BroadeningKernel& kernel, CollisionKind which,
                std::span<const std::size_t> set, const Wavevector& x);

/// Same over the whole torus.
double mu_index_all(const Grid& grid, const BroadeningKernel& kernel, CollisionKind which, const Wavevector& x);

/// 1 / sqrt(prod_j |1 - exp(2 pi i x^j)|); infinite when a component is 0.
double index_bound(const Vec3& x);

struct MuBoundReport {
    double mu3_value = 0.0;
    double bound_value = 0.0;
    double ratio = 0.0;
};

/// Throws std::domain_error when any component of x is 0 (or +-1/2).
MuBoundReport mu_bound_check(const Grid& grid, const BroadeningKernel& kernel, const Wavevector& x);

/// |mu(x) - mu(x')| / dist(x, x'); 0 when x == x'. Throws std::domain_error
/// when either point lies on an edge.
double lipschitz_probe(const Grid& grid, const BroadeningKernel& kernel, CollisionKind which, const Wavevector& x,
                       const Wavevector& x_prime);

// ---- cache -----------------------------------------------------------------

struct TriadKey {
    int half_width = 0;
    double omega0 = 0.0;
    double theta = 0.0;
    KernelShape shape = KernelShape::gaussian;
    double cutoff_multiple = 0.0;
    double c_K = 1.0;

    bool operator==(const TriadKey&) const = default;
    /// Canonical text of the key (hex floats) and its FNV-1a 64 digest.
    std::string canonical() const;
    std::string digest() const;
};

TriadKey make_key(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts);

/// Flat binary cache: header with the key, then per triple nine int32 lattice
/// indices followed by weight and kernel_factor as raw doubles.
void write_triad_cache(const std::filesystem::path& path, const Grid& grid, const TriadKey& key,
                       const TriadTable& table);
/// Returns nullopt when the file is absent or its key differs.
std::optional<TriadTable> read_triad_cache(const std::filesystem::path& path, const Grid& grid, const TriadKey& key);

/// CSV with columns kx,ky,kz,k1x,k1y,k1z,k2x,k2y,k2z,weight,kernel_factor.
void write_triad_csv(const std::filesystem::path& path, const Grid& grid, const TriadTable& table);
TriadTable read_triad_csv(const std::filesystem::path& path, const Grid& grid);

/// Loads from `cache_dir` when a matching cache exists, otherwise enumerates
/// and stores. An empty cache_dir disables caching.
TriadTable load_or_enumerate(const Grid& grid, const BroadeningKernel& kernel, const TriadOptions& opts,
                             const std::filesystem::path& cache_dir);

}  // namespace wavekin
