#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwtrap/rng.hpp"

namespace qwtrap {

// One quenched disorder realization: n distinct perfectly absorbing sites on
// the K-cycle. Sites are indexed 0..K-1 with cyclic identification.
struct TrapConfig {
    int sites_total = 0;             // K
    std::vector<int> trap_sites;     // sorted, distinct, in [0, K)
    double rho_target = 0.0;         // requested density; n = round(rho*K)
    std::uint64_t seed = 0;          // sampling seed, kept for provenance

    int trap_count() const { return static_cast<int>(trap_sites.size()); }

    double rho_actual() const {
        return sites_total > 0 ? static_cast<double>(trap_sites.size()) / sites_total : 0.0;
    }

    bool is_trap(int site) const {
        return std::binary_search(trap_sites.begin(), trap_sites.end(), site);
    }

    // 1 for trap sites, 0 otherwise
    std::vector<std::uint8_t> trap_mask() const {
        std::vector<std::uint8_t> mask(sites_total, 0);
        for (int s : trap_sites) mask[static_cast<std::size_t>(s)] = 1;
        return mask;
    }

    std::vector<int> untrapped_sites() const {
        std::vector<int> out;
        out.reserve(sites_total - trap_count());
        auto it = trap_sites.begin();
        for (int k = 0; k < sites_total; ++k) {
            if (it != trap_sites.end() && *it == k) {
                ++it;
            } else {
                out.push_back(k);
            }
        }
        return out;
    }
};

inline int trap_count_for(int lattice_sites, double rho) {
    return static_cast<int>(std::lround(rho * lattice_sites));
}

// Trap set from an explicit site list (tests, hand-built configurations).
inline TrapConfig make_traps(int lattice_sites, std::vector<int> sites) {
    if (lattice_sites < 1) throw std::invalid_argument("make_traps: lattice_sites must be >= 1");
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    for (int s : sites) {
        if (s < 0 || s >= lattice_sites)
            throw std::invalid_argument("make_traps: trap site " + std::to_string(s) + " outside lattice");
    }
    TrapConfig cfg;
    cfg.sites_total = lattice_sites;
    cfg.trap_sites = std::move(sites);
    cfg.rho_target = cfg.rho_actual();
    return cfg;
}

// n = round(rho*K) distinct sites, uniform without replacement; deterministic
// in (K, rho, seed). Partial Fisher-Yates over the site indices.
inline TrapConfig sample_traps(int lattice_sites, double rho, std::uint64_t seed) {
    if (lattice_sites < 1) throw std::invalid_argument("sample_traps: lattice_sites must be >= 1");
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("sample_traps: rho must be in [0, 1)");
    const int n = trap_count_for(lattice_sites, rho);
    if (n >= lattice_sites)
        throw std::invalid_argument("sample_traps: round(rho*K) = " + std::to_string(n) +
                                    " leaves no untrapped site");

    TrapConfig cfg;
    cfg.sites_total = lattice_sites;
    cfg.rho_target = rho;
    cfg.seed = seed;
    if (n == 0) return cfg;

    std::vector<int> pool(lattice_sites);
    std::iota(pool.begin(), pool.end(), 0);
    SplitMix64 g(seed);
    for (int i = 0; i < n; ++i) {
        const auto j = i + static_cast<int>(g.next_below(static_cast<std::uint64_t>(lattice_sites - i)));
        std::swap(pool[i], pool[j]);
    }
    cfg.trap_sites.assign(pool.begin(), pool.begin() + n);
    std::sort(cfg.trap_sites.begin(), cfg.trap_sites.end());
    return cfg;
}

} // namespace qwtrap
