#pragma once

#include <stdexcept>
#include <vector>

#include "qwtrap/traps.hpp"

namespace qwtrap {

// Classical walker occupation probabilities on the K-cycle, evolved by exact
// enumeration. Entries are non-negative and the total is non-increasing under
// trapped evolution.
struct ProbabilityField {
    int sites = 0;
    std::vector<double> p;

    static ProbabilityField zero(int lattice_sites) {
        if (lattice_sites < 1) throw std::invalid_argument("ProbabilityField: need at least one site");
        ProbabilityField f;
        f.sites = lattice_sites;
        f.p.assign(static_cast<std::size_t>(lattice_sites), 0.0);
        return f;
    }

    static ProbabilityField delta(int lattice_sites, int site, double mass = 1.0) {
        ProbabilityField f = zero(lattice_sites);
        if (site < 0 || site >= lattice_sites)
            throw std::invalid_argument("ProbabilityField: site outside lattice");
        f.p[static_cast<std::size_t>(site)] = mass;
        return f;
    }

    // One walker on every untrapped site; the initial vector of the
    // aggregate propagation.
    static ProbabilityField untrapped_indicator(const TrapConfig& traps) {
        ProbabilityField f = zero(traps.sites_total);
        for (auto& v : f.p) v = 1.0;
        for (int s : traps.trap_sites) f.p[static_cast<std::size_t>(s)] = 0.0;
        return f;
    }

    double total() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
};

// p'(k) = (p(k-1) + p(k+1)) / 2 cyclically, then trap sites forced to zero.
// No allocation; `out` is resized to match.
inline void crw_step_into(const ProbabilityField& in, ProbabilityField& out, const TrapConfig& traps) {
    if (traps.sites_total != in.sites)
        throw std::invalid_argument("crw_step: trap configuration is for a different lattice size");
    const int K = in.sites;
    out.sites = K;
    out.p.resize(static_cast<std::size_t>(K));
    if (K == 1) {
        out.p[0] = in.p[0];
    } else {
        const double* src = in.p.data();
        double* dst = out.p.data();
        dst[0] = 0.5 * (src[K - 1] + src[1]);
        for (int k = 1; k < K - 1; ++k) dst[k] = 0.5 * (src[k - 1] + src[k + 1]);
        dst[K - 1] = 0.5 * (src[K - 2] + src[0]);
    }
    for (int s : traps.trap_sites) out.p[static_cast<std::size_t>(s)] = 0.0;
}

inline ProbabilityField crw_step(const ProbabilityField& in, const TrapConfig& traps) {
    ProbabilityField out;
    crw_step_into(in, out, traps);
    return out;
}

// Survival probability of the N = K - n walker ensemble (one walker per
// untrapped site) after each step, via a single substochastic propagation of
// the untrapped-site indicator. By linearity this equals the per-walker
// enumeration average entrywise; the per-walker path is kept in the tests as
// the oracle. O(K*T) instead of O(K^2*T).
inline std::vector<double> crw_survival_aggregate(const TrapConfig& traps, int steps) {
    if (steps < 0) throw std::invalid_argument("crw_survival_aggregate: steps must be >= 0");
    const int walkers = traps.sites_total - traps.trap_count();
    if (walkers <= 0)
        throw std::invalid_argument("crw_survival_aggregate: every site is trapped");
    ProbabilityField cur = ProbabilityField::untrapped_indicator(traps);
    ProbabilityField nxt = ProbabilityField::zero(traps.sites_total);
    std::vector<double> survival(static_cast<std::size_t>(steps) + 1);
    survival[0] = 1.0;
    for (int t = 1; t <= steps; ++t) {
        crw_step_into(cur, nxt, traps);
        std::swap(cur, nxt);
        survival[static_cast<std::size_t>(t)] = cur.total() / walkers;
    }
    return survival;
}

} // namespace qwtrap
