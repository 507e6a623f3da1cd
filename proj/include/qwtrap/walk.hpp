#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwtrap/traps.hpp"

namespace qwtrap {

using cplx = std::complex<double>;

// Internal coin state of a walker. Mixed is a placeholder that must be
// resolved to Up or Down (one draw per walker) before a state is built.
enum class Chirality { Up, Down, Mixed, Symmetric };

inline std::array<cplx, 2> chirality_amplitudes(Chirality chi) {
    constexpr double inv_sqrt2 = 0.7071067811865475244008443621048490;
    switch (chi) {
    case Chirality::Up: return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
    case Chirality::Down: return {cplx(0.0, 0.0), cplx(1.0, 0.0)};
    case Chirality::Symmetric: return {cplx(inv_sqrt2, 0.0), cplx(0.0, inv_sqrt2)};
    case Chirality::Mixed: break;
    }
    throw std::invalid_argument("chirality: Mixed must be resolved to Up or Down before building a state");
}

// 2x2 coin acting on the (up, down) amplitude pair at every site.
struct Coin {
    std::array<cplx, 4> m{}; // row-major [ m00 m01 ; m10 m11 ]

    static Coin hadamard() {
        constexpr double inv_sqrt2 = 0.7071067811865475244008443621048490;
        return Coin{{cplx(inv_sqrt2), cplx(inv_sqrt2), cplx(inv_sqrt2), cplx(-inv_sqrt2)}};
    }

    // max entrywise deviation of C C^dagger from the identity
    double unitarity_defect() const {
        const cplx a = m[0], b = m[1], c = m[2], d = m[3];
        const cplx g00 = a * std::conj(a) + b * std::conj(b) - 1.0;
        const cplx g01 = a * std::conj(c) + b * std::conj(d);
        const cplx g10 = c * std::conj(a) + d * std::conj(b);
        const cplx g11 = c * std::conj(c) + d * std::conj(d) - 1.0;
        return std::max(std::max(std::abs(g00), std::abs(g01)),
                        std::max(std::abs(g10), std::abs(g11)));
    }

    void require_unitary(double tol = 1e-12) const {
        if (unitarity_defect() > tol)
            throw std::invalid_argument("coin matrix is not unitary (defect " +
                                        std::to_string(unitarity_defect()) + ")");
    }
};

struct InitialCondition {
    int start_site = 0;
    Chirality chirality = Chirality::Up;
};

// Chirality-resolved amplitudes of one walker on the K-cycle. Stored
// site-major as interleaved (up, down) pairs: amp[2k] = up(k),
// amp[2k+1] = down(k). The coin step is then a streaming 2x2 multiply.
struct ChiralField {
    int sites = 0; // K
    std::vector<cplx> amp;

    static ChiralField zero(int lattice_sites) {
        if (lattice_sites < 1) throw std::invalid_argument("ChiralField: need at least one site");
        ChiralField f;
        f.sites = lattice_sites;
        f.amp.assign(2 * static_cast<std::size_t>(lattice_sites), cplx(0.0, 0.0));
        return f;
    }

    // Unit-norm single-site start state.
    static ChiralField delta(int lattice_sites, int site, Chirality chi) {
        ChiralField f = zero(lattice_sites);
        if (site < 0 || site >= lattice_sites)
            throw std::invalid_argument("ChiralField: start site outside lattice");
        const auto pair = chirality_amplitudes(chi);
        f.amp[2 * static_cast<std::size_t>(site)] = pair[0];
        f.amp[2 * static_cast<std::size_t>(site) + 1] = pair[1];
        return f;
    }

    double norm() const {
        double s = 0.0;
        for (const cplx& a : amp) s += std::norm(a);
        return s;
    }

    double site_probability(int k) const {
        return std::norm(amp[2 * static_cast<std::size_t>(k)]) +
               std::norm(amp[2 * static_cast<std::size_t>(k) + 1]);
    }

    std::vector<double> position_probabilities() const {
        std::vector<double> p(sites);
        for (int k = 0; k < sites; ++k) p[static_cast<std::size_t>(k)] = site_probability(k);
        return p;
    }
};

// (up, down) <- C (up, down) at every site; norm preserved.
inline void coin_step(ChiralField& f, const Coin& coin) {
    coin.require_unitary();
    const cplx m00 = coin.m[0], m01 = coin.m[1], m10 = coin.m[2], m11 = coin.m[3];
    cplx* a = f.amp.data();
    for (int k = 0; k < f.sites; ++k, a += 2) {
        const cplx up = a[0], dn = a[1];
        a[0] = m00 * up + m01 * dn;
        a[1] = m10 * up + m11 * dn;
    }
}

// up amplitudes move k -> k+1, down amplitudes k -> k-1, cyclically
// (K+1 == 1 and 0 == K in 1-based terms). In-place lane rotations.
inline void shift_step(ChiralField& f) {
    const int K = f.sites;
    if (K <= 1) return;
    cplx* a = f.amp.data();
    cplx keep = a[2 * (K - 1)];
    for (int k = K - 1; k > 0; --k) a[2 * k] = a[2 * (k - 1)];
    a[0] = keep;
    keep = a[1];
    for (int k = 0; k < K - 1; ++k) a[2 * k + 1] = a[2 * k + 3];
    a[2 * (K - 1) + 1] = keep;
}

// Annihilate amplitudes on trap sites. Returns the probability mass removed
// by this call; the field norm decreases by exactly that amount.
inline double absorb(ChiralField& f, const TrapConfig& traps) {
    if (traps.sites_total != f.sites)
        throw std::invalid_argument("absorb: trap configuration is for a different lattice size");
    double removed = 0.0;
    for (int s : traps.trap_sites) {
        cplx* a = f.amp.data() + 2 * static_cast<std::size_t>(s);
        removed += std::norm(a[0]) + std::norm(a[1]);
        a[0] = cplx(0.0, 0.0);
        a[1] = cplx(0.0, 0.0);
    }
    return removed;
}

// Survival probability of a single walker after each of `steps` full steps.
// One step = coin, then shift, then trap absorption; survival is recorded
// after absorption. Entry 0 is 1 and the sequence is non-increasing.
inline std::vector<double> evolve_survival(const InitialCondition& init, const TrapConfig& traps,
                                           const Coin& coin, int steps) {
    if (steps < 0) throw std::invalid_argument("evolve_survival: steps must be >= 0");
    coin.require_unitary();
    if (traps.is_trap(init.start_site))
        throw std::invalid_argument("evolve_survival: start site " + std::to_string(init.start_site) +
                                    " is a trap site");
    ChiralField f = ChiralField::delta(traps.sites_total, init.start_site, init.chirality);
    std::vector<double> survival(static_cast<std::size_t>(steps) + 1);
    survival[0] = 1.0;
    for (int t = 1; t <= steps; ++t) {
        coin_step(f, coin);
        shift_step(f);
        absorb(f, traps);
        survival[static_cast<std::size_t>(t)] = f.norm();
    }
    return survival;
}

} // namespace qwtrap
