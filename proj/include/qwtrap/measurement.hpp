#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwtrap/fit.hpp"
#include "qwtrap/walk.hpp"

namespace qwtrap {

struct WindowOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-step measurement probability: fixed p, or p(t) = 1/t^gamma with
// 0 <= gamma <= 1 (so p(1) = 1).
struct MeasurementSchedule {
    enum class Kind { Constant, PowerLaw };
    Kind kind = Kind::Constant;
    double value = 0.0; // p for Constant, gamma for PowerLaw

    static MeasurementSchedule constant(double p) {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("MeasurementSchedule: p must be in [0, 1]");
        return {Kind::Constant, p};
    }

    static MeasurementSchedule power_law(double gamma) {
        if (gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("MeasurementSchedule: gamma must be in [0, 1]");
        return {Kind::PowerLaw, gamma};
    }

    double probability_at(int t) const {
        if (t < 1) throw std::invalid_argument("MeasurementSchedule: t starts at 1");
        return kind == Kind::Constant ? value : std::pow(static_cast<double>(t), -value);
    }
};

// Which form the measured branch of the channel takes. PositionDiagonal keeps
// only position-diagonal entries (a projective position measurement with coin
// reset); AsPrinted resets the coin but keeps all position coherences. The
// second variant exists for comparison and is not the default.
enum class MeasuredBranch { PositionDiagonal, AsPrinted };

// Density operator of a single walker on the position window [-W, W] of the
// line, indexed (chirality, position) with idx(z, c) = 2*(z+W) + c. Hermitian,
// unit trace, positive semidefinite up to rounding.
class DensityOperator {
public:
    DensityOperator(int half_width, int start_position, Chirality chi) : width_(half_width) {
        if (half_width < 1) throw std::invalid_argument("DensityOperator: window half-width must be >= 1");
        if (std::abs(start_position) > half_width)
            throw std::invalid_argument("DensityOperator: start position outside window");
        rho_ = Eigen::MatrixXcd::Zero(dim(), dim());
        const auto a = chirality_amplitudes(chi);
        const int base = index(start_position, 0);
        rho_(base, base) = a[0] * std::conj(a[0]);
        rho_(base, base + 1) = a[0] * std::conj(a[1]);
        rho_(base + 1, base) = a[1] * std::conj(a[0]);
        rho_(base + 1, base + 1) = a[1] * std::conj(a[1]);
    }

    int half_width() const { return width_; }
    int positions() const { return 2 * width_ + 1; }
    int dim() const { return 2 * positions(); }
    int index(int z, int c) const { return 2 * (z + width_) + c; }

    const Eigen::MatrixXcd& matrix() const { return rho_; }
    Eigen::MatrixXcd& matrix() { return rho_; }

    double trace_real() const { return rho_.trace().real(); }

    double hermiticity_defect() const {
        return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    }

    // P(z) summed over chirality, z = -W..W
    std::vector<double> position_marginal() const {
        std::vector<double> q(static_cast<std::size_t>(positions()));
        for (int z = -width_; z <= width_; ++z) {
            const int i = index(z, 0);
            q[static_cast<std::size_t>(z + width_)] = rho_(i, i).real() + rho_(i + 1, i + 1).real();
        }
        return q;
    }

    double position_mean() const {
        double m = 0.0;
        const auto q = position_marginal();
        for (int z = -width_; z <= width_; ++z) m += z * q[static_cast<std::size_t>(z + width_)];
        return m;
    }

    double position_stddev() const {
        const auto q = position_marginal();
        double m = 0.0, m2 = 0.0;
        for (int z = -width_; z <= width_; ++z) {
            const double qz = q[static_cast<std::size_t>(z + width_)];
            m += z * qz;
            m2 += static_cast<double>(z) * z * qz;
        }
        return std::sqrt(std::max(m2 - m * m, 0.0));
    }

    // marginal mass within one site of the window edge, |z| >= W-1
    double edge_mass() const {
        double s = 0.0;
        auto add = [&](int z) {
            const int i = index(z, 0);
            s += rho_(i, i).real() + rho_(i + 1, i + 1).real();
        };
        add(-width_);
        add(width_);
        if (width_ >= 2) {
            add(-width_ + 1);
            add(width_ - 1);
        } else {
            add(0);
        }
        return s;
    }

    // rho <- U rho U^dagger with U = shift * (coin x I), applied structurally:
    // the coin is a blocked 2x2 multiply, the shift an index offset.
    void apply_walk_unitary(const Coin& coin) {
        coin.require_unitary();
        const int n = dim();
        if (scratch_.rows() != n) scratch_.resize(n, n);
        const cplx m00 = coin.m[0], m01 = coin.m[1], m10 = coin.m[2], m11 = coin.m[3];

        // rows: scratch = U * rho
        for (int j = 0; j < n; ++j) {
            const cplx* s = rho_.col(j).data();
            cplx* d = scratch_.col(j).data();
            d[index(-width_, 0)] = cplx(0.0, 0.0);
            d[index(width_, 1)] = cplx(0.0, 0.0);
            for (int z = -width_; z <= width_; ++z) {
                const cplx up = s[index(z, 0)], dn = s[index(z, 1)];
                if (z < width_) d[index(z + 1, 0)] = m00 * up + m01 * dn;
                if (z > -width_) d[index(z - 1, 1)] = m10 * up + m11 * dn;
            }
        }

        // columns: rho = scratch * U^dagger
        const cplx c00 = std::conj(m00), c01 = std::conj(m01);
        const cplx c10 = std::conj(m10), c11 = std::conj(m11);
        rho_.col(index(-width_, 0)).setZero();
        rho_.col(index(width_, 1)).setZero();
        for (int z = -width_; z <= width_; ++z) {
            const auto up_col = scratch_.col(index(z, 0));
            const auto dn_col = scratch_.col(index(z, 1));
            if (z < width_) rho_.col(index(z + 1, 0)) = c00 * up_col + c01 * dn_col;
            if (z > -width_) rho_.col(index(z - 1, 1)) = c10 * up_col + c11 * dn_col;
        }
    }

private:
    int width_;
    Eigen::MatrixXcd rho_;
    Eigen::MatrixXcd scratch_;
};

// One channel step: unitary walk step with probability 1-p, position
// measurement with coin reset to |chi> with probability p. Trace preserving.
// Throws WindowOverflowError when probability mass has reached within one
// site of the window edge (enlarge W).
inline void measurement_step(DensityOperator& phi, double p, Chirality reset_chi, const Coin& coin,
                             MeasuredBranch branch = MeasuredBranch::PositionDiagonal) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("measurement_step: p must be in [0, 1]");
    if (phi.edge_mass() > 1e-12)
        throw WindowOverflowError("measurement_step: probability mass within one site of the window edge; enlarge the window");

    phi.apply_walk_unitary(coin);
    if (p == 0.0) return;

    const auto a = chirality_amplitudes(reset_chi);
    const cplx x00 = a[0] * std::conj(a[0]), x01 = a[0] * std::conj(a[1]);
    const cplx x10 = a[1] * std::conj(a[0]), x11 = a[1] * std::conj(a[1]);
    auto& rho = phi.matrix();
    const int w = phi.half_width();

    if (branch == MeasuredBranch::PositionDiagonal) {
        const auto q = phi.position_marginal();
        rho *= (1.0 - p);
        for (int z = -w; z <= w; ++z) {
            const double pq = p * q[static_cast<std::size_t>(z + w)];
            const int i = phi.index(z, 0);
            rho(i, i) += pq * x00;
            rho(i, i + 1) += pq * x01;
            rho(i + 1, i) += pq * x10;
            rho(i + 1, i + 1) += pq * x11;
        }
    } else {
        // coin reset only; the double position sum reconstructs all position
        // coherences
        const int np = phi.positions();
        Eigen::MatrixXcd coin_traced(np, np);
        for (int zc = 0; zc < np; ++zc)
            for (int zr = 0; zr < np; ++zr)
                coin_traced(zr, zc) =
                    rho(2 * zr, 2 * zc) + rho(2 * zr + 1, 2 * zc + 1);
        rho *= (1.0 - p);
        for (int zc = 0; zc < np; ++zc) {
            for (int zr = 0; zr < np; ++zr) {
                const cplx v = p * coin_traced(zr, zc);
                rho(2 * zr, 2 * zc) += v * x00;
                rho(2 * zr, 2 * zc + 1) += v * x01;
                rho(2 * zr + 1, 2 * zc) += v * x10;
                rho(2 * zr + 1, 2 * zc + 1) += v * x11;
            }
        }
    }
}

// Power-law growth exponent of the position spread: least-squares slope of
// log sigma(t) against log t over t in [T/4, T], where sigma is the standard
// deviation of the position marginal. The window is sized W = T + 2 so the
// light cone never reaches the edge.
inline double spread_exponent(const MeasurementSchedule& schedule, int steps, Chirality chi,
                              const Coin& coin = Coin::hadamard(),
                              MeasuredBranch branch = MeasuredBranch::PositionDiagonal) {
    if (steps < 50) throw std::invalid_argument("spread_exponent: need steps >= 50");
    DensityOperator phi(steps + 2, 0, chi);
    std::vector<double> sigma(static_cast<std::size_t>(steps) + 1, 0.0);
    for (int t = 1; t <= steps; ++t) {
        measurement_step(phi, schedule.probability_at(t), chi, coin, branch);
        sigma[static_cast<std::size_t>(t)] = phi.position_stddev();
    }
    std::vector<double> xs, ys;
    for (int t = std::max(1, steps / 4); t <= steps; ++t) {
        const double s = sigma[static_cast<std::size_t>(t)];
        if (s > 0.0) {
            xs.push_back(std::log(static_cast<double>(t)));
            ys.push_back(std::log(s));
        }
    }
    if (xs.size() < 2) throw FitError("spread_exponent: zero-variance position distribution");
    return least_squares_line(xs, ys).slope;
}

} // namespace qwtrap
