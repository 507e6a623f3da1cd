#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwtrap/ensemble.hpp"

namespace qwtrap {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0; // residual sum of squares (weighted, if weights given)
    int points = 0;
    double slope_stderr = 0.0;
};

// Ordinary (optionally weighted) least squares of y against x. With weights,
// sse is the chi-square and the slope error is the inverse-variance estimate
// scaled by sqrt(chi2/dof).
inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> w = {}) {
    const std::size_t n = x.size();
    if (y.size() != n || (!w.empty() && w.size() != n))
        throw std::invalid_argument("least_squares_line: length mismatch");
    if (n < 2) throw FitError("least_squares_line: need at least 2 points");
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        swx += wi * x[i];
        swy += wi * y[i];
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sxx += wi * (x[i] - xbar) * (x[i] - xbar);
        sxy += wi * (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx <= 0.0) throw FitError("least_squares_line: degenerate abscissa");
    LineFit f;
    f.points = static_cast<int>(n);
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sse += wi * r * r;
    }
    f.sse = std::max(sse, 0.0);
    f.slope_stderr = n > 2 ? std::sqrt((f.sse / (static_cast<double>(n) - 2.0)) / sxx) : 0.0;
    return f;
}

// Options shared by the stretched-exponential fits.
struct FitOptions {
    int t_min = 4;                  // first steps are transient; excluded from all fits
    double crossover_margin = 0.05; // two-segment sse must beat one-segment sse by this fraction
    bool weighted = false;          // weight fit-space points by propagated 1/stderr^2
    double floor = 10.0 * DBL_EPSILON; // log reliability floor for mean values
};

struct StretchFit {
    double beta = 0.0;
    double intercept = 0.0; // in fit space; prefactor a = exp(intercept)
    double sse = 0.0;
    int points = 0;
    double beta_stderr = 0.0;

    double prefactor() const { return std::exp(intercept); }
};

struct PiecewiseFit {
    double beta1 = 0.0;
    double beta2 = 0.0;
    int t_c = 0;
    double a1 = 0.0;
    double a2 = 0.0;
    double sse = 0.0;        // total over both segments
    double sse_single = 0.0; // one-segment reference over the full window
    int window_lo = 0;
    int window_hi = 0;
    bool crossover = false; // false: degenerate fit, beta1 == beta2
    double beta1_stderr = 0.0;
    double beta2_stderr = 0.0;
};

namespace detail {

// Usable fit-space samples from a survival series: x = ln t, y = ln(-ln mean)
// over t in [t_lo, t_hi]. Points with mean >= 1 or mean <= floor are dropped,
// not errors.
struct FitSpacePoints {
    std::vector<int> t;
    std::vector<double> x, y, w;
};

inline FitSpacePoints fit_space_points(std::span<const double> mean, int t_lo, int t_hi,
                                       const FitOptions& opts, std::span<const double> std_error) {
    const int last = static_cast<int>(mean.size()) - 1;
    t_lo = std::max({t_lo, opts.t_min, 1});
    t_hi = std::min(t_hi, last);
    FitSpacePoints pts;
    for (int t = t_lo; t <= t_hi; ++t) {
        const double m = mean[static_cast<std::size_t>(t)];
        if (!(m > opts.floor) || !(m < 1.0)) continue;
        const double neg_log = -std::log(m);
        pts.t.push_back(t);
        pts.x.push_back(std::log(static_cast<double>(t)));
        pts.y.push_back(std::log(neg_log));
        if (opts.weighted) {
            if (std_error.empty())
                throw FitError("weighted fit requested but the series carries no stderr");
            const double se = std_error[static_cast<std::size_t>(t)];
            if (!(se > 0.0))
                throw FitError("weighted fit requires positive stderr at every usable point (t=" +
                               std::to_string(t) + ")");
            const double se_y = se / (m * neg_log); // error propagated through ln(-ln m)
            pts.w.push_back(1.0 / (se_y * se_y));
        }
    }
    return pts;
}

// Prefix sums over fit-space points; any contiguous segment fit in O(1).
struct SegmentSums {
    std::vector<double> sw, swx, swy, swxx, swxy, swyy;

    explicit SegmentSums(const FitSpacePoints& pts) {
        const std::size_t n = pts.x.size();
        sw.assign(n + 1, 0.0);
        swx.assign(n + 1, 0.0);
        swy.assign(n + 1, 0.0);
        swxx.assign(n + 1, 0.0);
        swxy.assign(n + 1, 0.0);
        swyy.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = pts.w.empty() ? 1.0 : pts.w[i];
            const double x = pts.x[i], y = pts.y[i];
            sw[i + 1] = sw[i] + wi;
            swx[i + 1] = swx[i] + wi * x;
            swy[i + 1] = swy[i] + wi * y;
            swxx[i + 1] = swxx[i] + wi * x * x;
            swxy[i + 1] = swxy[i] + wi * x * y;
            swyy[i + 1] = swyy[i] + wi * y * y;
        }
    }

    // inclusive index range [i, j]
    LineFit fit(std::size_t i, std::size_t j) const {
        const double n = sw[j + 1] - sw[i];
        const double sx = swx[j + 1] - swx[i];
        const double sy = swy[j + 1] - swy[i];
        const double sxx = swxx[j + 1] - swxx[i];
        const double sxy = swxy[j + 1] - swxy[i];
        const double syy = swyy[j + 1] - swyy[i];
        const double sxx_c = sxx - sx * sx / n;
        const double sxy_c = sxy - sx * sy / n;
        const double syy_c = syy - sy * sy / n;
        LineFit f;
        f.points = static_cast<int>(j - i + 1);
        f.slope = sxy_c / sxx_c;
        f.intercept = (sy - f.slope * sx) / n;
        f.sse = std::max(syy_c - sxy_c * sxy_c / sxx_c, 0.0);
        f.slope_stderr =
            f.points > 2 ? std::sqrt((f.sse / (f.points - 2.0)) / sxx_c) : 0.0;
        return f;
    }
};

constexpr int kMinFitPoints = 5;

} // namespace detail

// OLS of ln(-ln mean(t)) against ln t over the usable points of
// [t_lo, t_hi]; beta is the slope. A series exactly of the form
// exp(-a t^beta) is linear in this space, so beta is recovered exactly.
inline StretchFit fit_stretch_exponent(std::span<const double> mean, int t_lo, int t_hi,
                                       const FitOptions& opts = {},
                                       std::span<const double> std_error = {}) {
    const auto pts = detail::fit_space_points(mean, t_lo, t_hi, opts, std_error);
    if (static_cast<int>(pts.x.size()) < detail::kMinFitPoints)
        throw FitError("fit window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                       "] has " + std::to_string(pts.x.size()) + " usable points; need >= 5");
    const LineFit lf = least_squares_line(pts.x, pts.y, pts.w);
    StretchFit sf;
    sf.beta = lf.slope;
    sf.intercept = lf.intercept;
    sf.sse = lf.sse;
    sf.points = lf.points;
    sf.beta_stderr = lf.slope_stderr;
    return sf;
}

inline StretchFit fit_stretch_exponent(const SurvivalSeries& series, int t_lo, int t_hi,
                                       const FitOptions& opts = {}) {
    return fit_stretch_exponent(series.mean, t_lo, t_hi, opts, series.std_error);
}

// Exhaustive breakpoint scan: every usable sample time with at least 5 usable
// points on each side is a candidate; both segments share the breakpoint
// (fits run over [t_min, t_c] and [t_c, T]). The two-segment model must beat
// the one-segment sse by crossover_margin, otherwise the fit degenerates to a
// single exponent with the no-crossover flag.
inline PiecewiseFit detect_crossover(std::span<const double> mean, const FitOptions& opts = {},
                                     std::span<const double> std_error = {}) {
    const int last = static_cast<int>(mean.size()) - 1;
    const auto pts = detail::fit_space_points(mean, 0, last, opts, std_error);
    const std::size_t n = pts.x.size();
    if (n < 20)
        throw FitError("detect_crossover: " + std::to_string(n) +
                       " usable points past t_min; need >= 20");
    const detail::SegmentSums sums(pts);
    const LineFit single = sums.fit(0, n - 1);

    const std::size_t min_pts = detail::kMinFitPoints;
    bool found = false;
    std::size_t best_i = 0;
    double best_sse = 0.0;
    LineFit best_lo, best_hi;
    for (std::size_t i = min_pts - 1; i + min_pts <= n; ++i) {
        const LineFit lo = sums.fit(0, i);
        const LineFit hi = sums.fit(i, n - 1);
        const double total = lo.sse + hi.sse;
        if (!found || total < best_sse) {
            found = true;
            best_sse = total;
            best_i = i;
            best_lo = lo;
            best_hi = hi;
        }
    }

    PiecewiseFit out;
    out.window_lo = pts.t.front();
    out.window_hi = pts.t.back();
    out.sse_single = single.sse;
    // the absolute floor keeps rounding noise on an exactly-linear curve from
    // passing the relative margin
    if (found && single.sse > 1e-12 && best_sse <= (1.0 - opts.crossover_margin) * single.sse) {
        out.crossover = true;
        out.t_c = pts.t[best_i];
        out.beta1 = best_lo.slope;
        out.beta2 = best_hi.slope;
        out.a1 = std::exp(best_lo.intercept);
        out.a2 = std::exp(best_hi.intercept);
        out.sse = best_sse;
        out.beta1_stderr = best_lo.slope_stderr;
        out.beta2_stderr = best_hi.slope_stderr;
    } else {
        out.crossover = false;
        out.t_c = out.window_hi;
        out.beta1 = out.beta2 = single.slope;
        out.a1 = out.a2 = std::exp(single.intercept);
        out.sse = single.sse;
        out.beta1_stderr = out.beta2_stderr = single.slope_stderr;
    }
    return out;
}

inline PiecewiseFit detect_crossover(const SurvivalSeries& series, const FitOptions& opts = {}) {
    return detect_crossover(series.mean, opts, series.std_error);
}

// Closed-form exponent predictions and the crossover-time estimates
// 25/rho (up, symmetric) and 8/rho (mixed).
struct AnalyticPrediction {
    double rho = 0.0;
    double beta1_pred = 0.0;       // 1 - rho/2
    double beta2_pred = 0.0;       // rho/2
    double tc_up_symmetric = 0.0;  // 25/rho
    double tc_mixed = 0.0;         // 8/rho
    double lambda = 0.0;           // -ln(1-rho), single-site escape rate
    double tc = 0.0;               // the estimate matching the requested init
};

inline AnalyticPrediction predict(double rho, InitKind init = InitKind::Up) {
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("predict: rho must be in (0, 1)");
    AnalyticPrediction p;
    p.rho = rho;
    p.beta1_pred = 1.0 - rho / 2.0;
    p.beta2_pred = rho / 2.0;
    p.tc_up_symmetric = 25.0 / rho;
    p.tc_mixed = 8.0 / rho;
    p.lambda = -std::log1p(-rho);
    p.tc = init == InitKind::Mixed ? p.tc_mixed : p.tc_up_symmetric;
    return p;
}

// Literature reference exponents for comparison plots: classical Rosenstock
// (1/2), classical Donsker-Varadhan (1/3), continuous-time quantum (1/4).
struct ClassicalReferences {
    double beta_rs = 0.5;
    double beta_dv = 1.0 / 3.0;
    double beta_ct_quantum = 0.25;
};

inline ClassicalReferences classical_references() { return {}; }

} // namespace qwtrap
