#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qwtrap/fit.hpp"

using namespace qwtrap;

TEST_CASE("an exact stretched exponential is recovered exactly") {
    const auto mean = oracles::stretched_curve(1.0, 0.5, 400);
    const auto fit = fit_stretch_exponent(mean, 1, 400);
    REQUIRE(std::abs(fit.beta - 0.5) < 1e-9);
    REQUIRE(std::abs(fit.prefactor() - 1.0) < 1e-9);
    REQUIRE(fit.sse < 1e-18);
}

TEST_CASE("the prefactor moves the intercept, never the slope") {
    const auto fit1 = fit_stretch_exponent(oracles::stretched_curve(1.0, 0.3, 300), 1, 300);
    const auto fit2 = fit_stretch_exponent(oracles::stretched_curve(2.0, 0.3, 300), 1, 300);
    REQUIRE(std::abs(fit1.beta - 0.3) < 1e-9);
    REQUIRE(std::abs(fit2.beta - 0.3) < 1e-9);
    REQUIRE(std::abs(fit2.prefactor() - 2.0) < 1e-8);
    REQUIRE(std::abs(fit2.intercept - fit1.intercept - std::log(2.0)) < 1e-9);
}

TEST_CASE("an early-window fit on a two-regime curve sees the early exponent") {
    // exp(-a t^0.9) glued to a slow late tail at t=100
    const auto mean = oracles::two_regime_curve(5.0 / std::pow(100.0, 0.9), 0.9, 0.2, 100, 800);
    const auto fit = fit_stretch_exponent(mean, 4, 100);
    REQUIRE(std::abs(fit.beta - 0.9) < 0.01);
}

TEST_CASE("points at mean >= 1 or below the floor are dropped, not errors") {
    auto mean = oracles::stretched_curve(0.5, 0.5, 200);
    mean[5] = 1.0;  // flat early sample
    mean[6] = 1.2;  // unphysical, still just dropped
    mean[100] = 1e-18; // below the log reliability floor
    const auto fit = fit_stretch_exponent(mean, 1, 200);
    REQUIRE(std::abs(fit.beta - 0.5) < 1e-9);
    REQUIRE(fit.points == 200 - 3 - 3); // t_min=4 removes 1..3 as well
}

TEST_CASE("fewer than five usable points is an error") {
    const auto mean = oracles::stretched_curve(1.0, 0.5, 10);
    REQUIRE_THROWS_AS(fit_stretch_exponent(mean, 1, 7), FitError);
}

TEST_CASE("detect_crossover finds a synthetic break") {
    for (int t_break : {50, 200, 500}) {
        const double a1 = 5.0 / std::pow(static_cast<double>(t_break), 0.9);
        const auto mean = oracles::two_regime_curve(a1, 0.9, 0.25, t_break, 4 * t_break);
        const auto fit = detect_crossover(mean);
        REQUIRE(fit.crossover);
        REQUIRE(fit.t_c >= static_cast<int>(t_break / std::sqrt(2.0)));
        REQUIRE(fit.t_c <= static_cast<int>(t_break * std::sqrt(2.0)));
        REQUIRE(std::abs(fit.beta1 - 0.9) < 0.02);
        REQUIRE(std::abs(fit.beta2 - 0.25) < 0.02);
        REQUIRE(fit.sse <= fit.sse_single);
    }
}

TEST_CASE("a pure single-exponent curve reports no crossover") {
    const auto mean = oracles::stretched_curve(0.8, 0.6, 500);
    const auto fit = detect_crossover(mean);
    REQUIRE_FALSE(fit.crossover);
    REQUIRE(fit.beta1 == fit.beta2);
    REQUIRE(std::abs(fit.beta1 - 0.6) < 1e-9);
}

TEST_CASE("detect_crossover is deterministic") {
    const auto mean = oracles::two_regime_curve(0.05, 0.9, 0.3, 120, 600);
    const auto f1 = detect_crossover(mean);
    const auto f2 = detect_crossover(mean);
    REQUIRE(f1.t_c == f2.t_c);
    REQUIRE(f1.beta1 == f2.beta1);
    REQUIRE(f1.beta2 == f2.beta2);
    REQUIRE(f1.sse == f2.sse);
}

TEST_CASE("detect_crossover needs twenty usable points") {
    const auto mean = oracles::stretched_curve(1.0, 0.5, 20);
    REQUIRE_THROWS_AS(detect_crossover(mean), FitError);
}

TEST_CASE("weighted fit reproduces an exact curve and requires stderr") {
    const auto mean = oracles::stretched_curve(1.0, 0.4, 300);
    std::vector<double> se(mean.size(), 1e-3);
    FitOptions opts;
    opts.weighted = true;
    const auto fit = fit_stretch_exponent(mean, 1, 300, opts, se);
    REQUIRE(std::abs(fit.beta - 0.4) < 1e-9);
    REQUIRE_THROWS_AS(fit_stretch_exponent(mean, 1, 300, opts), FitError);
}

TEST_CASE("analytic predictions follow the closed forms") {
    const auto p = predict(0.2, InitKind::Mixed);
    REQUIRE(std::abs(p.beta1_pred - 0.9) < 1e-15);
    REQUIRE(std::abs(p.beta2_pred - 0.1) < 1e-15);
    REQUIRE(std::abs(p.tc_mixed - 40.0) < 1e-12);
    REQUIRE(std::abs(p.tc_up_symmetric - 125.0) < 1e-12);
    REQUIRE(p.tc == p.tc_mixed);
    REQUIRE(std::abs(p.lambda + std::log(0.8)) < 1e-15);
    REQUIRE(std::abs(p.beta1_pred + p.beta2_pred - 1.0) < 1e-15);

    // rho -> 0+ pushes beta1 toward ballistic
    REQUIRE(predict(1e-9).beta1_pred > 1.0 - 1e-9);

    REQUIRE_THROWS_AS(predict(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(predict(1.0), std::invalid_argument);
}

TEST_CASE("classical reference exponents") {
    const auto refs = classical_references();
    REQUIRE(refs.beta_rs == 0.5);
    REQUIRE(refs.beta_dv == 1.0 / 3.0);
    REQUIRE(refs.beta_ct_quantum == 0.25);
}
