#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qwtrap/crw.hpp"
#include "qwtrap/rng.hpp"

using namespace qwtrap;

TEST_CASE("crw_step: uniform field without traps is a fixed point") {
    ProbabilityField f = ProbabilityField::zero(7);
    for (auto& v : f.p) v = 1.0 / 7.0;
    const auto g = crw_step(f, make_traps(7, {}));
    for (double v : g.p) REQUIRE(std::abs(v - 1.0 / 7.0) < 1e-15);
}

TEST_CASE("crw_step: a delta splits evenly to both neighbors") {
    const auto g = crw_step(ProbabilityField::delta(6, 3), make_traps(6, {}));
    REQUIRE(g.p[2] == 0.5);
    REQUIRE(g.p[4] == 0.5);
    REQUIRE(std::abs(g.total() - 1.0) < 1e-15);
}

TEST_CASE("crw_step: trap sites are forced to zero") {
    // K=5, trap on site 2, delta on site 1: half survives on site 0
    const auto g = crw_step(ProbabilityField::delta(5, 1), make_traps(5, {2}));
    REQUIRE(g.p[0] == 0.5);
    REQUIRE(g.p[2] == 0.0);
    REQUIRE(std::abs(g.total() - 0.5) < 1e-15);
}

TEST_CASE("aggregate survival without traps is identically one") {
    const auto surv = crw_survival_aggregate(make_traps(12, {}), 200);
    for (double s : surv) REQUIRE(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("aggregate survival dies immediately when both neighbors are trapped") {
    const auto surv = crw_survival_aggregate(make_traps(3, {1, 2}), 1);
    REQUIRE(surv[1] == 0.0);
}

TEST_CASE("aggregate propagation equals per-walker enumeration (K=11)") {
    const TrapConfig traps = make_traps(11, {3, 8});
    const auto fast = crw_survival_aggregate(traps, 50);
    const auto slow = oracles::crw_survival_per_walker(traps, 50);
    REQUIRE(oracles::max_abs_diff(fast, slow) < 1e-12);
}

TEST_CASE("aggregate propagation equals per-walker enumeration on random instances") {
    SplitMix64 g(2024);
    for (int rep = 0; rep < 40; ++rep) {
        const int sites = 4 + static_cast<int>(g.next_below(28));
        const double rho = 0.5 * g.next_double();
        TrapConfig traps = sample_traps(sites, rho, g.next());
        if (traps.trap_count() == 0) traps = make_traps(sites, {0});
        const auto fast = crw_survival_aggregate(traps, 50);
        const auto slow = oracles::crw_survival_per_walker(traps, 50);
        REQUIRE(oracles::max_abs_diff(fast, slow) < 1e-12);
    }
}

TEST_CASE("mass is conserved without traps over many steps") {
    const TrapConfig none = make_traps(33, {});
    ProbabilityField cur = ProbabilityField::delta(33, 11);
    ProbabilityField nxt = ProbabilityField::zero(33);
    for (int t = 0; t < 10000; ++t) {
        crw_step_into(cur, nxt, none);
        std::swap(cur, nxt);
    }
    REQUIRE(std::abs(cur.total() - 1.0) < 1e-12);
}

TEST_CASE("fully trapped lattice is rejected") {
    TrapConfig all = make_traps(4, {0, 1, 2, 3});
    REQUIRE_THROWS_AS(crw_survival_aggregate(all, 5), std::invalid_argument);
}
