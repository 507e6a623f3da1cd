#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qwtrap/crw.hpp"
#include "qwtrap/rng.hpp"
#include "qwtrap/traps.hpp"
#include "qwtrap/walk.hpp"

namespace qwtrap {

enum class InitKind { Up, Mixed, Symmetric };
enum class Engine { QW, CRW };

inline const char* to_string(InitKind k) {
    switch (k) {
    case InitKind::Up: return "up";
    case InitKind::Mixed: return "mixed";
    case InitKind::Symmetric: return "symmetric";
    }
    return "?";
}

inline const char* to_string(Engine e) { return e == Engine::QW ? "qw" : "crw"; }

inline InitKind init_kind_from_string(const std::string& s) {
    if (s == "up") return InitKind::Up;
    if (s == "mixed") return InitKind::Mixed;
    if (s == "symmetric") return InitKind::Symmetric;
    throw std::invalid_argument("init: expected up, mixed or symmetric, got '" + s + "'");
}

inline Engine engine_from_string(const std::string& s) {
    if (s == "qw") return Engine::QW;
    if (s == "crw") return Engine::CRW;
    throw std::invalid_argument("engine: expected qw or crw, got '" + s + "'");
}

// Full description of one disorder-averaged run. The survival output is a
// pure function of this struct (master_seed included); worker count never
// changes the result.
struct EnsembleSpec {
    int lattice_sites = 101;  // K
    double rho = 0.0;         // target trap density, n = round(rho*K)
    int steps = 1000;         // T
    int configurations = 1;   // M
    InitKind init = InitKind::Up;
    Engine engine = Engine::QW;
    Coin coin = Coin::hadamard();
    std::uint64_t master_seed = 1;

    int trap_count() const { return trap_count_for(lattice_sites, rho); }
    int walkers_per_configuration() const { return lattice_sites - trap_count(); }

    void validate() const {
        if (lattice_sites < 2) throw std::invalid_argument("lattice_sites: must be >= 2");
        if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("rho: must be in [0, 1)");
        if (steps < 1) throw std::invalid_argument("steps: must be >= 1");
        if (configurations < 1) throw std::invalid_argument("configurations: must be >= 1");
        if (trap_count() >= lattice_sites)
            throw std::invalid_argument("rho: round(rho*K) leaves no untrapped site");
        coin.require_unitary();
    }
};

// Configurational average <P(t)> with per-t standard error across the M
// configurations. times are implicit, 0..T.
struct SurvivalSeries {
    std::vector<double> mean;
    std::vector<double> std_error; // 0 when M == 1
    EnsembleSpec spec;
    int trap_count = 0;      // n, identical for every configuration
    double rho_actual = 0.0; // n / K

    int steps() const { return static_cast<int>(mean.size()) - 1; }
};

// Worker count: explicit value, else QWTRAP_THREADS, else hardware.
inline int default_worker_count() {
    if (const char* env = std::getenv("QWTRAP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs body(0..count-1) on a small worker pool. Used for the independent
// disorder configurations; the caller owns any reduction, which must happen
// in fixed index order after the pool drains.
inline void parallel_for_index(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 0) workers = default_worker_count();
    if (workers > count) workers = count;
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&]() {
        for (;;) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace detail {

// Seed streams per configuration: index 0 draws the trap sites, index 1 the
// per-site Mixed chirality assignment.
inline std::uint64_t config_seed(std::uint64_t master_seed, int r) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(r));
}

} // namespace detail

inline TrapConfig traps_for_configuration(const EnsembleSpec& spec, int r) {
    const std::uint64_t cfg = detail::config_seed(spec.master_seed, r);
    return sample_traps(spec.lattice_sites, spec.rho, derive_seed(cfg, 0));
}

// P_r(t) for configuration r in 1..M: traps sampled from (master_seed, r),
// one walker per untrapped site, averaged over the N = K - n walkers. For the
// QW engine, Mixed resolves to Up or Down independently per site, re-drawn
// per configuration; the CRW engine ignores chirality.
inline std::vector<double> run_configuration(const EnsembleSpec& spec, int r) {
    spec.validate();
    if (r < 1 || r > spec.configurations)
        throw std::invalid_argument("run_configuration: r must be in 1..M");
    const std::uint64_t cfg_seed = detail::config_seed(spec.master_seed, r);
    const TrapConfig traps = sample_traps(spec.lattice_sites, spec.rho, derive_seed(cfg_seed, 0));

    if (spec.engine == Engine::CRW) return crw_survival_aggregate(traps, spec.steps);

    const std::vector<int> starts = traps.untrapped_sites();
    const int walkers = static_cast<int>(starts.size());

    std::vector<Chirality> chi(starts.size(), Chirality::Up);
    switch (spec.init) {
    case InitKind::Up:
        break;
    case InitKind::Symmetric:
        chi.assign(starts.size(), Chirality::Symmetric);
        break;
    case InitKind::Mixed: {
        SplitMix64 g(derive_seed(cfg_seed, 1));
        for (auto& c : chi) c = g.next_bool() ? Chirality::Down : Chirality::Up;
        break;
    }
    }

    std::vector<double> acc(static_cast<std::size_t>(spec.steps) + 1, 0.0);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto surv = evolve_survival({starts[i], chi[i]}, traps, spec.coin, spec.steps);
        for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += surv[t];
    }
    for (auto& v : acc) v /= walkers;
    return acc;
}

// <P(t)> = (1/M) sum_r P_r(t), reduced in fixed r order after all workers
// finish; re-runs and different worker counts give bit-identical output.
inline SurvivalSeries ensemble_average(const EnsembleSpec& spec, int workers = 0) {
    spec.validate();
    const int m = spec.configurations;
    std::vector<std::vector<double>> per_config(static_cast<std::size_t>(m));
    parallel_for_index(m, workers, [&](int i) { per_config[static_cast<std::size_t>(i)] = run_configuration(spec, i + 1); });

    SurvivalSeries out;
    out.spec = spec;
    out.trap_count = spec.trap_count();
    out.rho_actual = static_cast<double>(out.trap_count) / spec.lattice_sites;
    const std::size_t len = static_cast<std::size_t>(spec.steps) + 1;
    out.mean.assign(len, 0.0);
    out.std_error.assign(len, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
        double sum = 0.0;
        for (int r = 0; r < m; ++r) sum += per_config[static_cast<std::size_t>(r)][t];
        out.mean[t] = sum / m;
    }
    if (m > 1) {
        for (std::size_t t = 0; t < len; ++t) {
            double ss = 0.0;
            for (int r = 0; r < m; ++r) {
                const double d = per_config[static_cast<std::size_t>(r)][t] - out.mean[t];
                ss += d * d;
            }
            out.std_error[t] = std::sqrt(ss / (static_cast<double>(m) - 1.0) / static_cast<double>(m));
        }
    }
    return out;
}

} // namespace qwtrap
