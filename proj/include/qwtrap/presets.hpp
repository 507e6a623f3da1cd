#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwtrap/experiment.hpp"

namespace qwtrap {

// Canonical experiment setups at desk scale. Each preset carries the
// full-scale M (and T) it was scaled down from; the scale factors are part
// of the spec and end up in every metadata record. scale_m overrides the
// default factor: M = max(1, round(full_scale_M * scale_m)).
inline ExperimentSpec figure_preset(const std::string& name, double scale_m = 0.0) {
    ExperimentSpec s;
    s.job_cap = 64;

    auto scaled = [&](int full_m, int desk_m) {
        const double factor = scale_m > 0.0 ? scale_m : static_cast<double>(desk_m) / full_m;
        s.preset.full_scale_configurations = full_m;
        s.preset.m_scale = factor;
        s.configurations = std::max(1, static_cast<int>(std::lround(full_m * factor)));
    };
    auto steps = [&](int full_t, int desk_t) {
        s.preset.full_scale_steps = full_t;
        s.preset.t_scale = static_cast<double>(desk_t) / full_t;
        s.steps = desk_t;
    };

    s.preset.name = name;
    if (name == "fig2a" || name == "fig2b" || name == "fig2c") {
        s.engine = {Engine::QW};
        s.init = {name == "fig2a" ? InitKind::Up
                                  : name == "fig2b" ? InitKind::Mixed : InitKind::Symmetric};
        s.lattice_sites = {101};
        s.rho = {0.05, 0.1, 0.2, 0.3};
        steps(20000, 20000);
        scaled(10000, 50);
        s.master_seed = name == "fig2a" ? 1021 : name == "fig2b" ? 1022 : 1023;
    } else if (name == "fig3") {
        s.engine = {Engine::QW};
        s.init = {InitKind::Up, InitKind::Mixed, InitKind::Symmetric};
        s.lattice_sites = {101};
        s.rho = {0.2};
        steps(20000, 20000);
        scaled(10000, 50);
        s.master_seed = 1030;
    } else if (name == "fig4") {
        s.engine = {Engine::QW};
        s.init = {InitKind::Up, InitKind::Mixed, InitKind::Symmetric};
        s.lattice_sites = {101};
        s.rho = {0.05, 0.1, 0.2, 0.3};
        steps(20000, 2000);
        scaled(10000, 100);
        s.master_seed = 1040;
    } else if (name == "fig5a") {
        s.engine = {Engine::CRW};
        s.init = {InitKind::Up};
        s.lattice_sites = {50000};
        s.rho = {0.01, 0.005};
        steps(2000, 2000);
        scaled(100, 50);
        s.master_seed = 1051;
    } else if (name == "fig5b") {
        s.engine = {Engine::CRW};
        s.init = {InitKind::Up};
        s.lattice_sites = {50000};
        s.rho = {0.2, 0.5};
        steps(2000, 2000);
        scaled(100, 50);
        s.master_seed = 1052;
    } else if (name == "fig6a") {
        s.engine = {Engine::CRW};
        s.init = {InitKind::Up};
        s.lattice_sites = {101};
        s.rho = {0.05, 0.1, 0.2, 0.3};
        steps(1000, 1000);
        scaled(100000, 1000);
        s.master_seed = 1061;
    } else if (name == "fig6b") {
        s.engine = {Engine::QW};
        s.init = {InitKind::Up};
        s.lattice_sites = {101};
        s.rho = {0.05, 0.1, 0.2, 0.3};
        steps(1000, 1000);
        scaled(100000, 200);
        s.master_seed = 1062;
    } else if (name == "fig7") {
        s.engine = {Engine::QW, Engine::CRW};
        s.init = {InitKind::Up};
        s.lattice_sites = {101};
        s.rho = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
        steps(1000, 1000);
        scaled(100000, 200);
        s.master_seed = 1070;
    } else if (name == "fig8") {
        s.engine = {Engine::QW};
        s.init = {InitKind::Up};
        s.lattice_sites = {81, 101, 201};
        s.rho = {0.05, 0.1, 0.2, 0.3};
        steps(1000, 1000);
        scaled(100000, 100);
        s.master_seed = 1080;
    } else {
        throw std::invalid_argument("unknown preset '" + name +
                                    "'; expected one of fig2a fig2b fig2c fig3 fig4 fig5a fig5b "
                                    "fig6a fig6b fig7 fig8");
    }
    s.output_dir = name;
    return s;
}

inline std::vector<std::string> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig3", "fig4", "fig5a",
            "fig5b", "fig6a", "fig6b", "fig7", "fig8"};
}

} // namespace qwtrap
