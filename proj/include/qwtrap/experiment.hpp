#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qwtrap/fit.hpp"
#include "qwtrap/series_io.hpp"
#include "qwtrap/version.hpp"

namespace qwtrap {

using json = nlohmann::json;

// Where a spec came from, when built by figure_preset: the full-scale
// parameters and the documented scale factors. Never silent.
struct PresetProvenance {
    std::string name;
    int full_scale_configurations = 0;
    double m_scale = 1.0;
    int full_scale_steps = 0;
    double t_scale = 1.0;

    bool valid() const { return !name.empty(); }
};

// One experiment: a single ensemble or a sweep over lattice size, trap
// density, initialization and engine, with shared T, M. The cross product
// defines the cells; each cell writes one survival CSV and one metadata/fit
// JSON document.
struct ExperimentSpec {
    std::vector<int> lattice_sites{101};
    std::vector<double> rho{0.0};
    std::vector<InitKind> init{InitKind::Up};
    std::vector<Engine> engine{Engine::QW};
    int steps = 1000;
    int configurations = 1;
    std::uint64_t master_seed = 1;
    FitOptions analysis;
    std::string output_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    int job_cap = 64;
    PresetProvenance preset;

    std::vector<EnsembleSpec> cells() const {
        std::vector<EnsembleSpec> out;
        for (int k : lattice_sites)
            for (double r : rho)
                for (InitKind i : init)
                    for (Engine e : engine) {
                        EnsembleSpec c;
                        c.lattice_sites = k;
                        c.rho = r;
                        c.steps = steps;
                        c.configurations = configurations;
                        c.init = i;
                        c.engine = e;
                        c.master_seed = master_seed;
                        out.push_back(c);
                    }
        return out;
    }

    void validate() const {
        if (lattice_sites.empty()) throw std::invalid_argument("lattice_sites: list is empty");
        if (rho.empty()) throw std::invalid_argument("rho: list is empty");
        if (init.empty()) throw std::invalid_argument("init: list is empty");
        if (engine.empty()) throw std::invalid_argument("engine: list is empty");
        const std::size_t count =
            lattice_sites.size() * rho.size() * init.size() * engine.size();
        if (count > static_cast<std::size_t>(job_cap))
            throw std::invalid_argument("job_cap: sweep has " + std::to_string(count) +
                                        " cells, cap is " + std::to_string(job_cap));
        if (analysis.t_min < 1) throw std::invalid_argument("analysis.t_min: must be >= 1");
        if (analysis.crossover_margin < 0.0 || analysis.crossover_margin >= 1.0)
            throw std::invalid_argument("analysis.crossover_margin: must be in [0, 1)");
        for (const auto& cell : cells()) cell.validate();
    }
};

inline std::string cell_label(const EnsembleSpec& c) {
    return std::string(to_string(c.engine)) + "_" + to_string(c.init) + "_K" +
           std::to_string(c.lattice_sites) + "_rho" + format_double(c.rho);
}

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
    }
}

template <typename T>
std::vector<T> scalar_or_list(const json& v, const std::string& field) {
    std::vector<T> out;
    try {
        if (v.is_array()) {
            for (const auto& e : v) out.push_back(e.get<T>());
        } else {
            out.push_back(v.get<T>());
        }
    } catch (const json::exception&) {
        throw std::invalid_argument(field + ": wrong type");
    }
    if (out.empty()) throw std::invalid_argument(field + ": list is empty");
    return out;
}

} // namespace detail

inline json preset_to_json(const PresetProvenance& p) {
    return json{{"name", p.name},
                {"full_scale_configurations", p.full_scale_configurations},
                {"m_scale", p.m_scale},
                {"full_scale_steps", p.full_scale_steps},
                {"t_scale", p.t_scale}};
}

inline PresetProvenance preset_from_json(const json& j) {
    detail::reject_unknown_keys(
        j, {"name", "full_scale_configurations", "m_scale", "full_scale_steps", "t_scale"}, "preset");
    PresetProvenance p;
    p.name = j.at("name").get<std::string>();
    p.full_scale_configurations = j.at("full_scale_configurations").get<int>();
    p.m_scale = j.at("m_scale").get<double>();
    p.full_scale_steps = j.at("full_scale_steps").get<int>();
    p.t_scale = j.at("t_scale").get<double>();
    return p;
}

inline json experiment_to_json(const ExperimentSpec& s) {
    json j;
    j["lattice_sites"] = s.lattice_sites;
    j["rho"] = s.rho;
    {
        std::vector<std::string> v;
        for (auto i : s.init) v.emplace_back(to_string(i));
        j["init"] = v;
    }
    {
        std::vector<std::string> v;
        for (auto e : s.engine) v.emplace_back(to_string(e));
        j["engine"] = v;
    }
    j["steps"] = s.steps;
    j["configurations"] = s.configurations;
    j["master_seed"] = s.master_seed;
    j["analysis"] = json{{"t_min", s.analysis.t_min},
                         {"crossover_margin", s.analysis.crossover_margin},
                         {"weighted", s.analysis.weighted}};
    j["output_dir"] = s.output_dir;
    {
        std::vector<std::string> fmts;
        if (s.write_csv) fmts.emplace_back("csv");
        if (s.write_json) fmts.emplace_back("json");
        j["formats"] = fmts;
    }
    j["job_cap"] = s.job_cap;
    if (s.preset.valid()) j["preset"] = preset_to_json(s.preset);
    return j;
}

// Strict parse: unknown fields are rejected by name, missing required fields
// and out-of-range values are reported by name.
inline ExperimentSpec experiment_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("experiment spec: expected a JSON object");
    detail::reject_unknown_keys(j,
                                {"lattice_sites", "rho", "init", "engine", "steps",
                                 "configurations", "master_seed", "analysis", "output_dir",
                                 "formats", "job_cap", "preset"},
                                "experiment spec");
    ExperimentSpec s;
    for (const char* req : {"lattice_sites", "rho", "init", "engine", "steps", "configurations",
                            "master_seed"})
        if (!j.contains(req)) throw std::invalid_argument(std::string(req) + ": required field missing");

    s.lattice_sites = detail::scalar_or_list<int>(j.at("lattice_sites"), "lattice_sites");
    s.rho = detail::scalar_or_list<double>(j.at("rho"), "rho");
    s.init.clear();
    for (const auto& name : detail::scalar_or_list<std::string>(j.at("init"), "init"))
        s.init.push_back(init_kind_from_string(name));
    s.engine.clear();
    for (const auto& name : detail::scalar_or_list<std::string>(j.at("engine"), "engine"))
        s.engine.push_back(engine_from_string(name));
    try {
        s.steps = j.at("steps").get<int>();
        s.configurations = j.at("configurations").get<int>();
        s.master_seed = j.at("master_seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("steps/configurations/master_seed: ") + e.what());
    }
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        detail::reject_unknown_keys(a, {"t_min", "crossover_margin", "weighted"}, "analysis");
        if (a.contains("t_min")) s.analysis.t_min = a.at("t_min").get<int>();
        if (a.contains("crossover_margin"))
            s.analysis.crossover_margin = a.at("crossover_margin").get<double>();
        if (a.contains("weighted")) s.analysis.weighted = a.at("weighted").get<bool>();
    }
    if (j.contains("output_dir")) s.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("formats")) {
        s.write_csv = s.write_json = false;
        for (const auto& f : detail::scalar_or_list<std::string>(j.at("formats"), "formats")) {
            if (f == "csv")
                s.write_csv = true;
            else if (f == "json")
                s.write_json = true;
            else
                throw std::invalid_argument("formats: unknown format '" + f + "'");
        }
    }
    if (j.contains("job_cap")) s.job_cap = j.at("job_cap").get<int>();
    if (j.contains("preset")) s.preset = preset_from_json(j.at("preset"));
    return s;
}

inline json fit_to_json(const PiecewiseFit& f) {
    return json{{"crossover", f.crossover},
                {"beta1", f.beta1},
                {"beta2", f.beta2},
                {"t_c", f.t_c},
                {"a1", f.a1},
                {"a2", f.a2},
                {"sse", f.sse},
                {"sse_single", f.sse_single},
                {"window", {f.window_lo, f.window_hi}},
                {"beta1_stderr", f.beta1_stderr},
                {"beta2_stderr", f.beta2_stderr}};
}

struct CellOutcome {
    std::string label;
    EnsembleSpec ensemble;
    SurvivalSeries series;
    std::optional<PiecewiseFit> fit;
    std::string fit_error; // set when the fit is undefined for this curve
};

struct RunReport {
    std::vector<std::string> written;
    std::vector<std::pair<std::string, std::string>> failures; // label -> reason

    bool ok() const { return failures.empty(); }
};

// Metadata record for one cell. Contains everything needed to regenerate the
// CSV bit-exactly: the full single-cell experiment spec including the master
// seed, plus the analysis options and code version.
inline json cell_metadata(const ExperimentSpec& spec, const CellOutcome& cell) {
    ExperimentSpec single = spec;
    single.lattice_sites = {cell.ensemble.lattice_sites};
    single.rho = {cell.ensemble.rho};
    single.init = {cell.ensemble.init};
    single.engine = {cell.ensemble.engine};

    json meta;
    meta["schema"] = "qwtrap-cell-v1";
    meta["code_version"] = QWTRAP_VERSION;
    meta["label"] = cell.label;
    meta["experiment"] = experiment_to_json(single);
    meta["trap_count"] = cell.series.trap_count;
    meta["rho_actual"] = cell.series.rho_actual;
    meta["walkers_per_configuration"] = cell.ensemble.walkers_per_configuration();
    if (cell.fit)
        meta["fit"] = fit_to_json(*cell.fit);
    else
        meta["fit"] = nullptr;
    if (!cell.fit_error.empty()) meta["fit_error"] = cell.fit_error;
    return meta;
}

// Runs every cell of the sweep and writes, per cell, <label>.csv and
// <label>.json under output_dir. Cells run in deterministic order; the
// configuration pool inside each cell is where the workers go. Per-cell
// failures are collected, not fatal.
inline RunReport run_experiment(const ExperimentSpec& spec, int workers = 0,
                                const std::string& output_dir_override = "",
                                std::ostream* progress = nullptr) {
    spec.validate();
    const std::filesystem::path out_dir =
        output_dir_override.empty() ? spec.output_dir : output_dir_override;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " +
                                     ec.message());

    RunReport report;
    const auto cell_specs = spec.cells();
    std::size_t done = 0;
    for (const EnsembleSpec& ens : cell_specs) {
        const std::string label = cell_label(ens);
        if (progress)
            (*progress) << "[" << ++done << "/" << cell_specs.size() << "] " << label
                        << " (T=" << ens.steps << ", M=" << ens.configurations << ")" << std::endl;
        try {
            CellOutcome cell;
            cell.label = label;
            cell.ensemble = ens;
            cell.series = ensemble_average(ens, workers);
            try {
                cell.fit = detect_crossover(cell.series, spec.analysis);
            } catch (const FitError& e) {
                cell.fit_error = e.what();
            }
            if (spec.write_csv) {
                const auto p = out_dir / (label + ".csv");
                write_text_file(p, survival_csv(cell.series));
                report.written.push_back(p.string());
            }
            if (spec.write_json) {
                const auto p = out_dir / (label + ".json");
                write_text_file(p, cell_metadata(spec, cell).dump(2) + "\n");
                report.written.push_back(p.string());
            }
        } catch (const std::exception& e) {
            report.failures.emplace_back(label, e.what());
        }
    }
    return report;
}

} // namespace qwtrap
