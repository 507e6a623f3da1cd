// Command line runner: reproducible survival-probability experiments for
// coined quantum walks and classical random walks on trapped cycles.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "qwtrap/experiment.hpp"
#include "qwtrap/presets.hpp"
#include "qwtrap/version.hpp"

namespace {

qwtrap::json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    try {
        return qwtrap::json::parse(f);
    } catch (const qwtrap::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

int report_outcome(const qwtrap::RunReport& report) {
    for (const auto& path : report.written) std::cout << "wrote " << path << "\n";
    if (!report.ok()) {
        std::cerr << report.failures.size() << " cell(s) failed:\n";
        for (const auto& [label, reason] : report.failures)
            std::cerr << "  " << label << ": " << reason << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"survival probability of quantum and classical walkers on randomly trapped cycles"};
    app.set_version_flag("--version", QWTRAP_VERSION);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker count for disorder configurations (default: QWTRAP_THREADS or hardware)");

    std::string spec_path, run_out;
    auto* cmd_run = app.add_subcommand("run", "run an experiment spec (JSON)");
    cmd_run->add_option("spec", spec_path, "experiment spec file, or a cell metadata record")
        ->required();
    cmd_run->add_option("--out", run_out, "override the spec's output directory");

    std::string preset_name, preset_out;
    double scale_m = 0.0;
    bool dry_run = false;
    auto* cmd_preset = app.add_subcommand("preset", "run a canonical figure preset");
    cmd_preset->add_option("name", preset_name, "one of: fig2a fig2b fig2c fig3 fig4 fig5a fig5b fig6a fig6b fig7 fig8")
        ->required();
    cmd_preset->add_option("--scale-m", scale_m,
                           "configuration-count scale factor relative to the full-scale M");
    cmd_preset->add_option("--out", preset_out, "output directory (default: preset name)");
    cmd_preset->add_flag("--dry-run", dry_run, "print the resolved spec instead of running");

    std::string curve_path;
    qwtrap::FitOptions fit_opts;
    auto* cmd_fit = app.add_subcommand("fit", "piecewise stretched-exponential fit of a survival CSV");
    cmd_fit->add_option("curve", curve_path, "CSV file with header t,mean,stderr")->required();
    cmd_fit->add_option("--t-min", fit_opts.t_min, "first step used in fits");
    cmd_fit->add_option("--margin", fit_opts.crossover_margin,
                        "required fractional sse improvement to accept a crossover");
    cmd_fit->add_flag("--weighted", fit_opts.weighted, "weight fit points by 1/stderr^2");

    double rho = 0.0;
    std::string init_name = "up";
    auto* cmd_predict = app.add_subcommand("predict", "closed-form exponents and crossover time");
    cmd_predict->add_option("--rho", rho, "trap density in (0, 1)")->required();
    cmd_predict->add_option("--init", init_name, "up, mixed or symmetric");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            qwtrap::json doc = load_json(spec_path);
            if (doc.is_object() && doc.value("schema", "") == "qwtrap-cell-v1")
                doc = doc.at("experiment");
            const auto spec = qwtrap::experiment_from_json(doc);
            return report_outcome(qwtrap::run_experiment(spec, threads, run_out, &std::cout));
        }
        if (*cmd_preset) {
            auto spec = qwtrap::figure_preset(preset_name, scale_m);
            if (dry_run) {
                std::cout << qwtrap::experiment_to_json(spec).dump(2) << "\n";
                return 0;
            }
            return report_outcome(qwtrap::run_experiment(spec, threads, preset_out, &std::cout));
        }
        if (*cmd_fit) {
            const auto curve = qwtrap::read_survival_csv(curve_path);
            const auto fit = qwtrap::detect_crossover(curve.mean, fit_opts, curve.std_error);
            std::cout << qwtrap::fit_to_json(fit).dump(2) << "\n";
            return 0;
        }
        if (*cmd_predict) {
            const auto p = qwtrap::predict(rho, qwtrap::init_kind_from_string(init_name));
            const auto refs = qwtrap::classical_references();
            qwtrap::json out{{"rho", p.rho},
                             {"beta1_pred", p.beta1_pred},
                             {"beta2_pred", p.beta2_pred},
                             {"tc", p.tc},
                             {"tc_up_symmetric", p.tc_up_symmetric},
                             {"tc_mixed", p.tc_mixed},
                             {"lambda", p.lambda},
                             {"references",
                              {{"beta_rs", refs.beta_rs},
                               {"beta_dv", refs.beta_dv},
                               {"beta_ct_quantum", refs.beta_ct_quantum}}}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
