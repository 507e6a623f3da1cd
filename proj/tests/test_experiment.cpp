#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "qwtrap/experiment.hpp"
#include "qwtrap/presets.hpp"

using namespace qwtrap;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qwtrap_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("survival CSV format is stable and byte-exact") {
    SurvivalSeries s;
    s.mean = {1.0, 0.75, 0.5};
    s.std_error = {0.0, 0.0625, 0.125};
    REQUIRE(survival_csv(s) == "t,mean,stderr\n0,1,0\n1,0.75,0.0625\n2,0.5,0.125\n");
}

TEST_CASE("survival CSV round-trips") {
    const auto dir = fresh_dir("csv");
    SurvivalSeries s;
    s.mean = {1.0, 0.123456789012345678, 1e-14};
    s.std_error = {0.0, 0.25, 0.3333333333333333};
    write_text_file(dir / "c.csv", survival_csv(s));
    const Curve c = read_survival_csv(dir / "c.csv");
    REQUIRE(c.mean == s.mean);
    REQUIRE(c.std_error == s.std_error);
    REQUIRE_THROWS(read_survival_csv(dir / "missing.csv"));
}

TEST_CASE("experiment specs parse strictly") {
    json j = {{"lattice_sites", 21},
              {"rho", {0.1, 0.2}},
              {"init", "up"},
              {"engine", {"qw", "crw"}},
              {"steps", 50},
              {"configurations", 3},
              {"master_seed", 99}};
    const auto spec = experiment_from_json(j);
    REQUIRE(spec.lattice_sites == std::vector<int>{21});
    REQUIRE(spec.rho == std::vector<double>{0.1, 0.2});
    REQUIRE(spec.init == std::vector<InitKind>{InitKind::Up});
    REQUIRE(spec.engine == std::vector<Engine>{Engine::QW, Engine::CRW});
    REQUIRE(spec.cells().size() == 4);

    SECTION("unknown fields are rejected by name") {
        j["typo_field"] = 1;
        try {
            experiment_from_json(j);
            FAIL("expected rejection");
        } catch (const std::invalid_argument& e) {
            REQUIRE(std::string(e.what()).find("typo_field") != std::string::npos);
        }
    }

    SECTION("missing required fields are reported by name") {
        j.erase("steps");
        try {
            experiment_from_json(j);
            FAIL("expected rejection");
        } catch (const std::invalid_argument& e) {
            REQUIRE(std::string(e.what()).find("steps") != std::string::npos);
        }
    }

    SECTION("rho = 1.0 fails validation naming rho") {
        j["rho"] = 1.0;
        const auto bad = experiment_from_json(j);
        try {
            bad.validate();
            FAIL("expected rejection");
        } catch (const std::invalid_argument& e) {
            REQUIRE(std::string(e.what()).find("rho") != std::string::npos);
        }
    }

    SECTION("bad init value is rejected") {
        j["init"] = "sideways";
        REQUIRE_THROWS_AS(experiment_from_json(j), std::invalid_argument);
    }

    SECTION("spec JSON round-trips") {
        const auto again = experiment_from_json(experiment_to_json(spec));
        REQUIRE(experiment_to_json(again) == experiment_to_json(spec));
    }
}

TEST_CASE("sweeps above the job cap are rejected") {
    ExperimentSpec spec;
    spec.rho = std::vector<double>(65, 0.1);
    spec.steps = 10;
    spec.configurations = 1;
    try {
        spec.validate();
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        REQUIRE(std::string(e.what()).find("job_cap") != std::string::npos);
    }
}

TEST_CASE("run_experiment writes one CSV and one metadata record per cell") {
    const auto dir = fresh_dir("run");
    ExperimentSpec spec;
    spec.lattice_sites = {21};
    spec.rho = {0.1};
    spec.init = {InitKind::Up};
    spec.engine = {Engine::QW, Engine::CRW};
    spec.steps = 40;
    spec.configurations = 3;
    spec.master_seed = 7;
    spec.output_dir = (dir / "out").string();

    const auto report = run_experiment(spec);
    REQUIRE(report.ok());
    REQUIRE(report.written.size() == 4);
    REQUIRE(fs::exists(dir / "out" / "qw_up_K21_rho0.1.csv"));
    REQUIRE(fs::exists(dir / "out" / "crw_up_K21_rho0.1.json"));

    const auto meta = json::parse(slurp(dir / "out" / "qw_up_K21_rho0.1.json"));
    REQUIRE(meta.at("schema") == "qwtrap-cell-v1");
    REQUIRE(meta.at("trap_count") == 2);
    REQUIRE(meta.at("walkers_per_configuration") == 19);
    // too short a series for a crossover fit; recorded, not fatal
    REQUIRE(meta.contains("fit"));

    SECTION("rerunning the spec gives byte-identical outputs") {
        const std::string csv_before = slurp(dir / "out" / "qw_up_K21_rho0.1.csv");
        const std::string json_before = slurp(dir / "out" / "qw_up_K21_rho0.1.json");
        const auto again = run_experiment(spec, 4);
        REQUIRE(again.ok());
        REQUIRE(slurp(dir / "out" / "qw_up_K21_rho0.1.csv") == csv_before);
        REQUIRE(slurp(dir / "out" / "qw_up_K21_rho0.1.json") == json_before);
    }

    SECTION("the metadata record regenerates its CSV bit-exactly") {
        const std::string csv_before = slurp(dir / "out" / "qw_up_K21_rho0.1.csv");
        auto embedded = experiment_from_json(meta.at("experiment"));
        const auto redo = run_experiment(embedded, 0, (dir / "redo").string());
        REQUIRE(redo.ok());
        REQUIRE(slurp(dir / "redo" / "qw_up_K21_rho0.1.csv") == csv_before);
    }
}

TEST_CASE("figure presets carry the documented scale factors") {
    const auto fig5a = figure_preset("fig5a");
    REQUIRE(fig5a.engine == std::vector<Engine>{Engine::CRW});
    REQUIRE(fig5a.lattice_sites == std::vector<int>{50000});
    REQUIRE(fig5a.rho == std::vector<double>{0.01, 0.005});
    REQUIRE(fig5a.steps == 2000);
    REQUIRE(fig5a.preset.full_scale_configurations == 100);
    REQUIRE(fig5a.configurations == 50);
    REQUIRE(fig5a.preset.m_scale == 0.5);

    const auto fig6b = figure_preset("fig6b");
    REQUIRE(fig6b.engine == std::vector<Engine>{Engine::QW});
    REQUIRE(fig6b.init == std::vector<InitKind>{InitKind::Up});
    REQUIRE(fig6b.lattice_sites == std::vector<int>{101});
    REQUIRE(fig6b.steps == 1000);

    const auto fig8 = figure_preset("fig8");
    REQUIRE(fig8.lattice_sites == std::vector<int>{81, 101, 201});

    const auto scaled = figure_preset("fig5a", 0.1);
    REQUIRE(scaled.configurations == 10);
    REQUIRE(scaled.preset.m_scale == 0.1);

    REQUIRE_THROWS_AS(figure_preset("fig99"), std::invalid_argument);
    for (const auto& name : preset_names()) REQUIRE(figure_preset(name).preset.name == name);
}

TEST_CASE("cell labels are filesystem-friendly and engine-aware") {
    EnsembleSpec c;
    c.lattice_sites = 101;
    c.rho = 0.05;
    c.engine = Engine::CRW;
    c.init = InitKind::Symmetric;
    REQUIRE(cell_label(c) == "crw_symmetric_K101_rho0.05");
}
