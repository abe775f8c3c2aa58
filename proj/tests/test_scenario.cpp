#include <doctest.h>

#include <fstream>

#include "gaugetherm/scenario.hpp"

using namespace gaugetherm;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("gaugetherm_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

json pdm_config(const std::filesystem::path& dir, double p) {
    return json{
        {"schema", 1},
        {"model",
         {{"kind", "pdm"}, {"omega", 2.0}, {"gamma", "1"}, {"p", p}, {"rho01", {0.2, 0.0}}}},
        {"initial_state", "pdm_initial"},
        {"time", {{"t0", 0.0}, {"t1", 2.0}, {"steps", 400}}},
        {"gauges",
         {{{"name", "identity"}},
          {{"name", "work"}, {"gamma", {"i*sin(t)"}}}}},
        {"outputs",
         {{"csv_path", (dir / "pdm").string()},
          {"summary_path", (dir / "summary.json").string()}}},
        {"analyses", {{"thermo", true}, {"invariance", true}}},
    };
}

}  // namespace

TEST_CASE("config validation rejects malformed input") {
    const auto dir = temp_dir("validate");
    json config = pdm_config(dir, 0.5);

    SUBCASE("unknown keys") {
        config["surprise"] = 1;
        CHECK_THROWS_AS(validate_config(config), SchemaError);
    }
    SUBCASE("missing schema") {
        config.erase("schema");
        CHECK_THROWS_AS(validate_config(config), SchemaError);
    }
    SUBCASE("odd step counts") {
        config["time"]["steps"] = 401;
        CHECK_THROWS_AS(validate_config(config), SchemaError);
    }
    SUBCASE("reversed time window") {
        config["time"]["t1"] = -1.0;
        CHECK_THROWS_AS(validate_config(config), SchemaError);
    }
    SUBCASE("malformed gauge expression reports its path") {
        config["gauges"][1]["gamma"][0] = "sin(";
        try {
            validate_config(config);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find("expression") != std::string::npos);
        }
    }
    SUBCASE("valid config passes") { CHECK_NOTHROW(validate_config(config)); }
}

TEST_CASE("balanced dephasing scenario: every gauge is workless") {
    const auto dir = temp_dir("run_invariant");
    const json config = pdm_config(dir, 0.5);
    const RunArtifacts artifacts = run_scenario(config);

    REQUIRE(artifacts.summary.contains("gauges"));
    for (const auto& row : artifacts.summary.at("gauges")) {
        CHECK(std::abs(row.at("Q").get<double>()) < 1e-9);
        CHECK(std::abs(row.at("W").get<double>()) < 1e-9);
        CHECK(row.at("invariant_at_t0").get<bool>());
    }
    CHECK(std::filesystem::exists(artifacts.summary_file));
    CHECK(artifacts.csv_files.size() == 4);  // thermo + invariance per gauge
}

TEST_CASE("unbalanced dephasing scenario accumulates work") {
    const auto dir = temp_dir("run_work");
    json config = pdm_config(dir, 0.7);
    config["time"]["t1"] = M_PI / 2.0;
    config["time"]["steps"] = 500;
    const RunArtifacts artifacts = run_scenario(config);

    const json& rows = artifacts.summary.at("gauges");
    CHECK(std::abs(rows[0].at("W").get<double>()) < 1e-9);
    CHECK(rows[1].at("W").get<double>() == doctest::Approx(0.4).epsilon(1e-7));
    CHECK_FALSE(rows[1].at("invariant_at_t0").get<bool>());
}

TEST_CASE("csv output is byte-identical across runs") {
    const auto dir1 = temp_dir("det1");
    const auto dir2 = temp_dir("det2");
    json c1 = pdm_config(dir1, 0.7);
    json c2 = pdm_config(dir2, 0.7);
    const RunArtifacts a1 = run_scenario(c1);
    const RunArtifacts a2 = run_scenario(c2);
    REQUIRE(a1.csv_files.size() == a2.csv_files.size());
    for (std::size_t k = 0; k < a1.csv_files.size(); ++k) {
        CHECK(slurp(a1.csv_files[k]) == slurp(a2.csv_files[k]));
    }
}

TEST_CASE("maser machine scenario") {
    const auto dir = temp_dir("machine");
    const json config{
        {"schema", 1},
        {"model",
         {{"kind", "maser"},
          {"omega1", 0.0},
          {"omega2", 1.0},
          {"omega3", 3.0},
          {"epsilon", 0.5},
          {"gamma_rate", 1.0},
          {"nbar_h", 2.0},
          {"nbar_c", 0.5}}},
        {"initial_state", "maximally_mixed"},
        {"time", {{"t0", 0.0}, {"t1", 6.283185307179586}, {"steps", 1000}}},
        {"gauges", {{{"name", "identity"}}}},
        {"outputs",
         {{"csv_path", (dir / "maser").string()},
          {"summary_path", (dir / "summary.json").string()}}},
        {"analyses",
         {{"thermo", true},
          {"entropy", true},
          {"machine", {{"burn_in", 15.0}}}}},
    };
    const RunArtifacts artifacts = run_scenario(config);
    const json& row = artifacts.summary.at("gauges").at(0);
    CHECK(row.at("eta").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    CHECK(row.at("carnot_bound").get<double>() == doctest::Approx(0.753953).epsilon(1e-5));
    CHECK(row.at("balance_residual").get<double>() < 1e-6);
    CHECK(row.at("cyclic").get<bool>());
}

TEST_CASE("sweep over the work gauge amplitude") {
    const auto dir = temp_dir("sweep");
    json config = pdm_config(dir, 0.7);
    config["time"]["t1"] = M_PI / 2.0;
    config["time"]["steps"] = 300;
    config["gauges"] = json::array({json{{"name", "work"}, {"gamma", {"0*i*sin(t)"}}}});
    config["sweep"] = {{"parameter", "/gauges/0/gamma/0"},
                       {"values", {"0*i*sin(t)", "0.5*i*sin(t)", "1*i*sin(t)"}}};

    const RunArtifacts artifacts = run_sweep(config);
    const json& rows = artifacts.summary.at("rows");
    REQUIRE(rows.size() == 3);
    const double w0 = rows[0].at("summary").at("gauges").at(0).at("W").get<double>();
    const double w1 = rows[1].at("summary").at("gauges").at(0).at("W").get<double>();
    const double w2 = rows[2].at("summary").at("gauges").at(0).at("W").get<double>();
    CHECK(std::abs(w0) < 1e-9);
    CHECK(w1 == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(w2 == doctest::Approx(0.4).epsilon(1e-6));

    // sweeps without a sweep block are schema errors
    json bare = pdm_config(temp_dir("sweep_bare"), 0.5);
    CHECK_THROWS_AS(run_sweep(bare), SchemaError);

    // empty value lists too
    config["sweep"]["values"] = json::array();
    CHECK_THROWS_AS(run_sweep(config), SchemaError);
}

TEST_CASE("sweeps can run on multiple threads") {
    const auto dir = temp_dir("sweep_jobs");
    json config = pdm_config(dir, 0.6);
    config["gauges"] = json::array({json{{"name", "work"}, {"gamma", {"0*i*sin(t)"}}}});
    config["sweep"] = {{"parameter", "/model/p"}, {"values", {0.5, 0.6, 0.7, 0.8}}};
    RunOptions options;
    options.jobs = 3;
    const RunArtifacts artifacts = run_sweep(config, options);
    const json& rows = artifacts.summary.at("rows");
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(rows[k].at("value").get<double>() == doctest::Approx(0.5 + 0.1 * k));
    }
}

TEST_CASE("inline models assemble from the operator grammar") {
    const auto dir = temp_dir("inline");
    const json config{
        {"schema", 1},
        {"model",
         {{"kind", "inline"},
          {"dim", 2},
          {"hamiltonian", {{{"op", "sigma_z"}, {"scale", "0.5*1.3"}}}},
          {"channels",
           {{{"operator", {{{"op", "sigma_minus"}, {"scale", "sqrt(0.8)"}}}},
             {"sign", 1},
             {"reservoir", "bath"}}}},
          {"reservoirs", {{"bath", 0.9}}}}},
        {"initial_state", "maximally_mixed"},
        {"time", {{"t0", 0.0}, {"t1", 1.0}, {"steps", 100}}},
        {"gauges", {{{"name", "identity"}}}},
        {"outputs",
         {{"csv_path", (dir / "inline").string()},
          {"summary_path", (dir / "summary.json").string()}}},
        {"analyses", {{"thermo", true}}},
    };
    const RunArtifacts artifacts = run_scenario(config);
    const json& row = artifacts.summary.at("gauges").at(0);
    // spontaneous decay from the mixed state releases heat
    CHECK(row.at("Q").get<double>() < -1e-3);
    CHECK(row.at("first_law_gap").get<double>() < 1e-8);

    json bad = config;
    bad["model"]["channels"][0]["operator"][0]["op"] = "sigma_w";
    CHECK_THROWS_AS(run_scenario(bad), SchemaError);

    json bad_proj = config;
    bad_proj["model"]["hamiltonian"][0] = {{"op", "proj"}, {"args", {0, 5}}};
    CHECK_THROWS_AS(run_scenario(bad_proj), SchemaError);
}

TEST_CASE("resonance fluorescence presentations from the CLI") {
    const auto dir = temp_dir("rf");
    json config{
        {"schema", 1},
        {"model",
         {{"kind", "resonance_fluorescence"},
          {"omega0", 1.3},
          {"omega", 1.1},
          {"rabi", 0.8},
          {"gamma_rate", 0.7},
          {"nbar", 0.4},
          {"presentation", "driven"}}},
        {"initial_state", "maximally_mixed"},
        {"time", {{"t0", 0.0}, {"t1", 1.0}, {"steps", 200}}},
        {"gauges", {{{"name", "identity"}}}},
        {"outputs",
         {{"csv_path", (dir / "rf").string()},
          {"summary_path", (dir / "summary.json").string()}}},
        {"analyses", {{"thermo", true}}},
    };
    const RunArtifacts driven = run_scenario(config);

    config["model"]["presentation"] = "displaced";
    config["outputs"]["csv_path"] = (dir / "rf_displaced").string();
    config["outputs"]["summary_path"] = (dir / "summary_displaced.json").string();
    const RunArtifacts displaced = run_scenario(config);

    // same evolution, different First-Law split: the driven presentation
    // carries the work, the displaced one moves it into the current
    const json& drow = driven.summary.at("gauges").at(0);
    const json& xrow = displaced.summary.at("gauges").at(0);
    CHECK(std::abs(drow.at("W").get<double>()) > 1e-3);
    CHECK(std::abs(xrow.at("W").get<double>()) < 1e-10);
    const double de_driven = drow.at("delta_energy").get<double>();
    const double de_displaced = xrow.at("delta_energy").get<double>();
    CHECK(de_driven != doctest::Approx(de_displaced).epsilon(1e-6));
}

TEST_CASE("qdbc scenario summary") {
    const auto dir = temp_dir("qdbc");
    const json config{
        {"schema", 1},
        {"model",
         {{"kind", "qdbc_decay"}, {"omega0", 1.0}, {"beta", 0.8}, {"gamma_rate", 0.6}}},
        {"initial_state", {{"name", "gibbs"}, {"beta", 0.8}}},
        {"time", {{"t0", 0.0}, {"t1", 2.0}, {"steps", 200}}},
        {"gauges", {{{"name", "identity"}}}},
        {"outputs",
         {{"csv_path", (dir / "qdbc").string()},
          {"summary_path", (dir / "summary.json").string()}}},
        {"analyses", {{"thermo", true}, {"qdbc", json::object()}}},
    };
    const RunArtifacts artifacts = run_scenario(config);
    const json& qdbc = artifacts.summary.at("qdbc");
    CHECK(qdbc.at("commutes_a").get<double>() <= 1e-12);
    CHECK(qdbc.at("gibbs_fixed_point_residual").get<double>() <= 1e-10);
}
