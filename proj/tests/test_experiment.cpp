#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rydwire/errors.hpp"
#include "rydwire/experiment.hpp"

using namespace rydwire;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("rydwire_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json k4_config() {
    return {{"schema_version", 1},
            {"seed", 2024},
            {"graph", "tetrahedron"},
            {"coupling", "uniform"},
            {"shots", 927},
            {"step", {{"dt_us", 0.02}, {"integrator", "magnus4"}, {"refine", false}}}};
}

int run_cli(const std::string &args, const fs::path &err_file) {
    const std::string cmd = std::string(RYDWIRE_CLI_PATH) + " " + args + " 2> " + err_file.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, SeedIsMandatory) {
    auto doc = k4_config();
    doc.erase("seed");
    EXPECT_THROW(ExperimentConfig::from_json(doc), InvalidArgument);
}

TEST(Config, RejectsUnknownKeysAndVersions) {
    auto doc = k4_config();
    doc["shot"] = 3;
    EXPECT_THROW(ExperimentConfig::from_json(doc), InvalidArgument);
    doc = k4_config();
    doc["schema_version"] = 2;
    EXPECT_THROW(ExperimentConfig::from_json(doc), InvalidArgument);
    doc = k4_config();
    doc["coupling"] = "dipolar";
    EXPECT_THROW(ExperimentConfig::from_json(doc), InvalidArgument);
    doc = k4_config();
    doc["graph"] = "icosahedron";
    EXPECT_THROW(ExperimentConfig::from_json(doc), UnsupportedGraph);
}

TEST(Config, MissingReferencedFile) {
    auto doc = k4_config();
    doc["layout"] = {{"source", "file"}, {"path", "/nonexistent/layout.csv"}};
    EXPECT_THROW(ExperimentConfig::from_json(doc), InvalidArgument);
}

TEST(Config, JsonRoundTrip) {
    auto doc = k4_config();
    doc["layout"] = {{"source", "k4_family"}, {"d_ratio", 1.2}};
    doc["coupling"] = "physical";
    doc["noise"] = {{"dephasing_rate_mhz", 0.05}, {"p01", 0.12}, {"p10", 0.09}};
    const auto c = ExperimentConfig::from_json(doc);
    const auto again = ExperimentConfig::from_json(c.to_json());
    EXPECT_EQ(again.to_json(), c.to_json());
    EXPECT_EQ(c.layout, LayoutSource::K4Family);
    EXPECT_DOUBLE_EQ(c.d_ratio, 1.2);
}

TEST(Model, LayoutFromCsvFile) {
    const fs::path dir = scratch("layout_file");
    write_text(dir / "layout.csv", layout_csv(table1_layout("cube")));
    auto doc = k4_config();
    doc["graph"] = "cube";
    doc["coupling"] = "physical";
    doc["layout"] = {{"source", "file"}, {"path", "layout.csv"}};
    const auto c = ExperimentConfig::from_json(doc, dir);
    const Model m = build_model(c);
    ASSERT_TRUE(m.layout.has_value());
    EXPECT_EQ(m.layout->num_atoms(), 16);
    EXPECT_NEAR(m.layout->position(0).x, 4.0, 1e-12);
}

TEST(Model, K4FamilyOnlyForTetrahedron) {
    auto doc = k4_config();
    doc["graph"] = "cube";
    doc["layout"] = {{"source", "k4_family"}, {"d_ratio", 1.1}};
    EXPECT_THROW(build_model(ExperimentConfig::from_json(doc)), InvalidArgument);
}

TEST(Run, TetrahedronBundle) {
    const fs::path dir = scratch("k4_run");
    const auto r = run_experiment(ExperimentConfig::from_json(k4_config()), dir);
    for (const char *f : {"layout.csv", "schedule.json", "shots.csv", "raw_distribution.json",
                          "postselected_distribution.json", "report.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["postselection"]["total_events"], 927);
    EXPECT_GT(report["postselection"]["kept_events"].get<long>(), 0);
    EXPECT_GT(report["mis_probability"]["value"].get<double>(), 0.9);
    for (const char *k : {"c6_mhz_um6", "omega0_mhz", "delta_f_mhz", "gamma_mhz", "dt_us"}) {
        EXPECT_TRUE(report["parameters"].contains(k)) << k;
    }
    EXPECT_EQ(r.raw.total_count(), 927);
}

TEST(Run, DeterministicBundle) {
    auto doc = k4_config();
    doc["noise"] = {{"dephasing_rate_mhz", 0.05}, {"p01", 0.12}, {"p10", 0.09}};
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    run_experiment(ExperimentConfig::from_json(doc), a);
    run_experiment(ExperimentConfig::from_json(doc), b);
    for (const auto &entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
    }
    doc["seed"] = 2025;
    const fs::path c = scratch("det_c");
    run_experiment(ExperimentConfig::from_json(doc), c);
    EXPECT_NE(slurp(a / "raw_distribution.json"), slurp(c / "raw_distribution.json"));
}

TEST(Run, TrajectoriesForLargeGraphs) {
    // Small and short so the test stays quick; only the routing is checked.
    auto doc = k4_config();
    doc["graph"] = "cube";
    doc["schedule"] = {{"t1_us", 0.05}, {"t2_us", 0.15}, {"tf_us", 0.2}, {"omega0_mhz", 0.74},
                       {"delta_i_mhz", -3.0}, {"delta_f_mhz", 3.0}};
    doc["noise"] = {{"dephasing_rate_mhz", 0.05}};
    doc["trajectories"] = 2;
    doc["shots"] = 50;
    try {
        const auto r = run_experiment(ExperimentConfig::from_json(doc), std::nullopt);
        EXPECT_EQ(r.evolution.method, "trajectories");
    } catch (const EmptyPostselection &e) {
        EXPECT_EQ(e.total_events, 50u);
    }
}

TEST(Phases, ReportFiles) {
    const fs::path dir = scratch("phases");
    phase_report("octahedron", false, dir);
    const auto doc = nlohmann::json::parse(slurp(dir / "phases.json"));
    EXPECT_EQ(doc.size(), 4u);
    phase_report("tetrahedron", false, dir);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "phases.json")).size(), 5u);
    phase_report("cube", false, dir);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "phases.json")).size(), 3u);
    EXPECT_THROW(phase_report("dodecahedron", false, dir), UnsupportedGraph);
}

TEST(Scaling, FitAndErrors) {
    const auto fit = fit_scaling({scaling_point(4, 6), scaling_point(8, 16), scaling_point(6, 18)});
    // Least squares through (4,6), (8,16), (6,18).
    EXPECT_NEAR(fit.slope, 2.5, 1e-12);
    EXPECT_NEAR(fit.intercept, 40.0 / 3.0 - 15.0, 1e-12);
    EXPECT_THROW(fit_scaling({scaling_point(4, 6), scaling_point(4, 6)}), InvalidArgument);
    EXPECT_THROW(fit_scaling({}), InvalidArgument);
}

TEST(Scaling, UserFilePassthrough) {
    const fs::path dir = scratch("scaling");
    write_text(dir / "points.csv",
               "label,n,n_prime\ntetrahedron,4,6\ncube,8,16\noctahedron,6,18\ndodecahedron,20,40\n"
               "icosahedron,12,40\nC60,60,150\nC70,70,170\n");
    const auto pts = read_scaling_csv(dir / "points.csv");
    ASSERT_EQ(pts.size(), 7u);
    scaling_report(pts, dir);
    const std::string csv = slurp(dir / "scaling.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
}

TEST(Cli, RunAndErrors) {
    const fs::path dir = scratch("cli");
    write_json(dir / "k4.json", k4_config());
    EXPECT_EQ(run_cli("run --config " + (dir / "k4.json").string() + " --out " + (dir / "a").string() + " --quiet",
                      dir / "err.txt"),
              0);
    EXPECT_EQ(run_cli("run --config " + (dir / "k4.json").string() + " --seed 2024 --out " + (dir / "b").string(),
                      dir / "err.txt"),
              0);
    EXPECT_EQ(slurp(dir / "a" / "raw_distribution.json"), slurp(dir / "b" / "raw_distribution.json"));

    auto bad = k4_config();
    bad.erase("seed");
    write_json(dir / "bad.json", bad);
    EXPECT_EQ(run_cli("run --config " + (dir / "bad.json").string() + " --out " + (dir / "c").string(),
                      dir / "err.txt"),
              2);
    const auto rec = nlohmann::json::parse(slurp(dir / "err.txt"));
    EXPECT_EQ(rec["error"], "invalid_argument");

    EXPECT_EQ(run_cli("phases cube --out " + (dir / "p").string(), dir / "err.txt"), 0);
    EXPECT_TRUE(fs::exists(dir / "p" / "phases.csv"));
    EXPECT_EQ(run_cli("layout octahedron --out " + (dir / "l").string(), dir / "err.txt"), 0);
    EXPECT_EQ(slurp(dir / "l" / "layout.csv"), layout_csv(table1_layout("octahedron")));
    EXPECT_EQ(run_cli("graph dodecahedron", dir / "err.txt"), 2);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "err.txt"))["error"], "unsupported_graph");
    EXPECT_EQ(run_cli("scaling --out " + (dir / "s").string(), dir / "err.txt"), 0);
    EXPECT_TRUE(fs::exists(dir / "s" / "scaling.json"));
}

TEST(Cli, EnvironmentOutputRoot) {
    const fs::path dir = scratch("cli_env");
    const std::string cmd = "RYDWIRE_OUT_ROOT=" + dir.string() + " " + RYDWIRE_CLI_PATH + " scaling --quiet";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "scaling" / "scaling.csv"));
}
